//! Rate functions and confinement probabilities.
//!
//! Closed forms: relative entropy between step laws, the crossover cost of
//! forcing a drift through a monochromatic coloring, the increment
//! moment-generating function. Root finding: the exponential tilt matching
//! a target drift and the resulting decay rate of P(S_m = (2/3)m), plus the
//! criterion deciding when that decay beats the per-step cost of a straight
//! compatible walk. Transfer matrices: the probability that a simple walk
//! stays inside a finite interval, its spectral asymptotics, and the
//! conditional law of the origin color under an all-black record.

use crate::error::Error;
use crate::Result;
use std::f64::consts::PI;

/// Relative entropy H((q,δ) | (p,ε)) of one step law with respect to
/// another, with the conventions 0·log 0 = 0 and x·log(x/0) = +∞ for x > 0.
/// The tilted parameter q may range over all of [0, 1] so that central
/// differences at q = 1/2 stay in domain.
pub fn relative_entropy(q: f64, delta: f64, p: f64, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside [0, 1]")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta = {delta} outside [0, 1)")));
    }
    check_params(p, eps)?;
    let mut h = 0.0;
    for (a, b) in [
        (delta, eps),
        ((1.0 - delta) * q, (1.0 - eps) * p),
        ((1.0 - delta) * (1.0 - q), (1.0 - eps) * (1.0 - p)),
    ] {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        h += a * (a / b).ln();
    }
    Ok(h.max(0.0))
}

fn check_params(p: f64, eps: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [1/2, 1]")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("epsilon = {eps} outside [0, 1)")));
    }
    Ok(())
}

/// Cost per unit time of walking like (q,δ) through an all-black coloring
/// under the law (p,ε): the entropy of the change of step law plus the
/// coloring cost of the fresh sites, C(q,δ) = H + (1−δ)(2q−1)·log 2.
pub fn crossover_cost(q: f64, delta: f64, p: f64, eps: f64) -> Result<f64> {
    Ok(relative_entropy(q, delta, p, eps)? + (1.0 - delta) * (2.0 * q - 1.0) * 2f64.ln())
}

/// Closed form of ∂C/∂q at q = 1/2: (1−δ)·log(4(1−p)/p). Positive exactly
/// when p < 4/5, for every δ and ε.
pub fn crossover_cost_slope_at_half(delta: f64, p: f64) -> f64 {
    (1.0 - delta) * (4.0 * (1.0 - p) / p).ln()
}

/// Moment-generating function of one increment:
/// M(λ) = ε + p(1−ε)e^λ + (1−p)(1−ε)e^{−λ}.
pub fn moment_generating(lambda: f64, p: f64, eps: f64) -> f64 {
    eps + p * (1.0 - eps) * lambda.exp() + (1.0 - p) * (1.0 - eps) * (-lambda).exp()
}

fn mgf_derivative(lambda: f64, p: f64, eps: f64) -> f64 {
    p * (1.0 - eps) * lambda.exp() - (1.0 - p) * (1.0 - eps) * (-lambda).exp()
}

/// Exponential tilt matching a target drift, and the induced decay rate
/// drift·λ̄ − log M(λ̄) of P(S_m = drift·m).
#[derive(Debug, Clone, Copy)]
pub struct TiltSolution {
    pub lambda_bar: f64,
    pub rate: f64,
    pub drift: f64,
}

/// Solve M'(λ)/M(λ) = drift for the unique λ̄ (the ratio is strictly
/// increasing), by bisection on [−40, 40] to width 1e−8 followed by two
/// Newton steps. Errors when the drift lies outside the open interval of
/// attainable tilted means.
pub fn solve_tilt(p: f64, eps: f64, drift: f64) -> Result<TiltSolution> {
    check_params(p, eps)?;
    let lo_support = if (1.0 - p) * (1.0 - eps) > 0.0 {
        -1.0
    } else if eps > 0.0 {
        0.0
    } else {
        1.0
    };
    // p >= 1/2 and eps < 1 guarantee an up step, so the supremum is 1
    if drift <= lo_support || drift >= 1.0 {
        return Err(Error::UnattainableDrift { drift });
    }
    let g = |lambda: f64| mgf_derivative(lambda, p, eps) / moment_generating(lambda, p, eps);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    if g(lo) >= drift || g(hi) <= drift {
        return Err(Error::UnattainableDrift { drift });
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < drift {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..2 {
        let m = moment_generating(lambda, p, eps);
        let m1 = mgf_derivative(lambda, p, eps);
        // M'' = M − ε for this three-point step law
        let m2 = m - eps;
        let value = m1 / m - drift;
        let slope = m2 / m - (m1 / m) * (m1 / m);
        if slope > 0.0 {
            lambda -= value / slope;
        }
    }
    let rate = (drift * lambda - moment_generating(lambda, p, eps).ln()).max(0.0);
    Ok(TiltSolution {
        lambda_bar: lambda,
        rate,
        drift,
    })
}

/// Decision of the exponential-decay criterion at drift 2/3 together with
/// its margin log(p(1−ε)/2) + rate.
#[derive(Debug, Clone, Copy)]
pub struct Goodness {
    pub holds: bool,
    pub margin: f64,
}

/// Holds when the walk drift strictly exceeds 2/3 and the decay rate of
/// P(S_m = 2m/3) beats the per-step cost log(2/(p(1−ε))) of the straight
/// compatible walk.
pub fn goodness_criterion(p: f64, eps: f64) -> Result<Goodness> {
    check_params(p, eps)?;
    let drift_ok = (2.0 * p - 1.0) * (1.0 - eps) > 2.0 / 3.0;
    let rate = match solve_tilt(p, eps, 2.0 / 3.0) {
        Ok(tilt) => tilt.rate,
        // drift 2/3 unattainable from below means P(S_m = 2m/3) = 0
        Err(Error::UnattainableDrift { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let margin = (p * (1.0 - eps) / 2.0).ln() + rate;
    Ok(Goodness {
        holds: drift_ok && margin > 0.0,
        margin,
    })
}

/// The closed-form flip point of the criterion at ε = 0, as a reduced
/// fraction 12^6 / (12^6 + 5^5) and its decimal value.
pub fn p_star_zero_eps() -> (u64, u64) {
    (2_985_984, 2_989_109)
}

pub fn p_star_zero_eps_f64() -> f64 {
    let (num, den) = p_star_zero_eps();
    num as f64 / den as f64
}

/// Probability that the simple walk (p = 1/2, ε = 0) started at 0 stays
/// inside [−j+1, i−1] at all times 0..n−1.
pub fn confinement_probability(n: usize, i: usize, j: usize) -> Result<f64> {
    if n == 0 || i == 0 || j == 0 {
        return Err(Error::Domain(
            "confinement needs n >= 1, i >= 1, j >= 1".to_string(),
        ));
    }
    let width = i + j - 1;
    let start = j - 1;
    let evolution = confinement_survival(width, n - 1);
    Ok(evolution.value(start))
}

/// Survival probabilities of the interval-confined simple walk from every
/// start site, after a given number of steps, carried as a renormalized
/// vector plus the log of the accumulated scale.
struct ScaledVector {
    values: Vec<f64>,
    log_scale: f64,
}

impl ScaledVector {
    fn value(&self, index: usize) -> f64 {
        self.values[index] * self.log_scale.exp()
    }
}

fn confinement_survival(width: usize, steps: usize) -> ScaledVector {
    let mut v = vec![1.0f64; width];
    let mut log_scale = 0.0f64;
    let mut next = vec![0.0f64; width];
    for _ in 0..steps {
        for s in 0..width {
            let left = if s > 0 { v[s - 1] } else { 0.0 };
            let right = if s + 1 < width { v[s + 1] } else { 0.0 };
            next[s] = 0.5 * (left + right);
        }
        std::mem::swap(&mut v, &mut next);
        let max = v.iter().cloned().fold(0.0f64, f64::max);
        if max > 0.0 && max < 1e-280 {
            for x in v.iter_mut() {
                *x /= max;
            }
            log_scale += max.ln();
        }
    }
    ScaledVector {
        values: v,
        log_scale,
    }
}

/// Rectangle of confinement probabilities p(n, i, j) at a fixed horizon,
/// built width by width (every split i + j − 1 = w shares one evolution).
#[derive(Debug, Clone)]
pub struct ConfinementTable {
    pub n: usize,
    i_max: usize,
    j_max: usize,
    /// values[(i-1) * j_max + (j-1)]
    values: Vec<f64>,
}

impl ConfinementTable {
    pub fn build(n: usize, i_max: usize, j_max: usize) -> Result<Self> {
        if n == 0 || i_max == 0 || j_max == 0 {
            return Err(Error::Domain(
                "table needs n >= 1, i_max >= 1, j_max >= 1".to_string(),
            ));
        }
        let mut values = vec![0.0; i_max * j_max];
        for width in 1..=(i_max + j_max - 1) {
            let survival = confinement_survival(width, n - 1);
            for start in 0..width {
                let j = start + 1;
                let i = width - start;
                if i <= i_max && j <= j_max {
                    values[(i - 1) * j_max + (j - 1)] = survival.value(start);
                }
            }
        }
        Ok(ConfinementTable {
            n,
            i_max,
            j_max,
            values,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        if i == 0 || j == 0 || i > self.i_max || j > self.j_max {
            return Err(Error::IndexOutOfBounds {
                index: i.max(j),
                len: self.i_max.max(self.j_max),
            });
        }
        Ok(self.values[(i - 1) * self.j_max + (j - 1)])
    }
}

/// Leading spectral behavior of the one-sided confinement probability
/// p(n, i, 1) ~ base^{n−1} · constant along even or odd n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy)]
pub struct SpitzerAsymptote {
    pub base: f64,
    pub constant: f64,
}

pub fn spitzer_asymptote(i: usize, parity: Parity) -> Result<SpitzerAsymptote> {
    if i < 2 {
        return Err(Error::Domain(
            "asymptote needs i >= 2 (narrower intervals die out)".to_string(),
        ));
    }
    let width = (i + 1) as f64;
    let base = (PI / width).cos();
    let mut sum = 0.0;
    for j in 0..i {
        let odd = j % 2 == 1;
        let keep = match parity {
            Parity::Even => odd,
            Parity::Odd => !odd,
        };
        if keep {
            sum += (PI * (j as f64 + 1.0) / width).sin();
        }
    }
    let constant = 4.0 / width * (PI / width).sin() * sum;
    Ok(SpitzerAsymptote { base, constant })
}

/// Conditional law of the origin color under an all-black record for the
/// simple walk: returns P(C_0 = W | Y_1^n = B^n) = N(n)/D(n) with
/// N(n) = Σ_i 2^{−(i+2)} p(n,i,1) and D(n) = Σ_{i,j} 2^{−(i+j+1)} p(n,i,j),
/// truncating both sums at i, j ≤ i_max.
pub fn black_run_conditional(n: usize, i_max: usize) -> Result<f64> {
    let trend = black_run_trend(n, i_max)?;
    Ok(trend
        .last()
        .map(|&(_, white)| white)
        .expect("n >= 1 yields at least one entry"))
}

/// P(C_0 = W | B^n) for every horizon 1..=n_max in one sweep. Each returned
/// pair is (n, N(n)/D(n)).
pub fn black_run_trend(n_max: usize, i_max: usize) -> Result<Vec<(usize, f64)>> {
    if n_max == 0 || i_max < 2 {
        return Err(Error::Domain(
            "trend needs n_max >= 1 and i_max >= 2".to_string(),
        ));
    }
    let mut numerator = vec![0.0f64; n_max + 1];
    let mut denominator = vec![0.0f64; n_max + 1];
    // width w covers every split i + j = w + 1 with start offset j − 1;
    // both sums weight a width-w term by 2^{−(w+2)}
    for w in 1..=(2 * i_max - 1) {
        let weight = 2.0f64.powi(-(w as i32) - 2);
        let mut v = vec![1.0f64; w];
        let mut next = vec![0.0f64; w];
        let mut log_scale = 0.0f64;
        for n in 1..=n_max {
            // v now holds survival for n−1 steps, i.e. horizon n
            let scale = log_scale.exp();
            // N-term: j = 1 needs i = w <= i_max
            if w <= i_max {
                numerator[n] += weight * v[0] * scale;
            }
            let mut run = 0.0;
            for (s, val) in v.iter().enumerate() {
                let j = s + 1;
                let i = w - s;
                if i <= i_max && j <= i_max {
                    run += val;
                }
            }
            denominator[n] += weight * run * scale;
            if n == n_max {
                break;
            }
            for s in 0..w {
                let left = if s > 0 { v[s - 1] } else { 0.0 };
                let right = if s + 1 < w { v[s + 1] } else { 0.0 };
                next[s] = 0.5 * (left + right);
            }
            std::mem::swap(&mut v, &mut next);
            let max = v.iter().cloned().fold(0.0f64, f64::max);
            if max > 0.0 && max < 1e-280 {
                for x in v.iter_mut() {
                    *x /= max;
                }
                log_scale += max.ln();
            }
        }
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let tail = 2.0f64.powi(-(i_max as i32));
        if tail >= 1e-12 * denominator[n] {
            return Err(Error::TruncationInsufficient {
                tail,
                retained: denominator[n],
            });
        }
        out.push((n, numerator[n] / denominator[n]));
    }
    Ok(out)
}

/// Exact point mass P(S_m = target) by convolving the step law m times.
pub fn exact_point_mass(m: usize, p: f64, eps: f64, target: i64) -> f64 {
    let mut dist = vec![0.0f64; 2 * m + 1];
    let offset = m as i64;
    dist[offset as usize] = 1.0;
    let (pause, up, down) = (eps, p * (1.0 - eps), (1.0 - p) * (1.0 - eps));
    let mut next = vec![0.0f64; 2 * m + 1];
    for _ in 0..m {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for (idx, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            if idx + 1 < next.len() {
                next[idx + 1] += mass * up;
            }
            next[idx] += mass * pause;
            if idx > 0 {
                next[idx - 1] += mass * down;
            }
        }
        std::mem::swap(&mut dist, &mut next);
    }
    let idx = target + offset;
    if idx < 0 || idx as usize >= dist.len() {
        return 0.0;
    }
    dist[idx as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_is_zero_on_the_diagonal_and_infinite_off_support() {
        assert_eq!(relative_entropy(0.7, 0.2, 0.7, 0.2).unwrap(), 0.0);
        assert_eq!(
            relative_entropy(0.6, 0.1, 0.8, 0.0).unwrap(),
            f64::INFINITY
        );
        assert!(relative_entropy(0.6, 0.0, 0.4, 0.0).is_err());
        assert!(relative_entropy(1.2, 0.0, 0.7, 0.0).is_err());
    }

    #[test]
    fn entropy_is_nonnegative_on_a_grid() {
        for qi in 0..8 {
            for di in 0..6 {
                for pi in 0..8 {
                    for ei in 0..6 {
                        let q = 0.5 + 0.5 * qi as f64 / 8.0;
                        let d = di as f64 / 6.0 * 0.9;
                        let p = 0.5 + 0.5 * pi as f64 / 8.0;
                        let e = ei as f64 / 6.0 * 0.9;
                        assert!(relative_entropy(q, d, p, e).unwrap() >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn crossover_cost_at_zero_drift_is_plain_entropy() {
        let c = crossover_cost(0.5, 0.2, 0.8, 0.2).unwrap();
        let h = relative_entropy(0.5, 0.2, 0.8, 0.2).unwrap();
        assert!((c - h).abs() < 1e-15);
    }

    #[test]
    fn slope_closed_form_matches_finite_differences() {
        let h = 1e-5;
        for &(delta, p, eps) in &[(0.0, 0.6, 0.0), (0.2, 0.75, 0.2), (0.3, 0.9, 0.3)] {
            let closed = crossover_cost_slope_at_half(delta, p);
            let fd = (crossover_cost(0.5 + h, delta, p, eps).unwrap()
                - crossover_cost(0.5 - h, delta, p, eps).unwrap())
                / (2.0 * h);
            assert!((closed - fd).abs() < 1e-8, "delta={delta} p={p}");
        }
    }

    #[test]
    fn slope_sign_flips_at_four_fifths() {
        assert!(crossover_cost_slope_at_half(0.0, 0.79) > 0.0);
        assert!(crossover_cost_slope_at_half(0.0, 0.81) < 0.0);
        assert!(crossover_cost_slope_at_half(0.3, 0.8).abs() < 1e-15);
    }

    #[test]
    fn mgf_basics() {
        assert!((moment_generating(0.0, 0.77, 0.13) - 1.0).abs() < 1e-15);
        assert!((moment_generating(0.9, 1.0, 0.0) - 0.9f64.exp()).abs() < 1e-15);
        // strict convexity of log M on a grid
        let f = |l: f64| moment_generating(l, 0.7, 0.2).ln();
        for k in -20..20 {
            let l = k as f64 * 0.25;
            let second = f(l + 0.01) - 2.0 * f(l) + f(l - 0.01);
            assert!(second > 0.0);
        }
    }

    #[test]
    fn tilt_solution_matches_closed_form_at_zero_pause() {
        for &p in &[0.7, 0.85, 0.9, 0.99] {
            let tilt = solve_tilt(p, 0.0, 2.0 / 3.0).unwrap();
            let expect = 0.5 * (5.0 * (1.0 - p) / p).ln();
            assert!(
                (tilt.lambda_bar - expect).abs() < 1e-12,
                "p={p}: {} vs {expect}",
                tilt.lambda_bar
            );
            let c = (5.0 / (6.0 * p)).powf(5.0 / 6.0)
                * (1.0 / (6.0 * (1.0 - p))).powf(1.0 / 6.0);
            assert!((tilt.rate - c.ln()).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn tilt_is_zero_at_matching_drift() {
        let tilt = solve_tilt(5.0 / 6.0, 0.0, 2.0 / 3.0).unwrap();
        assert!(tilt.lambda_bar.abs() < 1e-10);
        assert!(tilt.rate < 1e-12);
    }

    #[test]
    fn tilt_sign_follows_drift_condition() {
        // mean step above 2/3 forces a negative tilt
        let tilt = solve_tilt(0.95, 0.0, 2.0 / 3.0).unwrap();
        assert!(tilt.lambda_bar < 0.0);
        let tilt = solve_tilt(0.7, 0.0, 2.0 / 3.0).unwrap();
        assert!(tilt.lambda_bar > 0.0);
    }

    #[test]
    fn unattainable_drift_is_an_error() {
        assert!(matches!(
            solve_tilt(1.0, 0.0, 2.0 / 3.0),
            Err(Error::UnattainableDrift { .. })
        ));
    }

    #[test]
    fn criterion_examples() {
        assert!(goodness_criterion(1.0, 0.0).unwrap().holds);
        assert!(!goodness_criterion(0.7, 0.0).unwrap().holds);
        let p_star = p_star_zero_eps_f64();
        assert!(goodness_criterion(p_star + 1e-6, 0.0).unwrap().holds);
        assert!(!goodness_criterion(p_star - 1e-6, 0.0).unwrap().holds);
    }

    #[test]
    fn p_star_fraction() {
        let (num, den) = p_star_zero_eps();
        assert_eq!(num, 12u64.pow(6));
        assert_eq!(den, 12u64.pow(6) + 5u64.pow(5));
        assert!((p_star_zero_eps_f64() - 0.9989545).abs() < 1e-7);
    }

    #[test]
    fn confinement_examples() {
        assert_eq!(confinement_probability(1, 3, 2).unwrap(), 1.0);
        assert_eq!(confinement_probability(2, 1, 1).unwrap(), 0.0);
        assert_eq!(confinement_probability(5, 1, 1).unwrap(), 0.0);
        assert!((confinement_probability(2, 2, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn confinement_monotone_in_interval_and_horizon() {
        for n in [2usize, 5, 9] {
            for i in 1..5 {
                for j in 1..5 {
                    let p = confinement_probability(n, i, j).unwrap();
                    assert!((0.0..=1.0).contains(&p));
                    assert!(p <= confinement_probability(n, i + 1, j).unwrap() + 1e-15);
                    assert!(p <= confinement_probability(n, i, j + 1).unwrap() + 1e-15);
                    assert!(confinement_probability(n + 1, i, j).unwrap() <= p + 1e-15);
                }
            }
        }
    }

    #[test]
    fn confinement_table_matches_scalar_and_is_monotone() {
        for n in [3usize, 8] {
            let table = ConfinementTable::build(n, 5, 5).unwrap();
            let next = ConfinementTable::build(n + 1, 5, 5).unwrap();
            for i in 1..=5 {
                for j in 1..=5 {
                    let v = table.get(i, j).unwrap();
                    assert_eq!(v, confinement_probability(n, i, j).unwrap());
                    assert!((0.0..=1.0).contains(&v));
                    if i < 5 {
                        assert!(v <= table.get(i + 1, j).unwrap() + 1e-15);
                    }
                    if j < 5 {
                        assert!(v <= table.get(i, j + 1).unwrap() + 1e-15);
                    }
                    assert!(next.get(i, j).unwrap() <= v + 1e-15);
                }
            }
            assert!(table.get(0, 1).is_err());
            assert!(table.get(1, 6).is_err());
        }
    }

    #[test]
    fn brute_force_confinement_agrees_exactly_at_small_horizons() {
        // direct path enumeration of the simple walk
        for n in 1..=12usize {
            for (i, j) in [(1usize, 1usize), (2, 1), (3, 2), (4, 4)] {
                let mut stay = 0u64;
                let paths = 1u64 << (n - 1);
                for bits in 0..paths {
                    let mut pos = 0i64;
                    let mut inside = true;
                    for t in 0..n - 1 {
                        pos += if bits >> t & 1 == 1 { 1 } else { -1 };
                        if pos < -(j as i64) + 1 || pos > i as i64 - 1 {
                            inside = false;
                            break;
                        }
                    }
                    if inside {
                        stay += 1;
                    }
                }
                let expect = stay as f64 / paths as f64;
                let got = confinement_probability(n, i, j).unwrap();
                assert!(
                    (got - expect).abs() < 1e-12,
                    "n={n} i={i} j={j}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn spitzer_base_at_three() {
        let s = spitzer_asymptote(3, Parity::Even).unwrap();
        assert!((s.base - (PI / 4.0).cos()).abs() < 1e-15);
        assert!(spitzer_asymptote(1, Parity::Even).is_err());
    }

    #[test]
    fn black_run_small_horizons() {
        assert!((black_run_conditional(1, 50).unwrap() - 0.5).abs() < 1e-12);
        assert!((black_run_conditional(2, 50).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn point_mass_matches_binomial() {
        // p = 0.9, eps = 0, m = 4, S_4 = 2 means 3 ups and 1 down
        let got = exact_point_mass(4, 0.9, 0.0, 2);
        let expect = 4.0 * 0.9f64.powi(3) * 0.1;
        assert!((got - expect).abs() < 1e-15);
    }
}
