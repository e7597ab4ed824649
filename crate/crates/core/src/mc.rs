//! Reproducible Monte Carlo: direct simulation of (walk, scenery, record)
//! and a sequential importance-sampling estimator of the origin-color
//! conditional for records beyond exact reach.
//!
//! All randomness comes from a stateless counter-based generator keyed by
//! (seed, stream, step, slot): distinct particles never share a stream, so
//! results are bit-identical regardless of scheduling or parallel layout.

use crate::error::Error;
use crate::record::{Color, ColorRecord, InducedColoring, StepDistribution, WalkPath};
use crate::Result;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless counter-based generator.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    pub fn draw_u64(&self, stream: u64, step: u64, slot: u64) -> u64 {
        mix(self.seed ^ mix(stream ^ mix(step ^ mix(slot))))
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn draw_f64(&self, stream: u64, step: u64, slot: u64) -> f64 {
        (self.draw_u64(stream, step, slot) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

const STREAM_WALK: u64 = 0x5741_4c4b; // "WALK"
const STREAM_SCENERY: u64 = 0x5343_454e; // "SCEN"
const STREAM_RESAMPLE: u64 = 0x5253_4d50; // "RSMP"

fn zigzag(site: i64) -> u64 {
    ((site << 1) ^ (site >> 63)) as u64
}

/// Fair color of a site in the seeded scenery.
fn scenery_color(rng: &CounterRng, site: i64) -> Color {
    if rng.draw_u64(STREAM_SCENERY, zigzag(site), 0) & 1 == 0 {
        Color::B
    } else {
        Color::W
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub path: WalkPath,
    pub coloring: InducedColoring,
    pub record: ColorRecord,
}

/// Simulate n steps of walk over a lazily colored scenery and read off the
/// record. Identical (dist, n, seed) gives identical output bits.
pub fn simulate(dist: &StepDistribution, n: usize, seed: u64) -> Result<SimulationOutcome> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".to_string()));
    }
    let rng = CounterRng::new(seed);
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(0i64);
    let mut pos = 0i64;
    for t in 1..=n {
        let u = rng.draw_f64(STREAM_WALK, t as u64, 0);
        let inc = if u < dist.pause() {
            0
        } else if u < dist.pause() + dist.up() {
            1
        } else {
            -1
        };
        pos += inc;
        positions.push(pos);
    }
    let record: ColorRecord = positions[1..]
        .iter()
        .map(|&s| scenery_color(&rng, s))
        .collect();
    let min = *positions.iter().min().expect("nonempty");
    let max = *positions.iter().max().expect("nonempty");
    let colors = (min..=max).map(|s| scenery_color(&rng, s)).collect();
    Ok(SimulationOutcome {
        path: WalkPath::new(positions)?,
        coloring: InducedColoring::new(min, colors),
        record,
    })
}

/// A sequential-importance-sampling estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub particles: usize,
    /// Effective sample size at the final step.
    pub ess: f64,
    pub seed: u64,
}

/// One particle: the walk's visited interval with its induced colors, in
/// absolute coordinates (the origin is always inside).
#[derive(Debug, Clone)]
struct Particle {
    left: i64,
    colors: Vec<Color>,
    pos: i64,
    weight: f64,
    alive: bool,
}

impl Particle {
    fn fresh() -> Self {
        Particle {
            left: 0,
            colors: Vec::new(),
            pos: 0,
            weight: 1.0,
            alive: true,
        }
    }

    fn color_at(&self, site: i64) -> Option<Color> {
        let idx = site - self.left;
        if idx < 0 {
            return None;
        }
        self.colors.get(idx as usize).copied()
    }

    fn origin_black_fraction(&self) -> f64 {
        match self.color_at(0) {
            Some(Color::B) => 1.0,
            Some(Color::W) => 0.0,
            None => 0.5,
        }
    }
}

/// SIS estimate of P(Y_0 = B | Y_1^n = record) with systematic resampling
/// when the effective sample size drops below half the particle count; also
/// returns the log of the unbiased normalizer estimate of P(Y_1^n = record).
pub fn sis_conditional_with_normalizer(
    record: &ColorRecord,
    dist: &StepDistribution,
    particles: usize,
    seed: u64,
) -> Result<(Estimate, f64)> {
    if particles < 1000 {
        return Err(Error::Domain(format!(
            "need at least 1000 particles, got {particles}"
        )));
    }
    if record.is_empty() {
        return Err(Error::Domain("record must have length >= 1".to_string()));
    }
    let rng = CounterRng::new(seed);
    let mut swarm: Vec<Particle> = (0..particles).map(|_| Particle::fresh()).collect();
    let mut log_normalizer = 0.0f64;

    for t in 1..=record.len() {
        let want = record.at_time(t);
        for (index, particle) in swarm.iter_mut().enumerate() {
            if !particle.alive {
                continue;
            }
            advance(particle, want, dist, &rng, index as u64, t as u64);
        }
        let total: f64 = swarm.iter().filter(|p| p.alive).map(|p| p.weight).sum();
        if total <= 0.0 {
            return Err(Error::WeightCollapse);
        }
        let sumsq: f64 = swarm
            .iter()
            .filter(|p| p.alive)
            .map(|p| p.weight * p.weight)
            .sum();
        let ess = total * total / sumsq;
        if ess < particles as f64 / 2.0 && t < record.len() {
            log_normalizer += (total / particles as f64).ln();
            systematic_resample(&mut swarm, total, &rng, t as u64);
        }
    }

    let total: f64 = swarm.iter().filter(|p| p.alive).map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(Error::WeightCollapse);
    }
    log_normalizer += (total / particles as f64).ln();
    let sumsq: f64 = swarm
        .iter()
        .filter(|p| p.alive)
        .map(|p| p.weight * p.weight)
        .sum();
    let ess = total * total / sumsq;
    let mean: f64 = swarm
        .iter()
        .filter(|p| p.alive)
        .map(|p| p.weight * p.origin_black_fraction())
        .sum::<f64>()
        / total;
    let variance: f64 = swarm
        .iter()
        .filter(|p| p.alive)
        .map(|p| {
            let w = p.weight / total;
            let d = p.origin_black_fraction() - mean;
            w * w * d * d
        })
        .sum();
    Ok((
        Estimate {
            mean,
            stderr: variance.sqrt(),
            particles,
            ess,
            seed,
        },
        log_normalizer,
    ))
}

/// SIS estimate of P(Y_0 = B | Y_1^n = record).
pub fn sis_conditional(
    record: &ColorRecord,
    dist: &StepDistribution,
    particles: usize,
    seed: u64,
) -> Result<Estimate> {
    sis_conditional_with_normalizer(record, dist, particles, seed).map(|(e, _)| e)
}

/// One particle step: enumerate the surviving branches, add their joint
/// mass into the weight, and sample the next position proportionally.
fn advance(
    particle: &mut Particle,
    want: Color,
    dist: &StepDistribution,
    rng: &CounterRng,
    stream: u64,
    step: u64,
) {
    let mut branch_pos = [0i64; 3];
    let mut branch_mass = [0.0f64; 3];
    let mut count = 0;
    for (inc, prob) in [(1i64, dist.up()), (0, dist.pause()), (-1, dist.down())] {
        if prob == 0.0 {
            continue;
        }
        let next = particle.pos + inc;
        let mass = match particle.color_at(next) {
            Some(c) if c == want => prob,
            Some(_) => continue,
            None => prob * 0.5,
        };
        branch_pos[count] = next;
        branch_mass[count] = mass;
        count += 1;
    }
    let total: f64 = branch_mass[..count].iter().sum();
    if count == 0 || total <= 0.0 {
        particle.alive = false;
        particle.weight = 0.0;
        return;
    }
    particle.weight *= total;
    let u = rng.draw_f64(stream, step, 1) * total;
    let mut acc = 0.0;
    let mut chosen = count - 1;
    for b in 0..count {
        acc += branch_mass[b];
        if u < acc {
            chosen = b;
            break;
        }
    }
    let next = branch_pos[chosen];
    if particle.color_at(next).is_none() {
        if particle.colors.is_empty() {
            particle.left = next;
            particle.colors.push(want);
        } else if next < particle.left {
            particle.colors.insert(0, want);
            particle.left = next;
        } else {
            particle.colors.push(want);
        }
    }
    particle.pos = next;
}

fn systematic_resample(swarm: &mut Vec<Particle>, total: f64, rng: &CounterRng, step: u64) {
    let n = swarm.len();
    let u0 = rng.draw_f64(STREAM_RESAMPLE, step, 0);
    let mut picks = Vec::with_capacity(n);
    let mut cumulative = 0.0;
    let mut next_tick = u0 / n as f64 * total;
    let tick = total / n as f64;
    for (index, particle) in swarm.iter().enumerate() {
        if !particle.alive {
            continue;
        }
        cumulative += particle.weight;
        while next_tick < cumulative && picks.len() < n {
            picks.push(index);
            next_tick += tick;
        }
    }
    while picks.len() < n {
        picks.push(
            swarm
                .iter()
                .rposition(|p| p.alive)
                .expect("positive total implies a live particle"),
        );
    }
    let mut fresh: Vec<Particle> = picks
        .into_iter()
        .map(|index| {
            let mut p = swarm[index].clone();
            p.weight = 1.0;
            p
        })
        .collect();
    std::mem::swap(swarm, &mut fresh);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{conditional_color_at_origin, QueryOptions};

    #[test]
    fn simulation_is_reproducible() {
        let dist = StepDistribution::new(0.7, 0.2).unwrap();
        let a = simulate(&dist, 200, 42).unwrap();
        let b = simulate(&dist, 200, 42).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.record, b.record);
        let c = simulate(&dist, 200, 43).unwrap();
        assert_ne!(a.record, c.record);
    }

    #[test]
    fn simulated_record_is_generated_by_the_path() {
        let dist = StepDistribution::new(0.6, 0.3).unwrap();
        let out = simulate(&dist, 150, 7).unwrap();
        for (t, &pos) in out.path.positions().iter().enumerate().skip(1) {
            assert_eq!(out.coloring.color_at(pos), Some(out.record.at_time(t)));
        }
    }

    #[test]
    fn drift_matches_expectation() {
        let dist = StepDistribution::new(0.8, 0.0).unwrap();
        let n = 400;
        let runs = 2000;
        let mut sum = 0.0;
        for seed in 0..runs {
            let out = simulate(&dist, n, seed).unwrap();
            sum += *out.path.positions().last().unwrap() as f64 / n as f64;
        }
        let mean = sum / runs as f64;
        // E X = 2p − 1 = 0.6, sd of the mean ~ 0.8/sqrt(n·runs)
        assert!((mean - 0.6).abs() < 0.005, "mean = {mean}");
    }

    #[test]
    fn fully_biased_records_are_iid_fair() {
        // at p = 1, eps = 0 the color record is i.i.d. fair: the eight
        // length-3 records should be uniform (chi-square, 7 dof, 99.9%
        // threshold 24.32), and consecutive colors agree half the time
        let dist = StepDistribution::new(1.0, 0.0).unwrap();
        let runs = 4000usize;
        let mut counts = [0usize; 8];
        let mut agree = 0usize;
        for seed in 0..runs as u64 {
            let out = simulate(&dist, 3, seed).unwrap();
            counts[out.record.as_bits() as usize] += 1;
            if out.record.at_time(1) == out.record.at_time(2) {
                agree += 1;
            }
        }
        let expected = runs as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 24.32, "chi-square = {chi2}, counts {counts:?}");
        let rate = agree as f64 / runs as f64;
        assert!((rate - 0.5).abs() < 0.03, "P(Y_1 = Y_2) = {rate}");
    }

    #[test]
    fn sis_matches_closed_form_on_single_symbol() {
        let dist = StepDistribution::new(0.7, 0.2).unwrap();
        let record: ColorRecord = "B".parse().unwrap();
        let est = sis_conditional(&record, &dist, 4000, 11).unwrap();
        let expect = 0.2 + 0.8 * 0.5;
        assert!((est.mean - expect).abs() < 3.0 * est.stderr.max(1e-3));
    }

    #[test]
    fn sis_matches_exact_engine_on_short_records() {
        let dist = StepDistribution::new(0.5, 0.0).unwrap();
        let record: ColorRecord = "BB".parse().unwrap();
        let est = sis_conditional(&record, &dist, 8000, 3).unwrap();
        assert!((est.mean - 0.75).abs() < 4.0 * est.stderr.max(1e-3));

        let dist = StepDistribution::new(0.7, 0.3).unwrap();
        let record: ColorRecord = "BWBBWB".parse().unwrap();
        let exact =
            conditional_color_at_origin(&record, &dist.float_weights(), &QueryOptions::default())
                .unwrap();
        let est = sis_conditional(&record, &dist, 8000, 5).unwrap();
        assert!(
            (est.mean - exact.p_black).abs() < 4.0 * est.stderr.max(1e-3),
            "sis {} vs exact {}",
            est.mean,
            exact.p_black
        );
    }

    #[test]
    fn sis_is_deterministic_per_seed() {
        let dist = StepDistribution::new(0.6, 0.1).unwrap();
        let record: ColorRecord = "BWBB".parse().unwrap();
        let a = sis_conditional(&record, &dist, 2000, 9).unwrap();
        let b = sis_conditional(&record, &dist, 2000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalizer_estimate_tracks_the_exact_value() {
        let dist = StepDistribution::new(0.6, 0.2).unwrap();
        let record: ColorRecord = "BWWB".parse().unwrap();
        let exact =
            conditional_color_at_origin(&record, &dist.float_weights(), &QueryOptions::default())
                .unwrap();
        let mut mean = 0.0;
        let runs = 50;
        for seed in 0..runs {
            let (_, logz) =
                sis_conditional_with_normalizer(&record, &dist, 2000, seed).unwrap();
            mean += logz.exp();
        }
        mean /= runs as f64;
        let truth = exact.log_normalizer.exp();
        assert!(
            (mean - truth).abs() / truth < 0.05,
            "normalizer mean {mean} vs exact {truth}"
        );
    }

    #[test]
    fn particle_floor_is_enforced() {
        let dist = StepDistribution::new(0.6, 0.1).unwrap();
        let record: ColorRecord = "B".parse().unwrap();
        assert!(matches!(
            sis_conditional(&record, &dist, 10, 1),
            Err(Error::Domain(_))
        ));
    }
}
