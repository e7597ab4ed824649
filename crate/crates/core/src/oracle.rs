//! Brute-force reference computations, kept independent of the filter and
//! of the pruned enumerator: these walk *all* increment sequences and apply
//! the joint path–record weight directly.

use crate::error::Error;
use crate::record::{Color, ColorRecord};
use crate::weight::{StepWeights, Weight};
use crate::Result;

/// Length caps: exact mode stays within `i128` fractions, float mode within
/// a tolerable runtime.
pub const ORACLE_MAX_EXACT: usize = 16;
pub const ORACLE_MAX_FLOAT: usize = 20;

fn oracle_cap<T: Weight>() -> usize {
    if T::RESCALES {
        ORACLE_MAX_FLOAT
    } else {
        ORACLE_MAX_EXACT
    }
}

/// Joint origin-color masses for every record of length n at once:
/// `masses[bits] = (P(Y = record), P(C_0 = B, Y = record))` where bit t−1 of
/// `bits` is set when the color at time t is W.
///
/// One sweep enumerates all positive-probability paths; for each path all
/// 2^R colorings of its support are expanded in Gray-code order.
pub struct OracleTable<T> {
    pub n: usize,
    pub masses: Vec<(T, T)>,
    pub paths: u64,
}

impl<T: Weight> OracleTable<T> {
    pub fn record_mass(&self, record: &ColorRecord) -> &(T, T) {
        &self.masses[record.as_bits() as usize]
    }
}

pub fn oracle_all_records<T: Weight>(
    n: usize,
    steps: &StepWeights<T>,
) -> Result<OracleTable<T>> {
    if n == 0 || n > oracle_cap::<T>() {
        return Err(Error::SizeCap(format!(
            "oracle sweep supports 1 <= n <= {}, got {n}",
            oracle_cap::<T>()
        )));
    }
    let branches: Vec<(i64, T)> = steps.branches().collect();
    let mut masses = vec![(T::zero(), T::zero()); 1 << n];
    let mut positions = vec![0i64; n + 1];
    let mut paths = 0u64;
    // iterative DFS over increment sequences
    let mut choice = vec![0usize; n + 1];
    let mut weights: Vec<T> = vec![T::one(); n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            paths += 1;
            accumulate_path(&positions, weights[n].clone(), &mut masses);
            // backtrack
            loop {
                if depth == 0 {
                    return Ok(OracleTable { n, masses, paths });
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < branches.len() {
                    break;
                }
            }
            continue;
        }
        let (inc, w) = &branches[choice[depth]];
        positions[depth + 1] = positions[depth] + inc;
        weights[depth + 1] = weights[depth].clone() * w.clone();
        depth += 1;
        choice[depth] = 0;
    }
}

/// Expand the 2^R colorings of one path and add its weighted contributions
/// into the per-record bins.
fn accumulate_path<T: Weight>(positions: &[i64], path_prob: T, masses: &mut [(T, T)]) {
    let n = positions.len() - 1;
    // first-visit structure over times >= 1
    let mut first_visit_of_site: Vec<Option<usize>> = vec![None; 2 * n + 1];
    let offset = n as i64;
    let mut fresh_masks: Vec<u64> = Vec::new(); // record bits controlled by each fresh site
    let mut ctrl_of_time: Vec<usize> = Vec::with_capacity(n);
    for t in 1..=n {
        let site = (positions[t] + offset) as usize;
        let ctrl = match first_visit_of_site[site] {
            Some(j) => j,
            None => {
                let j = fresh_masks.len();
                first_visit_of_site[site] = Some(j);
                fresh_masks.push(0);
                j
            }
        };
        ctrl_of_time.push(ctrl);
        fresh_masks[ctrl] |= 1 << (t - 1);
    }
    let r = fresh_masks.len();
    let origin_ctrl = first_visit_of_site[n]; // site 0
    let mut weight = path_prob;
    for _ in 0..r {
        weight = weight * T::half();
    }
    let half_weight = weight.clone() * T::half();

    // Gray-code sweep over colorings: flip one fresh site at a time.
    // Color convention matches ColorRecord::as_bits (bit set = W); a fresh
    // site starts black, toggling flips every record position it controls.
    let mut bits: u64 = 0;
    let mut site_is_white = vec![false; r];
    let total = 1u64 << r;
    for g in 0..total {
        let entry = &mut masses[bits as usize];
        entry.0 = entry.0.clone() + weight.clone();
        match origin_ctrl {
            Some(j) => {
                if !site_is_white[j] {
                    entry.1 = entry.1.clone() + weight.clone();
                }
            }
            None => {
                entry.1 = entry.1.clone() + half_weight.clone();
            }
        }
        if g + 1 < total {
            let j = (g + 1).trailing_zeros() as usize;
            bits ^= fresh_masks[j];
            site_is_white[j] = !site_is_white[j];
        }
    }
}

/// Brute-force masses for a single record: (P(Y = record), P(C_0 = B, Y)),
/// summing the joint weight over all positive-probability paths with no
/// pruning.
pub fn brute_force_origin_masses<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
) -> Result<(T, T, u64)> {
    let n = record.len();
    if n == 0 || n > oracle_cap::<T>() {
        return Err(Error::SizeCap(format!(
            "brute force supports 1 <= n <= {}, got {n}",
            oracle_cap::<T>()
        )));
    }
    let branches: Vec<(i64, T)> = steps.branches().collect();
    let mut total = T::zero();
    let mut black = T::zero();
    let mut paths = 0u64;
    let mut positions = vec![0i64; n + 1];
    let mut weights: Vec<T> = vec![T::one(); n + 1];
    let mut choice = vec![0usize; n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            paths += 1;
            add_record_weight(&positions, weights[n].clone(), record, &mut total, &mut black);
            loop {
                if depth == 0 {
                    return Ok((total, black, paths));
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < branches.len() {
                    break;
                }
            }
            continue;
        }
        let (inc, w) = &branches[choice[depth]];
        positions[depth + 1] = positions[depth] + inc;
        weights[depth + 1] = weights[depth].clone() * w.clone();
        depth += 1;
        choice[depth] = 0;
    }
}

fn add_record_weight<T: Weight>(
    positions: &[i64],
    path_prob: T,
    record: &ColorRecord,
    total: &mut T,
    black: &mut T,
) {
    let n = positions.len() - 1;
    let offset = n as i64;
    let mut colors: Vec<Option<Color>> = vec![None; 2 * n + 1];
    let mut fresh = 0u32;
    for t in 1..=n {
        let site = (positions[t] + offset) as usize;
        let want = record.at_time(t);
        match colors[site] {
            None => {
                colors[site] = Some(want);
                fresh += 1;
            }
            Some(c) => {
                if c != want {
                    return; // incompatible
                }
            }
        }
    }
    let mut weight = path_prob;
    for _ in 0..fresh {
        weight = weight * T::half();
    }
    *total = total.clone() + weight.clone();
    match colors[n] {
        Some(Color::B) => *black = black.clone() + weight,
        Some(Color::W) => {}
        None => *black = black.clone() + weight * T::half(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::StepDistribution;
    use crate::weight::{exact, Exact};
    use num_traits::One;

    #[test]
    fn sweep_total_mass_is_one() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(7, 10, 3, 10).unwrap();
        let table = oracle_all_records::<Exact>(6, &steps).unwrap();
        let mut total = exact(0, 1);
        for (mass, _) in &table.masses {
            total += mass;
        }
        assert!(Exact::one() == total, "record masses must sum to 1");
    }

    #[test]
    fn sweep_agrees_with_single_record_brute_force() {
        let dist = StepDistribution::new(0.6, 0.2).unwrap();
        let steps = dist.float_weights();
        let table = oracle_all_records::<f64>(5, &steps).unwrap();
        for bits in [0u64, 7, 19, 31] {
            let record = ColorRecord::from_bits(bits, 5);
            let (total, black, _) = brute_force_origin_masses(&record, &steps).unwrap();
            let (t2, b2) = table.record_mass(&record);
            assert!((total - t2).abs() < 1e-15);
            assert!((black - b2).abs() < 1e-15);
        }
    }

    #[test]
    fn double_black_exact() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let record: ColorRecord = "BB".parse().unwrap();
        let (total, black, paths) = brute_force_origin_masses(&record, &steps).unwrap();
        assert_eq!(paths, 4);
        assert_eq!(total, exact(1, 4));
        assert_eq!(black / total, exact(3, 4));
    }

    #[test]
    fn size_cap() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let record = ColorRecord::from_bits(0, 17);
        assert!(matches!(
            brute_force_origin_masses::<Exact>(&record, &steps),
            Err(Error::SizeCap(_))
        ));
    }
}
