//! Cut times and the executable audits built on them.
//!
//! A time k < n is a cut time for S_0^n when the supports of S_0..S_k and
//! S_{k+1}..S_n are disjoint and S_k ≥ 0. Conditioned on a cut at k, the
//! record after k carries no information about the walk and record up to k;
//! the audits in this module check the finite-size consequences of that
//! factorization instance by instance.

use crate::enumerate::{for_each_compatible_path, EnumCaps};
use crate::error::Error;
use crate::record::{Color, ColorRecord, StepDistribution, WalkPath};
use crate::weight::{StepWeights, Weight};
use crate::Result;
use std::collections::BTreeMap;

/// Sorted cut times of one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutTimeSet {
    times: Vec<usize>,
}

impl CutTimeSet {
    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn contains(&self, k: usize) -> bool {
        self.times.binary_search(&k).is_ok()
    }

    /// First cut time, if any.
    pub fn first(&self) -> Option<usize> {
        self.times.first().copied()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// All cut times of the path, in increasing order.
pub fn cut_times(path: &WalkPath) -> CutTimeSet {
    CutTimeSet {
        times: cut_times_of_positions(path.positions()),
    }
}

pub(crate) fn cut_times_of_positions(positions: &[i64]) -> Vec<usize> {
    let n = positions.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let mut prefix_min = vec![0i64; n + 1];
    let mut prefix_max = vec![0i64; n + 1];
    prefix_min[0] = positions[0];
    prefix_max[0] = positions[0];
    for t in 1..=n {
        prefix_min[t] = prefix_min[t - 1].min(positions[t]);
        prefix_max[t] = prefix_max[t - 1].max(positions[t]);
    }
    let mut suffix_min = vec![0i64; n + 1];
    let mut suffix_max = vec![0i64; n + 1];
    suffix_min[n] = positions[n];
    suffix_max[n] = positions[n];
    for t in (0..n).rev() {
        suffix_min[t] = suffix_min[t + 1].min(positions[t]);
        suffix_max[t] = suffix_max[t + 1].max(positions[t]);
    }
    (0..n)
        .filter(|&k| {
            positions[k] >= 0
                && (prefix_max[k] < suffix_min[k + 1] || suffix_max[k + 1] < prefix_min[k])
        })
        .collect()
}

/// Joint mass of the record split by which early times are cut times.
/// `by_mask[mask]` holds (mass, mass with black origin) of the compatible
/// paths whose cut times inside `0..window` are exactly the set bits.
#[derive(Debug, Clone)]
pub struct CutMassProfile<T> {
    pub window: usize,
    pub total: T,
    pub total_black: T,
    pub by_mask: BTreeMap<u64, (T, T)>,
}

impl<T: Weight> CutMassProfile<T> {
    /// P(no cut time in A | record) for A given as a bit mask over
    /// `0..window`.
    pub fn avoidance(&self, a_mask: u64) -> T {
        let mut hit = T::zero();
        for (mask, (mass, _)) in &self.by_mask {
            if mask & a_mask == 0 {
                hit = hit + mass.clone();
            }
        }
        hit / self.total.clone()
    }

    /// P(k ∈ CT_n | record).
    pub fn cut_probability(&self, k: usize) -> T {
        let mut hit = T::zero();
        for (mask, (mass, _)) in &self.by_mask {
            if mask >> k & 1 == 1 {
                hit = hit + mass.clone();
            }
        }
        hit / self.total.clone()
    }

    /// P(Y_0 = B | record).
    pub fn origin_black(&self) -> T {
        self.total_black.clone() / self.total.clone()
    }
}

pub fn cut_mass_profile<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    window: usize,
    caps: &EnumCaps,
) -> Result<CutMassProfile<T>> {
    if window > 60 {
        return Err(Error::SizeCap(format!(
            "cut window {window} exceeds the 60-bit mask limit"
        )));
    }
    let mut total = T::zero();
    let mut total_black = T::zero();
    let mut by_mask: BTreeMap<u64, (T, T)> = BTreeMap::new();
    for_each_compatible_path(record, steps, caps, |positions, weight, coloring| {
        let mut mask = 0u64;
        for k in cut_times_of_positions(positions) {
            if k < window {
                mask |= 1 << k;
            }
        }
        let black = match coloring.color_at(0) {
            Some(Color::B) => weight.clone(),
            Some(Color::W) => T::zero(),
            None => weight.clone() * T::half(),
        };
        total = total.clone() + weight.clone();
        total_black = total_black.clone() + black.clone();
        let entry = by_mask
            .entry(mask)
            .or_insert_with(|| (T::zero(), T::zero()));
        entry.0 = entry.0.clone() + weight.clone();
        entry.1 = entry.1.clone() + black;
    })?;
    if total.is_zero() {
        return Err(Error::ImpossibleRecord);
    }
    Ok(CutMassProfile {
        window,
        total,
        total_black,
        by_mask,
    })
}

/// P(CT_n ∩ A = ∅ | Y_1^n = record).
pub fn cut_avoidance<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    a_set: &[usize],
    caps: &EnumCaps,
) -> Result<T> {
    let max = a_set.iter().copied().max().map_or(0, |m| m + 1);
    if max > record.len() {
        return Err(Error::IndexOutOfBounds {
            index: max - 1,
            len: record.len(),
        });
    }
    let profile = cut_mass_profile(record, steps, max, caps)?;
    let mut mask = 0u64;
    for &k in a_set {
        mask |= 1 << k;
    }
    Ok(profile.avoidance(mask))
}

/// Record sets for [`restricted_f`].
#[derive(Debug, Clone)]
pub enum RecordSet {
    /// Every record of the given length (2^n of them).
    All,
    List(Vec<ColorRecord>),
}

/// Finite restriction of the worst-case cut-avoidance probability: the
/// maximum over records in the set and over A ⊆ {0..m−1} with |A| ≥ m/2 of
/// P(CT_n ∩ A = ∅ | Y_1^n = y). With the outer supremum over all horizons
/// and records cut down to a finite family this is a lower bound of the
/// full worst case.
pub fn restricted_f<T: Weight>(
    m: usize,
    n: usize,
    records: &RecordSet,
    steps: &StepWeights<T>,
    caps: &EnumCaps,
) -> Result<T> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!("need 1 <= m <= n, got m={m} n={n}")));
    }
    if m > 20 {
        return Err(Error::SizeCap(format!("m = {m} too large for subset sweep")));
    }
    if matches!(records, RecordSet::All) && n > 14 {
        return Err(Error::SizeCap(format!(
            "record sweep over all 2^{n} records refused (n > 14)"
        )));
    }
    let mut best = T::zero();
    let mut scan = |record: &ColorRecord| -> Result<()> {
        if record.len() != n {
            return Err(Error::LengthMismatch {
                record: record.len(),
                path: n,
            });
        }
        let profile = cut_mass_profile(record, steps, m, caps)?;
        for a_mask in 1u64..(1 << m) {
            if 2 * (a_mask.count_ones() as usize) < m {
                continue;
            }
            let avoid = profile.avoidance(a_mask);
            if avoid > best {
                best = avoid;
            }
        }
        Ok(())
    };
    match records {
        RecordSet::All => {
            for bits in 0..(1u64 << n) {
                scan(&ColorRecord::from_bits(bits, n))?;
            }
        }
        RecordSet::List(list) => {
            for record in list {
                scan(record)?;
            }
        }
    }
    Ok(best)
}

/// Exhaustive check of the inclusion
/// {few early cut times} ⊆ {the walk does not stay above 2m/3 from m on}:
/// every positive-probability path with |CT_n ∩ {0..m−1}| ≤ m/2 must dip to
/// 2m/3 or below at some time in m..=n.
#[derive(Debug, Clone)]
pub struct EasyLemmaReport {
    pub m: usize,
    pub n: usize,
    pub paths_checked: u64,
    pub counterexample: Option<WalkPath>,
}

impl EasyLemmaReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub fn audit_easy_lemma(m: usize, n: usize, dist: &StepDistribution) -> Result<EasyLemmaReport> {
    if !m.is_multiple_of(6) || m == 0 {
        return Err(Error::Domain(format!("m = {m} must be a positive multiple of 6")));
    }
    if m > n || n > 16 {
        return Err(Error::SizeCap(format!(
            "need m <= n <= 16 for the exhaustive sweep, got m={m} n={n}"
        )));
    }
    let increments: Vec<i64> = if dist.pause() > 0.0 {
        vec![1, 0, -1]
    } else {
        vec![1, -1]
    };
    let threshold = (2 * m / 3) as i64;
    let mut report = EasyLemmaReport {
        m,
        n,
        paths_checked: 0,
        counterexample: None,
    };
    let mut positions = vec![0i64; n + 1];
    let mut choice = vec![0usize; n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            report.paths_checked += 1;
            let cuts = cut_times_of_positions(&positions);
            let early = cuts.iter().filter(|&&k| k < m).count();
            let stays_above = positions[m..=n].iter().all(|&s| s > threshold);
            if 2 * early <= m && stays_above && report.counterexample.is_none() {
                report.counterexample = Some(WalkPath::new(positions.clone())?);
            }
            loop {
                if depth == 0 {
                    return Ok(report);
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < increments.len() {
                    break;
                }
            }
            continue;
        }
        positions[depth + 1] = positions[depth] + increments[choice[depth]];
        depth += 1;
        choice[depth] = 0;
    }
}

/// Per-instance audit of the inequality chain bounding the
/// conditional-probability gap by cut-avoidance probabilities.
///
/// With `f̃` the per-instance worst cut-avoidance over admissible A and both
/// records, and `A` the set of early times whose conditional cut probability
/// drops by less than 2f̃ between the records, the audited claims are
/// |A| ≥ m/2 and |Δ| ≤ 2·f̃·(m+1), both asserted whenever f̃ ≤ 1/2.
#[derive(Debug, Clone)]
pub struct DeltaChainReport<T> {
    pub m: usize,
    pub n: usize,
    pub f_tilde: T,
    pub a_size: usize,
    pub delta: T,
    /// f̃ ≤ 1/2, so the bounds are claimed.
    pub applicable: bool,
    pub a_bound_holds: bool,
    pub delta_bound_holds: bool,
}

impl<T> DeltaChainReport<T> {
    pub fn passed(&self) -> bool {
        !self.applicable || (self.a_bound_holds && self.delta_bound_holds)
    }
}

pub fn audit_delta_chain<T: Weight>(
    prefix: &ColorRecord,
    ext1: &ColorRecord,
    ext2: &ColorRecord,
    steps: &StepWeights<T>,
    caps: &EnumCaps,
) -> Result<DeltaChainReport<T>> {
    if ext1.len() != ext2.len() {
        return Err(Error::LengthMismatch {
            record: ext1.len(),
            path: ext2.len(),
        });
    }
    let m = prefix.len() + 1;
    let record_a = prefix.concat(ext1);
    let record_b = prefix.concat(ext2);
    let n = record_a.len();
    let profile_a = cut_mass_profile(&record_a, steps, m, caps)?;
    let profile_b = cut_mass_profile(&record_b, steps, m, caps)?;

    let mut f_tilde = T::zero();
    for a_mask in 1u64..(1 << m) {
        if 2 * (a_mask.count_ones() as usize) < m {
            continue;
        }
        for profile in [&profile_a, &profile_b] {
            let avoid = profile.avoidance(a_mask);
            if avoid > f_tilde {
                f_tilde = avoid;
            }
        }
    }

    let two_f = T::from_ratio(2, 1) * f_tilde.clone();
    let mut a_size = 0usize;
    for k in 0..m {
        let diff = profile_a.cut_probability(k) - profile_b.cut_probability(k);
        if diff >= T::zero() - two_f.clone() {
            a_size += 1;
        }
    }

    let delta = profile_a.origin_black() - profile_b.origin_black();
    let abs_delta = if delta < T::zero() {
        T::zero() - delta.clone()
    } else {
        delta.clone()
    };
    let applicable = f_tilde <= T::half();
    let a_bound_holds = 2 * a_size >= m;
    let delta_bound_holds = abs_delta <= two_f * T::from_ratio((m + 1) as i64, 1);
    Ok(DeltaChainReport {
        m,
        n,
        f_tilde,
        a_size,
        delta,
        applicable,
        a_bound_holds,
        delta_bound_holds,
    })
}
