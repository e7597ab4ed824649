//! Constructors for the structured probe records and their pivot
//! arithmetic.
//!
//! The workhorse pattern is a chain of `[WWBB]` blocks separated by `WBB`
//! groups: inside a `[WWBB]` block a pauseless walk cannot turn, so the
//! isolated W opening each `WBB` (a *pivot*) is the only place a turn can
//! happen, and a walk that skips one pivot can never turn again. Growing
//! block lengths make the pivot times quadratic in the pivot index.

use crate::enumerate::{for_each_compatible_path, EnumCaps};
use crate::error::Error;
use crate::record::{Color, ColorRecord};
use crate::weight::StepWeights;
use crate::Result;

/// Pivot arithmetic for a probe pair with anchor time m and top pivot
/// index L.
#[derive(Debug, Clone)]
pub struct ProbeGeometry {
    /// Anchor time m: the record extension starts at time m.
    pub anchor: usize,
    /// Top pivot index L.
    pub top_pivot: usize,
    /// Times t(l) at which the walk sits on pivot l, l = 0..=L.
    pub pivot_times: Vec<usize>,
    /// Total time n(L) covered by prefix plus extension.
    pub total_time: usize,
    /// Zigzag displacement u(l) = |S_{t(l)} − S_{t(0)}| of the turning walk.
    pub zigzag_offsets: Vec<usize>,
    /// Separations v(l, L): half the final gap between the up-ending and
    /// down-ending walks that last turn at pivot l.
    pub separations: Vec<usize>,
}

pub fn probe_geometry(m: usize, big_l: usize) -> ProbeGeometry {
    let pivot_times = (0..=big_l).map(|l| pivot_time(m, l)).collect();
    let zigzag_offsets = (0..=big_l).map(|l| zigzag_offset(m, l)).collect();
    let separations = (0..=big_l).map(|l| separation(m, l, big_l)).collect();
    ProbeGeometry {
        anchor: m,
        top_pivot: big_l,
        pivot_times,
        total_time: total_time(m, big_l),
        zigzag_offsets,
        separations,
    }
}

/// t(l) = l(2l + 8m + 1) + 5m.
pub fn pivot_time(m: usize, l: usize) -> usize {
    l * (2 * l + 8 * m + 1) + 5 * m
}

/// n(L) = L(2L + 8m + 5) + 13m + 2.
pub fn total_time(m: usize, big_l: usize) -> usize {
    big_l * (2 * big_l + 8 * m + 5) + 13 * m + 2
}

/// u(l) = (1 + 8m)·[l odd] + 2l.
pub fn zigzag_offset(m: usize, l: usize) -> usize {
    (1 + 8 * m) * (l % 2) + 2 * l
}

/// v(l, L) = (L − l)(2L + 2l + 8m + 5) + 2l + 3m + 2 − [l odd].
pub fn separation(m: usize, l: usize, big_l: usize) -> usize {
    (big_l - l) * (2 * big_l + 2 * l + 8 * m + 5) + 2 * l + 3 * m + 2 - (l % 2)
}

fn push_blocks(out: &mut Vec<Color>, reps: usize) {
    for _ in 0..reps {
        out.extend_from_slice(&[Color::W, Color::W, Color::B, Color::B]);
    }
}

fn push_pivot(out: &mut Vec<Color>) {
    out.extend_from_slice(&[Color::W, Color::B, Color::B]);
}

/// The two probe extensions for times m..=n(L): the full chain
/// [WWBB]^m · Π_{j=0..L} (WBB [WWBB]^{2m+j}) and the variant with the final
/// pivot group removed (three symbols shorter). Returned records are
/// extensions only; concatenate behind a prefix of length m−1.
pub fn bad_probe_pair(m: usize, big_l: usize) -> Result<(ColorRecord, ColorRecord, ProbeGeometry)> {
    if m == 0 || big_l == 0 {
        return Err(Error::Domain("need m >= 1 and L >= 1".to_string()));
    }
    let geometry = probe_geometry(m, big_l);
    let mut bar = Vec::new();
    push_blocks(&mut bar, m);
    for j in 0..=big_l {
        push_pivot(&mut bar);
        push_blocks(&mut bar, 2 * m + j);
    }
    let mut tilde = Vec::new();
    push_blocks(&mut tilde, m);
    for j in 0..=big_l {
        if j < big_l {
            push_pivot(&mut tilde);
        }
        push_blocks(&mut tilde, 2 * m + j);
    }
    debug_assert_eq!(bar.len(), geometry.total_time - m + 1);
    debug_assert_eq!(tilde.len(), bar.len() - 3);
    Ok((
        ColorRecord::new(bar),
        ColorRecord::new(tilde),
        geometry,
    ))
}

/// The pivot-chain record used as a *prefix*: BBWBB [WWBB] then
/// WBB [WWBB]^j for j = 2..=L, of length L(2L+5) + 2. The leading BB lets
/// the first W act as a pivot.
pub fn good_config_prefix(big_l: usize) -> Result<ColorRecord> {
    if big_l == 0 {
        return Err(Error::Domain("need L >= 1".to_string()));
    }
    let mut out = vec![Color::B, Color::B, Color::W, Color::B, Color::B];
    push_blocks(&mut out, 1);
    for j in 2..=big_l {
        push_pivot(&mut out);
        push_blocks(&mut out, j);
    }
    debug_assert_eq!(out.len(), big_l * (2 * big_l + 5) + 2);
    Ok(ColorRecord::new(out))
}

/// Times of the pivots of [`good_config_prefix`]: 2k² + 5k + 3 for
/// k = 0..L−1 (the k = 0 pivot is the W at time 3).
pub fn good_config_pivot_times(big_l: usize) -> Vec<usize> {
    (0..big_l).map(|k| 2 * k * k + 5 * k + 3).collect()
}

/// Sparse probe [WB^{k−1}]^K W (B variant) or [BW^{k−1}]^K B (W variant):
/// isolated opposite-color sightings every k steps, length kK + 1.
pub fn sparse_probe(k: usize, big_k: usize, color: Color) -> Result<ColorRecord> {
    if k < 2 || big_k == 0 {
        return Err(Error::Domain("need k >= 2 and K >= 1".to_string()));
    }
    let (rare, common) = match color {
        Color::B => (Color::W, Color::B),
        Color::W => (Color::B, Color::W),
    };
    let mut out = Vec::with_capacity(k * big_k + 1);
    for _ in 0..big_k {
        out.push(rare);
        for _ in 0..k - 1 {
            out.push(common);
        }
    }
    out.push(rare);
    Ok(ColorRecord::new(out))
}

/// Monochromatic record of the given length.
pub fn all_same(n: usize, color: Color) -> ColorRecord {
    ColorRecord::new(vec![color; n])
}

/// Number of distinct increment suffixes (X_{m+1}, ..., X_n) among the
/// walks compatible with a record covering times 1..=n. For the probe
/// records this counts the walk behaviors from the anchor time onward.
pub fn count_walk_suffixes<T: crate::weight::Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    m: usize,
) -> Result<usize> {
    if m > record.len() {
        return Err(Error::Domain(format!(
            "anchor {m} exceeds record length {}",
            record.len()
        )));
    }
    let mut suffixes = std::collections::HashSet::new();
    for_each_compatible_path(record, steps, &EnumCaps::default(), |positions, _, _| {
        let suffix: Vec<i8> = positions[m..]
            .windows(2)
            .map(|w| (w[1] - w[0]) as i8)
            .collect();
        suffixes.insert(suffix);
    })?;
    Ok(suffixes.len())
}

/// Structural check: a pauseless walk traversing a stretch colored
/// [WWBB]^M cannot turn. The first block symbol colors the starting site
/// and the walk reads the remaining 4M−1 symbols, so every turn would force
/// equal colors two time units apart, which the block pattern never offers.
#[derive(Debug, Clone)]
pub struct NoTurnReport {
    pub blocks: usize,
    pub compatible_walks: u64,
    pub all_monotone: bool,
}

impl NoTurnReport {
    pub fn passed(&self) -> bool {
        self.all_monotone
    }
}

pub fn check_no_turn(blocks: usize) -> Result<NoTurnReport> {
    if blocks == 0 || 4 * blocks > 24 {
        return Err(Error::SizeCap(format!(
            "need 1 <= M and 4M <= 24, got M = {blocks}"
        )));
    }
    let mut stretch = Vec::new();
    push_blocks(&mut stretch, blocks);
    let start_color = stretch[0];
    let record = ColorRecord::new(stretch[1..].to_vec());
    // only compatibility matters here; any pauseless step law does
    let steps = StepWeights {
        pause: 0.0f64,
        up: 0.5,
        down: 0.5,
    };
    let mut compatible = 0u64;
    let mut all_monotone = true;
    for_each_compatible_path::<f64, _>(
        &record,
        &steps,
        &EnumCaps::default(),
        |positions, _, coloring| {
            if coloring.color_at(0).is_some_and(|c| c != start_color) {
                return; // revisit contradicts the starting site's color
            }
            compatible += 1;
            let up = positions.windows(2).all(|w| w[1] - w[0] == 1);
            let down = positions.windows(2).all(|w| w[1] - w[0] == -1);
            if !(up || down) {
                all_monotone = false;
            }
        },
    )?;
    Ok(NoTurnReport {
        blocks,
        compatible_walks: compatible,
        all_monotone,
    })
}

/// Structural check: a record read along a WWBB-periodic coloring from a
/// fixed starting site is generated by at most one walk (each site has one
/// white and one black neighbor, so every step is forced).
#[derive(Debug, Clone)]
pub struct UniqueWalkReport {
    pub record_length: usize,
    pub cases_checked: u64,
    pub max_compatible: usize,
}

impl UniqueWalkReport {
    pub fn passed(&self) -> bool {
        self.max_compatible <= 1
    }
}

/// Count the ±1 walks S_1 = start, ..., S_{m−1} reading the record off a
/// fixed coloring.
pub(crate) fn count_walks_on_coloring<F>(
    coloring: F,
    start: i64,
    record: &ColorRecord,
) -> usize
where
    F: Fn(i64) -> Color,
{
    if record.is_empty() {
        return 1;
    }
    if coloring(start) != record.at_time(1) {
        return 0;
    }
    let mut frontier: Vec<i64> = vec![start];
    for t in 2..=record.len() {
        let want = record.at_time(t);
        let mut next = Vec::new();
        for &site in &frontier {
            for neighbor in [site - 1, site + 1] {
                if coloring(neighbor) == want {
                    next.push(neighbor);
                }
            }
        }
        frontier = next;
    }
    frontier.len()
}

pub fn check_unique_walk(m: usize, blocks: usize) -> Result<UniqueWalkReport> {
    if m == 0 || blocks < m {
        return Err(Error::Domain(format!(
            "need M >= m >= 1, got m = {m}, M = {blocks}"
        )));
    }
    if m > 16 {
        return Err(Error::SizeCap(format!("m = {m} too large for the sweep")));
    }
    let periodic = |site: i64| {
        // ... W W B B W W B B ... with period 4
        match site.rem_euclid(4) {
            0 | 1 => Color::W,
            _ => Color::B,
        }
    };
    let record_len = m.saturating_sub(1);
    let mut report = UniqueWalkReport {
        record_length: record_len,
        cases_checked: 0,
        max_compatible: 0,
    };
    for start in 0..4i64 {
        for bits in 0..(1u64 << record_len) {
            let record = ColorRecord::from_bits(bits, record_len);
            let count = count_walks_on_coloring(periodic, start, &record);
            report.cases_checked += 1;
            report.max_compatible = report.max_compatible.max(count);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_identities() {
        for m in 1..=10 {
            for big_l in 1..=10 {
                let g = probe_geometry(m, big_l);
                // strictly increasing pivot times with growing gaps
                for l in 0..big_l {
                    let gap = g.pivot_times[l + 1] - g.pivot_times[l];
                    assert_eq!(gap, 3 + 4 * (2 * m + l));
                }
                assert_eq!(g.pivot_times[0], 5 * m);
                // closed form against the summed form
                for l in 0..=big_l {
                    let summed: usize =
                        5 * m + (0..l).map(|j| 3 + 4 * (2 * m + j)).sum::<usize>();
                    assert_eq!(g.pivot_times[l], summed);
                }
            }
        }
    }

    #[test]
    fn separations_stay_positive_and_grow() {
        for big_l in 1..=1000 {
            let m = 1;
            let min = (0..=big_l)
                .map(|l| separation(m, l, big_l))
                .min()
                .unwrap();
            assert!(min > 0);
            if big_l >= 2 {
                let prev_min = (0..=big_l - 1)
                    .map(|l| separation(m, l, big_l - 1))
                    .min()
                    .unwrap();
                assert!(min >= prev_min);
            }
        }
    }

    #[test]
    fn bad_probe_lengths() {
        let (bar, tilde, g) = bad_probe_pair(6, 1).unwrap();
        assert_eq!(bar.len(), 130);
        assert_eq!(g.total_time, 135);
        assert_eq!(g.anchor - 1 + bar.len(), g.total_time);
        assert_eq!(tilde.len(), 127);
    }

    #[test]
    fn pivots_are_isolated_whites() {
        let m = 2;
        let (bar, _, g) = bad_probe_pair(m, 3).unwrap();
        for &t in &g.pivot_times {
            let idx = t - m + 1; // 1-based index into the extension
            assert_eq!(bar.at_time(idx), Color::W);
            assert_eq!(bar.at_time(idx - 1), Color::B);
            assert_eq!(bar.at_time(idx + 1), Color::B);
        }
    }

    #[test]
    fn good_config_prefix_examples() {
        let r = good_config_prefix(1).unwrap();
        assert_eq!(r.to_string(), "BBWBBWWBB");
        assert_eq!(r.len(), 9);
        assert_eq!(good_config_prefix(2).unwrap().len(), 20);
        for big_l in 1..=6 {
            let r = good_config_prefix(big_l).unwrap();
            assert_eq!(r.len(), big_l * (2 * big_l + 5) + 2);
            for &t in &good_config_pivot_times(big_l) {
                assert_eq!(r.at_time(t), Color::W);
                assert_eq!(r.at_time(t - 1), Color::B);
                assert_eq!(r.at_time(t + 1), Color::B);
            }
        }
    }

    #[test]
    fn sparse_probe_examples() {
        assert_eq!(sparse_probe(3, 2, Color::B).unwrap().to_string(), "WBBWBBW");
        assert_eq!(sparse_probe(3, 2, Color::W).unwrap().to_string(), "BWWBWWB");
        let b = sparse_probe(4, 3, Color::B).unwrap();
        assert_eq!(b.len(), 13);
        assert_eq!(b.flipped(), sparse_probe(4, 3, Color::W).unwrap());
    }

    #[test]
    fn all_same_basics() {
        assert_eq!(all_same(3, Color::B).to_string(), "BBB");
        assert_eq!(all_same(0, Color::B).len(), 0);
        assert_eq!(all_same(5, Color::B).flipped(), all_same(5, Color::W));
    }

    #[test]
    fn no_turn_blocks_admit_only_monotone_walks() {
        for blocks in 1..=3 {
            let report = check_no_turn(blocks).unwrap();
            assert!(report.passed(), "M = {blocks}");
            assert_eq!(report.compatible_walks, 2, "M = {blocks}");
        }
    }

    #[test]
    fn unique_walk_on_block_coloring_but_not_monochromatic() {
        let report = check_unique_walk(4, 6).unwrap();
        assert!(report.passed());
        assert_eq!(report.cases_checked, 4 * 8);

        // all-black coloring: every step free on a black record
        let count = count_walks_on_coloring(|_| Color::B, 0, &all_same(4, Color::B));
        assert_eq!(count, 8);
    }
}
