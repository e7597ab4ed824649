//! Depth-first enumeration of the walks compatible with a record, with
//! incremental pruning and incremental weight.
//!
//! Each visited complete path carries the joint weight
//! P(path) · (1/2)^{R(s_1^n)}: fresh sites adopt the record's color and
//! contribute a factor 1/2, revisits must match or the branch dies. The
//! branch order (up, pause, down) is fixed, so visit order and float
//! accumulation are deterministic.

use crate::error::Error;
use crate::record::{Color, ColorRecord, InducedColoring};
use crate::weight::{StepWeights, Weight};
use crate::Result;

/// Work caps for a single enumeration query.
#[derive(Debug, Clone, Copy)]
pub struct EnumCaps {
    /// Maximum number of branch expansions before giving up.
    pub max_nodes: u64,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            max_nodes: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumStats {
    pub nodes: u64,
    pub surviving_paths: u64,
}

struct Dfs<'a, T, F> {
    record: &'a [Color],
    branches: Vec<(i64, T)>,
    max_nodes: u64,
    positions: Vec<i64>,
    /// colors[site + offset]; only sites visited at times ≥ 1 are set
    colors: Vec<Option<Color>>,
    offset: i64,
    /// interval of sites visited at times ≥ 1 (min > max when none yet)
    min: i64,
    max: i64,
    stats: EnumStats,
    visitor: F,
}

impl<'a, T, F> Dfs<'a, T, F>
where
    T: Weight,
    F: FnMut(&[i64], &T, &InducedColoring),
{
    fn run(&mut self, t: usize, weight: T) -> Result<()> {
        if t == self.record.len() {
            self.stats.surviving_paths += 1;
            let coloring = self.coloring();
            (self.visitor)(&self.positions, &weight, &coloring);
            return Ok(());
        }
        let want = self.record[t];
        let current = self.positions[t];
        for b in 0..self.branches.len() {
            let (inc, w) = self.branches[b].clone();
            self.stats.nodes += 1;
            if self.stats.nodes > self.max_nodes {
                return Err(Error::EnumerationInfeasible {
                    explored: self.stats.nodes,
                    cap: self.max_nodes,
                });
            }
            let next = current + inc;
            let idx = (next + self.offset) as usize;
            match self.colors[idx] {
                Some(c) => {
                    if c == want {
                        self.positions.push(next);
                        self.run(t + 1, weight.clone() * w)?;
                        self.positions.pop();
                    }
                }
                None => {
                    self.colors[idx] = Some(want);
                    let (old_min, old_max) = (self.min, self.max);
                    self.min = self.min.min(next);
                    self.max = self.max.max(next);
                    self.positions.push(next);
                    self.run(t + 1, weight.clone() * w * T::half())?;
                    self.positions.pop();
                    self.min = old_min;
                    self.max = old_max;
                    self.colors[idx] = None;
                }
            }
        }
        Ok(())
    }

    fn coloring(&self) -> InducedColoring {
        if self.min > self.max {
            return InducedColoring::new(0, Vec::new());
        }
        let lo = (self.min + self.offset) as usize;
        let hi = (self.max + self.offset) as usize;
        let colors = self.colors[lo..=hi]
            .iter()
            .map(|c| c.expect("interval sites are visited"))
            .collect();
        InducedColoring::new(self.min, colors)
    }
}

/// Visit every compatible complete path. The visitor receives the positions
/// S_0..S_n, the joint weight, and the coloring induced on the sites
/// visited at times ≥ 1 (query it at site 0 to learn the origin color fixed
/// by a revisit, if any).
pub fn for_each_compatible_path<T, F>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    caps: &EnumCaps,
    visitor: F,
) -> Result<EnumStats>
where
    T: Weight,
    F: FnMut(&[i64], &T, &InducedColoring),
{
    let n = record.len();
    let mut dfs = Dfs {
        record: record.symbols(),
        branches: steps.branches().collect(),
        max_nodes: caps.max_nodes,
        positions: Vec::with_capacity(n + 1),
        colors: vec![None; 2 * n + 1],
        offset: n as i64,
        min: i64::MAX,
        max: i64::MIN,
        stats: EnumStats::default(),
        visitor,
    };
    dfs.positions.push(0);
    dfs.run(0, T::one())?;
    Ok(dfs.stats)
}
