//! Conditional probabilities of the origin color and of path events given
//! a finite color record.
//!
//! Three backends compute P(Y_0 = b | Y_1^n = y):
//! - `filter`: sparse forward dynamic program (the workhorse);
//! - `enumeration`: pruned depth-first sweep over compatible paths, the only
//!   backend that can also condition on path events;
//! - `oracle`: unpruned brute force over all increment sequences, kept
//!   independent as a test reference.
//!
//! All are generic over the weight scalar: `f64` or exact rationals.

use crate::enumerate::{for_each_compatible_path, EnumCaps, EnumStats};
use crate::error::Error;
use crate::events::PathEvent;
use crate::filter::filter_origin_masses;
use crate::oracle::brute_force_origin_masses;
use crate::record::{Color, ColorRecord};
use crate::weight::{StepWeights, Weight};
use crate::Result;

pub use crate::enumerate::EnumCaps as EnumerationCaps;
pub use crate::filter::{ColorBits, FilterOptions as QueryOptions, FilterState};
pub use crate::oracle::{oracle_all_records, OracleTable, ORACLE_MAX_EXACT, ORACLE_MAX_FLOAT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Filter,
    Enumeration,
    Oracle,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Filter => "filter",
            Backend::Enumeration => "enumeration",
            Backend::Oracle => "oracle",
        }
    }
}

/// Posterior of the origin color plus normalization and diagnostics.
#[derive(Debug, Clone)]
pub struct Conditional<T> {
    pub p_black: T,
    pub p_white: T,
    /// log P(Y_1^n = record); finite iff the record has positive probability.
    pub log_normalizer: f64,
    pub states_explored: u64,
    pub backend: Backend,
    /// Set when top-K truncation made the filter approximate.
    pub truncated: bool,
}

/// Float-mode result.
pub type ConditionalResult = Conditional<f64>;

/// P(Y_0 = · | Y_1^n = record) via the forward filter.
pub fn conditional_color_at_origin<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    opts: &QueryOptions,
) -> Result<Conditional<T>> {
    let out = filter_origin_masses(record, steps, opts)?;
    Ok(Conditional {
        p_black: out.mass_black,
        p_white: out.mass_white,
        log_normalizer: out.log_normalizer,
        states_explored: out.states_explored,
        backend: Backend::Filter,
        truncated: out.truncated,
    })
}

/// Same conditional via the pruned path enumerator.
pub fn conditional_color_by_enumeration<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    caps: &EnumCaps,
) -> Result<Conditional<T>> {
    if record.is_empty() {
        return Err(Error::Domain("record must have length >= 1".to_string()));
    }
    let mut total = T::zero();
    let mut black = T::zero();
    let stats = for_each_compatible_path(record, steps, caps, |_, weight, coloring| {
        total = total.clone() + weight.clone();
        match coloring.color_at(0) {
            Some(Color::B) => black = black.clone() + weight.clone(),
            Some(Color::W) => {}
            None => black = black.clone() + weight.clone() * T::half(),
        }
    })?;
    finish_conditional(total, black, stats.nodes, Backend::Enumeration)
}

/// Same conditional via the unpruned brute-force oracle.
pub fn brute_force_conditional<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
) -> Result<Conditional<T>> {
    let (total, black, paths) = brute_force_origin_masses(record, steps)?;
    finish_conditional(total, black, paths, Backend::Oracle)
}

fn finish_conditional<T: Weight>(
    total: T,
    black: T,
    states: u64,
    backend: Backend,
) -> Result<Conditional<T>> {
    if total.is_zero() {
        return Err(Error::ImpossibleRecord);
    }
    let log_normalizer = total.to_f64().ln();
    let p_black = black / total.clone();
    Ok(Conditional {
        p_white: T::one() - p_black.clone(),
        p_black,
        log_normalizer,
        states_explored: states,
        backend,
        truncated: false,
    })
}

/// Conditional-probability gap between two extensions of a common prefix:
/// P(Y_0 = B | prefix ∨ ext1) − P(Y_0 = B | prefix ∨ ext2). The extensions
/// may have different lengths (the probe pairs differ by one pivot group).
pub fn delta<T: Weight>(
    prefix: &ColorRecord,
    ext1: &ColorRecord,
    ext2: &ColorRecord,
    steps: &StepWeights<T>,
    opts: &QueryOptions,
) -> Result<T> {
    let a = conditional_color_at_origin(&prefix.concat(ext1), steps, opts)?;
    let b = conditional_color_at_origin(&prefix.concat(ext2), steps, opts)?;
    Ok(a.p_black - b.p_black)
}

/// Mass of one event cell: joint with the record, and additionally joint
/// with a black origin.
#[derive(Debug, Clone)]
pub struct EventMass<T> {
    pub mass: T,
    pub mass_black: T,
}

#[derive(Debug, Clone)]
pub struct EventMasses<T> {
    /// P(Y_1^n = record), unnormalized joint mass.
    pub total: T,
    pub events: Vec<EventMass<T>>,
    pub stats: EnumStats,
}

impl<T: Weight> EventMasses<T> {
    /// P(event | record)
    pub fn conditional(&self, index: usize) -> T {
        self.events[index].mass.clone() / self.total.clone()
    }

    /// P(event, Y_0 = B | record)
    pub fn conditional_with_black_origin(&self, index: usize) -> T {
        self.events[index].mass_black.clone() / self.total.clone()
    }

    /// P(Y_0 = B | event, record); error when the event has zero mass.
    pub fn origin_black_given_event(&self, index: usize) -> Result<T> {
        let cell = &self.events[index];
        if cell.mass.is_zero() {
            return Err(Error::ZeroProbabilityEvent);
        }
        Ok(cell.mass_black.clone() / cell.mass.clone())
    }
}

/// Evaluate several path events in a single enumeration sweep.
pub fn event_masses<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    events: &[PathEvent],
    caps: &EnumCaps,
) -> Result<EventMasses<T>> {
    if record.is_empty() {
        return Err(Error::Domain("record must have length >= 1".to_string()));
    }
    let mut total = T::zero();
    let mut cells: Vec<EventMass<T>> = events
        .iter()
        .map(|_| EventMass {
            mass: T::zero(),
            mass_black: T::zero(),
        })
        .collect();
    let stats = for_each_compatible_path(record, steps, caps, |positions, weight, coloring| {
        total = total.clone() + weight.clone();
        let black_fraction = match coloring.color_at(0) {
            Some(Color::B) => T::one(),
            Some(Color::W) => T::zero(),
            None => T::half(),
        };
        for (event, cell) in events.iter().zip(cells.iter_mut()) {
            if event.holds(positions, coloring) {
                cell.mass = cell.mass.clone() + weight.clone();
                cell.mass_black =
                    cell.mass_black.clone() + weight.clone() * black_fraction.clone();
            }
        }
    })?;
    if total.is_zero() {
        return Err(Error::ImpossibleRecord);
    }
    Ok(EventMasses {
        total,
        events: cells,
        stats,
    })
}

/// P(event | Y_1^n = record), optionally joint with an origin color:
/// P(event, Y_0 = color | Y_1^n = record).
pub fn conditional_event<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    event: &PathEvent,
    joint_with_origin: Option<Color>,
    caps: &EnumCaps,
) -> Result<T> {
    let masses = event_masses(record, steps, std::slice::from_ref(event), caps)?;
    let cell = &masses.events[0];
    let mass = match joint_with_origin {
        None => cell.mass.clone(),
        Some(Color::B) => cell.mass_black.clone(),
        Some(Color::W) => cell.mass.clone() - cell.mass_black.clone(),
    };
    Ok(mass / masses.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::StepDistribution;
    use crate::weight::{exact, Exact};
    use num_traits::Zero;

    fn rec(s: &str) -> ColorRecord {
        s.parse().unwrap()
    }

    #[test]
    fn backends_agree_on_double_black() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let expect = exact(3, 4);
        let opts = QueryOptions::default();
        let caps = EnumCaps::default();
        let f = conditional_color_at_origin(&rec("BB"), &steps, &opts).unwrap();
        let e = conditional_color_by_enumeration(&rec("BB"), &steps, &caps).unwrap();
        let o = brute_force_conditional(&rec("BB"), &steps).unwrap();
        assert_eq!(f.p_black, expect);
        assert_eq!(e.p_black, expect);
        assert_eq!(o.p_black, expect);
        assert_eq!(o.backend, Backend::Oracle);
    }

    #[test]
    fn fully_biased_walk_gives_even_odds() {
        let dist = StepDistribution::new(1.0, 0.0).unwrap();
        let r = rec("BWWBBBWB");
        let out =
            conditional_color_at_origin(&r, &dist.float_weights(), &QueryOptions::default())
                .unwrap();
        assert_eq!(out.p_black, 0.5);
        assert_eq!(out.p_white, 0.5);
    }

    #[test]
    fn delta_is_antisymmetric_and_zero_on_equal_extensions() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(7, 10, 0, 1).unwrap();
        let prefix = rec("B");
        let e1 = rec("WB");
        let e2 = rec("BW");
        let opts = QueryOptions::default();
        let d12: Exact = delta(&prefix, &e1, &e2, &steps, &opts).unwrap();
        let d21: Exact = delta(&prefix, &e2, &e1, &steps, &opts).unwrap();
        assert_eq!(d12, -d21);
        let dsame: Exact = delta(&prefix, &e1, &e1, &steps, &opts).unwrap();
        assert!(dsame.is_zero());
    }

    #[test]
    fn contradictory_events_give_zero_probability_error() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let ev = PathEvent::all(vec![PathEvent::EndsUp, PathEvent::EndsDown]);
        let masses = event_masses(&rec("BWB"), &steps, &[ev], &EnumCaps::default()).unwrap();
        assert!(matches!(
            masses.origin_black_given_event(0),
            Err(Error::ZeroProbabilityEvent)
        ));
    }

    #[test]
    fn symmetric_walk_has_equal_end_directions() {
        let steps: StepWeights<Exact> = StepWeights::from_ratios(1, 2, 0, 1).unwrap();
        let r = rec("BWWB");
        let up: Exact =
            conditional_event(&r, &steps, &PathEvent::EndsUp, None, &EnumCaps::default()).unwrap();
        let down: Exact =
            conditional_event(&r, &steps, &PathEvent::EndsDown, None, &EnumCaps::default())
                .unwrap();
        assert_eq!(up, down);
    }
}
