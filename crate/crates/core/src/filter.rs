//! Sparse forward filter for the conditional law of the origin color.
//!
//! The joint path–record weight factorizes over first visits, so the tuple
//! (width of the visited interval, offset of the current position, index of
//! the origin, per-site colors) is a sufficient statistic: branches that
//! reach the same tuple merge by adding weights. States live in a
//! `BTreeMap`, so float accumulation always happens in key order and
//! results are bit-reproducible.

use crate::error::Error;
use crate::record::{Color, ColorRecord};
use crate::weight::{StepWeights, Weight};
use crate::Result;
use std::collections::BTreeMap;

/// Interval color assignment, one bit per site (1 = W), left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorBits {
    len: u32,
    words: Vec<u64>,
}

impl ColorBits {
    fn singleton(color: Color) -> Self {
        let mut bits = ColorBits::default();
        bits.push_right(color);
        bits
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: u32) -> Color {
        debug_assert!(index < self.len);
        let word = self.words[(index / 64) as usize];
        if word >> (index % 64) & 1 == 1 {
            Color::W
        } else {
            Color::B
        }
    }

    fn push_right(&mut self, color: Color) {
        let index = self.len;
        if index.is_multiple_of(64) {
            self.words.push(0);
        }
        if color == Color::W {
            self.words[(index / 64) as usize] |= 1 << (index % 64);
        }
        self.len += 1;
    }

    fn pushed_right(&self, color: Color) -> Self {
        let mut next = self.clone();
        next.push_right(color);
        next
    }

    fn pushed_left(&self, color: Color) -> Self {
        let mut next = ColorBits::singleton(color);
        for i in 0..self.len {
            next.push_right(self.get(i));
        }
        next
    }
}

/// Sufficient statistic of the filter: the visited interval summarized up
/// to translation. `offset` is the current position and `origin_index` the
/// origin, both counted from the left end of the interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FilterState {
    pub width: u32,
    pub offset: u32,
    pub origin_index: u32,
    pub colors: ColorBits,
}

#[derive(Debug, Clone, Copy)]
pub struct FilterOptions {
    /// Hard cap on live states; exceeding it is an error unless `top_k`
    /// truncation is enabled.
    pub state_cap: u64,
    /// Keep only the K heaviest states per step. Results are then
    /// approximate and flagged as truncated.
    pub top_k: Option<usize>,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            state_cap: 50_000_000,
            top_k: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FilterOutcome<T> {
    pub mass_black: T,
    pub mass_white: T,
    /// log P(Y_1^n = record)
    pub log_normalizer: f64,
    /// Live states summed over time steps.
    pub states_explored: u64,
    /// True when top-K truncation dropped mass.
    pub truncated: bool,
}

/// Run the filter over a record (colors at times 1..=n). The two returned
/// masses are the normalized conditional probabilities of a black and white
/// origin; in float mode they are rescaled per step, in exact mode they are
/// exact conditional fractions.
pub fn filter_origin_masses<T: Weight>(
    record: &ColorRecord,
    steps: &StepWeights<T>,
    opts: &FilterOptions,
) -> Result<FilterOutcome<T>> {
    if record.is_empty() {
        return Err(Error::Domain("record must have length >= 1".to_string()));
    }
    let branches: Vec<(i64, T)> = steps.branches().collect();
    let mut states: BTreeMap<FilterState, T> = BTreeMap::new();
    // coloring site 0 costs one factor 1/2 per origin color
    for color in [Color::B, Color::W] {
        states.insert(
            FilterState {
                width: 1,
                offset: 0,
                origin_index: 0,
                colors: ColorBits::singleton(color),
            },
            T::half(),
        );
    }

    let mut log_normalizer = 0.0f64;
    let mut states_explored = states.len() as u64;
    let mut truncated = false;

    for want in record.symbols() {
        let mut next: BTreeMap<FilterState, T> = BTreeMap::new();
        for (state, weight) in &states {
            for (inc, step_w) in &branches {
                let pos = state.offset as i64 + inc;
                let (key, extra_half) = if pos == -1 {
                    (
                        FilterState {
                            width: state.width + 1,
                            offset: 0,
                            origin_index: state.origin_index + 1,
                            colors: state.colors.pushed_left(*want),
                        },
                        true,
                    )
                } else if pos == state.width as i64 {
                    (
                        FilterState {
                            width: state.width + 1,
                            offset: state.width,
                            origin_index: state.origin_index,
                            colors: state.colors.pushed_right(*want),
                        },
                        true,
                    )
                } else {
                    let pos = pos as u32;
                    if state.colors.get(pos) != *want {
                        continue;
                    }
                    (
                        FilterState {
                            offset: pos,
                            ..state.clone()
                        },
                        false,
                    )
                };
                let mut w = weight.clone() * step_w.clone();
                if extra_half {
                    w = w * T::half();
                }
                match next.get_mut(&key) {
                    Some(acc) => *acc = acc.clone() + w,
                    None => {
                        next.insert(key, w);
                    }
                }
            }
        }

        if next.is_empty() {
            return Err(Error::ImpossibleRecord);
        }
        if let Some(k) = opts.top_k {
            if next.len() > k {
                let mut entries: Vec<(FilterState, T)> = next.into_iter().collect();
                entries.sort_by(|a, b| {
                    b.1.partial_cmp(&a.1)
                        .expect("weights are comparable")
                        .then_with(|| a.0.cmp(&b.0))
                });
                entries.truncate(k);
                next = entries.into_iter().collect();
                truncated = true;
            }
        }
        if next.len() as u64 > opts.state_cap {
            return Err(Error::StateCapExceeded {
                states: next.len() as u64,
                cap: opts.state_cap,
            });
        }
        states_explored += next.len() as u64;

        if T::RESCALES {
            let mut total = T::zero();
            for w in next.values() {
                total = total + w.clone();
            }
            if total.is_zero() {
                return Err(Error::ImpossibleRecord);
            }
            log_normalizer += total.to_f64().ln();
            for w in next.values_mut() {
                *w = w.clone() / total.clone();
            }
        }
        states = next;
    }

    let mut mass_black = T::zero();
    let mut mass_white = T::zero();
    let mut total = T::zero();
    for (state, weight) in &states {
        total = total + weight.clone();
        if state.colors.get(state.origin_index) == Color::B {
            mass_black = mass_black + weight.clone();
        } else {
            mass_white = mass_white + weight.clone();
        }
    }
    if total.is_zero() {
        return Err(Error::ImpossibleRecord);
    }
    if !T::RESCALES {
        log_normalizer = total.to_f64().ln();
    }
    Ok(FilterOutcome {
        mass_black: mass_black / total.clone(),
        mass_white: mass_white / total,
        log_normalizer,
        states_explored,
        truncated,
    })
}
