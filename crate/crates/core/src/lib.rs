//! A laboratory for random walk in random scenery on the integers.
//!
//! A nearest-neighbour walk with step law (pause, up, down) =
//! (ε, p(1−ε), (1−p)(1−ε)) moves over an i.i.d. fair black/white coloring
//! of ℤ and reports the color under its feet. This crate computes the
//! conditional law of the color at the origin given a finite color record,
//! exactly (forward filter, pruned path enumeration, brute-force oracle)
//! and by sequential Monte Carlo, together with the cut-time and
//! large-deviation machinery used to probe how far-away tampering with the
//! record can move that conditional law.
//!
//! Modules:
//! - [`record`]: walks, colorings, records, compatibility, joint weights.
//! - [`parse`]: compact record expressions like `[WWBB]^3 WBB`.
//! - [`inference`]: conditional probabilities of the origin color and of
//!   path events, with float and exact-rational backends.
//! - [`cut`]: cut times, cut-avoidance probabilities, and executable audits
//!   of the chain of inequalities bounding record-tampering influence.
//! - [`rates`]: relative entropy, crossover cost, tilted rate functions,
//!   interval-confinement probabilities and the monochromatic-record law.
//! - [`probe`]: constructors for the structured probe records and their
//!   pivot geometry, with structural checks.
//! - [`mc`]: reproducible direct simulation and sequential importance
//!   sampling.

pub mod cut;
pub mod enumerate;
pub mod error;
pub mod events;
mod filter;
pub mod inference;
pub mod mc;
mod oracle;
pub mod parse;
pub mod probe;
pub mod rates;
pub mod record;
pub mod weight;

pub use error::Error;
pub use record::{Color, ColorRecord, InducedColoring, StepDistribution, WalkPath};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
