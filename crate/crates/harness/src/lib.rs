//! Experiment harness for the random-walk-in-random-scenery laboratory:
//! a catalog of deterministic experiments with CSV/JSON emission, and the
//! configuration plumbing behind the `rwrs` command-line tool.

pub mod config;
pub mod experiments;
pub mod table;

/// Version string stamped into run manifests.
pub fn version_string() -> String {
    format!("rwrs-{}", env!("CARGO_PKG_VERSION"))
}
