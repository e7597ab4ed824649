//! The experiment catalog. Every experiment is a pure function of
//! (id, parameters, seed) producing tables plus named checks; the CLI layer
//! handles serialization and exit codes.

use crate::table::ExpOutput;
use anyhow::{bail, Result};
use std::collections::BTreeMap;

mod blackrun;
mod cramer;
mod cut_lemmas;
mod delta_chain;
mod mc_calibration;
mod oracle_eq;
mod phase;
mod probes;
pub mod support;

pub const CATALOG: &[(&str, &str, &str)] = &[
    (
        "phase-diagram",
        "e1",
        "crossover-cost slope sign and decay criterion over the (p, eps) plane",
    ),
    (
        "oracle-equivalence",
        "e2",
        "filter vs enumeration vs brute force on all short records, exact and float",
    ),
    (
        "cut-lemmas",
        "e3",
        "cut-time screening equality, early-cut inclusion, restricted worst-case avoidance",
    ),
    (
        "delta-chain",
        "e4",
        "per-instance audit of the cut-avoidance bound on conditional gaps",
    ),
    (
        "bad-probe",
        "e5",
        "pivot-chain probe pair: event partition, turn inequalities, origin conditionals, gap growth",
    ),
    (
        "black-run",
        "e6",
        "all-black record: interval-confinement law, trend to large horizons, spectral ratios",
    ),
    (
        "good-config",
        "e7",
        "pivot-prefix records: no-turn mass bound and origin-color pinning near 1/2",
    ),
    (
        "sparse-probe",
        "e8",
        "sparse opposite-color probes: conditional gaps and adjacent-interval visits (report only)",
    ),
    (
        "cramer-empirical",
        "e9",
        "decay rate of the point mass at drift 2/3 versus the tilted rate",
    ),
    (
        "mc-calibration",
        "e10",
        "sequential importance sampling against the exact engine over seeded trials",
    ),
];

pub fn canonical_id(id: &str) -> Option<&'static str> {
    let lower = id.to_ascii_lowercase();
    CATALOG
        .iter()
        .find(|(name, alias, _)| *name == lower || *alias == lower)
        .map(|(name, _, _)| *name)
}

pub fn run_experiment(
    id: &str,
    params: &BTreeMap<String, String>,
    seed: u64,
) -> Result<ExpOutput> {
    let Some(canonical) = canonical_id(id) else {
        bail!(
            "unknown experiment '{id}'; known: {}",
            CATALOG
                .iter()
                .map(|(name, alias, _)| format!("{name} ({alias})"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    };
    let mut output = match canonical {
        "phase-diagram" => phase::run(params)?,
        "oracle-equivalence" => oracle_eq::run(params)?,
        "cut-lemmas" => cut_lemmas::run(params, seed)?,
        "delta-chain" => delta_chain::run(params, seed)?,
        "bad-probe" => probes::bad_probe(params)?,
        "black-run" => blackrun::run(params)?,
        "good-config" => probes::good_config(params, seed)?,
        "sparse-probe" => probes::sparse_probe(params)?,
        "cramer-empirical" => cramer::run(params)?,
        "mc-calibration" => mc_calibration::run(params, seed)?,
        _ => unreachable!("catalog is exhaustive"),
    };
    output.id = canonical.to_string();
    output.params = params.clone();
    output.seed = seed;
    Ok(output)
}

pub(crate) fn empty_output() -> ExpOutput {
    ExpOutput {
        id: String::new(),
        params: BTreeMap::new(),
        seed: 0,
        tables: Vec::new(),
        checks: Vec::new(),
    }
}
