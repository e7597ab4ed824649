//! Backend equivalence: the forward filter against the unpruned brute-force
//! sweep, on every record up to a length cap, exact and float, plus the
//! closed-form identities of the fully biased walk.

use crate::config::Params;
use crate::table::{Check, ExpOutput, Table};
use anyhow::Result;
use rayon::prelude::*;
use rwrs_core::inference::{
    conditional_color_at_origin, oracle_all_records, QueryOptions,
};
use rwrs_core::record::{ColorRecord, StepDistribution};
use rwrs_core::weight::{Exact128, StepWeights};
use std::collections::BTreeMap;

const DIST_GRID: &[(f64, f64, i64, i64, i64, i64)] = &[
    (0.5, 0.0, 1, 2, 0, 1),
    (0.7, 0.0, 7, 10, 0, 1),
    (1.0, 0.0, 1, 1, 0, 1),
    (0.5, 0.3, 1, 2, 3, 10),
    (0.7, 0.3, 7, 10, 3, 10),
    (1.0, 0.3, 1, 1, 3, 10),
];

pub fn run(params: &BTreeMap<String, String>) -> Result<ExpOutput> {
    let params = Params(params);
    let n_max = params.usize("n-max", 10)?.min(12);
    let biased_records = params.usize("biased-records", 100)?;

    struct Row {
        p: f64,
        eps: f64,
        n: usize,
        records: usize,
        exact_equal: bool,
        float_worst: f64,
    }

    let mut jobs = Vec::new();
    for &(p, eps, pn, pd, en, ed) in DIST_GRID {
        for n in 1..=n_max {
            jobs.push((p, eps, pn, pd, en, ed, n));
        }
    }
    let rows: Vec<Row> = jobs
        .into_par_iter()
        .map(|(p, eps, pn, pd, en, ed, n)| {
            let opts = QueryOptions::default();
            let exact_steps: StepWeights<Exact128> =
                StepWeights::from_ratios(pn, pd, en, ed).expect("valid");
            let dist = StepDistribution::new(p, eps).expect("valid");
            let float_steps = dist.float_weights();
            let exact_table = oracle_all_records::<Exact128>(n, &exact_steps).expect("within cap");
            let float_table = oracle_all_records::<f64>(n, &float_steps).expect("within cap");
            let mut exact_equal = true;
            let mut float_worst = 0.0f64;
            for bits in 0..(1u64 << n) {
                let record = ColorRecord::from_bits(bits, n);
                let exact_filter =
                    conditional_color_at_origin(&record, &exact_steps, &opts).expect("positive");
                let (total, black) = exact_table.record_mass(&record);
                if exact_filter.p_black != *black / *total {
                    exact_equal = false;
                }
                let float_filter =
                    conditional_color_at_origin(&record, &float_steps, &opts).expect("positive");
                let (ftotal, fblack) = float_table.record_mass(&record);
                float_worst = float_worst.max((float_filter.p_black - fblack / ftotal).abs());
            }
            Row {
                p,
                eps,
                n,
                records: 1 << n,
                exact_equal,
                float_worst,
            }
        })
        .collect();

    let mut table = Table::new(
        "equivalence",
        &["p", "eps", "n", "records", "exact_equal", "float_worst_abs_diff"],
    );
    let mut sorted: Vec<&Row> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.p, a.eps, a.n)
            .partial_cmp(&(b.p, b.eps, b.n))
            .expect("finite")
    });
    for row in &sorted {
        table.push(vec![
            row.p.into(),
            row.eps.into(),
            row.n.into(),
            row.records.into(),
            row.exact_equal.into(),
            row.float_worst.into(),
        ]);
    }
    let exact_all = rows.iter().all(|r| r.exact_equal);
    let float_worst = rows.iter().fold(0.0f64, |acc, r| acc.max(r.float_worst));

    // fully biased walk: the record is i.i.d. fair, so the origin color is
    // a fair coin no matter the record
    let dist = StepDistribution::new(1.0, 0.0)?;
    let opts = QueryOptions::default();
    let mut biased = Table::new("fully_biased", &["seed", "n", "p_black"]);
    let mut biased_exact = true;
    for seed in 0..biased_records as u64 {
        let n = 1 + (seed as usize * 7) % 30;
        let record = super::support::random_record(&dist, n, seed);
        let out = conditional_color_at_origin(&record, &dist.float_weights(), &opts)?;
        if out.p_black != 0.5 {
            biased_exact = false;
        }
        biased.push(vec![seed.into(), n.into(), out.p_black.into()]);
    }

    // single-symbol closed form over a parameter grid
    let mut single = Table::new("single_symbol", &["p", "eps", "p_black", "closed_form"]);
    let mut single_worst = 0.0f64;
    for pi in 0..=10 {
        for ei in 0..=9 {
            let p = 0.5 + 0.05 * pi as f64;
            let eps = 0.1 * ei as f64;
            let dist = StepDistribution::new(p, eps)?;
            let record: ColorRecord = "B".parse().map_err(anyhow::Error::from)?;
            let out = conditional_color_at_origin(&record, &dist.float_weights(), &opts)?;
            let closed = eps + (1.0 - eps) * 0.5;
            single_worst = single_worst.max((out.p_black - closed).abs());
            single.push(vec![p.into(), eps.into(), out.p_black.into(), closed.into()]);
        }
    }

    let checks = vec![
        Check::new(
            "exact-equality",
            "filter == brute force exactly, all records n <= n_max, all step laws",
            exact_all,
            format!("n_max = {n_max}, 6 step laws"),
        ),
        Check::new(
            "float-agreement",
            "|filter - brute force| <= 1e-12 in float mode",
            float_worst <= 1e-12,
            format!("worst abs diff {float_worst:.3e}"),
        ),
        Check::new(
            "fully-biased-half",
            "P(Y_0 = B | record) == 1/2 exactly at p = 1, eps = 0",
            biased_exact,
            format!("{biased_records} random records, n <= 30"),
        ),
        Check::new(
            "single-symbol-closed-form",
            "P(Y_0 = B | Y_1 = B) = eps + (1 - eps)/2 within 1e-12",
            single_worst <= 1e-12,
            format!("worst abs diff {single_worst:.3e}"),
        ),
    ];

    let mut out = super::empty_output();
    out.tables = vec![table, biased, single];
    out.checks = checks;
    Ok(out)
}
