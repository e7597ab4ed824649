//! Phase diagram over the (p, ε) plane: where the decay criterion holds,
//! and the sign of the crossover-cost slope at zero drift.

use crate::config::Params;
use crate::table::{Check, ExpOutput, Table};
use anyhow::Result;
use rwrs_core::rates::{
    crossover_cost, crossover_cost_slope_at_half, goodness_criterion, p_star_zero_eps_f64,
};
use std::collections::BTreeMap;

pub fn run(params: &BTreeMap<String, String>) -> Result<ExpOutput> {
    let params = Params(params);
    let p_points = params.usize("p-points", 200)?;
    let eps_points = params.usize("eps-points", 100)?;

    let p_grid: Vec<f64> = (0..p_points)
        .map(|i| 0.5 + 0.5 * i as f64 / (p_points - 1) as f64)
        .collect();
    let eps_grid: Vec<f64> = (0..eps_points)
        .map(|j| 0.99 * j as f64 / (eps_points - 1) as f64)
        .collect();

    let mut grid = Table::new("grid", &["p", "eps", "criterion_holds", "margin"]);
    let mut corner_holds = false;
    let mut low_p_excluded = true;
    let mut sign_ok = true;
    let mut fd_worst = 0.0f64;
    let h = 1e-5;

    for &p in &p_grid {
        for &eps in &eps_grid {
            let goodness = goodness_criterion(p, eps)?;
            if p == 1.0 && eps == 0.0 {
                corner_holds = goodness.holds;
            }
            if p <= 5.0 / 6.0 && goodness.holds {
                low_p_excluded = false;
            }
            grid.push(vec![
                p.into(),
                eps.into(),
                goodness.holds.into(),
                goodness.margin.into(),
            ]);

            // slope sign and central-difference cross-check; delta > 0 needs
            // eps > 0 for a finite cost
            let deltas = if eps > 0.0 { vec![0.0, eps] } else { vec![0.0] };
            for delta in deltas {
                let closed = crossover_cost_slope_at_half(delta, p);
                if (closed > 0.0) != (p < 0.8) {
                    sign_ok = false;
                }
                let fd = (crossover_cost(0.5 + h, delta, p, eps)?
                    - crossover_cost(0.5 - h, delta, p, eps)?)
                    / (2.0 * h);
                fd_worst = fd_worst.max((closed - fd).abs());
            }
        }
    }

    // per-(p, delta) slope summary at a reference eps
    let mut slope = Table::new("slope", &["p", "delta", "slope_closed", "slope_fd", "positive"]);
    for &p in &p_grid {
        for delta in [0.0, 0.3, 0.6] {
            let eps = 0.5;
            let closed = crossover_cost_slope_at_half(delta, p);
            let fd = (crossover_cost(0.5 + h, delta, p, eps)?
                - crossover_cost(0.5 - h, delta, p, eps)?)
                / (2.0 * h);
            fd_worst = fd_worst.max((closed - fd).abs());
            if (closed > 0.0) != (p < 0.8) {
                sign_ok = false;
            }
            slope.push(vec![
                p.into(),
                delta.into(),
                closed.into(),
                fd.into(),
                (closed > 0.0).into(),
            ]);
        }
    }

    // localize the criterion flip at eps = 0 by bisection
    let (mut lo, mut hi) = (0.99f64, 0.99999f64);
    assert!(!goodness_criterion(lo, 0.0)?.holds && goodness_criterion(hi, 0.0)?.holds);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if goodness_criterion(mid, 0.0)?.holds {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let flip = 0.5 * (lo + hi);
    let p_star = p_star_zero_eps_f64();
    let flip_err = (flip - p_star).abs();

    let mut threshold = Table::new("threshold", &["p_star_closed_form", "p_star_bisection", "abs_error"]);
    threshold.push(vec![p_star.into(), flip.into(), flip_err.into()]);

    let checks = vec![
        Check::new(
            "crossover-sign",
            "sign(dC/dq at q=1/2) > 0 iff p < 4/5, for every (eps, delta) on the grid",
            sign_ok,
            format!("{} grid points", p_points * eps_points),
        ),
        Check::new(
            "crossover-fd",
            "|closed-form slope - central difference (h=1e-5)| <= 1e-8 everywhere",
            fd_worst <= 1e-8,
            format!("worst abs deviation {fd_worst:.3e}"),
        ),
        Check::new(
            "p-star-flip",
            "criterion flip at eps=0 within 1e-9 of 12^6/(12^6+5^5)",
            flip_err <= 1e-9,
            format!("bisection {flip:.12}, closed form {p_star:.12}"),
        ),
        Check::new(
            "criterion-region",
            "criterion holds at (p, eps) = (1, 0) and nowhere with p <= 5/6",
            corner_holds && low_p_excluded,
            format!("corner holds: {corner_holds}, low-p excluded: {low_p_excluded}"),
        ),
    ];

    let mut out = super::empty_output();
    out.tables = vec![grid, slope, threshold];
    out.checks = checks;
    Ok(out)
}
