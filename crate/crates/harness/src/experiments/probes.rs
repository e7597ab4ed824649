//! Probe-record experiments: the pivot-chain pair driving the conditional
//! gap, the pivot-prefix records pinning the origin near 1/2, and the
//! sparse opposite-color probes (report only).

use crate::config::Params;
use crate::table::{Check, ExpOutput, Table};
use anyhow::Result;
use rwrs_core::enumerate::EnumCaps;
use rwrs_core::events::PathEvent;
use rwrs_core::inference::{
    delta, event_masses, EventMasses, QueryOptions,
};
use rwrs_core::probe::{
    bad_probe_pair, good_config_pivot_times, good_config_prefix, sparse_probe as build_sparse,
};
use rwrs_core::record::{Color, ColorRecord, StepDistribution};
use std::collections::BTreeMap;

/// Gap values |Δ(L)| at m = 1, L = 3, frozen from an exact-engine run ahead
/// of time; the suite checks reproduction to 1e-9.
pub const FROZEN_GAP_L3: &[(f64, f64)] = &[(0.6, 0.19752484297318), (0.7, 0.38078346471029)];

/// The full partition of path space used on the probe pair:
/// {no turn, last turn at l} × {ends up, ends down}.
fn partition_events(pivots: &[usize]) -> Vec<PathEvent> {
    let mut events = vec![
        PathEvent::all(vec![
            PathEvent::NoTurn {
                pivots: pivots.to_vec(),
            },
            PathEvent::EndsUp,
        ]),
        PathEvent::all(vec![
            PathEvent::NoTurn {
                pivots: pivots.to_vec(),
            },
            PathEvent::EndsDown,
        ]),
    ];
    for index in 0..pivots.len() {
        for end in [PathEvent::EndsUp, PathEvent::EndsDown] {
            events.push(PathEvent::all(vec![
                PathEvent::LastTurnAt {
                    pivots: pivots.to_vec(),
                    index,
                },
                end,
            ]));
        }
    }
    events
}

pub fn bad_probe(params: &BTreeMap<String, String>) -> Result<ExpOutput> {
    let params = Params(params);
    let l_max = params.usize("l-max", 3)?;
    let caps = EnumCaps::default();
    let opts = QueryOptions::default();
    let m = 1usize;

    let mut events_table = Table::new(
        "events",
        &["p", "L", "event", "probability", "origin_black_given_event"],
    );
    let mut gaps = Table::new("gaps", &["p", "L", "delta", "abs_delta"]);

    let mut partition_worst = 0.0f64;
    let mut ineq_down_ok = true;
    let mut ineq_chain_ok = true;
    let mut origin_ok = true;
    let mut swap_ok = true;
    let mut growth_ok = true;
    let mut frozen_ok = true;

    for &(p, frozen_l3) in FROZEN_GAP_L3 {
        let dist = StepDistribution::new(p, 0.0)?;
        let steps = dist.float_weights();
        let mut previous_abs: Option<f64> = None;
        for big_l in 1..=l_max {
            let (bar, tilde, geometry) = bad_probe_pair(m, big_l)?;
            let pivots = geometry.pivot_times.clone();
            let events = partition_events(&pivots);
            let masses: EventMasses<f64> = event_masses(&bar, &steps, &events, &caps)?;

            let sum: f64 = (0..events.len()).map(|i| masses.conditional(i)).sum();
            partition_worst = partition_worst.max((sum - 1.0).abs());

            for (index, event) in events.iter().enumerate() {
                let probability = masses.conditional(index);
                let origin = if masses.events[index].mass > 0.0 {
                    masses.origin_black_given_event(index)?
                } else {
                    f64::NAN
                };
                events_table.push(vec![
                    p.into(),
                    big_l.into(),
                    event.name().into(),
                    probability.into(),
                    origin.into(),
                ]);
            }

            // downward tails: P(LT_l, ED) <= ((1-p)/p)^{v(l,L)} P(LT_l, EU)
            for l in 0..=big_l {
                let eu = masses.conditional(2 + 2 * l);
                let ed = masses.conditional(2 + 2 * l + 1);
                let bound = ((1.0 - p) / p).powi(geometry.separations[l] as i32) * eu;
                if ed > bound * (1.0 + 1e-9) + 1e-300 {
                    ineq_down_ok = false;
                }
            }
            // chain toward the top pivot:
            // P(LT_l, EU) <= (p/(1-p))^{u(l+1)+5m} (1/2)^{t(l+1)-t(l)} P(LT_{l+1}, EU)
            for l in 0..big_l {
                let lhs = masses.conditional(2 + 2 * l);
                let gap = geometry.pivot_times[l + 1] - geometry.pivot_times[l];
                let factor = (p / (1.0 - p)).powi((geometry.zigzag_offsets[l + 1] + 5 * m) as i32)
                    * 0.5f64.powi(gap as i32);
                let rhs = factor * masses.conditional(2 + 2 * (l + 1));
                if lhs > rhs * (1.0 + 1e-9) {
                    ineq_chain_ok = false;
                }
            }

            // origin color given the dominant cell is p or 1-p, and the
            // shortened record forces the opposite
            let q_bar = masses.origin_black_given_event(2 + 2 * big_l)?;
            let near = |x: f64, y: f64| (x - y).abs() <= 1e-10;
            if !(near(q_bar, p) || near(q_bar, 1.0 - p)) {
                origin_ok = false;
            }
            let tilde_pivots = geometry.pivot_times[..big_l].to_vec();
            let tilde_event = PathEvent::all(vec![
                PathEvent::LastTurnAt {
                    pivots: tilde_pivots,
                    index: big_l - 1,
                },
                PathEvent::EndsUp,
            ]);
            let tilde_masses: EventMasses<f64> =
                event_masses(&tilde, &steps, &[tilde_event], &caps)?;
            let q_tilde = tilde_masses.origin_black_given_event(0)?;
            if !near(q_bar + q_tilde, 1.0) {
                swap_ok = false;
            }

            let gap = delta(
                &ColorRecord::empty(),
                &bar,
                &tilde,
                &steps,
                &opts,
            )?;
            gaps.push(vec![p.into(), big_l.into(), gap.into(), gap.abs().into()]);
            if let Some(prev) = previous_abs {
                if gap.abs() <= prev {
                    growth_ok = false;
                }
            }
            previous_abs = Some(gap.abs());
            if big_l == 3 && (gap.abs() - frozen_l3).abs() > 1e-9 {
                frozen_ok = false;
            }
        }
    }

    let checks = vec![
        Check::new(
            "event-partition",
            "the cells {NT, LT_l} x {EU, ED} have conditional probabilities summing to 1 within 1e-10",
            partition_worst <= 1e-10,
            format!("worst |sum - 1| = {partition_worst:.3e}"),
        ),
        Check::new(
            "downward-tail-inequality",
            "P(LT_l, ED | record) <= ((1-p)/p)^{v(l,L)} P(LT_l, EU | record) for every l",
            ineq_down_ok,
            "checked for every pivot at every (p, L)".to_string(),
        ),
        Check::new(
            "pivot-chain-inequality",
            "P(LT_l, EU) <= (p/(1-p))^{u(l+1)+5m} (1/2)^{t(l+1)-t(l)} P(LT_{l+1}, EU) for every l < L",
            ineq_chain_ok,
            "checked for every pivot at every (p, L)".to_string(),
        ),
        Check::new(
            "origin-conditional-values",
            "P(Y_0 = B | LT_L, EU, record) lands in {p, 1-p} within 1e-10",
            origin_ok,
            "dominant event cell on the full probe".to_string(),
        ),
        Check::new(
            "shortened-probe-swap",
            "removing the top pivot swaps the origin conditional: q and 1-q",
            swap_ok,
            "full vs shortened probe at every (p, L)".to_string(),
        ),
        Check::new(
            "gap-growth",
            "|delta(L)| strictly increasing over L in {1, 2, 3}",
            growth_ok,
            "known not to hold at p = 0.6, where |delta(1)| overshoots 2p-1".to_string(),
        ),
        Check::new(
            "gap-frozen-value",
            "|delta(3)| reproduces the frozen exact-engine value within 1e-9",
            frozen_ok,
            format!("{FROZEN_GAP_L3:?}"),
        ),
    ];

    let mut out = super::empty_output();
    out.tables = vec![events_table, gaps];
    out.checks = checks;
    Ok(out)
}

pub fn good_config(params: &BTreeMap<String, String>, seed: u64) -> Result<ExpOutput> {
    let params = Params(params);
    let extensions = params.usize("extensions", 20)?;
    let l_max = params.usize("l-max", 3)?;
    let caps = EnumCaps::default();
    let steps = StepDistribution::new(0.5, 0.0)?.float_weights();

    let mut table = Table::new(
        "instances",
        &["L", "seed", "ext_len", "p_no_turn", "p_some_turn", "p_black", "nt_bound_ok", "gap_bound_ok"],
    );
    let mut variant = Table::new(
        "leading_bb_variant",
        &["L", "seed", "p_no_turn", "p_some_turn", "p_black"],
    );
    let mut nt_ok = true;
    let mut gap_ok = true;

    for big_l in 1..=l_max {
        let prefix = good_config_prefix(big_l)?;
        let pivots = good_config_pivot_times(big_l);
        // the same record with the leading BB removed, reported untested
        let bare = ColorRecord::new(prefix.symbols()[2..].to_vec());
        let bare_pivots: Vec<usize> = pivots.iter().map(|t| t - 2).collect();
        for index in 0..extensions as u64 {
            let instance_seed = seed
                .wrapping_add(index)
                .wrapping_mul(0xB5AD_4ECE_DA1C_E2A9)
                .wrapping_add(big_l as u64);
            let ext_len = 8 + (instance_seed % 6) as usize;
            let ext = super::support::random_extension(&prefix, ext_len, instance_seed);
            let full = prefix.concat(&ext);
            let events = [
                PathEvent::NoTurn {
                    pivots: pivots.clone(),
                },
                PathEvent::AtLeastOneTurn {
                    pivots: pivots.clone(),
                },
            ];
            let masses: EventMasses<f64> = event_masses(&full, &steps, &events, &caps)?;
            let nt = masses.conditional(0);
            let aot = masses.conditional(1);
            let p_black =
                (masses.events[0].mass_black + masses.events[1].mass_black) / masses.total;
            let nt_bound = nt <= aot / (big_l as f64 + 1.0) + 1e-12;
            let gap_bound = (p_black - 0.5).abs() <= 0.5 / (big_l as f64 + 1.0) + 1e-12;
            nt_ok &= nt_bound;
            gap_ok &= gap_bound;
            table.push(vec![
                big_l.into(),
                instance_seed.into(),
                ext_len.into(),
                nt.into(),
                aot.into(),
                p_black.into(),
                nt_bound.into(),
                gap_bound.into(),
            ]);

            // report-only row for the variant without the leading BB
            let bare_ext = super::support::random_extension(&bare, ext_len, instance_seed);
            let bare_full = bare.concat(&bare_ext);
            let bare_events = [
                PathEvent::NoTurn {
                    pivots: bare_pivots.clone(),
                },
                PathEvent::AtLeastOneTurn {
                    pivots: bare_pivots.clone(),
                },
            ];
            let bm: EventMasses<f64> = event_masses(&bare_full, &steps, &bare_events, &caps)?;
            let bare_black = (bm.events[0].mass_black + bm.events[1].mass_black) / bm.total;
            variant.push(vec![
                big_l.into(),
                instance_seed.into(),
                bm.conditional(0).into(),
                bm.conditional(1).into(),
                bare_black.into(),
            ]);
        }
    }

    let checks = vec![
        Check::new(
            "no-turn-mass-bound",
            "P(no pivot turn | record) <= P(some pivot turn | record) / (L+1)",
            nt_ok,
            format!("{extensions} random extensions per L"),
        ),
        Check::new(
            "origin-near-half",
            "|P(Y_0 = B | record) - 1/2| <= 1/(2(L+1))",
            gap_ok,
            format!("{extensions} random extensions per L"),
        ),
    ];

    let mut out = super::empty_output();
    out.tables = vec![table, variant];
    out.checks = checks;
    Ok(out)
}

pub fn sparse_probe(params: &BTreeMap<String, String>) -> Result<ExpOutput> {
    let params = Params(params);
    let k_max = params.usize("big-k-max", 4)?;
    let caps = EnumCaps::default();
    let opts = QueryOptions::default();

    let grid: &[(f64, f64)] = &[(0.6, 0.2), (0.5, 0.3)];
    let prefixes: &[&str] = &["", "B", "BW"];

    let mut rows = Table::new(
        "gaps",
        &["p", "eps", "prefix", "k", "K", "gap", "target", "visit_both_sides", "partition_sum"],
    );
    let mut partition_worst = 0.0f64;

    for &(p, eps) in grid {
        let dist = StepDistribution::new(p, eps)?;
        let steps = dist.float_weights();
        for prefix_text in prefixes {
            let prefix: ColorRecord = prefix_text.parse().map_err(anyhow::Error::from)?;
            let m = prefix.len() + 1;
            for k in [2usize, 3] {
                for big_k in 1..=k_max {
                    let black_probe = build_sparse(k, big_k, Color::B)?;
                    let white_probe = build_sparse(k, big_k, Color::W)?;
                    let gap = delta(&prefix, &black_probe, &white_probe, &steps, &opts)?;
                    let target = (1.0 - eps) * (1.0 - p);

                    let full = prefix.concat(&black_probe);
                    let window_end = m + k * big_k;
                    let visit = visit_events(m, window_end);
                    let masses: EventMasses<f64> =
                        event_masses(&full, &steps, &visit, &caps)?;
                    let sum: f64 = (0..visit.len()).map(|i| masses.conditional(i)).sum();
                    partition_worst = partition_worst.max((sum - 1.0).abs());
                    rows.push(vec![
                        p.into(),
                        eps.into(),
                        (*prefix_text).into(),
                        k.into(),
                        big_k.into(),
                        gap.abs().into(),
                        target.into(),
                        masses.conditional(0).into(),
                        sum.into(),
                    ]);
                }
            }
        }
    }

    // determinism: recompute one corner and compare bitwise
    let dist = StepDistribution::new(0.6, 0.2)?;
    let probe_b = build_sparse(3, 4, Color::B)?;
    let probe_w = build_sparse(3, 4, Color::W)?;
    let a = delta(
        &ColorRecord::empty(),
        &probe_b,
        &probe_w,
        &dist.float_weights(),
        &opts,
    )?;
    let b = delta(
        &ColorRecord::empty(),
        &probe_b,
        &probe_w,
        &dist.float_weights(),
        &opts,
    )?;
    let deterministic = a == b;

    let checks = vec![
        Check::new(
            "visit-partition",
            "the four visited/unvisited cells for the intervals beside W_0 sum to 1 within 1e-10",
            partition_worst <= 1e-10,
            format!("worst |sum - 1| = {partition_worst:.3e}"),
        ),
        Check::new(
            "determinism",
            "recomputing a gap yields identical bits",
            deterministic,
            format!("gap = {a}"),
        ),
    ];

    let mut out = super::empty_output();
    out.tables = vec![rows];
    out.checks = checks;
    Ok(out)
}

/// Partition by whether the walk visits the black interval to the left
/// and/or right of the white site seen at time m, within [m, window_end].
fn visit_events(m: usize, window_end: usize) -> Vec<PathEvent> {
    let sides = [
        (true, true, "left&right"),
        (true, false, "left-only"),
        (false, true, "right-only"),
        (false, false, "neither"),
    ];
    sides
        .iter()
        .map(|&(left, right, name)| {
            PathEvent::custom(name, move |positions: &[i64], coloring| {
                let anchor = positions[m];
                let window = &positions[m..=window_end.min(positions.len() - 1)];
                let min = window.iter().min().copied().unwrap_or(anchor);
                let max = window.iter().max().copied().unwrap_or(anchor);
                let left_visited = min < anchor
                    && coloring.color_at(anchor - 1) == Some(Color::B);
                let right_visited = max > anchor
                    && coloring.color_at(anchor + 1) == Some(Color::B);
                left_visited == left && right_visited == right
            })
        })
        .collect()
}
