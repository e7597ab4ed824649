//! Cross-backend and distributional invariants of the inference engines.

use num_traits::{One, Zero};
use proptest::prelude::*;
use rwrs_core::inference::{
    brute_force_conditional, conditional_color_at_origin, conditional_color_by_enumeration,
    oracle_all_records, EnumerationCaps, QueryOptions,
};
use rwrs_core::record::{
    compatible, path_probability, ColorRecord, StepDistribution, WalkPath,
};
use rwrs_core::weight::{exact, Exact, Exact128, StepWeights};
use rwrs_core::Color;

fn exact_grid() -> Vec<StepWeights<Exact>> {
    [
        (1i64, 2i64, 0i64, 1i64),
        (7, 10, 0, 1),
        (1, 1, 0, 1),
        (1, 2, 3, 10),
        (7, 10, 3, 10),
        (1, 1, 3, 10),
    ]
    .iter()
    .map(|&(pn, pd, en, ed)| StepWeights::<Exact>::from_ratios(pn, pd, en, ed).unwrap())
    .collect()
}

#[test]
fn backends_agree_exactly_on_all_short_records() {
    let opts = QueryOptions::default();
    let caps = EnumerationCaps::default();
    for steps in exact_grid() {
        for n in 1..=6usize {
            for bits in 0..(1u64 << n) {
                let record = ColorRecord::from_bits(bits, n);
                let filter = conditional_color_at_origin(&record, &steps, &opts).unwrap();
                let enumerated =
                    conditional_color_by_enumeration(&record, &steps, &caps).unwrap();
                let oracle = brute_force_conditional(&record, &steps).unwrap();
                assert_eq!(filter.p_black, enumerated.p_black, "{record} {steps:?}");
                assert_eq!(filter.p_black, oracle.p_black, "{record} {steps:?}");
                assert_eq!(filter.p_white, oracle.p_white, "{record} {steps:?}");
            }
        }
    }
}

#[test]
fn record_masses_sum_to_one_exactly() {
    for steps in exact_grid() {
        for n in [4usize, 7] {
            let table = oracle_all_records::<Exact>(n, &steps).unwrap();
            let mut total = Exact::zero();
            let mut black = Exact::zero();
            for (mass, mass_black) in &table.masses {
                total += mass;
                black += mass_black;
            }
            assert!(total.is_one(), "total record mass must be 1 at n = {n}");
            assert_eq!(black, exact(1, 2), "origin is black half the time");
        }
    }
}

#[test]
fn three_backends_agree_exactly_on_sampled_length_12_records() {
    let opts = QueryOptions::default();
    let caps = EnumerationCaps::default();
    let grid: Vec<StepWeights<Exact128>> = [
        (1i64, 2i64, 0i64, 1i64),
        (7, 10, 0, 1),
        (1, 1, 0, 1),
        (7, 10, 3, 10),
    ]
    .iter()
    .map(|&(pn, pd, en, ed)| StepWeights::from_ratios(pn, pd, en, ed).unwrap())
    .collect();
    for steps in grid {
        for bits in [0u64, 0xFFF, 0xAAA, 0x3C7, 0x92B, 0x5F0] {
            let record = ColorRecord::from_bits(bits, 12);
            let filter = conditional_color_at_origin(&record, &steps, &opts).unwrap();
            let enumerated = conditional_color_by_enumeration(&record, &steps, &caps).unwrap();
            let oracle = brute_force_conditional(&record, &steps).unwrap();
            assert_eq!(filter.p_black, enumerated.p_black, "{record}");
            assert_eq!(filter.p_black, oracle.p_black, "{record}");
        }
    }
}

#[test]
fn float_record_masses_sum_to_one_at_n10() {
    for (p, eps) in [(0.5, 0.0), (0.7, 0.3)] {
        let dist = StepDistribution::new(p, eps).unwrap();
        let table = oracle_all_records::<f64>(10, &dist.float_weights()).unwrap();
        let total: f64 = table.masses.iter().map(|(mass, _)| mass).sum();
        assert!((total - 1.0).abs() < 1e-12, "p={p} eps={eps}: {total}");
    }
}

#[test]
fn event_partitions_sum_to_one() {
    // {ends up} ∪ {ends down} ∪ {ends paused} exhausts path space
    use rwrs_core::events::PathEvent;
    use rwrs_core::inference::event_masses;
    let caps = EnumerationCaps::default();
    for (p, eps) in [(0.6, 0.2), (0.5, 0.3)] {
        let dist = StepDistribution::new(p, eps).unwrap();
        for bits in [0u64, 77, 200, 511] {
            let record = ColorRecord::from_bits(bits, 9);
            let pause_end = PathEvent::custom("ends-paused", |positions: &[i64], _| {
                let n = positions.len() - 1;
                positions[n] == positions[n - 1]
            });
            let events = [PathEvent::EndsUp, PathEvent::EndsDown, pause_end];
            let masses =
                event_masses::<f64>(&record, &dist.float_weights(), &events, &caps).unwrap();
            let sum: f64 = (0..events.len()).map(|i| masses.conditional(i)).sum();
            assert!((sum - 1.0).abs() < 1e-10, "record {record}: {sum}");
        }
    }
}

#[test]
fn color_swap_symmetry_exact() {
    let opts = QueryOptions::default();
    for steps in exact_grid() {
        for bits in 0..(1u64 << 7) {
            let record = ColorRecord::from_bits(bits, 7);
            let a = conditional_color_at_origin(&record, &steps, &opts).unwrap();
            let b = conditional_color_at_origin(&record.flipped(), &steps, &opts).unwrap();
            assert_eq!(a.p_black, b.p_white, "{record}");
        }
    }
}

#[test]
fn float_and_exact_filters_agree_to_float_precision() {
    let opts = QueryOptions::default();
    let pairs = [
        (StepDistribution::new(0.5, 0.0).unwrap(), (1i64, 2i64, 0i64, 1i64)),
        (StepDistribution::new(1.0, 0.0).unwrap(), (1, 1, 0, 1)),
    ];
    for (dist, (pn, pd, en, ed)) in pairs {
        let exact: StepWeights<Exact> = StepWeights::from_ratios(pn, pd, en, ed).unwrap();
        for bits in 0..(1u64 << 8) {
            let record = ColorRecord::from_bits(bits, 8);
            let f = conditional_color_at_origin(&record, &dist.float_weights(), &opts).unwrap();
            let e = conditional_color_at_origin(&record, &exact, &opts).unwrap();
            let expect = rwrs_core::weight::Weight::to_f64(&e.p_black);
            assert!((f.p_black - expect).abs() < 1e-12, "{record}");
        }
    }
}

proptest! {
    #[test]
    fn compatible_coloring_replays_the_record(
        incs in proptest::collection::vec(prop_oneof![Just(-1i64), Just(0), Just(1)], 1..40),
        bits in any::<u64>(),
    ) {
        let path = WalkPath::from_increments(&incs).unwrap();
        let record = ColorRecord::from_bits(bits & ((1 << incs.len().min(63)) - 1), incs.len());
        if let Some(coloring) = compatible(&path, &record).unwrap() {
            for (t, &pos) in path.positions().iter().enumerate().skip(1) {
                prop_assert_eq!(coloring.color_at(pos), Some(record.at_time(t)));
            }
        }
    }

    #[test]
    fn path_probability_is_multiplicative_under_concatenation(
        a in proptest::collection::vec(prop_oneof![Just(-1i64), Just(0), Just(1)], 1..20),
        b in proptest::collection::vec(prop_oneof![Just(-1i64), Just(0), Just(1)], 1..20),
        p in 0.5f64..1.0,
        eps in 0.0f64..0.9,
    ) {
        let dist = StepDistribution::new(p, eps).unwrap();
        let first = WalkPath::from_increments(&a).unwrap();
        let second = WalkPath::from_increments(&b).unwrap();
        let joined = WalkPath::from_increments(
            &a.iter().chain(b.iter()).copied().collect::<Vec<_>>(),
        )
        .unwrap();
        let lhs = path_probability(&joined, &dist);
        let rhs = path_probability(&first, &dist) * path_probability(&second, &dist);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn parse_render_identity(
        runs in proptest::collection::vec((prop_oneof![Just(Color::B), Just(Color::W)], 1usize..60), 0..12),
        long_run in 0usize..10_000,
    ) {
        let mut symbols = Vec::new();
        for (color, reps) in &runs {
            for _ in 0..*reps {
                symbols.push(*color);
            }
        }
        for _ in 0..long_run {
            symbols.push(Color::W);
        }
        let record = ColorRecord::new(symbols);
        let text = rwrs_core::parse::render(&record);
        let back = rwrs_core::parse::parse_record_expression(&text).unwrap();
        prop_assert_eq!(record, back);
    }

    #[test]
    fn flip_symmetry_float(
        bits in any::<u64>(),
        n in 1usize..11,
        p in 0.5f64..1.0,
        eps in 0.0f64..0.9,
    ) {
        let dist = StepDistribution::new(p, eps).unwrap();
        let record = ColorRecord::from_bits(bits & ((1 << n) - 1), n);
        let opts = QueryOptions::default();
        let a = conditional_color_at_origin(&record, &dist.float_weights(), &opts).unwrap();
        let b = conditional_color_at_origin(&record.flipped(), &dist.float_weights(), &opts).unwrap();
        prop_assert!((a.p_black - b.p_white).abs() < 1e-12);
        prop_assert!((a.p_black + a.p_white - 1.0).abs() < 1e-12);
    }
}
