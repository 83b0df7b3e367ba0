use lrc_core::analysis::*;
use lrc_core::geometry::{membership_residual, CoveringConfig};
use lrc_core::intervals::IntervalSet;
use lrc_core::rational::{q, Rational};
use proptest::prelude::*;

/// Measure of `ℬ(δ)/z ∩ [δ, 1−δ]` summed over every bridge index up to `⌈z⌉ + 1`.
fn measure_oracle(z: &Rational, delta: &Rational) -> Rational {
    let k0 = IntervalSet::closed(delta.clone(), Rational::one() - delta);
    let top = z.ceil_i64().unwrap() + 1;
    (0..=top)
        .map(|k| {
            let k = Rational::from(k);
            IntervalSet::open((&k - delta) / z, (&k + delta) / z)
                .intersect(&k0)
                .measure()
        })
        .sum()
}

fn in_window(x: &Rational, delta: &Rational) -> bool {
    let f = x.fract();
    f >= *delta && f <= Rational::one() - delta
}

/// Membership of `t` in the loneliness windows by direct evaluation.
fn lonely_at(inst: &RunnerInstance, t: &Rational) -> bool {
    t.is_positive()
        && *t <= inst.horizon
        && inst
            .speeds
            .iter()
            .zip(&inst.starts)
            .all(|(w, p)| in_window(&(p + t * w), &inst.delta))
}

#[test]
fn measure_matches_oracle_and_bound() {
    for (zn, zd) in [(1, 1), (2, 1), (5, 1), (7, 3), (31, 5), (100, 7)] {
        for dd in [3, 4, 6, 10] {
            let (z, delta) = (q(zn, zd), q(1, dd));
            let r = k0_measure(&z, &delta).unwrap();
            assert_eq!(r.measure, measure_oracle(&z, &delta), "z={z} delta={delta}");
            assert!(r.measure <= r.bound);
        }
    }
}

#[test]
fn measure_reference_values() {
    let r = k0_measure(&q(5, 1), &q(1, 6)).unwrap();
    assert_eq!((r.measure.clone(), r.tight), (q(4, 15), true));
    assert_eq!(k0_measure(&q(1, 1), &q(1, 4)).unwrap().measure, q(0, 1));
    let r = k0_measure(&q(2, 1), &q(1, 4)).unwrap();
    assert_eq!((r.measure, r.bound), (q(1, 4), q(1, 3)));
}

#[test]
fn bound_is_tight_at_k_minus_one() {
    for k in 3..=12 {
        let r = k0_measure(&q(k - 1, 1), &q(1, k)).unwrap();
        assert!(r.tight, "k={k}: {} vs {}", r.measure, r.bound);
    }
}

#[test]
fn measure_rejects_bad_input() {
    assert!(k0_measure(&q(1, 2), &q(1, 4)).is_err());
    assert!(k0_measure(&q(2, 1), &q(1, 2)).is_err());
}

#[test]
fn measure_csv_shape() {
    let csv = measure_curve_csv(&q(1, 10), &q(1, 1), &q(3, 1), 4).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "z,measure");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,"));
    assert!(lines[5].starts_with("3,"));
}

#[test]
fn counterexample_separates_rounds() {
    let eps = [q(1, 10000), q(3, 10000), q(2, 10000), q(4, 10000)];
    let r = counterexample_verify(&eps).unwrap();
    assert!(r.residual_one_round.is_empty());
    assert!(r.beam_empty_one_round);
    assert!(!r.residual_two_rounds.is_empty());
    let w = r.witness_two_rounds.clone().unwrap();
    assert!(w > 1 && w <= 2);
    assert!(r.separates());
}

#[test]
fn six_runner_example() {
    let speeds = [10285, 26740, 35319, 46187, 61005]
        .map(|w| q(w, 1))
        .to_vec();
    let inst = RunnerInstance::classic(speeds, q(1, 6), q(2, 10285));
    let windows = loneliness_windows(&inst).unwrap();
    assert!(windows
        .intersect(&IntervalSet::open(q(0, 1), q(1, 10285)))
        .is_empty());
    assert!(windows.contains(&q(5, 41140)));
    assert!(lonely_at(&inst, &q(5, 41140)));
}

#[test]
fn free_start_blocker() {
    let inst = RunnerInstance {
        speeds: vec![q(1, 1), q(1, 1)],
        starts: vec![q(1, 4), reversed_start(&q(1, 4))],
        delta: q(1, 3),
        horizon: q(10, 1),
    };
    assert!(loneliness_windows(&inst).unwrap().is_empty());
}

#[test]
fn runner_input_errors() {
    let mut inst = RunnerInstance::classic(vec![q(1, 1)], q(1, 4), q(0, 1));
    assert!(loneliness_windows(&inst).is_err());
    inst.horizon = q(1, 1);
    inst.starts = vec![q(1, 1)];
    assert!(loneliness_windows(&inst).is_err());
}

#[test]
fn round_check_examples() {
    // two speeds: δ = 1/3 and the first window of speed 1 opens at 1/3
    assert_eq!(
        nd_round_check(&[q(1, 1), q(1, 1)], 1).unwrap(),
        Some(q(1, 3))
    );
    assert_eq!(
        nd_round_check(&[q(1, 1), q(2, 1), q(3, 1)], 1).unwrap(),
        Some(q(1, 4))
    );
    assert!(nd_round_check(&[q(1, 1)], 1).is_err());
}

#[test]
fn gap_bounds_order() {
    for d in 1..=10 {
        let (lo, hi) = gap_bounds(d).unwrap();
        assert!(lo <= hi);
    }
}

fn ratio() -> impl Strategy<Value = Rational> {
    (1i64..400, 1i64..40).prop_map(|(n, d)| q(n, d) + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn measure_never_exceeds_bound(z in ratio(), k in 3i64..30) {
        let r = k0_measure(&z, &q(1, k)).unwrap();
        prop_assert!(r.measure <= r.bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn measure_agrees_with_oracle(z in ratio(), k in 3i64..30) {
        let delta = q(1, k);
        prop_assert_eq!(k0_measure(&z, &delta).unwrap().measure, measure_oracle(&z, &delta));
    }

    #[test]
    fn one_round_covers_at_lower_gap(z in proptest::collection::vec(ratio(), 1..=3)) {
        let d = z.len();
        let delta = gap_bounds(d).unwrap().0;
        let cfg = CoveringConfig::with_delta(d, 1, delta).unwrap();
        prop_assert!(!membership_residual(&z, &cfg).unwrap().is_empty());
    }

    #[test]
    fn round_check_matches_membership(z in proptest::collection::vec(ratio(), 1..=3), rounds in 1usize..=2) {
        let mut w = vec![Rational::one()];
        w.extend(z.iter().cloned());
        let cfg = CoveringConfig::new(z.len(), rounds).unwrap();
        let residual = membership_residual(&z, &cfg).unwrap();
        let t = nd_round_check(&w, rounds).unwrap();
        prop_assert_eq!(t.is_some(), !residual.is_empty());
        if let Some(t) = t {
            prop_assert_eq!(Some(&t), residual.min());
        }
    }

    #[test]
    fn windows_agree_with_pointwise_check(
        speeds in proptest::collection::vec(1i64..50, 1..4),
        starts in proptest::collection::vec(0i64..12, 3),
        t in (1i64..200, 1i64..60),
    ) {
        let inst = RunnerInstance {
            starts: starts[..speeds.len()].iter().map(|&s| q(s, 12)).collect(),
            speeds: speeds.iter().map(|&w| q(w, 1)).collect(),
            delta: q(1, 5),
            horizon: q(2, 1),
        };
        let t = q(t.0, t.1);
        prop_assert_eq!(loneliness_windows(&inst).unwrap().contains(&t), lonely_at(&inst, &t));
    }

    #[test]
    fn gap_identity_holds(v in -50i64..50, vp in -50i64..50, t in (1i64..500, 1i64..97), k in 3i64..12) {
        let ok = fractional_gap_identity_check(&q(v, 7), &q(vp, 3), &q(t.0, t.1), &q(1, k)).unwrap();
        prop_assert!(ok);
    }
}
