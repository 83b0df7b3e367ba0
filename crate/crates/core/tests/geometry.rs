use lrc_core::geometry::*;
use lrc_core::{q, Rational};
use proptest::prelude::*;

/// Membership by testing every candidate `λ`: if the residual is nonempty,
/// its least point is a kwai end or the right end of a scaled bridge.
fn covered_oracle(z: &[Rational], config: &CoveringConfig) -> bool {
    let delta = &config.delta;
    let n = config.rounds as i64;
    let mut candidates: Vec<Rational> = (0..n).map(|l| q(l, 1) + delta).collect();
    for zi in z {
        let top: i64 = (zi * n).ceil().try_into().unwrap();
        for k in 0..=top + 1 {
            candidates.push((q(k, 1) + delta) / zi);
        }
    }
    candidates
        .iter()
        .any(|lambda| is_witness(lambda, z, config))
}

fn speeds(d: usize, max: i64) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((12i64..=12 * max, 1i64..=12), d)
        .prop_map(|v| v.into_iter().map(|(a, b)| q(a.max(b), b)).collect())
}

fn check_equivalence(d: usize, rounds: usize, max: i64, cases: u32) {
    let config = CoveringConfig::new(d, rounds).unwrap();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(cases));
    runner
        .run(&speeds(d, max), |z| {
            let residual = membership_residual(&z, &config).unwrap();
            let beam = beam_lattice_point(&z, &config).unwrap();
            let feather = find_feather(&z, &config).unwrap();
            let oracle = covered_oracle(&z, &config);
            prop_assert_eq!(!residual.is_empty(), oracle);
            prop_assert_eq!(beam.is_some(), oracle);
            prop_assert_eq!(feather.is_some(), oracle);
            if let Some(w) = canonical_witness(&residual) {
                prop_assert!(is_witness(&w, &z, &config));
            }
            if let Some(f) = beam {
                prop_assert!(feather_contains(&z, &f, &config.delta));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn three_membership_tests_agree() {
    for d in 1..=4 {
        for rounds in 1..=2 {
            // the feather search is a box scan, so keep the box small in high dimension
            let max = if d == 4 { 3 } else { 8 };
            check_equivalence(d, rounds, max, 1000);
        }
    }
}

#[test]
fn two_three_quarter_example() {
    let config = CoveringConfig::with_delta(2, 1, q(1, 4)).unwrap();
    let z = [q(2, 1), q(3, 1)];
    let residual = membership_residual(&z, &config).unwrap();
    assert_eq!(residual.to_string(), "{1/4} {3/4}");
    assert_eq!(canonical_witness(&residual), Some(q(1, 4)));
    assert!(is_witness(&q(3, 4), &z, &config));
    let first = beam_lattice_point(&z, &config).unwrap().unwrap();
    assert_eq!(
        first,
        FeatherIndex {
            k: vec![0, 0],
            l: 0
        }
    );
    assert!(feather_contains(
        &z,
        &FeatherIndex {
            k: vec![1, 2],
            l: 0
        },
        &config.delta
    ));
}

#[test]
fn half_point_is_not_a_witness() {
    let config = CoveringConfig::with_delta(2, 1, q(1, 4)).unwrap();
    assert!(!is_witness(&q(1, 2), &[q(2, 1), q(3, 1)], &config));
}

#[test]
fn lower_face_points_are_in_the_feather() {
    let delta = q(1, 4);
    let f = FeatherIndex {
        k: vec![1, 2],
        l: 0,
    };
    let face = feather_lower_face(&f, &delta);
    assert_eq!(face, vec![(1, q(5, 3)), (2, q(3, 1))]);
    // z₁ on its face, z₂ in range
    let z = [q(5, 3), q(37, 12)];
    assert!(on_feather_lower_face(&z, &f, &delta));
}

proptest! {
    #[test]
    fn kwai_guarantee_is_a_lower_bound(num in 4i64..400, den in 1i64..40, dd in 4i64..9) {
        let z = q(num.max(den), den);
        let delta = q(1, dd);
        let guarantee = residual_kwai_guarantee(&z, &delta).unwrap();
        let config = CoveringConfig::with_delta(1, 1, delta).unwrap();
        let residual = membership_residual(&[z], &config).unwrap();
        let longest = residual.longest_part();
        prop_assert!(longest >= guarantee, "longest {} guarantee {}", longest, guarantee);
    }

    #[test]
    fn more_rounds_cover_more(z in speeds(3, 6)) {
        let one = CoveringConfig::new(3, 1).unwrap();
        let two = CoveringConfig::new(3, 2).unwrap();
        if !membership_residual(&z, &one).unwrap().is_empty() {
            prop_assert!(!membership_residual(&z, &two).unwrap().is_empty());
        }
    }
}
