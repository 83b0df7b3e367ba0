use lrc_core::intervals::{closure_of_halfopen_trim, meets_halfopen_kwais};
use lrc_core::{q, Interval, IntervalSet, Rational};
use proptest::prelude::*;

// endpoints are multiples of 1/2 in [0, 6]
fn piece() -> impl Strategy<Value = (i64, bool, i64, bool)> {
    (0i64..12, any::<bool>(), 0i64..6, any::<bool>()).prop_map(|(a, ac, w, bc)| (a, ac, a + w, bc))
}

fn pieces() -> impl Strategy<Value = Vec<(i64, bool, i64, bool)>> {
    prop::collection::vec(piece(), 0..5)
}

fn in_piece(x: &Rational, &(a, ac, b, bc): &(i64, bool, i64, bool)) -> bool {
    let (a, b) = (q(a, 2), q(b, 2));
    let left = if ac { *x >= a } else { *x > a };
    let right = if bc { *x <= b } else { *x < b };
    left && right
}

fn in_pieces(x: &Rational, ps: &[(i64, bool, i64, bool)]) -> bool {
    ps.iter().any(|p| in_piece(x, p))
}

fn build(ps: &[(i64, bool, i64, bool)]) -> IntervalSet {
    IntervalSet::from_parts(
        ps.iter()
            .filter_map(|&(a, ac, b, bc)| Interval::new(q(a, 2), ac, q(b, 2), bc)),
    )
}

// every endpoint and every midpoint between grid points
fn probes() -> Vec<Rational> {
    (-2..=28).map(|k| q(k, 4)).collect()
}

fn canonical(s: &IntervalSet) -> bool {
    s.parts().windows(2).all(|w| {
        let (l, r) = (&w[0], &w[1]);
        l.hi() < r.lo() || (l.hi() == r.lo() && !l.hi_closed() && !r.lo_closed())
    })
}

proptest! {
    #[test]
    fn union_is_pointwise_or(a in pieces(), b in pieces()) {
        let u = build(&a).union(&build(&b));
        prop_assert!(canonical(&u));
        for x in probes() {
            prop_assert_eq!(u.contains(&x), in_pieces(&x, &a) || in_pieces(&x, &b), "at {}", x);
        }
    }

    #[test]
    fn intersection_is_pointwise_and(a in pieces(), b in pieces()) {
        let s = build(&a).intersect(&build(&b));
        prop_assert!(canonical(&s));
        for x in probes() {
            prop_assert_eq!(s.contains(&x), in_pieces(&x, &a) && in_pieces(&x, &b), "at {}", x);
        }
    }

    #[test]
    fn difference_is_pointwise_and_not(a in pieces(), b in pieces()) {
        let s = build(&a).subtract(&build(&b));
        prop_assert!(canonical(&s));
        for x in probes() {
            prop_assert_eq!(s.contains(&x), in_pieces(&x, &a) && !in_pieces(&x, &b), "at {}", x);
        }
    }

    #[test]
    fn measure_is_additive(a in pieces(), b in pieces()) {
        let (a, b) = (build(&a), build(&b));
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
    }

    #[test]
    fn closure_contains_set_and_is_closed(a in pieces()) {
        let s = build(&a);
        let c = s.closure();
        prop_assert!(c.is_closed());
        for x in probes() {
            if s.contains(&x) {
                prop_assert!(c.contains(&x));
            }
        }
        prop_assert_eq!(c.measure(), s.measure());
    }

    #[test]
    fn text_round_trip(a in pieces()) {
        let s = build(&a);
        let back: IntervalSet = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn scaling_maps_points(a in pieces(), num in 1i64..5, den in 1i64..5, shift in -3i64..3) {
        let s = build(&a);
        let (f, t) = (q(num, den), q(shift, 3));
        let image = s.scale_translate(&f, &t).unwrap();
        for x in probes() {
            prop_assert_eq!(image.contains(&(&x * &f + &t)), s.contains(&x));
        }
    }

    #[test]
    fn window_meeting_matches_set_algebra(a in pieces(), zn in 9i64..40, zd in 1i64..8, dd in 3i64..8) {
        let k = build(&a).closure();
        let z = q(zn, zd);
        let delta = q(1, dd);
        // windows (m+δ, m+1−δ]/z written out for every m that can reach the set
        let top = (k.max().cloned().unwrap_or_else(Rational::zero) * &z).ceil();
        let top: i64 = top.try_into().unwrap();
        let windows = IntervalSet::from_parts((0..=top).filter_map(|m| {
            Interval::new((q(m, 1) + &delta) / &z, false, (q(m + 1, 1) - &delta) / &z, true)
        }));
        let oracle = !k.intersect(&windows).is_empty();
        prop_assert_eq!(meets_halfopen_kwais(&k, &z, &delta), oracle);
        if let Some(upper) = k.max().cloned() {
            let trimmed = closure_of_halfopen_trim(&k, &z, &delta, &upper).unwrap();
            prop_assert_eq!(trimmed, k.intersect(&windows).closure());
        }
    }
}
