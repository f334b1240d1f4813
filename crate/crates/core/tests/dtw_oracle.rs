mod common;

use common::{brute_asymmetric, brute_symmetric};
use nnavg_core::dtw::{cross_distance, dtw_asymmetric, dtw_on_matrix, dtw_symmetric, DtwOptions};
use nnavg_core::Error;
use proptest::prelude::*;

fn seq() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..3).prop_map(f64::from), 1..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn symmetric_matches_enumeration(x in seq(), y in seq()) {
        let r = dtw_symmetric(&x, &y).unwrap();
        prop_assert_eq!(r.distance, brute_symmetric(&x, &y));
        prop_assert_eq!(r.distance, dtw_symmetric(&y, &x).unwrap().distance);
        prop_assert!((r.path.cost(&cross_distance(&x, &y)) - r.distance).abs() <= 1e-9 * (1.0 + r.distance));
    }

    #[test]
    fn asymmetric_matches_enumeration(x in seq(), y in seq(), ob in any::<bool>(), oe in any::<bool>()) {
        let expect = brute_asymmetric(&x, &y, ob, oe);
        match dtw_asymmetric(&x, &y, ob, oe) {
            Ok(r) => {
                prop_assert_eq!(Some(r.distance), expect);
                let rows: Vec<usize> = r.path.pairs.iter().map(|p| p.0).collect();
                prop_assert_eq!(rows, (0..x.len()).collect::<Vec<_>>());
                prop_assert!((r.path.cost(&cross_distance(&x, &y)) - r.distance).abs() <= 1e-9 * (1.0 + r.distance));
                let (p, q) = r.matched_range;
                prop_assert_eq!(r.path.pairs.first().unwrap().1, p);
                prop_assert_eq!(r.path.pairs.last().unwrap().1, q);
                for w in r.path.pairs.windows(2) {
                    prop_assert!(w[1].0 == w[0].0 + 1 && w[1].1 >= w[0].1 && w[1].1 - w[0].1 <= 2);
                }
            }
            Err(Error::InfeasibleWarping { .. }) => prop_assert_eq!(expect, None),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn constant_shift_adds_n_times_constant(x in seq(), y in seq(), c in 0.0f64..5.0) {
        let d = cross_distance(&x, &y);
        for opts in [DtwOptions::OBE, DtwOptions::ASYMMETRIC] {
            let (Ok(a), Ok(b)) = (dtw_on_matrix(&d, opts), dtw_on_matrix(&d.shifted(c), opts)) else { continue };
            let want = a.distance + c * x.len() as f64;
            prop_assert!((b.distance - want).abs() <= 1e-9 * (1.0 + want));
        }
    }

    #[test]
    fn identity_has_zero_distance(x in seq()) {
        prop_assert_eq!(dtw_symmetric(&x, &x).unwrap().distance, 0.0);
        prop_assert_eq!(dtw_asymmetric(&x, &x, false, false).unwrap().distance, 0.0);
        prop_assert_eq!(dtw_asymmetric(&x, &x, true, true).unwrap().distance, 0.0);
    }
}

#[test]
fn hand_examples() {
    assert_eq!(dtw_symmetric(&[0.0, 2.0], &[0.0]).unwrap().distance, 2.0);
    assert_eq!(dtw_symmetric(&[0.0, 1.0], &[0.0, 1.0, 2.0]).unwrap().distance, brute_symmetric(&[0.0, 1.0], &[0.0, 1.0, 2.0]));
    let r = dtw_asymmetric(&[5.0], &[1.0, 5.0, 9.0], true, true).unwrap();
    assert_eq!((r.distance, r.matched_range), (0.0, (1, 1)));
    let r = dtw_asymmetric(&[0.0, 1.0], &[0.0, 0.0, 1.0, 1.0], true, true).unwrap();
    assert_eq!(Some(r.distance), brute_asymmetric(&[0.0, 1.0], &[0.0, 0.0, 1.0, 1.0], true, true));
    let r = dtw_asymmetric(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], false, false).unwrap();
    assert_eq!(r.path.pairs, vec![(0, 0), (1, 1), (2, 2)]);
    assert_eq!(r.normalized(), 0.0);
}

#[test]
fn exhaustive_small_grid() {
    // every pair of sequences of length <= 3 over {0, 1, 2}
    let mut all = Vec::new();
    for len in 1..=3u32 {
        for code in 0..3usize.pow(len) {
            let mut c = code;
            all.push((0..len).map(|_| { let v = (c % 3) as f64; c /= 3; v }).collect::<Vec<_>>());
        }
    }
    for x in &all {
        for y in &all {
            assert_eq!(dtw_symmetric(x, y).unwrap().distance, brute_symmetric(x, y));
            for (ob, oe) in [(false, false), (true, false), (false, true), (true, true)] {
                assert_eq!(dtw_asymmetric(x, y, ob, oe).ok().map(|r| r.distance), brute_asymmetric(x, y, ob, oe));
            }
        }
    }
}
