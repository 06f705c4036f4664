use approx::assert_abs_diff_eq;
use minset::dyadic::{DyadicComplex, DyadicCube};
use minset::ffproj::ff_project;
use minset::geomset::{PolySet, Region};
use minset::homology::{gcd, smith_normal_form, ChainComplexZ, IntMatrix};
use minset::Point64;
use proptest::prelude::*;

fn square_set() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::btree_set((0i64..5, 0i64..5), 1..14).prop_map(|s| s.into_iter().collect())
}

fn segment() -> impl Strategy<Value = (Point64, Point64)> {
    (0.02f64..0.98, 0.02f64..0.98, 0.02f64..0.98, 0.02f64..0.98)
        .prop_filter("nondegenerate", |(a, b, c, d)| (a - c).abs() + (b - d).abs() > 1e-3)
        .prop_map(|(a, b, c, d)| (Point64::from_f64(&[a, b]), Point64::from_f64(&[c, d])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_of_boundary_vanishes(cells in square_set()) {
        let k = DyadicComplex::from_top(cells.iter().map(|(i, j)| DyadicCube::top(1, &[*i, *j]))).unwrap();
        let cx = ChainComplexZ::from_complex(&k).unwrap();
        prop_assert!(cx.verify().is_ok());
        for j in 0..cx.count(2) {
            let mut e = vec![0i64; cx.count(2)];
            e[j] = 1;
            let b = cx.boundary(2, &e).unwrap();
            prop_assert!(cx.boundary(1, &b).unwrap().iter().all(|v| *v == 0));
        }
    }

    #[test]
    fn euler_characteristic_is_preserved(cells in square_set()) {
        let k = DyadicComplex::from_top(cells.iter().map(|(i, j)| DyadicCube::top(1, &[*i, *j]))).unwrap();
        let cx = ChainComplexZ::from_complex(&k).unwrap();
        let chi: i64 = (0..=2).map(|d| (-1i64).pow(d as u32) * cx.count(d) as i64).sum();
        let rank = |d: usize| smith_normal_form(&cx.boundary_matrix(d)).unwrap().rank() as i64;
        let betti: i64 = (0..=2)
            .map(|d| {
                let r_in = if d > 0 { rank(d) } else { 0 };
                let r_out = if d < 2 { rank(d + 1) } else { 0 };
                (-1i64).pow(d as u32) * (cx.count(d) as i64 - r_in - r_out)
            })
            .sum();
        prop_assert_eq!(chi, betti);
    }

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(
        rows in 1usize..5,
        cols in 1usize..5,
        vals in prop::collection::vec(-9i64..10, 16),
    ) {
        let m = IntMatrix::from_rows(&(0..rows).map(|i| vals[i * 4..i * 4 + cols].to_vec()).collect::<Vec<_>>()).unwrap();
        let s = smith_normal_form(&m).unwrap();
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.diagonal_matrix());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(rows));
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(cols));
        prop_assert!(s.diag.iter().all(|d| *d > 0));
        prop_assert!(s.diag.windows(2).all(|w| w[1] % w[0] == 0));
        // the first invariant factor is the gcd of all entries
        let g = vals.iter().take(rows * 4).enumerate().filter(|(i, _)| i % 4 < cols).fold(0, |g, (_, v)| gcd(g, *v));
        if g != 0 {
            prop_assert_eq!(s.diag[0], g);
        }
    }

    #[test]
    fn region_and_complement_split_the_measure(
        segs in prop::collection::vec(segment(), 1..6),
        cx in 0.2f64..0.8, cy in 0.2f64..0.8, r in 0.05f64..0.5,
    ) {
        let e = PolySet::from_segments(2, &segs);
        let ball = Region::ball(Point64::from_f64(&[cx, cy]), r);
        let inside = e.measure(&ball).unwrap();
        let outside = e.measure(&ball.clone().not()).unwrap();
        assert_abs_diff_eq!(inside + outside, e.total_measure(), epsilon = 1e-12);
        prop_assert!(inside >= 0.0 && outside >= 0.0);
    }

    #[test]
    fn projection_lands_on_the_grid_and_is_idempotent(segs in prop::collection::vec(segment(), 1..5), seed in 0u64..1000) {
        let k = DyadicComplex::from_top((0..4).flat_map(|i| (0..4).map(move |j| DyadicCube::top(2, &[i, j])))).unwrap();
        let e = PolySet::from_segments(2, &segs);
        let once = ff_project(&e, &k, seed).unwrap();
        let twice = ff_project(&once.set, &k, seed).unwrap();
        assert_abs_diff_eq!(once.set.total_measure(), twice.set.total_measure(), epsilon = 1e-12);
        for s in &once.set.simplices {
            let on_line = (0..2).any(|i| s[0][i] == s[1][i] && (s[0][i] * 4.0).fract() == 0.0);
            prop_assert!(on_line, "piece {:?} is off the grid", s);
        }
    }
}
