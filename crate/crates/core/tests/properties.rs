use num_complex::Complex64;
use proptest::prelude::*;

use tilespec_core::fourier::{
    character_sum, convolve, dft, idft, periodize, periodize_on, poisson_sides, weil_check,
};
use tilespec_core::group::{haar_weights, root_of_unity};
use tilespec_core::lattice::{
    all_subgroups, annihilator, covolume_product, fundamental_domain, reduce_zd,
};
use tilespec_core::snf::{smith_normal_form, IntMatrix};
use tilespec_core::tiling::{bracket_is_one, check_all, translates_orthonormal, Arithmetic};
use tilespec_core::{FunctionOnGroup, Group, Rational, SetOnGroup, Side, Subgroup};

fn groups(max: u64) -> Vec<Group> {
    Group::all_up_to(max)
}

/// Group, one of its subgroups, and a seed-derived function.
fn instance(max: u64) -> impl Strategy<Value = (Group, Subgroup, Vec<Complex64>)> {
    let gs = groups(max);
    (0..gs.len())
        .prop_flat_map(move |i| {
            let g = gs[i].clone();
            let subs = all_subgroups(&g, Side::Primal);
            let n = g.size();
            (
                Just(g),
                prop::sample::select(subs),
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
            )
        })
        .prop_map(|(g, h, v)| {
            let vals = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            (g, h, vals)
        })
}

fn weight() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![
        Rational::new(1, 1),
        Rational::new(7, 3),
        Rational::new(1, 12),
        Rational::new(5, 2),
    ])
}

fn det_bareiss(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_contract(rows in 1usize..=5, cols in 1usize..=5, seed in prop::collection::vec(-9i64..=9, 25)) {
        let a: Vec<Vec<i64>> = (0..rows).map(|i| seed[i * 5..i * 5 + cols].to_vec()).collect();
        let m = IntMatrix::from_rows(&a).unwrap();
        let s = smith_normal_form(&m).unwrap();
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert_eq!(det_bareiss(&s.u.to_rows()).abs(), 1);
        prop_assert_eq!(det_bareiss(&s.v.to_rows()).abs(), 1);
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        let inv = s.invariants();
        for w in inv.windows(2) {
            prop_assert!(w[0] >= 0 && w[1] >= 0);
            if w[0] == 0 {
                prop_assert_eq!(w[1], 0);
            } else {
                prop_assert_eq!(w[1] % w[0], 0);
            }
        }
        if rows == cols {
            let prod: i128 = inv.iter().map(|&d| d as i128).product();
            prop_assert_eq!(prod, det_bareiss(&a).abs());
        }
    }

    #[test]
    fn reduce_zd_matches_coset_oracle(seed in prop::collection::vec(-4i64..=4, 4), pts in prop::collection::vec((-6i64..=6, -6i64..=6), 1..8)) {
        let a = vec![seed[0..2].to_vec(), seed[2..4].to_vec()];
        let det = det_bareiss(&a);
        prop_assume!(det != 0);
        let omega: Vec<Vec<i64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
        let r = reduce_zd(&IntMatrix::from_rows(&a).unwrap(), &omega).unwrap();
        prop_assert_eq!(r.group.order() as i128, det.abs());
        // x ~ y iff x - y = A k for an integer k, i.e. adj(A)(x - y) = 0 mod det
        let same = |x: &[i64], y: &[i64]| {
            let (dx, dy) = ((x[0] - y[0]) as i128, (x[1] - y[1]) as i128);
            let k0 = a[1][1] as i128 * dx - a[0][1] as i128 * dy;
            let k1 = -(a[1][0] as i128) * dx + a[0][0] as i128 * dy;
            k0 % det == 0 && k1 % det == 0
        };
        let distinct = omega.iter().enumerate().all(|(i, x)| omega[i + 1..].iter().all(|y| !same(x, y)));
        let tiles = distinct && omega.len() as i128 == det.abs();
        prop_assert_eq!(r.tiles(), tiles);
        let classes = (0..omega.len())
            .filter(|&i| (0..i).all(|j| !same(&omega[i], &omega[j])))
            .count();
        prop_assert_eq!(r.image.cardinality(), classes);
    }

    #[test]
    fn plancherel_and_inversion((g, _h, v) in instance(36), w in weight()) {
        let mc = haar_weights(&g, w).unwrap();
        let f = FunctionOnGroup::new(&g, Side::Primal, v, mc).unwrap();
        let ff = dft(&f).unwrap();
        prop_assert!((f.norm_sqr() - ff.norm_sqr()).abs() <= 1e-10 * f.norm_sqr().max(1e-300));
        let back = idft(&ff).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!(close(*a, *b, 1e-10));
        }
    }

    #[test]
    fn convolution_theorem((g, _h, v) in instance(24), w in weight()) {
        let mc = haar_weights(&g, w).unwrap();
        let n = g.size();
        let f = FunctionOnGroup::new(&g, Side::Primal, v.clone(), mc).unwrap();
        let k = FunctionOnGroup::new(&g, Side::Primal, v.iter().rev().map(|z| z * Complex64::new(0.5, 1.0)).collect(), mc).unwrap();
        let lhs = dft(&convolve(&f, &k).unwrap()).unwrap();
        let (ff, fk) = (dft(&f).unwrap(), dft(&k).unwrap());
        for i in 0..n {
            prop_assert!(close(lhs.values()[i], ff.values()[i] * fk.values()[i], 1e-10));
        }
    }

    #[test]
    fn weil_and_poisson((g, h, v) in instance(24), w in weight()) {
        let mc = haar_weights(&g, w).unwrap();
        let f = FunctionOnGroup::new(&g, Side::Primal, v, mc).unwrap();
        let (l, r) = weil_check(&f, &h).unwrap();
        prop_assert!((l - r).norm() <= 1e-9);
        for (l, r) in poisson_sides(&f, &h).unwrap() {
            prop_assert!((l - r).norm() <= 1e-9);
        }
    }

    #[test]
    fn covolumes_multiply_to_one((g, h, _v) in instance(36), w in weight()) {
        let mc = haar_weights(&g, w).unwrap();
        prop_assert_eq!(covolume_product(&h, &mc).unwrap(), Rational::new(1, 1));
    }

    #[test]
    fn periodization_ignores_cross_section((g, h, v) in instance(24), shifts in prop::collection::vec(0usize..64, 24)) {
        let f = FunctionOnGroup::new(&g, Side::Primal, v, tilespec_core::MeasureConvention::counting(&g)).unwrap();
        let base = periodize(&f, &h).unwrap();
        // another cross section: each representative moved within its coset
        let moved: Vec<usize> = base
            .representatives
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let e = h.element_indices();
                g.add_index(r, e[shifts[i % shifts.len()] % e.len()])
            })
            .collect();
        let other = periodize_on(&f, &h, &SetOnGroup::from_indices(&g, moved.iter().copied())).unwrap();
        for (k, &r) in other.representatives.iter().enumerate() {
            let j = base.representatives.iter().position(|&b| h.coset_representative(b) == h.coset_representative(r)).unwrap();
            prop_assert!(close(other.values[k], base.values[j], 1e-12));
        }
    }

    #[test]
    fn bracket_matches_gram((g, h, v) in instance(24), normalize in any::<bool>()) {
        let mc = tilespec_core::MeasureConvention::counting(&g);
        let mut phi = FunctionOnGroup::new(&g, Side::Primal, v, mc).unwrap();
        if normalize {
            // rescale each H^perp coset of the transform so the bracket is 1
            let perp = annihilator(&h).unwrap();
            let mut f = dft(&phi).unwrap();
            for rep in fundamental_domain(&perp).indices() {
                let idx: Vec<usize> = perp.element_indices().iter().map(|&p| g.add_index(rep, p)).collect();
                let s: f64 = idx.iter().map(|&i| f.values()[i].norm_sqr()).sum();
                let target = g.size() as f64 / h.order() as f64;
                let k = (target / s).sqrt();
                for i in idx {
                    f.values_mut()[i] *= k;
                }
            }
            phi = idft(&f).unwrap();
        }
        let one = bracket_is_one(&phi, &h).unwrap();
        prop_assert_eq!(one, translates_orthonormal(&phi, &h).unwrap());
        prop_assert!(one || !normalize);
    }

    #[test]
    fn exact_and_float_sums_agree(i in 0usize..10_000, bits in any::<u64>()) {
        let gs = groups(60);
        let g = &gs[i % gs.len()];
        let n = g.size();
        let omega = SetOnGroup::from_indices(g, (0..n).filter(|k| bits >> (k % 64) & 1 == 1));
        prop_assume!(!omega.is_empty());
        let chi = (bits as usize).wrapping_mul(2654435761) % n;
        let exact = character_sum(&omega, chi);
        let l = g.exponent();
        let float: Complex64 = omega.indices().map(|x| root_of_unity(g.pair_exponent(chi, x), l)).sum();
        prop_assert!(close(exact.to_complex(), float, 1e-12));
        prop_assert_eq!(exact.is_zero(), float.norm() < 1e-9);
    }
}

#[test]
fn verdicts_ignore_the_measure_convention() {
    for g in groups(8) {
        let n = g.size();
        for h in all_subgroups(&g, Side::Primal) {
            for mask in 1u32..1 << n {
                let omega = SetOnGroup::from_indices(&g, (0..n).filter(|k| mask >> k & 1 == 1));
                let base = check_all(
                    &omega,
                    &h,
                    &tilespec_core::MeasureConvention::counting(&g),
                    Arithmetic::Exact,
                )
                .unwrap()
                .holds();
                for w in [Rational::new(1, n as i64), Rational::new(7, 3)] {
                    let mc = haar_weights(&g, w).unwrap();
                    assert_eq!(
                        check_all(&omega, &h, &mc, Arithmetic::Exact)
                            .unwrap()
                            .holds(),
                        base
                    );
                    assert_eq!(
                        check_all(&omega, &h, &mc, Arithmetic::Float)
                            .unwrap()
                            .holds(),
                        base
                    );
                }
            }
        }
    }
}

#[test]
fn five_way_agreement_up_to_order_8() {
    for g in groups(8) {
        let n = g.size();
        for h in all_subgroups(&g, Side::Primal) {
            for mask in 1u32..1 << n {
                let omega = SetOnGroup::from_indices(&g, (0..n).filter(|k| mask >> k & 1 == 1));
                let r = check_all(
                    &omega,
                    &h,
                    &tilespec_core::MeasureConvention::counting(&g),
                    Arithmetic::Exact,
                )
                .unwrap();
                assert!(r.consistent(), "{g} {omega} {:?}", r.holds());
            }
        }
    }
}
