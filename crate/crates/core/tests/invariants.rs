use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lieweyl_core::liealg::LieAlgebra;
use lieweyl_core::riemann::{self, MetricLieAlgebra};
use lieweyl_core::samples::{self, AaKind};
use lieweyl_core::weyl::{self, SolveOptions};

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_column_slice(samples::gaussian_matrix(rng, n, 1).as_slice())
}

fn roots(m: &MetricLieAlgebra) -> Vec<DVector<f64>> {
    weyl::we_solve(m, &SolveOptions::default())
        .unwrap()
        .roots
        .into_iter()
        .map(|r| r.theta)
        .collect()
}

fn same_set(a: &[DVector<f64>], b: &[DVector<f64>], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (x - y).amax() <= tol))
}

fn setup(seed: u64, dims: std::ops::RangeInclusive<usize>) -> (ChaCha8Rng, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(dims);
    (rng, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_algebras_satisfy_jacobi(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=7);
        let alg = samples::random_lie_algebra(&mut rng, n);
        prop_assert!(alg.validate().is_ok());
    }

    #[test]
    fn ad_is_a_homomorphism(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let alg = m.algebra();
        let x = random_vec(&mut rng, n);
        let y = random_vec(&mut rng, n);
        let ax = alg.ad_matrix(&x).unwrap();
        let ay = alg.ad_matrix(&y).unwrap();
        let lhs = alg.ad_matrix(&alg.bracket(&x, &y)).unwrap();
        let rhs = &ax * &ay - &ay * &ax;
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-9 * (1.0 + max_abs(&ax) * max_abs(&ay)));
    }

    #[test]
    fn structure_flags_are_basis_independent(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let alg = samples::random_lie_algebra(&mut rng, n);
        let p = samples::random_invertible(&mut rng, n);
        let moved = alg.change_basis(&p).unwrap();
        prop_assert_eq!(alg.structure_flags(), moved.structure_flags());
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let lc = riemann::levi_civita(&m);
        prop_assert!(riemann::torsion_residual(&m, &lc) <= 1e-10);
        prop_assert!(riemann::metric_compatibility_residual(&m, &lc) <= 1e-10);
    }

    #[test]
    fn riemann_tensor_symmetries(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=5);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let cd = riemann::ricci(&m).unwrap();
        let r = cd.riem.lower_last(m.metric());
        let tol = 1e-10 * (1.0 + r.max_abs());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r.get(i, j, k, l);
                        prop_assert!((v + r.get(j, i, k, l)).abs() <= tol);
                        prop_assert!((v + r.get(i, j, l, k)).abs() <= tol);
                        prop_assert!((v - r.get(k, l, i, j)).abs() <= tol);
                    }
                }
            }
        }
        prop_assert!(riemann::first_bianchi_residual(&cd.riem) <= tol);
        prop_assert!(max_abs(&(&cd.ricci - cd.ricci.transpose())) <= tol);
    }

    #[test]
    fn ricci_is_isometry_invariant(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let moved = m.change_basis(&samples::random_invertible(&mut rng, n)).unwrap();
        let a = riemann::ricci(&m).unwrap();
        let b = riemann::ricci(&moved).unwrap();
        let tol = 1e-8 * (1.0 + a.scalar.abs() + m.form_norm(&a.ricci));
        prop_assert!((a.scalar - b.scalar).abs() <= tol);
        let ea = sorted_eigs(&m.form_to_frame(&a.ricci));
        let eb = sorted_eigs(&moved.form_to_frame(&b.ricci));
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn ricci_scales_with_the_metric(seed in any::<u64>(), c in 0.2f64..5.0) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let a = riemann::ricci(&m).unwrap();
        let b = riemann::ricci(&m.rescaled(c).unwrap()).unwrap();
        let tol = 1e-9 * (1.0 + max_abs(&a.ricci));
        prop_assert!(max_abs(&(&a.ricci - &b.ricci)) <= tol);
        prop_assert!((a.scalar - c * b.scalar).abs() <= tol * (1.0 + a.scalar.abs()));
    }

    #[test]
    fn weyl_connection_invariants(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let theta = random_vec(&mut rng, n);
        let w = weyl::weyl_connection(&m, &theta).unwrap();
        prop_assert!(riemann::torsion_residual(&m, &w.table) <= 1e-10);
        for (k, ng) in riemann::nabla_metric(&m, &w.table).iter().enumerate() {
            prop_assert!(max_abs(&(ng + m.metric() * (2.0 * theta[k]))) <= 1e-10);
        }
        let ric = weyl::weyl_ricci_direct(&w).unwrap();
        let f = weyl::faraday(&m, &theta).unwrap().form;
        let skew = &ric - ric.transpose() + &f * n as f64;
        prop_assert!(max_abs(&skew) <= 1e-9 * (1.0 + max_abs(&ric)));
        let formula = weyl::weyl_ricci_formula(&w).unwrap();
        prop_assert!(max_abs(&(formula - &ric)) <= 1e-9 * (1.0 + max_abs(&ric)));
        let e = weyl::we_residual(&m, &theta).unwrap();
        prop_assert!(e.trace.abs() <= 1e-9 * (1.0 + e.norm));
    }

    #[test]
    fn faraday_vanishes_on_closed_forms(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = samples::random_metric_lie_algebra(&mut rng, n);
        let theta = random_vec(&mut rng, n);
        let f = weyl::faraday(&m, &theta).unwrap();
        let derived = m.algebra().derived_algebra();
        let annihilates = derived.ncols() == 0 || (theta.transpose() * &derived).amax() <= 1e-9 * theta.amax();
        prop_assert_eq!(f.closed, annihilates);
        prop_assert!(max_abs(&(&f.form + f.form.transpose())) <= 1e-12 * (1.0 + max_abs(&f.form)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn root_set_is_invariant_under_scaling(seed in any::<u64>(), c in 0.25f64..4.0) {
        let (mut rng, n) = setup(seed, 3..=5);
        let kind = [AaKind::Einstein, AaKind::Trace, AaKind::Generic][rng.random_range(0..3)];
        let m = samples::random_almost_abelian(&mut rng, n, kind);
        let a = roots(&m);
        let b = roots(&m.rescaled(c).unwrap());
        prop_assert!(same_set(&a, &b, 1e-6), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn root_set_transforms_with_the_basis(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=5);
        let m = samples::random_almost_abelian(&mut rng, n, AaKind::Einstein);
        let p = samples::random_invertible(&mut rng, n);
        let moved = m.change_basis(&p).unwrap();
        let a: Vec<_> = roots(&m).iter().map(|t| p.transpose() * t).collect();
        prop_assert!(same_set(&a, &roots(&moved), 1e-6));
    }

    #[test]
    fn nilpotent_algebras_have_no_roots(seed in any::<u64>()) {
        let (mut rng, n) = setup(seed, 3..=6);
        let m = if rng.random_bool(0.5) {
            samples::random_nilpotent_ad_b(&mut rng, n)
        } else {
            let p = n.div_ceil(2);
            let mut brackets = Vec::new();
            for i in 0..p {
                for j in (i + 1)..p {
                    let mut v = vec![0.0; n];
                    for slot in v.iter_mut().skip(p) {
                        *slot = rng.random_range(-2.0..2.0);
                    }
                    brackets.push((i, j, v));
                }
            }
            let alg = LieAlgebra::from_brackets(n, &brackets).unwrap();
            MetricLieAlgebra::new(alg, samples::random_spd(&mut rng, n)).unwrap()
        };
        prop_assume!(!m.algebra().structure_flags().abelian);
        prop_assert!(m.algebra().structure_flags().nilpotent);
        prop_assert!(roots(&m).is_empty());
    }
}
