mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use wh2_core::numkit::{gen_eig, lyap_residual, lyap_solve, quad_half_line, quad_line, solve_complex, QuadOptions};

fn complex_matrix(seed: u64, n: usize) -> DMatrix<Complex64> {
    let mut r = common::rng(seed);
    // Diagonally weighted so the condition number stays moderate.
    DMatrix::from_fn(n, n, |i, j| {
        let z = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if i == j {
            z + 2.0 * (n as f64).sqrt()
        } else {
            z
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_residual_is_small(seed in any::<u64>(), n in 1usize..=100) {
        let m = complex_matrix(seed, n);
        let mut r = common::rng(seed ^ 1);
        let rhs = DVector::from_fn(n, |_, _| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let x = solve_complex(&m, &rhs).unwrap();
        let res = (&m * &x - &rhs).norm();
        prop_assert!(res <= 1e-12 * m.norm() * x.norm(), "residual {res}");
    }

    #[test]
    fn eigenvalues_match_characteristic_roots(seed in any::<u64>(), n in 1usize..=5) {
        let sys = wh2_oracle::random_dense_stable(&mut common::rng(seed), n);
        let eig = gen_eig(&sys.a, &sys.e).unwrap();
        let m = sys.e.clone().try_inverse().unwrap() * &sys.a;
        let roots = wh2_oracle::poly_roots(&wh2_oracle::char_poly(&m));
        let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for lam in &eig.eigenvalues {
            let closest = roots.iter().map(|z| (z - lam).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(closest <= 1e-8 * scale, "{lam} vs {roots:?}");
            let partner = eig.eigenvalues.iter().any(|mu| *mu == lam.conj());
            prop_assert!(partner, "no conjugate for {lam}");
        }
        prop_assert!(eig.max_residual(&sys.a, &sys.e) <= 1e-10);
    }

    #[test]
    fn lyapunov_matches_kronecker_solve(seed in any::<u64>(), n in 1usize..=12) {
        let sys = wh2_oracle::random_dense_stable(&mut common::rng(seed), n);
        let q = &sys.b * sys.b.transpose() + &sys.c * sys.c.transpose();
        let p = lyap_solve(&sys.a, &sys.e, &q).unwrap();
        prop_assert!(lyap_residual(&sys.a, &sys.e, &q, &p) <= 1e-10 * q.norm());
        prop_assert!((&p - p.transpose()).norm() <= 1e-12 * p.norm());
        let oracle = wh2_oracle::kron_lyap(&sys.a, &sys.e, &q).unwrap();
        prop_assert!((&p - &oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn even_integrand_is_twice_half_line(a in 0.1f64..10.0, w0 in 0.0f64..5.0) {
        let f = |x: f64| 1.0 / ((x - w0).powi(2) + a * a) + 1.0 / ((x + w0).powi(2) + a * a);
        let opts = QuadOptions::new(1e-12).with_breakpoints([w0]);
        let full = quad_line(f, 1e-12).unwrap();
        let half = quad_half_line(f, &opts).unwrap();
        prop_assert!(common::rel(full, 2.0 * half) <= 1e-10, "{full} {half}");
        // Two Lorentzians of area π/a each.
        prop_assert!(common::rel(full, 1.0 / a) <= 1e-10, "{full}");
    }
}
