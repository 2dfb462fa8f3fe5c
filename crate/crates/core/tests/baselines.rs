mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use wh2_core::baselines::{balanced_truncation, gramians, h2_norm_gramian, hinf_grid_estimate, log_grid};
use wh2_core::lti::{from_pole_residue, Difference, PoleResidueForm, StateSpace};
use wh2_core::numkit::lyap_residual;
use wh2_core::wh2::{weighted_norm, weighted_norm_quad};

fn min_eigenvalue(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gramians_are_psd_and_solve_their_equations(seed in any::<u64>(), n in 1usize..=20) {
        let g = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        let gp = gramians(&g).unwrap();
        let bb = g.b() * g.b().transpose();
        let cc = g.c() * g.c().transpose();
        prop_assert!(lyap_residual(g.a(), g.e(), &bb, &gp.p) <= 1e-10 * bb.norm());
        let (at, et) = (g.a().transpose(), g.e().transpose());
        prop_assert!(lyap_residual(&at, &et, &cc, &gp.q) <= 1e-10 * cc.norm());
        prop_assert!(min_eigenvalue(&gp.p) >= -1e-10 * gp.p.norm());
        prop_assert!(min_eigenvalue(&gp.q) >= -1e-10 * gp.q.norm());
    }

    #[test]
    fn three_norm_paths_agree(seed in any::<u64>(), n in 1usize..=20) {
        let m = wh2_oracle::random_modal(&mut common::rng(seed), n);
        let gp = common::prf(&m);
        let g = from_pole_residue(&gp).unwrap();
        let one = PoleResidueForm::constant(1.0);
        let a = h2_norm_gramian(&g).unwrap();
        let b = weighted_norm(&gp, &one).unwrap().value;
        let c = weighted_norm_quad(&g, &StateSpace::constant(1.0), 1e-10).unwrap();
        prop_assert!(common::rel(a, b) <= 1e-6 && common::rel(b, c) <= 1e-6 && common::rel(a, c) <= 1e-6);
    }

    #[test]
    fn balanced_truncation_obeys_hankel_bound(seed in any::<u64>(), n in 3usize..=14, r in 1usize..=3) {
        let g = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        let bt = balanced_truncation(&g, r).unwrap();
        let k = bt.reduced.order();
        let bound = 2.0 * bt.hankel[k..].iter().sum::<f64>();
        let scale = g.poles().unwrap().iter().map(|p| p.norm()).fold(0.0, f64::max);
        let grid = log_grid(1e-3 * scale, 1e3 * scale, 200);
        let one = StateSpace::constant(1.0);
        let err = hinf_grid_estimate(&Difference(&g, &bt.reduced), &one, &grid).unwrap();
        let dc = (g.tf_eval(Complex64::new(0.0, 0.0)).unwrap() - bt.reduced.tf_eval(Complex64::new(0.0, 0.0)).unwrap()).norm();
        prop_assert!(err.max(dc) <= bound + 1e-8, "{err} > {bound}");
    }
}
