mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use wh2_core::lti::{ModalBenchmark, PoleResidueForm, StateSpace};
use wh2_core::reduce::{
    build_basis_v, build_basis_w, hermite_residuals, interpolation_residuals, irka, project, wirka, ReductionBases,
    ShiftOrigin, ShiftSet, WirkaConfig,
};

/// Conjugation-closed points in the right half-plane, `k` of them.
fn rhp_points<R: Rng>(r: &mut R, k: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(k);
    while pts.len() < k {
        if pts.len() + 2 <= k && r.gen_bool(0.6) {
            let p = Complex64::new(r.gen_range(0.1..4.0), r.gen_range(0.2..6.0));
            pts.extend([p, p.conj()]);
        } else {
            pts.push(Complex64::new(r.gen_range(0.1..4.0), 0.0));
        }
    }
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_interpolates(seed in any::<u64>(), n in 8usize..=30, r in 1usize..=6, hermite in any::<bool>()) {
        let mut rng = common::rng(seed);
        let g = common::state_space(&wh2_oracle::random_dense_stable(&mut rng, n));
        let sigma = rhp_points(&mut rng, r);
        let zeta = if hermite { sigma.clone() } else { rhp_points(&mut rng, r) };
        let s = ShiftSet::uniform(sigma.clone(), ShiftOrigin::Iterate).unwrap();
        let z = ShiftSet::uniform(zeta.clone(), ShiftOrigin::MirroredGPole).unwrap();
        let (v, w) = (build_basis_v(&g, &s).unwrap(), build_basis_w(&g, &z).unwrap());
        prop_assume!(v.rank() == r && w.rank() == r);
        let gr = project(&g, &ReductionBases::new(v.matrix, w.matrix).unwrap()).unwrap();
        prop_assert_eq!(gr.order(), r);
        let all: Vec<Complex64> = sigma.iter().chain(&zeta).copied().collect();
        for res in interpolation_residuals(&g, &gr, &all).unwrap() {
            prop_assert!(res <= 1e-8, "interpolation residual {res}");
        }
        if hermite {
            for res in hermite_residuals(&g, &gr, &sigma).unwrap() {
                prop_assert!(res <= 1e-8, "Hermite residual {res}");
            }
        }
    }

    #[test]
    fn identity_projection_is_idempotent(seed in any::<u64>(), n in 1usize..=10) {
        let g = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        let id = DMatrix::identity(n, n);
        let again = project(&g, &ReductionBases::new(id.clone(), id).unwrap()).unwrap();
        prop_assert_eq!(again, g);
    }
}

fn benchmark_pair(n: usize, p: usize, seed: u64) -> (StateSpace, StateSpace) {
    let g = ModalBenchmark::new(n, seed).build().unwrap();
    let w = ModalBenchmark::new(p, seed + 1)
        .with_damping(0.3, 0.7)
        .with_frequencies(0.5, 20.0)
        .build()
        .unwrap();
    (g, w)
}

#[test]
fn wirka_interpolates_at_every_iteration_and_keeps_provenance() {
    let (g, w) = benchmark_pair(24, 4, 11);
    let cfg = WirkaConfig::new(2, 4).with_tol(1e-8);
    let red = match wirka(&g, &w, &cfg) {
        Ok(r) => r,
        Err(wh2_core::Error::NotConverged { best: Some(b), .. }) => *b,
        Err(e) => panic!("{e}"),
    };
    let rep = &red.report;
    assert!(rep.iterations >= 1);
    assert!(
        rep.iteration_interp_residuals.iter().all(|&x| x <= 1e-8),
        "{:?}",
        rep.iteration_interp_residuals
    );
    let zeta = rep.zeta.as_ref().unwrap();
    assert!(zeta.origins().iter().all(|o| *o != ShiftOrigin::Iterate));
    assert_eq!(rep.shift_history[0].origins(), zeta.origins());
    for s in &rep.shift_history[1..] {
        assert!(s.origins().iter().all(|o| *o == ShiftOrigin::Iterate));
    }
    assert!(rep.frozen_zeta_interp_residuals.iter().all(|&x| x <= 1e-8));
}

#[test]
fn wirka_with_unit_weight_interpolates_at_mirrored_reduced_poles() {
    let g = ModalBenchmark::new(20, 5).build().unwrap();
    let one = StateSpace::constant(1.0);
    let red = wirka(&g, &one, &WirkaConfig::new(4, 0).with_tol(1e-10)).unwrap();
    assert!(red.report.converged);
    let mirrored: Vec<Complex64> = red.reduced.poles().unwrap().iter().map(|p| -p).collect();
    for res in interpolation_residuals(&g, &red.reduced, &mirrored).unwrap() {
        assert!(res <= 1e-6, "{res}");
    }
}

#[test]
fn irka_matches_brute_force_optimum() {
    // 1/((s+1)(s+2)) = 1/(s+1) − 1/(s+2)
    let g = PoleResidueForm::new(
        vec![
            wh2_core::lti::PoleTerm::real(-1.0, 1.0),
            wh2_core::lti::PoleTerm::real(-2.0, -1.0),
        ],
        0.0,
    )
    .unwrap()
    .to_state_space()
    .unwrap();
    let red = irka(&g, 1, 1e-12, 200).unwrap();
    let rp = red.reduced.pole_residue().unwrap();
    let (pole, res) = (rp.terms()[0].pole.re, rp.terms()[0].residue.re);

    let f = |s: Complex64| 1.0 / ((s + 1.0) * (s + 2.0));
    let one = |_: Complex64| Complex64::new(1.0, 0.0);
    let opt = wh2_oracle::first_order_optimum(f, one, &[0.0], 1e-2, 1e2, 1e-13);
    assert!((pole - opt.pole).abs() <= 1e-6, "{pole} vs {}", opt.pole);
    assert!((res - opt.residue).abs() <= 1e-6, "{res} vs {}", opt.residue);
}
