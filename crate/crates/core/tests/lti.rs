mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use wh2_core::lti::{from_pole_residue, parse, pole_residue, serialize, StateSpace};

fn probes(seed: u64, poles: &[Complex64]) -> Vec<Complex64> {
    let mut r = common::rng(seed);
    let mut out = Vec::new();
    while out.len() < 50 {
        let s = Complex64::from_polar(10f64.powf(r.gen_range(-2.0..3.0)), r.gen_range(-3.2..3.2));
        if poles.iter().all(|p| (p - s).norm() >= 0.1) {
            out.push(s);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn state_space_and_pole_residue_agree(seed in any::<u64>(), n in 1usize..=20) {
        let sys = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        let prf = pole_residue(&sys).unwrap();
        for s in probes(seed, &prf.poles()) {
            let a = sys.tf_eval(s).unwrap();
            let b = prf.tf_eval(s).unwrap();
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()), "s = {s}: {a} vs {b}");
        }
    }

    #[test]
    fn derivative_matches_central_differences(seed in any::<u64>(), n in 1usize..=20) {
        let sys = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        let poles = sys.poles().unwrap();
        for s in probes(seed, &poles) {
            let h = 1e-5 * (1.0 + s.norm());
            let fd = (sys.tf_eval(s + h).unwrap() - sys.tf_eval(s - h).unwrap()) / (2.0 * h);
            let d = sys.tf_deriv(s).unwrap();
            prop_assert!((fd - d).norm() <= 1e-5 * d.norm().max(1e-12 * (1.0 + s.norm())), "s = {s}: {fd} vs {d}");
        }
    }

    #[test]
    fn modal_realization_round_trips(seed in any::<u64>(), n in 1usize..=20) {
        let m = common::prf(&wh2_oracle::random_modal(&mut common::rng(seed), n));
        let back = pole_residue(&from_pole_residue(&m).unwrap()).unwrap();
        prop_assert_eq!(back.order(), m.order());
        for t in m.terms() {
            let hit = back.terms().iter().any(|u| {
                (u.pole - t.pole).norm() <= 1e-9 * (1.0 + t.pole.norm())
                    && (u.residue - t.residue).norm() <= 1e-9 * (1.0 + t.residue.norm())
            });
            prop_assert!(hit, "term {t:?} lost");
        }
    }

    #[test]
    fn conjugate_arguments_give_conjugate_values(seed in any::<u64>(), n in 1usize..=20) {
        let sys = common::state_space(&wh2_oracle::random_dense_stable(&mut common::rng(seed), n));
        for s in probes(seed, &sys.poles().unwrap()) {
            let a = sys.tf_eval(s.conj()).unwrap();
            let b = sys.tf_eval(s).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>(), n in 1usize..=12, d in -1e3f64..1e3) {
        let mut r = common::rng(seed);
        let mut x = || r.gen_range(-1.0..1.0) * 10f64.powi(r.gen_range(-30..30));
        let e = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 1e-3 * x().tanh() });
        let a = DMatrix::from_fn(n, n, |_, _| x());
        let b = DVector::from_fn(n, |_, _| x());
        let c = DVector::from_fn(n, |_, _| x());
        let sys = StateSpace::new(e, a, b, c, d).unwrap();
        let back = parse(&serialize(&sys)).unwrap();
        prop_assert_eq!(back, sys);
    }
}
