use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::lti::{PoleResidueForm, PoleTerm};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn first(a: f64, k: f64) -> PoleResidueForm {
    PoleResidueForm::new(vec![PoleTerm::real(-a, k)], 0.0).unwrap()
}

fn one() -> PoleResidueForm {
    PoleResidueForm::constant(1.0)
}

#[test]
fn inner_product_values() {
    let v = weighted_inner(
        &first(1.0, 1.0),
        &InnerOperand::from_prf(&first(2.0, 1.0)).unwrap(),
        &one(),
    )
    .unwrap();
    assert!((v.value.re - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(v.value.im, 0.0);

    let v = weighted_inner(&first(2.0, 1.0), &InnerOperand::double_pole(c(-1.0, 0.0)), &one()).unwrap();
    assert!((v.value.re - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(v.h_pole_terms[0].branch, Branch::Double);
    assert_eq!(v.h_pole_terms[0].h_minus2, Some(c(1.0, 0.0)));

    let g = first(1.0, 1.0);
    let v = weighted_inner(&g, &InnerOperand::from_prf(&g).unwrap(), &first(2.0, 1.0)).unwrap();
    assert!((v.value.re - 1.0 / 12.0).abs() < 1e-15);
    assert_eq!(v.w_pole_terms.len(), 1);
}

#[test]
fn inner_rejects_shared_h_w_pole() {
    let r = weighted_inner(
        &first(1.0, 1.0),
        &InnerOperand::from_prf(&first(2.0, 1.0)).unwrap(),
        &first(2.0, 1.0),
    );
    assert!(matches!(r, Err(Error::CommonPoles(_))));
}

#[test]
fn laurent_order_three_rejected() {
    let r = InnerOperand::from_laurent(vec![(c(-1.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)])]);
    assert!(matches!(r, Err(Error::UnsupportedMultiplicity(_))));
}

#[test]
fn norm_values() {
    let g = first(1.0, 1.0);
    assert!((weighted_norm(&g, &one()).unwrap().value - 0.5f64.sqrt()).abs() < 1e-15);
    let two = PoleResidueForm::constant(2.0);
    assert!((weighted_norm(&g, &two).unwrap().value - 2f64.sqrt()).abs() < 1e-15);
    let n = weighted_norm(&g, &first(2.0, 1.0)).unwrap();
    assert!((n.value - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    assert!((n.g_pole_terms[0].contribution.re - 1.0 / 6.0).abs() < 1e-15);
    assert!((n.w_pole_terms[0].contribution.re + 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn norm_requires_strictly_proper_g() {
    let g = PoleResidueForm::new(vec![PoleTerm::real(-1.0, 1.0)], 0.5).unwrap();
    assert!(matches!(weighted_norm(&g, &one()), Err(Error::NotStrictlyProper(_))));
}

#[test]
fn f_map_values() {
    let g = first(1.0, 1.0);
    let w = first(2.0, 1.0);
    for s in [c(0.3, 0.0), c(2.0, 1.0), c(-0.5, 4.0)] {
        let f = f_map_eval(&g, &one(), s).unwrap();
        assert!((f - g.tf_eval(s).unwrap()).norm() < 1e-15);
    }
    let f = f_map_eval(&g, &w, c(3.0, 0.0)).unwrap();
    assert!((f - c(1.0 / 30.0, 0.0)).norm() < 1e-15);

    // removable point s = 2 against a nearby direct evaluation
    let fm = FMap::new(&g, &w).unwrap();
    let at = fm.eval(c(2.0, 0.0)).unwrap();
    assert!(at.is_finite());
    let near = fm.eval_direct(c(2.0 + 1e-3, 0.0)).unwrap();
    assert!((at - near).norm() < 1e-3 * at.norm().max(1e-3));
}

#[test]
fn f_map_paths_agree_at_switch_boundary() {
    let g = PoleResidueForm::new(
        vec![
            PoleTerm::new(c(-0.5, 3.0), c(1.0, 0.4)),
            PoleTerm::new(c(-0.5, -3.0), c(1.0, -0.4)),
            PoleTerm::real(-2.0, 0.7),
        ],
        0.0,
    )
    .unwrap();
    let w = PoleResidueForm::new(
        vec![
            PoleTerm::new(c(-1.0, 1.5), c(0.3, -0.2)),
            PoleTerm::new(c(-1.0, -1.5), c(0.3, 0.2)),
        ],
        0.1,
    )
    .unwrap();
    let fm = FMap::new(&g, &w).unwrap();
    let s = c(1.0, 1.5) + c(0.0, 2e-4 * 1.8);
    let direct = fm.eval_direct(s).unwrap();
    let s_in = c(1.0, 1.5) + c(0.0, 0.9e-4 * 1.8);
    let (stable, _) = fm.eval_with_deriv(s_in).unwrap();
    // both sides close to the same limit; separation of the two points is
    // about 2e-4 so the values differ by O(2e-4·|F′|)
    let fd = fm.deriv(s).unwrap().norm();
    assert!((direct - stable).norm() < 1e-3 * fd + 1e-10);
}

#[test]
fn f_map_derivative_matches_finite_difference() {
    let g = first(1.0, 1.0);
    let w = first(2.0, 1.0);
    let fm = FMap::new(&g, &w).unwrap();
    let s = c(3.0, 0.0);
    let h = 1e-6 * 4.0;
    let fd = (fm.eval(s + h).unwrap() - fm.eval(s - h).unwrap()) / (2.0 * h);
    assert!((fd - fm.deriv(s).unwrap()).norm() < 1e-6);
    for s in [c(2.0, 0.0), c(2.00005, 0.0)] {
        let fd = (fm.eval(s + 1e-5).unwrap() - fm.eval(s - 1e-5).unwrap()) / 2e-5;
        assert!((fd - fm.deriv(s).unwrap()).norm() < 1e-6 * fd.norm().max(1.0));
    }
}

#[test]
fn double_pole_inner_through_f_derivative() {
    let g = first(1.0, 1.0);
    let w = first(2.0, 1.0);
    let mu = c(-3.0, 0.0);
    let lhs = weighted_inner(&g, &InnerOperand::double_pole(mu), &w).unwrap().value;
    let rhs = -f_map_deriv(&g, &w, -mu).unwrap();
    assert!((lhs - rhs).norm() < 1e-14);
    let lhs = weighted_inner(&g, &InnerOperand::simple_pole(mu), &w).unwrap().value;
    let rhs = f_map_eval(&g, &w, -mu).unwrap();
    assert!((lhs - rhs).norm() < 1e-14);
}

#[test]
fn f_map_has_no_residue_at_mirrored_weight_poles() {
    let g = first(1.0, 1.0);
    let w = PoleResidueForm::new(
        vec![
            PoleTerm::new(c(-1.0, 1.5), c(0.3, -0.2)),
            PoleTerm::new(c(-1.0, -1.5), c(0.3, 0.2)),
            PoleTerm::real(-2.0, 1.0),
        ],
        0.0,
    )
    .unwrap();
    for r in f_map_residues(&g, &w).unwrap() {
        assert!(r.residue.norm() <= 1e-8 * r.scale, "{r:?}");
    }
}

#[test]
fn error_expression_matches_difference_norm() {
    let g = first(1.0, 1.0);
    let gr = first(1.1, 0.9);
    let w = first(2.0, 1.0);
    let e = weighted_error_expr(&g, &gr, &w).unwrap();
    let n = weighted_norm(&g.difference(&gr).unwrap(), &w).unwrap();
    assert!((e.total - n.radicand).abs() <= 1e-12 * n.radicand);
}

#[test]
fn error_expression_near_copy() {
    let g = PoleResidueForm::new(vec![PoleTerm::real(-1.0, 1.0), PoleTerm::real(-3.0, 1.0)], 0.0).unwrap();
    let gr = first(1.0001, 1.0);
    let e = weighted_error_expr(&g, &gr, &one()).unwrap();
    assert!((e.total - 1.0 / 6.0).abs() < 1e-3);
}

#[test]
fn error_expression_copy_falls_back() {
    let g = PoleResidueForm::new(vec![PoleTerm::real(-1.0, 1.0), PoleTerm::real(-3.0, 1.0)], 0.0).unwrap();
    assert!(matches!(
        weighted_error_expr(&g, &g, &one()),
        Err(Error::CommonPoles(_))
    ));
    let e = weighted_error(&g, &g, &one(), 1e-8).unwrap();
    assert_eq!(e.path, ErrorPath::DifferenceNorm);
    assert_eq!(e.value_sq, 0.0);
    assert!(e.is_flagged());
}

#[test]
fn error_with_reduced_pole_on_weight_pole_uses_quadrature() {
    let g = first(1.0, 1.0);
    let gr = first(2.0, 0.5);
    let w = first(2.0, 1.0);
    let e = weighted_error(&g, &gr, &w, 1e-10).unwrap();
    assert_eq!(e.path, ErrorPath::Quadrature);
    // (G − G_r)W = 1/((s+1)(s+2)) − 0.5/(s+2)²; impulse response
    // e^{−t} − e^{−2t} − t·e^{−2t}/2, whose squared L2 norm is 49/1152
    assert!((e.value_sq - 49.0 / 1152.0).abs() < 1e-9);
}

#[test]
fn quadrature_norm_values() {
    let g = first(1.0, 1.0);
    assert!((weighted_norm_quad(&g, &one(), 1e-10).unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
    let w = first(2.0, 1.0);
    assert!((weighted_norm_quad(&g, &w, 1e-10).unwrap() - (1.0f64 / 12.0).sqrt()).abs() < 1e-10);
    let two = PoleResidueForm::constant(2.0);
    assert!((weighted_norm_quad(&g, &two, 1e-10).unwrap() - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn optimality_residuals_vanish_for_identical_systems() {
    let g = PoleResidueForm::new(vec![PoleTerm::real(-1.0, 1.0), PoleTerm::real(-3.0, 2.0)], 0.0).unwrap();
    let ss = g.to_state_space().unwrap();
    let gr = ss.pole_residue().unwrap();
    let w = first(2.0, 1.0);
    for r in optimality_residuals(&g, &gr, &w).unwrap() {
        assert!(r.max_rel() < 1e-10, "{r:?}");
    }
}
