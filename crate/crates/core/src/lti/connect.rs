use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::statespace::StateSpace;
use crate::error::{Error, Result};

/// Probe frequencies on the imaginary axis plus a few off-axis points,
/// scaled to the given magnitude.
pub fn probe_grid(scale: f64) -> Vec<Complex64> {
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut pts = Vec::new();
    for k in 0..=16 {
        let w = scale * 10f64.powf(-3.0 + 6.0 * k as f64 / 16.0);
        pts.push(Complex64::new(0.0, w));
    }
    pts.push(Complex64::new(0.0, 0.0));
    pts.push(Complex64::new(0.5 * scale, 0.3 * scale));
    pts.push(Complex64::new(2.0 * scale, -1.0 * scale));
    pts
}

/// Closed loop of plant `p` with controller `g` in the negative feedback
/// convention `u_p = r − y_g`, `u_g = y_p`, output `y = y_p`. The transfer
/// function is `P/(1 + G P)`.
pub fn feedback_connect(p: &StateSpace, g: &StateSpace) -> Result<StateSpace> {
    if !p.is_strictly_proper() {
        return Err(Error::NotStrictlyProper(p.d()));
    }
    if !g.is_strictly_proper() {
        return Err(Error::NotStrictlyProper(g.d()));
    }
    let (np, ng) = (p.order(), g.order());
    let n = np + ng;
    let mut e = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(n, n);
    e.view_mut((0, 0), (np, np)).copy_from(p.e());
    e.view_mut((np, np), (ng, ng)).copy_from(g.e());
    a.view_mut((0, 0), (np, np)).copy_from(p.a());
    a.view_mut((np, np), (ng, ng)).copy_from(g.a());
    a.view_mut((0, np), (np, ng)).copy_from(&(-(p.b() * g.c().transpose())));
    a.view_mut((np, 0), (ng, np)).copy_from(&(g.b() * p.c().transpose()));
    let mut b = DVector::zeros(n);
    b.rows_mut(0, np).copy_from(p.b());
    let mut c = DVector::zeros(n);
    c.rows_mut(0, np).copy_from(p.c());

    let scale = [p, g]
        .iter()
        .filter(|s| s.order() > 0)
        .map(|s| s.a().amax() / s.e().amax().max(f64::MIN_POSITIVE))
        .fold(1e-3, f64::max);
    for s in probe_grid(scale) {
        let (Ok(pv), Ok(gv)) = (p.tf_eval(s), g.tf_eval(s)) else {
            continue;
        };
        let ret = Complex64::new(1.0, 0.0) + gv * pv;
        if ret.norm() < 1e-12 * (1.0 + (gv * pv).norm()) {
            return Err(Error::IllPosedLoop(s));
        }
    }
    StateSpace::new(e, a, b, c, 0.0)
}

/// Controller-reduction weight `P(1 + P G)⁻¹`. For SISO systems this is the
/// same transfer function as the closed loop of [`feedback_connect`].
pub fn weight_from_loop(p: &StateSpace, g: &StateSpace) -> Result<StateSpace> {
    feedback_connect(p, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order(pole: f64) -> StateSpace {
        StateSpace::standard(
            DMatrix::from_element(1, 1, -pole),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn open_loop_with_zero_controller() {
        let p = first_order(1.0);
        let t = feedback_connect(&p, &StateSpace::constant(0.0)).unwrap();
        let s = Complex64::new(0.4, 1.1);
        assert!((t.tf_eval(s).unwrap() - p.tf_eval(s).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn closed_loop_dc_gain_and_stability() {
        let t = feedback_connect(&first_order(1.0), &first_order(2.0)).unwrap();
        let v = t.tf_eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-14);
        assert!(t.is_stable().unwrap());
        let w = weight_from_loop(&first_order(1.0), &first_order(2.0)).unwrap();
        assert!((w.tf_eval(Complex64::new(0.0, 0.0)).unwrap().re - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn proper_operands_rejected() {
        let p = first_order(1.0);
        let g = StateSpace::constant(1.0);
        assert!(matches!(feedback_connect(&p, &g), Err(Error::NotStrictlyProper(_))));
    }
}
