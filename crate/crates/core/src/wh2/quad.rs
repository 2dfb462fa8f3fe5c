use std::cell::RefCell;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::TransferFunction;
use crate::numkit::{quad_line_with, QuadOptions};

/// Breakpoints at the resonance frequencies `±|Im p|` of the given poles.
pub fn resonance_breakpoints(poles: impl IntoIterator<Item = Complex64>) -> Vec<f64> {
    let mut pts = Vec::new();
    for p in poles {
        let w = p.im.abs();
        if w > 0.0 {
            pts.push(w);
            pts.push(-w);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `(1/2π)∫|G(iω)W(iω)|²dω` with explicit quadrature options.
pub fn weighted_norm_sq_quad_with<G, W>(g: &G, w: &W, opts: &QuadOptions) -> Result<f64>
where
    G: TransferFunction + ?Sized,
    W: TransferFunction + ?Sized,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let value = quad_line_with(
        |omega| {
            let s = Complex64::new(0.0, omega);
            match (g.tf_eval(s), w.tf_eval(s)) {
                (Ok(gv), Ok(wv)) => (gv * wv).norm_sqr(),
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        opts,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value)
}

/// Weighted norm `√((1/2π)∫|G(iω)W(iω)|²dω)` by adaptive quadrature, to
/// relative accuracy `tol`. Uses transfer-function evaluations only.
pub fn weighted_norm_quad<G, W>(g: &G, w: &W, tol: f64) -> Result<f64>
where
    G: TransferFunction + ?Sized,
    W: TransferFunction + ?Sized,
{
    let bps = resonance_breakpoints(g.pole_hint().into_iter().chain(w.pole_hint()));
    let opts = QuadOptions::new(tol).with_breakpoints(bps);
    Ok(weighted_norm_sq_quad_with(g, w, &opts)?.sqrt())
}
