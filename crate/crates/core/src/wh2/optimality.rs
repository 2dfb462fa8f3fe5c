use num_complex::Complex64;

use super::fmap::FMap;
use crate::error::Result;
use crate::lti::PoleResidueForm;

/// First-order weighted optimality residuals at one reduced pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityResidual {
    pub pole: Complex64,
    /// `|F(−λ̂) − F_r(−λ̂)|`.
    pub value_abs: f64,
    pub value_rel: f64,
    /// `|F′(−λ̂) − F_r′(−λ̂)|`.
    pub deriv_abs: f64,
    pub deriv_rel: f64,
}

impl OptimalityResidual {
    pub fn max_rel(&self) -> f64 {
        self.value_rel.max(self.deriv_rel)
    }
}

fn rel(abs: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs / scale
    } else {
        abs
    }
}

/// Compares `F = 𝔉[G]` with `F_r = 𝔉[G_r]` and their derivatives at the
/// mirrored reduced poles `−λ̂_k`.
pub fn optimality_residuals(
    g: &PoleResidueForm,
    gr: &PoleResidueForm,
    w: &PoleResidueForm,
) -> Result<Vec<OptimalityResidual>> {
    let f = FMap::new(g, w)?;
    let fr = FMap::new(gr, w)?;
    let mut out = Vec::with_capacity(gr.order());
    for lam in gr.poles() {
        let s = -lam;
        let (fv, fd) = f.eval_with_deriv(s)?;
        let (rv, rd) = fr.eval_with_deriv(s)?;
        let value_abs = (fv - rv).norm();
        let deriv_abs = (fd - rd).norm();
        out.push(OptimalityResidual {
            pole: lam,
            value_abs,
            value_rel: rel(value_abs, fv.norm()),
            deriv_abs,
            deriv_rel: rel(deriv_abs, fd.norm()),
        });
    }
    Ok(out)
}
