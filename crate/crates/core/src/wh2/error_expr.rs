use num_complex::Complex64;

use super::checks::{
    pole_scale, realify, require_disjoint, require_simple_weight, require_stable, require_strictly_proper,
};
use super::inner::{weighted_norm, PoleContribution};
use super::quad::{resonance_breakpoints, weighted_norm_quad, weighted_norm_sq_quad_with};
use crate::error::{Error, Result};
use crate::lti::{Difference, PoleResidueForm, TransferFunction};
use crate::numkit::QuadOptions;

/// Squared weighted error split by the pole set each term belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBreakdown {
    pub total: f64,
    /// Terms at the poles `λ_i` of `G`.
    pub sum1_terms: Vec<PoleContribution>,
    /// Terms at the poles `λ̂_j` of `G_r`.
    pub sum2_terms: Vec<PoleContribution>,
    /// Terms at the poles `γ_k` of `W`.
    pub sum3_terms: Vec<PoleContribution>,
    /// Roundoff scale: the same sums with each factor `G − G_r` replaced by
    /// `|G| + |G_r|` and all terms taken in magnitude.
    pub scale: f64,
}

impl ErrorBreakdown {
    fn sum(terms: &[PoleContribution]) -> Complex64 {
        terms.iter().map(|t| t.contribution).sum()
    }

    pub fn sum1(&self) -> Complex64 {
        Self::sum(&self.sum1_terms)
    }

    pub fn sum2(&self) -> Complex64 {
        Self::sum(&self.sum2_terms)
    }

    pub fn sum3(&self) -> Complex64 {
        Self::sum(&self.sum3_terms)
    }

    /// Sum of the magnitudes of all terms.
    pub fn abs_scale(&self) -> f64 {
        self.sum1_terms
            .iter()
            .chain(&self.sum2_terms)
            .chain(&self.sum3_terms)
            .map(|t| t.contribution.norm())
            .sum()
    }
}

/// `‖G − G_r‖_W²` from residues at the poles of `G`, `G_r` and `W`, which
/// must be pairwise distinct.
pub fn weighted_error_expr(g: &PoleResidueForm, gr: &PoleResidueForm, w: &PoleResidueForm) -> Result<ErrorBreakdown> {
    require_strictly_proper(g)?;
    require_strictly_proper(gr)?;
    let (gp, rp, wp) = (g.poles(), gr.poles(), w.poles());
    require_stable(&gp)?;
    require_stable(&rp)?;
    require_stable(&wp)?;
    require_simple_weight(w)?;
    let scale = pole_scale(gp.iter().chain(&rp).chain(&wp));
    require_disjoint(&rp, &gp, scale)?;
    require_disjoint(&rp, &wp, scale)?;
    require_disjoint(&gp, &wp, scale)?;

    let mut scale = 0.0;
    let mut err = |s: Complex64, weight: f64| -> Result<Complex64> {
        let (a, b) = (g.tf_eval(s)?, gr.tf_eval(s)?);
        scale += (a.norm() + b.norm()) * weight;
        Ok(a - b)
    };
    let mut sum1 = Vec::with_capacity(g.order());
    for t in g.terms() {
        let lam = t.pole;
        let k = w.tf_eval(-lam)? * w.tf_eval(lam)? * t.residue;
        let contribution = err(-lam, k.norm())? * k;
        sum1.push(PoleContribution {
            pole: lam,
            contribution,
        });
    }
    let mut sum2 = Vec::with_capacity(gr.order());
    for t in gr.terms() {
        let lam = t.pole;
        let k = w.tf_eval(-lam)? * w.tf_eval(lam)? * t.residue;
        let contribution = -err(-lam, k.norm())? * k;
        sum2.push(PoleContribution {
            pole: lam,
            contribution,
        });
    }
    let mut sum3 = Vec::with_capacity(w.order());
    for t in w.terms() {
        let gam = t.pole;
        let k = w.tf_eval(-gam)? * t.residue;
        let (ep, em) = (g.tf_eval(gam)?, gr.tf_eval(gam)?);
        let contribution = err(-gam, k.norm() * (ep.norm() + em.norm()))? * k * (ep - em);
        sum3.push(PoleContribution {
            pole: gam,
            contribution,
        });
    }
    let mut out = ErrorBreakdown {
        total: 0.0,
        sum1_terms: sum1,
        sum2_terms: sum2,
        sum3_terms: sum3,
        scale: 0.0,
    };
    let value = out.sum1() + out.sum2() + out.sum3();
    let scale = scale.max(out.abs_scale());
    out.scale = scale;
    out.total = if g.is_real() && gr.is_real() && w.is_real() {
        realify(value, scale)?
    } else {
        value.re
    };
    if out.total < -1e-10 * scale {
        return Err(Error::NegativeRadicand {
            radicand: out.total,
            scale,
        });
    }
    Ok(out)
}

/// How a squared weighted error was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorPath {
    /// Three-sum residue expression.
    Expression,
    /// Weighted norm of the concatenated difference system.
    DifferenceNorm,
    /// Frequency-domain quadrature.
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct WeightedError {
    /// Squared weighted error.
    pub value_sq: f64,
    pub path: ErrorPath,
    pub breakdown: Option<ErrorBreakdown>,
    /// Failures of the preferred paths, in the order they were tried.
    pub fallbacks: Vec<Error>,
}

impl WeightedError {
    pub fn value(&self) -> f64 {
        self.value_sq.max(0.0).sqrt()
    }

    pub fn is_flagged(&self) -> bool {
        self.path != ErrorPath::Expression
    }
}

/// Squared weighted error, falling back from the residue expression to the
/// difference-system norm and then to quadrature (relative tolerance
/// `quad_tol`) when poles clash.
pub fn weighted_error(
    g: &PoleResidueForm,
    gr: &PoleResidueForm,
    w: &PoleResidueForm,
    quad_tol: f64,
) -> Result<WeightedError> {
    let mut fallbacks = Vec::new();
    match weighted_error_expr(g, gr, w) {
        Ok(b) => {
            return Ok(WeightedError {
                value_sq: b.total,
                path: ErrorPath::Expression,
                breakdown: Some(b),
                fallbacks,
            })
        }
        Err(e @ (Error::CommonPoles(_) | Error::NegativeRadicand { .. } | Error::ImaginaryLeakage { .. })) => {
            fallbacks.push(e)
        }
        Err(e) => return Err(e),
    }
    let diff = g.difference(gr);
    let attempt = diff.as_ref().map_err(Clone::clone).and_then(|d| weighted_norm(d, w));
    match attempt {
        Ok(n) => {
            return Ok(WeightedError {
                value_sq: n.radicand.max(0.0),
                path: ErrorPath::DifferenceNorm,
                breakdown: None,
                fallbacks,
            })
        }
        Err(e) => fallbacks.push(e),
    }
    let v = weighted_error_quad(g, gr, w, quad_tol)?;
    Ok(WeightedError {
        value_sq: v * v,
        path: ErrorPath::Quadrature,
        breakdown: None,
        fallbacks,
    })
}

/// `‖G − G_r‖_W` by quadrature of transfer-function values only.
///
/// Errors below about `100·eps·(‖G‖_W + ‖G_r‖_W)` are not resolved: the
/// integral of the squared difference gets an absolute floor at that level.
pub fn weighted_error_quad<G, R, W>(g: &G, gr: &R, w: &W, tol: f64) -> Result<f64>
where
    G: TransferFunction + ?Sized,
    R: TransferFunction + ?Sized,
    W: TransferFunction + ?Sized,
{
    let scale = weighted_norm_quad(g, w, tol)? + weighted_norm_quad(gr, w, tol)?;
    let floor = (100.0 * f64::EPSILON * scale).powi(2);
    let bps = resonance_breakpoints(g.pole_hint().into_iter().chain(gr.pole_hint()).chain(w.pole_hint()));
    let opts = QuadOptions::new(tol).with_breakpoints(bps).with_abs_tol(floor);
    Ok(weighted_norm_sq_quad_with(&Difference(g, gr), w, &opts)?.sqrt())
}
