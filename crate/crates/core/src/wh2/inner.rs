use num_complex::Complex64;

use super::checks::{
    abs_eval, pole_scale, realify, require_disjoint, require_simple_weight, require_stable, require_strictly_proper,
};
use crate::error::{Error, Result};
use crate::lti::{PoleResidueForm, SIMPLE_POLE_RTOL};

/// One pole of an inner-product operand: `residue/(s − pole) + h2/(s − pole)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentTerm {
    pub pole: Complex64,
    pub residue: Complex64,
    /// Coefficient of the second-order part; zero for a simple pole.
    pub h2: Complex64,
}

impl LaurentTerm {
    pub fn is_double(&self) -> bool {
        self.h2 != Complex64::new(0.0, 0.0)
    }
}

/// Strictly proper operand `H` of a weighted inner product, with poles of
/// order at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerOperand {
    terms: Vec<LaurentTerm>,
    real: bool,
}

impl InnerOperand {
    pub fn from_prf(h: &PoleResidueForm) -> Result<Self> {
        require_strictly_proper(h)?;
        Ok(Self {
            terms: h
                .terms()
                .iter()
                .map(|t| LaurentTerm {
                    pole: t.pole,
                    residue: t.residue,
                    h2: Complex64::new(0.0, 0.0),
                })
                .collect(),
            real: h.is_real(),
        })
    }

    /// `1/(s − μ)`.
    pub fn simple_pole(mu: Complex64) -> Self {
        Self {
            terms: vec![LaurentTerm {
                pole: mu,
                residue: Complex64::new(1.0, 0.0),
                h2: Complex64::new(0.0, 0.0),
            }],
            real: mu.im == 0.0,
        }
    }

    /// `1/(s − μ)²`.
    pub fn double_pole(mu: Complex64) -> Self {
        Self {
            terms: vec![LaurentTerm {
                pole: mu,
                residue: Complex64::new(0.0, 0.0),
                h2: Complex64::new(1.0, 0.0),
            }],
            real: mu.im == 0.0,
        }
    }

    /// Builds `Σ_k Σ_j c_kj/(s − μ_k)^(j+1)` from Laurent coefficient lists
    /// `(μ_k, [c_k0, c_k1, ...])`. Trailing zero coefficients are ignored.
    pub fn from_laurent(parts: Vec<(Complex64, Vec<Complex64>)>) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let scale = pole_scale(parts.iter().map(|(p, _)| p));
        let mut terms = Vec::with_capacity(parts.len());
        for (i, (pole, coeffs)) in parts.iter().enumerate() {
            if !pole.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("Laurent coefficients"));
            }
            if coeffs.iter().skip(2).any(|c| *c != zero) {
                return Err(Error::UnsupportedMultiplicity(*pole));
            }
            if let Some((q, _)) = parts[i + 1..]
                .iter()
                .find(|(q, _)| (q - pole).norm() <= SIMPLE_POLE_RTOL * scale)
            {
                return Err(Error::NonSimplePoles(vec![*pole, *q]));
            }
            terms.push(LaurentTerm {
                pole: *pole,
                residue: coeffs.first().copied().unwrap_or(zero),
                h2: coeffs.get(1).copied().unwrap_or(zero),
            });
        }
        let real = terms.iter().all(|t| {
            t.pole.im == 0.0 && t.residue.im == 0.0 && t.h2.im == 0.0
                || terms
                    .iter()
                    .any(|u| u.pole == t.pole.conj() && u.residue == t.residue.conj() && u.h2 == t.h2.conj())
        });
        Ok(Self { terms, real })
    }

    pub fn terms(&self) -> &[LaurentTerm] {
        &self.terms
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.pole).collect()
    }

    pub fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let den = s - t.pole;
            if den.norm() <= 1e-14 * (1.0 + t.pole.norm()) {
                return Err(Error::EvalAtPole(s));
            }
            acc += t.residue / den + t.h2 / (den * den);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Simple,
    Double,
}

/// Contribution of one pole of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoleTerm {
    pub pole: Complex64,
    pub contribution: Complex64,
    pub branch: Branch,
    /// Second-order Laurent coefficient used by the double branch.
    pub h_minus2: Option<Complex64>,
}

/// Contribution attached to one pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleContribution {
    pub pole: Complex64,
    pub contribution: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductBreakdown {
    /// Sum of all contributions. For real operands the imaginary part has
    /// been checked and set to zero.
    pub value: Complex64,
    pub h_pole_terms: Vec<HPoleTerm>,
    pub w_pole_terms: Vec<PoleContribution>,
}

impl InnerProductBreakdown {
    pub fn abs_scale(&self) -> f64 {
        self.h_pole_terms.iter().map(|t| t.contribution.norm()).sum::<f64>()
            + self.w_pole_terms.iter().map(|t| t.contribution.norm()).sum::<f64>()
    }
}

/// `K(s) = G(s)W(s)W(−s)` and its derivative.
pub(crate) fn kernel(g: &PoleResidueForm, w: &PoleResidueForm, s: Complex64) -> Result<(Complex64, Complex64)> {
    let (gv, gd) = (g.tf_eval(s)?, g.tf_deriv(s)?);
    let (wv, wd) = (w.tf_eval(s)?, w.tf_deriv(s)?);
    let (wm, wmd) = (w.tf_eval(-s)?, w.tf_deriv(-s)?);
    let value = gv * wv * wm;
    let deriv = gd * wv * wm + gv * wd * wm - gv * wv * wmd;
    Ok((value, deriv))
}

/// Weighted inner product `(1/2π)∫ G(iω)W(iω)·H(−iω)W(−iω) dω` by residues
/// at the poles of `H` and of `W`.
pub fn weighted_inner(g: &PoleResidueForm, h: &InnerOperand, w: &PoleResidueForm) -> Result<InnerProductBreakdown> {
    require_strictly_proper(g)?;
    let (gp, hp, wp) = (g.poles(), h.poles(), w.poles());
    require_stable(&gp)?;
    require_stable(&hp)?;
    require_stable(&wp)?;
    require_simple_weight(w)?;
    let scale = pole_scale(gp.iter().chain(&hp).chain(&wp));
    require_disjoint(&hp, &wp, scale)?;

    let mut abs_scale = 0.0;
    let mut h_terms = Vec::with_capacity(h.terms().len());
    for t in h.terms() {
        let mu = t.pole;
        let (k, kd) = kernel(g, w, -mu)?;
        let simple = k * t.residue;
        let ww = w.tf_eval(-mu)? * w.tf_eval(mu)?;
        abs_scale += abs_eval(g, -mu) * ww.norm() * t.residue.norm() + kd.norm() * t.h2.norm();
        let (contribution, branch, h_minus2) = if t.is_double() {
            (simple - t.h2 * kd, Branch::Double, Some(t.h2))
        } else {
            (simple, Branch::Simple, None)
        };
        h_terms.push(HPoleTerm {
            pole: mu,
            contribution,
            branch,
            h_minus2,
        });
    }
    let mut w_terms = Vec::with_capacity(w.order());
    for t in w.terms() {
        let gam = t.pole;
        let k = w.tf_eval(-gam)? * h.tf_eval(gam)? * t.residue;
        abs_scale += abs_eval(g, -gam) * k.norm();
        let contribution = g.tf_eval(-gam)? * k;
        w_terms.push(PoleContribution {
            pole: gam,
            contribution,
        });
    }
    let mut out = InnerProductBreakdown {
        value: h_terms.iter().map(|t| t.contribution).sum::<Complex64>()
            + w_terms.iter().map(|t| t.contribution).sum::<Complex64>(),
        h_pole_terms: h_terms,
        w_pole_terms: w_terms,
    };
    if g.is_real() && h.is_real() && w.is_real() {
        out.value = Complex64::new(realify(out.value, abs_scale.max(out.abs_scale()))?, 0.0);
    }
    Ok(out)
}

/// Weighted norm with its residue contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNorm {
    pub value: f64,
    /// Real part of the residue sum before the square root.
    pub radicand: f64,
    /// Roundoff scale of the radicand (sum of term magnitudes with every
    /// evaluation of `G` replaced by its absolute partial-fraction sum).
    pub scale: f64,
    pub g_pole_terms: Vec<PoleContribution>,
    pub w_pole_terms: Vec<PoleContribution>,
}

impl WeightedNorm {
    pub fn abs_scale(&self) -> f64 {
        self.g_pole_terms.iter().map(|t| t.contribution.norm()).sum::<f64>()
            + self.w_pole_terms.iter().map(|t| t.contribution.norm()).sum::<f64>()
    }
}

/// `‖G‖_W² = Σ_k G(−λ_k)W(−λ_k)W(λ_k)φ_k + Σ_k G(−γ_k)W(−γ_k)G(γ_k)ψ_k`.
pub fn weighted_norm(g: &PoleResidueForm, w: &PoleResidueForm) -> Result<WeightedNorm> {
    require_strictly_proper(g)?;
    let (gp, wp) = (g.poles(), w.poles());
    require_stable(&gp)?;
    require_stable(&wp)?;
    require_simple_weight(w)?;
    let scale = pole_scale(gp.iter().chain(&wp));
    require_disjoint(&gp, &wp, scale)?;

    let mut abs_scale = 0.0;
    let mut g_terms = Vec::with_capacity(g.order());
    for t in g.terms() {
        let lam = t.pole;
        let k = w.tf_eval(-lam)? * w.tf_eval(lam)? * t.residue;
        abs_scale += abs_eval(g, -lam) * k.norm();
        let contribution = g.tf_eval(-lam)? * k;
        g_terms.push(PoleContribution {
            pole: lam,
            contribution,
        });
    }
    let mut w_terms = Vec::with_capacity(w.order());
    for t in w.terms() {
        let gam = t.pole;
        let k = w.tf_eval(-gam)? * t.residue;
        abs_scale += abs_eval(g, -gam) * abs_eval(g, gam) * k.norm();
        let contribution = g.tf_eval(-gam)? * g.tf_eval(gam)? * k;
        w_terms.push(PoleContribution {
            pole: gam,
            contribution,
        });
    }
    let sum: Complex64 = g_terms.iter().chain(&w_terms).map(|t| t.contribution).sum();
    let radicand = if g.is_real() && w.is_real() {
        realify(sum, abs_scale)?
    } else {
        sum.re
    };
    if radicand < -1e-10 * abs_scale {
        return Err(Error::NegativeRadicand {
            radicand,
            scale: abs_scale,
        });
    }
    Ok(WeightedNorm {
        value: radicand.max(0.0).sqrt(),
        radicand,
        scale: abs_scale,
        g_pole_terms: g_terms,
        w_pole_terms: w_terms,
    })
}
