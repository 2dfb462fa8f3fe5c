use num_complex::Complex64;

use super::checks::{pole_scale, require_disjoint, require_simple_weight, require_stable, require_strictly_proper};
use crate::error::Result;
use crate::lti::{PoleResidueForm, PoleTerm};

/// Relative distance to a mirrored weight pole below which the
/// cancellation-free evaluation is used.
pub const REMOVABLE_RTOL: f64 = 1e-4;

/// The map `F(s) = G(s)W(s)W(−s) + Σ_k G(−γ_k)W(−γ_k)ψ_k/(s + γ_k)`,
/// prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct FMap<'a> {
    g: &'a PoleResidueForm,
    w: &'a PoleResidueForm,
    /// Partial fractions of `u = G·W`.
    u_terms: Vec<PoleTerm>,
    /// `(c_k, ψ_k, ψ_k·u(c_k))` with `c_k = −γ_k`.
    mirrored: Vec<(Complex64, Complex64, Complex64)>,
}

impl<'a> FMap<'a> {
    pub fn new(g: &'a PoleResidueForm, w: &'a PoleResidueForm) -> Result<Self> {
        require_strictly_proper(g)?;
        let (gp, wp) = (g.poles(), w.poles());
        require_stable(&gp)?;
        require_stable(&wp)?;
        require_simple_weight(w)?;
        require_disjoint(&gp, &wp, pole_scale(gp.iter().chain(&wp)))?;
        let mut u_terms = Vec::with_capacity(g.order() + w.order());
        for t in g.terms() {
            u_terms.push(PoleTerm::new(t.pole, t.residue * w.tf_eval(t.pole)?));
        }
        for t in w.terms() {
            u_terms.push(PoleTerm::new(t.pole, t.residue * g.tf_eval(t.pole)?));
        }
        let mut mirrored = Vec::with_capacity(w.order());
        for t in w.terms() {
            let c = -t.pole;
            let uc = g.tf_eval(c)? * w.tf_eval(c)?;
            mirrored.push((c, t.residue, t.residue * uc));
        }
        Ok(Self {
            g,
            w,
            u_terms,
            mirrored,
        })
    }

    fn u(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let (gv, wv) = (self.g.tf_eval(s)?, self.w.tf_eval(s)?);
        let (gd, wd) = (self.g.tf_deriv(s)?, self.w.tf_deriv(s)?);
        Ok((gv * wv, gd * wv + gv * wd))
    }

    fn near_mirrored(&self, s: Complex64) -> Option<usize> {
        self.mirrored
            .iter()
            .position(|(c, _, _)| (s - c).norm() <= REMOVABLE_RTOL * c.norm().max(1.0))
    }

    /// Direct formula; loses accuracy next to `−γ_k`.
    pub fn eval_direct(&self, s: Complex64) -> Result<Complex64> {
        let (u, _) = self.u(s)?;
        let mut acc = u * self.w.tf_eval(-s)?;
        for &(c, _, coef) in &self.mirrored {
            acc += coef / (s - c);
        }
        Ok(acc)
    }

    /// `F(s)` and `F′(s)`.
    pub fn eval_with_deriv(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let (u, ud) = self.u(s)?;
        let Some(k) = self.near_mirrored(s) else {
            let (wm, wmd) = (self.w.tf_eval(-s)?, self.w.tf_deriv(-s)?);
            let mut f = u * wm;
            let mut fd = ud * wm - u * wmd;
            for &(c, _, coef) in &self.mirrored {
                let den = s - c;
                f += coef / den;
                fd -= coef / (den * den);
            }
            return Ok((f, fd));
        };
        // W(−s) = rest_k(−s) − ψ_k/(s − c_k), and
        // ψ_k(u(c_k) − u(s))/(s − c_k) = ψ_k Σ_m a_m/((c_k − p_m)(s − p_m)).
        let (ck, psik, _) = self.mirrored[k];
        let mut rest = Complex64::new(self.w.d(), 0.0);
        let mut rest_d = Complex64::new(0.0, 0.0);
        let mut corr = Complex64::new(0.0, 0.0);
        let mut corr_d = Complex64::new(0.0, 0.0);
        for (j, &(c, psi, coef)) in self.mirrored.iter().enumerate() {
            if j == k {
                continue;
            }
            let den = s - c;
            rest -= psi / den;
            rest_d += psi / (den * den);
            corr += coef / den;
            corr_d -= coef / (den * den);
        }
        let mut sing = Complex64::new(0.0, 0.0);
        let mut sing_d = Complex64::new(0.0, 0.0);
        for t in &self.u_terms {
            let q = t.residue / ((ck - t.pole) * (s - t.pole));
            sing += q;
            sing_d -= q / (s - t.pole);
        }
        let f = u * rest + psik * sing + corr;
        let fd = ud * rest + u * rest_d + psik * sing_d + corr_d;
        Ok((f, fd))
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.eval_with_deriv(s)?.0)
    }

    pub fn deriv(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.eval_with_deriv(s)?.1)
    }

    /// Numerical residue of `F` at each `−γ_k`, by the four-point
    /// trapezoidal contour sum of the direct formula on a small circle.
    pub fn mirrored_residues(&self) -> Result<Vec<MirroredResidue>> {
        let singular: Vec<Complex64> = self
            .u_terms
            .iter()
            .map(|t| t.pole)
            .chain(self.mirrored.iter().map(|m| m.0))
            .collect();
        let mut out = Vec::with_capacity(self.mirrored.len());
        for &(c, psi, coef) in &self.mirrored {
            let gap = singular
                .iter()
                .filter(|p| (*p - c).norm() > 0.0)
                .map(|p| (p - c).norm())
                .fold(f64::INFINITY, f64::min);
            let delta = (1e-4 * c.norm()).min(0.25 * gap);
            let mut est = Complex64::new(0.0, 0.0);
            let mut rot = Complex64::new(1.0, 0.0);
            for _ in 0..4 {
                let h = rot * delta;
                est += h * self.eval_direct(c + h)?;
                rot *= Complex64::i();
            }
            out.push(MirroredResidue {
                point: c,
                residue: est * 0.25,
                scale: coef.norm().max(psi.norm() * f64::EPSILON),
            });
        }
        Ok(out)
    }
}

/// Extracted residue of `F` at a mirrored weight pole, with the magnitude
/// of the two cancelling singular parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirroredResidue {
    pub point: Complex64,
    pub residue: Complex64,
    pub scale: f64,
}

pub fn f_map_eval(g: &PoleResidueForm, w: &PoleResidueForm, s: Complex64) -> Result<Complex64> {
    FMap::new(g, w)?.eval(s)
}

pub fn f_map_deriv(g: &PoleResidueForm, w: &PoleResidueForm, s: Complex64) -> Result<Complex64> {
    FMap::new(g, w)?.deriv(s)
}

/// Residue of `F` at every mirrored weight pole (zero up to roundoff when
/// `F` is in H2).
pub fn f_map_residues(g: &PoleResidueForm, w: &PoleResidueForm) -> Result<Vec<MirroredResidue>> {
    FMap::new(g, w)?.mirrored_residues()
}
