use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::statespace::StateSpace;
use crate::error::{Error, Result};

/// Relative pole separation below which two poles are not considered simple.
pub const SIMPLE_POLE_RTOL: f64 = 1e-8;

/// Relative tolerance used to match conjugate partners.
const CONJ_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub residue: Complex64,
}

impl PoleTerm {
    pub fn new(pole: Complex64, residue: Complex64) -> Self {
        Self { pole, residue }
    }

    pub fn real(pole: f64, residue: f64) -> Self {
        Self::new(Complex64::new(pole, 0.0), Complex64::new(residue, 0.0))
    }
}

/// Partial-fraction form `d + Σ φ_i/(s − λ_i)` with simple poles.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidueForm {
    terms: Vec<PoleTerm>,
    d: f64,
    real: bool,
}

impl PoleResidueForm {
    /// Real transfer function: the term list must be closed under
    /// conjugation. Partners are snapped to exact conjugates and the terms
    /// sorted by pole (real, imaginary).
    pub fn new(terms: Vec<PoleTerm>, d: f64) -> Result<Self> {
        let terms = canonical_conjugation(terms)?;
        let form = Self { terms, d, real: true };
        form.check_simple()?;
        Ok(form)
    }

    /// Complex-valued transfer function (no conjugation requirement), e.g.
    /// `1/(s − μ)` for complex `μ`.
    pub fn complex(terms: Vec<PoleTerm>, d: f64) -> Result<Self> {
        if terms.iter().any(|t| !(t.pole.is_finite() && t.residue.is_finite())) {
            return Err(Error::NonFinite("pole/residue"));
        }
        let form = Self { terms, d, real: false };
        form.check_simple()?;
        Ok(form)
    }

    pub fn constant(d: f64) -> Self {
        Self {
            terms: Vec::new(),
            d,
            real: true,
        }
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// Whether the term list is conjugation-closed (a real system).
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.pole).collect()
    }

    pub fn residues(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.residue).collect()
    }

    pub fn max_pole_magnitude(&self) -> f64 {
        self.terms.iter().map(|t| t.pole.norm()).fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        let scale = self.max_pole_magnitude();
        self.terms.iter().all(|t| t.pole.re < -1e-12 * scale)
    }

    fn check_simple(&self) -> Result<()> {
        let scale = self.max_pole_magnitude();
        let tol = SIMPLE_POLE_RTOL * scale;
        for (i, ti) in self.terms.iter().enumerate() {
            let cluster: Vec<Complex64> = self.terms[i + 1..]
                .iter()
                .filter(|tj| (tj.pole - ti.pole).norm() <= tol)
                .map(|tj| tj.pole)
                .collect();
            if !cluster.is_empty() {
                let mut all = vec![ti.pole];
                all.extend(cluster);
                return Err(Error::NonSimplePoles(all));
            }
        }
        Ok(())
    }

    /// `d + Σ φ_i/(s − λ_i)`.
    pub fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(self.d, 0.0);
        for t in &self.terms {
            let den = s - t.pole;
            if den.norm() <= 1e-14 * (1.0 + t.pole.norm()) {
                return Err(Error::EvalAtPole(s));
            }
            acc += t.residue / den;
        }
        Ok(acc)
    }

    /// `−Σ φ_i/(s − λ_i)²`.
    pub fn tf_deriv(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let den = s - t.pole;
            if den.norm() <= 1e-14 * (1.0 + t.pole.norm()) {
                return Err(Error::EvalAtPole(s));
            }
            acc -= t.residue / (den * den);
        }
        Ok(acc)
    }

    /// Strictly proper copy.
    pub fn without_feedthrough(&self) -> Self {
        Self { d: 0.0, ..self.clone() }
    }

    /// `k·G`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm::new(t.pole, t.residue * k))
                .collect(),
            d: self.d * k,
            real: self.real,
        }
    }

    /// `self − other` by concatenating terms. Poles of the two operands that
    /// coincide (relative distance ≤ 1e-12) are merged and cancelled terms
    /// dropped; any remaining near-coincidence fails the simple-pole
    /// certificate.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        let scale = self.max_pole_magnitude().max(other.max_pole_magnitude()).max(1.0);
        let mut terms = self.terms.clone();
        for t in &other.terms {
            if let Some(existing) = terms.iter_mut().find(|e| (e.pole - t.pole).norm() <= 1e-12 * scale) {
                existing.residue -= t.residue;
            } else {
                terms.push(PoleTerm::new(t.pole, -t.residue));
            }
        }
        let res_scale = terms.iter().map(|t| t.residue.norm()).fold(0.0, f64::max);
        let mag_self = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| t.residue.norm())
            .fold(0.0, f64::max);
        terms.retain(|t| t.residue.norm() > 1e-14 * mag_self.max(res_scale) && t.residue.norm() > 0.0);
        let d = self.d - other.d;
        if self.real && other.real {
            Self::new(terms, d)
        } else {
            Self::complex(terms, d)
        }
    }

    /// Real block-modal realization with `E = I`: 1×1 blocks for real poles
    /// and `[[α, −β], [β, α]]` blocks for each conjugate pair `α ± iβ`.
    pub fn to_state_space(&self) -> Result<StateSpace> {
        if !self.real {
            let bad = self
                .terms
                .iter()
                .find(|t| t.pole.im != 0.0 || t.residue.im != 0.0)
                .map(|t| t.pole)
                .unwrap_or_default();
            return Err(Error::ConjugationViolation(bad));
        }
        let n = self.terms.len();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        let mut c = DVector::zeros(n);
        let mut i = 0;
        let mut k = 0;
        while k < n {
            let t = self.terms[k];
            if t.pole.im == 0.0 {
                a[(i, i)] = t.pole.re;
                b[i] = 1.0;
                c[i] = t.residue.re;
                i += 1;
                k += 1;
            } else {
                // canonical order puts the negative-imaginary member first
                let upper = self.terms[k + 1];
                let (alpha, beta) = (upper.pole.re, upper.pole.im);
                let (p, q) = (upper.residue.re, upper.residue.im);
                a[(i, i)] = alpha;
                a[(i, i + 1)] = -beta;
                a[(i + 1, i)] = beta;
                a[(i + 1, i + 1)] = alpha;
                b[i] = 1.0;
                c[i] = 2.0 * p;
                c[i + 1] = -2.0 * q;
                i += 2;
                k += 2;
            }
        }
        StateSpace::standard(a, b, c, self.d)
    }
}

/// Validates conjugation closure and returns the terms in canonical order
/// (see [`crate::numkit::spectrum_order`]) with each pair `(λ̄, λ)` adjacent
/// and exactly conjugate.
fn canonical_conjugation(terms: Vec<PoleTerm>) -> Result<Vec<PoleTerm>> {
    if terms.iter().any(|t| !(t.pole.is_finite() && t.residue.is_finite())) {
        return Err(Error::NonFinite("pole/residue"));
    }
    let scale = terms
        .iter()
        .map(|t| t.pole.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let rscale = terms
        .iter()
        .map(|t| t.residue.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(terms.len());
    let mut used = vec![false; terms.len()];
    for i in 0..terms.len() {
        if used[i] {
            continue;
        }
        let t = terms[i];
        used[i] = true;
        if t.pole.im.abs() <= 1e-14 * scale {
            if t.residue.im.abs() > CONJ_RTOL * rscale.max(t.residue.norm()) {
                return Err(Error::ConjugationViolation(t.pole));
            }
            out.push(PoleTerm::new(
                Complex64::new(t.pole.re, 0.0),
                Complex64::new(t.residue.re, 0.0),
            ));
            continue;
        }
        let mut partner = None;
        let mut best = f64::INFINITY;
        for (j, u) in terms.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = (u.pole - t.pole.conj()).norm();
            if dist < best {
                best = dist;
                partner = Some(j);
            }
        }
        let j = match partner {
            Some(j) if best <= CONJ_RTOL * scale => j,
            _ => return Err(Error::ConjugationViolation(t.pole)),
        };
        let u = terms[j];
        if (u.residue - t.residue.conj()).norm() > CONJ_RTOL * rscale.max(t.residue.norm()) {
            return Err(Error::ConjugationViolation(t.pole));
        }
        used[j] = true;
        let (lower, upper) = if t.pole.im > 0.0 { (u, t) } else { (t, u) };
        let pole = (upper.pole + lower.pole.conj()) * 0.5;
        let residue = (upper.residue + lower.residue.conj()) * 0.5;
        out.push(PoleTerm::new(pole.conj(), residue.conj()));
        out.push(PoleTerm::new(pole, residue));
    }
    out.sort_by(|x, y| crate::numkit::spectrum_order(&x.pole, &y.pole));
    Ok(out)
}
