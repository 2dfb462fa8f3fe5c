use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{PoleResidueForm, SIMPLE_POLE_RTOL};

/// Relative tolerance for imaginary parts of real-valued residue sums.
pub const LEAKAGE_RTOL: f64 = 1e-10;

/// Relative pole separation required between distinct operands.
pub const CLASH_RTOL: f64 = 1e-8;

pub(crate) fn pole_scale<'a>(poles: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    poles
        .into_iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

pub(crate) fn require_strictly_proper(g: &PoleResidueForm) -> Result<()> {
    if g.d() != 0.0 {
        return Err(Error::NotStrictlyProper(g.d()));
    }
    Ok(())
}

pub(crate) fn require_stable(poles: &[Complex64]) -> Result<()> {
    let scale = pole_scale(poles);
    match poles.iter().find(|p| p.re >= -1e-12 * scale) {
        Some(&p) => Err(Error::UnstablePencil(p)),
        None => Ok(()),
    }
}

pub(crate) fn require_simple_weight(w: &PoleResidueForm) -> Result<()> {
    let poles = w.poles();
    let tol = SIMPLE_POLE_RTOL * pole_scale(&poles);
    for (i, p) in poles.iter().enumerate() {
        let cluster: Vec<Complex64> = poles[i + 1..]
            .iter()
            .copied()
            .filter(|q| (q - p).norm() <= tol)
            .collect();
        if !cluster.is_empty() {
            let mut all = vec![*p];
            all.extend(cluster);
            return Err(Error::NonSimpleWeightPoles(all));
        }
    }
    Ok(())
}

/// Fails with `CommonPoles` when any pole of `a` lies within
/// `CLASH_RTOL·scale` of a pole of `b`.
pub(crate) fn require_disjoint(a: &[Complex64], b: &[Complex64], scale: f64) -> Result<()> {
    let tol = CLASH_RTOL * scale;
    for p in a {
        if let Some(q) = b.iter().find(|q| (*q - p).norm() <= tol) {
            return Err(Error::CommonPoles(*q));
        }
    }
    Ok(())
}

/// Drops the imaginary part of a sum that should be real after checking
/// it against the sum of absolute contributions.
pub(crate) fn realify(value: Complex64, abs_scale: f64) -> Result<f64> {
    let scale = abs_scale.max(value.norm());
    if value.im.abs() > LEAKAGE_RTOL * scale {
        return Err(Error::ImaginaryLeakage {
            leak: value.im.abs(),
            scale,
        });
    }
    Ok(value.re)
}

/// `|d| + Σ|φ_i|/|s − λ_i|`, the magnitude scale of an evaluation.
pub(crate) fn abs_eval(g: &PoleResidueForm, s: Complex64) -> f64 {
    g.d().abs()
        + g.terms()
            .iter()
            .map(|t| t.residue.norm() / (s - t.pole).norm())
            .sum::<f64>()
}
