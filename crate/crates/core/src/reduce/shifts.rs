use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::spectrum_order;

/// Where an interpolation point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftOrigin {
    MirroredGPole,
    MirroredWPole,
    Iterate,
}

impl ShiftOrigin {
    pub fn tag(&self) -> &'static str {
        match self {
            ShiftOrigin::MirroredGPole => "mirrored_G_pole",
            ShiftOrigin::MirroredWPole => "mirrored_W_pole",
            ShiftOrigin::Iterate => "iterate",
        }
    }
}

/// Conjugation-closed multiset of interpolation points with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSet {
    points: Vec<Complex64>,
    origins: Vec<ShiftOrigin>,
}

const CONJ_RTOL: f64 = 1e-10;

impl ShiftSet {
    pub fn new(points: Vec<Complex64>, origins: Vec<ShiftOrigin>) -> Result<Self> {
        if points.len() != origins.len() {
            return Err(Error::Dimension(format!(
                "{} shifts with {} provenance tags",
                points.len(),
                origins.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("shift"));
        }
        let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let tol = CONJ_RTOL * scale.max(f64::MIN_POSITIVE);
        let mut points = points;
        for i in 0..points.len() {
            let p = points[i];
            if p.im.abs() <= tol {
                points[i] = Complex64::new(p.re, 0.0);
                continue;
            }
            let partners = points.iter().filter(|q| (*q - p.conj()).norm() <= tol).count();
            let same = points.iter().filter(|q| (*q - p).norm() <= tol).count();
            if partners != same {
                return Err(Error::ConjugationViolation(p));
            }
        }
        Ok(Self { points, origins })
    }

    /// All points tagged with the same origin.
    pub fn uniform(points: Vec<Complex64>, origin: ShiftOrigin) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![origin; n])
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn origins(&self) -> &[ShiftOrigin] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in canonical (real, imaginary) order.
    pub fn sorted_points(&self) -> Vec<Complex64> {
        let mut v = self.points.clone();
        v.sort_by(spectrum_order);
        v
    }

    /// `‖sort(self) − sort(previous)‖₂ / ‖sort(previous)‖₂`; infinite when
    /// the sizes differ.
    pub fn relative_change(&self, previous: &ShiftSet) -> f64 {
        if self.len() != previous.len() {
            return f64::INFINITY;
        }
        let (a, b) = (self.sorted_points(), previous.sorted_points());
        let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        if den == 0.0 {
            if num == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (num / den).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_enforced() {
        let c = Complex64::new;
        assert!(ShiftSet::uniform(vec![c(1.0, 2.0)], ShiftOrigin::Iterate).is_err());
        assert!(ShiftSet::uniform(vec![c(1.0, 2.0), c(1.0, -2.0), c(3.0, 0.0)], ShiftOrigin::Iterate).is_ok());
        assert!(ShiftSet::uniform(vec![c(1.0, 2.0), c(1.0, 2.0), c(1.0, -2.0)], ShiftOrigin::Iterate).is_err());
    }

    #[test]
    fn change_ignores_order() {
        let c = Complex64::new;
        let a = ShiftSet::uniform(vec![c(1.0, 0.0), c(2.0, 0.0)], ShiftOrigin::Iterate).unwrap();
        let b = ShiftSet::uniform(vec![c(2.0, 0.0), c(1.0, 0.0)], ShiftOrigin::Iterate).unwrap();
        assert_eq!(a.relative_change(&b), 0.0);
        let d = ShiftSet::uniform(vec![c(2.0, 0.0), c(1.5, 0.0)], ShiftOrigin::Iterate).unwrap();
        assert!((d.relative_change(&a) - 0.5 / 5f64.sqrt()).abs() < 1e-15);
    }
}
