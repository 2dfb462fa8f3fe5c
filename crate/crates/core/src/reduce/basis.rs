use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::shifts::ShiftSet;
use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numkit::{check_nonsingular, to_complex, ComplexLu};

/// Drop tolerance of the pivoted orthonormalization, relative to the
/// largest (unit) column norm.
pub const DEFLATION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSide {
    /// Right basis, spanned by `(σE − A)⁻¹b`.
    V,
    /// Left basis, spanned by `(ζE − A)⁻ᵀc`.
    W,
}

/// A basis column dropped as numerically dependent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflationEvent {
    pub side: BasisSide,
    pub shift: Complex64,
    /// Norm of the column after projecting out the accepted ones, relative
    /// to its original norm.
    pub residual: f64,
}

/// Real orthonormal basis together with the columns that were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub matrix: DMatrix<f64>,
    pub deflations: Vec<DeflationEvent>,
}

impl Basis {
    pub fn rank(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Petrov–Galerkin projection pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionBases {
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

impl ReductionBases {
    pub fn new(v: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        if v.shape() != w.shape() {
            return Err(Error::Dimension(format!("V {:?} vs W {:?}", v.shape(), w.shape())));
        }
        Ok(Self { v, w })
    }

    pub fn order(&self) -> usize {
        self.v.ncols()
    }
}

fn raw_columns(sys: &StateSpace, shifts: &ShiftSet, side: BasisSide) -> Result<Vec<(DVector<f64>, Complex64)>> {
    let ec = to_complex(sys.e());
    let ac = to_complex(sys.a());
    let rhs = match side {
        BasisSide::V => sys.b(),
        BasisSide::W => sys.c(),
    }
    .map(|v| Complex64::new(v, 0.0));
    let mut cols = Vec::with_capacity(shifts.len());
    for &s in shifts.points() {
        if s.im < 0.0 {
            // covered by its conjugate partner
            continue;
        }
        let k = &ec * s - &ac;
        let lu = ComplexLu::new(&k).map_err(|_| Error::ShiftAtPole(s))?;
        let x = match side {
            BasisSide::V => lu.solve(&rhs),
            BasisSide::W => lu.solve_transpose(&rhs),
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShiftAtPole(s));
        }
        if s.im == 0.0 {
            cols.push((x.map(|v| v.re), s));
        } else {
            cols.push((x.map(|v| v.re), s));
            cols.push((x.map(|v| v.im), s.conj()));
        }
    }
    Ok(cols)
}

/// Column-pivoted Gram–Schmidt with reorthogonalization. Columns are
/// normalized first; any whose remaining norm drops to `DEFLATION_RTOL`
/// is discarded.
fn orthonormalize(cols: Vec<(DVector<f64>, Complex64)>, side: BasisSide, n: usize) -> Result<Basis> {
    let mut deflations = Vec::new();
    let mut work: Vec<(DVector<f64>, Complex64)> = Vec::with_capacity(cols.len());
    for (v, s) in cols {
        let nv = v.norm();
        if nv > 0.0 && nv.is_finite() {
            work.push((v / nv, s));
        } else {
            deflations.push(DeflationEvent {
                side,
                shift: s,
                residual: 0.0,
            });
        }
    }
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(work.len());
    while !work.is_empty() {
        let (j, best) = work
            .iter()
            .enumerate()
            .map(|(j, (v, _))| (j, v.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= DEFLATION_RTOL {
            for (v, s) in work.drain(..) {
                deflations.push(DeflationEvent {
                    side,
                    shift: s,
                    residual: v.norm(),
                });
            }
            break;
        }
        let (mut v, _) = work.swap_remove(j);
        for qi in &q {
            let h = qi.dot(&v);
            v.axpy(-h, qi, 1.0);
        }
        let nv = v.norm();
        if nv <= DEFLATION_RTOL {
            continue;
        }
        v /= nv;
        for (w, _) in work.iter_mut() {
            let h = v.dot(w);
            w.axpy(-h, &v, 1.0);
        }
        q.push(v);
    }
    if q.is_empty() {
        return Err(Error::TotalRankCollapse);
    }
    let mut m = DMatrix::zeros(n, q.len());
    for (j, v) in q.iter().enumerate() {
        m.set_column(j, v);
    }
    Ok(Basis { matrix: m, deflations })
}

/// Real orthonormal basis of `span{(σ_iE − A)⁻¹b}`. Each conjugate pair is
/// solved once and contributes its real and imaginary parts.
pub fn build_basis_v(sys: &StateSpace, shifts: &ShiftSet) -> Result<Basis> {
    let cols = raw_columns(sys, shifts, BasisSide::V)?;
    orthonormalize(cols, BasisSide::V, sys.order())
}

/// Real orthonormal basis of `span{(ζ_iE − A)⁻ᵀc}`.
pub fn build_basis_w(sys: &StateSpace, shifts: &ShiftSet) -> Result<Basis> {
    let cols = raw_columns(sys, shifts, BasisSide::W)?;
    orthonormalize(cols, BasisSide::W, sys.order())
}

/// `(WᵀEV, WᵀAV, Wᵀb, Vᵀc, d)`.
pub fn project(sys: &StateSpace, bases: &ReductionBases) -> Result<StateSpace> {
    let (v, w) = (&bases.v, &bases.w);
    if v.nrows() != sys.order() || w.nrows() != sys.order() || v.ncols() != w.ncols() {
        return Err(Error::Dimension(format!(
            "bases V {:?}, W {:?} for order {}",
            v.shape(),
            w.shape(),
            sys.order()
        )));
    }
    let wt = w.transpose();
    let er = &wt * sys.e() * v;
    let ar = &wt * sys.a() * v;
    let br = &wt * sys.b();
    let cr = v.transpose() * sys.c();
    if er.nrows() > 0 && check_nonsingular(&er).is_err() {
        return Err(Error::SingularReducedE);
    }
    StateSpace::new(er, ar, br, cr, sys.d()).map_err(|e| match e {
        Error::SingularE => Error::SingularReducedE,
        other => other,
    })
}
