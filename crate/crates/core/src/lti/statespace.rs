use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::prf::{PoleResidueForm, PoleTerm};
use crate::error::{Error, Result};
use crate::numkit::{check_nonsingular, gen_eig, pencil_eigenvalues, to_complex, ComplexLu};

/// Real SISO descriptor realization `E ẋ = A x + b u`, `y = cᵀx + d u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    e: DMatrix<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    d: f64,
}

impl StateSpace {
    /// Builds a realization, checking dimensions, finiteness and that `E`
    /// is nonsingular.
    pub fn new(e: DMatrix<f64>, a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, d: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || e.shape() != (n, n) || b.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "E {:?}, A {:?}, b {}, c {}",
                e.shape(),
                a.shape(),
                b.len(),
                c.len()
            )));
        }
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("E"));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("A"));
        }
        if b.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("b/c"));
        }
        if !d.is_finite() {
            return Err(Error::NonFinite("d"));
        }
        if n > 0 {
            check_nonsingular(&e)?;
        }
        Ok(Self { e, a, b, c, d })
    }

    /// Realization with `E = I`.
    pub fn standard(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, d: f64) -> Result<Self> {
        let n = a.nrows();
        Self::new(DMatrix::identity(n, n), a, b, c, d)
    }

    /// Order-zero system with transfer function `d`.
    pub fn constant(d: f64) -> Self {
        Self {
            e: DMatrix::zeros(0, 0),
            a: DMatrix::zeros(0, 0),
            b: DVector::zeros(0),
            c: DVector::zeros(0),
            d,
        }
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.d == 0.0
    }

    pub(crate) fn resolvent_lu(&self, s: Complex64) -> Result<ComplexLu> {
        let k = to_complex(&self.e) * s - to_complex(&self.a);
        ComplexLu::new(&k).map_err(|_| Error::EvalAtPole(s))
    }

    /// `cᵀ(sE − A)⁻¹b + d`.
    pub fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        if self.order() == 0 {
            return Ok(Complex64::new(self.d, 0.0));
        }
        let lu = self.resolvent_lu(s)?;
        let x = lu.solve(&self.b.map(|v| Complex64::new(v, 0.0)));
        Ok(dot_real(&self.c, &x) + self.d)
    }

    /// `−cᵀ(sE − A)⁻¹E(sE − A)⁻¹b`.
    pub fn tf_deriv(&self, s: Complex64) -> Result<Complex64> {
        if self.order() == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let lu = self.resolvent_lu(s)?;
        let x = lu.solve(&self.b.map(|v| Complex64::new(v, 0.0)));
        let z = lu.solve(&(to_complex(&self.e) * x));
        Ok(-dot_real(&self.c, &z))
    }

    /// Pencil eigenvalues in canonical spectrum order.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        pencil_eigenvalues(&self.a, &self.e)
    }

    /// True iff every pole has real part below `−1e-12·max|pole|`.
    pub fn is_stable(&self) -> Result<bool> {
        let poles = self.poles()?;
        let scale = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
        Ok(poles.iter().all(|p| p.re < -1e-12 * scale))
    }

    /// Partial-fraction form from the generalized eigen-decomposition. The
    /// residue at `λ_i` is `(cᵀx_i)(y_iᴴb)/(y_iᴴE x_i)`.
    pub fn pole_residue(&self) -> Result<PoleResidueForm> {
        if self.order() == 0 {
            return PoleResidueForm::new(Vec::new(), self.d);
        }
        let eig = gen_eig(&self.a, &self.e)?;
        let ec = to_complex(&self.e);
        let bc = self.b.map(|v| Complex64::new(v, 0.0));
        let mut terms = Vec::with_capacity(eig.len());
        for (i, &pole) in eig.eigenvalues.iter().enumerate() {
            let x = eig.right_vectors.column(i);
            let y = eig.left_vectors.column(i);
            let cx = dot_real(&self.c, &x.into_owned());
            let yb = (y.adjoint() * &bc)[(0, 0)];
            let yex = (y.adjoint() * &ec * x)[(0, 0)];
            terms.push(PoleTerm::new(pole, cx * yb / yex));
        }
        PoleResidueForm::new(terms, self.d)
    }

    /// Strictly proper copy (feedthrough dropped).
    pub fn without_feedthrough(&self) -> Self {
        Self { d: 0.0, ..self.clone() }
    }

    /// Equivalent standard realization `(E⁻¹A, E⁻¹b, c, d)`.
    pub fn to_standard(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let lu = check_nonsingular(&self.e)?;
        let ac = to_complex(&self.a);
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = lu.solve(&ac.column(j).into_owned());
            for i in 0..n {
                a[(i, j)] = col[i].re;
            }
        }
        let b = lu.solve(&self.b.map(|v| Complex64::new(v, 0.0))).map(|v| v.re);
        Ok(Self {
            e: DMatrix::identity(n, n),
            a,
            b,
            c: self.c.clone(),
            d: self.d,
        })
    }
}

pub(crate) fn dot_real(c: &DVector<f64>, x: &DVector<Complex64>) -> Complex64 {
    c.iter().zip(x.iter()).map(|(&ci, &xi)| xi * ci).sum()
}
