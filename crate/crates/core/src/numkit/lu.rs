use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Max absolute row sum.
pub fn norm_inf<T: Copy + Into<Complex64>>(m: &DMatrix<T>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into().norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting of a complex square matrix,
/// stored compactly (unit lower factor below the diagonal).
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: DMatrix<Complex64>,
    // row i of P·M is row perm[i] of M
    perm: Vec<usize>,
    min_pivot: f64,
    norm: f64,
}

impl ComplexLu {
    /// Factors `m`, failing with `SingularMatrix` when a pivot falls below
    /// `1e-14·‖m‖∞`.
    pub fn new(m: &DMatrix<Complex64>) -> Result<Self> {
        let lu = Self::factor(m, None)?;
        Ok(lu)
    }

    /// Factors `m`, replacing pivots smaller than the absolute `floor` by it.
    /// Used for inverse iteration at (numerically) exact eigenvalues.
    pub fn regularized(m: &DMatrix<Complex64>, floor: f64) -> Self {
        Self::factor(m, Some(floor)).expect("regularized factorization cannot fail")
    }

    fn factor(m: &DMatrix<Complex64>, floor: Option<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Dimension(format!("LU of non-square {}x{} matrix", n, m.ncols())));
        }
        let norm = norm_inf(m);
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
            }
            let threshold = match floor {
                None => SINGULAR_PIVOT_RTOL * norm,
                Some(f) => f,
            };
            if best <= threshold || !best.is_finite() {
                match floor {
                    None => return Err(Error::SingularMatrix { column: k, pivot: best }),
                    Some(f) => {
                        let tiny = f.max(f64::MIN_POSITIVE);
                        let phase = if best > 0.0 {
                            lu[(k, k)] / best
                        } else {
                            Complex64::new(1.0, 0.0)
                        };
                        lu[(k, k)] = phase * tiny.max(best);
                    }
                }
            }
            min_pivot = min_pivot.min(lu[(k, k)].norm());
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            min_pivot,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Smallest pivot magnitude encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// `‖M‖∞` of the factored matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Solves `M x = rhs`.
    pub fn solve(&self, rhs: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.dim();
        let mut x = DVector::from_fn(n, |i, _| rhs[self.perm[i]]);
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Mᵀ x = rhs` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, rhs: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.dim();
        let mut z = rhs.clone();
        // Uᵀ z = rhs
        for i in 0..n {
            let mut acc = z[i];
            for j in 0..i {
                acc -= self.lu[(j, i)] * z[j];
            }
            z[i] = acc / self.lu[(i, i)];
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)] * z[j];
            }
            z[i] = acc;
        }
        let mut x = DVector::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }

    /// Solves `Mᴴ x = rhs`.
    pub fn solve_adjoint(&self, rhs: &DVector<Complex64>) -> DVector<Complex64> {
        self.solve_transpose(&rhs.map(|v| v.conj())).map(|v| v.conj())
    }
}

/// Solves the complex linear system `M x = rhs` by pivoted LU.
pub fn solve_complex(m: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if rhs.len() != m.nrows() {
        return Err(Error::Dimension(format!(
            "rhs length {} for {}x{} matrix",
            rhs.len(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(ComplexLu::new(m)?.solve(rhs))
}

/// Real matrix promoted to complex.
pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Inverse of a real nonsingular matrix via complex LU.
pub fn real_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let lu = ComplexLu::new(&to_complex(m))?;
    let mut inv = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = Complex64::new(1.0, 0.0);
        let col = lu.solve(&e);
        for i in 0..n {
            inv[(i, j)] = col[i].re;
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cvec(v: &[f64]) -> DVector<Complex64> {
        DVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    #[test]
    fn identity_and_diagonal() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let x = solve_complex(&id, &cvec(&[3.0, 4.0])).unwrap();
        assert_eq!(x, cvec(&[3.0, 4.0]));

        let d = DMatrix::from_row_slice(2, 2, &[c(2.0), c(0.0), c(0.0), c(5.0)]);
        let x = solve_complex(&d, &cvec(&[2.0, 5.0])).unwrap();
        assert!((x - cvec(&[1.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn permutation() {
        let p = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let x = solve_complex(&p, &cvec(&[1.0, 2.0])).unwrap();
        assert!((x - cvec(&[2.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert!(matches!(
            solve_complex(&m, &cvec(&[1.0, 1.0])),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn transpose_and_adjoint_solves() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(1.0, 2.0),
                c(3.0),
                Complex64::new(0.0, -1.0),
                c(0.5),
                Complex64::new(-2.0, 1.0),
                c(1.0),
                c(4.0),
                c(1.0),
                Complex64::new(2.0, 2.0),
            ],
        );
        let rhs = DVector::from_vec(vec![c(1.0), Complex64::new(0.0, 1.0), c(-2.0)]);
        let lu = ComplexLu::new(&m).unwrap();
        let xt = lu.solve_transpose(&rhs);
        assert!((m.transpose() * &xt - &rhs).norm() < 1e-13);
        let xa = lu.solve_adjoint(&rhs);
        assert!((m.adjoint() * &xa - &rhs).norm() < 1e-13);
    }
}
