use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lu::{norm_inf, to_complex, ComplexLu};
use crate::error::{Error, Result};

/// Relative pivot threshold used for the nonsingularity check on `E`.
pub const SINGULAR_E_RTOL: f64 = 1e-12;

/// Eigen-decomposition of a regular real pencil `(A, E)`.
///
/// Column `i` of `right` solves `A x = λ_i E x`; column `i` of `left`
/// solves `yᴴ A = λ_i yᴴ E`. Both are normalized to unit 2-norm. Complex
/// eigenvalues appear in exactly conjugate pairs whose vectors are exact
/// conjugates of each other.
#[derive(Debug, Clone)]
pub struct GenEigResult {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: DMatrix<Complex64>,
    pub left_vectors: DMatrix<Complex64>,
}

impl GenEigResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest pair residual `‖(A − λE)x‖ / ((‖A‖ + |λ|‖E‖)‖x‖)` over right
    /// and left eigenvectors.
    pub fn max_residual(&self, a: &DMatrix<f64>, e: &DMatrix<f64>) -> f64 {
        let ac = to_complex(a);
        let ec = to_complex(e);
        let na = norm_inf(a);
        let ne = norm_inf(e);
        let mut worst: f64 = 0.0;
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            let x = self.right_vectors.column(i);
            let y = self.left_vectors.column(i);
            let scale = na + lam.norm() * ne;
            let rr = (&ac * x - (&ec * x) * lam).camax() / (scale * x.camax());
            let rl = (y.adjoint() * &ac - (y.adjoint() * &ec) * lam).camax() / (scale * y.camax());
            worst = worst.max(rr).max(rl);
        }
        worst
    }
}

/// Checks that `e` is nonsingular via pivoted LU, returning its factorization.
pub fn check_nonsingular(e: &DMatrix<f64>) -> Result<ComplexLu> {
    let lu = ComplexLu::new(&to_complex(e)).map_err(|_| Error::SingularE)?;
    if lu.min_pivot() <= SINGULAR_E_RTOL * lu.norm() {
        return Err(Error::SingularE);
    }
    Ok(lu)
}

/// Eigenvalues of the pencil `(A, E)` with `E` nonsingular, computed from the
/// real Schur form of `E⁻¹A`. Conjugate pairs are made exact.
pub fn pencil_eigenvalues(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || e.nrows() != n || e.ncols() != n {
        return Err(Error::Dimension(format!(
            "pencil of A {}x{} and E {}x{}",
            a.nrows(),
            a.ncols(),
            e.nrows(),
            e.ncols()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let lu = check_nonsingular(e)?;
    let ac = to_complex(a);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&ac.column(j).into_owned());
        for i in 0..n {
            m[(i, j)] = col[i].re;
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("E⁻¹A"));
    }
    let schur = Schur::try_new(m, f64::EPSILON, 500 * n.max(4)).ok_or(Error::ConvergenceFailure)?;
    let raw: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    pair_conjugates(raw)
}

/// Pairs each eigenvalue with positive imaginary part to its nearest partner
/// with negative imaginary part and makes the pair exactly conjugate.
/// The result is in [`spectrum_order`].
fn pair_conjugates(raw: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for v in raw {
        if v.im > 0.0 {
            upper.push(v);
        } else if v.im < 0.0 {
            lower.push(v);
        } else {
            reals.push(v);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::ConvergenceFailure);
    }
    let mut out = reals;
    let mut used = vec![false; lower.len()];
    for u in upper {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, l) in lower.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (l.conj() - u).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        let j = best.ok_or(Error::ConvergenceFailure)?;
        used[j] = true;
        let avg = (u + lower[j].conj()) * 0.5;
        out.push(avg);
        out.push(avg.conj());
    }
    sort_spectrum(&mut out);
    Ok(out)
}

/// Canonical ordering of a conjugation-closed spectrum: by real part, then
/// by imaginary magnitude, then negative imaginary member first. Conjugate
/// pairs end up adjacent as `(λ̄, λ)` with `Im λ > 0`.
pub fn spectrum_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re)
        .then(a.im.abs().total_cmp(&b.im.abs()))
        .then(a.im.total_cmp(&b.im))
}

pub(crate) fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(spectrum_order);
}

fn start_vector(n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * (1.7 * i as f64 + 0.3).sin(), 0.0))
}

struct PairVectors {
    lambda: Complex64,
    right: DVector<Complex64>,
    left: DVector<Complex64>,
}

fn inverse_iteration(
    ac: &DMatrix<Complex64>,
    ec: &DMatrix<Complex64>,
    lambda: Complex64,
    scale_a: f64,
    scale_e: f64,
) -> Result<PairVectors> {
    let n = ac.nrows();
    let residual = |lam: Complex64, x: &DVector<Complex64>, y: &DVector<Complex64>| {
        let scale = scale_a + lam.norm() * scale_e;
        let rr = (ac * x - (ec * x) * lam).camax() / (scale * x.camax());
        let rl = (y.adjoint() * ac - (y.adjoint() * ec) * lam).camax() / (scale * y.camax());
        rr.max(rl)
    };

    let k = ac - ec * lambda;
    let lu = ComplexLu::regularized(&k, 1e-15 * (scale_a + lambda.norm() * scale_e));
    let mut x = start_vector(n);
    let mut y = start_vector(n);
    let mut res = f64::INFINITY;
    for _ in 0..4 {
        x = lu.solve(&x);
        let nx = x.norm();
        if !nx.is_finite() || nx == 0.0 {
            return Err(Error::ConvergenceFailure);
        }
        x /= Complex64::new(nx, 0.0);
        y = lu.solve_adjoint(&y);
        let ny = y.norm();
        if !ny.is_finite() || ny == 0.0 {
            return Err(Error::ConvergenceFailure);
        }
        y /= Complex64::new(ny, 0.0);
        res = residual(lambda, &x, &y);
        if res <= 1e-13 {
            break;
        }
    }

    // one Rayleigh-quotient correction, kept only if it helps
    let mut lam = lambda;
    let den = (y.adjoint() * ec * &x)[(0, 0)];
    if den.norm() > 1e-14 * scale_e {
        let mut cand = (y.adjoint() * ac * &x)[(0, 0)] / den;
        if lambda.im == 0.0 {
            cand.im = 0.0;
        }
        let cres = residual(cand, &x, &y);
        if cres < res {
            lam = cand;
            res = cres;
        }
    }
    if res > 1e-10 {
        return Err(Error::ConvergenceFailure);
    }
    Ok(PairVectors {
        lambda: lam,
        right: x,
        left: y,
    })
}

/// Generalized eigen-decomposition of the real pencil `(A, E)` with right
/// and left eigenvectors. `E` must be nonsingular.
pub fn gen_eig(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<GenEigResult> {
    let n = a.nrows();
    let eigenvalues = pencil_eigenvalues(a, e)?;
    let ac = to_complex(a);
    let ec = to_complex(e);
    let na = norm_inf(a);
    let ne = norm_inf(e);

    let mut vals = Vec::with_capacity(n);
    let mut right = DMatrix::zeros(n, n);
    let mut left = DMatrix::zeros(n, n);
    let mut i = 0;
    while i < eigenvalues.len() {
        let lam = eigenvalues[i];
        if lam.im == 0.0 {
            let pv = inverse_iteration(&ac, &ec, lam, na, ne)?;
            right.set_column(vals.len(), &pv.right);
            left.set_column(vals.len(), &pv.left);
            vals.push(pv.lambda);
            i += 1;
        } else {
            // canonical order: (a − ib) then (a + ib)
            let upper = eigenvalues[i + 1];
            debug_assert_eq!(upper, lam.conj());
            let pv = inverse_iteration(&ac, &ec, upper, na, ne)?;
            let j = vals.len();
            right.set_column(j, &pv.right.map(|v| v.conj()));
            left.set_column(j, &pv.left.map(|v| v.conj()));
            right.set_column(j + 1, &pv.right);
            left.set_column(j + 1, &pv.left);
            vals.push(pv.lambda.conj());
            vals.push(pv.lambda);
            i += 2;
        }
    }
    Ok(GenEigResult {
        eigenvalues: vals,
        right_vectors: right,
        left_vectors: left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let e = DMatrix::identity(2, 2);
        let r = gen_eig(&a, &e).unwrap();
        assert_eq!(r.eigenvalues.len(), 2);
        assert!((r.eigenvalues[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        // eigenvector of −2 is e₂ up to phase
        assert!((r.right_vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(r.right_vectors[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn scaled_pencil() {
        let a = DMatrix::from_element(1, 1, -2.0);
        let e = DMatrix::from_element(1, 1, 2.0);
        let r = gen_eig(&a, &e).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn companion_pencil() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let e = DMatrix::identity(2, 2);
        let r = gen_eig(&a, &e).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-13);
        assert!((r.eigenvalues[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-13);
        assert!(r.max_residual(&a, &e) < 1e-12);
    }

    #[test]
    fn complex_pair_is_exactly_conjugate() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, -2.0, -1.0]);
        let e = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]);
        let r = gen_eig(&a, &e).unwrap();
        assert_eq!(r.eigenvalues[0], r.eigenvalues[1].conj());
        let x0 = r.right_vectors.column(0).into_owned();
        let x1 = r.right_vectors.column(1).map(|v| v.conj());
        assert_eq!(x0, x1);
        assert!(r.max_residual(&a, &e) < 1e-12);
    }

    #[test]
    fn singular_e_rejected() {
        let a = DMatrix::identity(2, 2);
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(gen_eig(&a, &e), Err(Error::SingularE)));
    }
}
