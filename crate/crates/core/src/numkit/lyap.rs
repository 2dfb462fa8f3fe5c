use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eig::check_nonsingular;
use super::lu::{norm_inf, to_complex};
use crate::error::{Error, Result};

/// Complex Schur form `M = U T Uᴴ` with `T` upper triangular.
pub(crate) fn complex_schur(m: DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    let schur = Schur::try_new(m, f64::EPSILON, 500 * n.max(4)).ok_or(Error::ConvergenceFailure)?;
    let (mut u, mut t) = schur.unpack();
    // Clear any 2×2 diagonal block the QR sweep left coupled.
    let scale = t.camax().max(f64::MIN_POSITIVE);
    for k in 0..n.saturating_sub(1) {
        let sub = t[(k + 1, k)];
        if sub.norm() <= 1e-15 * scale {
            t[(k + 1, k)] = Complex64::new(0.0, 0.0);
            continue;
        }
        let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], sub, t[(k + 1, k + 1)]);
        let tr = a + d;
        let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
        let lam = tr * 0.5 + disc;
        // eigenvector (lam − d, c) of the block
        let v0 = lam - d;
        let v1 = c;
        let nv = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        let (cs, sn) = (v0 / nv, v1 / nv);
        // unitary G = [[cs, −conj(sn)], [sn, conj(cs)]]; T ← Gᴴ T G, U ← U G
        for j in 0..n {
            let x = t[(k, j)];
            let y = t[(k + 1, j)];
            t[(k, j)] = cs.conj() * x + sn.conj() * y;
            t[(k + 1, j)] = -sn * x + cs * y;
        }
        for i in 0..n {
            let x = t[(i, k)];
            let y = t[(i, k + 1)];
            t[(i, k)] = x * cs + y * sn;
            t[(i, k + 1)] = -x * sn.conj() + y * cs.conj();
            let x = u[(i, k)];
            let y = u[(i, k + 1)];
            u[(i, k)] = x * cs + y * sn;
            u[(i, k + 1)] = -x * sn.conj() + y * cs.conj();
        }
        t[(k + 1, k)] = Complex64::new(0.0, 0.0);
    }
    Ok((u, t))
}

/// Solves `T X + X Tᴴ = C` for upper triangular `T`.
fn triangular_lyapunov(t: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for j in (0..n).rev() {
        let mut rhs = c.column(j).into_owned();
        for k in j + 1..n {
            let coef = t[(j, k)].conj();
            for i in 0..n {
                rhs[i] -= x[(i, k)] * coef;
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for l in i + 1..n {
                acc -= t[(i, l)] * x[(l, j)];
            }
            x[(i, j)] = acc / (t[(i, i)] + shift);
        }
    }
    x
}

fn residual(a: &DMatrix<f64>, e: &DMatrix<f64>, q: &DMatrix<f64>, p: &DMatrix<f64>) -> DMatrix<f64> {
    let ape = a * p * e.transpose();
    &ape + ape.transpose() + q
}

/// Solves the generalized Lyapunov equation `A P Eᵀ + E P Aᵀ + Q = 0` for
/// symmetric `P`, with `(A, E)` a stable pencil and `E` nonsingular.
///
/// Uses the complex Schur form of `E⁻¹A` and a triangular back-substitution,
/// followed by one step of residual correction.
pub fn lyap_solve(a: &DMatrix<f64>, e: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || e.shape() != (n, n) || q.shape() != (n, n) {
        return Err(Error::Dimension(
            "Lyapunov operands must be square of equal size".into(),
        ));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let lu = check_nonsingular(e)?;
    let solve_cols = |m: &DMatrix<f64>| -> DMatrix<Complex64> {
        let mc = to_complex(m);
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            out.set_column(j, &lu.solve(&mc.column(j).into_owned()));
        }
        out
    };
    // Ã = E⁻¹A
    let at = solve_cols(a);
    let (u, t) = complex_schur(at)?;
    let lam_max = (0..n).map(|i| t[(i, i)].norm()).fold(0.0, f64::max);
    for i in 0..n {
        let l = t[(i, i)];
        if l.re >= -1e-12 * lam_max {
            return Err(Error::UnstablePencil(l));
        }
    }

    let solve_once = |rhs: &DMatrix<f64>| -> DMatrix<f64> {
        // Q̃ = E⁻¹ Q E⁻ᵀ
        let left = solve_cols(rhs);
        let mut qt = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let row = left.row(i).transpose().into_owned();
            let sol = lu.solve(&row);
            for j in 0..n {
                qt[(i, j)] = sol[j];
            }
        }
        let c = -(u.adjoint() * qt * &u);
        let x = triangular_lyapunov(&t, &c);
        let p = &u * x * u.adjoint();
        let pr = p.map(|v| v.re);
        (&pr + pr.transpose()) * 0.5
    };

    let mut p = solve_once(q);
    let qn = norm_inf(q).max(f64::MIN_POSITIVE);
    let r = residual(a, e, q, &p);
    if norm_inf(&r) > 1e-13 * qn {
        let dp = solve_once(&r);
        p += dp;
        p = (&p + p.transpose()) * 0.5;
    }
    Ok(p)
}

/// Relative residual `‖A P Eᵀ + E P Aᵀ + Q‖∞ / ‖Q‖∞`.
pub fn lyap_residual(a: &DMatrix<f64>, e: &DMatrix<f64>, q: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    norm_inf(&residual(a, e, q, p)) / norm_inf(q).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_cases() {
        let one = |v: f64| DMatrix::from_element(1, 1, v);
        let p = lyap_solve(&one(-1.0), &one(1.0), &one(1.0)).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
        let p = lyap_solve(&one(-3.0), &one(2.0), &one(6.0)).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decoupled() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let e = DMatrix::identity(2, 2);
        let q = DMatrix::identity(2, 2);
        let p = lyap_solve(&a, &e, &q).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]);
        assert!((p - expect).amax() < 1e-14);
    }

    #[test]
    fn oscillatory_pencil() {
        let a = DMatrix::from_row_slice(3, 3, &[-0.5, 5.0, 0.0, -5.0, -0.5, 1.0, 0.0, 0.3, -2.0]);
        let e = DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.0, 1.0, 0.2, 0.1, 0.0, 1.5]);
        let q = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 2.0, 0.1, 0.0, 0.1, 0.5]);
        let p = lyap_solve(&a, &e, &q).unwrap();
        assert!(lyap_residual(&a, &e, &q, &p) < 1e-12);
        assert!((&p - p.transpose()).amax() <= 1e-12 * p.amax());
    }

    #[test]
    fn unstable_rejected() {
        let one = |v: f64| DMatrix::from_element(1, 1, v);
        assert!(matches!(
            lyap_solve(&one(1.0), &one(1.0), &one(1.0)),
            Err(Error::UnstablePencil(_))
        ));
    }
}
