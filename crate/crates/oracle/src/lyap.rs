use nalgebra::{DMatrix, DVector};

/// Solves `A·P·Eᵀ + E·P·Aᵀ + Q = 0` through the n²×n² Kronecker system.
///
/// Returns `None` when the vectorized operator is singular.
pub fn kron_lyap(a: &DMatrix<f64>, e: &DMatrix<f64>, q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let op = e.kronecker(a) + a.kronecker(e);
    let rhs = DVector::from_iterator(n * n, q.iter().map(|v| -v));
    let vec_p = op.lu().solve(&rhs)?;
    let p = DMatrix::from_column_slice(n, n, vec_p.as_slice());
    Some((&p + p.transpose()) * 0.5)
}

/// ‖cᵀ(sE − A)⁻¹b‖²_{H2} = cᵀPc with P the controllability Gramian.
pub fn h2_norm_sq_kron(a: &DMatrix<f64>, e: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Option<f64> {
    let p = kron_lyap(a, e, &(b * b.transpose()))?;
    Some((c.transpose() * p * c)[(0, 0)])
}
