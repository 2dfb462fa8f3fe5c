//! Gramian-based baselines: H2 norm, balanced truncation and output-weighted
//! frequency-weighted balanced truncation.

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{StateSpace, TransferFunction};
use crate::numkit::lyap_solve;

/// Hankel values below this fraction of the largest are treated as zero.
pub const HANKEL_RTOL: f64 = 1e-14;

/// Controllability and observability Gramians of a descriptor system:
/// `A P Eᵀ + E P Aᵀ + bbᵀ = 0`, `Aᵀ Q E + Eᵀ Q A + ccᵀ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianPair {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

pub fn controllability_gramian(sys: &StateSpace) -> Result<DMatrix<f64>> {
    lyap_solve(sys.a(), sys.e(), &(sys.b() * sys.b().transpose()))
}

pub fn observability_gramian(sys: &StateSpace) -> Result<DMatrix<f64>> {
    lyap_solve(
        &sys.a().transpose(),
        &sys.e().transpose(),
        &(sys.c() * sys.c().transpose()),
    )
}

pub fn gramians(sys: &StateSpace) -> Result<GramianPair> {
    Ok(GramianPair {
        p: controllability_gramian(sys)?,
        q: observability_gramian(sys)?,
    })
}

/// `√(cᵀPc)` with `P` the controllability Gramian.
pub fn h2_norm_gramian(sys: &StateSpace) -> Result<f64> {
    if !sys.is_strictly_proper() {
        return Err(Error::NotStrictlyProper(sys.d()));
    }
    if sys.order() == 0 {
        return Ok(0.0);
    }
    let p = controllability_gramian(sys)?;
    Ok(sys.c().dot(&(&p * sys.c())).max(0.0).sqrt())
}

/// Balanced-truncation output.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedReduction {
    pub reduced: StateSpace,
    /// Hankel singular values (weighted ones for FWBT), descending.
    pub hankel: Vec<f64>,
    /// Set when the requested order exceeded the numerical rank of the
    /// Gramian product and the result was truncated further.
    pub deflated_to: Option<usize>,
    /// Whether the reduced system is asymptotically stable.
    pub stable: bool,
}

/// `L` with `M ≈ L Lᵀ` from the symmetric eigendecomposition, with
/// negative roundoff eigenvalues clipped to zero.
fn psd_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut l = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        l.column_mut(j).scale_mut(s);
    }
    l
}

/// Square-root balancing of a standard realization `(A, b, c, d)` with
/// Gramians `P`, `Q`.
fn square_root_truncate(std: &StateSpace, p: &DMatrix<f64>, q: &DMatrix<f64>, r: usize) -> Result<BalancedReduction> {
    let u = psd_factor(p);
    let l = psd_factor(q);
    let svd = SVD::new(l.transpose() * &u, true, true);
    let hankel: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = hankel.first().copied().unwrap_or(0.0);
    let rank = hankel.iter().take_while(|&&h| h > HANKEL_RTOL * top).count();
    if rank == 0 {
        return Err(Error::RankDeficientGramian("all Hankel values vanish".into()));
    }
    let k = r.min(rank);
    let deflated_to = (k < r).then_some(k);
    let z = svd.u.as_ref().expect("left singular vectors");
    let yt = svd.v_t.as_ref().expect("right singular vectors");
    let mut t = DMatrix::zeros(std.order(), k);
    let mut w = DMatrix::zeros(std.order(), k);
    for j in 0..k {
        let s = hankel[j].powf(-0.5);
        t.set_column(j, &(&u * yt.row(j).transpose() * s));
        w.set_column(j, &(&l * z.column(j) * s));
    }
    let wt = w.transpose();
    let ar = &wt * std.a() * &t;
    let br: DVector<f64> = &wt * std.b();
    let cr: DVector<f64> = t.transpose() * std.c();
    let reduced = StateSpace::standard(ar, br, cr, std.d())?;
    let stable = reduced.is_stable()?;
    Ok(BalancedReduction {
        reduced,
        hankel,
        deflated_to,
        stable,
    })
}

fn check_order(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::InvalidConfig(format!("r = {r} for order {n}")));
    }
    Ok(())
}

/// Balanced truncation to order `r` by the square-root method.
pub fn balanced_truncation(sys: &StateSpace, r: usize) -> Result<BalancedReduction> {
    check_order(sys.order(), r)?;
    let std = sys.to_standard()?;
    let g = gramians(&std)?;
    square_root_truncate(&std, &g.p, &g.q, r)
}

/// Output-weighted frequency-weighted balanced truncation: the
/// controllability Gramian of `G` is balanced against the `G` block of the
/// observability Gramian of the cascade `W·G`. Stability of the result is
/// reported, not enforced.
pub fn fwbt(g: &StateSpace, w: &StateSpace, r: usize) -> Result<BalancedReduction> {
    check_order(g.order(), r)?;
    let gs = g.to_standard()?;
    let ws = w.to_standard()?;
    let (n, m) = (gs.order(), ws.order());
    let mut ac = DMatrix::zeros(n + m, n + m);
    ac.view_mut((0, 0), (n, n)).copy_from(gs.a());
    ac.view_mut((n, n), (m, m)).copy_from(ws.a());
    ac.view_mut((n, 0), (m, n)).copy_from(&(ws.b() * gs.c().transpose()));
    let mut cc = DVector::zeros(n + m);
    cc.rows_mut(0, n).copy_from(&(gs.c() * ws.d()));
    cc.rows_mut(n, m).copy_from(ws.c());
    let ec = DMatrix::identity(n + m, n + m);
    let qc = lyap_solve(&ac.transpose(), &ec, &(&cc * cc.transpose()))?;
    let q = qc.view((0, 0), (n, n)).into_owned();
    let p = controllability_gramian(&gs)?;
    square_root_truncate(&gs, &p, &q, r)
}

/// Logarithmic frequency grid with `per_decade` points per decade on
/// `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=count)
        .map(|k| lo * 10f64.powf(decades * k as f64 / count as f64))
        .collect()
}

/// `max_ω |F(iω)W(iω)|` over the grid; an estimate, not a certified norm.
pub fn hinf_grid_estimate<F, W>(f: &F, w: &W, grid: &[f64]) -> Result<f64>
where
    F: TransferFunction + ?Sized,
    W: TransferFunction + ?Sized,
{
    let mut best = f.tf_eval(Complex64::new(0.0, 0.0))?.norm() * w.tf_eval(Complex64::new(0.0, 0.0))?.norm();
    for &om in grid {
        let s = Complex64::new(0.0, om);
        best = best.max(f.tf_eval(s)?.norm() * w.tf_eval(s)?.norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::Difference;

    fn two_pole() -> StateSpace {
        StateSpace::standard(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]),
            DVector::from_vec(vec![0.0, 1.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn h2_first_order() {
        let g = StateSpace::standard(
            DMatrix::from_element(1, 1, -1.0),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
            0.0,
        )
        .unwrap();
        assert!((h2_norm_gramian(&g).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let scaled = StateSpace::new(
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::from_element(1, 1, -2.0),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 2.0),
            0.0,
        )
        .unwrap();
        assert!((h2_norm_gramian(&scaled).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bt_full_order_matches() {
        let g = two_pole();
        let bt = balanced_truncation(&g, 2).unwrap();
        for k in 0..10 {
            let s = Complex64::new(0.1 * k as f64, k as f64);
            let (a, b) = (g.tf_eval(s).unwrap(), bt.reduced.tf_eval(s).unwrap());
            assert!((a - b).norm() <= 1e-9 * a.norm());
        }
    }

    #[test]
    fn bt_first_order_bound() {
        let g = two_pole();
        let bt = balanced_truncation(&g, 1).unwrap();
        assert!(bt.stable);
        let err = hinf_grid_estimate(
            &Difference(&g, &bt.reduced),
            &StateSpace::constant(1.0),
            &log_grid(1e-3, 1e3, 200),
        )
        .unwrap();
        assert!(err <= 2.0 * bt.hankel[1] + 1e-12);
    }

    #[test]
    fn fwbt_unit_weight_is_bt() {
        let g = two_pole();
        let a = balanced_truncation(&g, 1).unwrap();
        let b = fwbt(&g, &StateSpace::constant(1.0), 1).unwrap();
        for (x, y) in a.hankel.iter().zip(&b.hankel) {
            assert!((x - y).abs() < 1e-14);
        }
        let s = Complex64::new(0.0, 1.0);
        assert!((a.reduced.tf_eval(s).unwrap() - b.reduced.tf_eval(s).unwrap()).norm() < 1e-13);
    }
}
