use num_complex::Complex64;

use crate::quad::inner_quad;
use crate::Tf;

const GRID: usize = 200;

/// Best first-order approximant `φ/(s − λ)` of `G` in the weighted norm.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderOptimum {
    pub pole: f64,
    pub residue: f64,
    /// ‖G − φ/(s − λ)‖²_W at the refined point.
    pub cost: f64,
    /// Best grid cell before refinement.
    pub grid_pole: f64,
    pub grid_residue: f64,
}

/// Inner products of one candidate pole against `G` and itself.
struct Probe {
    ge: f64,
    ee: f64,
    ge2: f64,
    ee2: f64,
}

fn probe(g: &impl Tf, w: &impl Tf, lam: f64, breaks: &[f64], tol: f64) -> Probe {
    let e = move |s: Complex64| 1.0 / (s - lam);
    let e2 = move |s: Complex64| 1.0 / ((s - lam) * (s - lam));
    Probe {
        ge: inner_quad(g, e, w, breaks, tol).re,
        ee: inner_quad(e, e, w, breaks, tol).re,
        ge2: inner_quad(g, e2, w, breaks, tol).re,
        ee2: inner_quad(e, e2, w, breaks, tol).re,
    }
}

/// Brute-force search for the weighted-H2 optimal first-order model.
///
/// A 200×200 grid over pole (log-spaced in `−[lo, hi]`) and residue is
/// scanned with the cost expanded as ‖G‖² − 2φ⟨G,e⟩ + φ²‖e‖², each inner
/// product taken by quadrature. The best cell is refined by eliminating
/// φ and bisecting on the derivative of the reduced cost in λ, starting
/// from the sign change nearest the best cell.
pub fn first_order_optimum(g: impl Tf, w: impl Tf, breaks: &[f64], lo: f64, hi: f64, tol: f64) -> FirstOrderOptimum {
    let gg = inner_quad(&g, &g, &w, breaks, tol).re;
    let lams: Vec<f64> = (0..GRID)
        .map(|i| -(lo.ln() + (hi / lo).ln() * i as f64 / (GRID - 1) as f64).exp())
        .collect();
    let cols: Vec<(f64, f64)> = lams
        .iter()
        .map(|&l| {
            let e = move |s: Complex64| 1.0 / (s - l);
            (
                inner_quad(&g, e, &w, breaks, tol).re,
                inner_quad(e, e, &w, breaks, tol).re,
            )
        })
        .collect();
    let phi_max = cols.iter().map(|(ge, ee)| (ge / ee).abs()).fold(0.0, f64::max) * 1.5;
    let mut best = (f64::INFINITY, 0usize, 0.0);
    for (i, (ge, ee)) in cols.iter().enumerate() {
        for j in 0..GRID {
            let phi = -phi_max + 2.0 * phi_max * j as f64 / (GRID - 1) as f64;
            let cost = gg - 2.0 * phi * ge + phi * phi * ee;
            if cost < best.0 {
                best = (cost, i, phi);
            }
        }
    }
    let (_, bi, grid_residue) = best;

    // d/dλ [⟨G,e⟩²/‖e‖²] ∝ ⟨G,e'⟩‖e‖² − ⟨G,e⟩⟨e,e'⟩ with e' = 1/(s−λ)².
    let slope = |lam: f64| {
        let p = probe(&g, &w, lam, breaks, tol);
        p.ge2 * p.ee - p.ge * p.ee2
    };
    let mut slopes: Vec<Option<f64>> = vec![None; GRID];
    let mut slope_at = |k: usize| *slopes[k].get_or_insert_with(|| slope(lams[k]));
    // Walk outward from the best cell to the nearest sign change.
    let mut bracket = None;
    for k in 1..GRID {
        let left = bi.checked_sub(k).map(|i| (i, i + 1));
        let right = (bi + k < GRID).then(|| (bi + k - 1, bi + k));
        for (i, j) in left.into_iter().chain(right) {
            if slope_at(i).signum() != slope_at(j).signum() {
                bracket = Some((i, j));
                break;
            }
        }
        if bracket.is_some() || (left.is_none() && right.is_none()) {
            break;
        }
    }
    let lam = match bracket {
        Some((i, j)) => {
            let (mut a, mut b) = (lams[i], lams[j]);
            let mut fa = slope_at(i);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (b - a).abs() <= 1e-15 * m.abs() {
                    break;
                }
                let fm = slope(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        }
        None => golden(
            |l| -reduced_gain(&g, &w, l, breaks, tol),
            lams[bi.saturating_sub(1)],
            lams[(bi + 1).min(GRID - 1)],
        ),
    };
    let p = probe(&g, &w, lam, breaks, tol);
    let residue = p.ge / p.ee;
    FirstOrderOptimum {
        pole: lam,
        residue,
        cost: gg - p.ge * p.ge / p.ee,
        grid_pole: lams[bi],
        grid_residue,
    }
}

fn reduced_gain(g: &impl Tf, w: &impl Tf, lam: f64, breaks: &[f64], tol: f64) -> f64 {
    let e = move |s: Complex64| 1.0 / (s - lam);
    let ge = inner_quad(g, e, w, breaks, tol).re;
    ge * ge / inner_quad(e, e, w, breaks, tol).re
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * a.abs().max(b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}
