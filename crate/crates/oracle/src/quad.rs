use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::Tf;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

/// Panel value and the integral of |f| over the same panel.
fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (x, w) = rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut v, mut m) = (0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let y = f(mid + half * xi);
        v += wi * y;
        m += wi * y.abs();
    }
    (v * half, m * half.abs())
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (left, left_abs) = panel(f, a, m);
    let (right, right_abs) = panel(f, m, b);
    let split = left + right;
    let roundoff = 100.0 * f64::EPSILON * (left_abs + right_abs);
    if (split - whole).abs() <= tol.max(roundoff) || depth >= MAX_DEPTH {
        return split;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1) + refine(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive Gauss–Legendre integral of `f` over `[a, b]` to absolute
/// tolerance `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let (whole, _) = panel(&mut f, a, b);
    refine(&mut f, a, b, whole, abs_tol, 0)
}

fn theta_cuts(breaks: &[f64]) -> Vec<f64> {
    let mut cuts = vec![-FRAC_PI_2, FRAC_PI_2];
    cuts.extend(breaks.iter().filter(|b| b.is_finite()).map(|b| b.atan()));
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    cuts
}

fn mapped<F: FnMut(f64) -> f64>(mut f: F) -> impl FnMut(f64) -> f64 {
    move |t: f64| {
        let c = t.cos();
        f(t.tan()) / (c * c)
    }
}

/// Midpoint estimate of ∫|f| over the line, used to scale tolerances.
fn magnitude<F: FnMut(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    let mut g = mapped(f);
    theta_cuts(breaks)
        .windows(2)
        .map(|p| {
            let n = 64;
            let h = (p[1] - p[0]) / n as f64;
            (0..n).map(|k| g(p[0] + (k as f64 + 0.5) * h).abs()).sum::<f64>() * h
        })
        .sum()
}

fn integrate_line_abs<F: FnMut(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64) -> f64 {
    let mut g = mapped(f);
    theta_cuts(breaks)
        .windows(2)
        .map(|p| integrate(&mut g, p[0], p[1], abs_tol * (p[1] - p[0]) / PI))
        .sum()
}

/// Integral of `f` over the whole real line, relative tolerance `rel_tol`
/// with respect to ∫|f|.
///
/// The line is mapped to (−π/2, π/2) by ω = tan θ and split at the images
/// of `breaks`.
pub fn integrate_line<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], rel_tol: f64) -> f64 {
    let scale = magnitude(&mut f, breaks);
    integrate_line_abs(f, breaks, rel_tol * scale.max(f64::MIN_POSITIVE))
}

/// Breakpoints at the resonance frequencies ±|Im p| of the given poles.
pub fn peaks(poles: &[Complex64]) -> Vec<f64> {
    let mut out: Vec<f64> = poles
        .iter()
        .flat_map(|p| [p.im.abs(), -p.im.abs()])
        .chain(std::iter::once(0.0))
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup();
    out
}

/// ⟨G, H⟩_W = (1/2π) ∫ G(iω)W(iω)·H(−iω)W(−iω) dω, with no conjugation.
pub fn inner_quad(g: impl Tf, h: impl Tf, w: impl Tf, breaks: &[f64], rel_tol: f64) -> Complex64 {
    let integrand = |om: f64| {
        let s = Complex64::new(0.0, om);
        g(s) * w(s) * h(-s) * w(-s)
    };
    // One tolerance for both parts: an identically vanishing imaginary part
    // must not be resolved down to roundoff.
    let abs_tol = rel_tol * magnitude(|om| integrand(om).norm(), breaks).max(f64::MIN_POSITIVE);
    let re = integrate_line_abs(|om| integrand(om).re, breaks, abs_tol);
    let im = integrate_line_abs(|om| integrand(om).im, breaks, abs_tol);
    Complex64::new(re, im) / (2.0 * PI)
}

/// ‖G‖²_W = (1/2π) ∫ |G(iω)W(iω)|² dω.
pub fn norm_sq_quad(g: impl Tf, w: impl Tf, breaks: &[f64], rel_tol: f64) -> f64 {
    integrate_line(
        |om| {
            let s = Complex64::new(0.0, om);
            (g(s) * w(s)).norm_sqr()
        },
        breaks,
        rel_tol,
    ) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = legendre_rule(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m38 - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian() {
        let v = integrate_line(|x| 1.0 / (1.0 + x * x), &[0.0], 1e-13);
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn first_order_norms() {
        let one = |_: Complex64| Complex64::new(1.0, 0.0);
        let g = |s: Complex64| 1.0 / (s + 1.0);
        assert!((norm_sq_quad(g, one, &[0.0], 1e-13) - 0.5).abs() < 1e-13);
        let w = |s: Complex64| 1.0 / (s + 2.0);
        assert!((norm_sq_quad(g, w, &[0.0], 1e-13) - 1.0 / 12.0).abs() < 1e-13);
    }
}
