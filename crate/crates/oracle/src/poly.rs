use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients `[1, c_1, …, c_n]` of det(sI − M), highest degree first,
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![1.0];
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        mk = m * (&mk + DMatrix::identity(n, n) * c);
        c = -mk.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// All roots of a polynomial (highest degree first) by Durand–Kerner
/// iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let lead = coeffs[0];
    let a: Vec<Complex64> = coeffs.iter().map(|c| Complex64::new(c / lead, 0.0)).collect();
    let n = a.len() - 1;
    let eval = |z: Complex64| a.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let bound = 1.0 + a[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(0.4 * bound, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1) / bound.powi(k as i32)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let deriv = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in &a {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for zi in &mut z {
        for _ in 0..3 {
            let (p, dp) = deriv(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_roots() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let c = char_poly(&m);
        assert_eq!(c, vec![1.0, 3.0, 2.0]);
        let mut r: Vec<f64> = poly_roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        assert!((r[0] + 2.0).abs() < 1e-13 && (r[1] + 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_roots() {
        // (s² + 2s + 5)(s + 3)
        let r = poly_roots(&[1.0, 5.0, 11.0, 15.0]);
        for want in [
            Complex64::new(-1.0, 2.0),
            Complex64::new(-1.0, -2.0),
            Complex64::new(-3.0, 0.0),
        ] {
            assert!(r.iter().any(|z| (z - want).norm() < 1e-12), "{r:?}");
        }
    }
}
