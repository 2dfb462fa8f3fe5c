use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

// 15-point Kronrod nodes (non-negative half) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default evaluation budget for the adaptive driver.
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

/// Options for [`quad_line_with`].
#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Absolute floor on the accepted error estimate.
    pub abs_tol: f64,
    /// Frequencies where the integrand is sharply peaked or non-smooth.
    pub breakpoints: Vec<f64>,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 0.0,
            breakpoints: Vec::new(),
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // deterministic: error first, then position
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    Segment {
        a,
        b,
        value: resk * half,
        error: ((resk - resg) * half).abs(),
        abs_value: resabs * half.abs(),
    }
}

/// Globally adaptive Gauss–Kronrod integration of `g` over the given
/// ordered cut points.
fn adaptive<F: FnMut(f64) -> f64>(mut g: F, cuts: &[f64], opts: &QuadOptions) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&mut g, w[0], w[1]));
            evals += 15;
        }
    }
    let sums = |heap: &BinaryHeap<Segment>| {
        heap.iter().fold((0.0, 0.0, 0.0), |acc, s| {
            (acc.0 + s.value, acc.1 + s.error, acc.2 + s.abs_value)
        })
    };
    let (mut total, mut err, mut abs_total) = sums(&heap);
    loop {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        let target = |total: f64, abs_total: f64| {
            (opts.rel_tol * total.abs())
                .max(opts.abs_tol)
                .max(50.0 * f64::EPSILON * abs_total)
        };
        if err <= target(total, abs_total) {
            // running sums drift; confirm with exact ones
            (total, err, abs_total) = sums(&heap);
            if err <= target(total, abs_total) {
                return Ok(total);
            }
        }
        if evals + 30 > opts.max_evals {
            return Err(Error::ToleranceNotMet {
                evaluations: evals,
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in floating point
            return Err(Error::ToleranceNotMet {
                evaluations: evals,
                estimate: total,
                error: err,
            });
        }
        let left = kronrod(&mut g, worst.a, mid);
        let right = kronrod(&mut g, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        abs_total += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        evals += 30;
    }
}

fn theta_cuts(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut cuts = vec![lo, hi];
    for &p in breakpoints {
        let t = p.atan();
        if t > lo && t < hi {
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Computes `(1/2π) ∫ f(ω) dω` over the real line to relative accuracy
/// `tol`, via the substitution `ω = tan θ` and adaptive subdivision.
pub fn quad_line<F: FnMut(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    quad_line_with(f, &QuadOptions::new(tol))
}

/// [`quad_line`] with explicit options.
pub fn quad_line_with<F: FnMut(f64) -> f64>(mut f: F, opts: &QuadOptions) -> Result<f64> {
    let cuts = theta_cuts(-FRAC_PI_2, FRAC_PI_2, &opts.breakpoints);
    let g = |theta: f64| {
        let c = theta.cos();
        f(theta.tan()) / (c * c)
    };
    Ok(adaptive(g, &cuts, opts)? / (2.0 * PI))
}

/// Computes `(1/2π) ∫₀^∞ f(ω) dω`.
pub fn quad_half_line<F: FnMut(f64) -> f64>(mut f: F, opts: &QuadOptions) -> Result<f64> {
    let cuts = theta_cuts(0.0, FRAC_PI_2, &opts.breakpoints);
    let g = |theta: f64| {
        let c = theta.cos();
        f(theta.tan()) / (c * c)
    };
    Ok(adaptive(g, &cuts, opts)? / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn arctangent_integral() {
        let v = quad_line(|w| 1.0 / (1.0 + w * w), 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn first_order_magnitude() {
        let v = quad_line(|w| (1.0 / Complex64::new(1.0, w)).norm_sqr(), 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn second_order_magnitude() {
        let v = quad_line(
            |w| {
                let s = Complex64::new(0.0, w);
                (1.0 / ((s + 1.0) * (s + 2.0))).norm_sqr()
            },
            1e-8,
        )
        .unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn even_integrand_is_twice_half_line() {
        let f = |w: f64| {
            let s = Complex64::new(0.0, w);
            (1.0 / (s * s + 0.2 * s + 25.0)).norm_sqr()
        };
        let opts = QuadOptions::new(1e-12).with_breakpoints([5.0, -5.0]);
        let full = quad_line_with(f, &opts).unwrap();
        let half = quad_half_line(f, &opts).unwrap();
        assert!((full - 2.0 * half).abs() <= 1e-11 * full);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let mut opts = QuadOptions::new(1e-14);
        opts.max_evals = 60;
        let r = quad_line_with(|w| (50.0 * w).sin().abs() / (1.0 + w * w), &opts);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }
}
