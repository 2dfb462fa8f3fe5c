use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// A real rational function `d + Σ φ_i/(s − λ_i)` held as raw lists.
#[derive(Debug, Clone)]
pub struct Modal {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub d: f64,
}

impl Modal {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r / (s - p))
            .sum::<Complex64>()
            + self.d
    }

    pub fn deriv(&self, s: Complex64) -> Complex64 {
        -self
            .poles
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r / ((s - p) * (s - p)))
            .sum::<Complex64>()
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }
}

/// Random stable real modal system of order `n`.
///
/// Conjugate pairs have decay rate in `[0.1, 1.5]` and frequency in
/// `[0.3, 8]`; an odd order adds one real pole in `[−3, −0.2]`. Residues
/// are uniform in the unit square. Poles closer than `1e-3` are redrawn.
pub fn random_modal<R: Rng>(rng: &mut R, n: usize) -> Modal {
    let mut poles: Vec<Complex64> = Vec::with_capacity(n);
    let mut residues = Vec::with_capacity(n);
    let far = |poles: &[Complex64], p: Complex64| poles.iter().all(|q| (q - p).norm() > 1e-3);
    while poles.len() + 1 < n {
        let p = Complex64::new(-rng.gen_range(0.1..1.5), rng.gen_range(0.3..8.0));
        if !far(&poles, p) {
            continue;
        }
        let r = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        poles.extend([p, p.conj()]);
        residues.extend([r, r.conj()]);
    }
    if poles.len() < n {
        loop {
            let p = Complex64::new(-rng.gen_range(0.2..3.0), 0.0);
            if far(&poles, p) {
                poles.push(p);
                let mut r: f64 = rng.gen_range(-1.0..1.0);
                if r.abs() < 0.1 {
                    r = 0.1f64.copysign(r);
                }
                residues.push(Complex64::new(r, 0.0));
                break;
            }
        }
    }
    Modal {
        poles,
        residues,
        d: 0.0,
    }
}

/// A dense descriptor realization `(E, A, b, c)`.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub e: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
}

impl DenseSystem {
    /// `cᵀ(sE − A)⁻¹b` by a fresh complex LU.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let n = self.a.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| s * self.e[(i, j)] - self.a[(i, j)]);
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let x = m.lu().solve(&b).expect("pencil singular at evaluation point");
        self.c.iter().zip(x.iter()).map(|(c, x)| c * x).sum()
    }
}

/// Random dense stable descriptor system of order `n`.
///
/// `E` is symmetric positive definite and `A + Aᵀ` negative definite, which
/// places every generalized eigenvalue in the open left half-plane.
pub fn random_dense_stable<R: Rng>(rng: &mut R, n: usize) -> DenseSystem {
    let mut normal = || {
        // Box–Muller
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
    };
    let k = DMatrix::from_fn(n, n, |_, _| normal() / (n as f64).sqrt());
    let s = DMatrix::from_fn(n, n, |_, _| 2.0 * normal());
    let skew = (&s - s.transpose()) * 0.5;
    let a = skew - &k * k.transpose() - DMatrix::identity(n, n) * 0.2;
    let m = DMatrix::from_fn(n, n, |_, _| normal() / (n as f64).sqrt());
    let e = DMatrix::identity(n, n) + &m * m.transpose() * 0.3;
    let b = DVector::from_fn(n, |_, _| normal());
    let c = DVector::from_fn(n, |_, _| normal());
    DenseSystem { e, a, b, c }
}
