use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::prf::{PoleResidueForm, PoleTerm};
use super::statespace::StateSpace;
use crate::error::{Error, Result};

/// Parameters of the synthetic lightly damped modal family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalBenchmark {
    pub order: usize,
    pub seed: u64,
    pub damping_range: (f64, f64),
    pub freq_range: (f64, f64),
    /// Geometric ratio between the residue magnitudes of consecutive modes.
    pub residue_decay: f64,
}

impl ModalBenchmark {
    pub fn new(order: usize, seed: u64) -> Self {
        Self {
            order,
            seed,
            damping_range: (0.02, 0.2),
            freq_range: (0.5, 50.0),
            residue_decay: 0.7,
        }
    }

    pub fn with_damping(mut self, min: f64, max: f64) -> Self {
        self.damping_range = (min, max);
        self
    }

    pub fn with_frequencies(mut self, min: f64, max: f64) -> Self {
        self.freq_range = (min, max);
        self
    }

    pub fn with_decay(mut self, rate: f64) -> Self {
        self.residue_decay = rate;
        self
    }

    fn validate(&self) -> Result<()> {
        let (zmin, zmax) = self.damping_range;
        let (wmin, wmax) = self.freq_range;
        if self.order == 0 {
            return Err(Error::InvalidRange("order must be at least 1".into()));
        }
        if !(zmin > 0.0 && zmin <= zmax && zmax < 1.0) {
            return Err(Error::InvalidRange(format!("damping range ({zmin}, {zmax})")));
        }
        if !(wmin > 0.0 && wmin <= wmax && wmax.is_finite()) {
            return Err(Error::InvalidRange(format!("frequency range ({wmin}, {wmax})")));
        }
        if !(self.residue_decay > 0.0 && self.residue_decay <= 1.0) {
            return Err(Error::InvalidRange(format!("residue decay {}", self.residue_decay)));
        }
        Ok(())
    }

    /// Mode `k` has residue magnitude `decay^k`; complex modes come as
    /// conjugate pairs `−ζω ± iω√(1−ζ²)` and an odd order adds one real pole.
    pub fn pole_residue(&self) -> Result<PoleResidueForm> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (zmin, zmax) = self.damping_range;
        let (wmin, wmax) = self.freq_range;
        let pairs = self.order / 2;
        let mut terms = Vec::with_capacity(self.order);
        let mut placed: Vec<Complex64> = Vec::new();
        let separated =
            |p: Complex64, placed: &[Complex64]| placed.iter().all(|q| (p - q).norm() > 1e-6 * p.norm().max(q.norm()));
        for k in 0..pairs {
            let mag = self.residue_decay.powi(k as i32);
            let pole = loop {
                let zeta = if zmax > zmin { rng.gen_range(zmin..=zmax) } else { zmin };
                let omega = if wmax > wmin {
                    rng.gen_range(wmin.ln()..=wmax.ln()).exp()
                } else {
                    wmin
                };
                let p = Complex64::new(-zeta * omega, omega * (1.0 - zeta * zeta).sqrt());
                if separated(p, &placed) {
                    break p;
                }
            };
            let phase = rng.gen_range(-PI..PI);
            let residue = Complex64::from_polar(mag, phase);
            placed.push(pole);
            placed.push(pole.conj());
            terms.push(PoleTerm::new(pole, residue));
            terms.push(PoleTerm::new(pole.conj(), residue.conj()));
        }
        if self.order % 2 == 1 {
            let mag = self.residue_decay.powi(pairs as i32);
            let pole = loop {
                let omega = if wmax > wmin {
                    rng.gen_range(wmin.ln()..=wmax.ln()).exp()
                } else {
                    wmin
                };
                let p = Complex64::new(-omega, 0.0);
                if separated(p, &placed) {
                    break p;
                }
            };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            terms.push(PoleTerm::new(pole, Complex64::new(sign * mag, 0.0)));
        }
        PoleResidueForm::new(terms, 0.0)
    }

    pub fn build(&self) -> Result<StateSpace> {
        self.pole_residue()?.to_state_space()
    }
}

/// Deterministic synthetic modal benchmark: stable, simple poles, with
/// geometrically decaying residue magnitudes.
pub fn make_modal_benchmark(
    n: usize,
    seed: u64,
    damping_range: (f64, f64),
    freq_range: (f64, f64),
    residue_decay: f64,
) -> Result<StateSpace> {
    ModalBenchmark {
        order: n,
        seed,
        damping_range,
        freq_range,
        residue_decay,
    }
    .build()
}
