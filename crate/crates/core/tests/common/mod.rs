#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wh2_core::lti::{PoleResidueForm, PoleTerm, StateSpace};
use wh2_oracle::{DenseSystem, Modal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn prf(m: &Modal) -> PoleResidueForm {
    let terms = m
        .poles
        .iter()
        .zip(&m.residues)
        .map(|(&p, &r)| PoleTerm::new(p, r))
        .collect();
    PoleResidueForm::new(terms, m.d).expect("generated system is valid")
}

pub fn state_space(d: &DenseSystem) -> StateSpace {
    StateSpace::new(d.e.clone(), d.a.clone(), d.b.clone(), d.c.clone(), 0.0).expect("valid realization")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Random stable pair `(G, W)` with orders in `1..=n_max` and `1..=p_max`.
pub fn random_pair(seed: u64, n_max: usize, p_max: usize) -> (Modal, Modal) {
    use rand::Rng;
    let mut r = rng(seed);
    let n = r.gen_range(1..=n_max);
    let p = r.gen_range(1..=p_max);
    (wh2_oracle::random_modal(&mut r, n), wh2_oracle::random_modal(&mut r, p))
}

pub fn breaks(ms: &[&Modal]) -> Vec<f64> {
    let poles: Vec<Complex64> = ms.iter().flat_map(|m| m.poles.iter().copied()).collect();
    wh2_oracle::peaks(&poles)
}

pub fn one() -> Modal {
    Modal {
        poles: vec![],
        residues: vec![],
        d: 1.0,
    }
}
