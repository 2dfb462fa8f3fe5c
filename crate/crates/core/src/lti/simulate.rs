use nalgebra::{DMatrix, DVector};

use super::statespace::StateSpace;
use crate::error::{Error, Result};

struct Integrator {
    m: DMatrix<f64>,
    g: DVector<f64>,
    c: DVector<f64>,
    d: f64,
    dt: f64,
}

impl Integrator {
    fn new(sys: &StateSpace, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidRange(format!("time step {dt}")));
        }
        let poles = sys.poles()?;
        let lam_max = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if lam_max > 0.0 {
            let limit = 0.1 / lam_max;
            if dt > limit {
                return Err(Error::StepTooLarge { dt, limit });
            }
        }
        let std = sys.to_standard()?;
        Ok(Self {
            m: std.a().clone(),
            g: std.b().clone(),
            c: std.c().clone(),
            d: std.d(),
            dt,
        })
    }

    fn rhs(&self, x: &DVector<f64>, u: f64) -> DVector<f64> {
        &self.m * x + &self.g * u
    }

    fn step(&self, x: &DVector<f64>, u0: f64, um: f64, u1: f64) -> DVector<f64> {
        let h = self.dt;
        let k1 = self.rhs(x, u0);
        let k2 = self.rhs(&(x + &k1 * (0.5 * h)), um);
        let k3 = self.rhs(&(x + &k2 * (0.5 * h)), um);
        let k4 = self.rhs(&(x + &k3 * h), u1);
        x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }
}

/// Input value halfway between samples `k` and `k + 1` by four-point
/// Lagrange interpolation (linear when fewer than four samples exist).
fn midpoint(u: &[f64], k: usize) -> f64 {
    let n = u.len();
    if n < 4 {
        return 0.5 * (u[k] + u[(k + 1).min(n - 1)]);
    }
    if k >= 1 && k + 2 < n {
        (-u[k - 1] + 9.0 * u[k] + 9.0 * u[k + 1] - u[k + 2]) / 16.0
    } else if k == 0 {
        0.3125 * u[0] + 0.9375 * u[1] - 0.3125 * u[2] + 0.0625 * u[3]
    } else {
        0.3125 * u[k + 1] + 0.9375 * u[k] - 0.3125 * u[k - 1] + 0.0625 * u[k - 2]
    }
}

/// Output samples `y(t_k)`, `t_k = k·dt`, for input samples `u(t_k)`,
/// integrating `ẋ = E⁻¹(A x + b u)` from `x(0) = 0` with classical RK4.
pub fn simulate(sys: &StateSpace, input: &[f64], dt: f64) -> Result<Vec<f64>> {
    if input.is_empty() {
        return Ok(Vec::new());
    }
    let integ = Integrator::new(sys, dt)?;
    let mut x = DVector::zeros(sys.order());
    let mut y = Vec::with_capacity(input.len());
    for k in 0..input.len() {
        y.push(integ.c.dot(&x) + integ.d * input[k]);
        if k + 1 < input.len() {
            x = integ.step(&x, input[k], midpoint(input, k), input[k + 1]);
        }
    }
    Ok(y)
}

/// Impulse response samples (strictly proper part): `x(0) = E⁻¹b`, `u = 0`.
pub fn impulse_response(sys: &StateSpace, dt: f64, steps: usize) -> Result<Vec<f64>> {
    let integ = Integrator::new(sys, dt)?;
    let mut x = integ.g.clone();
    let mut y = Vec::with_capacity(steps);
    for _ in 0..steps {
        y.push(integ.c.dot(&x));
        x = integ.step(&x, 0.0, 0.0, 0.0);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order() -> StateSpace {
        StateSpace::standard(
            DMatrix::from_element(1, 1, -1.0),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn unit_step_response() {
        let dt = 0.01;
        let u = vec![1.0; 101];
        let y = simulate(&first_order(), &u, dt).unwrap();
        assert!((y[100] - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn zero_input_zero_output() {
        let y = simulate(&first_order(), &[0.0; 50], 0.05).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sinusoidal_steady_state_amplitude() {
        let dt = 0.01;
        let n = 4000;
        let u: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 * dt).cos()).collect();
        let y = simulate(&first_order(), &u, dt).unwrap();
        let tail = &y[n - 400..];
        let amp = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((amp - 1.0 / 5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn fourth_order_convergence() {
        let sys = first_order();
        let t_end = 2.0;
        let run = |dt: f64| {
            let n = (t_end / dt).round() as usize + 1;
            let u: Vec<f64> = (0..n).map(|k| (3.0 * k as f64 * dt).sin()).collect();
            *simulate(&sys, &u, dt).unwrap().last().unwrap()
        };
        let e1 = (run(0.04) - run(0.02)).abs();
        let e2 = (run(0.02) - run(0.01)).abs();
        // ratio near 16 for a fourth-order method
        assert!(e1 / e2 > 10.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn step_guard() {
        assert!(matches!(
            simulate(&first_order(), &[1.0; 3], 0.5),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
