//! SISO LTI systems in state-space and pole-residue form.

mod benchmark;
mod connect;
mod prf;
mod simulate;
mod statespace;
mod text;

use num_complex::Complex64;

pub use benchmark::{make_modal_benchmark, ModalBenchmark};
pub use connect::{feedback_connect, probe_grid, weight_from_loop};
pub use prf::{PoleResidueForm, PoleTerm, SIMPLE_POLE_RTOL};
pub use simulate::{impulse_response, simulate};
pub use statespace::StateSpace;
pub use text::{parse, serialize};

use crate::error::Result;

/// Anything with a rational SISO transfer function.
pub trait TransferFunction {
    fn tf_eval(&self, s: Complex64) -> Result<Complex64>;
    fn tf_deriv(&self, s: Complex64) -> Result<Complex64>;

    /// Poles, when cheaply available; used to place quadrature breakpoints.
    fn pole_hint(&self) -> Vec<Complex64> {
        Vec::new()
    }
}

impl TransferFunction for StateSpace {
    fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        StateSpace::tf_eval(self, s)
    }

    fn tf_deriv(&self, s: Complex64) -> Result<Complex64> {
        StateSpace::tf_deriv(self, s)
    }

    fn pole_hint(&self) -> Vec<Complex64> {
        self.poles().unwrap_or_default()
    }
}

impl TransferFunction for PoleResidueForm {
    fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        PoleResidueForm::tf_eval(self, s)
    }

    fn tf_deriv(&self, s: Complex64) -> Result<Complex64> {
        PoleResidueForm::tf_deriv(self, s)
    }

    fn pole_hint(&self) -> Vec<Complex64> {
        self.poles()
    }
}

pub fn tf_eval<T: TransferFunction + ?Sized>(sys: &T, s: Complex64) -> Result<Complex64> {
    sys.tf_eval(s)
}

pub fn tf_deriv<T: TransferFunction + ?Sized>(sys: &T, s: Complex64) -> Result<Complex64> {
    sys.tf_deriv(s)
}

pub fn pole_residue(sys: &StateSpace) -> Result<PoleResidueForm> {
    sys.pole_residue()
}

pub fn from_pole_residue(prf: &PoleResidueForm) -> Result<StateSpace> {
    prf.to_state_space()
}

pub fn is_stable(sys: &StateSpace) -> Result<bool> {
    sys.is_stable()
}

/// `A(s) − B(s)` evaluated pointwise.
#[derive(Debug, Clone, Copy)]
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: TransferFunction + ?Sized, B: TransferFunction + ?Sized> TransferFunction for Difference<'_, A, B> {
    fn tf_eval(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.0.tf_eval(s)? - self.1.tf_eval(s)?)
    }

    fn tf_deriv(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.0.tf_deriv(s)? - self.1.tf_deriv(s)?)
    }

    fn pole_hint(&self) -> Vec<Complex64> {
        let mut p = self.0.pole_hint();
        p.extend(self.1.pole_hint());
        p
    }
}
