//! Reference computations used to cross-check `wh2-core`.
//!
//! Nothing here shares code with the core crate. Transfer functions are
//! plain closures, integrals use a separate Gauss–Legendre rule, and
//! Lyapunov equations are solved by Kronecker vectorization.

pub mod gen;
pub mod lyap;
pub mod optimum;
pub mod poly;
pub mod quad;

pub use gen::{random_dense_stable, random_modal, DenseSystem, Modal};
pub use lyap::{h2_norm_sq_kron, kron_lyap};
pub use optimum::{first_order_optimum, FirstOrderOptimum};
pub use poly::{char_poly, poly_roots};
pub use quad::{inner_quad, integrate, integrate_line, norm_sq_quad, peaks};

use num_complex::Complex64;

/// A transfer function as seen by the oracles: just its values.
pub trait Tf: Fn(Complex64) -> Complex64 {}
impl<F: Fn(Complex64) -> Complex64> Tf for F {}
