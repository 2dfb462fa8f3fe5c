//! Dense numerical kernels: complex LU solves, generalized eigenproblems,
//! Lyapunov equations and adaptive quadrature over the real line.

mod eig;
mod lu;
mod lyap;
mod quad;

pub use eig::{check_nonsingular, gen_eig, pencil_eigenvalues, spectrum_order, GenEigResult, SINGULAR_E_RTOL};
pub use lu::{norm_inf, real_inverse, solve_complex, to_complex, ComplexLu};
pub use lyap::{lyap_residual, lyap_solve};
pub use quad::{quad_half_line, quad_line, quad_line_with, QuadOptions, DEFAULT_MAX_EVALS};
