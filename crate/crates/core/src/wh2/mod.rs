//! Weighted-H2 inner products, norms, the 𝔉 map and error expressions by
//! residue calculus, plus a quadrature path that only evaluates transfer
//! functions.

mod checks;
mod error_expr;
mod fmap;
mod inner;
mod optimality;
mod quad;

pub use checks::{CLASH_RTOL, LEAKAGE_RTOL};
pub use error_expr::{
    weighted_error, weighted_error_expr, weighted_error_quad, ErrorBreakdown, ErrorPath, WeightedError,
};
pub use fmap::{f_map_deriv, f_map_eval, f_map_residues, FMap, MirroredResidue, REMOVABLE_RTOL};
pub use inner::{
    weighted_inner, weighted_norm, Branch, HPoleTerm, InnerOperand, InnerProductBreakdown, LaurentTerm,
    PoleContribution, WeightedNorm,
};
pub use optimality::{optimality_residuals, OptimalityResidual};
pub use quad::{resonance_breakpoints, weighted_norm_quad, weighted_norm_sq_quad_with};

#[cfg(test)]
mod tests;
