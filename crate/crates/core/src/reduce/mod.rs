//! Interpolatory projection, dominant-pole selection and the IRKA and
//! W-IRKA iterations.

mod basis;
mod dominance;
mod iteration;
mod shifts;

pub use basis::{
    build_basis_v, build_basis_w, project, Basis, BasisSide, DeflationEvent, ReductionBases, DEFLATION_RTOL,
};
pub use dominance::{dominant_poles, suggest_dominant_count, DominanceMetric, DominantSelection, SelectionAdjustment};
pub use iteration::{
    hermite_residuals, interpolation_residuals, irka, irka_with, wirka, IrkaConfig, MirrorEvent, RankTruncation,
    Reduction, ReductionReport, UnstableShiftPolicy, WirkaConfig, WirkaReport,
};
pub use shifts::{ShiftOrigin, ShiftSet};
