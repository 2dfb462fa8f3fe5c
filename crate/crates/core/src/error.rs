use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels, system representations and
/// reduction algorithms.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("descriptor matrix E is singular")]
    SingularE,

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("pencil is not asymptotically stable (eigenvalue {0})")]
    UnstablePencil(Complex64),

    #[error(
        "quadrature tolerance not met after {evaluations} evaluations (estimate {estimate:.6e}, error {error:.3e})"
    )]
    ToleranceNotMet {
        evaluations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("evaluation point {0} is a pole")]
    EvalAtPole(Complex64),

    #[error("poles are not simple: cluster {0:?}")]
    NonSimplePoles(Vec<Complex64>),

    #[error("pole/residue list is not closed under conjugation at pole {0}")]
    ConjugationViolation(Complex64),

    #[error("feedback loop is ill-posed: 1 + G(s)P(s) vanishes near s = {0}")]
    IllPosedLoop(Complex64),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("integration step {dt:.3e} exceeds the stability guard {limit:.3e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("operands share a pole near {0}")]
    CommonPoles(Complex64),

    #[error("weight has non-simple poles: cluster {0:?}")]
    NonSimpleWeightPoles(Vec<Complex64>),

    #[error("pole {0} has multiplicity three or higher")]
    UnsupportedMultiplicity(Complex64),

    #[error("operand is not strictly proper (feedthrough {0})")]
    NotStrictlyProper(f64),

    #[error("squared norm is negative beyond roundoff ({radicand:.6e}, scale {scale:.3e})")]
    NegativeRadicand { radicand: f64, scale: f64 },

    #[error("imaginary leakage {leak:.3e} exceeds tolerance relative to {scale:.3e}")]
    ImaginaryLeakage { leak: f64, scale: f64 },

    #[error("shift {0} coincides with a pole")]
    ShiftAtPole(Complex64),

    #[error("all basis columns are linearly dependent")]
    TotalRankCollapse,

    #[error("reduced descriptor matrix is singular")]
    SingularReducedE,

    #[error("reduced pencil has unstable eigenvalue {eigenvalue} at iteration {iteration}")]
    UnstableReducedPencil { iteration: usize, eigenvalue: Complex64 },

    #[error("iteration did not converge in {iterations} steps (last relative change {last_change:.3e})")]
    NotConverged {
        iterations: usize,
        last_change: f64,
        /// Best iterate found, with its report.
        best: Option<Box<crate::reduce::Reduction>>,
    },

    #[error("Gramian is rank deficient: {0}")]
    RankDeficientGramian(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
