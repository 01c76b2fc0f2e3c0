use alloc::vec::Vec;
use core::fmt;

/// One accepted iterate of the two-parameter boundary-condition solve,
/// kept for diagnosis when the iteration fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonStep {
    pub energy: f64,
    pub zeta: f64,
    pub mismatch: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The quartic coupling must be strictly positive; the opposite-sign
    /// family admits a different (finitely terminating) construction and is
    /// not handled by this solver.
    NonPositiveQuartic { a: f64 },
    NonFiniteParameter { name: &'static str, value: f64 },
    InvalidArgument { what: &'static str },
    /// Gaussian exponent too small for the cubic coupling; the coefficient
    /// recurrence loses its dominant growing pair below `min_s`.
    GrowthConstraint { s: f64, min_s: f64 },
    NonFiniteCoefficient { index: usize },
    NonFiniteMatrixEntry { row: usize, col: usize },
    DimensionTooSmall { dim: usize, min: usize },
    DeterminantOrderTooLarge { requested: usize, max: usize },
    QrNoConvergence { block_end: usize, sweeps: usize },
    SingularShiftedSystem { attempts: usize },
    DegenerateLeadingPair,
    InverseIterationStalled { residual: f64 },
    TailNotNegligible { x_abs: f64, order: usize },
    FitRangeTooSmall { lo: usize, hi: usize, min_span: usize },
    TooFewEnvelopePoints { found: usize, needed: usize },
    NewtonDidNotConverge { mismatch: f64, trail: Vec<NewtonStep> },
    SingularJacobian { energy: f64 },
    SequenceTooShort { len: usize, needed: usize },
    LevelOutOfRange { level: usize, available: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveQuartic { a } => write!(
                f,
                "quartic coupling a = {a} is not positive; only the confining a > 0 family is supported"
            ),
            Error::NonFiniteParameter { name, value } => {
                write!(f, "parameter {name} = {value} is not finite")
            }
            Error::InvalidArgument { what } => write!(f, "{what}"),
            Error::GrowthConstraint { s, min_s } => write!(
                f,
                "gaussian exponent s = {s} violates s > |beta|/(4*sqrt(3)); smallest admissible s is {min_s:e}"
            ),
            Error::NonFiniteCoefficient { index } => {
                write!(f, "coefficient recurrence produced a non-finite value at index {index}")
            }
            Error::NonFiniteMatrixEntry { row, col } => {
                write!(f, "matrix entry ({row}, {col}) is not finite")
            }
            Error::DimensionTooSmall { dim, min } => {
                write!(f, "matrix dimension {dim} is below the minimum {min}")
            }
            Error::DeterminantOrderTooLarge { requested, max } => write!(
                f,
                "determinant evaluation requested up to order {requested}, supported up to {max}; use the forward recurrence for longer sequences"
            ),
            Error::QrNoConvergence { block_end, sweeps } => write!(
                f,
                "QR iteration failed to deflate the block ending at index {block_end} after {sweeps} sweeps"
            ),
            Error::SingularShiftedSystem { attempts } => write!(
                f,
                "shifted banded system stayed exactly singular after {attempts} perturbed factorizations"
            ),
            Error::DegenerateLeadingPair => write!(
                f,
                "eigenvector has vanishing leading coefficient pair; no phase angle can be assigned"
            ),
            Error::InverseIterationStalled { residual } => write!(
                f,
                "inverse iteration stalled with relative residual {residual:e}"
            ),
            Error::TailNotNegligible { x_abs, order } => write!(
                f,
                "series tail is not negligible at |x| = {x_abs}; increase the truncation order (currently {order})"
            ),
            Error::FitRangeTooSmall { lo, hi, min_span } => write!(
                f,
                "fit range [{lo}, {hi}] spans fewer than {min_span} indices"
            ),
            Error::TooFewEnvelopePoints { found, needed } => write!(
                f,
                "only {found} envelope points available, need at least {needed}"
            ),
            Error::NewtonDidNotConverge { mismatch, trail } => write!(
                f,
                "boundary-condition solve did not converge; final mismatch {mismatch:e} after {} iterations",
                trail.len()
            ),
            Error::SingularJacobian { energy } => write!(
                f,
                "boundary-condition Jacobian is singular near E = {energy}"
            ),
            Error::SequenceTooShort { len, needed } => {
                write!(f, "coefficient sequence has {len} entries, need at least {needed}")
            }
            Error::LevelOutOfRange { level, available } => write!(
                f,
                "level {level} requested but only {available} real levels were found at this truncation"
            ),
        }
    }
}

impl core::error::Error for Error {}
