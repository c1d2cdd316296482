use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QvpError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("denominator {value:e} is not positive (threshold {threshold:e})")]
    DenominatorNonPositive { value: f64, threshold: f64 },

    #[error("numerator {value:e} of a convex-over-concave ratio is negative")]
    NonnegativityViolated { value: f64 },

    #[error("feasible set is empty")]
    InfeasibleSet,

    #[error(
        "denominator of objective {objective} is not positive at simplex vertex {vertex}; \
         supply the upper corner M in the problem file"
    )]
    DenominatorNonPositiveOnSimplex { objective: usize, vertex: usize },

    #[error("ideal point {m:?} is attained; the nondominated set is this single point")]
    DegenerateIdealAttained { m: Vec<f64>, witness: Vec<f64> },

    #[error("box is degenerate: m must be strictly below M componentwise (m = {m:?}, M = {upper:?})")]
    DegenerateBox { m: Vec<f64>, upper: Vec<f64> },

    #[error("vertex #{0} is not in the vertex set")]
    VertexNotInSet(u64),

    #[error("cut point is not above the cut vertex")]
    WNotAbove,

    #[error("bisection bracket inverted: t_lo = {t_lo}, t_hi = {t_hi}")]
    BracketInversion { t_lo: f64, t_hi: f64 },

    #[error("scalarization cap of {0} exceeded")]
    IterationCapExceeded(usize),

    #[error("point is infeasible (violation {violation:e})")]
    InfeasiblePoint { violation: f64 },

    #[error("iterate diverged (norm {0:e})")]
    Diverged(f64),

    #[error("direction must be strictly positive")]
    NonPositiveDirection,
}

pub type Result<T> = std::result::Result<T, QvpError>;
