use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("result at depth {depth} leaves the truncation window [0, {w_max}]")]
    OutOfWindow { depth: i64, w_max: usize },

    #[error("target vector is not in the span of the supplied basis")]
    NotInSpan,

    #[error("product of weight {weight} exceeds the model window {w_max}")]
    UnresolvableProduct { weight: i64, w_max: usize },

    #[error("modes at positions {0} and {1} do not share an index")]
    NotARepeat(usize, usize),

    #[error("rule {rule} does not apply: {reason}")]
    Inapplicable { rule: &'static str, reason: String },

    #[error("supplied rewriting does not reproduce the product of -1 modes")]
    BadRewrite,

    #[error("codimension of C2 does not stabilize inside the window (last nonzero weight {last_nonzero}, window {w_max})")]
    NotCofiniteInWindow { last_nonzero: usize, w_max: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("spanning set has rank {rank} at weight {depth} but the graded piece has dimension {dim}")]
    SpanDeficit { depth: usize, rank: usize, dim: usize },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("base ket {0} does not match the model")]
    BaseMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
