use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} objects, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a permutation of 1..={m}: {detail}")]
    InvalidPermutation { m: usize, detail: String },

    #[error("relevance values must be 0 or 1, got {0}")]
    InvalidRelevance(u8),

    #[error("outcome index {index} out of range for m = {m}")]
    OutcomeIndex { m: usize, index: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("pairwise loss has no linear f(sigma)·R form")]
    NoLinearForm,

    #[error("empty relevance sequence")]
    EmptySequence,

    #[error("feedback depth k = {k} must satisfy 1 <= k <= m = {m}")]
    InvalidDepth { m: usize, k: usize },

    #[error("m = {m} exceeds the explicit-matrix cap of {cap}")]
    SizeCap { m: usize, cap: usize },

    #[error("action index {index} out of range ({count} actions)")]
    ActionIndex { index: usize, count: usize },

    #[error("actions {0} and {1} are not neighbors")]
    NotNeighbors(usize, usize),

    #[error("certificate is inconsistent with the game: {0}")]
    InvalidCertificate(String),

    #[error("reduced game needs 1 <= n < m, got n = {n}, m = {m}")]
    InvalidCutoff { m: usize, n: usize },

    #[error(
        "gamma = {gamma:.4} is not below 1 at horizon {horizon}; \
         use a horizon of at least {min_horizon} or override --gamma/--eta"
    )]
    GammaTooLarge {
        gamma: f64,
        horizon: usize,
        min_horizon: usize,
    },

    #[error("invalid learner parameter: {0}")]
    InvalidParameter(String),

    #[error("stationary distribution did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("invalid adversary: {0}")]
    InvalidAdversary(String),

    #[error("learner returned an invalid action: {0}")]
    InvalidAction(String),

    #[error("full-information follow-the-leader needs k = m (got k = {k}, m = {m})")]
    FullInfoRequiresFullFeedback { m: usize, k: usize },

    #[error("sweep grid is empty")]
    EmptyGrid,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
