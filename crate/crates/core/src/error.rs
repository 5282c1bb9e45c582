use crate::rational::Rational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("table has {got} entries, scenario needs {expected}")]
    TableSize { expected: usize, got: usize },

    #[error("negative entry {value} at table index {index}")]
    NegativeEntry { index: usize, value: Rational },

    #[error("outputs for input tuple {inputs:?} sum to {sum}, not 1")]
    NormalizationFailure { inputs: Vec<usize>, sum: Rational },

    #[error("box is signaling: {0}")]
    SignalingBox(String),

    #[error("conditioning event has zero probability")]
    ZeroProbabilityCondition,

    #[error("bad permutation: {0}")]
    BadPermutation(String),

    #[error("bad mixture weights: {0}")]
    WeightError(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("invalid party subset: {0}")]
    BadSubset(String),

    #[error("deterministic strategy space has {count} elements, cap is {cap}")]
    StrategySpaceTooLarge { count: u128, cap: u128 },

    #[error("local model does not reproduce the box")]
    ModelMismatch,

    #[error("extension table would have {entries} entries, cap is {cap}")]
    ExtensionTooLarge { entries: u128, cap: u128 },

    #[error("not a valid extension: {0}")]
    NotAnExtension(String),

    #[error("functional has no unique nonsignaling maximizer")]
    NotUniqueMaximizer,

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("box is not isotropic")]
    NotIsotropic,

    #[error("bad observable pair: {0}")]
    BadPair(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("degenerate functional: {0}")]
    DegenerateFunctional(String),

    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),

    /// An LP that is feasible by construction came back infeasible or unbounded.
    #[error("internal LP failure: {0}")]
    Internal(String),
}
