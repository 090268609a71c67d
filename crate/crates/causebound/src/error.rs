//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by estimation, bound evaluation, the LP oracle, and the
/// sampler.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Observational counts sum to zero; no distribution can be estimated.
    #[error("observational counts are all zero")]
    ZeroTotal,

    /// An experimental treatment group has no subjects.
    #[error("experimental arm {arm} has zero total")]
    EmptyArm {
        /// `"x"` or `"x'"`.
        arm: &'static str,
    },

    /// A supplied probability lies outside `[0, 1]`.
    #[error("{quantity} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { quantity: String, value: String },

    /// Cells of a distribution do not sum to 1 within tolerance.
    #[error("{what} cells sum to {sum}, not 1")]
    NotNormalized { what: &'static str, sum: String },

    /// Interval endpoints are not ordered within `[0, 1]`.
    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: String, upper: String },

    /// A ratio conditions on a zero-probability event.
    #[error("{quantity} is undefined: {denominator} = 0")]
    UndefinedConditional {
        quantity: &'static str,
        denominator: &'static str,
    },

    /// Experimental and observational evidence cannot coexist.
    #[error("evidence incompatible: {violation}")]
    IncompatibleEvidence { violation: String },

    /// Evidence rules out monotonicity.
    #[error("monotonicity incompatible with evidence: {violation}")]
    MonotonicityIncompatible { violation: String },

    /// An operation requiring evidence received none, or an assumption
    /// references evidence that is absent.
    #[error("missing evidence: {detail}")]
    MissingEvidence { detail: &'static str },

    /// Exogeneity was declared but the supplied effects differ from the
    /// observational conditionals.
    #[error("exogeneity declared but contradicted: {detail}")]
    InconsistentExogeneityDeclaration { detail: String },

    /// The constraint polytope is empty.
    #[error("constraint system is infeasible")]
    InfeasibleSystem,

    /// The sampler could not satisfy the positivity floor.
    #[error("positivity floor {floor} cannot be met under the requested constraints")]
    FloorUnsatisfiable { floor: String },

    /// Sampler configuration violates its invariants.
    #[error("invalid sampler configuration: {detail}")]
    InvalidConfig { detail: String },

    /// A declared assumption is contradicted by the data.
    #[error("declared assumption contradicted by data: {assumption}")]
    AssumptionContradiction { assumption: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
