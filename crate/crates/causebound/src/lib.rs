//! Sharp bounds and point identification for the probabilities of causation
//! (PN, PS, PNS) from experimental and observational 2x2 data.
//!
//! The library estimates evidence from count data, evaluates every
//! closed-form bound and identification formula applicable under declared
//! assumptions (exogeneity, strong exogeneity, monotonicity), and certifies
//! each closed form against an exact linear-programming oracle that
//! enumerates the vertices of the response-profile polytope in rational
//! arithmetic. A seeded sampler replays containment, sharpness, and identity
//! claims against generated ground truth.
//!
//! All computation is exact; floating point appears only in rendered output.

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod lp;
pub mod model;
pub mod rational;
pub mod sampler;

pub use bounds::{
    bounds_combined, bounds_exogenous, bounds_experimental, bounds_observational,
    closed_form_bounds, effect_bounds_monotone, identify_exo_monotone, identify_monotone,
    strong_exo_relations, AttributionMeasures, BoundsReport, EffectBounds, MeasureBound,
    Provenance,
};
pub use diagnostics::{
    assumption_report, check_compatibility, check_monotonicity_compatibility, test_exogeneity,
    DiagnosticReport, ExogeneityCheck, Inequality, PnEstimator, Verdict, Violation,
};
pub use error::{Error, Result};
pub use lp::{
    build_polytope, feasible, sharp_bounds, witness_for_bound, BoundTarget, ConstraintSystem,
    LinearForm, OptimaPair,
};
pub use model::{
    AssumptionSet, CausalEffects, CausationMeasures, CountTable, DatasetCounts, Interval,
    JointDistribution, ResponseProfile,
};
pub use rational::Rat;
pub use sampler::{
    sample_profile, verify_bounds_trial, verify_bounds_trial_with, DefectInjection, Discrepancy,
    Regime, SamplerConfig, VerificationReport,
};
