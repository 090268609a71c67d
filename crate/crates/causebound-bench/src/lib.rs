//! Shared inputs for the benchmarks.

use causebound::{CausalEffects, CountTable, JointDistribution, SamplerConfig};

/// The combined drug-study instance used throughout the documentation.
pub fn study_instance() -> (JointDistribution, CausalEffects) {
    let joint = JointDistribution::from_counts(&CountTable::new(2, 998, 28, 972)).unwrap();
    let effects = CausalEffects::from_counts(&CountTable::new(16, 984, 14, 986)).unwrap();
    (joint, effects)
}

/// Evidence generated from the sampled profile at `(seed, index)`.
pub fn sampled_instance(
    config: &SamplerConfig,
    index: usize,
) -> (JointDistribution, CausalEffects) {
    causebound::sample_profile(config, index)
        .expect("sampling succeeds for benchmark configs")
        .observables()
}
