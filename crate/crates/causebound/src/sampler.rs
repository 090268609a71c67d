//! Seeded generation of response profiles under optional assumption
//! constraints, and the verification harness that replays every bound,
//! identity, and sharpness claim against sampled ground truth.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{
    bounds_combined, bounds_exogenous, bounds_experimental, bounds_observational,
    closed_form_bounds, identify_exo_monotone, identify_monotone, strong_exo_relations,
    BoundsReport, MeasureBound,
};
use crate::error::{Error, Result};
use crate::lp::{build_polytope, sharp_bounds};
use crate::model::{AssumptionSet, CausalEffects, JointDistribution, ResponseProfile};
use crate::rational::{rat, rational_string, Rat};

pub use crate::lp::{witness_for_bound, BoundTarget};

/// Granularity of the integer-composition sampler: every sampled entry is a
/// multiple of `1/RESOLUTION`, keeping downstream arithmetic exact and small.
const RESOLUTION: u64 = 1000;

/// Resampling budget for the positivity floor before giving up.
const MAX_ATTEMPTS: u32 = 10_000;

/// A named verification regime: the assumption set under which profiles are
/// sampled and bounds are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoAssumptions,
    Exogeneity,
    Monotonicity,
    StrongExogeneity,
    ExoMonotonicity,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::NoAssumptions,
        Regime::Exogeneity,
        Regime::Monotonicity,
        Regime::StrongExogeneity,
        Regime::ExoMonotonicity,
    ];

    pub fn assumptions(&self) -> AssumptionSet {
        match self {
            Regime::NoAssumptions => AssumptionSet::NONE,
            Regime::Exogeneity => AssumptionSet::exogeneity(),
            Regime::Monotonicity => AssumptionSet::monotonicity(),
            Regime::StrongExogeneity => AssumptionSet::strong_exogeneity(),
            Regime::ExoMonotonicity => AssumptionSet::exo_monotonicity(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::NoAssumptions => "none",
            Regime::Exogeneity => "exogeneity",
            Regime::Monotonicity => "monotonicity",
            Regime::StrongExogeneity => "strong-exogeneity",
            Regime::ExoMonotonicity => "exogeneity+monotonicity",
        }
    }
}

/// Configuration of a sampling or verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    seed: u64,
    count: usize,
    constraints: AssumptionSet,
    positivity_floor: Rat,
}

impl SamplerConfig {
    /// `count` must be positive and the positivity floor must lie in
    /// `[0, 1/4)` so that both conditioning cells can reach it.
    pub fn new(
        seed: u64,
        count: usize,
        constraints: AssumptionSet,
        positivity_floor: Rat,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidConfig {
                detail: "count must be at least 1".into(),
            });
        }
        if positivity_floor.is_negative() || positivity_floor >= rat(1, 4) {
            return Err(Error::InvalidConfig {
                detail: format!(
                    "positivity floor {} is outside [0, 1/4)",
                    rational_string(&positivity_floor)
                ),
            });
        }
        Ok(SamplerConfig {
            seed,
            count,
            constraints,
            positivity_floor,
        })
    }

    /// Default positivity floor `1/100`, keeping PN and PS denominators
    /// well away from zero.
    pub fn with_default_floor(seed: u64, count: usize, constraints: AssumptionSet) -> Result<Self> {
        Self::new(seed, count, constraints, rat(1, 100))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn constraints(&self) -> &AssumptionSet {
        &self.constraints
    }

    pub fn positivity_floor(&self) -> &Rat {
        &self.positivity_floor
    }
}

/// Uniform random composition of `total` into `parts` nonnegative integers
/// (stars and bars): distinct cut points in `1..total+parts-1` become part
/// sizes.
fn composition(rng: &mut ChaCha8Rng, total: u64, parts: usize) -> Vec<u64> {
    debug_assert!(parts >= 1);
    if parts == 1 {
        return vec![total];
    }
    let range = total + parts as u64 - 1;
    let mut cuts: Vec<u64> = Vec::with_capacity(parts - 1);
    while cuts.len() < parts - 1 {
        let candidate = rng.random_range(1..=range);
        if !cuts.contains(&candidate) {
            cuts.push(candidate);
        }
    }
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(parts);
    let mut previous = 0;
    for cut in cuts {
        sizes.push(cut - previous - 1);
        previous = cut;
    }
    sizes.push(range - previous);
    debug_assert_eq!(sizes.iter().sum::<u64>(), total);
    sizes
}

fn scaled(n: u64) -> Rat {
    Rat::new(n.into(), RESOLUTION.into())
}

fn candidate_profile(rng: &mut ChaCha8Rng, constraints: &AssumptionSet) -> ResponseProfile {
    let idx = ResponseProfile::index;
    let mut entries: [Rat; 8] = std::array::from_fn(|_| Rat::zero());
    if constraints.assumes_exogeneity() {
        // Product construction: an independent counterfactual-pair
        // distribution times a treatment marginal, so the joint-independence
        // equations hold exactly. Monotonicity removes the (0,1) pair.
        let pairs: &[(bool, bool)] = if constraints.assumes_monotonicity() {
            &[(true, true), (true, false), (false, false)]
        } else {
            &[(true, true), (true, false), (false, true), (false, false)]
        };
        let weights = composition(rng, RESOLUTION, pairs.len());
        let p_x = scaled(rng.random_range(0..=RESOLUTION));
        let p_x_prime = Rat::one() - &p_x;
        for (&(i, j), w) in pairs.iter().zip(&weights) {
            let q = scaled(*w);
            entries[idx(i, j, true)] = &q * &p_x;
            entries[idx(i, j, false)] = q * &p_x_prime;
        }
    } else if constraints.assumes_monotonicity() {
        let slots = [
            idx(true, true, true),
            idx(true, true, false),
            idx(true, false, true),
            idx(true, false, false),
            idx(false, false, true),
            idx(false, false, false),
        ];
        let weights = composition(rng, RESOLUTION, slots.len());
        for (slot, w) in slots.into_iter().zip(&weights) {
            entries[slot] = scaled(*w);
        }
    } else {
        let weights = composition(rng, RESOLUTION, 8);
        for (entry, w) in entries.iter_mut().zip(&weights) {
            *entry = scaled(*w);
        }
    }
    ResponseProfile::new(entries).expect("construction normalizes exactly")
}

/// Draws the profile for `(seed, index)`: deterministic, independent across
/// indices, and exactly satisfying the configured constraints. Resamples
/// until both conditioning cells reach the positivity floor.
pub fn sample_profile(config: &SamplerConfig, index: usize) -> Result<ResponseProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    for _ in 0..MAX_ATTEMPTS {
        let profile = candidate_profile(&mut rng, &config.constraints);
        if config.positivity_floor.is_zero() {
            return Ok(profile);
        }
        let (joint, _) = profile.observables();
        if joint.p_xy() >= &config.positivity_floor
            && joint.p_x_prime_y_prime() >= &config.positivity_floor
        {
            return Ok(profile);
        }
    }
    Err(Error::FloorUnsatisfiable {
        floor: rational_string(&config.positivity_floor),
    })
}

/// Location of the worst observed discrepancy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub magnitude: Rat,
    pub seed: u64,
    pub index: usize,
}

/// Aggregated verification results. A passing run has every failure count
/// at zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub trials: usize,
    /// True PNS/PN/PS or effects outside a closed-form interval.
    pub containment_failures: usize,
    /// Closed form differing from the exact LP optimum.
    pub sharpness_mismatches: usize,
    /// A Lemma 1 / Theorem 2 / Theorem 3 / Theorem 5 residual that is not
    /// exactly zero.
    pub identity_failures: usize,
    /// Trials that errored instead of producing a verdict.
    pub trial_errors: usize,
    pub worst_containment: Option<Discrepancy>,
    pub worst_sharpness: Option<Discrepancy>,
    pub worst_identity: Option<Discrepancy>,
    pub first_error: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.containment_failures == 0
            && self.sharpness_mismatches == 0
            && self.identity_failures == 0
            && self.trial_errors == 0
    }
}

/// Test-only corruption hook proving the harness detects injected defects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DefectInjection {
    #[default]
    None,
    /// Skews the closed-form PNS upper bound before the sharpness
    /// comparison; a correct harness must then report mismatches.
    SkewPnsUpper,
}

#[derive(Default)]
struct TrialOutcome {
    containment_gap: Option<Rat>,
    sharpness_gap: Option<Rat>,
    identity_gap: Option<Rat>,
    error: Option<String>,
}

fn max_gap(worst: &mut Option<Rat>, gap: Rat) {
    match worst {
        Some(current) if *current >= gap => {}
        _ => *worst = Some(gap),
    }
}

fn containment_gap(value: &Rat, bound: &MeasureBound) -> Option<Rat> {
    let interval = bound.interval()?;
    if value < interval.lower() {
        Some(interval.lower() - value)
    } else if value > interval.upper() {
        Some(value - interval.upper())
    } else {
        None
    }
}

/// Largest endpoint difference between two bound computations; `1` when they
/// disagree about definedness.
fn bound_mismatch(closed: &MeasureBound, oracle: &MeasureBound, upper_skew: &Rat) -> Option<Rat> {
    match (closed.interval(), oracle.interval()) {
        (Some(a), Some(b)) => {
            let lower_gap = (a.lower() - b.lower()).abs();
            let upper_gap = (a.upper() + upper_skew - b.upper()).abs();
            let gap = lower_gap.max(upper_gap);
            (!gap.is_zero()).then_some(gap)
        }
        (None, None) => None,
        _ => Some(Rat::one()),
    }
}

fn report_mismatch(closed: &BoundsReport, oracle: &BoundsReport, skew: &Rat) -> Option<Rat> {
    let mut worst: Option<Rat> = None;
    if let Some(gap) = bound_mismatch(&closed.pns, &oracle.pns, skew) {
        max_gap(&mut worst, gap);
    }
    for (c, o) in [(&closed.pn, &oracle.pn), (&closed.ps, &oracle.ps)] {
        if let Some(gap) = bound_mismatch(c, o, &Rat::zero()) {
            max_gap(&mut worst, gap);
        }
    }
    match (&closed.effect_bounds, &oracle.effect_bounds) {
        (Some(a), Some(b)) => {
            for (x, y) in [(&a.p_y_x, &b.p_y_x), (&a.p_y_x_prime, &b.p_y_x_prime)] {
                if !x.same_bounds(y) {
                    let gap = (x.lower() - y.lower())
                        .abs()
                        .max((x.upper() - y.upper()).abs());
                    max_gap(&mut worst, gap);
                }
            }
        }
        (None, None) => {}
        _ => max_gap(&mut worst, Rat::one()),
    }
    worst
}

fn run_trial(config: &SamplerConfig, index: usize, defect: DefectInjection) -> TrialOutcome {
    let mut outcome = TrialOutcome::default();
    let profile = match sample_profile(config, index) {
        Ok(profile) => profile,
        Err(err) => {
            outcome.error = Some(err.to_string());
            return outcome;
        }
    };
    let (joint, effects) = profile.observables();
    let truth = profile.causation();
    let constraints = &config.constraints;

    // Closed-form reports whose intervals must contain the true measures.
    let mut reports: Vec<BoundsReport> =
        vec![bounds_observational(&joint), bounds_experimental(&effects)];
    match bounds_combined(&joint, &effects) {
        Ok(report) => reports.push(report),
        Err(err) => {
            outcome.error = Some(format!("combined bounds on own observables: {err}"));
            return outcome;
        }
    }
    let specialized: Vec<Result<BoundsReport>> = {
        let mut extra = Vec::new();
        if constraints.assumes_exogeneity() {
            extra.push(bounds_exogenous(&joint));
        }
        if constraints.assumes_monotonicity() {
            extra.push(identify_monotone(&joint, &effects));
            if constraints.assumes_exogeneity() {
                extra.push(identify_exo_monotone(&joint));
            }
        }
        extra
    };
    for result in specialized {
        match result {
            Ok(report) => reports.push(report),
            // Degenerate marginals make the specialized forms inapplicable.
            Err(Error::UndefinedConditional { .. }) => {}
            Err(err) => {
                outcome.error = Some(format!("specialized bounds: {err}"));
                return outcome;
            }
        }
    }
    for report in &reports {
        if let Some(gap) = containment_gap(&truth.pns, &report.pns) {
            max_gap(&mut outcome.containment_gap, gap);
        }
        if let Some(pn) = &truth.pn {
            if let Some(gap) = containment_gap(pn, &report.pn) {
                max_gap(&mut outcome.containment_gap, gap);
            }
        }
        if let Some(ps) = &truth.ps {
            if let Some(gap) = containment_gap(ps, &report.ps) {
                max_gap(&mut outcome.containment_gap, gap);
            }
        }
        if let Some(effect_bounds) = &report.effect_bounds {
            for (value, interval) in [
                (effects.p_y_x(), &effect_bounds.p_y_x),
                (effects.p_y_x_prime(), &effect_bounds.p_y_x_prime),
            ] {
                if !interval.contains(value) {
                    let gap = (value - interval.lower())
                        .abs()
                        .min((value - interval.upper()).abs());
                    max_gap(&mut outcome.containment_gap, gap);
                }
            }
        }
    }

    // Sharpness: the regime's closed form must equal the exact LP optimum,
    // and under no assumptions the single-source families must as well.
    let skew = match defect {
        DefectInjection::None => Rat::zero(),
        DefectInjection::SkewPnsUpper => rat(1, 1000),
    };
    let comparisons: [(Option<&JointDistribution>, Option<&CausalEffects>); 3] = [
        (Some(&joint), Some(&effects)),
        (Some(&joint), None),
        (None, Some(&effects)),
    ];
    let families: &[(Option<&JointDistribution>, Option<&CausalEffects>)] =
        if constraints.is_empty() {
            &comparisons
        } else {
            &comparisons[..1]
        };
    for (j, e) in families {
        let closed = closed_form_bounds(*j, *e, constraints);
        let oracle = sharp_bounds(*j, *e, constraints);
        match (closed, oracle) {
            (Ok(closed), Ok(oracle)) => {
                if let Some(gap) = report_mismatch(&closed, &oracle, &skew) {
                    max_gap(&mut outcome.sharpness_gap, gap);
                }
            }
            (Err(Error::UndefinedConditional { .. }), Err(Error::UndefinedConditional { .. })) => {}
            (Err(closed_err), Err(oracle_err)) => {
                if std::mem::discriminant(&closed_err) != std::mem::discriminant(&oracle_err) {
                    max_gap(&mut outcome.sharpness_gap, Rat::one());
                }
            }
            _ => max_gap(&mut outcome.sharpness_gap, Rat::one()),
        }
    }

    // Exact identities.
    match profile.lemma1_residual() {
        Ok(residual) => {
            if !residual.is_zero() {
                max_gap(&mut outcome.identity_gap, residual.abs());
            }
        }
        Err(Error::UndefinedConditional { .. }) => {}
        Err(err) => outcome.error = Some(format!("lemma residual: {err}")),
    }
    if constraints.assumes_exogeneity() && !constraints.assumes_monotonicity() {
        // Sampled exogenous profiles are product-built, so the strong
        // relations must hold for the true measures.
        if let (Some(pn), Some(ps)) = (&truth.pn, &truth.ps) {
            match strong_exo_relations(&truth.pns, &joint) {
                Ok((expected_pn, expected_ps)) => {
                    let gap = (pn - expected_pn).abs().max((ps - expected_ps).abs());
                    if !gap.is_zero() {
                        max_gap(&mut outcome.identity_gap, gap);
                    }
                }
                Err(Error::UndefinedConditional { .. }) => {}
                Err(err) => outcome.error = Some(format!("strong-exogeneity relations: {err}")),
            }
        }
    }
    if constraints.assumes_monotonicity() {
        let identification = if constraints.assumes_exogeneity() {
            identify_exo_monotone(&joint)
        } else {
            identify_monotone(&joint, &effects)
        };
        match identification {
            Ok(report) => {
                let mut check_point = |bound: &MeasureBound, value: Option<&Rat>| {
                    if let (Some(interval), Some(value)) = (bound.interval(), value) {
                        let gap = (interval.lower() - value).abs();
                        if !gap.is_zero() {
                            max_gap(&mut outcome.identity_gap, gap);
                        }
                    }
                };
                check_point(&report.pns, Some(&truth.pns));
                check_point(&report.pn, truth.pn.as_ref());
                check_point(&report.ps, truth.ps.as_ref());
            }
            Err(Error::UndefinedConditional { .. }) => {}
            Err(err) => outcome.error = Some(format!("monotone identification: {err}")),
        }
    }
    if constraints.assumes_monotonicity() && constraints.assumes_exogeneity() {
        // Monotonicity plus exogeneity forces strong exogeneity: every
        // vertex of the constrained polytope satisfies the
        // joint-independence equations.
        match build_polytope(Some(&joint), Some(&effects), &AssumptionSet::monotonicity())
            .and_then(|system| system.vertices())
        {
            Ok(vertices) => {
                for point in vertices {
                    let vertex = ResponseProfile::new(point).expect("vertices are valid profiles");
                    if !vertex.satisfies_strong_exogeneity() {
                        max_gap(&mut outcome.identity_gap, Rat::one());
                    }
                }
            }
            Err(err) => outcome.error = Some(format!("monotone polytope vertices: {err}")),
        }
    }
    outcome
}

/// Runs `config.count` independent trials and aggregates the results.
///
/// Failures are counted, never thrown; the report is deterministic in the
/// configuration regardless of execution order.
pub fn verify_bounds_trial(config: &SamplerConfig) -> VerificationReport {
    verify_bounds_trial_with(config, DefectInjection::None)
}

/// As [`verify_bounds_trial`], optionally injecting a deliberate defect to
/// confirm harness sensitivity.
pub fn verify_bounds_trial_with(
    config: &SamplerConfig,
    defect: DefectInjection,
) -> VerificationReport {
    let outcomes: Vec<TrialOutcome> = (0..config.count)
        .into_par_iter()
        .map(|index| run_trial(config, index, defect))
        .collect();
    let mut report = VerificationReport {
        trials: config.count,
        ..VerificationReport::default()
    };
    for (index, outcome) in outcomes.into_iter().enumerate() {
        if let Some(gap) = outcome.containment_gap {
            report.containment_failures += 1;
            record_worst(&mut report.worst_containment, gap, config.seed, index);
        }
        if let Some(gap) = outcome.sharpness_gap {
            report.sharpness_mismatches += 1;
            record_worst(&mut report.worst_sharpness, gap, config.seed, index);
        }
        if let Some(gap) = outcome.identity_gap {
            report.identity_failures += 1;
            record_worst(&mut report.worst_identity, gap, config.seed, index);
        }
        if let Some(error) = outcome.error {
            report.trial_errors += 1;
            report.first_error.get_or_insert(error);
        }
    }
    report
}

fn record_worst(slot: &mut Option<Discrepancy>, magnitude: Rat, seed: u64, index: usize) {
    let replace = match slot {
        Some(current) => magnitude > current.magnitude,
        None => true,
    };
    if replace {
        *slot = Some(Discrepancy {
            magnitude,
            seed,
            index,
        });
    }
}
