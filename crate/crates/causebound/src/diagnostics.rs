//! Tests of which assumptions the combined evidence supports: cross-study
//! compatibility, exogeneity, and the necessary condition for monotonicity,
//! plus a summary recommending the best available PN estimator.

use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::model::{AssumptionSet, CausalEffects, JointDistribution};
use crate::rational::{rational_string, Rat};

/// One of the linear inequalities the evidence is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `P(x,y) <= P(y_x)`
    CompatLowerTreated,
    /// `P(y_x) <= 1 - P(x,y')`
    CompatUpperTreated,
    /// `P(x',y) <= P(y_x')`
    CompatLowerUntreated,
    /// `P(y_x') <= 1 - P(x',y')`
    CompatUpperUntreated,
    /// `P(y) <= P(y_x)`
    MonoLowerTreated,
    /// `P(y_x) <= 1 - P(x,y')`
    MonoUpperTreated,
    /// `P(x',y) <= P(y_x')`
    MonoLowerUntreated,
    /// `P(y_x') <= P(y)`
    MonoUpperUntreated,
    /// `|P(y_x) - P(y|x)| <= tolerance`
    ExogeneityTreated,
    /// `|P(y_x') - P(y|x')| <= tolerance`
    ExogeneityUntreated,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Inequality::CompatLowerTreated => "P(x,y) <= P(y_x)",
            Inequality::CompatUpperTreated => "P(y_x) <= 1 - P(x,y')",
            Inequality::CompatLowerUntreated => "P(x',y) <= P(y_x')",
            Inequality::CompatUpperUntreated => "P(y_x') <= 1 - P(x',y')",
            Inequality::MonoLowerTreated => "P(y) <= P(y_x)",
            Inequality::MonoUpperTreated => "P(y_x) <= 1 - P(x,y')",
            Inequality::MonoLowerUntreated => "P(x',y) <= P(y_x')",
            Inequality::MonoUpperUntreated => "P(y_x') <= P(y)",
            Inequality::ExogeneityTreated => "|P(y_x) - P(y|x)| <= tolerance",
            Inequality::ExogeneityUntreated => "|P(y_x') - P(y|x')| <= tolerance",
        };
        f.write_str(text)
    }
}

/// A violated inequality, with the offending values (`lhs <= rhs` failed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub inequality: Inequality,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated ({} > {})",
            self.inequality,
            rational_string(&self.lhs),
            rational_string(&self.rhs)
        )
    }
}

/// Outcome of a diagnostic check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The first violated inequality.
    Fail(Violation),
    /// The check needs evidence that is absent.
    NotApplicable,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn failed(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

fn first_violation(checks: Vec<(Inequality, Rat, Rat)>) -> Verdict {
    for (inequality, lhs, rhs) in checks {
        if lhs > rhs {
            return Verdict::Fail(Violation {
                inequality,
                lhs,
                rhs,
            });
        }
    }
    Verdict::Pass
}

/// Checks that the causal effects lie inside the brackets the joint
/// distribution imposes on them. Exact comparison; equality passes.
pub fn check_compatibility(joint: &JointDistribution, effects: &CausalEffects) -> Verdict {
    first_violation(vec![
        (
            Inequality::CompatLowerTreated,
            joint.p_xy().clone(),
            effects.p_y_x().clone(),
        ),
        (
            Inequality::CompatUpperTreated,
            effects.p_y_x().clone(),
            Rat::one() - joint.p_xy_prime(),
        ),
        (
            Inequality::CompatLowerUntreated,
            joint.p_x_prime_y().clone(),
            effects.p_y_x_prime().clone(),
        ),
        (
            Inequality::CompatUpperUntreated,
            effects.p_y_x_prime().clone(),
            Rat::one() - joint.p_x_prime_y_prime(),
        ),
    ])
}

/// The necessary test for monotonicity: `P(y) <= P(y_x) <= 1 - P(x,y')` and
/// `P(x',y) <= P(y_x') <= P(y)`.
///
/// Passing does not prove monotonicity; every combination of data satisfying
/// these inequalities is producible by some monotone model, so only failure
/// is informative. Boundary equalities pass.
pub fn check_monotonicity_compatibility(
    joint: &JointDistribution,
    effects: &CausalEffects,
) -> Verdict {
    let p_y = joint.p_y();
    first_violation(vec![
        (
            Inequality::MonoLowerTreated,
            p_y.clone(),
            effects.p_y_x().clone(),
        ),
        (
            Inequality::MonoUpperTreated,
            effects.p_y_x().clone(),
            Rat::one() - joint.p_xy_prime(),
        ),
        (
            Inequality::MonoLowerUntreated,
            joint.p_x_prime_y().clone(),
            effects.p_y_x_prime().clone(),
        ),
        (
            Inequality::MonoUpperUntreated,
            effects.p_y_x_prime().clone(),
            p_y,
        ),
    ])
}

/// Result of the exogeneity test: the verdict and both discrepancies
/// `|P(y_x) - P(y|x)|` and `|P(y_x') - P(y|x')|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExogeneityCheck {
    pub verdict: Verdict,
    pub discrepancy_treated: Rat,
    pub discrepancy_untreated: Rat,
}

/// Compares interventional probabilities against observational conditionals
/// at the given tolerance. Requires `P(x)` and `P(x')` positive.
pub fn test_exogeneity(
    joint: &JointDistribution,
    effects: &CausalEffects,
    tolerance: &Rat,
) -> Result<ExogeneityCheck> {
    let c_x = joint.p_y_given_x().ok_or(Error::UndefinedConditional {
        quantity: "P(y|x)",
        denominator: "P(x)",
    })?;
    let c_xp = joint
        .p_y_given_x_prime()
        .ok_or(Error::UndefinedConditional {
            quantity: "P(y|x')",
            denominator: "P(x')",
        })?;
    let discrepancy_treated = (effects.p_y_x() - c_x).abs();
    let discrepancy_untreated = (effects.p_y_x_prime() - c_xp).abs();
    let verdict = first_violation(vec![
        (
            Inequality::ExogeneityTreated,
            discrepancy_treated.clone(),
            tolerance.clone(),
        ),
        (
            Inequality::ExogeneityUntreated,
            discrepancy_untreated.clone(),
            tolerance.clone(),
        ),
    ]);
    Ok(ExogeneityCheck {
        verdict,
        discrepancy_treated,
        discrepancy_untreated,
    })
}

/// The best available PN estimator for an evidence/assumption combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnEstimator {
    /// Excess-risk-ratio: valid under exogeneity plus monotonicity.
    ExcessRiskRatio,
    /// Corrected excess-risk-ratio: valid under monotonicity with combined
    /// data.
    CorrectedExcessRiskRatio,
    /// Informative interval bounds.
    Bounds,
    /// Only the trivial interval `[0, 1]`.
    Vacuous,
}

impl fmt::Display for PnEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            PnEstimator::ExcessRiskRatio => "ERR",
            PnEstimator::CorrectedExcessRiskRatio => "CERR",
            PnEstimator::Bounds => "bounds",
            PnEstimator::Vacuous => "vacuous",
        };
        f.write_str(label)
    }
}

/// Summary of all diagnostics for one evidence set and declared assumptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticReport {
    pub compatibility: Verdict,
    pub exogeneity: Verdict,
    /// `(|P(y_x) - P(y|x)|, |P(y_x') - P(y|x')|)` when the test ran.
    pub exogeneity_discrepancies: Option<(Rat, Rat)>,
    pub monotonicity_compatibility: Verdict,
    /// Declared assumptions contradicted by the data.
    pub contradicted: Vec<&'static str>,
    /// The PN estimator guidance for the declared assumptions and available
    /// data.
    pub recommendation: PnEstimator,
    pub declared: AssumptionSet,
}

impl DiagnosticReport {
    pub fn has_contradiction(&self) -> bool {
        !self.contradicted.is_empty()
    }
}

/// Runs every applicable diagnostic, flags declared assumptions the data
/// contradicts, and selects the PN estimator guidance.
pub fn assumption_report(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    declared: &AssumptionSet,
    exogeneity_tolerance: &Rat,
) -> Result<DiagnosticReport> {
    if joint.is_none() && effects.is_none() {
        return Err(Error::MissingEvidence {
            detail: "diagnostics need observational data, experimental data, or both",
        });
    }
    let both = joint.zip(effects);

    let compatibility = both
        .map(|(j, e)| check_compatibility(j, e))
        .unwrap_or(Verdict::NotApplicable);
    let (exogeneity, exogeneity_discrepancies) = match both {
        Some((j, e)) => match test_exogeneity(j, e, exogeneity_tolerance) {
            Ok(check) => (
                check.verdict,
                Some((check.discrepancy_treated, check.discrepancy_untreated)),
            ),
            // A degenerate treatment marginal leaves nothing to compare.
            Err(_) => (Verdict::NotApplicable, None),
        },
        None => (Verdict::NotApplicable, None),
    };
    let monotonicity_compatibility = both
        .map(|(j, e)| check_monotonicity_compatibility(j, e))
        .unwrap_or(Verdict::NotApplicable);

    let mut contradicted = Vec::new();
    if declared.assumes_exogeneity() && exogeneity.failed() {
        contradicted.push(if declared.assumes_strong_exogeneity() {
            "strong-exogeneity"
        } else {
            "exogeneity"
        });
    }
    if declared.assumes_monotonicity() && monotonicity_compatibility.failed() {
        contradicted.push("monotonicity");
    }

    let combined = both.is_some();
    let recommendation = match (
        declared.assumes_exogeneity(),
        declared.assumes_monotonicity(),
    ) {
        (true, true) => PnEstimator::ExcessRiskRatio,
        (true, false) => PnEstimator::Bounds,
        (false, true) if combined => PnEstimator::CorrectedExcessRiskRatio,
        (false, false) if combined => PnEstimator::Bounds,
        _ => PnEstimator::Vacuous,
    };

    Ok(DiagnosticReport {
        compatibility,
        exogeneity,
        exogeneity_discrepancies,
        monotonicity_compatibility,
        contradicted,
        recommendation,
        declared: *declared,
    })
}
