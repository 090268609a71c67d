//! Closed-form bounds and identification formulas for the probabilities of
//! causation under each combination of evidence and declared assumptions.
//!
//! Every interval produced here is sharp: the LP oracle in [`crate::lp`]
//! certifies that each closed form equals the exact optimum over all causal
//! models consistent with the evidence.

use std::fmt;

use num_traits::{One, Zero};

use crate::diagnostics::{check_compatibility, check_monotonicity_compatibility, Verdict};
use crate::error::{Error, Result};
use crate::model::{AssumptionSet, CausalEffects, Interval, JointDistribution};
use crate::rational::Rat;

/// Which result family produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Bounds from observational data alone.
    Observational,
    /// Bounds from experimental data alone.
    Experimental,
    /// Bounds from combined experimental and observational data.
    Combined,
    /// Bounds under exogeneity (Theorem 1).
    Exogeneity,
    /// Bounds under strong exogeneity (Theorem 2; intervals as Theorem 1).
    StrongExogeneity,
    /// Point identification under monotonicity with combined data (Theorem 3).
    Monotone,
    /// Point identification under exogeneity and monotonicity (Theorem 4).
    ExoMonotone,
    /// PNS pinned by experimental data under monotonicity.
    MonotoneExperimental,
    /// Effect bounds tightened by monotonicity, observational data only.
    MonotoneObservational,
    /// No information.
    Vacuous,
    /// Exact LP optimum by vertex enumeration.
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Provenance::Observational => "observational data",
            Provenance::Experimental => "experimental data",
            Provenance::Combined => "combined data",
            Provenance::Exogeneity => "Theorem 1",
            Provenance::StrongExogeneity => "Theorem 2",
            Provenance::Monotone => "Theorem 3",
            Provenance::ExoMonotone => "Theorem 4",
            Provenance::MonotoneExperimental => "monotone, experimental data",
            Provenance::MonotoneObservational => "monotone, observational data",
            Provenance::Vacuous => "vacuous",
            Provenance::Oracle => "LP oracle",
        };
        f.write_str(label)
    }
}

/// Outcome of bounding one causation measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureBound {
    /// An informative interval (possibly degenerate).
    Bounded {
        interval: Interval,
        provenance: Provenance,
    },
    /// No constraint: the full `[0, 1]` interval.
    Vacuous,
    /// The measure conditions on a zero-probability event.
    Undefined {
        /// The vanishing denominator, e.g. `"P(x,y)"`.
        denominator: &'static str,
    },
}

impl MeasureBound {
    pub fn bounded(interval: Interval, provenance: Provenance) -> Self {
        MeasureBound::Bounded {
            interval,
            provenance,
        }
    }

    /// The interval view: vacuous bounds materialize as `[0, 1]`, undefined
    /// measures have none.
    pub fn interval(&self) -> Option<Interval> {
        match self {
            MeasureBound::Bounded { interval, .. } => Some(interval.clone()),
            MeasureBound::Vacuous => Some(Interval::unit()),
            MeasureBound::Undefined { .. } => None,
        }
    }

    pub fn provenance(&self) -> Option<Provenance> {
        match self {
            MeasureBound::Bounded { provenance, .. } => Some(*provenance),
            MeasureBound::Vacuous => Some(Provenance::Vacuous),
            MeasureBound::Undefined { .. } => None,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, MeasureBound::Vacuous)
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, MeasureBound::Undefined { .. })
    }

    /// True when both sides carry the same numeric information: equal
    /// endpoints, or both undefined. A vacuous bound equals an explicit
    /// `[0, 1]`.
    pub fn same_bounds(&self, other: &MeasureBound) -> bool {
        match (self.interval(), other.interval()) {
            (Some(a), Some(b)) => a.same_bounds(&b),
            (None, None) => true,
            _ => false,
        }
    }

    /// True when the measure is constrained to a single point.
    pub fn is_point(&self) -> bool {
        match self {
            MeasureBound::Bounded { interval, .. } => interval.lower() == interval.upper(),
            _ => false,
        }
    }

    /// Containment check used by the verification harness: an undefined
    /// measure constrains nothing.
    pub fn admits(&self, value: &Rat) -> bool {
        match self.interval() {
            Some(interval) => interval.contains(value),
            None => true,
        }
    }
}

/// Bounds on the causal effects `P(y_x)` and `P(y_x')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectBounds {
    pub p_y_x: Interval,
    pub p_y_x_prime: Interval,
    pub provenance: Provenance,
}

/// Classical attribution measures derived from the evidence.
///
/// `rr`, `err`, and `relative_difference` are computed from the
/// observational conditionals when a joint distribution is available,
/// otherwise from the causal effects. Each is `None` when its denominator
/// vanishes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttributionMeasures {
    /// Relative risk `P(y|x) / P(y|x')`.
    pub rr: Option<Rat>,
    /// Excess-risk-ratio `1 - 1/RR`.
    pub err: Option<Rat>,
    /// Corrected excess-risk-ratio: ERR plus the confounding correction
    /// `(P(y|x') - P(y_x')) / P(x,y)`; equals PN under monotonicity.
    pub cerr: Option<Rat>,
    /// Relative difference `(P(y|x) - P(y|x')) / (1 - P(y|x'))`.
    pub relative_difference: Option<Rat>,
}

impl AttributionMeasures {
    fn from_risks(risk_treated: &Rat, risk_control: &Rat) -> Self {
        let rr = (!risk_control.is_zero()).then(|| risk_treated / risk_control);
        let err = (!risk_treated.is_zero()).then(|| (risk_treated - risk_control) / risk_treated);
        let relative_difference = (risk_control != &Rat::one())
            .then(|| (risk_treated - risk_control) / (Rat::one() - risk_control));
        AttributionMeasures {
            rr,
            err,
            cerr: None,
            relative_difference,
        }
    }

    /// Measures from observational conditionals, with the CERR correction
    /// when effects are also available.
    pub fn from_joint(joint: &JointDistribution, effects: Option<&CausalEffects>) -> Self {
        let (Some(c_x), Some(c_xp)) = (joint.p_y_given_x(), joint.p_y_given_x_prime()) else {
            return AttributionMeasures::default();
        };
        let mut measures = Self::from_risks(&c_x, &c_xp);
        if let Some(effects) = effects {
            if !joint.p_xy().is_zero() {
                measures.cerr = measures
                    .err
                    .as_ref()
                    .map(|err| err + (&c_xp - effects.p_y_x_prime()) / joint.p_xy());
            }
        }
        measures
    }

    /// Naive measures computed from interventional quantities; legitimate
    /// readings of RR/ERR only under exogeneity.
    pub fn from_effects(effects: &CausalEffects) -> Self {
        Self::from_risks(effects.p_y_x(), effects.p_y_x_prime())
    }

    /// The legal threshold test: `RR > 2` forces `PN > 1/2` under
    /// exogeneity. `None` when RR is undefined.
    pub fn rr_exceeds_legal_threshold(&self) -> Option<bool> {
        self.rr.as_ref().map(|rr| rr > &Rat::from_integer(2.into()))
    }
}

/// Bounds on all three probabilities of causation for one evidence and
/// assumption combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub pns: MeasureBound,
    pub pn: MeasureBound,
    pub ps: MeasureBound,
    /// Present when the effects are not pinned by evidence.
    pub effect_bounds: Option<EffectBounds>,
    pub attribution: Option<AttributionMeasures>,
}

/// Bounds from observational data alone: PNS is capped by the concordant
/// cells, PN and PS are unconstrained, and the causal effects are bracketed
/// by their compatible cells.
pub fn bounds_observational(joint: &JointDistribution) -> BoundsReport {
    let pns_upper = joint.p_xy() + joint.p_x_prime_y_prime();
    let pns = Interval::new(Rat::zero(), pns_upper).expect("cells are probabilities");
    BoundsReport {
        pns: MeasureBound::bounded(pns, Provenance::Observational),
        pn: MeasureBound::Vacuous,
        ps: MeasureBound::Vacuous,
        effect_bounds: Some(effect_bounds_observational(joint)),
        attribution: Some(AttributionMeasures::from_joint(joint, None)),
    }
}

/// `P(x,y) <= P(y_x) <= 1 - P(x,y')` and `P(x',y) <= P(y_x') <= 1 - P(x',y')`.
pub fn effect_bounds_observational(joint: &JointDistribution) -> EffectBounds {
    EffectBounds {
        p_y_x: Interval::new(joint.p_xy().clone(), Rat::one() - joint.p_xy_prime())
            .expect("cells are probabilities"),
        p_y_x_prime: Interval::new(
            joint.p_x_prime_y().clone(),
            Rat::one() - joint.p_x_prime_y_prime(),
        )
        .expect("cells are probabilities"),
        provenance: Provenance::Observational,
    }
}

/// Sharper effect bounds under monotonicity:
/// `P(y) <= P(y_x) <= 1 - P(x,y')` and `P(x',y) <= P(y_x') <= P(y)`.
pub fn effect_bounds_monotone(joint: &JointDistribution) -> EffectBounds {
    EffectBounds {
        p_y_x: Interval::new(joint.p_y(), Rat::one() - joint.p_xy_prime())
            .expect("P(y) + P(x,y') <= 1"),
        p_y_x_prime: Interval::new(joint.p_x_prime_y().clone(), joint.p_y())
            .expect("P(x',y) <= P(y)"),
        provenance: Provenance::MonotoneObservational,
    }
}

/// Bounds from experimental data alone:
/// `max(0, P(y_x) - P(y_x')) <= PNS <= min(P(y_x), P(y'_x'))`, with PN and PS
/// unconstrained.
pub fn bounds_experimental(effects: &CausalEffects) -> BoundsReport {
    BoundsReport {
        pns: MeasureBound::bounded(
            pns_from_risks(effects.p_y_x(), effects.p_y_x_prime()),
            Provenance::Experimental,
        ),
        pn: MeasureBound::Vacuous,
        ps: MeasureBound::Vacuous,
        effect_bounds: None,
        attribution: None,
    }
}

fn pns_from_risks(risk_treated: &Rat, risk_control: &Rat) -> Interval {
    let lower = (risk_treated - risk_control).max(Rat::zero());
    let upper = risk_treated.min(&(Rat::one() - risk_control)).clone();
    Interval::new(lower, upper).expect("risks are probabilities")
}

/// Bounds from combined experimental and observational data.
///
/// Fails with [`Error::IncompatibleEvidence`] when the effects fall outside
/// the brackets the joint distribution imposes on them.
pub fn bounds_combined(joint: &JointDistribution, effects: &CausalEffects) -> Result<BoundsReport> {
    if let Verdict::Fail(violation) = check_compatibility(joint, effects) {
        return Err(Error::IncompatibleEvidence {
            violation: violation.to_string(),
        });
    }
    let p_y = joint.p_y();
    let p_y_x = effects.p_y_x();
    let p_y_xp = effects.p_y_x_prime();

    let pns_lower = [Rat::zero(), p_y_x - p_y_xp, &p_y - p_y_xp, p_y_x - &p_y]
        .into_iter()
        .max()
        .expect("nonempty");
    let pns_upper = [
        p_y_x.clone(),
        effects.p_y_prime_x_prime(),
        joint.p_xy() + joint.p_x_prime_y_prime(),
        p_y_x - p_y_xp + joint.p_xy_prime() + joint.p_x_prime_y(),
    ]
    .into_iter()
    .min()
    .expect("nonempty");
    let pns = Interval::new(pns_lower, pns_upper)?;

    let pn = if joint.p_xy().is_zero() {
        MeasureBound::Undefined {
            denominator: "P(x,y)",
        }
    } else {
        let lower = ((&p_y - p_y_xp) / joint.p_xy()).max(Rat::zero());
        let upper = ((effects.p_y_prime_x_prime() - joint.p_x_prime_y_prime()) / joint.p_xy())
            .min(Rat::one());
        MeasureBound::bounded(Interval::new(lower, upper)?, Provenance::Combined)
    };

    let ps = if joint.p_x_prime_y_prime().is_zero() {
        MeasureBound::Undefined {
            denominator: "P(x',y')",
        }
    } else {
        let lower = ((p_y_x - &p_y) / joint.p_x_prime_y_prime()).max(Rat::zero());
        let upper = ((p_y_x - joint.p_xy()) / joint.p_x_prime_y_prime()).min(Rat::one());
        MeasureBound::bounded(Interval::new(lower, upper)?, Provenance::Combined)
    };

    Ok(BoundsReport {
        pns: MeasureBound::bounded(pns, Provenance::Combined),
        pn,
        ps,
        effect_bounds: None,
        attribution: Some(AttributionMeasures::from_joint(joint, Some(effects))),
    })
}

/// Bounds under exogeneity (Theorem 1): the PNS bracket is computed from the
/// conditionals and PN/PS are the same bracket rescaled by `1/P(y|x)` and
/// `1/P(y'|x')`.
pub fn bounds_exogenous(joint: &JointDistribution) -> Result<BoundsReport> {
    let (c_x, c_xp) = conditionals(joint)?;
    let (pns, pn, ps) = exogenous_bounds_from_risks(&c_x, &c_xp, Provenance::Exogeneity);
    Ok(BoundsReport {
        pns,
        pn,
        ps,
        effect_bounds: None,
        attribution: Some(AttributionMeasures::from_joint(joint, None)),
    })
}

fn exogenous_bounds_from_risks(
    risk_treated: &Rat,
    risk_control: &Rat,
    provenance: Provenance,
) -> (MeasureBound, MeasureBound, MeasureBound) {
    let pns = pns_from_risks(risk_treated, risk_control);
    let pn = if risk_treated.is_zero() {
        MeasureBound::Undefined {
            denominator: "P(y|x)",
        }
    } else {
        let interval = Interval::new(pns.lower() / risk_treated, pns.upper() / risk_treated)
            .expect("PNS upper <= P(y|x)");
        MeasureBound::bounded(interval, provenance)
    };
    let control_complement = Rat::one() - risk_control;
    let ps = if control_complement.is_zero() {
        MeasureBound::Undefined {
            denominator: "P(y'|x')",
        }
    } else {
        let interval = Interval::new(
            pns.lower() / &control_complement,
            pns.upper() / &control_complement,
        )
        .expect("PNS upper <= P(y'|x')");
        MeasureBound::bounded(interval, provenance)
    };
    (MeasureBound::bounded(pns, provenance), pn, ps)
}

/// Point identification under monotonicity with combined data (Theorem 3):
/// `PNS = P(y_x) - P(y_x')`, `PN = (P(y) - P(y_x'))/P(x,y)`,
/// `PS = (P(y_x) - P(y))/P(x',y')`.
pub fn identify_monotone(
    joint: &JointDistribution,
    effects: &CausalEffects,
) -> Result<BoundsReport> {
    if let Verdict::Fail(violation) = check_compatibility(joint, effects) {
        return Err(Error::IncompatibleEvidence {
            violation: violation.to_string(),
        });
    }
    if let Verdict::Fail(violation) = check_monotonicity_compatibility(joint, effects) {
        return Err(Error::MonotonicityIncompatible {
            violation: violation.to_string(),
        });
    }
    let pns = Interval::point(effects.p_y_x() - effects.p_y_x_prime())?;
    let pn = if joint.p_xy().is_zero() {
        MeasureBound::Undefined {
            denominator: "P(x,y)",
        }
    } else {
        let value = (joint.p_y() - effects.p_y_x_prime()) / joint.p_xy();
        MeasureBound::bounded(Interval::point(value)?, Provenance::Monotone)
    };
    let ps = if joint.p_x_prime_y_prime().is_zero() {
        MeasureBound::Undefined {
            denominator: "P(x',y')",
        }
    } else {
        let value = (effects.p_y_x() - joint.p_y()) / joint.p_x_prime_y_prime();
        MeasureBound::bounded(Interval::point(value)?, Provenance::Monotone)
    };
    Ok(BoundsReport {
        pns: MeasureBound::bounded(pns, Provenance::Monotone),
        pn,
        ps,
        effect_bounds: None,
        attribution: Some(AttributionMeasures::from_joint(joint, Some(effects))),
    })
}

/// Point identification under exogeneity and monotonicity (Theorem 4):
/// `PNS = P(y|x) - P(y|x')`, `PN = ERR`, `PS =` relative difference.
pub fn identify_exo_monotone(joint: &JointDistribution) -> Result<BoundsReport> {
    let (c_x, c_xp) = conditionals(joint)?;
    let mut report = identify_from_risks(&c_x, &c_xp)?;
    report.attribution = Some(attribution_with_err_as_cerr(joint));
    Ok(report)
}

fn identify_from_risks(risk_treated: &Rat, risk_control: &Rat) -> Result<BoundsReport> {
    if risk_treated < risk_control {
        return Err(Error::MonotonicityIncompatible {
            violation: format!(
                "risk under treatment {} is below risk under control {}",
                risk_treated, risk_control
            ),
        });
    }
    let diff = risk_treated - risk_control;
    let pns = Interval::point(diff.clone())?;
    let pn = if risk_treated.is_zero() {
        MeasureBound::Undefined {
            denominator: "P(y|x)",
        }
    } else {
        MeasureBound::bounded(
            Interval::point(&diff / risk_treated)?,
            Provenance::ExoMonotone,
        )
    };
    let control_complement = Rat::one() - risk_control;
    let ps = if control_complement.is_zero() {
        MeasureBound::Undefined {
            denominator: "P(y'|x')",
        }
    } else {
        MeasureBound::bounded(
            Interval::point(&diff / &control_complement)?,
            Provenance::ExoMonotone,
        )
    };
    Ok(BoundsReport {
        pns: MeasureBound::bounded(pns, Provenance::ExoMonotone),
        pn,
        ps,
        effect_bounds: None,
        attribution: None,
    })
}

fn attribution_with_err_as_cerr(joint: &JointDistribution) -> AttributionMeasures {
    // Under exogeneity the confounding correction vanishes, so CERR = ERR.
    let mut attribution = AttributionMeasures::from_joint(joint, None);
    attribution.cerr = attribution.err.clone();
    attribution
}

/// Theorem 2 relations under strong exogeneity:
/// `PN = PNS / P(y|x)` and `PS = PNS / P(y'|x')`.
pub fn strong_exo_relations(pns: &Rat, joint: &JointDistribution) -> Result<(Rat, Rat)> {
    let (c_x, c_xp) = conditionals(joint)?;
    if c_x.is_zero() {
        return Err(Error::UndefinedConditional {
            quantity: "PN",
            denominator: "P(y|x)",
        });
    }
    let complement = Rat::one() - &c_xp;
    if complement.is_zero() {
        return Err(Error::UndefinedConditional {
            quantity: "PS",
            denominator: "P(y'|x')",
        });
    }
    Ok((pns / c_x, pns / complement))
}

fn conditionals(joint: &JointDistribution) -> Result<(Rat, Rat)> {
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
    Ok((c_x, c_xp))
}

fn require_exogeneity_consistency(
    joint: &JointDistribution,
    effects: &CausalEffects,
) -> Result<()> {
    let (c_x, c_xp) = conditionals(joint)?;
    if &c_x != effects.p_y_x() || &c_xp != effects.p_y_x_prime() {
        return Err(Error::InconsistentExogeneityDeclaration {
            detail: format!(
                "P(y_x) = {} vs P(y|x) = {}; P(y_x') = {} vs P(y|x') = {}",
                effects.p_y_x(),
                c_x,
                effects.p_y_x_prime(),
                c_xp
            ),
        });
    }
    Ok(())
}

/// Evaluates the closed-form bounds matching the evidence and assumption
/// set, routing to the strongest applicable result family.
pub fn closed_form_bounds(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<BoundsReport> {
    if joint.is_none() && effects.is_none() {
        return Err(Error::MissingEvidence {
            detail: "supply observational data, experimental data, or both",
        });
    }
    if assume.assumes_exogeneity() {
        if let (Some(joint), Some(effects)) = (joint, effects) {
            require_exogeneity_consistency(joint, effects)?;
        }
        let provenance = if assume.assumes_strong_exogeneity() {
            Provenance::StrongExogeneity
        } else {
            Provenance::Exogeneity
        };
        return match joint {
            Some(joint) => {
                if assume.assumes_monotonicity() {
                    identify_exo_monotone(joint)
                } else {
                    let (c_x, c_xp) = conditionals(joint)?;
                    let (pns, pn, ps) = exogenous_bounds_from_risks(&c_x, &c_xp, provenance);
                    Ok(BoundsReport {
                        pns,
                        pn,
                        ps,
                        effect_bounds: None,
                        attribution: Some(AttributionMeasures::from_joint(joint, None)),
                    })
                }
            }
            None => {
                // Exogeneity equates the conditionals with the supplied
                // effects, so Theorems 1 and 4 apply with those risks.
                let effects = effects.expect("checked above");
                if assume.assumes_monotonicity() {
                    let mut report = identify_from_risks(effects.p_y_x(), effects.p_y_x_prime())?;
                    let mut attribution = AttributionMeasures::from_effects(effects);
                    attribution.cerr = attribution.err.clone();
                    report.attribution = Some(attribution);
                    Ok(report)
                } else {
                    let (pns, pn, ps) = exogenous_bounds_from_risks(
                        effects.p_y_x(),
                        effects.p_y_x_prime(),
                        provenance,
                    );
                    Ok(BoundsReport {
                        pns,
                        pn,
                        ps,
                        effect_bounds: None,
                        attribution: Some(AttributionMeasures::from_effects(effects)),
                    })
                }
            }
        };
    }
    if assume.assumes_monotonicity() {
        return match (joint, effects) {
            (Some(joint), Some(effects)) => identify_monotone(joint, effects),
            (Some(joint), None) => {
                let mut report = bounds_observational(joint);
                report.effect_bounds = Some(effect_bounds_monotone(joint));
                Ok(report)
            }
            (None, Some(effects)) => {
                if effects.p_y_x() < effects.p_y_x_prime() {
                    return Err(Error::MonotonicityIncompatible {
                        violation: format!(
                            "P(y_x) = {} is below P(y_x') = {}",
                            effects.p_y_x(),
                            effects.p_y_x_prime()
                        ),
                    });
                }
                let pns = Interval::point(effects.p_y_x() - effects.p_y_x_prime())?;
                Ok(BoundsReport {
                    pns: MeasureBound::bounded(pns, Provenance::MonotoneExperimental),
                    pn: MeasureBound::Vacuous,
                    ps: MeasureBound::Vacuous,
                    effect_bounds: None,
                    attribution: None,
                })
            }
            (None, None) => unreachable!("evidence checked above"),
        };
    }
    match (joint, effects) {
        (Some(joint), Some(effects)) => bounds_combined(joint, effects),
        (Some(joint), None) => Ok(bounds_observational(joint)),
        (None, Some(effects)) => Ok(bounds_experimental(effects)),
        (None, None) => unreachable!("evidence checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CountTable;
    use crate::rational::rat;

    fn table2_joint() -> JointDistribution {
        JointDistribution::from_counts(&CountTable::new(2, 998, 28, 972)).unwrap()
    }

    fn table2_effects() -> CausalEffects {
        CausalEffects::from_counts(&CountTable::new(16, 984, 14, 986)).unwrap()
    }

    fn uniform_joint() -> JointDistribution {
        JointDistribution::from_cells([rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]).unwrap()
    }

    fn interval_of(bound: &MeasureBound) -> Interval {
        bound.interval().expect("bound should carry an interval")
    }

    #[test]
    fn observational_bounds_on_study_data() {
        let report = bounds_observational(&table2_joint());
        let pns = interval_of(&report.pns);
        assert_eq!(pns.lower(), &rat(0, 1));
        assert_eq!(pns.upper(), &rat(487, 1000));
        assert!(report.pn.is_vacuous());
        assert!(report.ps.is_vacuous());
        let effects = report.effect_bounds.unwrap();
        assert_eq!(effects.p_y_x.lower(), &rat(1, 1000));
        assert_eq!(effects.p_y_x.upper(), &rat(501, 1000));
        assert_eq!(effects.p_y_x_prime.lower(), &rat(7, 500));
        assert_eq!(effects.p_y_x_prime.upper(), &rat(257, 500));
    }

    #[test]
    fn observational_bounds_symmetric_and_degenerate() {
        let report = bounds_observational(&uniform_joint());
        let pns = interval_of(&report.pns);
        assert_eq!(pns.upper(), &rat(1, 2));
        let effects = report.effect_bounds.unwrap();
        assert_eq!(effects.p_y_x.lower(), &rat(1, 4));
        assert_eq!(effects.p_y_x.upper(), &rat(3, 4));

        let point_mass =
            JointDistribution::from_cells([rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap();
        let report = bounds_observational(&point_mass);
        assert_eq!(interval_of(&report.pns).upper(), &rat(1, 1));
        let effects = report.effect_bounds.unwrap();
        assert_eq!(effects.p_y_x.lower(), &rat(1, 1));
        assert_eq!(effects.p_y_x.upper(), &rat(1, 1));
    }

    #[test]
    fn experimental_bounds() {
        let report = bounds_experimental(&table2_effects());
        let pns = interval_of(&report.pns);
        assert_eq!(pns.lower(), &rat(1, 500));
        assert_eq!(pns.upper(), &rat(2, 125));
        assert!(report.pn.is_vacuous());
        assert!(report.ps.is_vacuous());

        let extreme = CausalEffects::new(rat(1, 1), rat(0, 1)).unwrap();
        let pns = interval_of(&bounds_experimental(&extreme).pns);
        assert_eq!(pns.lower(), &rat(1, 1));
        assert_eq!(pns.upper(), &rat(1, 1));

        let null = CausalEffects::new(rat(1, 2), rat(1, 2)).unwrap();
        let pns = interval_of(&bounds_experimental(&null).pns);
        assert_eq!(pns.lower(), &rat(0, 1));
        assert_eq!(pns.upper(), &rat(1, 2));
    }

    #[test]
    fn combined_bounds_on_study_data() {
        let report = bounds_combined(&table2_joint(), &table2_effects()).unwrap();
        let pns = interval_of(&report.pns);
        assert_eq!(pns.lower(), &rat(1, 500));
        assert_eq!(pns.upper(), &rat(2, 125));
        let pn = interval_of(&report.pn);
        assert_eq!(pn.lower(), &rat(1, 1));
        assert_eq!(pn.upper(), &rat(1, 1));
        let ps = interval_of(&report.ps);
        assert_eq!(ps.lower(), &rat(1, 486));
        assert_eq!(ps.upper(), &rat(5, 162));
        let attribution = report.attribution.unwrap();
        assert_eq!(attribution.cerr, Some(rat(1, 1)));
        assert_eq!(attribution.err, Some(rat(-13, 1)));
    }

    #[test]
    fn combined_bounds_uniform_case() {
        let effects = CausalEffects::new(rat(7, 10), rat(3, 10)).unwrap();
        let report = bounds_combined(&uniform_joint(), &effects).unwrap();
        let pns = interval_of(&report.pns);
        assert_eq!(pns.lower(), &rat(2, 5));
        assert_eq!(pns.upper(), &rat(1, 2));
        let pn = interval_of(&report.pn);
        assert_eq!(pn.lower(), &rat(4, 5));
        assert_eq!(pn.upper(), &rat(1, 1));
        let ps = interval_of(&report.ps);
        assert_eq!(ps.lower(), &rat(4, 5));
        assert_eq!(ps.upper(), &rat(1, 1));
    }

    #[test]
    fn combined_bounds_reject_incompatible_evidence() {
        let joint =
            JointDistribution::from_cells([rat(1, 2), rat(1, 6), rat(1, 6), rat(1, 6)]).unwrap();
        let effects = CausalEffects::new(rat(1, 5), rat(1, 5)).unwrap();
        assert!(matches!(
            bounds_combined(&joint, &effects),
            Err(Error::IncompatibleEvidence { .. })
        ));
    }

    #[test]
    fn combined_equals_exogenous_when_effects_match_conditionals() {
        let joint = table2_joint();
        let effects = CausalEffects::new(
            joint.p_y_given_x().unwrap(),
            joint.p_y_given_x_prime().unwrap(),
        )
        .unwrap();
        let combined = bounds_combined(&joint, &effects).unwrap();
        let exogenous = bounds_exogenous(&joint).unwrap();
        assert!(combined.pns.same_bounds(&exogenous.pns));
        assert!(combined.pn.same_bounds(&exogenous.pn));
        assert!(combined.ps.same_bounds(&exogenous.ps));
    }

    #[test]
    fn exogenous_bounds_from_conditionals() {
        // Conditionals 0.016 and 0.014: the PN lower bound is 1 - 1/RR = 1/8.
        let joint = JointDistribution::from_cells([
            rat(16, 2000),
            rat(984, 2000),
            rat(14, 2000),
            rat(986, 2000),
        ])
        .unwrap();
        let report = bounds_exogenous(&joint).unwrap();
        let pn = interval_of(&report.pn);
        assert_eq!(pn.lower(), &rat(1, 8));
        let attribution = report.attribution.unwrap();
        assert_eq!(attribution.err, Some(rat(1, 8)));
        assert_eq!(attribution.rr, Some(rat(8, 7)));
        assert_eq!(attribution.rr_exceeds_legal_threshold(), Some(false));

        let null = bounds_exogenous(&uniform_joint()).unwrap();
        assert_eq!(interval_of(&null.pns).lower(), &rat(0, 1));
        assert_eq!(interval_of(&null.pn).lower(), &rat(0, 1));
        assert_eq!(interval_of(&null.ps).lower(), &rat(0, 1));

        let deterministic =
            JointDistribution::from_cells([rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)]).unwrap();
        let report = bounds_exogenous(&deterministic).unwrap();
        for bound in [&report.pns, &report.pn, &report.ps] {
            let interval = interval_of(bound);
            assert_eq!(interval.lower(), &rat(1, 1));
            assert_eq!(interval.upper(), &rat(1, 1));
        }
    }

    #[test]
    fn exogenous_bounds_require_both_treatment_groups() {
        let joint =
            JointDistribution::from_cells([rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)]).unwrap();
        assert!(matches!(
            bounds_exogenous(&joint),
            Err(Error::UndefinedConditional { .. })
        ));
    }

    #[test]
    fn monotone_identification_on_study_data() {
        let report = identify_monotone(&table2_joint(), &table2_effects()).unwrap();
        let pns = interval_of(&report.pns);
        assert!(pns.identified());
        assert_eq!(pns.lower(), &rat(1, 500));
        assert_eq!(interval_of(&report.pn).lower(), &rat(1, 1));
        assert_eq!(interval_of(&report.ps).lower(), &rat(1, 486));
        // CERR decomposition equals the identified PN exactly.
        let attribution = report.attribution.unwrap();
        assert_eq!(attribution.cerr, Some(rat(1, 1)));
    }

    #[test]
    fn monotone_identification_uniform_case() {
        let effects = CausalEffects::new(rat(7, 10), rat(3, 10)).unwrap();
        let report = identify_monotone(&uniform_joint(), &effects).unwrap();
        assert_eq!(interval_of(&report.pns).lower(), &rat(2, 5));
        assert_eq!(interval_of(&report.pn).lower(), &rat(4, 5));
        assert_eq!(interval_of(&report.ps).lower(), &rat(4, 5));
    }

    #[test]
    fn monotone_identification_rejects_prevention_signal() {
        let joint = uniform_joint();
        let effects = CausalEffects::new(rat(2, 5), rat(3, 5)).unwrap();
        assert!(matches!(
            identify_monotone(&joint, &effects),
            Err(Error::MonotonicityIncompatible { .. })
        ));
    }

    #[test]
    fn monotone_identification_matches_exogenous_variant_under_consistency() {
        let joint = uniform_joint();
        let effects = CausalEffects::new(
            joint.p_y_given_x().unwrap(),
            joint.p_y_given_x_prime().unwrap(),
        )
        .unwrap();
        let combined = identify_monotone(&joint, &effects).unwrap();
        let exogenous = identify_exo_monotone(&joint).unwrap();
        assert!(combined.pns.same_bounds(&exogenous.pns));
        assert!(combined.pn.same_bounds(&exogenous.pn));
        assert!(combined.ps.same_bounds(&exogenous.ps));
    }

    #[test]
    fn exo_monotone_identification() {
        let joint = JointDistribution::from_cells([rat(7, 20), rat(3, 20), rat(3, 20), rat(7, 20)])
            .unwrap();
        // P(y|x) = 0.7, P(y|x') = 0.3.
        let report = identify_exo_monotone(&joint).unwrap();
        assert_eq!(interval_of(&report.pns).lower(), &rat(2, 5));
        assert_eq!(interval_of(&report.pn).lower(), &rat(4, 7));
        assert_eq!(interval_of(&report.ps).lower(), &rat(4, 7));
        let attribution = report.attribution.unwrap();
        assert_eq!(
            attribution.err,
            interval_of(&report.pn).lower().clone().into()
        );
        assert_eq!(attribution.cerr, attribution.err);
        assert_eq!(
            attribution.relative_difference,
            Some(interval_of(&report.ps).lower().clone())
        );

        let null = identify_exo_monotone(&uniform_joint()).unwrap();
        assert_eq!(interval_of(&null.pns).lower(), &rat(0, 1));
        assert_eq!(interval_of(&null.pn).lower(), &rat(0, 1));
        assert_eq!(interval_of(&null.ps).lower(), &rat(0, 1));
    }

    #[test]
    fn exo_monotone_rejects_negative_risk_difference() {
        let joint = JointDistribution::from_cells([rat(3, 20), rat(7, 20), rat(7, 20), rat(3, 20)])
            .unwrap();
        assert!(matches!(
            identify_exo_monotone(&joint),
            Err(Error::MonotonicityIncompatible { .. })
        ));
    }

    #[test]
    fn monotone_effect_bounds_on_study_data() {
        let bounds = effect_bounds_monotone(&table2_joint());
        assert_eq!(bounds.p_y_x.lower(), &rat(3, 200));
        assert_eq!(bounds.p_y_x.upper(), &rat(501, 1000));
        assert_eq!(bounds.p_y_x_prime.lower(), &rat(7, 500));
        assert_eq!(bounds.p_y_x_prime.upper(), &rat(3, 200));

        let uniform = effect_bounds_monotone(&uniform_joint());
        assert_eq!(uniform.p_y_x.lower(), &rat(1, 2));
        assert_eq!(uniform.p_y_x.upper(), &rat(3, 4));
        assert_eq!(uniform.p_y_x_prime.lower(), &rat(1, 4));
        assert_eq!(uniform.p_y_x_prime.upper(), &rat(1, 2));

        let no_constraint =
            JointDistribution::from_cells([rat(1, 2), rat(0, 1), rat(1, 4), rat(1, 4)]).unwrap();
        let bounds = effect_bounds_monotone(&no_constraint);
        assert_eq!(bounds.p_y_x.upper(), &rat(1, 1));
    }

    #[test]
    fn strong_exo_relations_cases() {
        let joint = JointDistribution::from_cells([rat(7, 20), rat(3, 20), rat(3, 20), rat(7, 20)])
            .unwrap();
        // P(y|x) = 7/10 and P(y'|x') = 7/10.
        let (pn, ps) = strong_exo_relations(&rat(2, 5), &joint).unwrap();
        assert_eq!(pn, rat(4, 7));
        assert_eq!(ps, rat(4, 7));

        let (pn, ps) = strong_exo_relations(&rat(0, 1), &joint).unwrap();
        assert_eq!(pn, rat(0, 1));
        assert_eq!(ps, rat(0, 1));

        let (pn, _) = strong_exo_relations(&rat(7, 10), &joint).unwrap();
        assert_eq!(pn, rat(1, 1));
    }

    #[test]
    fn dispatcher_routes_by_assumptions() {
        let joint = table2_joint();
        let effects = table2_effects();

        let none = closed_form_bounds(Some(&joint), Some(&effects), &AssumptionSet::NONE).unwrap();
        assert_eq!(none.pns.provenance(), Some(Provenance::Combined));

        let mono = closed_form_bounds(Some(&joint), Some(&effects), &AssumptionSet::monotonicity())
            .unwrap();
        assert!(mono.pns.is_point());

        // Declared exogeneity is inconsistent with this evidence.
        assert!(matches!(
            closed_form_bounds(Some(&joint), Some(&effects), &AssumptionSet::exogeneity()),
            Err(Error::InconsistentExogeneityDeclaration { .. })
        ));

        // Experimental-only, monotone: PNS is pinned.
        let exp_mono =
            closed_form_bounds(None, Some(&effects), &AssumptionSet::monotonicity()).unwrap();
        assert!(exp_mono.pns.is_point());
        assert!(exp_mono.pn.is_vacuous());

        // Experimental-only with exogeneity: Theorem 1 applies to the risks.
        let exp_exo =
            closed_form_bounds(None, Some(&effects), &AssumptionSet::exogeneity()).unwrap();
        let pn = interval_of(&exp_exo.pn);
        assert_eq!(pn.lower(), &rat(1, 8));

        // Experimental-only with exogeneity and monotonicity: ERR is PN.
        let exp_exo_mono =
            closed_form_bounds(None, Some(&effects), &AssumptionSet::exo_monotonicity()).unwrap();
        let pn = interval_of(&exp_exo_mono.pn);
        assert!(pn.identified());
        assert_eq!(pn.lower(), &rat(1, 8));

        // Observational-only with monotonicity keeps the observational PNS
        // bound but tightens the effect bounds.
        let obs_mono =
            closed_form_bounds(Some(&joint), None, &AssumptionSet::monotonicity()).unwrap();
        assert_eq!(obs_mono.pns.provenance(), Some(Provenance::Observational));
        assert_eq!(
            obs_mono.effect_bounds.unwrap().provenance,
            Provenance::MonotoneObservational
        );

        assert!(matches!(
            closed_form_bounds(None, None, &AssumptionSet::NONE),
            Err(Error::MissingEvidence { .. })
        ));
    }

    #[test]
    fn err_threshold_relationship() {
        // RR > 2 forces the exogenous PN lower bound above 1/2.
        let joint =
            JointDistribution::from_cells([rat(3, 10), rat(1, 5), rat(1, 10), rat(2, 5)]).unwrap();
        // P(y|x) = 3/5, P(y|x') = 1/5, RR = 3.
        let report = bounds_exogenous(&joint).unwrap();
        let attribution = report.attribution.clone().unwrap();
        assert_eq!(attribution.rr_exceeds_legal_threshold(), Some(true));
        assert!(interval_of(&report.pn).lower() > &rat(1, 2));
    }
}
