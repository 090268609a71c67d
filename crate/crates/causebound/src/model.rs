//! Probabilistic domain types: count data, observational and experimental
//! distributions, response profiles, and causation measures.
//!
//! Index convention for response profiles: `p(i, j, k)` is the probability of
//! the joint event `Y_x = i`, `Y_x' = j`, `X = k`, where `x` is treatment and
//! `y` is the outcome. Under consistency the observed outcome is `Y = Y_x`
//! when `X = x` and `Y = Y_x'` when `X = x'`, so every observable quantity is
//! a sum of profile entries.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{pow10_reciprocal, rational_string, Rat};

/// A 2x2 table of nonnegative counts, indexed by treatment (`x` vs `x'`) and
/// outcome (`y` vs `y'`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountTable {
    pub x_y: u64,
    pub x_y_prime: u64,
    pub x_prime_y: u64,
    pub x_prime_y_prime: u64,
}

impl CountTable {
    pub fn new(x_y: u64, x_y_prime: u64, x_prime_y: u64, x_prime_y_prime: u64) -> Self {
        CountTable {
            x_y,
            x_y_prime,
            x_prime_y,
            x_prime_y_prime,
        }
    }

    pub fn total(&self) -> u64 {
        self.x_y + self.x_y_prime + self.x_prime_y + self.x_prime_y_prime
    }

    /// Total of the treated group `n(x, .)`.
    pub fn treated_total(&self) -> u64 {
        self.x_y + self.x_y_prime
    }

    /// Total of the untreated group `n(x', .)`.
    pub fn untreated_total(&self) -> u64 {
        self.x_prime_y + self.x_prime_y_prime
    }
}

/// Raw study data: an optional experimental arm and an optional
/// observational arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetCounts {
    experimental: Option<CountTable>,
    observational: Option<CountTable>,
}

impl DatasetCounts {
    /// Validates arm totals: an experimental arm needs subjects in both
    /// treatment groups, an observational arm needs a nonzero grand total.
    pub fn new(
        experimental: Option<CountTable>,
        observational: Option<CountTable>,
    ) -> Result<Self> {
        if let Some(exp) = &experimental {
            if exp.treated_total() == 0 {
                return Err(Error::EmptyArm { arm: "x" });
            }
            if exp.untreated_total() == 0 {
                return Err(Error::EmptyArm { arm: "x'" });
            }
        }
        if let Some(obs) = &observational {
            if obs.total() == 0 {
                return Err(Error::ZeroTotal);
            }
        }
        Ok(DatasetCounts {
            experimental,
            observational,
        })
    }

    pub fn experimental(&self) -> Option<&CountTable> {
        self.experimental.as_ref()
    }

    pub fn observational(&self) -> Option<&CountTable> {
        self.observational.as_ref()
    }

    /// Joint distribution estimated from the observational arm, if present.
    pub fn joint(&self) -> Option<JointDistribution> {
        self.observational
            .map(|obs| JointDistribution::from_counts(&obs).expect("validated on construction"))
    }

    /// Causal effects estimated from the experimental arm, if present.
    pub fn effects(&self) -> Option<CausalEffects> {
        self.experimental
            .map(|exp| CausalEffects::from_counts(&exp).expect("validated on construction"))
    }
}

const CELL_XY: usize = 0;
const CELL_XY_PRIME: usize = 1;
const CELL_X_PRIME_Y: usize = 2;
const CELL_X_PRIME_Y_PRIME: usize = 3;

/// Joint observational distribution over binary treatment and outcome.
///
/// Cells are stored in order `P(x,y)`, `P(x,y')`, `P(x',y)`, `P(x',y')` and
/// always sum to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    cells: [Rat; 4],
}

impl JointDistribution {
    /// Builds the distribution from four cell probabilities.
    ///
    /// Cells must lie in `[0, 1]` and sum to 1 within `1e-9` (so that
    /// hand-entered rounded decimals are accepted); the cells are then
    /// renormalized so the sum is exactly 1.
    pub fn from_cells(cells: [Rat; 4]) -> Result<Self> {
        const NAMES: [&str; 4] = ["P(x,y)", "P(x,y')", "P(x',y)", "P(x',y')"];
        for (cell, name) in cells.iter().zip(NAMES) {
            check_unit(cell, name)?;
        }
        let sum: Rat = cells.iter().sum();
        if (&sum - Rat::one()).abs() > pow10_reciprocal(9) || sum.is_zero() {
            return Err(Error::NotNormalized {
                what: "joint distribution",
                sum: rational_string(&sum),
            });
        }
        let cells = cells.map(|c| c / &sum);
        Ok(JointDistribution { cells })
    }

    /// Estimates the distribution from observational counts: each cell is
    /// `count / grand-total`, kept as an exact rational.
    pub fn from_counts(counts: &CountTable) -> Result<Self> {
        let total = counts.total();
        if total == 0 {
            return Err(Error::ZeroTotal);
        }
        let cell = |n: u64| Rat::new(n.into(), total.into());
        Ok(JointDistribution {
            cells: [
                cell(counts.x_y),
                cell(counts.x_y_prime),
                cell(counts.x_prime_y),
                cell(counts.x_prime_y_prime),
            ],
        })
    }

    pub fn p_xy(&self) -> &Rat {
        &self.cells[CELL_XY]
    }

    pub fn p_xy_prime(&self) -> &Rat {
        &self.cells[CELL_XY_PRIME]
    }

    pub fn p_x_prime_y(&self) -> &Rat {
        &self.cells[CELL_X_PRIME_Y]
    }

    pub fn p_x_prime_y_prime(&self) -> &Rat {
        &self.cells[CELL_X_PRIME_Y_PRIME]
    }

    pub fn cells(&self) -> &[Rat; 4] {
        &self.cells
    }

    pub fn p_x(&self) -> Rat {
        self.p_xy() + self.p_xy_prime()
    }

    pub fn p_x_prime(&self) -> Rat {
        self.p_x_prime_y() + self.p_x_prime_y_prime()
    }

    pub fn p_y(&self) -> Rat {
        self.p_xy() + self.p_x_prime_y()
    }

    pub fn p_y_prime(&self) -> Rat {
        self.p_xy_prime() + self.p_x_prime_y_prime()
    }

    /// `P(y|x)`, defined only when `P(x) > 0`.
    pub fn p_y_given_x(&self) -> Option<Rat> {
        let px = self.p_x();
        (!px.is_zero()).then(|| self.p_xy() / px)
    }

    /// `P(y|x')`, defined only when `P(x') > 0`.
    pub fn p_y_given_x_prime(&self) -> Option<Rat> {
        let pxp = self.p_x_prime();
        (!pxp.is_zero()).then(|| self.p_x_prime_y() / pxp)
    }

    /// `P(y'|x')`, defined only when `P(x') > 0`.
    pub fn p_y_prime_given_x_prime(&self) -> Option<Rat> {
        self.p_y_given_x_prime().map(|p| Rat::one() - p)
    }

    /// Relative risk `P(y|x) / P(y|x')`, defined when both conditionals exist
    /// and `P(y|x') > 0`.
    pub fn relative_risk(&self) -> Option<Rat> {
        let numer = self.p_y_given_x()?;
        let denom = self.p_y_given_x_prime()?;
        (!denom.is_zero()).then(|| numer / denom)
    }
}

/// Interventional quantities `P(y_x)` and `P(y_x')`, e.g. from a randomized
/// trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalEffects {
    p_y_x: Rat,
    p_y_x_prime: Rat,
}

impl CausalEffects {
    pub fn new(p_y_x: Rat, p_y_x_prime: Rat) -> Result<Self> {
        check_unit(&p_y_x, "P(y_x)")?;
        check_unit(&p_y_x_prime, "P(y_x')")?;
        Ok(CausalEffects { p_y_x, p_y_x_prime })
    }

    /// Estimates the effects from experimental counts:
    /// `P(y_x) = n(x,y)/n(x,.)` and `P(y_x') = n(x',y)/n(x',.)`.
    pub fn from_counts(counts: &CountTable) -> Result<Self> {
        let treated = counts.treated_total();
        let untreated = counts.untreated_total();
        if treated == 0 {
            return Err(Error::EmptyArm { arm: "x" });
        }
        if untreated == 0 {
            return Err(Error::EmptyArm { arm: "x'" });
        }
        Ok(CausalEffects {
            p_y_x: Rat::new(counts.x_y.into(), treated.into()),
            p_y_x_prime: Rat::new(counts.x_prime_y.into(), untreated.into()),
        })
    }

    pub fn p_y_x(&self) -> &Rat {
        &self.p_y_x
    }

    pub fn p_y_x_prime(&self) -> &Rat {
        &self.p_y_x_prime
    }

    pub fn p_y_prime_x(&self) -> Rat {
        Rat::one() - &self.p_y_x
    }

    pub fn p_y_prime_x_prime(&self) -> Rat {
        Rat::one() - &self.p_y_x_prime
    }
}

/// Joint distribution of the counterfactual pair and the actual treatment:
/// the eight parameters `p(i, j, k) = P(Y_x = i, Y_x' = j, X = k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseProfile {
    entries: [Rat; 8],
}

impl ResponseProfile {
    /// Flat index of `(Y_x = i, Y_x' = j, X = k)`.
    pub const fn index(y_x: bool, y_x_prime: bool, x: bool) -> usize {
        ((y_x as usize) << 2) | ((y_x_prime as usize) << 1) | (x as usize)
    }

    /// Builds a profile from the eight entries in index order
    /// `p(0,0,0), p(0,0,1), ..., p(1,1,1)`. Entries must be nonnegative and
    /// sum to exactly 1.
    pub fn new(entries: [Rat; 8]) -> Result<Self> {
        for entry in &entries {
            if entry.is_negative() {
                return Err(Error::ProbabilityOutOfRange {
                    quantity: "response profile entry".into(),
                    value: rational_string(entry),
                });
            }
        }
        let sum: Rat = entries.iter().sum();
        if !sum.is_one() {
            return Err(Error::NotNormalized {
                what: "response profile",
                sum: rational_string(&sum),
            });
        }
        Ok(ResponseProfile { entries })
    }

    pub fn p(&self, y_x: bool, y_x_prime: bool, x: bool) -> &Rat {
        &self.entries[Self::index(y_x, y_x_prime, x)]
    }

    pub fn entries(&self) -> &[Rat; 8] {
        &self.entries
    }

    /// True when no unit is helped by withholding treatment:
    /// `p(0,1,k) = 0` for both `k`.
    pub fn is_monotone(&self) -> bool {
        self.p(false, true, true).is_zero() && self.p(false, true, false).is_zero()
    }

    /// True when all four joint-independence equations
    /// `P(Y_x = i, Y_x' = j, x) = P(Y_x = i, Y_x' = j) * P(x)` hold exactly.
    pub fn satisfies_strong_exogeneity(&self) -> bool {
        let p_x: Rat = [true, false]
            .iter()
            .flat_map(|&i| [true, false].map(|j| self.p(i, j, true).clone()))
            .sum();
        [true, false].iter().all(|&i| {
            [true, false].iter().all(|&j| {
                let pair = self.p(i, j, true) + self.p(i, j, false);
                self.p(i, j, true) == &(pair * &p_x)
            })
        })
    }

    /// True when the interventional probabilities equal the observational
    /// conditionals exactly (no confounding). Undefined conditionals (a
    /// treatment group of probability zero) count as a failure.
    pub fn satisfies_weak_exogeneity(&self) -> bool {
        let (joint, effects) = self.observables();
        match (joint.p_y_given_x(), joint.p_y_given_x_prime()) {
            (Some(c_x), Some(c_xp)) => &c_x == effects.p_y_x() && &c_xp == effects.p_y_x_prime(),
            _ => false,
        }
    }

    /// Maps the profile to its observable footprint: the joint distribution
    /// over `(X, Y)` and the causal effects.
    ///
    /// By consistency the observed outcome is `Y_x` in the treated group and
    /// `Y_x'` in the untreated group, so each joint cell sums the entries
    /// whose indices realize it, and each effect marginalizes one
    /// counterfactual coordinate.
    pub fn observables(&self) -> (JointDistribution, CausalEffects) {
        let p = |i: bool, j: bool, k: bool| self.p(i, j, k);
        let joint = JointDistribution {
            cells: [
                p(true, true, true) + p(true, false, true),
                p(false, true, true) + p(false, false, true),
                p(true, true, false) + p(false, true, false),
                p(true, false, false) + p(false, false, false),
            ],
        };
        let effects = CausalEffects {
            p_y_x: p(true, true, true)
                + p(true, true, false)
                + p(true, false, true)
                + p(true, false, false),
            p_y_x_prime: p(true, true, true)
                + p(true, true, false)
                + p(false, true, true)
                + p(false, true, false),
        };
        (joint, effects)
    }

    /// The three causation measures of this profile.
    ///
    /// `PNS = p(1,0,1) + p(1,0,0)`; `PN = p(1,0,1) / P(x,y)` and
    /// `PS = p(1,0,0) / P(x',y')` are `None` when their conditioning cell is
    /// zero.
    pub fn causation(&self) -> CausationMeasures {
        let (joint, _) = self.observables();
        let pns = self.p(true, false, true) + self.p(true, false, false);
        let pn = (!joint.p_xy().is_zero()).then(|| self.p(true, false, true) / joint.p_xy());
        let ps = (!joint.p_x_prime_y_prime().is_zero())
            .then(|| self.p(true, false, false) / joint.p_x_prime_y_prime());
        CausationMeasures { pns, pn, ps }
    }

    /// `PNS - [P(x,y) PN + P(x',y') PS]`; exactly zero for every profile
    /// whose conditioning cells are nonzero.
    pub fn lemma1_residual(&self) -> Result<Rat> {
        let (joint, _) = self.observables();
        let measures = self.causation();
        let pn = measures.pn.ok_or(Error::UndefinedConditional {
            quantity: "PN",
            denominator: "P(x,y)",
        })?;
        let ps = measures.ps.ok_or(Error::UndefinedConditional {
            quantity: "PS",
            denominator: "P(x',y')",
        })?;
        Ok(measures.pns - (joint.p_xy() * pn + joint.p_x_prime_y_prime() * ps))
    }
}

/// The three probabilities of causation of a single causal model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausationMeasures {
    /// Probability of necessity and sufficiency.
    pub pns: Rat,
    /// Probability of necessity; `None` when `P(x,y) = 0`.
    pub pn: Option<Rat>,
    /// Probability of sufficiency; `None` when `P(x',y') = 0`.
    pub ps: Option<Rat>,
}

/// A closed interval of probabilities.
///
/// `identified` is set only by point-identification paths; a degenerate
/// interval produced by bound formulas is not marked identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lower: Rat,
    upper: Rat,
    identified: bool,
}

impl Interval {
    pub fn new(lower: Rat, upper: Rat) -> Result<Self> {
        if lower.is_negative() || upper > Rat::one() || lower > upper {
            return Err(Error::InvalidInterval {
                lower: rational_string(&lower),
                upper: rational_string(&upper),
            });
        }
        Ok(Interval {
            lower,
            upper,
            identified: false,
        })
    }

    /// A degenerate interval produced by an identification result.
    pub fn point(value: Rat) -> Result<Self> {
        let mut interval = Interval::new(value.clone(), value)?;
        interval.identified = true;
        Ok(interval)
    }

    /// The uninformative interval `[0, 1]`.
    pub fn unit() -> Self {
        Interval {
            lower: Rat::zero(),
            upper: Rat::one(),
            identified: false,
        }
    }

    pub fn lower(&self) -> &Rat {
        &self.lower
    }

    pub fn upper(&self) -> &Rat {
        &self.upper
    }

    pub fn identified(&self) -> bool {
        self.identified
    }

    pub fn contains(&self, value: &Rat) -> bool {
        &self.lower <= value && value <= &self.upper
    }

    /// True when both endpoints agree with `other` (identification flags are
    /// not compared).
    pub fn same_bounds(&self, other: &Interval) -> bool {
        self.lower == other.lower && self.upper == other.upper
    }

    /// True when this interval is contained in `other`.
    pub fn within(&self, other: &Interval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational_string(&self.lower),
            rational_string(&self.upper)
        )
    }
}

/// Declared causal assumptions. Strong exogeneity implies exogeneity, so the
/// weaker flag is promoted automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssumptionSet {
    exogeneity: bool,
    strong_exogeneity: bool,
    monotonicity: bool,
}

impl AssumptionSet {
    pub const NONE: AssumptionSet = AssumptionSet {
        exogeneity: false,
        strong_exogeneity: false,
        monotonicity: false,
    };

    pub fn new(exogeneity: bool, strong_exogeneity: bool, monotonicity: bool) -> Self {
        AssumptionSet {
            exogeneity: exogeneity || strong_exogeneity,
            strong_exogeneity,
            monotonicity,
        }
    }

    pub fn exogeneity() -> Self {
        Self::new(true, false, false)
    }

    pub fn strong_exogeneity() -> Self {
        Self::new(false, true, false)
    }

    pub fn monotonicity() -> Self {
        Self::new(false, false, true)
    }

    pub fn exo_monotonicity() -> Self {
        Self::new(true, false, true)
    }

    pub fn assumes_exogeneity(&self) -> bool {
        self.exogeneity
    }

    pub fn assumes_strong_exogeneity(&self) -> bool {
        self.strong_exogeneity
    }

    pub fn assumes_monotonicity(&self) -> bool {
        self.monotonicity
    }

    pub fn is_empty(&self) -> bool {
        !(self.exogeneity || self.strong_exogeneity || self.monotonicity)
    }

    /// True when this set assumes everything `weaker` does.
    pub fn includes(&self, weaker: &AssumptionSet) -> bool {
        (self.exogeneity || !weaker.exogeneity)
            && (self.strong_exogeneity || !weaker.strong_exogeneity)
            && (self.monotonicity || !weaker.monotonicity)
    }

    pub fn with_monotonicity(mut self) -> Self {
        self.monotonicity = true;
        self
    }
}

impl fmt::Display for AssumptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "none");
        }
        let mut parts = Vec::new();
        if self.strong_exogeneity {
            parts.push("strong-exogeneity");
        } else if self.exogeneity {
            parts.push("exogeneity");
        }
        if self.monotonicity {
            parts.push("monotonicity");
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for AssumptionSet {
    type Err = String;

    /// Parses a `,`- or `+`-separated list of assumption names:
    /// `none`, `exogeneity`/`exo`, `strong-exogeneity`/`strong-exo`,
    /// `monotonicity`/`mono`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut exo = false;
        let mut strong = false;
        let mut mono = false;
        for token in s.split([',', '+']).map(str::trim).filter(|t| !t.is_empty()) {
            match token.to_ascii_lowercase().replace('_', "-").as_str() {
                "none" => {}
                "exogeneity" | "exo" => exo = true,
                "strong-exogeneity" | "strong-exo" => strong = true,
                "monotonicity" | "mono" => mono = true,
                other => return Err(format!("unknown assumption `{other}`")),
            }
        }
        Ok(AssumptionSet::new(exo, strong, mono))
    }
}

fn check_unit(value: &Rat, name: &str) -> Result<()> {
    if value.is_negative() || value > &Rat::one() {
        return Err(Error::ProbabilityOutOfRange {
            quantity: name.to_string(),
            value: rational_string(value),
        });
    }
    Ok(())
}
