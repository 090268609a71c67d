//! Exact linear-programming oracle over the eight response-profile
//! parameters.
//!
//! Every evidence/assumption combination induces a polytope
//! `{ p >= 0, A p = b }` in the profile space. With at most eight variables
//! and a handful of equality rows, the global minimum and maximum of any
//! linear objective can be computed exactly by enumerating basic feasible
//! solutions in rational arithmetic, which is what certifies the closed
//! forms in [`crate::bounds`] as sharp.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::bounds::{BoundsReport, EffectBounds, MeasureBound, Provenance};
use crate::error::{Error, Result};
use crate::model::{AssumptionSet, CausalEffects, Interval, JointDistribution, ResponseProfile};
use crate::rational::Rat;

const NUM_VARS: usize = 8;

fn idx(y_x: bool, y_x_prime: bool, x: bool) -> usize {
    ResponseProfile::index(y_x, y_x_prime, x)
}

fn zero_coeffs() -> [Rat; NUM_VARS] {
    std::array::from_fn(|_| Rat::zero())
}

/// A linear functional over the eight profile entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: [Rat; NUM_VARS],
}

impl LinearForm {
    pub fn new(coeffs: [Rat; NUM_VARS]) -> Self {
        LinearForm { coeffs }
    }

    /// `PNS = p(1,0,1) + p(1,0,0)`.
    pub fn pns() -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[idx(true, false, true)] = Rat::one();
        coeffs[idx(true, false, false)] = Rat::one();
        LinearForm { coeffs }
    }

    /// The PN numerator `p(1,0,1)`; PN itself divides by the fixed `P(x,y)`.
    pub fn pn_numerator() -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[idx(true, false, true)] = Rat::one();
        LinearForm { coeffs }
    }

    /// The PS numerator `p(1,0,0)`; PS itself divides by the fixed `P(x',y')`.
    pub fn ps_numerator() -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[idx(true, false, false)] = Rat::one();
        LinearForm { coeffs }
    }

    /// `P(y_x)`: total mass with `Y_x = 1`.
    pub fn effect_treated() -> Self {
        let mut coeffs = zero_coeffs();
        for j in [false, true] {
            for k in [false, true] {
                coeffs[idx(true, j, k)] = Rat::one();
            }
        }
        LinearForm { coeffs }
    }

    /// `P(y_x')`: total mass with `Y_x' = 1`.
    pub fn effect_untreated() -> Self {
        let mut coeffs = zero_coeffs();
        for i in [false, true] {
            for k in [false, true] {
                coeffs[idx(i, true, k)] = Rat::one();
            }
        }
        LinearForm { coeffs }
    }

    pub fn evaluate(&self, point: &[Rat; NUM_VARS]) -> Rat {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }
}

/// An equality system `A p = b` over the eight nonnegative profile entries.
///
/// The normalization row (all entries sum to 1) is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    rows: Vec<[Rat; NUM_VARS]>,
    rhs: Vec<Rat>,
}

impl Default for ConstraintSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl ConstraintSystem {
    pub fn new() -> Self {
        ConstraintSystem {
            rows: vec![std::array::from_fn(|_| Rat::one())],
            rhs: vec![Rat::one()],
        }
    }

    pub fn add_equality(&mut self, coeffs: [Rat; NUM_VARS], rhs: Rat) {
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Reduced row echelon form of the augmented system, dropping redundant
    /// rows. `None` when a row reduces to `0 = c` with `c != 0`.
    fn reduced_rows(&self) -> Option<Vec<Vec<Rat>>> {
        let mut rows: Vec<Vec<Rat>> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(coeffs, rhs)| {
                let mut row: Vec<Rat> = coeffs.to_vec();
                row.push(rhs.clone());
                row
            })
            .collect();
        let mut rank = 0;
        for col in 0..NUM_VARS {
            let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, pivot);
            let scale = rows[rank][col].clone();
            for value in rows[rank].iter_mut() {
                if !value.is_zero() {
                    *value /= &scale;
                }
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let factor = row[col].clone();
                    for (value, pivot_value) in row.iter_mut().zip(&pivot_row).skip(col) {
                        if !pivot_value.is_zero() {
                            *value -= pivot_value * &factor;
                        }
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        for row in &rows[rank..] {
            if !row[NUM_VARS].is_zero() {
                return None;
            }
        }
        rows.truncate(rank);
        Some(rows)
    }

    /// All vertices of the polytope, deduplicated, in a deterministic order.
    /// Fails with [`Error::InfeasibleSystem`] when the polytope is empty.
    pub fn vertices(&self) -> Result<Vec<[Rat; NUM_VARS]>> {
        let rows = self.reduced_rows().ok_or(Error::InfeasibleSystem)?;
        let mut found: BTreeSet<[Rat; NUM_VARS]> = BTreeSet::new();
        for_each_combination(NUM_VARS, rows.len(), &mut |basis| {
            if let Some(point) = vertex_from(&rows, basis) {
                found.insert(point);
            }
            false
        });
        if found.is_empty() {
            return Err(Error::InfeasibleSystem);
        }
        Ok(found.into_iter().collect())
    }

    /// True when the polytope is nonempty. A nonempty bounded polytope of
    /// this form always has a basic feasible solution, so enumeration with
    /// early exit decides feasibility exactly.
    pub fn feasible(&self) -> bool {
        let Some(rows) = self.reduced_rows() else {
            return false;
        };
        let mut feasible = false;
        for_each_combination(NUM_VARS, rows.len(), &mut |basis| {
            if vertex_from(&rows, basis).is_some() {
                feasible = true;
                return true;
            }
            false
        });
        feasible
    }

    /// Exact global minimum and maximum of `objective` with attaining
    /// vertices.
    pub fn optimize(&self, objective: &LinearForm) -> Result<OptimaPair> {
        Ok(self
            .optimize_many(std::slice::from_ref(objective))?
            .pop()
            .expect("one objective in, one optimum out"))
    }

    /// Optimizes several objectives over a single vertex enumeration.
    pub fn optimize_many(&self, objectives: &[LinearForm]) -> Result<Vec<OptimaPair>> {
        let vertices = self.vertices()?;
        let profiles: Vec<ResponseProfile> = vertices
            .iter()
            .map(|point| {
                ResponseProfile::new(point.clone())
                    .expect("vertices satisfy normalization and nonnegativity")
            })
            .collect();
        Ok(objectives
            .iter()
            .map(|objective| {
                let values: Vec<Rat> = vertices.iter().map(|v| objective.evaluate(v)).collect();
                let (min_at, min) = values
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, v)| *v)
                    .expect("nonempty vertex set");
                let (max_at, max) = values
                    .iter()
                    .enumerate()
                    .max_by_key(|(_, v)| *v)
                    .expect("nonempty vertex set");
                OptimaPair {
                    min: min.clone(),
                    max: max.clone(),
                    witness_min: profiles[min_at].clone(),
                    witness_max: profiles[max_at].clone(),
                }
            })
            .collect())
    }
}

/// Solves the square subsystem on `basis` columns; `None` when singular or
/// when the solution has a negative coordinate.
fn vertex_from(rows: &[Vec<Rat>], basis: &[usize]) -> Option<[Rat; NUM_VARS]> {
    let n = basis.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|row| {
            let mut selected: Vec<Rat> = basis.iter().map(|&c| row[c].clone()).collect();
            selected.push(row[NUM_VARS].clone());
            selected
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let scale = m[col][col].clone();
        for value in m[col].iter_mut().skip(col) {
            if !value.is_zero() {
                *value /= &scale;
            }
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col].clone();
                for (value, pivot_value) in row.iter_mut().zip(&pivot_row).skip(col) {
                    if !pivot_value.is_zero() {
                        *value -= pivot_value * &factor;
                    }
                }
            }
        }
    }
    let mut point = zero_coeffs();
    for (pos, &col) in basis.iter().enumerate() {
        let value = m[pos][n].clone();
        if value.is_negative() {
            return None;
        }
        point[col] = value;
    }
    Some(point)
}

/// Visits every `k`-subset of `0..n` in lexicographic order; the callback
/// returns `true` to stop early.
fn for_each_combination(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    debug_assert!(k <= n);
    let mut indices: Vec<usize> = (0..k).collect();
    loop {
        if visit(&indices) {
            return;
        }
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if indices[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        indices[i] += 1;
        for j in i + 1..k {
            indices[j] = indices[j - 1] + 1;
        }
    }
}

/// Exact optima of one objective with vertex witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimaPair {
    pub min: Rat,
    pub max: Rat,
    pub witness_min: ResponseProfile,
    pub witness_max: ResponseProfile,
}

impl OptimaPair {
    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }
}

/// Resolves the effective causal effects under the declared assumptions.
///
/// Exogeneity equates effects with the observational conditionals: when both
/// are supplied they must agree exactly, and when effects are absent they
/// are derived from the joint. Exogeneity (and hence strong exogeneity)
/// without observational data has nothing to bind to and is an error.
fn resolve_effects(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<Option<CausalEffects>> {
    if joint.is_none() && effects.is_none() {
        return Err(Error::MissingEvidence {
            detail: "supply observational data, experimental data, or both",
        });
    }
    if !assume.assumes_exogeneity() {
        return Ok(effects.cloned());
    }
    let joint = joint.ok_or(Error::MissingEvidence {
        detail:
            "exogeneity references observational conditionals, but no observational data was given",
    })?;
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
    if let Some(effects) = effects {
        if effects.p_y_x() != &c_x || effects.p_y_x_prime() != &c_xp {
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
    }
    Ok(Some(
        CausalEffects::new(c_x, c_xp).expect("conditionals are probabilities"),
    ))
}

fn assemble_system(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<ConstraintSystem> {
    let mut system = ConstraintSystem::new();
    if let Some(joint) = joint {
        // Three independent cell rows; the fourth follows from normalization.
        let mut row = zero_coeffs();
        row[idx(true, true, true)] = Rat::one();
        row[idx(true, false, true)] = Rat::one();
        system.add_equality(row, joint.p_xy().clone());

        let mut row = zero_coeffs();
        row[idx(false, true, true)] = Rat::one();
        row[idx(false, false, true)] = Rat::one();
        system.add_equality(row, joint.p_xy_prime().clone());

        let mut row = zero_coeffs();
        row[idx(true, true, false)] = Rat::one();
        row[idx(false, true, false)] = Rat::one();
        system.add_equality(row, joint.p_x_prime_y().clone());
    }
    if let Some(effects) = effects {
        let LinearForm { coeffs } = LinearForm::effect_treated();
        system.add_equality(coeffs, effects.p_y_x().clone());
        let LinearForm { coeffs } = LinearForm::effect_untreated();
        system.add_equality(coeffs, effects.p_y_x_prime().clone());
    }
    if assume.assumes_monotonicity() {
        for k in [true, false] {
            let mut row = zero_coeffs();
            row[idx(false, true, k)] = Rat::one();
            system.add_equality(row, Rat::zero());
        }
    }
    if assume.assumes_strong_exogeneity() {
        let joint = joint.ok_or(Error::MissingEvidence {
            detail: "strong exogeneity needs P(x) from observational data",
        })?;
        let p_x = joint.p_x();
        // P(Y_x = i, Y_x' = j, x) = P(Y_x = i, Y_x' = j) P(x), rearranged to
        // (1 - P(x)) p(i,j,1) - P(x) p(i,j,0) = 0.
        for i in [true, false] {
            for j in [true, false] {
                let mut row = zero_coeffs();
                row[idx(i, j, true)] = Rat::one() - &p_x;
                row[idx(i, j, false)] = -p_x.clone();
                system.add_equality(row, Rat::zero());
            }
        }
    }
    Ok(system)
}

/// Builds the equality system for the given evidence and assumptions.
pub fn build_polytope(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<ConstraintSystem> {
    let effective = resolve_effects(joint, effects, assume)?;
    assemble_system(joint, effective.as_ref(), assume)
}

/// Ground-truth bounds by exact optimization over the evidence polytope.
///
/// PNS optimizes `p(1,0,1) + p(1,0,0)` directly. PN and PS divide the optima
/// of their numerators by the evidence-fixed conditioning cells; without
/// observational data those cells are not fixed, so PN and PS are reported
/// vacuous, and with a zero cell they are undefined.
pub fn sharp_bounds(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<BoundsReport> {
    let effective = resolve_effects(joint, effects, assume)?;
    let system = assemble_system(joint, effective.as_ref(), assume)?;

    let mut objectives = vec![
        LinearForm::pns(),
        LinearForm::pn_numerator(),
        LinearForm::ps_numerator(),
    ];
    let effects_free = effective.is_none();
    if effects_free {
        objectives.push(LinearForm::effect_treated());
        objectives.push(LinearForm::effect_untreated());
    }
    let mut optima = system.optimize_many(&objectives)?;

    let effect_bounds = if effects_free {
        let untreated = optima.pop().expect("requested");
        let treated = optima.pop().expect("requested");
        Some(EffectBounds {
            p_y_x: Interval::new(treated.min, treated.max)?,
            p_y_x_prime: Interval::new(untreated.min, untreated.max)?,
            provenance: Provenance::Oracle,
        })
    } else {
        None
    };

    let ps_numerator = optima.pop().expect("requested");
    let pn_numerator = optima.pop().expect("requested");
    let pns = optima.pop().expect("requested");

    let scaled =
        |optima: &OptimaPair, cell: &Rat, denominator: &'static str| -> Result<MeasureBound> {
            if cell.is_zero() {
                return Ok(MeasureBound::Undefined { denominator });
            }
            Ok(MeasureBound::bounded(
                Interval::new(&optima.min / cell, &optima.max / cell)?,
                Provenance::Oracle,
            ))
        };

    let (pn, ps) = match joint {
        Some(joint) => (
            scaled(&pn_numerator, joint.p_xy(), "P(x,y)")?,
            scaled(&ps_numerator, joint.p_x_prime_y_prime(), "P(x',y')")?,
        ),
        None => (MeasureBound::Vacuous, MeasureBound::Vacuous),
    };

    Ok(BoundsReport {
        pns: MeasureBound::bounded(Interval::new(pns.min, pns.max)?, Provenance::Oracle),
        pn,
        ps,
        effect_bounds,
        attribution: None,
    })
}

/// True when the evidence and assumptions admit at least one causal model.
pub fn feasible(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
) -> Result<bool> {
    Ok(build_polytope(joint, effects, assume)?.feasible())
}

/// Which bound a witness profile should attain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundTarget {
    PnsLower,
    PnsUpper,
    PnLower,
    PnUpper,
    PsLower,
    PsUpper,
}

impl BoundTarget {
    fn objective(&self) -> LinearForm {
        match self {
            BoundTarget::PnsLower | BoundTarget::PnsUpper => LinearForm::pns(),
            BoundTarget::PnLower | BoundTarget::PnUpper => LinearForm::pn_numerator(),
            BoundTarget::PsLower | BoundTarget::PsUpper => LinearForm::ps_numerator(),
        }
    }

    fn wants_upper(&self) -> bool {
        matches!(
            self,
            BoundTarget::PnsUpper | BoundTarget::PnUpper | BoundTarget::PsUpper
        )
    }
}

/// A response profile consistent with all evidence whose target measure
/// attains the corresponding sharp bound exactly.
pub fn witness_for_bound(
    joint: Option<&JointDistribution>,
    effects: Option<&CausalEffects>,
    assume: &AssumptionSet,
    target: BoundTarget,
) -> Result<ResponseProfile> {
    match target {
        BoundTarget::PnLower | BoundTarget::PnUpper => {
            let joint = joint.ok_or(Error::MissingEvidence {
                detail: "PN bounds need observational data to fix P(x,y)",
            })?;
            if joint.p_xy().is_zero() {
                return Err(Error::UndefinedConditional {
                    quantity: "PN",
                    denominator: "P(x,y)",
                });
            }
        }
        BoundTarget::PsLower | BoundTarget::PsUpper => {
            let joint = joint.ok_or(Error::MissingEvidence {
                detail: "PS bounds need observational data to fix P(x',y')",
            })?;
            if joint.p_x_prime_y_prime().is_zero() {
                return Err(Error::UndefinedConditional {
                    quantity: "PS",
                    denominator: "P(x',y')",
                });
            }
        }
        _ => {}
    }
    let system = build_polytope(joint, effects, assume)?;
    let optima = system.optimize(&target.objective())?;
    Ok(if target.wants_upper() {
        optima.witness_max
    } else {
        optima.witness_min
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::closed_form_bounds;
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

    #[test]
    fn normalization_only_simplex_extremes() {
        let system = ConstraintSystem::new();
        assert!(system.feasible());
        let optima = system.optimize(&LinearForm::pns()).unwrap();
        assert_eq!(optima.min, rat(0, 1));
        assert_eq!(optima.max, rat(1, 1));
        let measures = optima.witness_max.causation();
        assert_eq!(measures.pns, rat(1, 1));
    }

    #[test]
    fn row_counts_match_evidence() {
        let joint = table2_joint();
        let effects = table2_effects();
        let joint_only = build_polytope(Some(&joint), None, &AssumptionSet::NONE).unwrap();
        assert_eq!(joint_only.num_rows(), 4);
        let full =
            build_polytope(Some(&joint), Some(&effects), &AssumptionSet::monotonicity()).unwrap();
        assert_eq!(full.num_rows(), 8);
    }

    #[test]
    fn study_data_pns_optima() {
        let system = build_polytope(
            Some(&table2_joint()),
            Some(&table2_effects()),
            &AssumptionSet::NONE,
        )
        .unwrap();
        let optima = system.optimize(&LinearForm::pns()).unwrap();
        assert_eq!(optima.min, rat(1, 500));
        assert_eq!(optima.max, rat(2, 125));
    }

    #[test]
    fn study_data_pn_is_pinned() {
        let joint = table2_joint();
        let system =
            build_polytope(Some(&joint), Some(&table2_effects()), &AssumptionSet::NONE).unwrap();
        let optima = system.optimize(&LinearForm::pn_numerator()).unwrap();
        assert_eq!(&optima.min / joint.p_xy(), rat(1, 1));
        assert_eq!(&optima.max / joint.p_xy(), rat(1, 1));
    }

    #[test]
    fn uniform_case_ps_optima() {
        let joint = uniform_joint();
        let effects = CausalEffects::new(rat(7, 10), rat(3, 10)).unwrap();
        let system = build_polytope(Some(&joint), Some(&effects), &AssumptionSet::NONE).unwrap();
        let optima = system.optimize(&LinearForm::ps_numerator()).unwrap();
        assert_eq!(&optima.min / joint.p_x_prime_y_prime(), rat(4, 5));
        assert_eq!(&optima.max / joint.p_x_prime_y_prime(), rat(1, 1));
    }

    #[test]
    fn sharp_bounds_match_published_study_values() {
        let joint = table2_joint();
        let effects = table2_effects();
        let report = sharp_bounds(Some(&joint), Some(&effects), &AssumptionSet::NONE).unwrap();
        let pns = report.pns.interval().unwrap();
        assert_eq!(pns.lower(), &rat(1, 500));
        assert_eq!(pns.upper(), &rat(2, 125));
        let pn = report.pn.interval().unwrap();
        assert_eq!(pn.lower(), &rat(1, 1));
        assert_eq!(pn.upper(), &rat(1, 1));
        let ps = report.ps.interval().unwrap();
        assert_eq!(ps.lower(), &rat(1, 486));
        assert_eq!(ps.upper(), &rat(5, 162));
    }

    #[test]
    fn sharp_bounds_monotone_study_values_are_degenerate() {
        let report = sharp_bounds(
            Some(&table2_joint()),
            Some(&table2_effects()),
            &AssumptionSet::monotonicity(),
        )
        .unwrap();
        let pns = report.pns.interval().unwrap();
        assert_eq!(pns.lower(), &rat(1, 500));
        assert_eq!(pns.upper(), &rat(1, 500));
        let pn = report.pn.interval().unwrap();
        assert_eq!(pn.lower(), &rat(1, 1));
        assert_eq!(pn.upper(), &rat(1, 1));
        let ps = report.ps.interval().unwrap();
        assert_eq!(ps.lower(), &rat(1, 486));
        assert_eq!(ps.upper(), &rat(1, 486));
    }

    #[test]
    fn effects_only_extremes() {
        let effects = CausalEffects::new(rat(1, 1), rat(0, 1)).unwrap();
        let report = sharp_bounds(None, Some(&effects), &AssumptionSet::NONE).unwrap();
        let pns = report.pns.interval().unwrap();
        assert_eq!(pns.lower(), &rat(1, 1));
        assert_eq!(pns.upper(), &rat(1, 1));
        assert!(report.pn.is_vacuous());
        assert!(report.ps.is_vacuous());
    }

    #[test]
    fn feasibility_matches_effect_brackets() {
        assert!(feasible(
            Some(&table2_joint()),
            Some(&table2_effects()),
            &AssumptionSet::NONE
        )
        .unwrap());
        // P(x,y) = 0.5 forces P(y_x) >= 0.5.
        let joint =
            JointDistribution::from_cells([rat(1, 2), rat(1, 6), rat(1, 6), rat(1, 6)]).unwrap();
        let effects = CausalEffects::new(rat(1, 5), rat(1, 5)).unwrap();
        assert!(!feasible(Some(&joint), Some(&effects), &AssumptionSet::NONE).unwrap());
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut system = ConstraintSystem::new();
        let mut row = zero_coeffs();
        row[0] = Rat::one();
        system.add_equality(row, rat(2, 1));
        assert!(!system.feasible());
        assert_eq!(
            system.optimize(&LinearForm::pns()),
            Err(Error::InfeasibleSystem)
        );
    }

    #[test]
    fn exogeneity_requires_consistent_effects() {
        let joint = table2_joint();
        assert!(matches!(
            build_polytope(
                Some(&joint),
                Some(&table2_effects()),
                &AssumptionSet::exogeneity()
            ),
            Err(Error::InconsistentExogeneityDeclaration { .. })
        ));
        // Without effects the conditionals stand in for them.
        let system = build_polytope(Some(&joint), None, &AssumptionSet::exogeneity()).unwrap();
        assert_eq!(system.num_rows(), 6);
        assert!(matches!(
            build_polytope(None, Some(&table2_effects()), &AssumptionSet::exogeneity()),
            Err(Error::MissingEvidence { .. })
        ));
    }

    #[test]
    fn oracle_agrees_with_closed_forms_on_study_data() {
        let joint = table2_joint();
        let effects = table2_effects();
        for assume in [AssumptionSet::NONE, AssumptionSet::monotonicity()] {
            let closed = closed_form_bounds(Some(&joint), Some(&effects), &assume).unwrap();
            let oracle = sharp_bounds(Some(&joint), Some(&effects), &assume).unwrap();
            assert!(closed.pns.same_bounds(&oracle.pns), "{assume}: PNS");
            assert!(closed.pn.same_bounds(&oracle.pn), "{assume}: PN");
            assert!(closed.ps.same_bounds(&oracle.ps), "{assume}: PS");
        }
    }

    #[test]
    fn oracle_effect_bounds_match_closed_forms_without_effects() {
        let joint = table2_joint();
        for assume in [AssumptionSet::NONE, AssumptionSet::monotonicity()] {
            let closed = closed_form_bounds(Some(&joint), None, &assume).unwrap();
            let oracle = sharp_bounds(Some(&joint), None, &assume).unwrap();
            assert!(closed.pns.same_bounds(&oracle.pns));
            let closed_effects = closed.effect_bounds.unwrap();
            let oracle_effects = oracle.effect_bounds.unwrap();
            assert!(closed_effects.p_y_x.same_bounds(&oracle_effects.p_y_x));
            assert!(closed_effects
                .p_y_x_prime
                .same_bounds(&oracle_effects.p_y_x_prime));
        }
    }

    #[test]
    fn monotone_exogenous_vertices_satisfy_strong_exogeneity() {
        // With exogeneity-consistent evidence and monotonicity rows, every
        // vertex satisfies the joint-independence equations.
        let joint =
            JointDistribution::from_cells([rat(3, 10), rat(1, 5), rat(1, 10), rat(2, 5)]).unwrap();
        let system =
            build_polytope(Some(&joint), None, &AssumptionSet::exo_monotonicity()).unwrap();
        let vertices = system.vertices().unwrap();
        assert!(!vertices.is_empty());
        for point in vertices {
            let profile = ResponseProfile::new(point).unwrap();
            assert!(profile.is_monotone());
            assert!(profile.satisfies_strong_exogeneity());
        }
    }

    #[test]
    fn witnesses_attain_their_bounds() {
        let joint = table2_joint();
        let effects = table2_effects();
        let witness = witness_for_bound(
            Some(&joint),
            Some(&effects),
            &AssumptionSet::NONE,
            BoundTarget::PnLower,
        )
        .unwrap();
        assert_eq!(witness.p(true, false, true), &rat(1, 1000));
        assert_eq!(witness.causation().pn, Some(rat(1, 1)));

        let extreme = CausalEffects::new(rat(1, 1), rat(0, 1)).unwrap();
        let witness = witness_for_bound(
            None,
            Some(&extreme),
            &AssumptionSet::NONE,
            BoundTarget::PnsUpper,
        )
        .unwrap();
        assert_eq!(witness.causation().pns, rat(1, 1));

        let uniform = uniform_joint();
        let wide = CausalEffects::new(rat(7, 10), rat(3, 10)).unwrap();
        let witness = witness_for_bound(
            Some(&uniform),
            Some(&wide),
            &AssumptionSet::NONE,
            BoundTarget::PsUpper,
        )
        .unwrap();
        assert_eq!(witness.causation().ps, Some(rat(1, 1)));
    }

    #[test]
    fn combination_visitor_enumerates_lexicographically() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(8, 6, &mut |_| {
            count += 1;
            false
        });
        assert_eq!(count, 28);
    }
}
