//! Report assembly and rendering.
//!
//! Every numeric field carries both its exact rational value (as a
//! `numerator/denominator` string) and a decimal rendering rounded
//! half-to-even at the configured number of digits. Output is byte-stable
//! for identical inputs: text mode is a fixed layout, structured mode is
//! pretty-printed JSON with a fixed field order.

use causebound::diagnostics::{assumption_report, DiagnosticReport, Verdict};
use causebound::rational::{decimal_string, rational_string};
use causebound::{
    bounds_exogenous, closed_form_bounds, identify_exo_monotone, AssumptionSet,
    AttributionMeasures, CountTable, EffectBounds, Error, Interval, MeasureBound, Rat,
    VerificationReport,
};
use serde::Serialize;

use crate::study::Study;
use crate::CliError;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// An exact value with its display rendering.
#[derive(Debug, Clone, Serialize)]
pub struct Num {
    pub rational: String,
    pub decimal: String,
}

impl Num {
    pub fn new(value: &Rat, digits: u32) -> Self {
        Num {
            rational: rational_string(value),
            decimal: decimal_string(value, digits),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundView {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub undefined_denominator: Option<String>,
}

impl BoundView {
    fn from_bound(bound: &MeasureBound, digits: u32) -> Self {
        match bound {
            MeasureBound::Bounded {
                interval,
                provenance,
            } => {
                if interval.identified() {
                    BoundView {
                        kind: "point",
                        lower: None,
                        upper: None,
                        value: Some(Num::new(interval.lower(), digits)),
                        provenance: Some(provenance.to_string()),
                        undefined_denominator: None,
                    }
                } else {
                    BoundView {
                        kind: "interval",
                        lower: Some(Num::new(interval.lower(), digits)),
                        upper: Some(Num::new(interval.upper(), digits)),
                        value: None,
                        provenance: Some(provenance.to_string()),
                        undefined_denominator: None,
                    }
                }
            }
            MeasureBound::Vacuous => BoundView {
                kind: "vacuous",
                lower: None,
                upper: None,
                value: None,
                provenance: Some("vacuous".into()),
                undefined_denominator: None,
            },
            MeasureBound::Undefined { denominator } => BoundView {
                kind: "undefined",
                lower: None,
                upper: None,
                value: None,
                provenance: None,
                undefined_denominator: Some((*denominator).into()),
            },
        }
    }

    fn render(&self, name: &str) -> String {
        match self.kind {
            "point" => {
                let value = self.value.as_ref().expect("points carry a value");
                format!(
                    "  {name} = {} (identified, {})",
                    value.decimal,
                    self.provenance.as_deref().unwrap_or("")
                )
            }
            "interval" => format!(
                "  {name} in [{}, {}]  ({})",
                self.lower.as_ref().expect("intervals carry bounds").decimal,
                self.upper.as_ref().expect("intervals carry bounds").decimal,
                self.provenance.as_deref().unwrap_or("")
            ),
            "vacuous" => format!("  {name} in [0, 1] (vacuous)"),
            _ => format!(
                "  {name} undefined ({} = 0)",
                self.undefined_denominator.as_deref().unwrap_or("?")
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalView {
    pub lower: Num,
    pub upper: Num,
}

impl IntervalView {
    fn new(interval: &Interval, digits: u32) -> Self {
        IntervalView {
            lower: Num::new(interval.lower(), digits),
            upper: Num::new(interval.upper(), digits),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectBoundsView {
    pub p_y_x: IntervalView,
    pub p_y_x_prime: IntervalView,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttributionView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rr: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cerr: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_difference: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rr_exceeds_two: Option<bool>,
}

impl AttributionView {
    fn new(measures: &AttributionMeasures, digits: u32) -> Self {
        AttributionView {
            rr: measures.rr.as_ref().map(|v| Num::new(v, digits)),
            err: measures.err.as_ref().map(|v| Num::new(v, digits)),
            cerr: measures.cerr.as_ref().map(|v| Num::new(v, digits)),
            relative_difference: measures
                .relative_difference
                .as_ref()
                .map(|v| Num::new(v, digits)),
            rr_exceeds_two: measures.rr_exceeds_legal_threshold(),
        }
    }

    fn render(&self) -> Option<String> {
        let mut parts = Vec::new();
        if let Some(rr) = &self.rr {
            parts.push(format!("RR = {}", rr.decimal));
        }
        if let Some(err) = &self.err {
            parts.push(format!("ERR = {}", err.decimal));
        }
        if let Some(cerr) = &self.cerr {
            parts.push(format!("CERR = {}", cerr.decimal));
        }
        if let Some(rd) = &self.relative_difference {
            parts.push(format!("relative difference = {}", rd.decimal));
        }
        (!parts.is_empty()).then(|| format!("  attribution: {}", parts.join("  ")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountsView {
    pub x_y: u64,
    pub x_y_prime: u64,
    pub x_prime_y: u64,
    pub x_prime_y_prime: u64,
}

impl CountsView {
    fn new(counts: &CountTable) -> Self {
        CountsView {
            x_y: counts.x_y,
            x_y_prime: counts.x_y_prime,
            x_prime_y: counts.x_prime_y,
            x_prime_y_prime: counts.x_prime_y_prime,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservationalView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsView>,
    pub p_xy: Num,
    pub p_xy_prime: Num,
    pub p_x_prime_y: Num,
    pub p_x_prime_y_prime: Num,
    pub p_x: Num,
    pub p_y: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_y_given_x: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_y_given_x_prime: Option<Num>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentalView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsView>,
    pub p_y_x: Num,
    pub p_y_x_prime: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputsView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observational: Option<ObservationalView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experimental: Option<ExperimentalView>,
}

impl InputsView {
    fn new(study: &Study, digits: u32) -> Self {
        let observational = study.joint.as_ref().map(|joint| ObservationalView {
            counts: study.observational_counts.as_ref().map(CountsView::new),
            p_xy: Num::new(joint.p_xy(), digits),
            p_xy_prime: Num::new(joint.p_xy_prime(), digits),
            p_x_prime_y: Num::new(joint.p_x_prime_y(), digits),
            p_x_prime_y_prime: Num::new(joint.p_x_prime_y_prime(), digits),
            p_x: Num::new(&joint.p_x(), digits),
            p_y: Num::new(&joint.p_y(), digits),
            p_y_given_x: joint.p_y_given_x().map(|v| Num::new(&v, digits)),
            p_y_given_x_prime: joint.p_y_given_x_prime().map(|v| Num::new(&v, digits)),
        });
        let experimental = study.effects.as_ref().map(|effects| ExperimentalView {
            counts: study.experimental_counts.as_ref().map(CountsView::new),
            p_y_x: Num::new(effects.p_y_x(), digits),
            p_y_x_prime: Num::new(effects.p_y_x_prime(), digits),
        });
        InputsView {
            observational,
            experimental,
        }
    }

    fn render(&self, out: &mut String) {
        out.push_str("inputs\n");
        if let Some(obs) = &self.observational {
            if let Some(counts) = &obs.counts {
                out.push_str(&format!(
                    "  observational counts: n(x,y)={} n(x,y')={} n(x',y)={} n(x',y')={}\n",
                    counts.x_y, counts.x_y_prime, counts.x_prime_y, counts.x_prime_y_prime
                ));
            }
            out.push_str(&format!(
                "  observational: P(x,y)={} P(x,y')={} P(x',y)={} P(x',y')={}\n",
                obs.p_xy.decimal,
                obs.p_xy_prime.decimal,
                obs.p_x_prime_y.decimal,
                obs.p_x_prime_y_prime.decimal
            ));
            let mut derived = format!(
                "                 P(x)={} P(y)={}",
                obs.p_x.decimal, obs.p_y.decimal
            );
            if let Some(c) = &obs.p_y_given_x {
                derived.push_str(&format!(" P(y|x)={}", c.decimal));
            }
            if let Some(c) = &obs.p_y_given_x_prime {
                derived.push_str(&format!(" P(y|x')={}", c.decimal));
            }
            derived.push('\n');
            out.push_str(&derived);
        }
        if let Some(exp) = &self.experimental {
            if let Some(counts) = &exp.counts {
                out.push_str(&format!(
                    "  experimental counts: n(x,y)={} n(x,y')={} n(x',y)={} n(x',y')={}\n",
                    counts.x_y, counts.x_y_prime, counts.x_prime_y, counts.x_prime_y_prime
                ));
            }
            out.push_str(&format!(
                "  experimental: P(y_x)={} P(y_x')={}\n",
                exp.p_y_x.decimal, exp.p_y_x_prime.decimal
            ));
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictView {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

impl VerdictView {
    fn new(verdict: &Verdict) -> Self {
        VerdictView {
            status: verdict.label(),
            violation: match verdict {
                Verdict::Fail(violation) => Some(violation.to_string()),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsView {
    pub declared_assumptions: String,
    pub exogeneity_tolerance: String,
    pub compatibility: VerdictView,
    pub exogeneity: VerdictView,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exogeneity_discrepancies: Option<[Num; 2]>,
    pub monotonicity_compatibility: VerdictView,
    pub contradicted_assumptions: Vec<String>,
    pub pn_estimator_guidance: String,
}

impl DiagnosticsView {
    fn new(report: &DiagnosticReport, tolerance: &Rat, digits: u32) -> Self {
        DiagnosticsView {
            declared_assumptions: report.declared.to_string(),
            exogeneity_tolerance: rational_string(tolerance),
            compatibility: VerdictView::new(&report.compatibility),
            exogeneity: VerdictView::new(&report.exogeneity),
            exogeneity_discrepancies: report
                .exogeneity_discrepancies
                .as_ref()
                .map(|(a, b)| [Num::new(a, digits), Num::new(b, digits)]),
            monotonicity_compatibility: VerdictView::new(&report.monotonicity_compatibility),
            contradicted_assumptions: report.contradicted.iter().map(|s| s.to_string()).collect(),
            pn_estimator_guidance: report.recommendation.to_string(),
        }
    }

    fn render(&self, out: &mut String) {
        out.push_str(&format!(
            "diagnostics (declared: {}; exogeneity tolerance {})\n",
            self.declared_assumptions, self.exogeneity_tolerance
        ));
        let line = |name: &str, verdict: &VerdictView| -> String {
            let mut text = format!("  {name:<26} {}", verdict.status);
            if let Some(violation) = &verdict.violation {
                text.push_str(&format!("  [{violation}]"));
            }
            text.push('\n');
            text
        };
        out.push_str(&line("compatibility", &self.compatibility));
        let mut exo = format!("  {:<26} {}", "exogeneity", self.exogeneity.status);
        if let Some([a, b]) = &self.exogeneity_discrepancies {
            exo.push_str(&format!(
                "  |P(y_x)-P(y|x)|={} |P(y_x')-P(y|x')|={}",
                a.decimal, b.decimal
            ));
        }
        exo.push('\n');
        out.push_str(&exo);
        out.push_str(&line(
            "monotonicity (necessary)",
            &self.monotonicity_compatibility,
        ));
        if !self.contradicted_assumptions.is_empty() {
            out.push_str(&format!(
                "  contradicted by data: {}\n",
                self.contradicted_assumptions.join(", ")
            ));
        }
        out.push_str(&format!(
            "  PN estimator guidance: {}\n",
            self.pn_estimator_guidance
        ));
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeView {
    pub assumptions: String,
    pub guidance: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pns: Option<BoundView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pn: Option<BoundView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ps: Option<BoundView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect_bounds: Option<EffectBoundsView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attribution: Option<AttributionView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub naive_experimental_err: Option<Num>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeDoc {
    pub format_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub source: String,
    pub evidence: String,
    pub digits: u32,
    pub inputs: InputsView,
    pub diagnostics: DiagnosticsView,
    pub regimes: Vec<RegimeView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckDoc {
    pub format_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub source: String,
    pub evidence: String,
    pub digits: u32,
    pub inputs: InputsView,
    pub diagnostics: DiagnosticsView,
}

pub struct AnalyzeOptions {
    pub regimes: Vec<AssumptionSet>,
    pub digits: u32,
    pub tolerance: Rat,
    pub override_contradiction: bool,
    pub source: String,
}

/// Runs diagnostics and one bounds computation per requested regime.
///
/// Incompatible evidence aborts immediately. A regime whose assumptions the
/// data contradicts is an error unless `override_contradiction` is set, in
/// which case it is computed anyway (when mathematically possible) or
/// reported as refused.
pub fn run_analyze(study: &Study, options: &AnalyzeOptions) -> Result<AnalyzeDoc, CliError> {
    let joint = study.joint.as_ref();
    let effects = study.effects.as_ref();
    let diagnostics = assumption_report(joint, effects, &study.declared, &options.tolerance)
        .map_err(CliError::Core)?;
    if let Verdict::Fail(violation) = &diagnostics.compatibility {
        return Err(CliError::Core(Error::IncompatibleEvidence {
            violation: violation.to_string(),
        }));
    }

    let mut regimes = Vec::new();
    for assume in &options.regimes {
        regimes.push(compute_regime(study, assume, &diagnostics, options)?);
    }

    Ok(AnalyzeDoc {
        format_version: REPORT_FORMAT_VERSION,
        command: "analyze",
        label: study.label.clone(),
        notes: study.notes.clone(),
        source: options.source.clone(),
        evidence: study.evidence_summary(),
        digits: options.digits,
        inputs: InputsView::new(study, options.digits),
        diagnostics: DiagnosticsView::new(&diagnostics, &options.tolerance, options.digits),
        regimes,
    })
}

fn compute_regime(
    study: &Study,
    assume: &AssumptionSet,
    diagnostics: &DiagnosticReport,
    options: &AnalyzeOptions,
) -> Result<RegimeView, CliError> {
    let joint = study.joint.as_ref();
    let effects = study.effects.as_ref();
    let digits = options.digits;
    let guidance = guidance_for(assume, joint.is_some(), effects.is_some());

    let mut contradicted = Vec::new();
    if assume.assumes_exogeneity() && diagnostics.exogeneity.failed() {
        contradicted.push("exogeneity");
    }
    if assume.assumes_monotonicity() && diagnostics.monotonicity_compatibility.failed() {
        contradicted.push("monotonicity");
    }
    if !contradicted.is_empty() && !options.override_contradiction {
        return Err(CliError::Core(Error::AssumptionContradiction {
            assumption: contradicted.join("+"),
        }));
    }

    let mut notes: Vec<String> = contradicted
        .iter()
        .map(|name| format!("declared {name} is contradicted by the data (override in effect)"))
        .collect();

    // Exogenous regimes read the risks from the observational conditionals;
    // supplied effects only have to match within the diagnostic tolerance.
    let result = match joint {
        Some(joint) if assume.assumes_exogeneity() => {
            if effects.is_some() {
                notes.push("exogenous bounds computed from the observational conditionals".into());
            }
            if assume.assumes_monotonicity() {
                identify_exo_monotone(joint)
            } else {
                bounds_exogenous(joint)
            }
        }
        _ => closed_form_bounds(joint, effects, assume),
    };

    let report = match result {
        Ok(report) => report,
        Err(
            err @ (Error::MonotonicityIncompatible { .. } | Error::UndefinedConditional { .. }),
        ) if options.override_contradiction => {
            return Ok(RegimeView {
                assumptions: assume.to_string(),
                guidance: guidance.clone(),
                status: "refused",
                refusal: Some(err.to_string()),
                pns: None,
                pn: None,
                ps: None,
                effect_bounds: None,
                attribution: None,
                naive_experimental_err: None,
                notes,
            });
        }
        Err(err) => return Err(CliError::Core(err)),
    };

    let naive_experimental_err = if assume.assumes_monotonicity() && !assume.assumes_exogeneity() {
        effects.and_then(|effects| {
            AttributionMeasures::from_effects(effects)
                .err
                .map(|err| Num::new(&err, digits))
        })
    } else {
        None
    };

    // The RR > 2 threshold reading of the PN lower bound is only licensed
    // under exogeneity.
    let attribution = report.attribution.as_ref().map(|a| {
        let mut view = AttributionView::new(a, digits);
        if !assume.assumes_exogeneity() {
            view.rr_exceeds_two = None;
        }
        view
    });

    Ok(RegimeView {
        assumptions: assume.to_string(),
        guidance,
        status: "ok",
        refusal: None,
        pns: Some(BoundView::from_bound(&report.pns, digits)),
        pn: Some(BoundView::from_bound(&report.pn, digits)),
        ps: Some(BoundView::from_bound(&report.ps, digits)),
        effect_bounds: report
            .effect_bounds
            .as_ref()
            .map(|eb| effect_bounds_view(eb, digits)),
        attribution,
        naive_experimental_err,
        notes,
    })
}

fn effect_bounds_view(bounds: &EffectBounds, digits: u32) -> EffectBoundsView {
    EffectBoundsView {
        p_y_x: IntervalView::new(&bounds.p_y_x, digits),
        p_y_x_prime: IntervalView::new(&bounds.p_y_x_prime, digits),
        provenance: bounds.provenance.to_string(),
    }
}

/// The PN estimator cell for one assumption/data combination.
fn guidance_for(assume: &AssumptionSet, has_joint: bool, has_effects: bool) -> String {
    let combined = has_joint && has_effects;
    let cell = match (assume.assumes_exogeneity(), assume.assumes_monotonicity()) {
        (true, true) => "ERR",
        (true, false) => "bounds",
        (false, true) if combined => "CERR",
        (false, false) if combined => "bounds",
        _ => "vacuous",
    };
    cell.to_string()
}

pub fn run_check(study: &Study, options: &AnalyzeOptions) -> Result<CheckDoc, CliError> {
    let diagnostics = assumption_report(
        study.joint.as_ref(),
        study.effects.as_ref(),
        &study.declared,
        &options.tolerance,
    )
    .map_err(CliError::Core)?;
    Ok(CheckDoc {
        format_version: REPORT_FORMAT_VERSION,
        command: "check",
        label: study.label.clone(),
        notes: study.notes.clone(),
        source: options.source.clone(),
        evidence: study.evidence_summary(),
        digits: options.digits,
        inputs: InputsView::new(study, options.digits),
        diagnostics: DiagnosticsView::new(&diagnostics, &options.tolerance, options.digits),
    })
}

fn render_header(
    out: &mut String,
    label: &Option<String>,
    notes: &Option<String>,
    source: &str,
    evidence: &str,
) {
    out.push_str("causebound report\n");
    match label {
        Some(label) => out.push_str(&format!("study: {label} [{source}]\n")),
        None => out.push_str(&format!("study: [{source}]\n")),
    }
    if let Some(notes) = notes {
        out.push_str(&format!("notes: {notes}\n"));
    }
    out.push_str(&format!("evidence: {evidence}\n\n"));
}

pub fn render_analyze_text(doc: &AnalyzeDoc) -> String {
    let mut out = String::new();
    render_header(&mut out, &doc.label, &doc.notes, &doc.source, &doc.evidence);
    doc.inputs.render(&mut out);
    out.push('\n');
    doc.diagnostics.render(&mut out);
    for regime in &doc.regimes {
        out.push('\n');
        out.push_str(&format!(
            "regime: {} [PN guidance: {}]\n",
            regime.assumptions, regime.guidance
        ));
        for note in &regime.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        if regime.status == "refused" {
            out.push_str(&format!(
                "  refused: {}\n",
                regime.refusal.as_deref().unwrap_or("")
            ));
            continue;
        }
        for (name, bound) in [("PNS", &regime.pns), ("PN", &regime.pn), ("PS", &regime.ps)] {
            if let Some(bound) = bound {
                out.push_str(&bound.render(name));
                out.push('\n');
            }
        }
        if let Some(effect_bounds) = &regime.effect_bounds {
            out.push_str(&format!(
                "  P(y_x) in [{}, {}]  P(y_x') in [{}, {}]  ({})\n",
                effect_bounds.p_y_x.lower.decimal,
                effect_bounds.p_y_x.upper.decimal,
                effect_bounds.p_y_x_prime.lower.decimal,
                effect_bounds.p_y_x_prime.upper.decimal,
                effect_bounds.provenance
            ));
        }
        if let Some(attribution) = &regime.attribution {
            if let Some(line) = attribution.render() {
                out.push_str(&line);
                out.push('\n');
            }
            if let Some(exceeds) = attribution.rr_exceeds_two {
                let rr = attribution.rr.as_ref().expect("threshold implies RR");
                out.push_str(&format!(
                    "  legal threshold: RR = {}; RR > 2 establishes PN > 0.5: {}\n",
                    rr.decimal,
                    if exceeds { "yes" } else { "no" }
                ));
            }
        }
        if let Some(err) = &regime.naive_experimental_err {
            out.push_str(&format!(
                "  ERR (naive, experimental) = {} [naive, incorrect under confounding]\n",
                err.decimal
            ));
        }
    }
    out
}

pub fn render_check_text(doc: &CheckDoc) -> String {
    let mut out = String::new();
    render_header(&mut out, &doc.label, &doc.notes, &doc.source, &doc.evidence);
    doc.inputs.render(&mut out);
    out.push('\n');
    doc.diagnostics.render(&mut out);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyView {
    pub magnitude: String,
    pub seed: u64,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRegimeView {
    pub regime: String,
    pub trials: usize,
    pub containment_failures: usize,
    pub sharpness_mismatches: usize,
    pub identity_failures: usize,
    pub trial_errors: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_containment: Option<DiscrepancyView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sharpness: Option<DiscrepancyView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_identity: Option<DiscrepancyView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

impl VerifyRegimeView {
    pub fn new(regime: String, report: &VerificationReport) -> Self {
        let discrepancy = |d: &causebound::Discrepancy| DiscrepancyView {
            magnitude: rational_string(&d.magnitude),
            seed: d.seed,
            index: d.index,
        };
        VerifyRegimeView {
            regime,
            trials: report.trials,
            containment_failures: report.containment_failures,
            sharpness_mismatches: report.sharpness_mismatches,
            identity_failures: report.identity_failures,
            trial_errors: report.trial_errors,
            passed: report.passed(),
            worst_containment: report.worst_containment.as_ref().map(discrepancy),
            worst_sharpness: report.worst_sharpness.as_ref().map(discrepancy),
            worst_identity: report.worst_identity.as_ref().map(discrepancy),
            first_error: report.first_error.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyDoc {
    pub format_version: u32,
    pub command: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub positivity_floor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub injected_defect: Option<&'static str>,
    pub regimes: Vec<VerifyRegimeView>,
    pub passed: bool,
}

pub fn render_verify_text(doc: &VerifyDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "causebound verify  seed={} trials={} floor={}\n",
        doc.seed, doc.trials, doc.positivity_floor
    ));
    if let Some(defect) = doc.injected_defect {
        out.push_str(&format!("injected defect: {defect}\n"));
    }
    out.push('\n');
    for regime in &doc.regimes {
        out.push_str(&format!(
            "regime {:<26} containment={} sharpness={} identities={} errors={}  {}\n",
            regime.regime,
            regime.containment_failures,
            regime.sharpness_mismatches,
            regime.identity_failures,
            regime.trial_errors,
            if regime.passed { "PASS" } else { "FAIL" }
        ));
        if let Some(worst) = &regime.worst_sharpness {
            out.push_str(&format!(
                "  worst sharpness gap {} at seed={} index={}\n",
                worst.magnitude, worst.seed, worst.index
            ));
        }
        if let Some(worst) = &regime.worst_containment {
            out.push_str(&format!(
                "  worst containment gap {} at seed={} index={}\n",
                worst.magnitude, worst.seed, worst.index
            ));
        }
        if let Some(worst) = &regime.worst_identity {
            out.push_str(&format!(
                "  worst identity gap {} at seed={} index={}\n",
                worst.magnitude, worst.seed, worst.index
            ));
        }
        if let Some(error) = &regime.first_error {
            out.push_str(&format!("  first error: {error}\n"));
        }
    }
    out.push('\n');
    out.push_str(if doc.passed {
        "all regimes passed\n"
    } else {
        "FAILURES DETECTED\n"
    });
    out
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report types serialize");
    text.push('\n');
    text
}

/// Renders a generated study as a study file, exactly reproducing the
/// sampled observables as integer counts over a common denominator.
pub fn render_simulated_study(
    profile: &causebound::ResponseProfile,
    label: &str,
    constraints: &AssumptionSet,
) -> String {
    let (joint, effects) = profile.observables();
    let total: u64 = 1_000_000;
    let scale = |value: &Rat| -> u64 {
        let scaled = value * Rat::from_integer(total.into());
        assert!(
            scaled.is_integer(),
            "sampled values have denominator dividing {total}"
        );
        let (num, _) = scaled.into();
        u64::try_from(num).expect("probabilities are nonnegative and at most 1")
    };
    let mut out = String::new();
    out.push_str(&format!("version = 1\nlabel = \"{label}\"\n"));
    out.push_str(&format!(
        "notes = \"sampled response profile; counts are exact probabilities times {total}\"\n"
    ));
    if !constraints.is_empty() {
        let names: Vec<String> = constraints
            .to_string()
            .split('+')
            .map(|s| format!("\"{s}\""))
            .collect();
        out.push_str(&format!("assumptions = [{}]\n", names.join(", ")));
    }
    let y_x = scale(effects.p_y_x());
    let y_xp = scale(effects.p_y_x_prime());
    out.push_str("\n[experimental]\nmode = \"counts\"\n");
    out.push_str(&format!(
        "x = {{ y = {}, y_prime = {} }}\n",
        y_x,
        total - y_x
    ));
    out.push_str(&format!(
        "x_prime = {{ y = {}, y_prime = {} }}\n",
        y_xp,
        total - y_xp
    ));
    out.push_str("\n[observational]\nmode = \"counts\"\n");
    out.push_str(&format!(
        "x = {{ y = {}, y_prime = {} }}\n",
        scale(joint.p_xy()),
        scale(joint.p_xy_prime())
    ));
    out.push_str(&format!(
        "x_prime = {{ y = {}, y_prime = {} }}\n",
        scale(joint.p_x_prime_y()),
        scale(joint.p_x_prime_y_prime())
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::parse_study;
    use causebound::rational::rat;
    use causebound::{sample_profile, SamplerConfig};
    use num_traits::Zero;

    const TABLE2: &str = r#"
version = 1
label = "drug study"

[experimental]
mode = "counts"
x = { y = 16, y_prime = 984 }
x_prime = { y = 14, y_prime = 986 }

[observational]
mode = "counts"
x = { y = 2, y_prime = 998 }
x_prime = { y = 28, y_prime = 972 }
"#;

    fn options(regimes: Vec<AssumptionSet>) -> AnalyzeOptions {
        AnalyzeOptions {
            regimes,
            digits: 3,
            tolerance: Rat::zero(),
            override_contradiction: false,
            source: "test".into(),
        }
    }

    #[test]
    fn analyze_reproduces_published_values() {
        let study = parse_study(TABLE2).unwrap();
        let doc = run_analyze(&study, &options(vec![AssumptionSet::NONE])).unwrap();
        let text = render_analyze_text(&doc);
        assert!(text.contains("PNS in [0.002, 0.016]"));
        assert!(text.contains("PN in [1.0, 1.0]"));
        assert!(text.contains("PS in [0.002, 0.031]"));
        let regime = &doc.regimes[0];
        assert_eq!(
            regime
                .pns
                .as_ref()
                .unwrap()
                .lower
                .as_ref()
                .unwrap()
                .rational,
            "1/500"
        );
    }

    #[test]
    fn analyze_monotone_identification_text() {
        let study = parse_study(TABLE2).unwrap();
        let doc = run_analyze(&study, &options(vec![AssumptionSet::monotonicity()])).unwrap();
        let text = render_analyze_text(&doc);
        assert!(text.contains("PNS = 0.002 (identified, Theorem 3)"));
        assert!(text.contains("PN = 1.0 (identified, Theorem 3)"));
        assert!(text.contains("PS = 0.002 (identified, Theorem 3)"));
        assert!(text.contains("ERR (naive, experimental) = 0.125"));
        assert!(text.contains("naive, incorrect under confounding"));
        assert!(text.contains("PN guidance: CERR"));
    }

    #[test]
    fn analyze_refuses_contradicted_exogeneity_without_override() {
        let study = parse_study(TABLE2).unwrap();
        let result = run_analyze(&study, &options(vec![AssumptionSet::exogeneity()]));
        assert!(matches!(
            result,
            Err(CliError::Core(Error::AssumptionContradiction { .. }))
        ));
    }

    #[test]
    fn analyze_override_annotates_contradicted_regimes() {
        let study = parse_study(TABLE2).unwrap();
        let mut opts = options(vec![
            AssumptionSet::exogeneity(),
            AssumptionSet::exo_monotonicity(),
        ]);
        opts.override_contradiction = true;
        let doc = run_analyze(&study, &opts).unwrap();
        assert_eq!(doc.regimes[0].status, "ok");
        assert!(doc.regimes[0].notes[0].contains("contradicted"));
        // Exogeneity plus monotonicity is impossible here: P(y|x) < P(y|x').
        assert_eq!(doc.regimes[1].status, "refused");
    }

    #[test]
    fn vacuous_bounds_render_canonically() {
        let text = r#"
version = 1

[observational]
mode = "counts"
x = { y = 1, y_prime = 3 }
x_prime = { y = 2, y_prime = 2 }
"#;
        let study = parse_study(text).unwrap();
        let doc = run_analyze(&study, &options(vec![AssumptionSet::NONE])).unwrap();
        let rendered = render_analyze_text(&doc);
        assert!(rendered.contains("PN in [0, 1] (vacuous)"));
        assert!(rendered.contains("PS in [0, 1] (vacuous)"));
    }

    #[test]
    fn json_rendering_is_deterministic_and_exact() {
        let study = parse_study(TABLE2).unwrap();
        let doc = run_analyze(&study, &options(vec![AssumptionSet::NONE])).unwrap();
        let a = to_json(&doc);
        let doc2 = run_analyze(&study, &options(vec![AssumptionSet::NONE])).unwrap();
        let b = to_json(&doc2);
        assert_eq!(a, b);
        assert!(a.contains("\"rational\": \"1/500\""));
        assert!(a.contains("\"decimal\": \"0.002\""));
    }

    #[test]
    fn check_reports_diagnostics_only() {
        let study = parse_study(TABLE2).unwrap();
        let doc = run_check(&study, &options(vec![])).unwrap();
        let text = render_check_text(&doc);
        assert!(text.contains("compatibility"));
        assert!(text.contains("pass"));
        assert!(text.contains("exogeneity"));
        assert!(!text.contains("regime:"));
    }

    #[test]
    fn simulated_studies_round_trip_exactly() {
        let config =
            SamplerConfig::with_default_floor(5, 3, AssumptionSet::monotonicity()).unwrap();
        for index in 0..3 {
            let profile = sample_profile(&config, index).unwrap();
            let rendered = render_simulated_study(&profile, "sim", config.constraints());
            let study = parse_study(&rendered).unwrap();
            let (joint, effects) = profile.observables();
            assert_eq!(study.joint.unwrap(), joint);
            assert_eq!(study.effects.unwrap(), effects);
            assert!(study.declared.assumes_monotonicity());
        }
    }

    #[test]
    fn guidance_matrix() {
        assert_eq!(
            guidance_for(&AssumptionSet::exo_monotonicity(), true, true),
            "ERR"
        );
        assert_eq!(
            guidance_for(&AssumptionSet::exogeneity(), false, true),
            "bounds"
        );
        assert_eq!(
            guidance_for(&AssumptionSet::monotonicity(), true, true),
            "CERR"
        );
        assert_eq!(
            guidance_for(&AssumptionSet::monotonicity(), true, false),
            "vacuous"
        );
        assert_eq!(guidance_for(&AssumptionSet::NONE, true, true), "bounds");
        assert_eq!(guidance_for(&AssumptionSet::NONE, false, true), "vacuous");
    }

    #[test]
    fn decimal_views_round_half_even() {
        let num = Num::new(&rat(5, 162), 3);
        assert_eq!(num.decimal, "0.031");
        assert_eq!(num.rational, "5/162");
    }
}
