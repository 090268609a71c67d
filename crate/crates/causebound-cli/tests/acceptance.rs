//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measurements. Heavy tests serialize on a shared lock
//! so wall-clock budgets are meaningful on one core.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use causebound::rational::rat;
use causebound::{
    bounds_exogenous, build_polytope, check_compatibility, check_monotonicity_compatibility,
    feasible, sample_profile, strong_exo_relations, AssumptionSet, CausalEffects,
    JointDistribution, Rat, ResponseProfile, SamplerConfig,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_causebound"))
}

fn fixture() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/table2.study")
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn json_of(output: &Output) -> Value {
    serde_json::from_str(&stdout_of(output)).expect("valid JSON report")
}

fn rational_at(value: &Value, path: &[&str]) -> String {
    let mut cursor = value;
    for key in path {
        cursor = &cursor[key];
    }
    cursor["rational"]
        .as_str()
        .expect("rational field")
        .to_string()
}

#[test]
fn criterion_1_table2_combined_bounds() {
    let _guard = serial();
    let start = Instant::now();
    let text = stdout_of(&run(&["analyze", &fixture()]));
    let elapsed = start.elapsed();

    assert!(text.contains("PNS in [0.002, 0.016]"), "got:\n{text}");
    assert!(text.contains("PN in [1.0, 1.0]"), "got:\n{text}");
    assert!(text.contains("PS in [0.002, 0.031]"), "got:\n{text}");

    // The same values exactly, via the structured report.
    let json = json_of(&run(&["analyze", &fixture(), "--format", "json"]));
    let regime = &json["regimes"][0];
    assert_eq!(rational_at(regime, &["pns", "lower"]), "1/500");
    assert_eq!(rational_at(regime, &["pns", "upper"]), "2/125");
    assert_eq!(rational_at(regime, &["pn", "lower"]), "1/1");
    assert_eq!(rational_at(regime, &["pn", "upper"]), "1/1");
    assert_eq!(rational_at(regime, &["ps", "lower"]), "1/486");
    assert_eq!(rational_at(regime, &["ps", "upper"]), "5/162");

    assert!(
        elapsed < Duration::from_secs(1),
        "analyze took {elapsed:?}, budget 1s"
    );
    println!("ACCEPTANCE 1 (combined bounds on the study fixture): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_table2_monotone_identification() {
    let _guard = serial();
    let start = Instant::now();
    let text = stdout_of(&run(&["analyze", &fixture(), "--assume", "monotonicity"]));
    let elapsed = start.elapsed();

    assert!(
        text.contains("PNS = 0.002 (identified, Theorem 3)"),
        "got:\n{text}"
    );
    assert!(
        text.contains("PN = 1.0 (identified, Theorem 3)"),
        "got:\n{text}"
    );
    assert!(
        text.contains("PS = 0.002 (identified, Theorem 3)"),
        "got:\n{text}"
    );
    assert!(
        text.contains("ERR (naive, experimental) = 0.125"),
        "got:\n{text}"
    );

    assert!(
        elapsed < Duration::from_secs(1),
        "analyze took {elapsed:?}, budget 1s"
    );
    println!("ACCEPTANCE 2 (monotone identification on the study fixture): PASS in {elapsed:?}");
}

#[test]
fn criterion_3_sharpness_equivalence_10000_trials_per_regime() {
    let _guard = serial();
    let start = Instant::now();
    let output = run(&[
        "verify", "--trials", "10000", "--seed", "42", "--format", "json",
    ]);
    let elapsed = start.elapsed();
    assert!(
        output.status.success(),
        "verify exited nonzero: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let json: Value = serde_json::from_slice(&output.stdout).expect("valid JSON");
    let regimes = json["regimes"].as_array().expect("regimes array");
    assert_eq!(regimes.len(), 5);
    for regime in regimes {
        let name = regime["regime"].as_str().unwrap();
        assert_eq!(regime["trials"].as_u64(), Some(10000), "{name}");
        assert_eq!(regime["sharpness_mismatches"].as_u64(), Some(0), "{name}");
        assert_eq!(regime["containment_failures"].as_u64(), Some(0), "{name}");
        assert_eq!(regime["identity_failures"].as_u64(), Some(0), "{name}");
        assert_eq!(regime["trial_errors"].as_u64(), Some(0), "{name}");
        assert_eq!(regime["passed"].as_bool(), Some(true), "{name}");
    }
    assert_eq!(json["passed"].as_bool(), Some(true));
    assert!(
        elapsed < Duration::from_secs(300),
        "verify took {elapsed:?}, budget 5 minutes"
    );
    println!("ACCEPTANCE 3 (closed forms equal LP optima, 10000 trials x 5 regimes): PASS in {elapsed:?}");
}

#[test]
fn criterion_4_exact_identity_suites() {
    let _guard = serial();
    let start = Instant::now();

    // Lemma 1 residual on 10,000 unconstrained profiles.
    let config = SamplerConfig::with_default_floor(424, 10_000, AssumptionSet::NONE).unwrap();
    for index in 0..config.count() {
        let profile = sample_profile(&config, index).unwrap();
        assert_eq!(
            profile.lemma1_residual().unwrap(),
            Rat::zero(),
            "nonzero residual at index {index}"
        );
    }

    // Theorem 2 relations on 10,000 strongly exogenous profiles.
    let config =
        SamplerConfig::with_default_floor(425, 10_000, AssumptionSet::strong_exogeneity()).unwrap();
    for index in 0..config.count() {
        let profile = sample_profile(&config, index).unwrap();
        let (joint, _) = profile.observables();
        let truth = profile.causation();
        let (pn, ps) = strong_exo_relations(&truth.pns, &joint).unwrap();
        assert_eq!(truth.pn, Some(pn), "PN relation failed at index {index}");
        assert_eq!(truth.ps, Some(ps), "PS relation failed at index {index}");
    }

    // Theorem 5 on 10,000 monotone+exogenous instances: the sampled profile
    // satisfies the joint-independence equations, and so does every vertex
    // of the monotone polytope built from its (exogeneity-consistent)
    // observables.
    let config =
        SamplerConfig::with_default_floor(426, 10_000, AssumptionSet::exo_monotonicity()).unwrap();
    for index in 0..config.count() {
        let profile = sample_profile(&config, index).unwrap();
        assert!(profile.satisfies_strong_exogeneity(), "index {index}");
        let (joint, effects) = profile.observables();
        let system =
            build_polytope(Some(&joint), Some(&effects), &AssumptionSet::monotonicity()).unwrap();
        for point in system.vertices().unwrap() {
            let vertex = ResponseProfile::new(point).unwrap();
            assert!(
                vertex.satisfies_strong_exogeneity(),
                "vertex violates joint independence at index {index}"
            );
        }
    }

    let elapsed = start.elapsed();
    println!("ACCEPTANCE 4 (Lemma 1 / Theorem 2 / Theorem 5 exact on 10000 instances each): PASS in {elapsed:?}");
}

#[test]
fn criterion_5_feasibility_equivalence() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(427);
    let mut compatible = 0usize;
    let mut incompatible = 0usize;
    let mut mono_compatible = 0usize;
    for trial in 0..10_000 {
        let weights: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..=30u64));
        let total: u64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let joint =
            JointDistribution::from_cells(weights.map(|w| Rat::new(w.into(), total.into())))
                .unwrap();
        let effects = CausalEffects::new(
            rat(rng.random_range(0..=30), 30),
            rat(rng.random_range(0..=30), 30),
        )
        .unwrap();

        let bracket = check_compatibility(&joint, &effects).passed();
        let lp = feasible(Some(&joint), Some(&effects), &AssumptionSet::NONE).unwrap();
        assert_eq!(bracket, lp, "compatibility disagreement at trial {trial}");

        let mono_bracket = check_monotonicity_compatibility(&joint, &effects).passed();
        let lp_mono =
            feasible(Some(&joint), Some(&effects), &AssumptionSet::monotonicity()).unwrap();
        assert_eq!(
            mono_bracket, lp_mono,
            "monotone feasibility disagreement at trial {trial}"
        );

        if bracket {
            compatible += 1;
        } else {
            incompatible += 1;
        }
        if mono_bracket {
            mono_compatible += 1;
        }
    }
    assert!(compatible > 500, "only {compatible} compatible draws");
    assert!(incompatible > 500, "only {incompatible} incompatible draws");
    assert!(
        mono_compatible > 100,
        "only {mono_compatible} monotone-compatible draws"
    );
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 5 (bracket tests equal LP feasibility on 10000 mixed pairs; \
         {compatible} compatible / {incompatible} incompatible): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_6_relative_risk_threshold() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(428);
    let half = rat(1, 2);
    for trial in 0..1_000 {
        // Conditionals with RR = b/a > 2 and an interior treatment marginal.
        let a = rng.random_range(1..=499u64);
        let b = rng.random_range(2 * a + 1..=1000u64);
        let p_x = rat(rng.random_range(1..=999) as i64, 1000);
        let c_x = rat(b as i64, 1000);
        let c_xp = rat(a as i64, 1000);
        let p_x_prime = Rat::from_integer(1.into()) - &p_x;
        let joint = JointDistribution::from_cells([
            &c_x * &p_x,
            (Rat::from_integer(1.into()) - &c_x) * &p_x,
            &c_xp * &p_x_prime,
            (Rat::from_integer(1.into()) - &c_xp) * &p_x_prime,
        ])
        .unwrap();
        let report = bounds_exogenous(&joint).unwrap();
        let attribution = report.attribution.as_ref().unwrap();
        assert_eq!(
            attribution.rr_exceeds_legal_threshold(),
            Some(true),
            "trial {trial}"
        );
        let pn = report.pn.interval().expect("PN bounded under exogeneity");
        assert!(
            pn.lower() > &half,
            "trial {trial}: PN lower bound {} not above 1/2",
            pn.lower()
        );
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 6 (RR > 2 forces PN > 0.5 on 1000 exogenous instances): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_7_byte_identical_reports() {
    let _guard = serial();
    let start = Instant::now();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "analyze".into(),
            fixture(),
            "--format".into(),
            "json".into(),
        ],
        vec![
            "analyze".into(),
            fixture(),
            "--assume".into(),
            "monotonicity".into(),
        ],
        vec![
            "verify".into(),
            "--trials".into(),
            "50".into(),
            "--seed".into(),
            "9".into(),
            "--format".into(),
            "json".into(),
        ],
        vec![
            "simulate".into(),
            "--seed".into(),
            "5".into(),
            "--assume".into(),
            "strong-exogeneity".into(),
        ],
        vec!["check".into(), fixture(), "--format".into(), "json".into()],
    ];
    for case in &cases {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), second.status.code(), "{case:?}");
        assert_eq!(
            first.stdout, second.stdout,
            "stdout differs between runs for {case:?}"
        );
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 7 (byte-identical output for identical inputs and seeds): PASS in {elapsed:?}"
    );
}
