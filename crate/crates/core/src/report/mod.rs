//! Run configuration, the full diagnostic pipeline, and report emission.

mod config;
mod emit;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{
    load_config, BoundaryConfig, ConfigError, Format, OutputConfig, RunConfig, TermConfig, TestfnConfig, Tolerances,
    MAX_NMAX,
};
pub use emit::{csv_string, emit, json_string, plot_residual_tails, plot_sequence, EmitError};

use crate::combination::CombinationSpec;
use crate::diagnostics::{
    corollary1_check, corollary2_check, default_paths, power_sequence, sample_delta, single_compactness_bloch,
    single_compactness_hinf, theorem3_verdict, theorem_a, CorollaryReport, HinfReport, RoutedReport,
    SequenceDiagnostics, Theorem3Report, TheoremAReport, Verdict, SUM_TOL,
};
use crate::norms::NormKind;
use crate::symbols::{Symbol, ValidationReport};
use crate::testfns::{
    coefficient_bounds_check, lemma1_check_with_powers, FrameBounds, Lemma1Report, TestFunctionFrame,
};

pub const SCHEMA: &str = "bloch-kit/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermValidation {
    pub index: usize,
    pub symbol: String,
    pub report: Option<ValidationReport>,
    pub error: Option<String>,
}

/// Outcome of a stage whose preconditions may not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Stage<T> {
    Done { result: T },
    Failed { reason: String },
    Skipped { reason: String },
}

impl<T> Stage<T> {
    pub fn result(&self) -> Option<&T> {
        match self {
            Stage::Done { result } => Some(result),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteAgreement {
    pub power_sequence: Verdict,
    pub theorem_a: Verdict,
    pub verdict: Verdict,
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSection {
    pub bloch: RoutedReport,
    pub hinf: HinfReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCheck {
    pub path: usize,
    pub j: usize,
    pub step: usize,
    pub frame: TestFunctionFrame,
    pub bounds: FrameBounds,
    /// Bloch runs only.
    pub lemma1: Option<Lemma1Report>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestfnSection {
    pub frames: Vec<FrameCheck>,
    pub caps_hold: bool,
    pub lemma1_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub power_sequence: SequenceDiagnostics,
    pub theorem_a: TheoremAReport,
    pub route_agreement: RouteAgreement,
    pub single: Stage<SingleSection>,
    pub corollary: Stage<CorollaryReport>,
    pub theorem3: Stage<Theorem3Report>,
    pub testfns: Stage<TestfnSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub stages: Vec<StageTime>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub seed: u64,
    pub config: RunConfig,
    pub validation: Vec<TermValidation>,
    /// `None` when some symbol failed validation.
    pub verdicts: Option<Verdicts>,
    pub timing: Timing,
}

impl Report {
    /// Some `s_n` is not finite.
    pub fn numeric_failure(&self) -> bool {
        self.verdicts.as_ref().is_some_and(|v| v.power_sequence.values.iter().any(|x| !x.is_finite()))
    }

    pub fn validation_failed(&self) -> bool {
        self.validation.iter().any(|v| v.error.is_some())
    }
}

struct Clock {
    start: Instant,
    last: Instant,
    timing: Timing,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Self { start: now, last: now, timing: Timing::default() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timing.stages.push(StageTime { stage: stage.into(), seconds: (now - self.last).as_secs_f64() });
        self.last = now;
    }

    fn finish(mut self) -> Timing {
        self.timing.total_seconds = self.start.elapsed().as_secs_f64();
        self.timing
    }
}

fn validate_terms(config: &RunConfig) -> (Vec<TermValidation>, Option<CombinationSpec>) {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    for (index, t) in config.combination.iter().enumerate() {
        let (report, error) = match Symbol::parse(&t.symbol) {
            Ok(s) => {
                let r = s.validation().clone();
                pairs.push((t.lambda, s));
                (Some(r), None)
            }
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(TermValidation { index, symbol: t.symbol.clone(), report, error });
    }
    if out.iter().any(|v| v.error.is_some()) {
        return (out, None);
    }
    match CombinationSpec::from_pairs(pairs) {
        Ok(spec) => (out, Some(spec)),
        Err(e) => {
            out.push(TermValidation {
                index: config.combination.len(),
                symbol: String::new(),
                report: None,
                error: Some(e.to_string()),
            });
            (out, None)
        }
    }
}

fn single_stage(spec: &CombinationSpec, config: &RunConfig) -> Stage<SingleSection> {
    if spec.k() != 1 {
        return Stage::Skipped { reason: format!("k = {}", spec.k()) };
    }
    let phi = &spec.terms()[0].symbol;
    Stage::Done {
        result: SingleSection {
            bloch: single_compactness_bloch(phi, &config.params()),
            hinf: single_compactness_hinf(phi, &config.grid),
        },
    }
}

fn corollary_stage(spec: &CombinationSpec, config: &RunConfig) -> Stage<CorollaryReport> {
    if spec.k() != 2 {
        return Stage::Skipped { reason: format!("k = {}", spec.k()) };
    }
    let (a, b) = (&spec.terms()[0], &spec.terms()[1]);
    let params = config.params();
    let r = if (a.lambda + b.lambda).norm() <= SUM_TOL {
        corollary1_check(a.lambda, b.lambda, &a.symbol, &b.symbol, &params)
    } else {
        corollary2_check(a.lambda, b.lambda, &a.symbol, &b.symbol, &params)
    };
    match r {
        Ok(result) => Stage::Done { result },
        Err(e) => Stage::Failed { reason: e.to_string() },
    }
}

fn theorem3_stage(spec: &CombinationSpec, config: &RunConfig) -> Stage<Theorem3Report> {
    if spec.k() < 2 {
        return Stage::Skipped { reason: "k = 1".into() };
    }
    match theorem3_verdict(spec, &config.params()) {
        Ok(result) => Stage::Done { result },
        Err(e) => Stage::Failed { reason: e.to_string() },
    }
}

fn testfn_stage(
    spec: &CombinationSpec,
    config: &RunConfig,
    samples: &[crate::diagnostics::DeltaSample],
    thm_a: &TheoremAReport,
    power: &SequenceDiagnostics,
) -> Stage<TestfnSection> {
    let tf = &config.testfns;
    if !tf.enabled {
        return Stage::Skipped { reason: "disabled".into() };
    }
    let mut frames = Vec::new();
    'outer: for (p, sets) in thm_a.index_sets.iter().enumerate() {
        let Some(sets) = sets else { continue };
        let step = samples[p].records.len().saturating_sub(1);
        for js in &sets.per_j {
            if frames.len() >= tf.max_frames {
                break 'outer;
            }
            let frame = match TestFunctionFrame::from_sample(&samples[p], sets, js.j, step) {
                Ok(f) => f,
                Err(e) => return Stage::Failed { reason: format!("path {p}, j = {}: {e}", js.j) },
            };
            let bounds = coefficient_bounds_check(&frame, tf.truncation, tf.head);
            let lemma1 = (config.norm == NormKind::Bloch)
                .then(|| lemma1_check_with_powers(spec, &frame, tf.head, &power.values, tf.truncation, &config.grid));
            frames.push(FrameCheck { path: p, j: js.j, step, frame, bounds, lemma1 });
        }
    }
    if frames.is_empty() {
        return Stage::Skipped { reason: "no path in Δ reaches the boundary under any symbol".into() };
    }
    let caps_hold = frames.iter().all(|f| f.bounds.f.cap_holds && f.bounds.g.cap_holds);
    let lemma1_holds = frames
        .iter()
        .map(|f| f.lemma1.as_ref().map(|l| l.holds))
        .collect::<Option<Vec<_>>>()
        .map(|v| v.iter().all(|&b| b));
    Stage::Done { result: TestfnSection { frames, caps_hold, lemma1_holds } }
}

/// Validation, power sequence, Δ sampling and the Theorem A conditions,
/// the structural checks that apply to `k`, then the test-function bounds.
pub fn run(config: &RunConfig) -> Report {
    let mut clock = Clock::new();
    let (validation, spec) = validate_terms(config);
    clock.lap("validation");
    let verdicts = spec.map(|spec| {
        let power = power_sequence(&spec, config.norm, config.n_max, &config.grid, &config.thresholds);
        clock.lap("power_sequence");
        let paths = default_paths(&spec, &config.paths, config.seed);
        let samples = sample_delta(&paths, &spec, config.tolerances.tol_conv);
        let thm_a = theorem_a(&spec, &samples, &config.tolerances.index());
        clock.lap("theorem_a");
        let (verdict, disagreement) = power.verdict.agree(thm_a.verdict);
        let route_agreement =
            RouteAgreement { power_sequence: power.verdict, theorem_a: thm_a.verdict, verdict, disagreement };
        let single = single_stage(&spec, config);
        clock.lap("single");
        let corollary = corollary_stage(&spec, config);
        clock.lap("corollary");
        let theorem3 = theorem3_stage(&spec, config);
        clock.lap("theorem3");
        let testfns = testfn_stage(&spec, config, &samples, &thm_a, &power);
        clock.lap("testfns");
        Verdicts { power_sequence: power, theorem_a: thm_a, route_agreement, single, corollary, theorem3, testfns }
    });
    Report {
        schema: SCHEMA.into(),
        seed: config.seed,
        config: config.clone(),
        validation,
        verdicts,
        timing: clock.finish(),
    }
}
