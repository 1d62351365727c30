use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::paths::BoundaryPath;
use super::Verdict;
use crate::combination::CombinationSpec;
use crate::disk::{hyperbolic_derivative_from, rho_raw, DiskPoint};
use crate::dual::Evaluatable;

/// Values along one step `z_n` of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub z: DiskPoint,
    /// `φ_i(z_n)`.
    pub values: Vec<Complex64>,
    /// `φ_i^#(z_n)`, `None` where `|φ_i(z_n)|` is numerically 1.
    pub sharp: Vec<Option<Complex64>>,
    /// `ρ(φ_i(z_n), φ_j(z_n))`.
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFlags {
    pub values: Vec<bool>,
    pub sharp: Vec<bool>,
    pub rho: Vec<Vec<bool>>,
}

/// Tail means of the recorded sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub values: Vec<Complex64>,
    pub sharp: Vec<Option<Complex64>>,
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSample {
    pub path: BoundaryPath,
    pub records: Vec<StepRecord>,
    /// First record of the tail used for convergence and limits.
    pub tail_start: usize,
    pub tol_conv: f64,
    pub convergence: ConvergenceFlags,
    /// Every recorded sequence converged; otherwise the path is kept for
    /// inspection but excluded from the criteria.
    pub in_delta: bool,
    pub limits: Limits,
}

pub const DELTA_TAIL_FRACTION: f64 = 0.25;

fn diameter<T: Copy, D: Fn(T, T) -> f64>(xs: &[T], dist: D) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            d = d.max(dist(a, b));
        }
    }
    d
}

fn mean_c(xs: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut s, mut n) = (Complex64::new(0.0, 0.0), 0usize);
    for x in xs {
        s += x;
        n += 1;
    }
    s / n.max(1) as f64
}

impl DeltaSample {
    /// Classifies recorded sequences by tail variation (`max - min < tol_conv`).
    pub fn classify(path: BoundaryPath, records: Vec<StepRecord>, tol_conv: f64) -> Self {
        let k = records.first().map_or(0, |r| r.values.len());
        let len = records.len();
        let tail_len = ((len as f64 * DELTA_TAIL_FRACTION).ceil() as usize).clamp(1.min(len), len);
        let tail_start = len - tail_len;
        let tail = &records[tail_start..];

        let mut conv = ConvergenceFlags { values: vec![false; k], sharp: vec![false; k], rho: vec![vec![false; k]; k] };
        let mut limits =
            Limits { values: vec![Complex64::new(0.0, 0.0); k], sharp: vec![None; k], rho: vec![vec![0.0; k]; k] };
        for i in 0..k {
            let vals: Vec<Complex64> = tail.iter().map(|r| r.values[i]).collect();
            conv.values[i] = !vals.is_empty() && diameter(&vals, |a, b| (a - b).norm()) < tol_conv;
            limits.values[i] = mean_c(vals.iter().copied());

            let sharp: Option<Vec<Complex64>> = tail.iter().map(|r| r.sharp[i]).collect();
            if let Some(s) = sharp {
                conv.sharp[i] = !s.is_empty() && diameter(&s, |a, b| (a - b).norm()) < tol_conv;
                limits.sharp[i] = Some(mean_c(s.iter().copied()));
            }
            for j in 0..k {
                let rs: Vec<f64> = tail.iter().map(|r| r.rho[i][j]).collect();
                conv.rho[i][j] = !rs.is_empty() && diameter(&rs, |a, b| (a - b).abs()) < tol_conv;
                limits.rho[i][j] = rs.iter().sum::<f64>() / rs.len().max(1) as f64;
            }
        }
        let in_delta = len > 0
            && conv.values.iter().all(|&c| c)
            && conv.sharp.iter().all(|&c| c)
            && conv.rho.iter().flatten().all(|&c| c);
        Self { path, records, tail_start, tol_conv, convergence: conv, in_delta, limits }
    }

    pub fn k(&self) -> usize {
        self.limits.values.len()
    }

    pub fn tail(&self) -> &[StepRecord] {
        &self.records[self.tail_start..]
    }
}

fn record(spec: &CombinationSpec, z: DiskPoint) -> StepRecord {
    let k = spec.k();
    let evals: Vec<_> = spec.terms().iter().map(|t| t.symbol.eval(z.value())).collect();
    let values: Vec<Complex64> = evals.iter().map(|d| d.value).collect();
    let sharp = evals.iter().map(|d| hyperbolic_derivative_from(z.value(), d.value, d.deriv).ok()).collect();
    let mut rho = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = rho_raw(values[i], values[j]);
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }
    StepRecord { z, values, sharp, rho }
}

/// Records `φ_i`, `φ_i^#` and `ρ_ij` along every path.
pub fn sample_delta(paths: &[BoundaryPath], spec: &CombinationSpec, tol_conv: f64) -> Vec<DeltaSample> {
    paths
        .par_iter()
        .map(|p| {
            let records = p.steps.iter().map(|&z| record(spec, z)).collect();
            DeltaSample::classify(p.clone(), records, tol_conv)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexTolerances {
    /// `i ∈ I` when the tail mean of `|φ_i|` exceeds `1 - tol_one`.
    pub tol_one: f64,
    /// `ρ → 0`, `φ^# → 0` and residual-to-zero threshold.
    pub tol_zero: f64,
    /// Equal-limit threshold for `I_j^#`.
    pub tol_sharp: f64,
    /// Values within `[tol, band · tol)` are borderline.
    pub band: f64,
    /// `|Σ λ_i| <= sum_tol` counts as zero.
    pub sum_tol: f64,
}

impl Default for IndexTolerances {
    fn default() -> Self {
        Self { tol_one: 1e-3, tol_zero: 1e-3, tol_sharp: 1e-3, band: 10.0, sum_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JSets {
    pub j: usize,
    pub i_j: Vec<usize>,
    pub i_j_star: Vec<usize>,
    pub i_j_sharp: Vec<usize>,
    /// Indices whose membership in one of the sets is borderline.
    pub borderline: Vec<usize>,
}

/// Index sets of one path; indices are 0-based positions in the spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSets {
    pub i: Vec<usize>,
    pub per_j: Vec<JSets>,
    pub tolerances: IndexTolerances,
}

impl IndexSets {
    pub fn get(&self, j: usize) -> Option<&JSets> {
        self.per_j.iter().find(|s| s.j == j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Maybe,
}

impl Tri {
    /// `value < tol` is Yes, `value >= band · tol` is No.
    fn small(value: f64, tol: f64, band: f64) -> Tri {
        if value < tol {
            Tri::Yes
        } else if value < band * tol {
            Tri::Maybe
        } else {
            Tri::No
        }
    }

    fn negate(self) -> Tri {
        match self {
            Tri::Yes => Tri::No,
            Tri::No => Tri::Yes,
            Tri::Maybe => Tri::Maybe,
        }
    }

    /// Membership at the stated threshold (`Maybe` resolved by the plain cutoff).
    fn base(self, maybe: bool) -> bool {
        match self {
            Tri::Yes => true,
            Tri::No => false,
            Tri::Maybe => maybe,
        }
    }
}

/// Per-index memberships relative to `j`.
struct Membership {
    /// `ρ_ij → 0`.
    near: Tri,
    /// `φ_i^# ↛ 0`.
    nonzero: Tri,
    /// `lim φ_i^# = lim φ_j^#`.
    equal: Tri,
}

fn memberships(sample: &DeltaSample, i_set: &[usize], j: usize, tol: &IndexTolerances) -> Vec<(usize, Membership)> {
    let sharp_j = sample.limits.sharp[j];
    i_set
        .iter()
        .map(|&i| {
            let near = if i == j { Tri::Yes } else { Tri::small(sample.limits.rho[i][j], tol.tol_zero, tol.band) };
            let (nonzero, equal) = match (sample.limits.sharp[i], sharp_j) {
                (Some(si), Some(sj)) => (
                    Tri::small(si.norm(), tol.tol_zero, tol.band).negate(),
                    if i == j { Tri::Yes } else { Tri::small((si - sj).norm(), tol.tol_sharp, tol.band) },
                ),
                _ => (Tri::Maybe, Tri::Maybe),
            };
            (i, Membership { near, nonzero, equal })
        })
        .collect()
}

/// `I = {i : |φ_i| → 1}` and, for each `j ∈ I`, `I_j`, `I_j^*`, `I_j^#`.
pub fn index_sets(sample: &DeltaSample, tol: &IndexTolerances) -> IndexSets {
    let k = sample.k();
    let i: Vec<usize> = (0..k).filter(|&i| sample.limits.values[i].norm() > 1.0 - tol.tol_one).collect();
    let per_j = i
        .iter()
        .map(|&j| {
            let ms = memberships(sample, &i, j, tol);
            let i_j: Vec<usize> = ms.iter().filter(|(_, m)| m.near.base(false)).map(|(i, _)| *i).collect();
            // borderline |φ^#| in [tol, band·tol) counts as "does not tend to 0"
            let i_j_star =
                ms.iter().filter(|(_, m)| m.near.base(false) && m.nonzero.base(true)).map(|(i, _)| *i).collect();
            let i_j_sharp =
                ms.iter().filter(|(_, m)| m.near.base(false) && m.equal.base(false)).map(|(i, _)| *i).collect();
            let borderline = ms
                .iter()
                .filter(|(_, m)| m.near == Tri::Maybe || m.nonzero == Tri::Maybe || m.equal == Tri::Maybe)
                .map(|(i, _)| *i)
                .collect();
            JSets { j, i_j, i_j_star, i_j_sharp, borderline }
        })
        .collect();
    IndexSets { i, per_j, tolerances: *tol }
}

/// Every resolution of the borderline memberships: `(I_j, I_j^*, I_j^#, φ_j^# ↛ 0)`.
type Variant = (Vec<usize>, Vec<usize>, Vec<usize>, bool);

const MAX_BORDERLINE_BITS: usize = 12;

fn variants(sample: &DeltaSample, sets: &IndexSets, j: usize) -> Option<Vec<Variant>> {
    let ms = memberships(sample, &sets.i, j, &sets.tolerances);
    let mut slots = Vec::new();
    for (pos, (_, m)) in ms.iter().enumerate() {
        for (field, t) in [m.near, m.nonzero, m.equal].into_iter().enumerate() {
            if t == Tri::Maybe {
                slots.push((pos, field));
            }
        }
    }
    if slots.len() > MAX_BORDERLINE_BITS {
        return None;
    }
    let mut out = Vec::with_capacity(1 << slots.len());
    for mask in 0u32..(1 << slots.len()) {
        let choice = |pos: usize, field: usize, t: Tri| match t {
            Tri::Maybe => {
                let bit = slots.iter().position(|&s| s == (pos, field)).expect("slot registered");
                mask & (1 << bit) != 0
            }
            other => other == Tri::Yes,
        };
        let (mut i_j, mut star, mut sharp) = (Vec::new(), Vec::new(), Vec::new());
        let mut j_nonzero = false;
        for (pos, (i, m)) in ms.iter().enumerate() {
            let near = choice(pos, 0, m.near);
            let nonzero = choice(pos, 1, m.nonzero);
            let equal = choice(pos, 2, m.equal);
            if *i == j {
                j_nonzero = nonzero;
            }
            if near {
                i_j.push(*i);
                if nonzero {
                    star.push(*i);
                }
                if equal {
                    sharp.push(*i);
                }
            }
        }
        out.push((i_j, star, sharp, j_nonzero));
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionOutcome {
    Holds,
    Fails,
    Inconclusive,
    NotApplicable,
}

impl ConditionOutcome {
    fn merge(outcomes: impl IntoIterator<Item = ConditionOutcome>) -> ConditionOutcome {
        let mut seen: Option<ConditionOutcome> = None;
        for o in outcomes {
            let o = if o == ConditionOutcome::NotApplicable { ConditionOutcome::Holds } else { o };
            seen = match seen {
                None => Some(o),
                Some(s) if s == o => Some(s),
                _ => return ConditionOutcome::Inconclusive,
            };
        }
        seen.unwrap_or(ConditionOutcome::Inconclusive)
    }
}

/// One condition evaluated on one path for one `j ∈ I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub path: usize,
    pub j: usize,
    pub outcome: ConditionOutcome,
    /// Tail maximum for (ii), `|Σ λ_i|` for (iii)/(iv), at the stated thresholds.
    pub residual: f64,
    /// (ii) only: `|Σ_{i∈I_j} λ_i φ_i^#(z_n)|` over the tail.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tail: Vec<f64>,
}

fn lambda_sum(spec: &CombinationSpec, idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| spec.terms()[i].lambda).sum()
}

fn residual_tail(spec: &CombinationSpec, sample: &DeltaSample, i_j: &[usize]) -> Option<Vec<f64>> {
    sample
        .tail()
        .iter()
        .map(|r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &i in i_j {
                acc += spec.terms()[i].lambda * r.sharp[i]?;
            }
            Some(acc.norm())
        })
        .collect()
}

fn decide_small(value: f64, tol: f64, band: f64) -> ConditionOutcome {
    match Tri::small(value, tol, band) {
        Tri::Yes => ConditionOutcome::Holds,
        Tri::No => ConditionOutcome::Fails,
        Tri::Maybe => ConditionOutcome::Inconclusive,
    }
}

/// (ii): `Σ_{i∈I_j} λ_i φ_i^#(z_n) → 0`, judged on the tail maximum.
pub fn condition_ii(
    spec: &CombinationSpec,
    sample: &DeltaSample,
    sets: &IndexSets,
    path: usize,
) -> Vec<ConditionRecord> {
    let tol = &sets.tolerances;
    sets.per_j
        .iter()
        .map(|s| {
            let tail = residual_tail(spec, sample, &s.i_j).unwrap_or_default();
            let residual = tail.iter().copied().fold(0.0, f64::max);
            let outcome = match variants(sample, sets, s.j) {
                Some(vs) if !tail.is_empty() => {
                    ConditionOutcome::merge(vs.iter().map(|(i_j, ..)| match residual_tail(spec, sample, i_j) {
                        Some(t) => decide_small(t.iter().copied().fold(0.0, f64::max), tol.tol_zero, tol.band),
                        None => ConditionOutcome::Inconclusive,
                    }))
                }
                _ => ConditionOutcome::Inconclusive,
            };
            ConditionRecord { path, j: s.j, outcome, residual, tail }
        })
        .collect()
}

fn sum_outcome(spec: &CombinationSpec, idx: &[usize], tol: f64) -> ConditionOutcome {
    if lambda_sum(spec, idx).norm() <= tol {
        ConditionOutcome::Holds
    } else {
        ConditionOutcome::Fails
    }
}

/// (iii): `Σ_{i∈I_j^*} λ_i = 0`.
pub fn condition_iii(
    spec: &CombinationSpec,
    sample: &DeltaSample,
    sets: &IndexSets,
    path: usize,
) -> Vec<ConditionRecord> {
    let tol = sets.tolerances.sum_tol;
    sets.per_j
        .iter()
        .map(|s| {
            let outcome = match variants(sample, sets, s.j) {
                Some(vs) => ConditionOutcome::merge(vs.iter().map(|(_, star, ..)| sum_outcome(spec, star, tol))),
                None => ConditionOutcome::Inconclusive,
            };
            ConditionRecord { path, j: s.j, outcome, residual: lambda_sum(spec, &s.i_j_star).norm(), tail: Vec::new() }
        })
        .collect()
}

/// (iv): `Σ_{i∈I_j^#} λ_i = 0` for `j` with `φ_j^# ↛ 0`.
pub fn condition_iv(
    spec: &CombinationSpec,
    sample: &DeltaSample,
    sets: &IndexSets,
    path: usize,
) -> Vec<ConditionRecord> {
    let tol = sets.tolerances.sum_tol;
    sets.per_j
        .iter()
        .map(|s| {
            let applies = s.i_j_star.contains(&s.j);
            let outcome = match variants(sample, sets, s.j) {
                Some(vs) => {
                    let merged = ConditionOutcome::merge(vs.iter().map(|(_, _, sharp, nonzero)| {
                        if *nonzero {
                            sum_outcome(spec, sharp, tol)
                        } else {
                            ConditionOutcome::NotApplicable
                        }
                    }));
                    if !applies && merged == ConditionOutcome::Holds {
                        ConditionOutcome::NotApplicable
                    } else {
                        merged
                    }
                }
                None => ConditionOutcome::Inconclusive,
            };
            ConditionRecord { path, j: s.j, outcome, residual: lambda_sum(spec, &s.i_j_sharp).norm(), tail: Vec::new() }
        })
        .collect()
}

/// Sampled Theorem A conditions over every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremAReport {
    pub paths: usize,
    pub delta_paths: usize,
    pub index_sets: Vec<Option<IndexSets>>,
    pub condition_ii: Vec<ConditionRecord>,
    pub condition_iii: Vec<ConditionRecord>,
    pub condition_iv: Vec<ConditionRecord>,
    pub verdict_ii: Verdict,
    pub verdict_iii: Verdict,
    pub verdict_iv: Verdict,
    /// From (ii) and (iii): any decisive failure is non-compact evidence,
    /// all conditions holding is compact evidence.
    pub verdict: Verdict,
    /// (ii) and (iii) reached different decisive verdicts.
    pub disagreement: bool,
    pub tolerances: IndexTolerances,
    pub tol_conv: f64,
    pub evidence: Vec<String>,
}

fn condition_verdict(records: &[ConditionRecord], delta_paths: usize) -> Verdict {
    if records.iter().any(|r| r.outcome == ConditionOutcome::Fails) {
        Verdict::NonCompactEvidence
    } else if delta_paths == 0 || records.iter().any(|r| r.outcome == ConditionOutcome::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::CompactEvidence
    }
}

/// Evaluates (ii), (iii), (iv) on every path in Δ and aggregates.
pub fn theorem_a(spec: &CombinationSpec, samples: &[DeltaSample], tol: &IndexTolerances) -> TheoremAReport {
    let mut index = Vec::with_capacity(samples.len());
    let (mut ii, mut iii, mut iv) = (Vec::new(), Vec::new(), Vec::new());
    let mut delta_paths = 0;
    for (p, sample) in samples.iter().enumerate() {
        if !sample.in_delta {
            index.push(None);
            continue;
        }
        delta_paths += 1;
        let sets = index_sets(sample, tol);
        ii.extend(condition_ii(spec, sample, &sets, p));
        iii.extend(condition_iii(spec, sample, &sets, p));
        iv.extend(condition_iv(spec, sample, &sets, p));
        index.push(Some(sets));
    }
    let verdict_ii = condition_verdict(&ii, delta_paths);
    let verdict_iii = condition_verdict(&iii, delta_paths);
    let verdict_iv = condition_verdict(&iv, delta_paths);
    let disagreement = verdict_ii.is_decisive() && verdict_iii.is_decisive() && verdict_ii != verdict_iii;
    let verdict = match (verdict_ii, verdict_iii) {
        (Verdict::NonCompactEvidence, _) | (_, Verdict::NonCompactEvidence) => Verdict::NonCompactEvidence,
        (Verdict::CompactEvidence, Verdict::CompactEvidence) => Verdict::CompactEvidence,
        _ => Verdict::Inconclusive,
    };
    let count = |rs: &[ConditionRecord], o| rs.iter().filter(|r| r.outcome == o).count();
    let mut evidence = vec![format!("{delta_paths} of {} paths in Δ", samples.len())];
    for (name, rs) in [("(ii)", &ii), ("(iii)", &iii), ("(iv)", &iv)] {
        evidence.push(format!(
            "{name}: {} hold, {} fail, {} inconclusive, {} not applicable",
            count(rs, ConditionOutcome::Holds),
            count(rs, ConditionOutcome::Fails),
            count(rs, ConditionOutcome::Inconclusive),
            count(rs, ConditionOutcome::NotApplicable)
        ));
    }
    if let Some(r) = ii.iter().chain(&iii).find(|r| r.outcome == ConditionOutcome::Fails) {
        evidence.push(format!("first failure: path {} ({}), j = {}", r.path, samples[r.path].path.label(), r.j));
    }
    TheoremAReport {
        paths: samples.len(),
        delta_paths,
        index_sets: index,
        condition_ii: ii,
        condition_iii: iii,
        condition_iv: iv,
        verdict_ii,
        verdict_iii,
        verdict_iv,
        verdict,
        disagreement,
        tolerances: *tol,
        tol_conv: samples.first().map_or(1e-3, |s| s.tol_conv),
        evidence,
    }
}
