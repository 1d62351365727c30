use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sequence::{power_sequence, SequenceDiagnostics, SequenceThresholds};
use super::Verdict;
use crate::combination::CombinationSpec;
use crate::disk::{hyperbolic_derivative_from, rho_raw, DiskPoint};
use crate::dual::Evaluatable;
use crate::norms::{sup_norm, GridSpec, NormKind};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompactnessParams {
    pub grid: GridSpec,
    pub n_max: u32,
    pub thresholds: SequenceThresholds,
    /// Boundary regions `{|φ| > 1 - 2^{-m}}` for `m = 1..=levels`.
    pub levels: u32,
    /// Points per dyadic level on the radial ladders toward contact points.
    pub ladder_per_level: u32,
}

impl Default for CompactnessParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            n_max: 256,
            thresholds: SequenceThresholds::default(),
            levels: 30,
            ladder_per_level: 4,
        }
    }
}

/// Sampled supremum over one boundary region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSup {
    pub m: u32,
    pub delta: f64,
    pub sup: Option<f64>,
    pub witness: Option<DiskPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub quantity: String,
    pub levels: Vec<LevelSup>,
    pub tol_zero: f64,
    pub high_factor: f64,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

/// Power-sequence route, boundary route, and their combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedReport {
    pub power: SequenceDiagnostics,
    pub boundary: BoundaryReport,
    pub verdict: Verdict,
    pub disagreement: bool,
}

impl RoutedReport {
    fn combine(power: SequenceDiagnostics, boundary: BoundaryReport) -> Self {
        let (verdict, disagreement) = power.verdict.agree(boundary.verdict);
        Self { power, boundary, verdict, disagreement }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HinfReport {
    pub sup_estimate: f64,
    pub witness: DiskPoint,
    pub compact_below: f64,
    pub noncompact_from: f64,
    pub verdict: Verdict,
}

pub const HINF_COMPACT_BELOW: f64 = 1.0 - 1e-6;
pub const HINF_NONCOMPACT_FROM: f64 = 1.0 - 1e-9;

/// Grid points plus radial ladders toward the given boundary angles.
fn region_samples(grid: &GridSpec, ladder_angles: &[f64], per_level: u32) -> Vec<Complex64> {
    let g = grid.sanitized();
    let angles = g.angles as usize;
    let mut pts = Vec::new();
    for r in g.radii() {
        if r == 0.0 {
            pts.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for k in 0..angles {
            pts.push(Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / angles as f64));
        }
    }
    let per_level = per_level.max(1);
    for &theta in ladder_angles {
        for k in 1..=(GridSpec::MAX_LEVELS * per_level) {
            let r = 1.0 - (-(k as f64) / per_level as f64).exp2();
            pts.push(Complex64::from_polar(r, theta));
        }
    }
    pts
}

/// `m` such that `1 - |w| < 2^{-m}` is the deepest region containing `w`.
fn depth(modulus: f64, levels: u32) -> u32 {
    let gap = 1.0 - modulus;
    if gap <= 0.0 {
        return levels;
    }
    // 1 - |w| < 2^{-m}  ⟺  m < -log2(gap); the loops absorb rounding in log2
    let mut m = ((-gap.log2()).ceil() - 1.0).clamp(0.0, levels as f64) as u32;
    while m > 0 && gap >= (-(m as f64)).exp2() {
        m -= 1;
    }
    while m < levels && gap < (-((m + 1) as f64)).exp2() {
        m += 1;
    }
    m.min(levels)
}

/// Accumulates `q` at points whose region depth is given, then reports
/// suprema per level (a point of depth `d` lies in every region `m <= d`).
struct LevelAccumulator {
    best: Vec<Option<(f64, Complex64)>>,
}

impl LevelAccumulator {
    fn new(levels: u32) -> Self {
        Self { best: vec![None; levels as usize + 1] }
    }

    fn push(&mut self, depth: u32, q: f64, z: Complex64) {
        let slot = &mut self.best[depth as usize];
        if slot.is_none_or(|(b, _)| q > b) {
            *slot = Some((q, z));
        }
    }

    fn finish(self) -> Vec<LevelSup> {
        let levels = self.best.len() - 1;
        let mut out = Vec::with_capacity(levels);
        let mut running: Option<(f64, Complex64)> = None;
        for m in (1..=levels).rev() {
            if let Some((q, z)) = self.best[m] {
                if running.is_none_or(|(b, _)| q > b) {
                    running = Some((q, z));
                }
            }
            out.push(LevelSup {
                m: m as u32,
                delta: (-(m as f64)).exp2(),
                sup: running.map(|r| r.0),
                witness: running.and_then(|r| DiskPoint::new(r.1).ok()),
            });
        }
        out.reverse();
        out
    }
}

fn boundary_verdict(quantity: &str, levels: Vec<LevelSup>, th: &SequenceThresholds) -> BoundaryReport {
    let tol = th.tol_zero;
    let high = th.high_factor * tol;
    let mut evidence = Vec::new();
    let deepest = levels.last().map(|l| l.m).unwrap_or(0);
    let verdict = match levels.last().and_then(|l| l.sup) {
        None => {
            let reached = levels.iter().rev().find(|l| l.sup.is_some()).map(|l| l.m);
            evidence.push(match reached {
                Some(m) => format!("region 1 - |φ| < 2^-{} not reached (deepest nonempty m = {m})", deepest),
                None => "no sample point in any boundary region".to_string(),
            });
            Verdict::CompactEvidence
        }
        Some(_) => {
            let last: Vec<f64> = levels.iter().rev().take(3).filter_map(|l| l.sup).collect();
            evidence.push(format!(
                "sup {quantity} on the three deepest regions: {}",
                last.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(", ")
            ));
            if last.iter().all(|&v| v > high) {
                evidence.push(format!("all above {high:e}"));
                Verdict::NonCompactEvidence
            } else if last.iter().all(|&v| v < tol) {
                evidence.push(format!("all below {tol:e}"));
                Verdict::CompactEvidence
            } else {
                evidence.push(format!("between {tol:e} and {high:e}"));
                Verdict::Inconclusive
            }
        }
    };
    BoundaryReport {
        quantity: quantity.to_string(),
        levels,
        tol_zero: tol,
        high_factor: th.high_factor,
        verdict,
        evidence,
    }
}

fn witness_angle(s: &Symbol) -> Option<f64> {
    let v = s.validation();
    (!v.strict && v.witness.norm() > 0.0).then(|| v.witness.arg())
}

/// Route (b) of the single-operator test: sampled `sup |φ^#|` over
/// `{|φ| > 1 - 2^{-m}}`.
fn hyperbolic_route(phi: &Symbol, params: &CompactnessParams) -> BoundaryReport {
    let angles: Vec<f64> = witness_angle(phi).into_iter().collect();
    let mut acc = LevelAccumulator::new(params.levels);
    for z in region_samples(&params.grid, &angles, params.ladder_per_level) {
        let d = phi.eval(z);
        let m = d.value.norm();
        let level = depth(m, params.levels);
        if level == 0 {
            continue;
        }
        if let Ok(h) = hyperbolic_derivative_from(z, d.value, d.deriv) {
            acc.push(level, h.norm(), z);
        }
    }
    boundary_verdict("|φ^#|", acc.finish(), &params.thresholds)
}

/// Bloch-space compactness of `C_φ` by the power route `‖φ^n‖_B → 0` and the
/// boundary route `|φ^#| → 0` as `|φ| → 1`.
pub fn single_compactness_bloch(phi: &Symbol, params: &CompactnessParams) -> RoutedReport {
    let spec = CombinationSpec::single(phi.clone());
    let power = power_sequence(&spec, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds);
    RoutedReport::combine(power, hyperbolic_route(phi, params))
}

/// H∞ compactness of `C_φ`: `‖φ^n‖_∞ = ‖φ‖_∞^n`, decided on `sup |φ|`.
pub fn single_compactness_hinf(phi: &Symbol, grid: &GridSpec) -> HinfReport {
    let est = sup_norm(phi, grid);
    let v = phi.validation();
    let (sup_estimate, witness) = if v.sup_estimate > est.value {
        (v.sup_estimate, DiskPoint::new(v.witness).unwrap_or(est.witness))
    } else {
        (est.value, est.witness)
    };
    let verdict = if sup_estimate < HINF_COMPACT_BELOW {
        Verdict::CompactEvidence
    } else if sup_estimate >= HINF_NONCOMPACT_FROM {
        Verdict::NonCompactEvidence
    } else {
        Verdict::Inconclusive
    };
    HinfReport {
        sup_estimate,
        witness,
        compact_below: HINF_COMPACT_BELOW,
        noncompact_from: HINF_NONCOMPACT_FROM,
        verdict,
    }
}

/// Compactness of `C_φ - C_ψ` on the Bloch space: the power route
/// `‖φ^n - ψ^n‖_B → 0` and the boundary route
/// `|φ^#| ρ(φ, ψ) → 0` as `|φ| → 1`, and symmetrically for `ψ`.
pub fn difference_compactness(phi: &Symbol, psi: &Symbol, params: &CompactnessParams) -> RoutedReport {
    let one = Complex64::new(1.0, 0.0);
    let spec =
        CombinationSpec::from_pairs([(one, phi.clone()), (-one, psi.clone())]).expect("unit scalars are nonzero");
    let power = power_sequence(&spec, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds);

    let angles: Vec<f64> = witness_angle(phi).into_iter().chain(witness_angle(psi)).collect();
    let mut acc = LevelAccumulator::new(params.levels);
    for z in region_samples(&params.grid, &angles, params.ladder_per_level) {
        let dp = phi.eval(z);
        let dq = psi.eval(z);
        let rho = rho_raw(dp.value, dq.value);
        for d in [dp, dq] {
            let level = depth(d.value.norm(), params.levels);
            if level == 0 {
                continue;
            }
            if let Ok(h) = hyperbolic_derivative_from(z, d.value, d.deriv) {
                acc.push(level, h.norm() * rho, z);
            }
        }
    }
    let boundary = boundary_verdict("|φ^#|·ρ(φ,ψ)", acc.finish(), &params.thresholds);
    RoutedReport::combine(power, boundary)
}
