//! The test functions used to prove the power-sequence criteria, and the
//! coefficient bounds those proofs rely on.
//!
//! For a frame with base data `a_j` and `a_i` (`i ∈ I \ J`):
//!
//! * `f(z) = σ_{a_j}(z) Π σ_{a_i}(z)^2 - γ` with `γ = a_j Π a_i^2` (Bloch case),
//! * `g(z) = (1 - |a_j|^2)/(1 - conj(a_j) z) · Π σ_{a_i}(z)` (H∞ case).
//!
//! These are unrelated to the monomials `p_n(z) = z^n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combination::CombinationSpec;
use crate::diagnostics::{DeltaSample, IndexSets};
use crate::disk::DiskPoint;
use crate::dual::{Dual, Evaluatable};
use crate::norms::{bloch_norm, combination_norms, monomial_bloch_norm_exact, GridSpec, NormKind};
use crate::series::{cauchy_product, kernel_series, sigma_series, PowerSeries};

pub const DEFAULT_TRUNCATION: usize = 4096;
pub const MAX_TRUNCATION: usize = 10_000;
/// Slack on the cap inequalities.
pub const CAP_SLACK: f64 = 1e-9;
/// A tail bound above this fraction of the cap raises a truncation warning.
pub const TAIL_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize, Deserialize)]
pub enum FrameError {
    #[error("index {j} is not in I")]
    JNotInI { j: usize },
    #[error("I_j must contain j and lie inside I")]
    BadJSet,
    #[error("no sampled value for index {i}")]
    MissingValue { i: usize },
    #[error("step {step} is outside the sample")]
    BadStep { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFrame {
    /// The point `z_n` the values were taken at (the origin for hand-built frames).
    pub base: DiskPoint,
    pub j: usize,
    /// `a_i = φ_i(z_n)` for `i ∈ I`, sorted by index.
    pub a_values: Vec<(usize, DiskPoint)>,
    /// `J = I_j`.
    pub j_set: Vec<usize>,
    /// `a_j Π_{i∈I\J} a_i^2`.
    pub gamma: Complex64,
}

impl TestFunctionFrame {
    pub fn new(
        base: DiskPoint,
        j: usize,
        mut a_values: Vec<(usize, DiskPoint)>,
        mut j_set: Vec<usize>,
    ) -> Result<Self, FrameError> {
        a_values.sort_by_key(|p| p.0);
        a_values.dedup_by_key(|p| p.0);
        j_set.sort_unstable();
        j_set.dedup();
        if !a_values.iter().any(|p| p.0 == j) {
            return Err(FrameError::JNotInI { j });
        }
        if !j_set.contains(&j) || j_set.iter().any(|i| !a_values.iter().any(|p| p.0 == *i)) {
            return Err(FrameError::BadJSet);
        }
        let mut frame = Self { base, j, a_values, j_set, gamma: Complex64::new(0.0, 0.0) };
        frame.gamma = frame.outside().iter().fold(frame.a_j().value(), |g, a| g * a.value() * a.value());
        Ok(frame)
    }

    /// Frame with `I = {0, 1, ..}`, `j = 0`, `J = {0}` and the given values.
    pub fn from_values(a_j: DiskPoint, outside: &[DiskPoint]) -> Self {
        let a_values = std::iter::once(a_j).chain(outside.iter().copied()).enumerate().collect();
        Self::new(DiskPoint::ORIGIN, 0, a_values, vec![0]).expect("well-formed by construction")
    }

    /// Frame at one step of a sampled path.
    pub fn from_sample(sample: &DeltaSample, sets: &IndexSets, j: usize, step: usize) -> Result<Self, FrameError> {
        let rec = sample.records.get(step).ok_or(FrameError::BadStep { step })?;
        let js = sets.get(j).ok_or(FrameError::JNotInI { j })?;
        let a_values = sets
            .i
            .iter()
            .map(|&i| DiskPoint::new(rec.values[i]).map(|a| (i, a)).map_err(|_| FrameError::MissingValue { i }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rec.z, j, a_values, js.i_j.clone())
    }

    pub fn a_j(&self) -> DiskPoint {
        self.a_values.iter().find(|p| p.0 == self.j).map(|p| p.1).expect("j ∈ I checked on construction")
    }

    /// `a_i` for `i ∈ I \ J`.
    pub fn outside(&self) -> Vec<DiskPoint> {
        self.a_values.iter().filter(|p| !self.j_set.contains(&p.0)).map(|p| p.1).collect()
    }

    pub fn outside_count(&self) -> usize {
        self.a_values.len() - self.a_values.iter().filter(|p| self.j_set.contains(&p.0)).count()
    }

    /// Same directions with every `|a_i|` set to `r` (zero values keep direction 1).
    pub fn with_modulus(&self, r: f64) -> Self {
        let a_values = self
            .a_values
            .iter()
            .map(|&(i, a)| {
                let theta = if a.norm() == 0.0 { 0.0 } else { a.value().arg() };
                (i, DiskPoint::from_polar(r, theta).expect("r < 1"))
            })
            .collect();
        Self::new(self.base, self.j, a_values, self.j_set.clone()).expect("same index structure")
    }
}

fn sigma_dual(a: Complex64, z: Dual) -> Dual {
    (Dual::constant(a) - z) * (Dual::constant(Complex64::new(1.0, 0.0)) - z.scale(a.conj())).recip()
}

/// `f = σ_{a_j} Π σ_{a_i}^2 - γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTestFunction {
    a_j: Complex64,
    outside: Vec<Complex64>,
    gamma: Complex64,
}

impl Evaluatable for BlochTestFunction {
    fn eval_dual(&self, z: Dual) -> Dual {
        let mut acc = sigma_dual(self.a_j, z);
        for &a in &self.outside {
            let s = sigma_dual(a, z);
            acc = acc * s * s;
        }
        acc + (-self.gamma)
    }
}

/// `g = (1 - |a_j|^2)/(1 - conj(a_j) z) · Π σ_{a_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupTestFunction {
    a_j: Complex64,
    outside: Vec<Complex64>,
}

impl Evaluatable for SupTestFunction {
    fn eval_dual(&self, z: Dual) -> Dual {
        let one = Dual::constant(Complex64::new(1.0, 0.0));
        let weight = 1.0 - self.a_j.norm_sqr();
        let mut acc = (one - z.scale(self.a_j.conj())).recip().scale(Complex64::new(weight, 0.0));
        for &a in &self.outside {
            acc = acc * sigma_dual(a, z);
        }
        acc
    }
}

pub fn build_fn(frame: &TestFunctionFrame) -> BlochTestFunction {
    BlochTestFunction {
        a_j: frame.a_j().value(),
        outside: frame.outside().iter().map(|a| a.value()).collect(),
        gamma: frame.gamma,
    }
}

pub fn build_gn(frame: &TestFunctionFrame) -> SupTestFunction {
    SupTestFunction { a_j: frame.a_j().value(), outside: frame.outside().iter().map(|a| a.value()).collect() }
}

/// `z ↦ Σ λ_i f(φ_i(z))`.
#[derive(Debug, Clone, Copy)]
pub struct Applied<'a, F: ?Sized> {
    spec: &'a CombinationSpec,
    f: &'a F,
}

impl<F: Evaluatable + ?Sized> Evaluatable for Applied<'_, F> {
    fn eval_dual(&self, z: Dual) -> Dual {
        let mut acc = Dual::constant(Complex64::new(0.0, 0.0));
        for t in self.spec.terms() {
            acc = acc + self.f.eval_dual(t.symbol.eval_dual(z)).scale(t.lambda);
        }
        acc
    }
}

pub fn apply_combination<'a, F: Evaluatable + ?Sized>(spec: &'a CombinationSpec, f: &'a F) -> Applied<'a, F> {
    Applied { spec, f }
}

/// Truncated Taylor series of `f` (constant term included).
pub fn fn_series(frame: &TestFunctionFrame, order: usize) -> PowerSeries {
    let mut s = sigma_series(frame.a_j(), order);
    for a in frame.outside() {
        let sa = sigma_series(a, order);
        s = cauchy_product(&cauchy_product(&s, &sa), &sa);
    }
    s.add_constant(-frame.gamma)
}

pub fn gn_series(frame: &TestFunctionFrame, order: usize) -> PowerSeries {
    let mut s = kernel_series(frame.a_j(), order);
    for a in frame.outside() {
        s = cauchy_product(&s, &sigma_series(a, order));
    }
    s
}

/// Coefficients of the termwise-modulus majorant, multiplied in place by the
/// rational factor `(p + q x) / (1 - r x)`.
fn mul_majorant(h: &mut [f64], p: f64, q: f64, r: f64) {
    let mut prev_in = 0.0;
    let mut prev_out = 0.0;
    for c in h.iter_mut() {
        let out = r * prev_out + p * *c + q * prev_in;
        prev_in = *c;
        *c = out;
        prev_out = out;
    }
}

/// Upper bound for `Σ_{l>order} |coefficient_l|` from the majorant series:
/// `σ_a` is dominated by `|a| + (1-|a|^2) Σ |a|^l x^{l+1}` (total `1 + 2|a|`)
/// and the kernel by `(1-|a|^2) Σ |a|^l x^l` (total `1 + |a|`).
fn majorant_tail(first: (f64, bool), squared: &[f64], once: &[f64], order: usize) -> f64 {
    let mut h = vec![0.0; order + 1];
    h[0] = 1.0;
    let mut total = 1.0;
    let sigma = |h: &mut [f64], r: f64| mul_majorant(h, r, 1.0 - 2.0 * r * r, r);
    let (r0, is_kernel) = first;
    if is_kernel {
        mul_majorant(&mut h, 1.0 - r0 * r0, 0.0, r0);
        total *= 1.0 + r0;
    } else {
        sigma(&mut h, r0);
        total *= 1.0 + 2.0 * r0;
    }
    for &r in squared {
        sigma(&mut h, r);
        sigma(&mut h, r);
        total *= (1.0 + 2.0 * r) * (1.0 + 2.0 * r);
    }
    for &r in once {
        sigma(&mut h, r);
        total *= 1.0 + 2.0 * r;
    }
    (total - h.iter().sum::<f64>()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Bloch-space test function `f`.
    Bloch,
    /// H∞ test function `g`.
    Sup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub family: Family,
    pub outside: usize,
    pub truncation: usize,
    pub head_len: usize,
    /// `Σ_{1<=l<=head_len} |b_l|` (Bloch) or `Σ_{0<=l<=head_len} |c_l|` (H∞).
    pub head_sum: f64,
    /// Same sum up to the truncation order.
    pub total_sum: f64,
    /// `3^{2|I\J|+1}` or `2·3^{|I\J|}`.
    pub cap: f64,
    pub cap_holds: bool,
    /// Certified bound on the coefficients beyond the truncation order.
    pub tail_bound: f64,
    /// The tail bound exceeds 1% of the cap: the truncated sums may be far
    /// from the full ones.
    pub truncation_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub f: CoefficientReport,
    pub g: CoefficientReport,
}

pub fn fn_cap(outside: usize) -> f64 {
    3f64.powi(2 * outside as i32 + 1)
}

pub fn gn_cap(outside: usize) -> f64 {
    2.0 * 3f64.powi(outside as i32)
}

fn report(
    family: Family,
    s: &PowerSeries,
    first: usize,
    head: usize,
    cap: f64,
    tail_bound: f64,
    outside: usize,
) -> CoefficientReport {
    let n = s.truncation_order();
    let head_sum = s.partial_l1(first..=head.min(n));
    let total_sum = s.partial_l1(first..=n);
    CoefficientReport {
        family,
        outside,
        truncation: n,
        head_len: head,
        head_sum,
        total_sum,
        cap,
        cap_holds: total_sum <= cap + CAP_SLACK,
        tail_bound,
        truncation_warning: tail_bound > TAIL_WARNING_FRACTION * cap,
    }
}

/// Expands `f` and `g` to order `truncation` (at most 10⁴) and checks the
/// coefficient caps; `head` is the fixed `N` of the head sums.
pub fn coefficient_bounds_check(frame: &TestFunctionFrame, truncation: usize, head: usize) -> FrameBounds {
    let n = truncation.clamp(1, MAX_TRUNCATION);
    let q = frame.outside_count();
    let r_j = frame.a_j().norm();
    let rs: Vec<f64> = frame.outside().iter().map(|a| a.norm()).collect();
    let f = fn_series(frame, n);
    let g = gn_series(frame, n);
    FrameBounds {
        f: report(Family::Bloch, &f, 1, head, fn_cap(q), majorant_tail((r_j, false), &rs, &[], n), q),
        g: report(Family::Sup, &g, 0, head, gn_cap(q), majorant_tail((r_j, true), &[], &rs, n), q),
    }
}

/// Head sums along `|a_i| = 1 - 2^{-m}`, `m = 1..=levels`, keeping directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadSumProfile {
    pub head_len: usize,
    pub moduli: Vec<f64>,
    pub f_heads: Vec<f64>,
    pub g_heads: Vec<f64>,
    /// Each sequence is nonincreasing in `m`.
    pub f_monotone: bool,
    pub g_monotone: bool,
}

pub fn boundary_head_sums(frame: &TestFunctionFrame, head: usize, levels: u32) -> HeadSumProfile {
    let moduli: Vec<f64> = (1..=levels).map(|m| 1.0 - (-(m as f64)).exp2()).collect();
    let (mut f_heads, mut g_heads) = (Vec::new(), Vec::new());
    for &r in &moduli {
        let fr = frame.with_modulus(r);
        f_heads.push(fn_series(&fr, head).partial_l1(1..=head));
        g_heads.push(gn_series(&fr, head).partial_l1(0..=head));
    }
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    HeadSumProfile { head_len: head, f_monotone: mono(&f_heads), g_monotone: mono(&g_heads), moduli, f_heads, g_heads }
}

/// `head_l1 · ‖T‖ + tail_l1 · sup_{i>k} ‖T z^i‖/‖z^i‖`.
///
/// # Panics
/// If any input is negative or NaN.
pub fn lemma1_bound(head_l1: f64, tail_l1: f64, operator_norm_bound: f64, tail_ratio_sup: f64) -> f64 {
    assert!(
        [head_l1, tail_l1, operator_norm_bound, tail_ratio_sup].iter().all(|v| *v >= 0.0),
        "lemma1_bound inputs must be nonnegative"
    );
    head_l1 * operator_norm_bound + tail_l1 * tail_ratio_sup
}

/// `Σ |λ_i| (1 + β(0, φ_i(0)))` with `β` the hyperbolic distance, an upper
/// bound for the norm of `Σ λ_i C_{φ_i}` on the Bloch space.
pub fn operator_norm_bound(spec: &CombinationSpec) -> f64 {
    spec.terms()
        .iter()
        .map(|t| {
            let p = t.symbol.eval(Complex64::new(0.0, 0.0)).value.norm().min(1.0 - 1e-16);
            t.lambda.norm() * (1.0 + 0.5 * ((1.0 + p) / (1.0 - p)).ln())
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub measured: f64,
    pub bound: f64,
    pub head_cut: usize,
    /// `Σ_{l<=head_cut} |b_l|` plus everything beyond the measured powers.
    pub head_l1: f64,
    /// `Σ_{head_cut<l<=n_max} |b_l|`.
    pub tail_l1: f64,
    pub operator_norm_bound: f64,
    pub tail_ratio_sup: f64,
    pub holds: bool,
}

/// Measures `‖(Σ λ_i C_{φ_i}) f‖_B` for the frame's `f` and compares it with
/// the bound chain. Coefficients beyond `n_max` (and the truncation tail) are
/// charged at `‖T‖`, since `‖T z^i‖ <= ‖T‖ ‖z^i‖`; `‖z^i‖_B <= 1` lets plain
/// ℓ¹ sums stand in for the weighted ones.
pub fn lemma1_check(
    spec: &CombinationSpec,
    frame: &TestFunctionFrame,
    head_cut: usize,
    n_max: u32,
    truncation: usize,
    grid: &GridSpec,
) -> Lemma1Report {
    let top = (n_max as usize).min(truncation.clamp(1, MAX_TRUNCATION));
    let powers: Vec<f64> = combination_norms(spec, top as u32, NormKind::Bloch, grid).iter().map(|e| e.value).collect();
    lemma1_check_with_powers(spec, frame, head_cut, &powers, truncation, grid)
}

/// [`lemma1_check`] with `powers[i - 1] = ‖Σ λ_i φ_i^i‖_B` already measured.
pub fn lemma1_check_with_powers(
    spec: &CombinationSpec,
    frame: &TestFunctionFrame,
    head_cut: usize,
    powers: &[f64],
    truncation: usize,
    grid: &GridSpec,
) -> Lemma1Report {
    let n = truncation.clamp(1, MAX_TRUNCATION);
    let series = fn_series(frame, n);
    let rs: Vec<f64> = frame.outside().iter().map(|a| a.norm()).collect();
    let beyond_trunc = majorant_tail((frame.a_j().norm(), false), &rs, &[], n);
    let top = powers.len().min(n);
    let head_cut = head_cut.min(top);
    let head = series.partial_l1(0..=head_cut);
    let mid = if head_cut < top { series.partial_l1(head_cut + 1..=top) } else { 0.0 };
    let far = if top < n { series.partial_l1(top + 1..=n) } else { 0.0 } + beyond_trunc;

    let op = operator_norm_bound(spec);
    let ratio = (head_cut + 1..=top).map(|i| powers[i - 1] / monomial_bloch_norm_exact(i as u32)).fold(0.0, f64::max);
    let bound = lemma1_bound(head + far, mid, op, ratio);
    let f = build_fn(frame);
    let measured = bloch_norm(&apply_combination(spec, &f), grid).value;
    Lemma1Report {
        measured,
        bound,
        head_cut,
        head_l1: head + far,
        tail_l1: mid,
        operator_norm_bound: op,
        tail_ratio_sup: ratio,
        holds: measured <= bound * (1.0 + 1e-9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Symbol;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn frame_invariants() {
        let fr = TestFunctionFrame::from_values(p(0.3, 0.4), &[p(-0.5, 0.1), p(0.0, 0.7)]);
        let expected = c(0.3, 0.4) * c(-0.5, 0.1).powi(2) * c(0.0, 0.7).powi(2);
        assert!((fr.gamma - expected).norm() < 1e-15);
        assert_eq!(fr.outside_count(), 2);
        assert_eq!(
            TestFunctionFrame::new(DiskPoint::ORIGIN, 3, vec![(0, p(0.1, 0.0))], vec![3]),
            Err(FrameError::JNotInI { j: 3 })
        );
        assert_eq!(
            TestFunctionFrame::new(DiskPoint::ORIGIN, 0, vec![(0, p(0.1, 0.0))], vec![1]),
            Err(FrameError::BadJSet)
        );
    }

    #[test]
    fn fn_examples() {
        let a = p(0.6, -0.2);
        let fr = TestFunctionFrame::from_values(a, &[]);
        let f = build_fn(&fr);
        assert!((f.eval(a.value()).value + a.value()).norm() < 1e-15);
        let fr = TestFunctionFrame::from_values(a, &[p(0.1, 0.5), p(-0.3, -0.3)]);
        assert!(build_fn(&fr).eval(c(0.0, 0.0)).value.norm() < 1e-15);
    }

    #[test]
    fn gn_examples() {
        let a = p(0.6, -0.2);
        let fr = TestFunctionFrame::from_values(a, &[]);
        let g = build_gn(&fr);
        assert!((g.eval(a.value()).value - c(1.0, 0.0)).norm() < 1e-14);
        let est = crate::norms::sup_norm(&g, &GridSpec::default());
        assert!(est.value <= 1.0 + a.norm() + 1e-12);
        assert!(est.value < 2.0);
    }

    #[test]
    fn fn_bloch_norm_below_cap() {
        let fr = TestFunctionFrame::from_values(p(0.8, 0.1), &[p(-0.6, 0.3)]);
        let norm = bloch_norm(&build_fn(&fr), &GridSpec::default()).value;
        let bounds = coefficient_bounds_check(&fr, 2048, 8);
        assert!(norm <= bounds.f.total_sum + bounds.f.tail_bound + 1e-9);
        assert!(bounds.f.total_sum <= fn_cap(1) + fr.gamma.norm());
    }

    #[test]
    fn caps_on_examples() {
        let fr = TestFunctionFrame::from_values(p(0.9, 0.0), &[]);
        let b = coefficient_bounds_check(&fr, 4096, 8);
        assert_eq!(b.f.cap, 3.0);
        assert!(b.f.cap_holds && b.f.total_sum <= 1.0 + 2.0 * 0.9);
        let fr = TestFunctionFrame::from_values(p(0.5, 0.5), &[p(0.2, -0.7)]);
        let b = coefficient_bounds_check(&fr, 4096, 8);
        assert_eq!((b.f.cap, b.g.cap), (27.0, 6.0));
        assert!(b.f.cap_holds && b.g.cap_holds);
        assert!(!b.f.truncation_warning);
    }

    #[test]
    fn truncation_warning_near_boundary() {
        let fr = TestFunctionFrame::from_values(DiskPoint::from_polar(1.0 - 1e-6, 0.3).unwrap(), &[]);
        let b = coefficient_bounds_check(&fr, 64, 8);
        assert!(b.f.truncation_warning && b.g.truncation_warning);
    }

    #[test]
    fn majorant_tail_matches_direct_sum() {
        // |a| = 0.5, no outside factors: tail of σ_a beyond N is 0.75 Σ_{l>=N} 0.5^l
        let t = majorant_tail((0.5, false), &[], &[], 10);
        assert!((t - 0.75 * 0.5f64.powi(10) / 0.5).abs() < 1e-14);
        let t = majorant_tail((0.5, true), &[], &[], 10);
        assert!((t - 0.75 * 0.5f64.powi(11) / 0.5).abs() < 1e-14);
    }

    #[test]
    fn apply_combination_examples() {
        let z = Symbol::parse("z").unwrap();
        let f = crate::dual::FnEval(|w: Dual| w * w);
        let w = c(0.3, -0.4);
        let id = CombinationSpec::single(z.clone());
        assert_eq!(apply_combination(&id, &f).eval(w).value, w * w);
        let zero = CombinationSpec::from_pairs([(c(1.5, 0.0), z.clone()), (c(-1.5, 0.0), z)]).unwrap();
        assert_eq!(apply_combination(&zero, &f).eval(w).value, c(0.0, 0.0));
        let half = CombinationSpec::single(Symbol::parse("scale(0.5,z)").unwrap());
        let d = apply_combination(&half, &f).eval(w);
        assert!((d.value - w * w / 4.0).norm() < 1e-16);
        assert!((d.deriv - w / 2.0).norm() < 1e-16);
    }

    #[test]
    fn lemma1_arithmetic() {
        assert!((lemma1_bound(0.0, 3.0, 7.0, 0.1) - 0.3).abs() < 1e-15);
        assert_eq!(lemma1_bound(2.0, 5.0, 1.5, 0.0), 3.0);
    }

    #[test]
    fn lemma1_on_touching_frame() {
        use crate::diagnostics::{index_sets, sample_delta, Approach, BoundaryPath, IndexTolerances};
        let phi = Symbol::parse("poly([0.5,0.5])").unwrap();
        let spec = CombinationSpec::single(phi);
        let path = BoundaryPath::new(c(1.0, 0.0), Approach::Radial, 24, 1e-6);
        let sample = sample_delta(&[path], &spec, 1e-3).remove(0);
        let sets = index_sets(&sample, &IndexTolerances::default());
        let grid = GridSpec { levels: 30, angles: 256, ..GridSpec::default() };
        for step in [4, 12, 23] {
            let fr = TestFunctionFrame::from_sample(&sample, &sets, 0, step).unwrap();
            let rep = lemma1_check(&spec, &fr, 8, 256, 1024, &grid);
            assert!(rep.holds, "step {step}: {rep:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn series_matches_evaluator(
            aj in (0.0f64..0.95, 0.0f64..6.3),
            outs in prop::collection::vec((0.0f64..0.95, 0.0f64..6.3), 0..=3),
            pts in prop::collection::vec((0.0f64..0.9, 0.0f64..6.3), 50),
        ) {
            let a = DiskPoint::from_polar(aj.0, aj.1).unwrap();
            let o: Vec<DiskPoint> = outs.iter().map(|&(r, t)| DiskPoint::from_polar(r, t).unwrap()).collect();
            let fr = TestFunctionFrame::from_values(a, &o);
            let (fs, gs) = (fn_series(&fr, DEFAULT_TRUNCATION), gn_series(&fr, DEFAULT_TRUNCATION));
            let (f, g) = (build_fn(&fr), build_gn(&fr));
            for (r, t) in pts {
                let z = Complex64::from_polar(r, t);
                prop_assert!((fs.eval(z) - f.eval(z).value).norm() < 1e-8);
                prop_assert!((gs.eval(z) - g.eval(z).value).norm() < 1e-8);
            }
        }

        #[test]
        fn apply_is_linear_in_lambdas(l1 in (-2.0f64..2.0, -2.0f64..2.0), t in 0.1f64..3.0, r in 0.0f64..0.95, th in 0.0f64..6.3) {
            prop_assume!(l1.0.abs() + l1.1.abs() > 1e-3);
            let spec = CombinationSpec::from_pairs([
                (c(l1.0, l1.1), Symbol::parse("sigma(0.3-0.2i)").unwrap()),
                (c(0.5, 0.0), Symbol::parse("poly([0.1,0.5,0.3])").unwrap()),
            ]).unwrap();
            let scaled = spec.scaled(c(t, 0.0)).unwrap();
            let fr = TestFunctionFrame::from_values(p(0.4, 0.1), &[p(-0.2, 0.6)]);
            let f = build_fn(&fr);
            let z = Complex64::from_polar(r, th);
            let a = apply_combination(&scaled, &f).eval(z);
            let b = apply_combination(&spec, &f).eval(z);
            prop_assert!((a.value - b.value * t).norm() <= 1e-12 * (1.0 + b.value.norm() * t));
            prop_assert!((a.deriv - b.deriv * t).norm() <= 1e-12 * (1.0 + b.deriv.norm() * t));
        }
    }
}
