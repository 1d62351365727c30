//! Supremum-norm estimation on a boundary-clustered polar grid.
//!
//! Every estimate is the value of the objective at a concrete witness point,
//! hence a lower bound for the true supremum. The grid uses radii
//! `1 - 2^{-t}` for `t = k / per_level`, `k = 1..=levels·per_level`, plus the
//! origin, and uniform angles. The best cell is then refined by golden-section
//! line searches in radius and angle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combination::CombinationSpec;
use crate::disk::{one_minus_abs2, DiskPoint};
use crate::dual::{Dual, Evaluatable};

/// Estimates below this are reported as exactly zero.
pub const UNDERFLOW: f64 = 1e-300;

/// Refinement stops once a pass improves the estimate by less than this
/// fraction of its value.
pub const REFINE_IMPROVEMENT: f64 = 1e-15;

const GOLDEN_ITERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// `‖f‖_B = |f(0)| + sup (1 - |z|^2) |f'(z)|`
    Bloch,
    /// `‖f‖_∞ = sup |f(z)|`
    #[serde(rename = "hinf")]
    SupNorm,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Bloch => "bloch",
            NormKind::SupNorm => "hinf",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bloch" => Ok(NormKind::Bloch),
            "hinf" | "sup" => Ok(NormKind::SupNorm),
            other => Err(format!("unknown norm kind '{other}' (expected bloch or hinf)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Dyadic levels; the outermost radius is `1 - 2^{-levels}`.
    pub levels: u32,
    /// Radii per dyadic level.
    pub per_level: u32,
    pub angles: u32,
    pub refine_passes: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { levels: 40, per_level: 1, angles: 1024, refine_passes: 2 }
    }
}

impl GridSpec {
    pub const MAX_LEVELS: u32 = 40;

    /// Clamps fields into their usable range (`levels <= 40`, nonzero counts).
    pub fn sanitized(self) -> Self {
        Self {
            levels: self.levels.clamp(1, Self::MAX_LEVELS),
            per_level: self.per_level.max(1),
            angles: self.angles.max(1),
            refine_passes: self.refine_passes,
        }
    }

    /// Both grid dimensions doubled.
    pub fn doubled(self) -> Self {
        Self { per_level: self.per_level * 2, angles: self.angles * 2, ..self }
    }

    /// Radii of the sweep, starting with the origin.
    pub fn radii(&self) -> Vec<f64> {
        let g = self.sanitized();
        let steps = g.levels * g.per_level;
        std::iter::once(0.0).chain((1..=steps).map(|k| 1.0 - (-(k as f64) / g.per_level as f64).exp2())).collect()
    }

    pub fn max_radius(&self) -> f64 {
        1.0 - (-(self.sanitized().levels as f64)).exp2()
    }

    fn summary(&self) -> GridSummary {
        let g = self.sanitized();
        GridSummary {
            radial: (g.levels * g.per_level) as usize + 1,
            angular: g.angles as usize,
            max_radius: self.max_radius(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub radial: usize,
    pub angular: usize,
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: DiskPoint,
    pub grid: GridSummary,
    pub refined: bool,
    /// Sup-norm only: per-circle maxima never decreased with the radius.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radial_monotone: Option<bool>,
}

/// Best cell found by a sweep.
#[derive(Debug, Clone, Copy)]
struct Cell {
    value: f64,
    row: usize,
    theta: f64,
}

impl Cell {
    const NONE: Cell = Cell { value: f64::NEG_INFINITY, row: 0, theta: 0.0 };
}

fn angle(k: usize, angles: usize) -> f64 {
    k as f64 * std::f64::consts::TAU / angles as f64
}

/// Maximizes `g` on `[lo, hi]` by golden-section search, returning the best
/// `(x, g(x))` seen (including the initial probes).
fn golden_max<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..GOLDEN_ITERS {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Refines a grid cell by alternating radius/angle line searches.
/// Returns `(value, z)` with `value = objective(z)`.
fn refine<O: Fn(Complex64) -> f64>(objective: &O, grid: &GridSpec, radii: &[f64], cell: Cell) -> (f64, Complex64) {
    let r0 = radii[cell.row];
    let mut best_z = Complex64::from_polar(r0, cell.theta);
    let mut best = objective(best_z);
    if !best.is_finite() {
        best = f64::NEG_INFINITY;
    }
    let dtheta = std::f64::consts::TAU / grid.angles.max(1) as f64;
    let r_lo = if cell.row == 0 { 0.0 } else { radii[cell.row - 1] };
    let r_hi = radii[(cell.row + 1).min(radii.len() - 1)];
    let (mut r, mut theta) = (r0, cell.theta);
    for _ in 0..grid.refine_passes {
        let before = best;
        let (rr, vr) = golden_max(|x| objective(Complex64::from_polar(x, theta)), r_lo, r_hi);
        if vr > best {
            best = vr;
            r = rr;
            best_z = Complex64::from_polar(r, theta);
        }
        if r > 0.0 {
            let (tt, vt) = golden_max(|t| objective(Complex64::from_polar(r, t)), theta - dtheta, theta + dtheta);
            if vt > best {
                best = vt;
                theta = tt;
                best_z = Complex64::from_polar(r, theta);
            }
        }
        if best - before < REFINE_IMPROVEMENT * best {
            break;
        }
    }
    if grid.refine_passes > 0 && best.is_finite() {
        let r_max = radii[radii.len() - 1];
        let step = (0.5 * (r_hi - r_lo)).min(0.5 * dtheta * r.max(r_hi - r_lo)).max(1e-12);
        let bounded = |z: Complex64| if z.norm() <= r_max { objective(z) } else { f64::NEG_INFINITY };
        // restarts resize the simplex, which a flat curved ridge can collapse early
        for _ in 0..NM_RESTARTS {
            let (v, z) = nelder_mead(bounded, best_z, step);
            if v <= best {
                break;
            }
            best = v;
            best_z = z;
        }
        for _ in 0..NM_RESTARTS {
            let (v, z) = profile_max(&bounded, best_z, 0.5 * (r_hi - r_lo), dtheta);
            if v <= best {
                break;
            }
            best = v;
            best_z = z;
        }
    }
    (best, best_z)
}

/// Maximizes `max_r objective` over the angle near `z0`, with the radial
/// maximum taken within `dr` of the current radius.
fn profile_max<O: Fn(Complex64) -> f64>(objective: &O, z0: Complex64, dr: f64, dtheta: f64) -> (f64, Complex64) {
    let (r0, theta0) = z0.to_polar();
    let radial = |theta: f64| golden_max(|r| objective(Complex64::from_polar(r, theta)), (r0 - dr).max(0.0), r0 + dr);
    let (theta, _) = golden_max(|t| radial(t).1, theta0 - dtheta, theta0 + dtheta);
    let (r, v) = radial(theta);
    (v, Complex64::from_polar(r, theta))
}

const NM_ITERS: usize = 2000;
const NM_RESTARTS: usize = 8;
const REFINE_CANDIDATES: usize = 4;

/// Nelder-Mead maximization in the plane from `z0` with initial simplex size `step`.
fn nelder_mead<O: Fn(Complex64) -> f64>(objective: O, z0: Complex64, step: f64) -> (f64, Complex64) {
    let f = |z: Complex64| {
        let v = objective(z);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut simplex = [z0, z0 + Complex64::new(step, 0.0), z0 + Complex64::new(0.0, step)].map(|z| (f(z), z));
    for _ in 0..NM_ITERS {
        simplex.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (best, worst) = (simplex[0], simplex[2]);
        let size = (simplex[1].1 - best.1).norm().max((worst.1 - best.1).norm());
        if size <= 1e-15 * best.1.norm().max(1e-3) || best.0 - worst.0 <= REFINE_IMPROVEMENT * best.0.abs() {
            break;
        }
        let centroid = 0.5 * (simplex[0].1 + simplex[1].1);
        let reflect = centroid + (centroid - worst.1);
        let fr = f(reflect);
        if fr > best.0 {
            let expand = centroid + 2.0 * (centroid - worst.1);
            let fe = f(expand);
            simplex[2] = if fe > fr { (fe, expand) } else { (fr, reflect) };
        } else if fr > simplex[1].0 {
            simplex[2] = (fr, reflect);
        } else {
            let contract = centroid + 0.5 * (worst.1 - centroid);
            let fc = f(contract);
            if fc > worst.0 {
                simplex[2] = (fc, contract);
            } else {
                for p in simplex.iter_mut().skip(1) {
                    let z = best.1 + 0.5 * (p.1 - best.1);
                    *p = (f(z), z);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.0.total_cmp(&a.0));
    simplex[0]
}

/// Sweeps the grid, returning the best cell and per-circle maxima.
fn sweep<O: Fn(Complex64) -> f64 + Sync>(objective: &O, grid: &GridSpec, radii: &[f64]) -> (Vec<Cell>, Vec<f64>) {
    let angles = grid.angles.max(1) as usize;
    let rows: Vec<Cell> = radii
        .par_iter()
        .enumerate()
        .map(|(row, &r)| {
            let count = if r == 0.0 { 1 } else { angles };
            let mut best = Cell { row, ..Cell::NONE };
            for k in 0..count {
                let theta = angle(k, angles);
                let v = objective(Complex64::from_polar(r, theta));
                if v > best.value {
                    best = Cell { value: v, row, theta };
                }
            }
            best
        })
        .collect();
    let maxima = rows.iter().map(|c| c.value).collect();
    (top_cells(rows), maxima)
}

fn estimate<O: Fn(Complex64) -> f64 + Sync>(objective: O, grid: &GridSpec, monotone_check: bool) -> NormEstimate {
    let grid = grid.sanitized();
    let radii = grid.radii();
    let (cells, maxima) = sweep(&objective, &grid, &radii);
    finish(&objective, &grid, &radii, &cells, monotone_check.then(|| monotone(&maxima)))
}

/// The best per-row cells, best first.
fn top_cells(rows: impl IntoIterator<Item = Cell>) -> Vec<Cell> {
    let mut cells: Vec<Cell> = rows.into_iter().filter(|c| c.value.is_finite()).collect();
    cells.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.row.cmp(&b.row)));
    cells.truncate(REFINE_CANDIDATES);
    cells
}

fn finish<O: Fn(Complex64) -> f64>(
    objective: &O,
    grid: &GridSpec,
    radii: &[f64],
    cells: &[Cell],
    radial_monotone: Option<bool>,
) -> NormEstimate {
    // Near-level ridges have many close local maxima, so several cells are refined.
    let (mut value, mut z) = cells
        .iter()
        .map(|&c| refine(objective, grid, radii, c))
        .fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |acc, c| if c.0 > acc.0 { c } else { acc });
    if !value.is_finite() || value < UNDERFLOW {
        // Degenerate objective: report zero at the origin.
        z = Complex64::new(0.0, 0.0);
        value = objective(z);
        if !value.is_finite() || value < UNDERFLOW {
            value = 0.0;
        }
    }
    NormEstimate {
        value,
        witness: DiskPoint::new(z).unwrap_or(DiskPoint::ORIGIN),
        grid: grid.summary(),
        refined: grid.refine_passes > 0,
        radial_monotone,
    }
}

fn monotone(maxima: &[f64]) -> bool {
    maxima.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1e-300))
}

/// `sup (1 - |z|^2) |f'(z)|`.
pub fn bloch_seminorm<F: Evaluatable + ?Sized>(f: &F, grid: &GridSpec) -> NormEstimate {
    estimate(|z| one_minus_abs2(z) * f.eval(z).deriv.norm(), grid, false)
}

/// `|f(0)| + ‖f‖_β`, witness inherited from the seminorm.
pub fn bloch_norm<F: Evaluatable + ?Sized>(f: &F, grid: &GridSpec) -> NormEstimate {
    let at_origin = f.eval(Complex64::new(0.0, 0.0)).value.norm();
    let mut est = estimate(|z| at_origin + one_minus_abs2(z) * f.eval(z).deriv.norm(), grid, false);
    if est.value < UNDERFLOW {
        est.value = 0.0;
    }
    est
}

/// `sup |f(z)|`, with the per-circle monotonicity sanity check recorded.
pub fn sup_norm<F: Evaluatable + ?Sized>(f: &F, grid: &GridSpec) -> NormEstimate {
    estimate(|z| f.eval(z).value.norm(), grid, true)
}

pub fn norm<F: Evaluatable + ?Sized>(f: &F, kind: NormKind, grid: &GridSpec) -> NormEstimate {
    match kind {
        NormKind::Bloch => bloch_norm(f, grid),
        NormKind::SupNorm => sup_norm(f, grid),
    }
}

/// Exact `‖z^n‖_B`: 1 for `n = 1`, otherwise
/// `(2n/(n+1)) ((n-1)/(n+1))^{(n-1)/2}`, attained at `|z| = sqrt((n-1)/(n+1))`.
pub fn monomial_bloch_norm_exact(n: u32) -> f64 {
    assert!(n >= 1, "monomial degree must be positive");
    if n == 1 {
        return 1.0;
    }
    let n = n as f64;
    (2.0 * n / (n + 1.0)) * ((n - 1.0) / (n + 1.0)).powf((n - 1.0) / 2.0)
}

/// Norm of `z ↦ Σ λ_i φ_i(z)^n`.
pub fn combination_norm(spec: &CombinationSpec, n: u32, kind: NormKind, grid: &GridSpec) -> NormEstimate {
    norm(&spec.power(n), kind, grid)
}

/// `combination_norm` for every `n` in `1..=n_max`, sharing a single grid
/// sweep: symbol values are computed once per grid point and powers are
/// advanced incrementally. Each `n` is then refined independently.
pub fn combination_norms(spec: &CombinationSpec, n_max: u32, kind: NormKind, grid: &GridSpec) -> Vec<NormEstimate> {
    let grid = grid.sanitized();
    let radii = grid.radii();
    let angles = grid.angles as usize;
    let n_max = n_max as usize;
    let terms = spec.terms();
    let lambdas: Vec<Complex64> = spec.lambdas();

    // Per-row best cell for each n, followed by per-row maxima for the
    // monotonicity check (sup norm only).
    let per_row: Vec<Vec<Cell>> = radii
        .par_iter()
        .enumerate()
        .map(|(row, &r)| {
            let count = if r == 0.0 { 1 } else { angles };
            let mut best = vec![Cell { row, ..Cell::NONE }; n_max];
            let mut vals: Vec<Dual> = vec![Dual::constant(Complex64::new(0.0, 0.0)); terms.len()];
            let mut pows: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); terms.len()];
            let weight_r = (1.0 - r) * (1.0 + r);
            for k in 0..count {
                let theta = angle(k, angles);
                let z = Complex64::from_polar(r, theta);
                let weight = match kind {
                    NormKind::Bloch => one_minus_abs2(z),
                    NormKind::SupNorm => weight_r,
                };
                for (i, t) in terms.iter().enumerate() {
                    vals[i] = t.symbol.eval(z);
                    pows[i] = Complex64::new(1.0, 0.0);
                }
                for n in 1..=n_max {
                    let mut acc = Complex64::new(0.0, 0.0);
                    match kind {
                        NormKind::Bloch => {
                            // d/dz φ^n = n φ^{n-1} φ'
                            for i in 0..terms.len() {
                                acc += lambdas[i] * pows[i] * vals[i].deriv;
                                pows[i] *= vals[i].value;
                            }
                            let v = weight * n as f64 * acc.norm();
                            if v > best[n - 1].value {
                                best[n - 1] = Cell { value: v, row, theta };
                            }
                        }
                        NormKind::SupNorm => {
                            for i in 0..terms.len() {
                                pows[i] *= vals[i].value;
                                acc += lambdas[i] * pows[i];
                            }
                            let v = acc.norm();
                            if v > best[n - 1].value {
                                best[n - 1] = Cell { value: v, row, theta };
                            }
                        }
                    }
                }
            }
            best
        })
        .collect();

    (1..=n_max)
        .map(|n| {
            let f = spec.power(n as u32);
            let cells = top_cells(per_row.iter().map(|row| row[n - 1]));
            match kind {
                NormKind::Bloch => {
                    let at_origin = f.eval(Complex64::new(0.0, 0.0)).value.norm();
                    let objective = |z: Complex64| at_origin + one_minus_abs2(z) * f.eval(z).deriv.norm();
                    finish(&objective, &grid, &radii, &cells, None)
                }
                NormKind::SupNorm => {
                    let maxima: Vec<f64> = per_row.iter().map(|row| row[n - 1].value).collect();
                    let objective = |z: Complex64| f.eval(z).value.norm();
                    finish(&objective, &grid, &radii, &cells, Some(monotone(&maxima)))
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::FnEval;
    use crate::symbols::Symbol;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_grid() -> GridSpec {
        GridSpec { levels: 30, per_level: 1, angles: 256, refine_passes: 2 }
    }

    /// Independent oracle: ternary search on `n r^{n-1} (1 - r^2)`.
    fn monomial_oracle(n: u32) -> f64 {
        let g = |r: f64| n as f64 * r.powi(n as i32 - 1) * (1.0 - r * r);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if g(m1) < g(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        g(0.5 * (lo + hi))
    }

    #[test]
    fn closed_form_matches_calculus_oracle() {
        assert_eq!(monomial_bloch_norm_exact(1), 1.0);
        assert!((monomial_bloch_norm_exact(3) - 0.75).abs() < 1e-15);
        for n in [2, 3, 5, 17, 100, 1000] {
            assert!((monomial_bloch_norm_exact(n) - monomial_oracle(n)).abs() < 1e-12);
        }
        let limit = 2.0 / std::f64::consts::E;
        assert!((monomial_bloch_norm_exact(1_000_000) - limit).abs() < 1e-6);
        // decreases toward 2/e from above for n >= 2
        for n in 2..500 {
            assert!(monomial_bloch_norm_exact(n + 1) < monomial_bloch_norm_exact(n));
            assert!(monomial_bloch_norm_exact(n) > limit);
        }
    }

    #[test]
    fn seminorm_of_identity_is_one_at_origin() {
        let id = FnEval(|z: Dual| z);
        let est = bloch_seminorm(&id, &small_grid());
        assert_eq!(est.value, 1.0);
        assert_eq!(est.witness, DiskPoint::ORIGIN);
    }

    #[test]
    fn constants() {
        let k = FnEval(|_: Dual| Dual::constant(c(0.3, 0.4)));
        assert_eq!(bloch_seminorm(&k, &small_grid()).value, 0.0);
        assert!((bloch_norm(&k, &small_grid()).value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monomial_bloch_norms_match_closed_form() {
        let grid = GridSpec::default();
        for n in [1u32, 2, 3, 7, 50, 200, 1000] {
            let f = FnEval(move |z: Dual| z.powi(n as u64));
            let est = bloch_norm(&f, &grid);
            let exact = monomial_bloch_norm_exact(n);
            assert!(((est.value - exact) / exact).abs() < 1e-9, "n={n}: {} vs {exact}", est.value);
            if n > 1 {
                let r = ((n as f64 - 1.0) / (n as f64 + 1.0)).sqrt();
                assert!((est.witness.norm() - r).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let s = Symbol::parse("compose(blaschke([0.3,-0.5i];1),poly([0.1,0.6,0.2]))").unwrap();
        for est in [bloch_seminorm(&s, &small_grid()), sup_norm(&s, &small_grid())] {
            let w = est.witness.value();
            let direct = if est.radial_monotone.is_some() {
                s.eval(w).value.norm()
            } else {
                one_minus_abs2(w) * s.eval(w).deriv.norm()
            };
            assert_eq!(direct, est.value);
        }
    }

    #[test]
    fn sup_norm_examples() {
        let grid = GridSpec::default();
        let z5 = FnEval(|z: Dual| z.powi(5));
        assert!((sup_norm(&z5, &grid).value - 1.0).abs() < 1e-9);
        let rz = FnEval(|z: Dual| z.scale(c(0.37, 0.0)));
        let est = sup_norm(&rz, &grid);
        assert!((est.value - 0.37).abs() < 1e-9);
        assert_eq!(est.radial_monotone, Some(true));
        let s = Symbol::parse("sigma(0.6-0.2i)").unwrap();
        assert!(sup_norm(&s, &grid).value > 1.0 - 1e-9);
    }

    #[test]
    fn combination_examples() {
        let grid = GridSpec::default();
        let id = Symbol::parse("z").unwrap();
        let spec = CombinationSpec::single(id.clone());
        for n in [1u32, 4, 64] {
            let v = combination_norm(&spec, n, NormKind::Bloch, &grid).value;
            assert!((v - monomial_bloch_norm_exact(n)).abs() / monomial_bloch_norm_exact(n) < 1e-4);
        }
        let rz = CombinationSpec::single(Symbol::parse("scale(0.8,z)").unwrap());
        let v = combination_norm(&rz, 6, NormKind::SupNorm, &grid).value;
        assert!((v - 0.8f64.powi(6)).abs() < 1e-9);

        let phi = Symbol::parse("poly([0.5,0.5])").unwrap();
        let zero = CombinationSpec::from_pairs([(c(1.0, 0.0), phi.clone()), (c(-1.0, 0.0), phi)]).unwrap();
        for kind in [NormKind::Bloch, NormKind::SupNorm] {
            assert_eq!(combination_norm(&zero, 9, kind, &grid).value, 0.0);
        }
    }

    #[test]
    fn underflow_reported_as_zero() {
        let tiny = CombinationSpec::single(Symbol::parse("scale(0.01,z)").unwrap());
        let v = combination_norm(&tiny, 200, NormKind::SupNorm, &small_grid()).value;
        assert_eq!(v, 0.0);
    }

    #[test]
    fn batched_sweep_agrees_with_single_norms() {
        let spec = CombinationSpec::from_pairs([
            (c(1.0, 0.5), Symbol::parse("poly([0.5,0.5])").unwrap()),
            (c(-0.7, 0.0), Symbol::parse("sigma(0.2+0.3i)").unwrap()),
        ])
        .unwrap();
        let grid = small_grid();
        for kind in [NormKind::Bloch, NormKind::SupNorm] {
            let batch = combination_norms(&spec, 24, kind, &grid);
            for n in [1u32, 2, 9, 24] {
                let single = combination_norm(&spec, n, kind, &grid);
                let b = &batch[n as usize - 1];
                assert!(
                    (b.value - single.value).abs() <= 1e-9 * single.value.max(1.0),
                    "{kind:?} n={n}: {} vs {}",
                    b.value,
                    single.value
                );
            }
        }
    }

    #[test]
    fn doubling_grid_is_stable_for_monomials() {
        let grid = GridSpec::default();
        for n in [2u32, 10, 120, 200] {
            let f = FnEval(move |z: Dual| z.powi(n as u64));
            let a = bloch_seminorm(&f, &grid).value;
            let b = bloch_seminorm(&f, &grid.doubled()).value;
            assert!(((a - b) / a).abs() < 1e-6);
        }
    }
}
