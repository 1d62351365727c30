//! Truncated power series with complex coefficients.
//!
//! Binary operations first align both operands to the smaller truncation
//! order, so a product of a degree-`N` and a degree-`M` series is exact up to
//! `min(N, M)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::DiskPoint;
use crate::dual::Evaluatable;
use crate::symbols::{Symbol, SymbolExpr};

/// Comparison tolerance for coefficient-level identities.
pub const SERIES_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("truncated series misses the evaluator by {residual:e} on |z| = 1/2 (allowed {tolerance:e})")]
    TruncationWarning { residual: f64, tolerance: f64 },
    #[error("series division by a series with vanishing constant term")]
    SingularDivision,
}

/// `Σ_{k=0}^{N} c_k z^k`, with `N` the truncation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Series with the given coefficients; an empty list is the zero series
    /// of order 0.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![ZERO; order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series of `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Copy truncated (or zero-padded) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Self { coeffs }
    }

    /// Σ |c_k| over the stored range.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Σ_{k in range} |c_k|, clamped to the stored range.
    pub fn partial_l1(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let end = (*range.end()).min(self.truncation_order());
        if *range.start() > end {
            return 0.0;
        }
        self.coeffs[*range.start()..=end].iter().map(|c| c.norm()).sum()
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.truncation_order().min(other.truncation_order());
        Self { coeffs: (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// Quotient `self / other` up to the aligned order.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.truncation_order().min(other.truncation_order());
        let g0 = other.coeffs[0];
        if g0.norm() == 0.0 || !g0.is_finite() {
            return Err(SeriesError::SingularDivision);
        }
        let inv = g0.inv();
        let mut h = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for i in 1..=k {
                acc -= other.coeffs[i] * h[k - i];
            }
            h.push(acc * inv);
        }
        Ok(Self { coeffs: h })
    }

    /// `self^n` by repeated squaring; `powu(0)` is the constant 1.
    pub fn powu(&self, mut n: u64) -> Self {
        let order = self.truncation_order();
        let mut acc = Self::constant(ONE, order);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = cauchy_product(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = cauchy_product(&base, &base);
            }
        }
        acc
    }
}

/// `c_k = Σ_{i=0}^{k} a_i b_{k-i}` up to the aligned truncation order.
pub fn cauchy_product(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let n = f.truncation_order().min(g.truncation_order());
    let (a, b) = (&f.coeffs[..=n], &g.coeffs[..=n]);
    let mut c = vec![ZERO; n + 1];
    for (i, ai) in a.iter().enumerate() {
        if *ai == ZERO {
            continue;
        }
        for (ck, bj) in c[i..].iter_mut().zip(b) {
            *ck += ai * bj;
        }
    }
    PowerSeries { coeffs: c }
}

/// Σ |c_k| of a series.
pub fn l1_norm(f: &PowerSeries) -> f64 {
    f.l1_norm()
}

/// Expansion `σ_a(z) = a - (1 - |a|^2) Σ_{l>=0} conj(a)^l z^{l+1}` truncated at
/// order `order`.
pub fn sigma_series(a: DiskPoint, order: usize) -> PowerSeries {
    let a = a.value();
    let weight = 1.0 - a.norm_sqr();
    let a_bar = a.conj();
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(a);
    let mut p = ONE;
    for _ in 0..order {
        coeffs.push(-p * weight);
        p *= a_bar;
    }
    PowerSeries { coeffs }
}

/// Expansion of the reproducing factor `(1 - |a|^2) / (1 - conj(a) z)`.
pub fn kernel_series(a: DiskPoint, order: usize) -> PowerSeries {
    let a = a.value();
    let weight = 1.0 - a.norm_sqr();
    let a_bar = a.conj();
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut p = ONE;
    for _ in 0..=order {
        coeffs.push(p * weight);
        p *= a_bar;
    }
    PowerSeries { coeffs }
}

/// Series of `expr(arg(z))`, by structural recursion over the tree.
///
/// Möbius-type nodes expand through series division (geometric series),
/// composition substitutes the inner series, powers use repeated products.
pub fn series_of_expr(expr: &SymbolExpr, arg: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let order = arg.truncation_order();
    Ok(match expr {
        SymbolExpr::Identity => arg.clone(),
        SymbolExpr::Const(c) => PowerSeries::constant(*c, order),
        SymbolExpr::Mobius { a, b, c, d } => {
            let num = arg.scale(*a).add_constant(*b);
            let den = arg.scale(*c).add_constant(*d);
            num.div(&den)?
        }
        SymbolExpr::Sigma(a) => sigma_of(a.value(), arg)?,
        SymbolExpr::Blaschke { zeros, unimodular } => {
            let mut acc = PowerSeries::constant(*unimodular, order);
            for a in zeros {
                acc = cauchy_product(&acc, &sigma_of(a.value(), arg)?);
            }
            acc
        }
        SymbolExpr::Poly(cs) => {
            let mut acc = PowerSeries::zero(order);
            for c in cs.iter().rev() {
                acc = cauchy_product(&acc, arg).add_constant(*c);
            }
            acc
        }
        SymbolExpr::Scale(r, child) => series_of_expr(child, arg)?.scale(*r),
        SymbolExpr::Compose(outer, inner) => {
            let inner_series = series_of_expr(inner, arg)?;
            series_of_expr(outer, &inner_series)?
        }
        SymbolExpr::Pow(child, n) => series_of_expr(child, arg)?.powu(u64::from(*n)),
    })
}

fn sigma_of(a: Complex64, arg: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    let num = arg.scale(-ONE).add_constant(a);
    let den = arg.scale(-a.conj()).add_constant(ONE);
    num.div(&den)
}

/// First `order + 1` Taylor coefficients of a symbol at the origin.
///
/// The result is checked against the compiled evaluator on `|z| = 1/2`:
/// since `|φ| <= 1`, Cauchy's estimate gives `|c_l| <= 1` and the dropped
/// tail is at most `2^{-order}` there.
pub fn taylor_of_symbol(sym: &Symbol, order: usize) -> Result<PowerSeries, SeriesError> {
    let s = series_of_expr(sym.expr(), &PowerSeries::identity(order))?;
    residual_check(&s, sym)?;
    Ok(s)
}

/// Compares a truncated series of a function bounded by 1 with its evaluator
/// on `|z| = 1/2`, allowing `2 · 2^{-N}` plus rounding.
pub(crate) fn residual_check<F: Evaluatable + ?Sized>(s: &PowerSeries, f: &F) -> Result<(), SeriesError> {
    let order = s.truncation_order();
    let tolerance = 2.0 * 0.5f64.powi(order.min(1000) as i32) + 1e-12;
    let mut residual: f64 = 0.0;
    for k in 0..64 {
        let z = Complex64::from_polar(0.5, k as f64 * std::f64::consts::TAU / 64.0);
        residual = residual.max((s.eval(z) - f.eval(z).value).norm());
    }
    if residual.is_nan() || residual > tolerance {
        return Err(SeriesError::TruncationWarning { residual, tolerance });
    }
    Ok(())
}
