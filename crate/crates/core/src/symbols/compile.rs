use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{SymbolExpr, MAX_POWER};
use super::parse::{parse_symbol, ParseError};
use crate::dual::{Dual, Evaluatable};

/// Accepted overshoot of `sup |φ|` above 1.
pub const VALIDATION_TOL: f64 = 1e-9;
/// `sup |φ| < 1 - STRICT_MARGIN` sets the compact-range flag.
pub const STRICT_MARGIN: f64 = 1e-6;
/// Outermost circle sampled by validation.
pub const VALIDATION_MAX_RADIUS: f64 = 1.0 - 1e-8;
/// Angular samples per circle used by [`Symbol::compile`].
pub const DEFAULT_VALIDATION_RESOLUTION: usize = 512;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("not a self-map of the disk: |phi| = {modulus} at {re}+{im}i")]
    InvalidSelfMap { re: f64, im: f64, modulus: f64 },
    #[error("pointwise power {0} outside 1..={MAX_POWER}")]
    InvalidPower(u64),
}

/// Lowered evaluation tree with per-node constants precomputed.
#[derive(Debug)]
enum Node {
    Identity,
    Const(Complex64),
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    Sigma { a: Complex64, a_bar: Complex64 },
    Blaschke { zeros: Vec<(Complex64, Complex64)>, unimodular: Complex64 },
    Poly(Vec<Complex64>),
    Scale(Complex64, Arc<Node>),
    Compose(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, u32),
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn sigma_dual(a: Complex64, a_bar: Complex64, x: Dual) -> Dual {
    (a - x) / (ONE - x.scale(a_bar))
}

impl Node {
    fn lower(e: &SymbolExpr) -> Node {
        match e {
            SymbolExpr::Identity => Node::Identity,
            SymbolExpr::Const(c) => Node::Const(*c),
            SymbolExpr::Mobius { a, b, c, d } => Node::Mobius { a: *a, b: *b, c: *c, d: *d },
            SymbolExpr::Sigma(a) => Node::Sigma { a: a.value(), a_bar: a.value().conj() },
            SymbolExpr::Blaschke { zeros, unimodular } => Node::Blaschke {
                zeros: zeros.iter().map(|p| (p.value(), p.value().conj())).collect(),
                unimodular: *unimodular,
            },
            SymbolExpr::Poly(cs) => Node::Poly(cs.clone()),
            SymbolExpr::Scale(r, child) => Node::Scale(*r, Arc::new(Node::lower(child))),
            SymbolExpr::Compose(o, i) => Node::Compose(Arc::new(Node::lower(o)), Arc::new(Node::lower(i))),
            SymbolExpr::Pow(child, n) => Node::Pow(Arc::new(Node::lower(child)), *n),
        }
    }

    fn eval(&self, x: Dual) -> Dual {
        match self {
            Node::Identity => x,
            Node::Const(c) => Dual::constant(*c),
            Node::Mobius { a, b, c, d } => (x.scale(*a) + *b) / (x.scale(*c) + *d),
            Node::Sigma { a, a_bar } => sigma_dual(*a, *a_bar, x),
            Node::Blaschke { zeros, unimodular } => {
                let mut acc = Dual::constant(*unimodular);
                for (a, a_bar) in zeros {
                    acc = acc * sigma_dual(*a, *a_bar, x);
                }
                acc
            }
            Node::Poly(cs) => {
                let mut it = cs.iter().rev();
                let mut acc = Dual::constant(*it.next().expect("poly has coefficients"));
                for c in it {
                    acc = acc * x + *c;
                }
                acc
            }
            Node::Scale(r, child) => child.eval(x).scale(*r),
            Node::Compose(outer, inner) => outer.eval(inner.eval(x)),
            Node::Pow(child, n) => child.eval(x).powi(u64::from(*n)),
        }
    }
}

struct NodeEval<'a>(&'a Node);

impl Evaluatable for NodeEval<'_> {
    fn eval_dual(&self, z: Dual) -> Dual {
        self.0.eval(z)
    }
}

/// Outcome of sampling `|φ|` on a boundary-clustered ladder of circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Estimated `sup |φ|` (a lower bound of the true supremum).
    pub sup_estimate: f64,
    /// Point where the estimate was attained.
    pub witness: Complex64,
    /// `sup_estimate < 1 - STRICT_MARGIN`: the range sits compactly inside the disk.
    pub strict: bool,
    pub circles: usize,
    pub angles: usize,
    /// Circle maxima never decreased with the radius (maximum-modulus sanity check).
    pub radial_monotone: bool,
}

fn validation_radii() -> Vec<f64> {
    let mut radii: Vec<f64> = (0..=26).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    radii.push(VALIDATION_MAX_RADIUS);
    radii
}

/// Estimates `sup |φ|` over circles clustered toward the boundary and
/// rejects maps exceeding `1 + VALIDATION_TOL`.
///
/// Only circles are sampled: by the maximum-modulus principle the interior
/// adds nothing.
pub fn validate_self_map<F>(f: &F, resolution: usize) -> Result<ValidationReport, SymbolError>
where
    F: Evaluatable + ?Sized,
{
    let angles = resolution.max(8);
    let radii = validation_radii();
    let dtheta = std::f64::consts::TAU / angles as f64;
    let modulus_at = |z: Complex64| -> Result<f64, SymbolError> {
        let v = f.eval(z).value;
        if v.is_finite() {
            Ok(v.norm())
        } else {
            Err(SymbolError::InvalidSelfMap { re: z.re, im: z.im, modulus: f64::INFINITY })
        }
    };

    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0), 0.0f64);
    let mut monotone = true;
    let mut prev_circle = f64::NEG_INFINITY;
    for &r in &radii {
        let mut circle_best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0), 0.0);
        for k in 0..angles {
            let theta = k as f64 * dtheta;
            let z = Complex64::from_polar(r, theta);
            let m = modulus_at(z)?;
            if m > circle_best.0 {
                circle_best = (m, z, theta);
            }
        }
        if circle_best.0 + 1e-12 < prev_circle {
            monotone = false;
        }
        prev_circle = circle_best.0;
        if circle_best.0 >= best.0 {
            best = circle_best;
        }
    }

    // Golden-section refinement of the angle on the outermost circle.
    let r = VALIDATION_MAX_RADIUS;
    let (mut lo, mut hi) = (best.2 - dtheta, best.2 + dtheta);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = modulus_at(Complex64::from_polar(r, x1))?;
    let mut f2 = modulus_at(Complex64::from_polar(r, x2))?;
    for _ in 0..80 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = modulus_at(Complex64::from_polar(r, x1))?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = modulus_at(Complex64::from_polar(r, x2))?;
        }
    }
    for (m, t) in [(f1, x1), (f2, x2)] {
        if m > best.0 {
            best = (m, Complex64::from_polar(r, t), t);
        }
    }

    if best.0 > 1.0 + VALIDATION_TOL {
        return Err(SymbolError::InvalidSelfMap { re: best.1.re, im: best.1.im, modulus: best.0 });
    }
    Ok(ValidationReport {
        sup_estimate: best.0,
        witness: best.1,
        strict: best.0 < 1.0 - STRICT_MARGIN,
        circles: radii.len(),
        angles,
        radial_monotone: monotone,
    })
}

/// A validated analytic self-map of the disk with a compiled evaluator.
///
/// Cloning is cheap; the evaluation tree is shared.
#[derive(Clone)]
pub struct Symbol {
    expr: SymbolExpr,
    node: Arc<Node>,
    validation: ValidationReport,
}

impl Symbol {
    /// Lowers and validates `expr` at the default resolution.
    pub fn compile(expr: SymbolExpr) -> Result<Symbol, SymbolError> {
        Self::compile_with_resolution(expr, DEFAULT_VALIDATION_RESOLUTION)
    }

    pub fn compile_with_resolution(expr: SymbolExpr, resolution: usize) -> Result<Symbol, SymbolError> {
        let node = Arc::new(Node::lower(&expr));
        let validation = validate_self_map(&NodeEval(&node), resolution)?;
        Ok(Symbol { expr, node, validation })
    }

    /// Parses and compiles a grammar string.
    pub fn parse(text: &str) -> Result<Symbol, SymbolError> {
        Self::compile(parse_symbol(text)?)
    }

    pub fn expr(&self) -> &SymbolExpr {
        &self.expr
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    /// Known bound for `sup |φ|`, taken from validation.
    pub fn declared_sup(&self) -> f64 {
        self.validation.sup_estimate
    }

    /// Re-runs validation at another resolution.
    pub fn revalidate(&self, resolution: usize) -> Result<ValidationReport, SymbolError> {
        validate_self_map(self, resolution)
    }

    /// `z ↦ φ(z)^n`, evaluated by binary exponentiation on dual numbers.
    pub fn pointwise_power(&self, n: u32) -> Result<Symbol, SymbolError> {
        if n == 0 || n > MAX_POWER {
            return Err(SymbolError::InvalidPower(u64::from(n)));
        }
        let mut validation = self.validation.clone();
        validation.sup_estimate = validation.sup_estimate.powi(n as i32);
        validation.witness = self.validation.witness;
        validation.strict = validation.sup_estimate < 1.0 - STRICT_MARGIN;
        Ok(Symbol {
            expr: SymbolExpr::pow(self.expr.clone(), n),
            node: Arc::new(Node::Pow(self.node.clone(), n)),
            validation,
        })
    }
}

impl Evaluatable for Symbol {
    fn eval_dual(&self, z: Dual) -> Dual {
        self.node.eval(z)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.expr)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.expr, f)
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.expr)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Symbol::parse(&text).map_err(serde::de::Error::custom)
    }
}
