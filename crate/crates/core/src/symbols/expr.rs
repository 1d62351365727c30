use std::fmt;

use num_complex::Complex64;

use crate::disk::DiskPoint;

/// Largest exponent accepted by a pointwise power node.
pub const MAX_POWER: u32 = 1_000_000;

/// Tolerance on `|u| = 1` for the unimodular factor of a Blaschke product.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Expression tree describing an analytic map of the disk.
///
/// The tree is well formed by construction when it comes out of the parser;
/// the constructors below enforce the same per-node constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolExpr {
    /// `z`
    Identity,
    /// `const(c)`, with `|c| <= 1`.
    Const(Complex64),
    /// `mobius(a,b,c,d)`: `(a z + b) / (c z + d)`.
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// `sigma(a)`: the automorphism `(a - z) / (1 - conj(a) z)`.
    Sigma(DiskPoint),
    /// `blaschke([a1,...]; u)`: `u · Π σ_{a_k}(z)`.
    Blaschke { zeros: Vec<DiskPoint>, unimodular: Complex64 },
    /// `poly([c0,...,cm])`: `Σ c_k z^k`.
    Poly(Vec<Complex64>),
    /// `scale(r, E)`: `r · E(z)`.
    Scale(Complex64, Box<SymbolExpr>),
    /// `compose(E1, E2)`: `E1(E2(z))`.
    Compose(Box<SymbolExpr>, Box<SymbolExpr>),
    /// `pow(E, n)`: the pointwise power `E(z)^n`, `1 <= n <= MAX_POWER`.
    Pow(Box<SymbolExpr>, u32),
}

impl SymbolExpr {
    pub fn scale(r: Complex64, child: SymbolExpr) -> Self {
        SymbolExpr::Scale(r, Box::new(child))
    }

    pub fn compose(outer: SymbolExpr, inner: SymbolExpr) -> Self {
        SymbolExpr::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn pow(child: SymbolExpr, n: u32) -> Self {
        SymbolExpr::Pow(Box::new(child), n)
    }

    pub fn poly<I: IntoIterator<Item = f64>>(coeffs: I) -> Self {
        SymbolExpr::Poly(coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            SymbolExpr::Scale(_, e) | SymbolExpr::Pow(e, _) => 1 + e.size(),
            SymbolExpr::Compose(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }
}

/// Writes a complex literal in the grammar's `x`, `x+yi` form using the
/// shortest representation that parses back to the same bits.
pub(crate) fn write_complex(f: &mut impl fmt::Write, c: Complex64) -> fmt::Result {
    write!(f, "{:?}", c.re)?;
    if c.im != 0.0 {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{}{:?}i", sign, c.im.abs())?;
    }
    Ok(())
}

struct ListOf<'a>(&'a [Complex64]);

impl fmt::Display for ListOf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write_complex(f, *c)?;
        }
        f.write_str("]")
    }
}

/// Canonical printer: emits exactly the symbol grammar, without whitespace.
impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolExpr::Identity => f.write_str("z"),
            SymbolExpr::Const(c) => {
                f.write_str("const(")?;
                write_complex(f, *c)?;
                f.write_str(")")
            }
            SymbolExpr::Mobius { a, b, c, d } => {
                f.write_str("mobius(")?;
                for (i, x) in [a, b, c, d].into_iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_complex(f, *x)?;
                }
                f.write_str(")")
            }
            SymbolExpr::Sigma(a) => {
                f.write_str("sigma(")?;
                write_complex(f, a.value())?;
                f.write_str(")")
            }
            SymbolExpr::Blaschke { zeros, unimodular } => {
                let zs: Vec<Complex64> = zeros.iter().map(|p| p.value()).collect();
                write!(f, "blaschke({};", ListOf(&zs))?;
                write_complex(f, *unimodular)?;
                f.write_str(")")
            }
            SymbolExpr::Poly(cs) => write!(f, "poly({})", ListOf(cs)),
            SymbolExpr::Scale(r, e) => {
                f.write_str("scale(")?;
                write_complex(f, *r)?;
                write!(f, ",{})", e)
            }
            SymbolExpr::Compose(a, b) => write!(f, "compose({},{})", a, b),
            SymbolExpr::Pow(e, n) => write!(f, "pow({},{})", e, n),
        }
    }
}
