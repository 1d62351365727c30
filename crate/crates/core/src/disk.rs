//! Pointwise hyperbolic geometry of the unit disk: the involutive
//! automorphisms `σ_a`, the pseudo-hyperbolic distance and the hyperbolic
//! derivative of a self-map.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::Evaluatable;

/// Complex scalars used throughout the crate.
pub type ComplexValue = Complex64;

/// Closest `|φ(z)|` may come to 1 before the hyperbolic derivative is
/// treated as degenerate.
pub const DEGENERATE_TOL: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point {re}+{im}i is not in the open unit disk")]
    OutsideDisk { re: f64, im: f64 },
    #[error("symbol reaches the unit circle at interior point {re}+{im}i (|phi| = {modulus})")]
    DegenerateSymbol { re: f64, im: f64, modulus: f64 },
}

/// A point of the open unit disk. Construction rejects `|z| >= 1` and
/// non-finite components.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64::new(0.0, 0.0));

    pub fn new(z: Complex64) -> Result<Self, GeometryError> {
        if z.is_finite() && z.norm() < 1.0 {
            Ok(Self(z))
        } else {
            Err(GeometryError::OutsideDisk { re: z.re, im: z.im })
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self, GeometryError> {
        Self::new(Complex64::new(re, im))
    }

    /// `r e^{iθ}`; fails unless `0 <= r < 1`.
    pub fn from_polar(r: f64, theta: f64) -> Result<Self, GeometryError> {
        Self::new(Complex64::from_polar(r, theta))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

impl fmt::Debug for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiskPoint({}{:+}i)", self.0.re, self.0.im)
    }
}

impl TryFrom<Complex64> for DiskPoint {
    type Error = GeometryError;
    fn try_from(z: Complex64) -> Result<Self, Self::Error> {
        Self::new(z)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// `1 - |z|^2`, factored to keep relative accuracy near the circle.
pub fn one_minus_abs2(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// The automorphism `σ_a(z) = (a - z) / (1 - conj(a) z)` exchanging `0` and `a`.
///
/// `z` may lie on the closed disk; `|σ_a(z)| = 1` exactly when `|z| = 1`.
pub fn sigma(a: DiskPoint, z: Complex64) -> Complex64 {
    let a = a.0;
    (a - z) / (1.0 - a.conj() * z)
}

/// Pseudo-hyperbolic distance `|σ_w(z)|`.
///
/// Symmetric in its arguments bit for bit: `|z - w|` and `|1 - conj(w) z|`
/// are both invariant under the swap.
pub fn rho(z: DiskPoint, w: DiskPoint) -> f64 {
    rho_raw(z.0, w.0)
}

pub(crate) fn rho_raw(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    // conj(w) z and conj(z) w are exact conjugates in IEEE arithmetic, and
    // the modulus ignores the sign of the imaginary part.
    let den = (1.0 - w.conj() * z).norm();
    (num / den).min(1.0)
}

/// `φ^#(z) = (1 - |z|^2) φ'(z) / (1 - |φ(z)|^2)`.
pub fn hyperbolic_derivative<F>(phi: &F, z: DiskPoint) -> Result<Complex64, GeometryError>
where
    F: Evaluatable + ?Sized,
{
    let d = phi.eval(z.0);
    hyperbolic_derivative_from(z.0, d.value, d.deriv)
}

/// Hyperbolic derivative from an already evaluated `(φ(z), φ'(z))`.
pub fn hyperbolic_derivative_from(
    z: Complex64,
    value: Complex64,
    deriv: Complex64,
) -> Result<Complex64, GeometryError> {
    let m = value.norm();
    if !(m.is_finite() && deriv.is_finite()) || 1.0 - m <= DEGENERATE_TOL {
        return Err(GeometryError::DegenerateSymbol { re: z.re, im: z.im, modulus: m });
    }
    Ok(deriv * (one_minus_abs2(z) / one_minus_abs2(value)))
}
