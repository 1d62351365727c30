//! First-order dual numbers over the complex field and the [`Evaluatable`]
//! contract shared by symbols, power combinations and proof test functions.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

/// A complex value carried together with its first-order perturbation.
///
/// For an analytic `f`, evaluating on `Dual::variable(z)` yields
/// `(f(z), f'(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: Complex64,
    pub deriv: Complex64,
}

impl Dual {
    pub const fn new(value: Complex64, deriv: Complex64) -> Self {
        Self { value, deriv }
    }

    pub const fn constant(value: Complex64) -> Self {
        Self { value, deriv: Complex64::new(0.0, 0.0) }
    }

    pub const fn variable(z: Complex64) -> Self {
        Self { value: z, deriv: Complex64::new(1.0, 0.0) }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::new(self.value * c, self.deriv * c)
    }

    pub fn recip(self) -> Self {
        let inv = self.value.inv();
        Self::new(inv, -self.deriv * inv * inv)
    }

    /// `self^n` by binary exponentiation. `powi(0)` is the constant 1.
    pub fn powi(self, mut n: u64) -> Self {
        let mut acc = Dual::constant(Complex64::new(1.0, 0.0));
        let mut base = self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.value * rhs.value, self.deriv * rhs.value + self.value * rhs.deriv)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let inv = rhs.value.inv();
        let q = self.value * inv;
        Dual::new(q, (self.deriv - q * rhs.deriv) * inv)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

impl Add<Complex64> for Dual {
    type Output = Dual;
    fn add(self, rhs: Complex64) -> Dual {
        Dual::new(self.value + rhs, self.deriv)
    }
}

impl Sub<Dual> for Complex64 {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self - rhs.value, -rhs.deriv)
    }
}

/// An analytic function on the open disk that can report its value and
/// derivative at any interior point.
///
/// Implementations must be callable concurrently.
pub trait Evaluatable: Send + Sync {
    /// Evaluates the function at `z` given as a dual number, so that
    /// compositions propagate derivatives through the chain rule.
    fn eval_dual(&self, z: Dual) -> Dual;

    /// Value and derivative at `z`.
    fn eval(&self, z: Complex64) -> Dual {
        self.eval_dual(Dual::variable(z))
    }
}

impl<T: Evaluatable + ?Sized> Evaluatable for &T {
    fn eval_dual(&self, z: Dual) -> Dual {
        (**self).eval_dual(z)
    }
}

impl<T: Evaluatable + ?Sized> Evaluatable for Arc<T> {
    fn eval_dual(&self, z: Dual) -> Dual {
        (**self).eval_dual(z)
    }
}

impl<T: Evaluatable + ?Sized> Evaluatable for Box<T> {
    fn eval_dual(&self, z: Dual) -> Dual {
        (**self).eval_dual(z)
    }
}

/// Adapts a closure `Dual -> Dual` into an [`Evaluatable`].
pub struct FnEval<F>(pub F);

impl<F> Evaluatable for FnEval<F>
where
    F: Fn(Dual) -> Dual + Send + Sync,
{
    fn eval_dual(&self, z: Dual) -> Dual {
        (self.0)(z)
    }
}

/// Shared, type-erased evaluatable.
pub type DynEval = Arc<dyn Evaluatable>;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dual::variable(c(0.3, -0.4));
        let mut acc = Dual::constant(c(1.0, 0.0));
        for n in 0..20u64 {
            let p = x.powi(n);
            assert!((p.value - acc.value).norm() < 1e-15);
            assert!((p.deriv - acc.deriv).norm() < 1e-14);
            acc = acc * x;
        }
    }

    #[test]
    fn quotient_rule() {
        let z = c(0.2, 0.1);
        let x = Dual::variable(z);
        let q = (x + c(1.0, 0.0)) / (c(2.0, 0.0) - x);
        let expect = c(3.0, 0.0) / ((c(2.0, 0.0) - z) * (c(2.0, 0.0) - z));
        assert!((q.deriv - expect).norm() < 1e-14);
    }

    #[test]
    fn recip_derivative() {
        let z = c(0.5, 0.5);
        let r = Dual::variable(z).recip();
        assert!((r.deriv + (z * z).inv()).norm() < 1e-14);
    }
}
