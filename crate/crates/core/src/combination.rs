use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Evaluatable};
use crate::symbols::Symbol;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CombinationError {
    #[error("a combination needs at least one term")]
    Empty,
    #[error("scalar of term {index} is zero; every lambda must be nonzero")]
    ZeroLambda { index: usize },
    #[error("scalar of term {index} is not finite")]
    NonFiniteLambda { index: usize },
}

/// One summand `λ C_φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub lambda: Complex64,
    pub symbol: Symbol,
}

/// The operator `Σ λ_i C_{φ_i}` with all `λ_i` nonzero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CombinationSpec {
    terms: Vec<Term>,
}

impl CombinationSpec {
    pub fn new(terms: Vec<Term>) -> Result<Self, CombinationError> {
        if terms.is_empty() {
            return Err(CombinationError::Empty);
        }
        for (index, t) in terms.iter().enumerate() {
            if !t.lambda.is_finite() {
                return Err(CombinationError::NonFiniteLambda { index });
            }
            if t.lambda.norm() == 0.0 {
                return Err(CombinationError::ZeroLambda { index });
            }
        }
        Ok(Self { terms })
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self, CombinationError>
    where
        I: IntoIterator<Item = (Complex64, Symbol)>,
    {
        Self::new(pairs.into_iter().map(|(lambda, symbol)| Term { lambda, symbol }).collect())
    }

    pub fn single(symbol: Symbol) -> Self {
        Self { terms: vec![Term { lambda: Complex64::new(1.0, 0.0), symbol }] }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.lambda).collect()
    }

    /// Same symbols with every scalar multiplied by `t`.
    pub fn scaled(&self, t: Complex64) -> Result<Self, CombinationError> {
        Self::new(self.terms.iter().map(|term| Term { lambda: term.lambda * t, symbol: term.symbol.clone() }).collect())
    }

    /// The function `z ↦ Σ λ_i φ_i(z)^n`.
    pub fn power(&self, n: u32) -> PowerCombination<'_> {
        PowerCombination { spec: self, n }
    }
}

impl<'de> Deserialize<'de> for CombinationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        CombinationSpec::new(terms).map_err(serde::de::Error::custom)
    }
}

/// `z ↦ Σ λ_i φ_i(z)^n`, value and derivative by linearity and the chain rule.
#[derive(Debug, Clone, Copy)]
pub struct PowerCombination<'a> {
    spec: &'a CombinationSpec,
    n: u32,
}

impl Evaluatable for PowerCombination<'_> {
    fn eval_dual(&self, z: Dual) -> Dual {
        let mut acc = Dual::constant(Complex64::new(0.0, 0.0));
        for t in &self.spec.terms {
            acc = acc + t.symbol.eval_dual(z).powi(u64::from(self.n)).scale(t.lambda);
        }
        acc
    }
}
