use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sequence::{power_sequence, SequenceDiagnostics};
use super::single::{difference_compactness, single_compactness_bloch, CompactnessParams};
use super::Verdict;
use crate::combination::CombinationSpec;
use crate::norms::NormKind;
use crate::symbols::Symbol;

/// Largest `k` for the exhaustive subset enumeration.
pub const MAX_SUBSET_K: usize = 20;

/// Scalar sums at most this large in modulus count as zero.
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize, Deserialize)]
pub enum StructuralError {
    #[error("{k} scalars exceed the exhaustive subset limit of {MAX_SUBSET_K}")]
    KTooLarge { k: usize },
    #[error("scalars over the proper subset {witness:?} sum to zero; the structural theorem does not apply")]
    HypothesisViolated { witness: Vec<usize> },
    #[error("precondition violated: {reason}")]
    PreconditionViolated { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSumReport {
    /// No nonempty proper subset of the scalars sums to zero.
    pub passes: bool,
    /// 0-based indices of a zero-sum subset when `passes` is false.
    pub witness: Option<Vec<usize>>,
}

/// Checks `Σ_{i∈J} λ_i ≠ 0` for every nonempty proper `J` by enumeration.
pub fn subset_sum_check(lambdas: &[Complex64]) -> Result<SubsetSumReport, StructuralError> {
    let k = lambdas.len();
    if k > MAX_SUBSET_K {
        return Err(StructuralError::KTooLarge { k });
    }
    let full = (1u32 << k) - 1;
    for mask in 1..full {
        let sum: Complex64 = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| lambdas[i]).sum();
        if sum.norm() <= SUM_TOL {
            let witness = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            return Ok(SubsetSumReport { passes: false, witness: Some(witness) });
        }
    }
    Ok(SubsetSumReport { passes: true, witness: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
    pub disagreement: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem3Branch {
    /// Every `C_{φ_i}` is compact, so the combination is.
    AllCompact,
    /// At least one `C_{φ_i}` is non-compact: compact iff `Σ λ = 0` and all
    /// pairwise differences are compact.
    SomeNonCompact,
    /// Single verdicts left the branch open.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub singles: Vec<Verdict>,
    pub lambda_sum: Complex64,
    pub sum_zero: bool,
    pub pairs: Vec<PairResult>,
    pub branch: Theorem3Branch,
    pub verdict: Verdict,
    pub sum_tol: f64,
    pub evidence: Vec<String>,
}

/// Structural verdict from the subset-sum hypothesis, the scalar sum and
/// pairwise difference compactness.
pub fn theorem3_verdict(spec: &CombinationSpec, params: &CompactnessParams) -> Result<Theorem3Report, StructuralError> {
    let lambdas = spec.lambdas();
    let subsets = subset_sum_check(&lambdas)?;
    if let Some(witness) = subsets.witness {
        return Err(StructuralError::HypothesisViolated { witness });
    }
    let singles: Vec<Verdict> =
        spec.terms().iter().map(|t| single_compactness_bloch(&t.symbol, params).verdict).collect();
    let lambda_sum: Complex64 = lambdas.iter().sum();
    let sum_zero = lambda_sum.norm() <= SUM_TOL;
    let mut evidence = vec![format!("single verdicts: {singles:?}"), format!("|Σλ| = {:e}", lambda_sum.norm())];
    let mut pairs = Vec::new();

    let (branch, verdict) = if singles.iter().all(|&v| v == Verdict::CompactEvidence) {
        evidence.push("every term compact".into());
        (Theorem3Branch::AllCompact, Verdict::CompactEvidence)
    } else if !singles.contains(&Verdict::NonCompactEvidence) {
        evidence.push("no term decisively non-compact".into());
        (Theorem3Branch::Undetermined, Verdict::Inconclusive)
    } else if !sum_zero {
        evidence.push(format!("Σλ ≠ 0 (tolerance {SUM_TOL:e})"));
        (Theorem3Branch::SomeNonCompact, Verdict::NonCompactEvidence)
    } else {
        let k = spec.k();
        for i in 0..k {
            for j in i + 1..k {
                let r = difference_compactness(&spec.terms()[i].symbol, &spec.terms()[j].symbol, params);
                pairs.push(PairResult { i, j, verdict: r.verdict, disagreement: r.disagreement });
            }
        }
        let verdict = if pairs.iter().any(|p| p.verdict == Verdict::NonCompactEvidence) {
            Verdict::NonCompactEvidence
        } else if pairs.iter().all(|p| p.verdict == Verdict::CompactEvidence) {
            Verdict::CompactEvidence
        } else {
            Verdict::Inconclusive
        };
        evidence.push(format!(
            "pairwise differences: {}",
            pairs.iter().map(|p| format!("({},{}) {}", p.i, p.j, p.verdict)).collect::<Vec<_>>().join(", ")
        ));
        (Theorem3Branch::SomeNonCompact, verdict)
    };
    Ok(Theorem3Report { singles, lambda_sum, sum_zero, pairs, branch, verdict, sum_tol: SUM_TOL, evidence })
}

/// Compares the power-sequence verdict for `λ_1 C_φ + λ_2 C_ψ` with a
/// characterization in terms of simpler quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub combination: SequenceDiagnostics,
    /// Verdict predicted by the characterization.
    pub predicted: Verdict,
    /// `None` when either side is inconclusive.
    pub agreement: Option<bool>,
    pub evidence: Vec<String>,
}

fn pair_spec(l1: Complex64, phi: &Symbol, l2: Complex64, psi: &Symbol) -> Result<CombinationSpec, StructuralError> {
    CombinationSpec::from_pairs([(l1, phi.clone()), (l2, psi.clone())])
        .map_err(|e| StructuralError::PreconditionViolated { reason: e.to_string() })
}

fn compare(combination: SequenceDiagnostics, predicted: Verdict, mut evidence: Vec<String>) -> CorollaryReport {
    let agreement =
        (combination.verdict.is_decisive() && predicted.is_decisive()).then(|| combination.verdict == predicted);
    evidence.push(format!("combination {} vs predicted {}", combination.verdict, predicted));
    CorollaryReport { combination, predicted, agreement, evidence }
}

/// For non-compact `C_φ`, `C_ψ`: compact iff `λ_1 + λ_2 = 0` and
/// `‖φ^n - ψ^n‖_B → 0`.
pub fn corollary1_check(
    l1: Complex64,
    l2: Complex64,
    phi: &Symbol,
    psi: &Symbol,
    params: &CompactnessParams,
) -> Result<CorollaryReport, StructuralError> {
    let spec = pair_spec(l1, phi, l2, psi)?;
    let sv: Vec<Verdict> = [phi, psi].iter().map(|s| single_compactness_bloch(s, params).verdict).collect();
    if sv.contains(&Verdict::CompactEvidence) {
        return Err(StructuralError::PreconditionViolated {
            reason: format!("a composition operator is compact (single verdicts {sv:?})"),
        });
    }
    let diff = pair_spec(Complex64::new(1.0, 0.0), phi, Complex64::new(-1.0, 0.0), psi)?;
    let diff = power_sequence(&diff, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds);
    let sum_zero = (l1 + l2).norm() <= SUM_TOL;
    let predicted = match (sum_zero, diff.verdict) {
        (false, _) | (_, Verdict::NonCompactEvidence) => Verdict::NonCompactEvidence,
        (true, Verdict::CompactEvidence) if !sv.contains(&Verdict::Inconclusive) => Verdict::CompactEvidence,
        _ => Verdict::Inconclusive,
    };
    let evidence = vec![
        format!("single verdicts {sv:?}"),
        format!("|λ1 + λ2| = {:e}", (l1 + l2).norm()),
        format!("‖φ^n - ψ^n‖_B: {}", diff.verdict),
    ];
    let combination = power_sequence(&spec, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds);
    Ok(compare(combination, predicted, evidence))
}

/// For `λ_1 + λ_2 ≠ 0`: `‖λ_1 φ^n + λ_2 ψ^n‖_B → 0` iff both `‖φ^n‖_B → 0`
/// and `‖ψ^n‖_B → 0`.
pub fn corollary2_check(
    l1: Complex64,
    l2: Complex64,
    phi: &Symbol,
    psi: &Symbol,
    params: &CompactnessParams,
) -> Result<CorollaryReport, StructuralError> {
    if (l1 + l2).norm() <= SUM_TOL {
        return Err(StructuralError::PreconditionViolated { reason: "λ1 + λ2 = 0".into() });
    }
    let spec = pair_spec(l1, phi, l2, psi)?;
    let singles: Vec<Verdict> = [phi, psi]
        .iter()
        .map(|s| {
            let one = CombinationSpec::single((*s).clone());
            power_sequence(&one, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds).verdict
        })
        .collect();
    let predicted = if singles.contains(&Verdict::NonCompactEvidence) {
        Verdict::NonCompactEvidence
    } else if singles.iter().all(|&v| v == Verdict::CompactEvidence) {
        Verdict::CompactEvidence
    } else {
        Verdict::Inconclusive
    };
    let combination = power_sequence(&spec, NormKind::Bloch, params.n_max, &params.grid, &params.thresholds);
    Ok(compare(combination, predicted, vec![format!("‖φ^n‖_B, ‖ψ^n‖_B verdicts {singles:?}")]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(s: &str) -> Symbol {
        Symbol::parse(s).unwrap()
    }

    fn params() -> CompactnessParams {
        CompactnessParams { n_max: 128, ..CompactnessParams::default() }
    }

    #[test]
    fn subset_sums() {
        let r = subset_sum_check(&[c(6.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0), c(-3.0, 0.0)]).unwrap();
        assert!(r.passes);
        let r = subset_sum_check(&[c(1.0, 0.0), c(-1.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert_eq!(r.witness, Some(vec![0, 1]));
        assert!(subset_sum_check(&[c(4.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap().passes);
        assert!(subset_sum_check(&[c(3.0, 0.0), c(0.0, -1.0), c(-2.0, 0.0)]).unwrap().passes);
        assert!(subset_sum_check(&[c(2.0, 0.0)]).unwrap().passes);
        assert_eq!(subset_sum_check(&vec![c(1.0, 0.0); 21]), Err(StructuralError::KTooLarge { k: 21 }));
        // full set summing to zero is allowed
        assert!(subset_sum_check(&[c(1.0, 1.0), c(-1.0, -1.0)]).unwrap().passes);
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let spec =
            CombinationSpec::from_pairs([(c(1.0, 0.0), sym("z")), (c(-1.0, 0.0), sym("z")), (c(5.0, 0.0), sym("z"))])
                .unwrap();
        assert_eq!(
            theorem3_verdict(&spec, &params()),
            Err(StructuralError::HypothesisViolated { witness: vec![0, 1] })
        );
    }

    #[test]
    fn remark_all_compact_branch() {
        let r = sym("scale(0.5,z)");
        let spec =
            CombinationSpec::from_pairs([(c(3.0, 0.0), r.clone()), (c(0.0, -1.0), r.clone()), (c(-2.0, 0.0), r)])
                .unwrap();
        let rep = theorem3_verdict(&spec, &params()).unwrap();
        assert_eq!(rep.branch, Theorem3Branch::AllCompact);
        assert_eq!(rep.verdict, Verdict::CompactEvidence);
    }

    #[test]
    fn corollary2_examples() {
        let p = params();
        let one = c(1.0, 0.0);
        let r = corollary2_check(one, one, &sym("scale(0.5,z)"), &sym("scale(0.3333333333333333,z)"), &p).unwrap();
        assert_eq!((r.combination.verdict, r.predicted), (Verdict::CompactEvidence, Verdict::CompactEvidence));
        let r = corollary2_check(one, one, &sym("z"), &sym("scale(0.5,z)"), &p).unwrap();
        assert_eq!((r.combination.verdict, r.predicted), (Verdict::NonCompactEvidence, Verdict::NonCompactEvidence));
        let r = corollary2_check(c(2.0, 0.0), c(3.0, 0.0), &sym("z"), &sym("scale(-1,z)"), &p).unwrap();
        assert_eq!(r.agreement, Some(true));
        assert!(matches!(
            corollary2_check(one, -one, &sym("z"), &sym("z"), &p),
            Err(StructuralError::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn corollary1_examples() {
        let p = params();
        let one = c(1.0, 0.0);
        let r = corollary1_check(one, -one, &sym("z"), &sym("scale(-1,z)"), &p).unwrap();
        assert_eq!(r.predicted, Verdict::NonCompactEvidence);
        assert_eq!(r.agreement, Some(true));
        let r = corollary1_check(one, -one, &sym("z"), &sym("z"), &p).unwrap();
        assert_eq!((r.combination.verdict, r.predicted), (Verdict::CompactEvidence, Verdict::CompactEvidence));
        assert!(corollary1_check(one, -one, &sym("z"), &sym("scale(0.5,z)"), &p).is_err());
    }
}
