//! Compactness criteria for `Σ λ_i C_{φ_i}` on the Bloch space and on H∞.
//!
//! Everything here produces *evidence*, never a proof: every verdict is
//! three-valued and carries the thresholds that produced it.

mod delta;
mod paths;
mod sequence;
mod single;
mod structural;

use serde::{Deserialize, Serialize};

pub use delta::{
    condition_ii, condition_iii, condition_iv, index_sets, sample_delta, theorem_a, ConditionOutcome, ConditionRecord,
    DeltaSample, IndexSets, IndexTolerances, JSets, StepRecord, TheoremAReport,
};
pub use paths::{contact_paths, default_paths, Approach, BoundaryPath, PathConfig};
pub use sequence::{classify_sequence, power_sequence, DecayFit, SequenceDiagnostics, SequenceThresholds};
pub use single::{
    difference_compactness, single_compactness_bloch, single_compactness_hinf, BoundaryReport, CompactnessParams,
    HinfReport, LevelSup, RoutedReport,
};
pub use structural::{
    corollary1_check, corollary2_check, subset_sum_check, theorem3_verdict, CorollaryReport, PairResult,
    StructuralError, SubsetSumReport, Theorem3Branch, Theorem3Report, MAX_SUBSET_K, SUM_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    CompactEvidence,
    NonCompactEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn is_decisive(self) -> bool {
        self != Verdict::Inconclusive
    }

    /// Combines two independent routes: decisive only when both agree.
    /// The flag reports a decisive disagreement.
    pub fn agree(self, other: Verdict) -> (Verdict, bool) {
        match (self, other) {
            (a, b) if a == b => (a, false),
            (a, b) if a.is_decisive() && b.is_decisive() => (Verdict::Inconclusive, true),
            _ => (Verdict::Inconclusive, false),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CompactEvidence => "CompactEvidence",
            Verdict::NonCompactEvidence => "NonCompactEvidence",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}
