//! Concept-bag F-score and ill-formed rate.

use serde::{Deserialize, Serialize};

use super::{MatchScore, MetricsError};
use crate::sbn::{concept_bag, validate, DrsGraph};
use crate::scalar::Scalar;

/// Multiset precision/recall/F1 of exactly matching concepts.
pub fn node_fscore<S: Scalar>(pred: &DrsGraph, gold: &DrsGraph) -> MatchScore<S> {
    let p = concept_bag(pred);
    let g = concept_bag(gold);
    MatchScore::from_counts(p.overlap(&g), p.total(), g.total())
}

/// Count of ill-formed outputs out of a total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ifr {
    pub count: usize,
    pub total: usize,
}

impl Ifr {
    /// Percentage of ill-formed outputs.
    pub fn rate<S: Scalar>(&self) -> S {
        if self.total == 0 {
            return S::zero();
        }
        S::from_ratio(100 * self.count as u64, self.total as u64)
    }
}

/// Ill-formed rate of raw model outputs.
pub fn ifr<T: AsRef<str>>(outputs: &[T]) -> Result<Ifr, MetricsError> {
    if outputs.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let count = outputs.iter().filter(|o| validate(o.as_ref()).is_err()).count();
    Ok(Ifr { count, total: outputs.len() })
}
