//! Evaluation metrics: Hard/Soft SMATCH, node F-score, ill-formed rate and
//! Wu-Palmer scoring of challenge-set targets.

mod challenge;
mod node;
mod report;
mod smatch;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::ConceptKey;
use crate::scalar::{ratio_or_zero, Scalar};
use crate::wordnet::WordnetStore;

pub use challenge::{challenge_score, ChallengeItemScore, TargetScore};
pub use node::{ifr, node_fscore, Ifr};
pub use report::{aggregate, score_document, ChallengeSummary, CorpusSummary, DocumentScore, ScoreReport};
pub use smatch::{brute_force_smatch, score_triple, smatch, Alignment, BRUTE_FORCE_LIMIT};

/// Restarts used when a caller does not choose.
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Concepts match only when identical.
    Hard,
    /// Aligned concepts score their similarity.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no outputs to score")]
    EmptyCorpus,
    #[error("graph has {vars} variables, exhaustive alignment is limited to {limit}")]
    TooLarge { vars: usize, limit: usize },
}

/// Graded similarity between a predicted and a gold concept.
pub trait ConceptSimilarity<S: Scalar> {
    fn similarity(&self, pred: &ConceptKey, gold: &ConceptKey) -> S;
}

impl<S: Scalar> ConceptSimilarity<S> for WordnetStore {
    fn similarity(&self, pred: &ConceptKey, gold: &ConceptKey) -> S {
        self.wup(pred, gold)
    }
}

impl<S: Scalar, F> ConceptSimilarity<S> for F
where
    F: Fn(&ConceptKey, &ConceptKey) -> S,
{
    fn similarity(&self, pred: &ConceptKey, gold: &ConceptKey) -> S {
        self(pred, gold)
    }
}

/// Similarity that is 1 for identical concepts and 0 otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatch;

impl<S: Scalar> ConceptSimilarity<S> for ExactMatch {
    fn similarity(&self, pred: &ConceptKey, gold: &ConceptKey) -> S {
        if pred == gold {
            S::one()
        } else {
            S::zero()
        }
    }
}

/// Precision, recall and F1 from a matched weight and two totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchScore<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
    pub matched: S,
    pub pred_total: S,
    pub gold_total: S,
}

impl<S: Scalar> MatchScore<S> {
    /// P = matched / pred_total and R = matched / gold_total, each 0 when
    /// its denominator is 0; F1 = 2PR / (P + R), 0 when P + R = 0.
    pub fn new(matched: S, pred_total: S, gold_total: S) -> Self {
        let precision = ratio_or_zero(matched, pred_total);
        let recall = ratio_or_zero(matched, gold_total);
        let two = S::one() + S::one();
        let f1 = ratio_or_zero(two * precision * recall, precision + recall);
        MatchScore { precision, recall, f1, matched, pred_total, gold_total }
    }

    pub fn from_counts(matched: usize, pred_total: usize, gold_total: usize) -> Self {
        Self::new(S::from_count(matched), S::from_count(pred_total), S::from_count(gold_total))
    }

    /// Score of an empty prediction against `gold_total` gold items.
    pub fn missed(gold_total: S) -> Self {
        Self::new(S::zero(), S::zero(), gold_total)
    }

    /// Micro-average: pools matched weight and totals.
    pub fn pool<'a>(scores: impl IntoIterator<Item = &'a MatchScore<S>>) -> Self {
        let (mut m, mut p, mut g) = (S::zero(), S::zero(), S::zero());
        for s in scores {
            m = m + s.matched;
            p = p + s.pred_total;
            g = g + s.gold_total;
        }
        Self::new(m, p, g)
    }

    pub fn to_f64(&self) -> MatchScore<f64> {
        MatchScore {
            precision: self.precision.to_f64(),
            recall: self.recall.to_f64(),
            f1: self.f1.to_f64(),
            matched: self.matched.to_f64(),
            pred_total: self.pred_total.to_f64(),
            gold_total: self.gold_total.to_f64(),
        }
    }
}
