//! Retrieval-augmented semantic parsing toolkit.
//!
//! The crate covers everything around the language model: a reader for the
//! WordNet 3.0 database files, the n-gram concept retriever that feeds
//! glosses into prompts, a parser and validator for Sequence Box Notation
//! (SBN), and the evaluation metrics used to score predicted meaning
//! representations (Hard/Soft SMATCH, node F-score, ill-formed rate and
//! Wu-Palmer scoring of out-of-distribution concepts).
//!
//! Numeric results are generic over [`Scalar`]; `f64` is the everyday
//! choice, [`Exact`] (a rational) gives bit-exact sums for oracles and
//! aggregation checks.

pub mod concept;
pub mod corpus;
pub mod jsonl;
pub mod metrics;
pub mod prompting;
pub mod retrieval;
pub mod scalar;
pub mod sbn;
pub mod synth;
pub mod wordnet;

pub use scalar::{Exact, Scalar};
pub use concept::{ConceptKey, Pos, PosClass};
pub use sbn::DrsGraph;
pub use wordnet::WordnetStore;

/// Match score over `f64`.
pub type MatchScore = metrics::MatchScore<f64>;
/// Match score with exact rational arithmetic.
pub type ExactMatchScore = metrics::MatchScore<Exact>;
/// Corpus report over `f64`.
pub type ScoreReport = metrics::ScoreReport<f64>;
/// Corpus report with exact rational arithmetic.
pub type ExactScoreReport = metrics::ScoreReport<Exact>;
