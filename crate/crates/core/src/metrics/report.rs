//! Per-document scoring and corpus aggregation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::smatch::smatch_seeded;
use super::{challenge_score, node_fscore, ChallengeItemScore, ConceptSimilarity, ExactMatch, Ifr, MatchMode, MatchScore};
use crate::concept::PosClass;
use crate::corpus::ChallengeTarget;
use crate::sbn::{concept_bag, parse, to_triples, DrsGraph};
use crate::scalar::{mean, Scalar};

/// Every metric for one predicted document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScore<S> {
    pub id: String,
    pub well_formed: bool,
    pub hard: MatchScore<S>,
    pub soft: MatchScore<S>,
    pub node: MatchScore<S>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub challenge: Option<ChallengeItemScore<S>>,
}

impl<S: Scalar> DocumentScore<S> {
    pub fn to_f64(&self) -> DocumentScore<f64> {
        DocumentScore {
            id: self.id.clone(),
            well_formed: self.well_formed,
            hard: self.hard.to_f64(),
            soft: self.soft.to_f64(),
            node: self.node.to_f64(),
            challenge: self.challenge.as_ref().map(ChallengeItemScore::to_f64),
        }
    }
}

/// Scores a raw model output against its gold graph. Ill-formed outputs
/// match nothing: they score 0 everywhere while their gold triples and
/// concepts still count towards recall.
pub fn score_document<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    id: &str,
    output: &str,
    gold: &DrsGraph,
    targets: &[ChallengeTarget],
    restarts: usize,
    sim: &C,
) -> DocumentScore<S> {
    let challenge = |pred: Option<&DrsGraph>, alignment| {
        (!targets.is_empty()).then(|| challenge_score(id, pred, gold, alignment, targets, sim))
    };
    match parse(output) {
        Ok(pred) => {
            let (hard, alignment) = smatch_seeded::<S, _>(&pred, gold, MatchMode::Hard, restarts, &ExactMatch, None);
            // Starting one soft search from the hard optimum keeps soft >= hard.
            let (soft, _) = smatch_seeded(&pred, gold, MatchMode::Soft, restarts, sim, Some(&alignment));
            DocumentScore {
                id: id.to_string(),
                well_formed: true,
                hard,
                soft,
                node: node_fscore(&pred, gold),
                challenge: challenge(Some(&pred), Some(&alignment)),
            }
        }
        Err(_) => {
            let triples = S::from_count(to_triples(gold).len());
            DocumentScore {
                id: id.to_string(),
                well_formed: false,
                hard: MatchScore::missed(triples),
                soft: MatchScore::missed(triples),
                node: MatchScore::missed(S::from_count(concept_bag(gold).total())),
                challenge: challenge(None, None),
            }
        }
    }
}

/// Challenge means on a 0-100 scale; `None` for classes without targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeSummary<S> {
    pub noun: Option<S>,
    pub verb: Option<S>,
    pub modifier: Option<S>,
    /// Mean over all targets, not over documents.
    pub overall: Option<S>,
    pub noun_targets: usize,
    pub verb_targets: usize,
    pub modifier_targets: usize,
}

impl<S: Scalar> ChallengeSummary<S> {
    pub fn targets(&self) -> usize {
        self.noun_targets + self.verb_targets + self.modifier_targets
    }

    fn to_f64(&self) -> ChallengeSummary<f64> {
        ChallengeSummary {
            noun: self.noun.map(Scalar::to_f64),
            verb: self.verb.map(Scalar::to_f64),
            modifier: self.modifier.map(Scalar::to_f64),
            overall: self.overall.map(Scalar::to_f64),
            noun_targets: self.noun_targets,
            verb_targets: self.verb_targets,
            modifier_targets: self.modifier_targets,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary<S> {
    pub documents: usize,
    /// Micro-averaged over all triples.
    pub hard: MatchScore<S>,
    pub soft: MatchScore<S>,
    /// Micro-averaged over all concepts.
    pub node: MatchScore<S>,
    pub ifr: Ifr,
    /// Percentage.
    pub ifr_rate: S,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub challenge: Option<ChallengeSummary<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport<S> {
    pub summary: CorpusSummary<S>,
    pub documents: Vec<DocumentScore<S>>,
}

/// Pools per-document scores into a corpus report.
pub fn aggregate<S: Scalar>(documents: Vec<DocumentScore<S>>) -> ScoreReport<S> {
    let ifr = Ifr { count: documents.iter().filter(|d| !d.well_formed).count(), total: documents.len() };
    let challenge_items: Vec<&ChallengeItemScore<S>> = documents.iter().filter_map(|d| d.challenge.as_ref()).collect();
    let challenge = (!challenge_items.is_empty()).then(|| {
        let hundred = S::from_count(100);
        let values = |class: Option<PosClass>| {
            challenge_items
                .iter()
                .flat_map(|c| &c.targets)
                .filter(|t| class.is_none_or(|k| t.pos_class == k))
                .map(|t| t.wup)
                .collect::<Vec<S>>()
        };
        let scaled = |v: Vec<S>| (!v.is_empty()).then(|| mean(v) * hundred);
        ChallengeSummary {
            noun_targets: values(Some(PosClass::Noun)).len(),
            verb_targets: values(Some(PosClass::Verb)).len(),
            modifier_targets: values(Some(PosClass::Modifier)).len(),
            noun: scaled(values(Some(PosClass::Noun))),
            verb: scaled(values(Some(PosClass::Verb))),
            modifier: scaled(values(Some(PosClass::Modifier))),
            overall: scaled(values(None)),
        }
    });
    let summary = CorpusSummary {
        documents: documents.len(),
        hard: MatchScore::pool(documents.iter().map(|d| &d.hard)),
        soft: MatchScore::pool(documents.iter().map(|d| &d.soft)),
        node: MatchScore::pool(documents.iter().map(|d| &d.node)),
        ifr,
        ifr_rate: ifr.rate(),
        challenge,
    };
    ScoreReport { summary, documents }
}

impl<S: Scalar> ScoreReport<S> {
    pub fn to_f64(&self) -> ScoreReport<f64> {
        let s = &self.summary;
        ScoreReport {
            summary: CorpusSummary {
                documents: s.documents,
                hard: s.hard.to_f64(),
                soft: s.soft.to_f64(),
                node: s.node.to_f64(),
                ifr: s.ifr,
                ifr_rate: s.ifr_rate.to_f64(),
                challenge: s.challenge.as_ref().map(ChallengeSummary::to_f64),
            },
            documents: self.documents.iter().map(DocumentScore::to_f64).collect(),
        }
    }

    /// Fixed-width summary: F-scores on a 0-100 scale in the column order
    /// Hard-SMatch, Soft-SMatch, IFR (count), node F score, then the
    /// challenge columns when targets were scored.
    pub fn table(&self) -> String {
        let s = &self.summary;
        let pct = |x: S| format!("{:.2}", x.to_f64() * 100.0);
        let mut out = String::new();
        let _ = writeln!(out, "documents: {}", s.documents);
        let _ = writeln!(out, "{:>12} {:>12} {:>12} {:>12}", "Hard-SMatch", "Soft-SMatch", "IFR", "F score");
        let ifr = format!("{:.2} ({})", s.ifr_rate.to_f64(), s.ifr.count);
        let _ = writeln!(out, "{:>12} {:>12} {:>12} {:>12}", pct(s.hard.f1), pct(s.soft.f1), ifr, pct(s.node.f1));
        if let Some(c) = &s.challenge {
            let cell = |x: Option<S>| x.map_or_else(|| "-".to_string(), |v| format!("{:.2}", v.to_f64()));
            let _ = writeln!(out);
            let _ = writeln!(out, "challenge (Wu-Palmer x100, Overall = mean over {} targets)", c.targets());
            let _ = writeln!(out, "{:>12} {:>12} {:>12} {:>12}", "Noun", "Verb", "Modifiers", "Overall");
            let _ = writeln!(out, "{:>12} {:>12} {:>12} {:>12}", cell(c.noun), cell(c.verb), cell(c.modifier), cell(c.overall));
            let counts = format!("({}/{}/{})", c.noun_targets, c.verb_targets, c.modifier_targets);
            let _ = writeln!(out, "{counts:>51}");
        }
        out
    }
}
