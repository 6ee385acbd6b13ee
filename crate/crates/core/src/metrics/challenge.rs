//! Wu-Palmer scoring of out-of-distribution targets.

use serde::{Deserialize, Serialize};

use super::{smatch, Alignment, ConceptSimilarity, ExactMatch, MatchMode, DEFAULT_RESTARTS};
use crate::concept::{ConceptKey, PosClass};
use crate::corpus::ChallengeTarget;
use crate::sbn::DrsGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScore<S> {
    pub gold: ConceptKey,
    pub pos_class: PosClass,
    /// Predicted concept the target was compared with, if any.
    pub matched: Option<ConceptKey>,
    pub wup: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeItemScore<S> {
    pub id: String,
    pub targets: Vec<TargetScore<S>>,
}

impl<S: Scalar> ChallengeItemScore<S> {
    pub fn to_f64(&self) -> ChallengeItemScore<f64> {
        ChallengeItemScore {
            id: self.id.clone(),
            targets: self
                .targets
                .iter()
                .map(|t| TargetScore {
                    gold: t.gold.clone(),
                    pos_class: t.pos_class,
                    matched: t.matched.clone(),
                    wup: t.wup.to_f64(),
                })
                .collect(),
        }
    }
}

/// Scores each target against a prediction (`None` when ill-formed).
///
/// A target is compared with the predicted concepts that share its lemma
/// and part of speech, keeping the best similarity. Without such a concept,
/// the predicted concept aligned to the target's gold node by the Hard
/// SMATCH alignment is used (`alignment`, computed when not supplied).
/// Otherwise the target scores 0.
pub fn challenge_score<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    id: &str,
    pred: Option<&DrsGraph>,
    gold: &DrsGraph,
    alignment: Option<&Alignment>,
    targets: &[ChallengeTarget],
    sim: &C,
) -> ChallengeItemScore<S> {
    let zero = |t: &ChallengeTarget| TargetScore { gold: t.concept.clone(), pos_class: t.pos_class, matched: None, wup: S::zero() };
    let Some(pred) = pred else {
        return ChallengeItemScore { id: id.to_string(), targets: targets.iter().map(zero).collect() };
    };
    let computed;
    let alignment = match alignment {
        Some(a) => a,
        None => {
            computed = smatch::<S, _>(pred, gold, MatchMode::Hard, DEFAULT_RESTARTS, &ExactMatch).1;
            &computed
        }
    };

    let scored = targets
        .iter()
        .map(|t| {
            let same_lemma = pred.concepts().filter(|c| c.lemma == t.concept.lemma && c.pos == t.concept.pos);
            let aligned = || {
                gold.nodes()
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.concept == t.concept)
                    .filter_map(|(g, _)| alignment.pred_node_for(g))
                    .map(|p| pred.concept(p))
                    .collect::<Vec<_>>()
            };
            let mut candidates: Vec<&ConceptKey> = same_lemma.collect();
            if candidates.is_empty() {
                candidates = aligned();
            }
            best(&t.concept, candidates, sim).map_or_else(
                || zero(t),
                |(key, wup)| TargetScore { gold: t.concept.clone(), pos_class: t.pos_class, matched: Some(key), wup },
            )
        })
        .collect();
    ChallengeItemScore { id: id.to_string(), targets: scored }
}

/// Highest-scoring candidate; ties go to the smallest key so the result
/// does not depend on candidate order.
fn best<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    gold: &ConceptKey,
    candidates: Vec<&ConceptKey>,
    sim: &C,
) -> Option<(ConceptKey, S)> {
    let mut out: Option<(ConceptKey, S)> = None;
    for c in candidates {
        let w = sim.similarity(c, gold);
        let better = match &out {
            None => true,
            Some((k, b)) => w > *b || (w == *b && c < k),
        };
        if better {
            out = Some((c.clone(), w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbn::parse;
    use crate::scalar::Exact;

    fn key(s: &str) -> ConceptKey {
        s.parse().unwrap()
    }

    /// 1 for equal keys, 1/2 for same lemma, 1/4 otherwise.
    fn toy(a: &ConceptKey, b: &ConceptKey) -> Exact {
        if a == b {
            Exact::from_integer(1)
        } else if a.lemma == b.lemma {
            Exact::new(1, 2)
        } else {
            Exact::new(1, 4)
        }
    }

    #[test]
    fn lemma_first_then_alignment() {
        let gold = parse("person.n.01 see.v.01 Agent -1 Theme +1 hobby.n.03").unwrap();
        let targets = [ChallengeTarget::new("d1", key("hobby.n.03")), ChallengeTarget::new("d1", key("see.v.01"))];
        let pred = parse("person.n.01 watch.v.01 Agent -1 Theme +1 hobby.n.01 hobby.n.02").unwrap();
        let s = challenge_score::<Exact, _>("d1", Some(&pred), &gold, None, &targets, &toy);
        assert_eq!(s.targets[0].wup, Exact::new(1, 2));
        assert_eq!(s.targets[0].matched, Some(key("hobby.n.01")));
        // no `see` in the prediction: the aligned verb is used
        assert_eq!(s.targets[1].matched, Some(key("watch.v.01")));
        assert_eq!(s.targets[1].wup, Exact::new(1, 4));
    }

    #[test]
    fn perfect_and_ill_formed() {
        let gold = parse("hobby.n.03").unwrap();
        let targets = [ChallengeTarget::new("d", key("hobby.n.03"))];
        let s = challenge_score::<Exact, _>("d", Some(&gold), &gold, None, &targets, &toy);
        assert_eq!(s.targets[0].wup, Exact::from_integer(1));
        let s = challenge_score::<Exact, _>("d", None, &gold, None, &targets, &toy);
        assert_eq!(s.targets[0].wup, Exact::from_integer(0));
        assert_eq!(s.targets[0].matched, None);
    }

    #[test]
    fn order_of_predicted_concepts_does_not_matter() {
        let gold = parse("kite.n.04").unwrap();
        let targets = [ChallengeTarget::new("d", key("kite.n.04"))];
        let a = parse("kite.n.01 kite.n.02").unwrap();
        let b = parse("kite.n.02 kite.n.01").unwrap();
        let sa = challenge_score::<Exact, _>("d", Some(&a), &gold, None, &targets, &toy);
        let sb = challenge_score::<Exact, _>("d", Some(&b), &gold, None, &targets, &toy);
        assert_eq!(sa, sb);
    }
}
