//! Concept retrieval: longest-first n-gram lookup of WordNet senses.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::concept::{ConceptKey, Pos};
use crate::wordnet::WordnetStore;

/// Longest window tried.
pub const MAX_NGRAM: usize = 4;

/// Closed-class words skipped as single-token windows.
pub const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "across", "after", "again", "against", "all", "along", "also", "although", "am", "among",
    "an", "and", "another", "any", "anybody", "anyone", "anything", "are", "around", "as", "at", "be", "because",
    "been", "before", "behind", "being", "below", "beneath", "beside", "besides", "between", "beyond", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "either", "enough", "every",
    "everybody", "everyone", "everything", "few", "for", "from", "had", "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "inside", "into", "is", "it", "its", "itself",
    "least", "less", "many", "may", "me", "might", "mine", "more", "most", "much", "must", "my", "myself", "near",
    "neither", "no", "nobody", "none", "nor", "not", "nothing", "of", "off", "on", "once", "one", "onto", "or",
    "other", "our", "ours", "ourselves", "out", "outside", "over", "own", "past", "per", "same", "shall", "she",
    "should", "since", "so", "some", "somebody", "someone", "something", "such", "than", "that", "the", "their",
    "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "though", "through", "till",
    "to", "too", "toward", "towards", "under", "unless", "until", "up", "upon", "us", "very", "via", "was", "we",
    "were", "what", "whatever", "when", "where", "whether", "which", "while", "who", "whom", "whose", "why", "will",
    "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself", "yourselves",
];

/// Token positions `start..end` of a matched window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextSpan {
    pub tokens: Vec<String>,
    pub start: usize,
    pub end: usize,
}

impl TextSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// True when `other` lies inside this span and is not the same span.
    pub fn strictly_contains(&self, other: &TextSpan) -> bool {
        self.start <= other.start && other.end <= self.end && self.len() > other.len()
    }
}

/// One retrieved sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateConcept {
    pub span: TextSpan,
    pub key: ConceptKey,
    pub gloss: String,
}

/// JSONL line for a retrieved candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub id: String,
    pub span: [usize; 2],
    pub concept: ConceptKey,
    pub gloss: String,
}

impl CandidateRecord {
    pub fn new(id: &str, c: &CandidateConcept) -> Self {
        CandidateRecord { id: id.to_string(), span: [c.span.start, c.span.end], concept: c.key.clone(), gloss: c.gloss.clone() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    /// Keep at most this many candidates (after deduplication), in order.
    pub max_candidates: Option<usize>,
}

/// Whitespace split with leading and trailing punctuation detached into
/// one token per character, lowercased. Inner hyphens and apostrophes stay.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| !c.is_alphanumeric()).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|c| c.to_string()));
            continue;
        }
        let trail = chars.iter().rev().take_while(|c| !c.is_alphanumeric()).count();
        out.extend(chars[..lead].iter().map(|c| c.to_string()));
        out.push(chars[lead..chars.len() - trail].iter().collect::<String>().to_lowercase());
        out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    out
}

fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

/// Indexed lemmas a window may stand for, per part of speech.
fn lemmas(store: &WordnetStore, window: &[String]) -> Vec<(Pos, Vec<String>)> {
    let joined = window.join("_");
    Pos::ALL
        .iter()
        .map(|&pos| (pos, store.morphy(&joined, pos)))
        .filter(|(_, forms)| !forms.is_empty())
        .collect()
}

/// Senses for every WordNet lemma found in `text`, longest windows first.
///
/// A matched window claims its tokens so shorter windows inside it are not
/// looked up again. Candidates come out ordered by span start, part of
/// speech (n, v, a, r), base-form order and sense number, deduplicated.
pub fn retrieve(text: &str, store: &WordnetStore, config: &RetrievalConfig) -> Vec<CandidateConcept> {
    let tokens = tokenize(text);
    let mut claimed = vec![false; tokens.len()];
    let mut matches: Vec<(usize, Pos, usize, CandidateConcept)> = Vec::new();
    for n in (1..=MAX_NGRAM).rev() {
        for start in 0..tokens.len().saturating_sub(n - 1) {
            let window = &tokens[start..start + n];
            if claimed[start..start + n].iter().any(|&c| c) || window.iter().any(|t| is_punctuation(t)) {
                continue;
            }
            if n == 1 && is_stop_word(&window[0]) {
                continue;
            }
            let found = lemmas(store, window);
            if found.is_empty() {
                continue;
            }
            claimed[start..start + n].iter_mut().for_each(|c| *c = true);
            let span = TextSpan { tokens: window.to_vec(), start, end: start + n };
            for (pos, forms) in found {
                for (rank, lemma) in forms.iter().enumerate() {
                    for (i, synset) in store.synsets_of(lemma, pos).into_iter().enumerate() {
                        let key = ConceptKey::new(lemma.clone(), pos, (i + 1) as u16);
                        let candidate = CandidateConcept { span: span.clone(), key, gloss: synset.gloss.clone() };
                        matches.push((start, pos, rank, candidate));
                    }
                }
            }
        }
    }
    // Stable: senses of one lemma are already in order.
    matches.sort_by_key(|(start, pos, rank, _)| (*start, *pos, *rank));
    let mut out = dedupe(matches.into_iter().map(|m| m.3).collect());
    if let Some(cap) = config.max_candidates {
        out.truncate(cap);
    }
    out
}

/// Drops repeated concept keys, keeping the earliest span.
pub fn dedupe(mut candidates: Vec<CandidateConcept>) -> Vec<CandidateConcept> {
    let mut earliest: std::collections::HashMap<ConceptKey, usize> = std::collections::HashMap::new();
    for c in &candidates {
        let e = earliest.entry(c.key.clone()).or_insert(c.span.start);
        *e = (*e).min(c.span.start);
    }
    let mut seen = HashSet::new();
    candidates.retain(|c| earliest[&c.key] == c.span.start && seen.insert(c.key.clone()));
    candidates
}
