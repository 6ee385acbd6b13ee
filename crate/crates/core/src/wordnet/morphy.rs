//! Rule-plus-exception lemmatization.

use super::WordnetStore;
use crate::concept::Pos;

/// One suffix detachment rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphyRule {
    pub pos: Pos,
    pub suffix_from: &'static str,
    pub suffix_to: &'static str,
}

const fn rule(pos: Pos, suffix_from: &'static str, suffix_to: &'static str) -> MorphyRule {
    MorphyRule { pos, suffix_from, suffix_to }
}

pub const MORPHY_RULES: &[MorphyRule] = &[
    rule(Pos::Noun, "s", ""),
    rule(Pos::Noun, "ses", "s"),
    rule(Pos::Noun, "xes", "x"),
    rule(Pos::Noun, "zes", "z"),
    rule(Pos::Noun, "ches", "ch"),
    rule(Pos::Noun, "shes", "sh"),
    rule(Pos::Noun, "men", "man"),
    rule(Pos::Noun, "ies", "y"),
    rule(Pos::Verb, "s", ""),
    rule(Pos::Verb, "ies", "y"),
    rule(Pos::Verb, "es", "e"),
    rule(Pos::Verb, "es", ""),
    rule(Pos::Verb, "ed", "e"),
    rule(Pos::Verb, "ed", ""),
    rule(Pos::Verb, "ing", "e"),
    rule(Pos::Verb, "ing", ""),
    rule(Pos::Adj, "er", ""),
    rule(Pos::Adj, "est", ""),
    rule(Pos::Adj, "er", "e"),
    rule(Pos::Adj, "est", "e"),
];

impl MorphyRule {
    /// The detached form, or `None` when the suffix does not match or the
    /// result would be empty.
    pub fn apply(&self, word: &str) -> Option<String> {
        let stem = word.strip_suffix(self.suffix_from)?;
        let out = format!("{stem}{}", self.suffix_to);
        (!out.is_empty()).then_some(out)
    }
}

/// Every form reachable by repeatedly applying the rules of `pos`, in
/// breadth-first order, without checking the index.
fn detachments(word: &str, pos: Pos) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    let mut frontier = vec![word.to_string()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for form in &frontier {
            for r in MORPHY_RULES.iter().filter(|r| r.pos == pos) {
                if let Some(out) = r.apply(form) {
                    if out != word && !seen.contains(&out) {
                        seen.push(out.clone());
                        next.push(out);
                    }
                }
            }
        }
        frontier = next;
    }
    seen
}

fn push_unique(out: &mut Vec<String>, form: String) {
    if !out.contains(&form) {
        out.push(form);
    }
}

impl WordnetStore {
    /// Candidate base forms of `word` for `pos`, all of them indexed lemmas.
    ///
    /// Order: exception-list hits, then forms produced by the detachment
    /// rules, then `word` itself. Multiword forms (underscore-joined) are
    /// lemmatized on their last token first; the exception list is then
    /// consulted for the whole string.
    pub fn morphy(&self, word: &str, pos: Pos) -> Vec<String> {
        let mut out = Vec::new();
        if word.is_empty() {
            return out;
        }
        let indexed = |form: &str| self.is_indexed(form, pos);

        if let Some((prefix, last)) = word.rsplit_once('_') {
            let mut bases: Vec<String> = self.exceptions(last, pos).to_vec();
            bases.extend(detachments(last, pos));
            for base in bases {
                let form = format!("{prefix}_{base}");
                if indexed(&form) {
                    push_unique(&mut out, form);
                }
            }
            for base in self.exceptions(word, pos) {
                if indexed(base) {
                    push_unique(&mut out, base.clone());
                }
            }
        } else {
            for base in self.exceptions(word, pos) {
                if indexed(base) {
                    push_unique(&mut out, base.clone());
                }
            }
            for form in detachments(word, pos) {
                if indexed(&form) {
                    push_unique(&mut out, form);
                }
            }
        }
        if indexed(word) {
            push_unique(&mut out, word.to_string());
        }
        out
    }
}
