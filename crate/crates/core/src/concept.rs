//! Concept keys of the form `lemma.pos.NN`, shared by WordNet lookups and SBN.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Part-of-speech family. Satellite adjectives fold into [`Pos::Adj`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
        }
    }

    /// Accepts `n`, `v`, `a`, `s` (satellite, folded to `a`) and `r`.
    pub fn from_char(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' | 's' => Some(Pos::Adj),
            'r' => Some(Pos::Adv),
            _ => None,
        }
    }

    /// Suffix of the WordNet database files for this family.
    pub fn file_suffix(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Coarse class used when reporting out-of-distribution concepts:
/// adjectives and adverbs are merged into modifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosClass {
    Noun,
    Verb,
    Modifier,
}

impl PosClass {
    pub const ALL: [PosClass; 3] = [PosClass::Noun, PosClass::Verb, PosClass::Modifier];

    pub fn of(pos: Pos) -> PosClass {
        match pos {
            Pos::Noun => PosClass::Noun,
            Pos::Verb => PosClass::Verb,
            Pos::Adj | Pos::Adv => PosClass::Modifier,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PosClass::Noun => "noun",
            PosClass::Verb => "verb",
            PosClass::Modifier => "modifier",
        }
    }
}

impl fmt::Display for PosClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosClass {
    type Err = ConceptKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noun" | "n" => Ok(PosClass::Noun),
            "verb" | "v" => Ok(PosClass::Verb),
            "modifier" | "modifiers" | "adj" | "adv" | "a" | "r" => Ok(PosClass::Modifier),
            _ => Err(ConceptKeyError::Pos(s.to_string())),
        }
    }
}

/// A sense-tagged concept such as `harrier.n.03`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptKey {
    pub lemma: String,
    pub pos: Pos,
    pub sense: u16,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConceptKeyError {
    #[error("`{0}` is not of the form lemma.pos.NN")]
    Shape(String),
    #[error("`{0}` has an unknown part of speech")]
    Pos(String),
    #[error("`{0}` has a sense number outside 1..=999")]
    Sense(String),
}

impl ConceptKey {
    pub fn new(lemma: impl Into<String>, pos: Pos, sense: u16) -> Self {
        ConceptKey { lemma: lemma.into(), pos, sense }
    }

    /// True when `token` has the `lemma.pos.N{1,3}` shape, without allocating.
    pub fn looks_like(token: &str) -> bool {
        split_key(token).is_some_and(|(lemma, pos, sense)| {
            !lemma.is_empty()
                && matches!(pos, "n" | "v" | "a" | "r")
                && (1..=3).contains(&sense.len())
                && sense.bytes().all(|b| b.is_ascii_digit())
                && sense.bytes().any(|b| b != b'0')
        })
    }
}

fn split_key(s: &str) -> Option<(&str, &str, &str)> {
    let (rest, sense) = s.rsplit_once('.')?;
    let (lemma, pos) = rest.rsplit_once('.')?;
    Some((lemma, pos, sense))
}

impl FromStr for ConceptKey {
    type Err = ConceptKeyError;

    /// Lemmas are lowercased and `~` is normalized to `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lemma, pos, sense) = split_key(s).ok_or_else(|| ConceptKeyError::Shape(s.to_string()))?;
        if lemma.is_empty() || lemma.chars().any(char::is_whitespace) {
            return Err(ConceptKeyError::Shape(s.to_string()));
        }
        let pos = match pos {
            "n" => Pos::Noun,
            "v" => Pos::Verb,
            "a" => Pos::Adj,
            "r" => Pos::Adv,
            _ => return Err(ConceptKeyError::Pos(s.to_string())),
        };
        if sense.is_empty() || sense.len() > 3 || !sense.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ConceptKeyError::Sense(s.to_string()));
        }
        let sense: u16 = sense.parse().map_err(|_| ConceptKeyError::Sense(s.to_string()))?;
        if sense == 0 {
            return Err(ConceptKeyError::Sense(s.to_string()));
        }
        Ok(ConceptKey { lemma: lemma.to_lowercase().replace('~', "_"), pos, sense })
    }
}

impl fmt::Display for ConceptKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{:02}", self.lemma, self.pos, self.sense)
    }
}

impl Serialize for ConceptKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConceptKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
