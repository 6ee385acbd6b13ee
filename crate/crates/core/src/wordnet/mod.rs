//! Read-only access to the WordNet 3.0 database files.
//!
//! [`WordnetStore::load`] parses `index.*`, `data.*` and `*.exc` from a WNDB
//! directory. After loading the store is immutable: lemma lookups,
//! lemmatization ([`WordnetStore::morphy`]) and taxonomy queries
//! ([`WordnetStore::depth`], [`WordnetStore::lcs`], [`WordnetStore::wup`])
//! only read precomputed tables, so a store can be shared freely across
//! threads.

mod db;
mod morphy;
mod similarity;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::concept::{ConceptKey, Pos};

pub use morphy::{MorphyRule, MORPHY_RULES};
pub use similarity::TaxonomyNode;

/// Synset type as written in the data files; `s` marks satellite adjectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SynsetType {
    Noun,
    Verb,
    Adj,
    AdjSatellite,
    Adv,
}

impl SynsetType {
    pub fn from_char(c: char) -> Option<SynsetType> {
        match c {
            'n' => Some(SynsetType::Noun),
            'v' => Some(SynsetType::Verb),
            'a' => Some(SynsetType::Adj),
            's' => Some(SynsetType::AdjSatellite),
            'r' => Some(SynsetType::Adv),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            SynsetType::Noun => 'n',
            SynsetType::Verb => 'v',
            SynsetType::Adj => 'a',
            SynsetType::AdjSatellite => 's',
            SynsetType::Adv => 'r',
        }
    }

    pub fn family(self) -> Pos {
        match self {
            SynsetType::Noun => Pos::Noun,
            SynsetType::Verb => Pos::Verb,
            SynsetType::Adj | SynsetType::AdjSatellite => Pos::Adj,
            SynsetType::Adv => Pos::Adv,
        }
    }
}

/// Stable synset identifier: synset type plus byte offset in its data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub pos: SynsetType,
    pub offset: u32,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.as_char())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    /// Lowercase, underscore-joined, in data-file order.
    pub lemmas: Vec<String>,
    /// Definition text with the quoted usage examples removed.
    pub gloss: String,
    /// Hypernym and instance-hypernym targets.
    pub hypernyms: Vec<SynsetId>,
    /// Lemma -> 1-based sense number of this synset in that lemma's index entry.
    pub sense_labels: BTreeMap<String, u16>,
}

impl Synset {
    /// Concept key through the synset's first lemma.
    pub fn key(&self) -> ConceptKey {
        let lemma = &self.lemmas[0];
        ConceptKey::new(lemma.clone(), self.id.pos.family(), self.sense_labels.get(lemma).copied().unwrap_or(1))
    }

    /// Key for one of the synset's lemmas, if the lemma belongs to it.
    pub fn key_for(&self, lemma: &str) -> Option<ConceptKey> {
        self.sense_labels
            .get(lemma)
            .map(|&sense| ConceptKey::new(lemma, self.id.pos.family(), sense))
    }

    /// Conventional `lemma.t.NN` name, where `t` keeps the satellite marker.
    pub fn name(&self) -> String {
        let lemma = &self.lemmas[0];
        format!("{}.{}.{:02}", lemma, self.id.pos.as_char(), self.sense_labels.get(lemma).copied().unwrap_or(1))
    }
}

#[derive(Debug, Error)]
pub enum WordnetError {
    #[error("missing WordNet file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}:{line}: {reason}", file.display())]
    MalformedLine { file: PathBuf, line: usize, reason: String },
    #[error("reading {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
}

pub struct WordnetStore {
    synsets: Vec<Synset>,
    positions: HashMap<(Pos, u32), usize>,
    /// Per family: lemma -> synset positions in sense order.
    index: [HashMap<String, Vec<usize>>; 4],
    /// Per family: inflected form -> base forms.
    exceptions: [HashMap<String, Vec<String>>; 4],
    parents: Vec<Vec<usize>>,
    min_depth: Vec<u32>,
    max_depth: Vec<u32>,
}

impl fmt::Debug for WordnetStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordnetStore").field("synsets", &self.synsets.len()).finish_non_exhaustive()
    }
}

impl WordnetStore {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, WordnetError> {
        db::load(dir.as_ref())
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.iter()
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.position(id).map(|i| &self.synsets[i])
    }

    pub fn is_indexed(&self, lemma: &str, pos: Pos) -> bool {
        self.index[pos.index()].contains_key(lemma)
    }

    /// Synsets of `lemma` in sense-number order; empty when not indexed.
    pub fn synsets_of(&self, lemma: &str, pos: Pos) -> Vec<&Synset> {
        self.index[pos.index()]
            .get(lemma)
            .map(|positions| positions.iter().map(|&i| &self.synsets[i]).collect())
            .unwrap_or_default()
    }

    /// Base forms listed for `word` in the exception file of `pos`.
    pub fn exceptions(&self, word: &str, pos: Pos) -> &[String] {
        self.exceptions[pos.index()].get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn resolve(&self, key: &ConceptKey) -> Option<&Synset> {
        let positions = self.index[key.pos.index()].get(&key.lemma)?;
        let i = *positions.get(usize::from(key.sense).checked_sub(1)?)?;
        Some(&self.synsets[i])
    }

    fn position(&self, id: SynsetId) -> Option<usize> {
        self.positions.get(&(id.pos.family(), id.offset)).copied()
    }
}
