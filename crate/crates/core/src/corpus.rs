//! Gold corpus ingestion, splits and challenge-set targets.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::{ConceptKey, PosClass};
use crate::sbn::{concept_bag, parse, serialize, ConceptBag, DrsGraph, SbnError};

/// Default name of the challenge target sidecar at the corpus root.
pub const TARGETS_FILE: &str = "challenge_targets.tsv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Standard,
    Challenge,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Dev, Split::Standard, Split::Challenge];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Standard => "standard",
            Split::Challenge => "challenge",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL.into_iter().find(|x| x.as_str() == s.trim()).ok_or_else(|| CorpusError::UnknownSplit(s.to_string()))
    }
}

/// One text with its gold meaning representation. Serializes as a manifest
/// line `{"id","split","text","sbn"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub split: Split,
    #[serde(rename = "text")]
    pub raw_text: String,
    /// Canonical single-line SBN; `None` only in hand-made manifests.
    #[serde(rename = "sbn")]
    pub gold_sbn: Option<String>,
}

impl Document {
    pub fn gold(&self) -> Option<Result<DrsGraph, SbnError>> {
        self.gold_sbn.as_deref().map(parse)
    }
}

/// An out-of-distribution concept the challenge set expects in a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChallengeTarget {
    pub doc_id: String,
    pub concept: ConceptKey,
    pub pos_class: PosClass,
}

impl ChallengeTarget {
    pub fn new(doc_id: impl Into<String>, concept: ConceptKey) -> Self {
        let pos_class = PosClass::of(concept.pos);
        ChallengeTarget { doc_id: doc_id.into(), concept, pos_class }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("document {id}: no raw text at {}", path.display())]
    MissingRaw { id: String, path: PathBuf },
    #[error("document {id}: no gold SBN at {}", path.display())]
    MissingGold { id: String, path: PathBuf },
    #[error("document {id}: gold SBN is ill-formed: {source}")]
    GoldIllFormed {
        id: String,
        #[source]
        source: SbnError,
    },
    #[error("challenge target {concept} does not occur in the gold graph of {doc_id}")]
    TargetNotInGold { doc_id: String, concept: ConceptKey },
    #[error("{}:{line}: {reason}", path.display())]
    MalformedTargets { path: PathBuf, line: usize, reason: String },
    #[error("unknown split `{0}` (expected train, dev, standard or challenge)")]
    UnknownSplit(String),
    #[error("duplicate document id {0}")]
    DuplicateId(String),
    #[error("reading {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// File names inside each document directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub raw_file: String,
    pub gold_file: String,
    pub targets_file: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { raw_file: "en.raw".into(), gold_file: "en.drs.sbn".into(), targets_file: TARGETS_FILE.into() }
    }
}

/// Loaded documents (sorted by split, then id) and challenge targets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    targets: Vec<ChallengeTarget>,
}

impl Corpus {
    /// Checks ids are unique, gold is well-formed and every target occurs
    /// in its document's gold graph. Gold SBN is stored canonically.
    pub fn new(mut documents: Vec<Document>, targets: Vec<ChallengeTarget>) -> Result<Self, CorpusError> {
        documents.sort_by(|a, b| (a.split, &a.id).cmp(&(b.split, &b.id)));
        let mut seen = HashSet::new();
        let mut bags: BTreeMap<&str, ConceptBag> = BTreeMap::new();
        for doc in &mut documents {
            if !seen.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
            if let Some(gold) = &doc.gold_sbn {
                let graph = parse(gold).map_err(|source| CorpusError::GoldIllFormed { id: doc.id.clone(), source })?;
                doc.gold_sbn = Some(serialize(&graph));
            }
        }
        for doc in &documents {
            if let Some(Ok(g)) = doc.gold() {
                bags.insert(&doc.id, concept_bag(&g));
            }
        }
        for t in &targets {
            if bags.get(t.doc_id.as_str()).is_none_or(|b| b.count(&t.concept) == 0) {
                return Err(CorpusError::TargetNotInGold { doc_id: t.doc_id.clone(), concept: t.concept.clone() });
            }
        }
        Ok(Corpus { documents, targets })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn targets(&self) -> &[ChallengeTarget] {
        &self.targets
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Documents of one split, sorted by id.
    pub fn split(&self, split: Split) -> Vec<&Document> {
        self.documents.iter().filter(|d| d.split == split).collect()
    }

    pub fn split_named(&self, name: &str) -> Result<Vec<&Document>, CorpusError> {
        Ok(self.split(name.parse()?))
    }

    pub fn sizes(&self) -> BTreeMap<Split, usize> {
        let mut out: BTreeMap<Split, usize> = Split::ALL.iter().map(|&s| (s, 0)).collect();
        for d in &self.documents {
            *out.entry(d.split).or_default() += 1;
        }
        out
    }

    pub fn targets_for<'a>(&'a self, doc_id: &'a str) -> impl Iterator<Item = &'a ChallengeTarget> + 'a {
        self.targets.iter().filter(move |t| t.doc_id == doc_id)
    }

    /// Writes the manifest, one document per line.
    pub fn write_manifest(&self, writer: impl Write) -> std::io::Result<()> {
        crate::jsonl::write_jsonl(writer, &self.documents)
    }
}

/// Loads `<root>/<split>/<id>/{raw,gold}` for every split directory present,
/// plus the target sidecar when it exists. Document ids may nest (`p00/d0004`):
/// every leaf directory under a split is one document.
pub fn ingest(root: &Path, config: &IngestConfig) -> Result<Corpus, CorpusError> {
    let mut dirs = Vec::new();
    for split in Split::ALL {
        let dir = root.join(split.as_str());
        if dir.is_dir() {
            leaf_dirs(&dir, &dir, split, &mut dirs)?;
        }
    }
    // Collected in directory order so the reported error does not depend on scheduling.
    let loaded: Vec<Result<Document, CorpusError>> =
        dirs.par_iter().map(|(split, id, dir)| load_document(*split, id, dir, config)).collect();
    let documents = loaded.into_iter().collect::<Result<Vec<_>, _>>()?;
    let targets_path = root.join(&config.targets_file);
    let targets = if targets_path.is_file() { read_targets(&targets_path)? } else { Vec::new() };
    Corpus::new(documents, targets)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

fn leaf_dirs(base: &Path, dir: &Path, split: Split, out: &mut Vec<(Split, String, PathBuf)>) -> Result<(), CorpusError> {
    let mut subdirs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_dir() {
            subdirs.push(path);
        }
    }
    if subdirs.is_empty() && dir != base {
        let id = dir.strip_prefix(base).unwrap_or(dir).components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        out.push((split, id, dir.to_path_buf()));
    }
    subdirs.sort();
    for sub in subdirs {
        leaf_dirs(base, &sub, split, out)?;
    }
    Ok(())
}

fn load_document(split: Split, id: &str, dir: &Path, config: &IngestConfig) -> Result<Document, CorpusError> {
    let raw_path = dir.join(&config.raw_file);
    let gold_path = dir.join(&config.gold_file);
    let raw = fs::read_to_string(&raw_path).map_err(|_| CorpusError::MissingRaw { id: id.into(), path: raw_path.clone() })?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(CorpusError::MissingRaw { id: id.into(), path: raw_path });
    }
    let gold = fs::read_to_string(&gold_path).map_err(|_| CorpusError::MissingGold { id: id.into(), path: gold_path })?;
    let graph = parse(&gold).map_err(|source| CorpusError::GoldIllFormed { id: id.into(), source })?;
    Ok(Document { id: id.into(), split, raw_text: raw.to_string(), gold_sbn: Some(serialize(&graph)) })
}

/// Parses `doc_id<TAB>concept<TAB>pos_class` lines; blank lines and lines
/// starting with `#` are skipped.
pub fn read_targets(path: &Path) -> Result<Vec<ChallengeTarget>, CorpusError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_targets(&text).map_err(|(line, reason)| CorpusError::MalformedTargets { path: path.to_path_buf(), line, reason })
}

pub fn parse_targets(text: &str) -> Result<Vec<ChallengeTarget>, (usize, String)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [doc_id, concept, class] = fields[..] else {
            return Err((i + 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let concept: ConceptKey = concept.trim().parse().map_err(|e| (i + 1, format!("{e}")))?;
        let class: PosClass = class.parse().map_err(|_| (i + 1, format!("unknown class `{class}`")))?;
        if class != PosClass::of(concept.pos) {
            return Err((i + 1, format!("{concept} is not a {class}")));
        }
        out.push(ChallengeTarget::new(doc_id.trim(), concept));
    }
    Ok(out)
}

pub fn write_targets(mut writer: impl Write, targets: &[ChallengeTarget]) -> std::io::Result<()> {
    for t in targets {
        writeln!(writer, "{}\t{}\t{}", t.doc_id, t.concept, t.pos_class)?;
    }
    writer.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    /// The target is its lemma's first sense.
    FirstSense,
    /// The target occurs in the training split.
    Seen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditWarning {
    pub doc_id: String,
    pub concept: ConceptKey,
    pub kind: AuditKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checked: usize,
    pub warnings: Vec<AuditWarning>,
}

fn train_concepts(corpus: &Corpus) -> HashSet<ConceptKey> {
    corpus
        .split(Split::Train)
        .iter()
        .filter_map(|d| d.gold().and_then(Result::ok))
        .flat_map(|g| g.concepts().cloned().collect::<Vec<_>>())
        .collect()
}

/// Checks that each target is unseen in training and not a first sense.
pub fn ood_audit(corpus: &Corpus) -> AuditReport {
    let seen = train_concepts(corpus);
    let mut warnings = Vec::new();
    for t in corpus.targets() {
        let warn = |kind| AuditWarning { doc_id: t.doc_id.clone(), concept: t.concept.clone(), kind };
        if t.concept.sense == 1 {
            warnings.push(warn(AuditKind::FirstSense));
        }
        if seen.contains(&t.concept) {
            warnings.push(warn(AuditKind::Seen));
        }
    }
    AuditReport { checked: corpus.targets().len(), warnings }
}

/// Targets derived from the rules when no sidecar exists: every distinct
/// challenge-split concept that is not a first sense and never occurs in
/// the training split.
pub fn recover_targets(corpus: &Corpus) -> Vec<ChallengeTarget> {
    let seen = train_concepts(corpus);
    let mut out = Vec::new();
    for doc in corpus.split(Split::Challenge) {
        let Some(Ok(g)) = doc.gold() else { continue };
        let mut local = HashSet::new();
        for c in g.concepts() {
            if c.sense != 1 && !seen.contains(c) && local.insert(c.clone()) {
                out.push(ChallengeTarget::new(doc.id.clone(), c.clone()));
            }
        }
    }
    out
}
