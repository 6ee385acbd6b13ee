//! Normal and RASP prompt rendering and chat-format training export.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;
use crate::retrieval::CandidateConcept;
use crate::sbn::{parse, serialize, SbnError};

/// Opening of a RASP prompt; the concept block follows on the next line.
pub const RASP_PREAMBLE: &str = "Please parse the following text into Discourse Representation Structure, considering using the concepts based on the following glosses: ";

/// Precedes the source text in both modes.
pub const TEXT_PREFIX: &str = "Text to parse: ";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    /// Source text only.
    Normal,
    /// Retrieved concepts and glosses, then the source text.
    #[default]
    Rasp,
}

impl PromptMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptMode::Normal => "normal",
            PromptMode::Rasp => "rasp",
        }
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown prompt mode `{0}` (expected normal or rasp)")]
pub struct UnknownMode(pub String);

impl FromStr for PromptMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(PromptMode::Normal),
            "rasp" => Ok(PromptMode::Rasp),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Model,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// One dialogue: a single user turn, plus the gold answer in training data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: String,
    pub mode: PromptMode,
    pub messages: Vec<Message>,
    /// Gloss lines embedded in the user turn; empty in normal mode.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub concept_block: String,
}

impl PromptRecord {
    pub fn user(&self) -> Option<&str> {
        self.messages.iter().find(|m| m.role == Role::User).map(|m| m.content.as_str())
    }

    pub fn model(&self) -> Option<&str> {
        self.messages.iter().find(|m| m.role == Role::Model).map(|m| m.content.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PromptError {
    #[error("document {id} has no gold SBN")]
    MissingGold { id: String },
    #[error("gold SBN of {id} is ill-formed: {source}")]
    IllFormedGold {
        id: String,
        #[source]
        source: SbnError,
    },
}

/// `- lemma.pos.NN: gloss`, one line per candidate.
pub fn render_concept_block(candidates: &[CandidateConcept]) -> String {
    candidates.iter().map(|c| format!("- {}: {}", c.key, c.gloss)).collect::<Vec<_>>().join("\n")
}

/// The user turn for `text`. Candidates are ignored in normal mode.
pub fn build_prompt(id: &str, text: &str, mode: PromptMode, candidates: &[CandidateConcept]) -> PromptRecord {
    let (content, concept_block) = match mode {
        PromptMode::Normal => (format!("{TEXT_PREFIX}{text}"), String::new()),
        PromptMode::Rasp => {
            let block = render_concept_block(candidates);
            (format!("{RASP_PREAMBLE}\n{block}\n\n{TEXT_PREFIX}{text}"), block)
        }
    };
    PromptRecord { id: id.to_string(), mode, messages: vec![Message { role: Role::User, content }], concept_block }
}

/// Training dialogues: the prompt followed by the canonical single-line
/// gold SBN. RASP mode gives Train+Test data, normal mode the plain
/// training data used when retrieval is applied at test time only.
pub fn export_training<F>(documents: &[Document], mode: PromptMode, mut candidates: F) -> Result<Vec<PromptRecord>, PromptError>
where
    F: FnMut(&Document) -> Vec<CandidateConcept>,
{
    documents
        .iter()
        .map(|doc| {
            let gold = doc.gold_sbn.as_deref().ok_or_else(|| PromptError::MissingGold { id: doc.id.clone() })?;
            let graph = parse(gold).map_err(|source| PromptError::IllFormedGold { id: doc.id.clone(), source })?;
            let cands = if mode == PromptMode::Rasp { candidates(doc) } else { Vec::new() };
            let mut record = build_prompt(&doc.id, &doc.raw_text, mode, &cands);
            record.messages.push(Message { role: Role::Model, content: serialize(&graph) });
            Ok(record)
        })
        .collect()
}
