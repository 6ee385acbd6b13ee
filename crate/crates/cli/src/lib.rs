//! File-staged pipeline behind the `rasp` binary.
//!
//! Each stage reads the previous stage's file from the output directory and
//! writes its own, so inference survives interruptions and metrics can be
//! recomputed without calling the model again:
//!
//! ```text
//! ingest      -> manifest.jsonl, challenge_targets.tsv
//! retrieve    -> candidates.jsonl
//! prompt      -> prompts.jsonl
//! infer       -> predictions.jsonl (appended, resumable)
//! score       -> report.json, table.txt
//! export-train -> train.jsonl
//! ```

pub mod settings;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use clap::{Parser, Subcommand};
use futures::StreamExt;
use rasp_core::concept::ConceptKey;
use rasp_core::corpus::{self, recover_targets, Corpus, CorpusError, Document, IngestConfig, TARGETS_FILE};
use rasp_core::jsonl::{read_jsonl, write_jsonl, JsonlError};
use rasp_core::metrics::{aggregate, score_document, DocumentScore};
use rasp_core::prompting::{build_prompt, export_training, PromptMode, PromptRecord};
use rasp_core::retrieval::{retrieve, CandidateConcept, RetrievalConfig, TextSpan};
use rasp_core::{ScoreReport, WordnetStore};
use rasp_llm::{Client, LlmError, Prediction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use settings::{GlobalArgs, Settings};

pub const MANIFEST: &str = "manifest.jsonl";
pub const CANDIDATES: &str = "candidates.jsonl";
pub const PROMPTS: &str = "prompts.jsonl";
pub const PREDICTIONS: &str = "predictions.jsonl";
pub const REPORT: &str = "report.json";
pub const TABLE: &str = "table.txt";
pub const TRAIN: &str = "train.jsonl";

#[derive(Debug, Parser)]
#[command(name = "rasp", version, about = "Retrieval-augmented semantic parsing pipeline")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a gold corpus into manifest.jsonl.
    Ingest {
        #[arg(long, default_value = "en.raw")]
        raw_file: String,
        #[arg(long, default_value = "en.drs.sbn")]
        gold_file: String,
        /// Without a target sidecar, derive challenge targets from the
        /// unseen-in-train and not-first-sense rules.
        #[arg(long)]
        recover_targets: bool,
    },
    /// Retrieve WordNet concepts for every document of a split.
    Retrieve,
    /// Render normal or RASP prompts for a split.
    Prompt,
    /// Send prompts to the endpoint; already answered ids are skipped.
    Infer,
    /// Score predictions against gold.
    Score,
    /// Write chat-format training data for the train split.
    ExportTrain,
    /// Check challenge targets against the training split.
    Audit,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    /// Invalid content in the inputs: exit code 1.
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    /// Configuration or I/O problem: exit code 2.
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    /// The inference endpoint failed: exit code 3.
    pub fn endpoint(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    pub fn code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } | CorpusError::UnknownSplit(_) => CliError::config(e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::config(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn write_lines<'a, T: Serialize + 'a>(path: &Path, items: impl IntoIterator<Item = &'a T>) -> Result<(), CliError> {
    write_jsonl(create(path)?, items).map_err(|e| io_error(path, e))
}

fn read_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| match e {
        JsonlError::Io(e) => io_error(path, e),
        e => CliError::validation(format!("{}: {e}", path.display())),
    })
}

/// Retrieved concepts of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateList {
    pub id: String,
    pub candidates: Vec<CandidateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEntry {
    pub span: [usize; 2],
    pub concept: ConceptKey,
    pub gloss: String,
}

impl From<&CandidateConcept> for CandidateEntry {
    fn from(c: &CandidateConcept) -> Self {
        CandidateEntry { span: [c.span.start, c.span.end], concept: c.key.clone(), gloss: c.gloss.clone() }
    }
}

impl CandidateEntry {
    fn to_candidate(&self) -> CandidateConcept {
        let span = TextSpan { tokens: Vec::new(), start: self.span[0], end: self.span[1] };
        CandidateConcept { span, key: self.concept.clone(), gloss: self.gloss.clone() }
    }
}

/// Runs one subcommand; `env` supplies environment variables.
pub fn run(cli: Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.global, env)?;
    match cli.command {
        Command::Ingest { raw_file, gold_file, recover_targets } => {
            let config = IngestConfig { raw_file, gold_file, ..IngestConfig::default() };
            cmd_ingest(&settings, &config, recover_targets)
        }
        Command::Retrieve => cmd_retrieve(&settings),
        Command::Prompt => cmd_prompt(&settings),
        Command::Infer => cmd_infer(&settings),
        Command::Score => cmd_score(&settings).map(|r| print!("{}", r.table())),
        Command::ExportTrain => cmd_export_train(&settings),
        Command::Audit => cmd_audit(&settings),
    }
}

fn load_wordnet(settings: &Settings) -> Result<WordnetStore, CliError> {
    let dir = settings.wordnet_dir()?;
    WordnetStore::load(dir).map_err(|e| CliError::config(format!("WordNet: {e}")))
}

/// Manifest plus target sidecar from the output directory.
pub fn load_corpus(out: &Path) -> Result<Corpus, CliError> {
    let documents: Vec<Document> = read_lines(&out.join(MANIFEST))?;
    let targets_path = out.join(TARGETS_FILE);
    let targets = if targets_path.is_file() { corpus::read_targets(&targets_path)? } else { Vec::new() };
    Ok(Corpus::new(documents, targets)?)
}

fn split_docs<'a>(corpus: &'a Corpus, settings: &Settings) -> Result<Vec<&'a Document>, CliError> {
    Ok(corpus.split_named(&settings.split)?)
}

pub fn cmd_ingest(settings: &Settings, config: &IngestConfig, recover: bool) -> Result<(), CliError> {
    let mut corpus = corpus::ingest(settings.corpus_root()?, config)?;
    if recover && corpus.targets().is_empty() {
        let targets = recover_targets(&corpus);
        corpus = Corpus::new(corpus.documents().to_vec(), targets)?;
    }
    let manifest = settings.out.join(MANIFEST);
    let mut w = create(&manifest)?;
    corpus.write_manifest(&mut w).map_err(|e| io_error(&manifest, e))?;
    let targets = settings.out.join(TARGETS_FILE);
    corpus::write_targets(create(&targets)?, corpus.targets()).map_err(|e| io_error(&targets, e))?;
    let sizes: Vec<String> = corpus.sizes().iter().map(|(s, n)| format!("{s} {n}")).collect();
    eprintln!("ingested {} ({} challenge targets)", sizes.join(", "), corpus.targets().len());
    Ok(())
}

pub fn cmd_retrieve(settings: &Settings) -> Result<(), CliError> {
    let corpus = load_corpus(&settings.out)?;
    let docs = split_docs(&corpus, settings)?;
    let store = load_wordnet(settings)?;
    let config = RetrievalConfig { max_candidates: settings.max_candidates };
    let lists: Vec<CandidateList> = docs
        .par_iter()
        .map(|d| CandidateList {
            id: d.id.clone(),
            candidates: retrieve(&d.raw_text, &store, &config).iter().map(CandidateEntry::from).collect(),
        })
        .collect();
    write_lines(&settings.out.join(CANDIDATES), &lists)?;
    eprintln!("retrieved concepts for {} documents", lists.len());
    Ok(())
}

pub fn cmd_prompt(settings: &Settings) -> Result<(), CliError> {
    let corpus = load_corpus(&settings.out)?;
    let docs = split_docs(&corpus, settings)?;
    let candidates: HashMap<String, Vec<CandidateConcept>> = match settings.mode {
        PromptMode::Normal => HashMap::new(),
        PromptMode::Rasp => read_lines::<CandidateList>(&settings.out.join(CANDIDATES))?
            .into_iter()
            .map(|l| (l.id, l.candidates.iter().map(CandidateEntry::to_candidate).collect()))
            .collect(),
    };
    let mut records = Vec::with_capacity(docs.len());
    for d in docs {
        let cands = match settings.mode {
            PromptMode::Normal => &[][..],
            PromptMode::Rasp => candidates
                .get(&d.id)
                .ok_or_else(|| CliError::validation(format!("no retrieved concepts for {}; run `rasp retrieve` for this split", d.id)))?,
        };
        records.push(build_prompt(&d.id, &d.raw_text, settings.mode, cands));
    }
    write_lines(&settings.out.join(PROMPTS), &records)?;
    eprintln!("wrote {} {} prompts", records.len(), settings.mode);
    Ok(())
}

pub fn cmd_infer(settings: &Settings) -> Result<(), CliError> {
    let prompts: Vec<PromptRecord> = read_lines(&settings.out.join(PROMPTS))?;
    let path = settings.out.join(PREDICTIONS);
    let done: HashSet<String> = if path.is_file() {
        read_lines::<Prediction>(&path)?.into_iter().map(|p| p.id).collect()
    } else {
        HashSet::new()
    };
    let todo: Vec<PromptRecord> = prompts.into_iter().filter(|p| !done.contains(&p.id)).collect();
    if todo.is_empty() {
        eprintln!("all {} prompts already answered", done.len());
        return Ok(());
    }
    let client = Client::new(settings.endpoint.clone()).map_err(|e| CliError::config(format!("endpoint: {e}")))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::config(format!("async runtime: {e}")))?;
    let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| io_error(&path, e))?;
    let mut failures: Vec<LlmError> = Vec::new();
    let mut answered = 0;
    runtime.block_on(async {
        let mut results = client.infer_stream(&todo);
        while let Some(result) = results.next().await {
            match result {
                Ok(p) => {
                    let line = serde_json::to_string(&p).expect("predictions serialize");
                    writeln!(file, "{line}").map_err(|e| io_error(&path, e))?;
                    file.flush().map_err(|e| io_error(&path, e))?;
                    answered += 1;
                }
                Err(e) => {
                    let auth = matches!(e, LlmError::AuthFailed { .. });
                    eprintln!("{e}");
                    failures.push(e);
                    if auth {
                        break;
                    }
                }
            }
        }
        Ok::<(), CliError>(())
    })?;
    eprintln!("answered {answered} of {} remaining prompts", todo.len());
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(CliError::endpoint(format!("{} request(s) failed; first: {first}", failures.len()))),
    }
}

/// Scores the split's predictions and writes the report and table files.
/// Documents without a prediction count as ill-formed.
pub fn cmd_score(settings: &Settings) -> Result<ScoreReport, CliError> {
    let corpus = load_corpus(&settings.out)?;
    let docs = split_docs(&corpus, settings)?;
    let predictions: HashMap<String, String> =
        read_lines::<Prediction>(&settings.out.join(PREDICTIONS))?.into_iter().map(|p| (p.id, p.output)).collect();
    let store = load_wordnet(settings)?;
    let missing = docs.iter().filter(|d| !predictions.contains_key(&d.id)).count();
    if missing > 0 {
        eprintln!("warning: {missing} documents have no prediction and count as ill-formed");
    }
    let scores: Vec<Result<DocumentScore<f64>, CliError>> = docs
        .par_iter()
        .map(|d| {
            let gold = d
                .gold()
                .ok_or_else(|| CliError::validation(format!("{} has no gold SBN", d.id)))?
                .map_err(|e| CliError::validation(format!("{}: {e}", d.id)))?;
            let targets: Vec<_> = corpus.targets_for(&d.id).cloned().collect();
            let output = predictions.get(&d.id).map_or("", String::as_str);
            Ok(score_document(&d.id, output, &gold, &targets, settings.restarts, &store))
        })
        .collect();
    let report = aggregate(scores.into_iter().collect::<Result<Vec<_>, _>>()?);
    let json = settings.out.join(REPORT);
    let mut w = create(&json)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::config(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| io_error(&json, e))?;
    let table = report.table();
    fs::write(settings.out.join(TABLE), &table).map_err(|e| io_error(&settings.out.join(TABLE), e))?;
    Ok(report)
}

pub fn cmd_export_train(settings: &Settings) -> Result<(), CliError> {
    let corpus = load_corpus(&settings.out)?;
    let docs: Vec<Document> = corpus.split(corpus::Split::Train).into_iter().cloned().collect();
    let store = match settings.mode {
        PromptMode::Rasp => Some(load_wordnet(settings)?),
        PromptMode::Normal => None,
    };
    let config = RetrievalConfig { max_candidates: settings.max_candidates };
    let records = export_training(&docs, settings.mode, |d| {
        store.as_ref().map(|s| retrieve(&d.raw_text, s, &config)).unwrap_or_default()
    })
    .map_err(|e| CliError::validation(e.to_string()))?;
    let lines: Vec<serde_json::Value> = records
        .iter()
        .map(|r| serde_json::json!({ "id": r.id, "mode": r.mode, "messages": r.messages }))
        .collect();
    write_lines(&settings.out.join(TRAIN), &lines)?;
    eprintln!("wrote {} {} training records", lines.len(), settings.mode);
    Ok(())
}

pub fn cmd_audit(settings: &Settings) -> Result<(), CliError> {
    let corpus = load_corpus(&settings.out)?;
    let report = corpus::ood_audit(&corpus);
    for w in &report.warnings {
        eprintln!("warning: {} {} {:?}", w.doc_id, w.concept, w.kind);
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("audit report serializes"));
    Ok(())
}
