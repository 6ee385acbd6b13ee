//! Run settings from flags, a TOML config file and the environment, in
//! that order of precedence.

use std::path::{Path, PathBuf};

use clap::Args;
use rasp_core::metrics::DEFAULT_RESTARTS;
use rasp_core::prompting::PromptMode;
use rasp_llm::{EndpointConfig, API_KEY_ENV};
use serde::Deserialize;

use crate::CliError;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// WordNet 3.0 database directory.
    #[arg(long, global = true)]
    pub wordnet: Option<PathBuf>,
    /// Corpus root with `<split>/<id>/` document directories.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// train, dev, standard or challenge.
    #[arg(long, global = true)]
    pub split: Option<String>,
    /// normal or rasp.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Chat-completions base URL, e.g. http://localhost:8000/v1.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Hill-climbing restarts for SMATCH.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Directory holding the stage files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub max_in_flight: Option<usize>,
    #[arg(long, global = true)]
    pub retries: Option<u32>,
    /// Keep at most this many retrieved concepts per document.
    #[arg(long, global = true)]
    pub max_candidates: Option<usize>,
}

/// Keys accepted in the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub wordnet: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub split: Option<String>,
    pub mode: Option<String>,
    pub restarts: Option<usize>,
    pub out: Option<PathBuf>,
    pub max_candidates: Option<usize>,
    pub endpoint: Option<FileEndpoint>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEndpoint {
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub max_in_flight: Option<usize>,
    pub timeout: Option<f64>,
    pub retries: Option<u32>,
    pub backoff_ms: Option<u64>,
    pub temperature: Option<f64>,
    pub logprobs: Option<bool>,
}

impl FileConfig {
    /// Relative paths are taken relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.wordnet, &mut cfg.corpus, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub wordnet: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub split: String,
    pub mode: PromptMode,
    pub restarts: usize,
    pub out: PathBuf,
    pub max_candidates: Option<usize>,
    pub endpoint: EndpointConfig,
}

fn env_parse<T: std::str::FromStr>(env: &dyn Fn(&str) -> Option<String>, key: &str) -> Result<Option<T>, CliError> {
    env(key)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| CliError::config(format!("{key}: cannot parse `{v}`"))))
        .transpose()
}

impl Settings {
    /// `env` looks up environment variables (`RASP_WORDNET`, `RASP_CORPUS`,
    /// `RASP_SPLIT`, `RASP_MODE`, `RASP_ENDPOINT`, `RASP_MODEL`,
    /// `RASP_RESTARTS`, `RASP_OUT` and the API key in `RASP_API_KEY`).
    pub fn resolve(flags: &GlobalArgs, env: &dyn Fn(&str) -> Option<String>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let fe = file.endpoint.clone().unwrap_or_default();
        let mode: String = flags.mode.clone().or(file.mode).or(env_parse(env, "RASP_MODE")?).unwrap_or_else(|| "rasp".into());
        let mode = mode.parse::<PromptMode>().map_err(|e| CliError::config(e.to_string()))?;
        let defaults = EndpointConfig::default();
        let endpoint = EndpointConfig {
            base_url: flags.endpoint.clone().or(fe.base_url).or(env_parse(env, "RASP_ENDPOINT")?).unwrap_or(defaults.base_url),
            model: flags.model.clone().or(fe.model).or(env_parse(env, "RASP_MODEL")?).unwrap_or_default(),
            api_key: env(API_KEY_ENV).filter(|k| !k.is_empty()),
            max_in_flight: flags.max_in_flight.or(fe.max_in_flight).unwrap_or(defaults.max_in_flight),
            timeout: fe.timeout.unwrap_or(defaults.timeout),
            retries: flags.retries.or(fe.retries).unwrap_or(defaults.retries),
            backoff_ms: fe.backoff_ms.unwrap_or(defaults.backoff_ms),
            temperature: fe.temperature.unwrap_or(defaults.temperature),
            logprobs: fe.logprobs.unwrap_or(defaults.logprobs),
        };
        Ok(Settings {
            wordnet: flags.wordnet.clone().or(file.wordnet).or(env_parse(env, "RASP_WORDNET")?),
            corpus: flags.corpus.clone().or(file.corpus).or(env_parse(env, "RASP_CORPUS")?),
            split: flags.split.clone().or(file.split).or(env_parse(env, "RASP_SPLIT")?).unwrap_or_else(|| "standard".into()),
            mode,
            restarts: flags.restarts.or(file.restarts).or(env_parse(env, "RASP_RESTARTS")?).unwrap_or(DEFAULT_RESTARTS),
            out: flags.out.clone().or(file.out).or(env_parse(env, "RASP_OUT")?).unwrap_or_else(|| PathBuf::from("rasp-out")),
            max_candidates: flags.max_candidates.or(file.max_candidates),
            endpoint,
        })
    }

    pub fn wordnet_dir(&self) -> Result<&Path, CliError> {
        self.wordnet.as_deref().ok_or_else(|| CliError::config("no WordNet directory (use --wordnet or RASP_WORDNET)"))
    }

    pub fn corpus_root(&self) -> Result<&Path, CliError> {
        self.corpus.as_deref().ok_or_else(|| CliError::config("no corpus root (use --corpus or RASP_CORPUS)"))
    }
}
