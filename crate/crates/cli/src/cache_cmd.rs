//! The `cache` subcommands for the remote engine: `record` fetches every
//! unit from the live endpoint and writes the replay cache; `verify` checks
//! that an existing cache covers a set of transcripts.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Subcommand};

use moodmetric::corpus::{parse_transcript_with, WordList};
use moodmetric::preprocess::{config_fingerprint, prepare_transcript, CleanUtterance};
use moodmetric::remote::{RemoteConfig, RemoteEngine, RemoteMode, SentimentCache};

use crate::config::{self, RunConfig, ENDPOINT_ENV};
use crate::CliError;

#[derive(Args)]
pub struct CacheCmd {
    #[command(subcommand)]
    pub action: CacheAction,
}

#[derive(Subcommand)]
pub enum CacheAction {
    /// Fetch sentiment for every unit from the endpoint named by
    /// MOODMETRIC_ENDPOINT and write the replay cache.
    Record(CacheArgs),
    /// Check that the cache covers every unit of the given transcripts.
    Verify(CacheArgs),
}

#[derive(Args)]
pub struct CacheArgs {
    /// Transcript files to cover.
    #[arg(required = true)]
    pub transcripts: Vec<PathBuf>,
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sentiment cache file.
    #[arg(long)]
    pub cache: Option<String>,
    /// Stopword list path, or `bundled`.
    #[arg(long)]
    pub stopwords: Option<String>,
    /// Filler list path, or `bundled`.
    #[arg(long)]
    pub fillers: Option<String>,
    /// Speaker label of the automated interviewer whose lines are dropped.
    #[arg(long = "agent-label")]
    pub agent_label: Option<String>,
    /// Transcript column delimiter: `tab`, `comma`, or a single character.
    #[arg(long)]
    pub delimiter: Option<String>,
}

pub fn run(cmd: &CacheCmd) -> i32 {
    let result = match &cmd.action {
        CacheAction::Record(args) => record(args),
        CacheAction::Verify(args) => verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("moodmetric: {e}");
            e.exit_code()
        }
    }
}

struct PrepContext {
    cfg: RunConfig,
    stopwords: WordList,
    fillers: WordList,
    fingerprint: String,
    delimiter: char,
}

fn prep_context(args: &CacheArgs) -> Result<PrepContext, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = &args.cache {
        cfg.cache = v.clone();
    }
    if let Some(v) = &args.stopwords {
        cfg.stopwords = v.clone();
    }
    if let Some(v) = &args.fillers {
        cfg.fillers = v.clone();
    }
    if let Some(v) = &args.agent_label {
        cfg.agent_label = v.clone();
    }
    if let Some(v) = &args.delimiter {
        cfg.delimiter = v.clone();
    }
    cfg.validate()?;
    let stopwords = config::load_stopwords(&cfg)?;
    let fillers = config::load_fillers(&cfg)?;
    let fingerprint = config_fingerprint(&cfg.agent_label, &stopwords, &fillers);
    let delimiter = cfg.delimiter_char()?;
    Ok(PrepContext { cfg, stopwords, fillers, fingerprint, delimiter })
}

fn load_units(ctx: &PrepContext, path: &Path) -> Result<Vec<CleanUtterance>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Parse(format!("{}: cannot open transcript: {e}", path.display())))?;
    // cache entries are keyed by unit text alone, so any positive id works here
    let transcript = parse_transcript_with(file, 1, ctx.delimiter)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(prepare_transcript(&transcript, &ctx.stopwords, &ctx.fillers, &ctx.cfg.agent_label))
}

fn record(args: &CacheArgs) -> Result<i32, CliError> {
    let ctx = prep_context(args)?;
    let endpoint = std::env::var(ENDPOINT_ENV).map_err(|_| {
        CliError::Parse(format!("cache record needs {ENDPOINT_ENV} to be set"))
    })?;
    let remote_cfg = RemoteConfig {
        endpoint,
        timeout: Duration::from_secs(ctx.cfg.remote_timeout_secs),
        mode: RemoteMode::Record,
        cache_path: ctx.cfg.cache.clone().into(),
        max_in_flight: ctx.cfg.max_in_flight,
    };
    let engine = RemoteEngine::new(remote_cfg, &ctx.fingerprint)
        .map_err(|e| CliError::Engine(e.to_string()))?;

    let mut total_units = 0usize;
    for path in &args.transcripts {
        let units = load_units(&ctx, path)?;
        for unit in &units {
            engine
                .fetch_sentiment(unit)
                .map_err(|e| CliError::Engine(format!("{}: {e}", path.display())))?;
        }
        total_units += units.len();
    }

    // rewrite the incrementally appended file in canonical sorted order
    let snapshot = engine.cache_snapshot();
    snapshot
        .save(Path::new(&ctx.cfg.cache))
        .map_err(|e| CliError::Output(format!("{}: {e}", ctx.cfg.cache)))?;
    println!(
        "recorded {} entries covering {} units from {} transcripts into {}",
        snapshot.len(),
        total_units,
        args.transcripts.len(),
        ctx.cfg.cache
    );
    Ok(0)
}

fn verify(args: &CacheArgs) -> Result<i32, CliError> {
    let ctx = prep_context(args)?;
    let cache = SentimentCache::load(Path::new(&ctx.cfg.cache), &ctx.fingerprint)
        .map_err(|e| CliError::Engine(format!("{}: {e}", ctx.cfg.cache)))?;

    let mut missing_total = 0usize;
    for path in &args.transcripts {
        let units = load_units(&ctx, path)?;
        let missing = cache.missing_hashes(&units);
        println!("{}: {} units, {} missing", path.display(), units.len(), missing.len());
        missing_total += missing.len();
    }
    if missing_total == 0 {
        println!("cache {} covers all units", ctx.cfg.cache);
        Ok(0)
    } else {
        eprintln!("moodmetric: cache {} is missing {missing_total} units", ctx.cfg.cache);
        Ok(3)
    }
}
