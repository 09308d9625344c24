//! The `analyze` subcommand: run the full pipeline over a batch of
//! transcripts and write per-participant artifacts.
//!
//! Each transcript is independent, so the batch runs on a worker pool;
//! failures are listed on stderr at the end while successful participants
//! still get their artifacts. Participant ids come from the leading digits
//! of the file name (`301_TRANSCRIPT.csv` -> 301) unless `--participant-id`
//! pins one for a single file.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use moodmetric::corpus::{parse_transcript_with, WordList};
use moodmetric::pipeline::{analyze_units, Analysis, AnalysisParams};
use moodmetric::preprocess::{config_fingerprint, prepare_transcript};
use moodmetric::sentiment::SentimentEngine;

use crate::config::{self, Formats, RunConfig};
use crate::report::{report_json, timeline_csv};
use crate::svg::timeline_svg;
use crate::CliError;

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Transcript files; participant id is taken from the leading digits of
    /// each file name.
    #[arg(required = true)]
    pub transcripts: Vec<PathBuf>,
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sentiment engine: lexicon or remote.
    #[arg(long)]
    pub engine: Option<String>,
    /// Lexicon TSV path, or `bundled`.
    #[arg(long)]
    pub lexicon: Option<String>,
    /// Stopword list path, or `bundled`.
    #[arg(long)]
    pub stopwords: Option<String>,
    /// Filler list path, or `bundled`.
    #[arg(long)]
    pub fillers: Option<String>,
    /// First-person pronoun list path, or `bundled`.
    #[arg(long)]
    pub pronouns: Option<String>,
    /// Number of equal time bins in the mood timeline.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Score normalization divisor of the lexicon engine.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Weight multiplier for depression terms.
    #[arg(long)]
    pub boost: Option<f64>,
    /// Fraction of negative bins that triggers the attention flag.
    #[arg(long = "attention-threshold")]
    pub attention_threshold: Option<f64>,
    /// Speaker label of the automated interviewer whose lines are dropped.
    #[arg(long = "agent-label")]
    pub agent_label: Option<String>,
    /// Output directory for artifacts.
    #[arg(long)]
    pub out: Option<String>,
    /// Comma-separated artifact formats: json,csv,svg.
    #[arg(long)]
    pub format: Option<String>,
    /// Transcript column delimiter: `tab`, `comma`, or a single character.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// Worker pool size; 0 means available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Remote engine mode: replay, record, or live.
    #[arg(long = "remote-mode")]
    pub remote_mode: Option<String>,
    /// Sentiment cache file for the remote engine.
    #[arg(long)]
    pub cache: Option<String>,
    /// Participant id override; only valid with a single transcript.
    #[arg(long = "participant-id")]
    pub participant_id: Option<u32>,
}

impl AnalyzeArgs {
    fn effective_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let set_string = |target: &mut String, flag: &Option<String>| {
            if let Some(v) = flag {
                *target = v.clone();
            }
        };
        set_string(&mut cfg.engine, &self.engine);
        set_string(&mut cfg.lexicon, &self.lexicon);
        set_string(&mut cfg.stopwords, &self.stopwords);
        set_string(&mut cfg.fillers, &self.fillers);
        set_string(&mut cfg.pronouns, &self.pronouns);
        set_string(&mut cfg.agent_label, &self.agent_label);
        set_string(&mut cfg.out, &self.out);
        set_string(&mut cfg.format, &self.format);
        set_string(&mut cfg.delimiter, &self.delimiter);
        set_string(&mut cfg.remote_mode, &self.remote_mode);
        set_string(&mut cfg.cache, &self.cache);
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.scale {
            cfg.scale = v;
        }
        if let Some(v) = self.boost {
            cfg.boost = v;
        }
        if let Some(v) = self.attention_threshold {
            cfg.attention_threshold = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Context {
    cfg: RunConfig,
    stopwords: WordList,
    fillers: WordList,
    pronouns: WordList,
    engine: Box<dyn SentimentEngine>,
    params: AnalysisParams,
    formats: Formats,
    delimiter: char,
    out_dir: PathBuf,
}

pub fn run(args: &AnalyzeArgs) -> i32 {
    match execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("moodmetric: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let cfg = args.effective_config()?;
    let stopwords = config::load_stopwords(&cfg)?;
    let fillers = config::load_fillers(&cfg)?;
    let pronouns = config::load_pronouns(&cfg)?;
    let fingerprint = config_fingerprint(&cfg.agent_label, &stopwords, &fillers);
    let engine = config::build_engine(&cfg, &fingerprint)?;

    let jobs = derive_jobs(args)?;
    let out_dir = PathBuf::from(&cfg.out);
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;

    let ctx = Context {
        params: cfg.analysis_params(),
        formats: cfg.formats()?,
        delimiter: cfg.delimiter_char()?,
        stopwords,
        fillers,
        pronouns,
        engine,
        out_dir,
        cfg,
    };

    // callers must serialize calls to engines that are not concurrent-safe
    let threads = if ctx.engine.concurrent_safe() { ctx.cfg.threads } else { 1 };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Output(e.to_string()))?;

    let results: Vec<(PathBuf, u32, Result<Analysis, CliError>)> = pool.install(|| {
        jobs.par_iter()
            .map(|(path, id)| (path.clone(), *id, process_one(path, *id, &ctx)))
            .collect()
    });

    let mut scores: BTreeMap<u32, f64> = BTreeMap::new();
    let mut levels: BTreeMap<u32, String> = BTreeMap::new();
    let mut failures: Vec<(String, &CliError)> = Vec::new();
    for (path, id, result) in &results {
        match result {
            Ok(analysis) => {
                scores.insert(*id, analysis.components.s);
                levels.insert(*id, analysis.level.to_string());
            }
            Err(e) => failures.push((path.display().to_string(), e)),
        }
    }

    if !scores.is_empty() {
        let mut csv = String::from("participant_id,score\n");
        for (id, s) in &scores {
            csv.push_str(&format!("{id},{s}\n"));
        }
        let path = ctx.out_dir.join("scores.csv");
        fs::write(&path, csv).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }

    for (id, s) in &scores {
        println!("participant {id}: S = {s:.3} ({})", levels[id]);
    }
    failures.sort_by(|a, b| a.0.cmp(&b.0));
    for (path, e) in &failures {
        eprintln!("moodmetric: {path}: {e}");
    }

    // parse problems take precedence over engine problems when both occur
    let code = if failures.iter().any(|(_, e)| matches!(e, CliError::Parse(_))) {
        2
    } else if failures.iter().any(|(_, e)| matches!(e, CliError::Engine(_))) {
        3
    } else if failures.is_empty() {
        0
    } else {
        1
    };
    Ok(code)
}

fn derive_jobs(args: &AnalyzeArgs) -> Result<Vec<(PathBuf, u32)>, CliError> {
    if args.participant_id.is_some() && args.transcripts.len() != 1 {
        return Err(CliError::Parse(
            "--participant-id only applies to a single transcript".into(),
        ));
    }
    let mut jobs = Vec::new();
    let mut seen: BTreeMap<u32, PathBuf> = BTreeMap::new();
    for path in &args.transcripts {
        let id = match args.participant_id {
            Some(id) if id > 0 => id,
            Some(_) => return Err(CliError::Parse("participant id must be positive".into())),
            None => participant_id_from(path).ok_or_else(|| {
                CliError::Parse(format!(
                    "{}: cannot derive a participant id from the file name; use --participant-id",
                    path.display()
                ))
            })?,
        };
        if let Some(prev) = seen.insert(id, path.clone()) {
            return Err(CliError::Parse(format!(
                "participant id {id} appears twice: {} and {}",
                prev.display(),
                path.display()
            )));
        }
        jobs.push((path.clone(), id));
    }
    Ok(jobs)
}

/// Leading digits of the file stem, e.g. `301_TRANSCRIPT.csv` -> 301.
fn participant_id_from(path: &Path) -> Option<u32> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem.chars().take_while(char::is_ascii_digit).collect();
    digits.parse().ok().filter(|id| *id > 0)
}

fn process_one(path: &Path, id: u32, ctx: &Context) -> Result<Analysis, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Parse(format!("cannot open transcript: {e}")))?;
    let transcript = parse_transcript_with(file, id, ctx.delimiter)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let units = prepare_transcript(&transcript, &ctx.stopwords, &ctx.fillers, &ctx.cfg.agent_label);
    let analysis = analyze_units(&units, ctx.engine.as_ref(), &ctx.pronouns, &ctx.params)
        .map_err(|e| CliError::Engine(e.to_string()))?;
    write_artifacts(ctx, id, &analysis)?;
    Ok(analysis)
}

fn write_artifacts(ctx: &Context, id: u32, analysis: &Analysis) -> Result<(), CliError> {
    let write = |name: String, contents: String| {
        let path = ctx.out_dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
    };
    if ctx.formats.json {
        write(format!("{id}.report.json"), report_json(id, analysis, &ctx.cfg))?;
    }
    if ctx.formats.csv {
        write(format!("{id}.timeline.csv"), timeline_csv(&analysis.timeline))?;
    }
    if ctx.formats.svg {
        write(format!("{id}.timeline.svg"), timeline_svg(&analysis.timeline))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn participant_id_comes_from_leading_digits() {
        assert_eq!(participant_id_from(Path::new("301_TRANSCRIPT.csv")), Some(301));
        assert_eq!(participant_id_from(Path::new("/data/487_T.tsv")), Some(487));
        assert_eq!(participant_id_from(Path::new("transcript.csv")), None);
        assert_eq!(participant_id_from(Path::new("0_bad.csv")), None);
    }
}
