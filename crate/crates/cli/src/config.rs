//! Effective run configuration with flags > config file > defaults
//! precedence. The full configuration is echoed into every report so runs
//! are reproducible from their artifacts alone.

use std::fs;
use std::fs::File;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use moodmetric::corpus::{
    self, load_lexicon, load_wordlist, Lexicon, WordList, WordListKind,
};
use moodmetric::metrics::NegativeWindow;
use moodmetric::pipeline::AnalysisParams;
use moodmetric::remote::{RemoteConfig, RemoteEngine, RemoteMode};
use moodmetric::sentiment::{LexiconEngine, PosWeights, SentimentEngine};

use crate::CliError;

/// Environment variable naming the remote sentiment endpoint. Only needed
/// for the remote engine in live or record mode.
pub const ENDPOINT_ENV: &str = "MOODMETRIC_ENDPOINT";

/// Marker accepted in place of a path to use the built-in data files.
pub const BUNDLED: &str = "bundled";

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub engine: String,
    pub lexicon: String,
    pub stopwords: String,
    pub fillers: String,
    pub pronouns: String,
    pub scale: f64,
    pub boost: f64,
    pub pos_adjective: f64,
    pub pos_adverb: f64,
    pub pos_verb: f64,
    pub pos_other: f64,
    pub negative_low: f64,
    pub negative_high: f64,
    pub bins: usize,
    pub attention_threshold: f64,
    pub consistency_tolerance: f64,
    pub agent_label: String,
    pub delimiter: String,
    pub out: String,
    pub format: String,
    pub threads: usize,
    pub remote_mode: String,
    pub cache: String,
    pub remote_timeout_secs: u64,
    pub max_in_flight: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            engine: "lexicon".into(),
            lexicon: BUNDLED.into(),
            stopwords: BUNDLED.into(),
            fillers: BUNDLED.into(),
            pronouns: BUNDLED.into(),
            scale: 4.0,
            boost: 2.0,
            pos_adjective: 4.0,
            pos_adverb: 3.0,
            pos_verb: 2.0,
            pos_other: 1.0,
            negative_low: -1.0,
            negative_high: -0.25,
            bins: 10,
            attention_threshold: 0.5,
            consistency_tolerance: 1.0,
            agent_label: "Ellie".into(),
            delimiter: "tab".into(),
            out: "out".into(),
            format: "json,csv,svg".into(),
            threads: 0,
            remote_mode: "replay".into(),
            cache: "sentiment_cache.jsonl".into(),
            remote_timeout_secs: 10,
            max_in_flight: 4,
        }
    }
}

impl RunConfig {
    /// Applies a flat `key = value` config file. Unknown keys are errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| {
                CliError::Parse(format!("{}:{}: {e}", path.display(), idx + 1))
            })?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("unparsable value {value:?} for {key}"))
        }
        match key {
            "engine" => self.engine = value.to_string(),
            "lexicon" => self.lexicon = value.to_string(),
            "stopwords" => self.stopwords = value.to_string(),
            "fillers" => self.fillers = value.to_string(),
            "pronouns" => self.pronouns = value.to_string(),
            "scale" => self.scale = num(key, value)?,
            "boost" => self.boost = num(key, value)?,
            "pos_adjective" => self.pos_adjective = num(key, value)?,
            "pos_adverb" => self.pos_adverb = num(key, value)?,
            "pos_verb" => self.pos_verb = num(key, value)?,
            "pos_other" => self.pos_other = num(key, value)?,
            "negative_low" => self.negative_low = num(key, value)?,
            "negative_high" => self.negative_high = num(key, value)?,
            "bins" => self.bins = num(key, value)?,
            "attention_threshold" => self.attention_threshold = num(key, value)?,
            "consistency_tolerance" => self.consistency_tolerance = num(key, value)?,
            "agent_label" => self.agent_label = value.to_string(),
            "delimiter" => self.delimiter = value.to_string(),
            "out" => self.out = value.to_string(),
            "format" => self.format = value.to_string(),
            "threads" => self.threads = num(key, value)?,
            "remote_mode" => self.remote_mode = value.to_string(),
            "cache" => self.cache = value.to_string(),
            "remote_timeout_secs" => self.remote_timeout_secs = num(key, value)?,
            "max_in_flight" => self.max_in_flight = num(key, value)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Parse(msg));
        if !matches!(self.engine.as_str(), "lexicon" | "remote") {
            return bad(format!("engine must be lexicon or remote, got {:?}", self.engine));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if !(self.boost.is_finite() && self.boost >= 1.0) {
            return bad(format!("boost must be >= 1, got {}", self.boost));
        }
        for (name, v) in [
            ("pos_adjective", self.pos_adjective),
            ("pos_adverb", self.pos_adverb),
            ("pos_verb", self.pos_verb),
            ("pos_other", self.pos_other),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.negative_low <= self.negative_high
            && (-1.0..=1.0).contains(&self.negative_low)
            && (-1.0..=1.0).contains(&self.negative_high))
        {
            return bad(format!(
                "negative window [{}, {}] must be an ordered subrange of [-1, 1]",
                self.negative_low, self.negative_high
            ));
        }
        if self.bins == 0 {
            return bad("bins must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.attention_threshold) {
            return bad(format!(
                "attention_threshold must be in [0, 1], got {}",
                self.attention_threshold
            ));
        }
        if !(self.consistency_tolerance.is_finite() && self.consistency_tolerance >= 0.0) {
            return bad(format!(
                "consistency_tolerance must be non-negative, got {}",
                self.consistency_tolerance
            ));
        }
        if self.agent_label.trim().is_empty() {
            return bad("agent_label must be non-empty".into());
        }
        self.delimiter_char()?;
        let formats = self.formats()?;
        if !(formats.json || formats.csv || formats.svg) {
            return bad("format must select at least one of json, csv, svg".into());
        }
        if !matches!(self.remote_mode.as_str(), "replay" | "record" | "live") {
            return bad(format!(
                "remote_mode must be replay, record, or live, got {:?}",
                self.remote_mode
            ));
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1".into());
        }
        Ok(())
    }

    pub fn delimiter_char(&self) -> Result<char, CliError> {
        match self.delimiter.as_str() {
            "tab" | "\\t" => Ok('\t'),
            "comma" => Ok(','),
            s if s.chars().count() == 1 => Ok(s.chars().next().unwrap()),
            other => Err(CliError::Parse(format!(
                "delimiter must be `tab`, `comma`, or a single character, got {other:?}"
            ))),
        }
    }

    pub fn formats(&self) -> Result<Formats, CliError> {
        let mut formats = Formats::default();
        for token in self.format.split(',') {
            match token.trim() {
                "json" => formats.json = true,
                "csv" => formats.csv = true,
                "svg" => formats.svg = true,
                other => {
                    return Err(CliError::Parse(format!(
                        "format must list json, csv, svg; got {other:?}"
                    )))
                }
            }
        }
        Ok(formats)
    }

    pub fn remote_mode(&self) -> RemoteMode {
        match self.remote_mode.as_str() {
            "record" => RemoteMode::Record,
            "live" => RemoteMode::Live,
            _ => RemoteMode::Replay,
        }
    }

    pub fn pos_weights(&self) -> PosWeights {
        PosWeights {
            adjective: self.pos_adjective,
            adverb: self.pos_adverb,
            verb: self.pos_verb,
            other: self.pos_other,
        }
    }

    pub fn analysis_params(&self) -> AnalysisParams {
        AnalysisParams {
            window: NegativeWindow { low: self.negative_low, high: self.negative_high },
            bins: self.bins,
            attention_threshold: self.attention_threshold,
            consistency_tolerance: self.consistency_tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

fn open(spec: &str) -> Result<File, CliError> {
    File::open(spec).map_err(|e| CliError::Parse(format!("{spec}: {e}")))
}

pub fn load_stopwords(cfg: &RunConfig) -> Result<WordList, CliError> {
    if cfg.stopwords == BUNDLED {
        return Ok(corpus::bundled_stopwords());
    }
    load_wordlist(open(&cfg.stopwords)?, WordListKind::Stopwords)
        .map_err(|e| CliError::Parse(format!("{}: {e}", cfg.stopwords)))
}

pub fn load_fillers(cfg: &RunConfig) -> Result<WordList, CliError> {
    if cfg.fillers == BUNDLED {
        return Ok(corpus::bundled_fillers());
    }
    load_wordlist(open(&cfg.fillers)?, WordListKind::Fillers)
        .map_err(|e| CliError::Parse(format!("{}: {e}", cfg.fillers)))
}

pub fn load_pronouns(cfg: &RunConfig) -> Result<WordList, CliError> {
    if cfg.pronouns == BUNDLED {
        return Ok(corpus::bundled_pronouns());
    }
    load_wordlist(open(&cfg.pronouns)?, WordListKind::PronounsFirstSingular)
        .map_err(|e| CliError::Parse(format!("{}: {e}", cfg.pronouns)))
}

pub fn load_lexicon_source(cfg: &RunConfig) -> Result<Lexicon, CliError> {
    if cfg.lexicon == BUNDLED {
        return Ok(corpus::bundled_lexicon());
    }
    load_lexicon(open(&cfg.lexicon)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", cfg.lexicon)))
}

/// Builds the configured engine. The remote engine reads its endpoint from
/// [`ENDPOINT_ENV`]; replay mode needs no endpoint at all.
pub fn build_engine(
    cfg: &RunConfig,
    preprocess_fingerprint: &str,
) -> Result<Box<dyn SentimentEngine>, CliError> {
    match cfg.engine.as_str() {
        "lexicon" => Ok(Box::new(LexiconEngine::new(
            load_lexicon_source(cfg)?,
            cfg.pos_weights(),
            cfg.boost,
            cfg.scale,
        ))),
        "remote" => {
            let mode = cfg.remote_mode();
            let endpoint = match mode {
                RemoteMode::Replay => String::new(),
                _ => std::env::var(ENDPOINT_ENV).map_err(|_| {
                    CliError::Parse(format!(
                        "remote engine in {} mode needs {ENDPOINT_ENV} to be set",
                        cfg.remote_mode
                    ))
                })?,
            };
            let remote_cfg = RemoteConfig {
                endpoint,
                timeout: Duration::from_secs(cfg.remote_timeout_secs),
                mode,
                cache_path: cfg.cache.clone().into(),
                max_in_flight: cfg.max_in_flight,
            };
            let engine = RemoteEngine::new(remote_cfg, preprocess_fingerprint)
                .map_err(|e| CliError::Engine(format!("cache {}: {e}", cfg.cache)))?;
            Ok(Box::new(engine))
        }
        other => Err(CliError::Parse(format!("unknown engine {other:?}"))),
    }
}
