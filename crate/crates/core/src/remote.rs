//! Adapter for an external sentiment service, with a replay cache so every
//! pipeline run can execute offline.
//!
//! The wire format is a minimal JSON POST `{"text": ...}` answered by
//! `{"score": ..., "magnitude": ...}`; vendor-specific shims stay outside
//! the test surface. The cache is one JSON object per line keyed by the
//! SHA-256 of the unit text after preprocessing, preceded by a header line
//! carrying the preprocessing-config fingerprint. Replay refuses to run
//! against a cache recorded under a different preprocessing configuration,
//! and never opens a network connection.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::preprocess::CleanUtterance;
use crate::sentiment::{EngineError, Sentiment, SentimentEngine};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cache was recorded under a different preprocessing configuration \
             (expected fingerprint {expected}, found {found})")]
    FingerprintMismatch { expected: String, found: String },
    #[error("cache line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RemoteMode {
    Live,
    Replay,
    Record,
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub timeout: Duration,
    pub mode: RemoteMode,
    pub cache_path: PathBuf,
    /// Upper bound on concurrent in-flight requests in live/record mode.
    pub max_in_flight: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            endpoint: String::new(),
            timeout: Duration::from_secs(10),
            mode: RemoteMode::Replay,
            cache_path: PathBuf::from("sentiment_cache.jsonl"),
            max_in_flight: 4,
        }
    }
}

/// Content hash a cache entry is keyed by: SHA-256 of the exact unit text
/// after preprocessing, hex-encoded.
pub fn unit_hash(clean_text: &str) -> String {
    let digest = Sha256::digest(clean_text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    hash: String,
    score: f64,
    magnitude: f64,
}

/// Exact-match sentiment cache tied to one preprocessing configuration.
#[derive(Debug, Clone)]
pub struct SentimentCache {
    fingerprint: String,
    entries: HashMap<String, Sentiment>,
}

impl SentimentCache {
    pub fn new(fingerprint: impl Into<String>) -> Self {
        Self { fingerprint: fingerprint.into(), entries: HashMap::new() }
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, hash: &str) -> Option<Sentiment> {
        self.entries.get(hash).copied()
    }

    pub fn insert(&mut self, hash: String, sentiment: Sentiment) {
        self.entries.insert(hash, sentiment);
    }

    /// Hashes of the given units that are absent from the cache.
    pub fn missing_hashes(&self, units: &[CleanUtterance]) -> Vec<String> {
        units
            .iter()
            .map(|u| unit_hash(&u.clean_text))
            .filter(|h| !self.entries.contains_key(h))
            .collect()
    }

    /// Loads a cache file, refusing a fingerprint that does not match the
    /// current preprocessing configuration. Duplicate hashes keep the last
    /// entry.
    pub fn load(path: &Path, expected_fingerprint: &str) -> Result<Self, CacheError> {
        let reader = BufReader::new(File::open(path)?);
        let mut lines = reader.lines();
        let header_line = lines
            .next()
            .ok_or(CacheError::Malformed { line: 1, reason: "missing header".into() })??;
        let header: CacheHeader = serde_json::from_str(&header_line)
            .map_err(|e| CacheError::Malformed { line: 1, reason: e.to_string() })?;
        if header.fingerprint != expected_fingerprint {
            return Err(CacheError::FingerprintMismatch {
                expected: expected_fingerprint.to_string(),
                found: header.fingerprint,
            });
        }
        let mut cache = Self::new(header.fingerprint);
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 2;
            let entry: CacheEntry = serde_json::from_str(&line)
                .map_err(|e| CacheError::Malformed { line: lineno, reason: e.to_string() })?;
            let sentiment = Sentiment::try_new(entry.score, entry.magnitude)
                .map_err(|e| CacheError::Malformed { line: lineno, reason: e.to_string() })?;
            cache.entries.insert(entry.hash, sentiment);
        }
        Ok(cache)
    }

    /// Writes the whole cache with entries sorted by hash.
    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header_line(&self.fingerprint))?;
        let mut hashes: Vec<&String> = self.entries.keys().collect();
        hashes.sort();
        for hash in hashes {
            writeln!(out, "{}", entry_line(hash, self.entries[hash]))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn header_line(fingerprint: &str) -> String {
    serde_json::to_string(&CacheHeader { fingerprint: fingerprint.to_string() })
        .expect("header serializes")
}

fn entry_line(hash: &str, s: Sentiment) -> String {
    serde_json::to_string(&CacheEntry {
        hash: hash.to_string(),
        score: s.score,
        magnitude: s.magnitude,
    })
    .expect("entry serializes")
}

#[derive(Serialize)]
struct AnalyzeRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct AnalyzeReply {
    score: f64,
    magnitude: f64,
}

// Counting semaphore for the in-flight cap.
struct Gate {
    permits: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(permits: usize) -> Self {
        Self { permits: Mutex::new(permits.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> GateGuard<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.cv.wait(permits).unwrap();
        }
        *permits -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.permits.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

/// Engine backed by the external service. In replay mode the cache is the
/// only source; in record mode every fetch is appended to the cache file as
/// it completes.
pub struct RemoteEngine {
    cfg: RemoteConfig,
    client: Option<reqwest::blocking::Client>,
    cache: RwLock<SentimentCache>,
    writer: Option<Mutex<BufWriter<File>>>,
    gate: Gate,
}

impl RemoteEngine {
    /// Builds the engine for the configured mode. Replay loads and checks
    /// the cache up front; record truncates the cache file and writes the
    /// header.
    pub fn new(cfg: RemoteConfig, preprocess_fingerprint: &str) -> Result<Self, CacheError> {
        let gate = Gate::new(cfg.max_in_flight);
        let (client, cache, writer) = match cfg.mode {
            RemoteMode::Replay => {
                let cache = SentimentCache::load(&cfg.cache_path, preprocess_fingerprint)?;
                (None, cache, None)
            }
            RemoteMode::Record => {
                let mut file = BufWriter::new(File::create(&cfg.cache_path)?);
                writeln!(file, "{}", header_line(preprocess_fingerprint))?;
                file.flush()?;
                (
                    Some(build_client(&cfg)),
                    SentimentCache::new(preprocess_fingerprint),
                    Some(Mutex::new(file)),
                )
            }
            RemoteMode::Live => {
                (Some(build_client(&cfg)), SentimentCache::new(preprocess_fingerprint), None)
            }
        };
        Ok(Self { cfg, client, cache: RwLock::new(cache), writer, gate })
    }

    /// Resolves one unit: cache lookup in replay mode, HTTP fetch otherwise,
    /// with record mode also appending to the cache file.
    pub fn fetch_sentiment(&self, unit: &CleanUtterance) -> Result<Sentiment, EngineError> {
        let hash = unit_hash(&unit.clean_text);
        match self.cfg.mode {
            RemoteMode::Replay => {
                self.cache.read().unwrap().get(&hash).ok_or(EngineError::CacheMiss(hash))
            }
            RemoteMode::Live => self.http_fetch(&unit.clean_text),
            RemoteMode::Record => {
                let sentiment = self.http_fetch(&unit.clean_text)?;
                self.cache.write().unwrap().insert(hash.clone(), sentiment);
                if let Some(writer) = &self.writer {
                    let mut writer = writer.lock().unwrap();
                    writeln!(writer, "{}", entry_line(&hash, sentiment))
                        .and_then(|()| writer.flush())
                        .map_err(|e| EngineError::Transport(format!("cache write: {e}")))?;
                }
                Ok(sentiment)
            }
        }
    }

    /// Snapshot of the in-memory cache (entries recorded so far).
    pub fn cache_snapshot(&self) -> SentimentCache {
        self.cache.read().unwrap().clone()
    }

    fn http_fetch(&self, text: &str) -> Result<Sentiment, EngineError> {
        let client = self.client.as_ref().expect("live/record mode has a client");
        let _slot = self.gate.acquire();
        let response = client
            .post(&self.cfg.endpoint)
            .json(&AnalyzeRequest { text })
            .send()
            .map_err(|e| EngineError::Transport(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(EngineError::Transport(format!("endpoint returned {status}")));
        }
        let reply: AnalyzeReply = response
            .json()
            .map_err(|e| EngineError::MalformedReply(e.to_string()))?;
        Sentiment::try_new(reply.score, reply.magnitude)
    }
}

fn build_client(cfg: &RemoteConfig) -> reqwest::blocking::Client {
    reqwest::blocking::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .expect("reqwest client builds")
}

impl SentimentEngine for RemoteEngine {
    fn name(&self) -> &str {
        "remote"
    }

    fn analyze(&self, unit: &CleanUtterance) -> Result<Sentiment, EngineError> {
        self.fetch_sentiment(unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Utterance;
    use std::fs;

    fn unit(text: &str) -> CleanUtterance {
        CleanUtterance {
            source: Utterance { start: 0.0, stop: 1.0, speaker: "P".into(), text: text.into() },
            clean_text: text.to_string(),
            all_tokens: vec![],
            tokens: vec![],
        }
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        assert_eq!(unit_hash("i feel sad"), unit_hash("i feel sad"));
        assert_ne!(unit_hash("i feel sad"), unit_hash("i feel glad"));
        assert_eq!(unit_hash("x").len(), 64);
    }

    #[test]
    fn cache_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut cache = SentimentCache::new("fp1");
        cache.insert(unit_hash("a"), Sentiment { score: -0.6, magnitude: 1.2 });
        cache.insert(unit_hash("b"), Sentiment { score: 0.25, magnitude: 0.0 });
        cache.save(&path).unwrap();

        let loaded = SentimentCache::load(&path, "fp1").unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.get(&unit_hash("a")), Some(Sentiment { score: -0.6, magnitude: 1.2 }));
    }

    #[test]
    fn cache_refuses_fingerprint_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        SentimentCache::new("fp1").save(&path).unwrap();
        assert!(matches!(
            SentimentCache::load(&path, "fp2"),
            Err(CacheError::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn cache_rejects_invalid_sentiments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        fs::write(
            &path,
            "{\"fingerprint\":\"fp\"}\n{\"hash\":\"abc\",\"score\":-1.5,\"magnitude\":1.0}\n",
        )
        .unwrap();
        assert!(matches!(
            SentimentCache::load(&path, "fp"),
            Err(CacheError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn replay_hits_and_misses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut cache = SentimentCache::new("fp");
        cache.insert(unit_hash("i feel sad"), Sentiment { score: -0.6, magnitude: 1.2 });
        cache.save(&path).unwrap();

        let cfg = RemoteConfig {
            mode: RemoteMode::Replay,
            cache_path: path,
            ..RemoteConfig::default()
        };
        let engine = RemoteEngine::new(cfg, "fp").unwrap();
        assert_eq!(
            engine.fetch_sentiment(&unit("i feel sad")).unwrap(),
            Sentiment { score: -0.6, magnitude: 1.2 }
        );
        assert!(matches!(
            engine.fetch_sentiment(&unit("never cached")),
            Err(EngineError::CacheMiss(_))
        ));
    }

    #[test]
    fn replay_requires_cache_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RemoteConfig {
            mode: RemoteMode::Replay,
            cache_path: dir.path().join("absent.jsonl"),
            ..RemoteConfig::default()
        };
        assert!(matches!(RemoteEngine::new(cfg, "fp"), Err(CacheError::Io(_))));
    }

    #[test]
    fn missing_hashes_reports_gaps() {
        let mut cache = SentimentCache::new("fp");
        cache.insert(unit_hash("covered"), Sentiment::neutral());
        let missing = cache.missing_hashes(&[unit("covered"), unit("gap")]);
        assert_eq!(missing, vec![unit_hash("gap")]);
    }
}
