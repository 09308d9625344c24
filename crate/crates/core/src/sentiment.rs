//! Sentiment engine contract and the built-in weighted-lexicon engine.
//!
//! Every engine maps one [`CleanUtterance`] to a [`Sentiment`]: a polarity
//! score in [-1, +1] and an unnormalized magnitude in [0, +inf). The lexicon
//! engine scores a unit by summing signed per-token contributions (intensity
//! weight x part-of-speech multiplier x depression boost), dividing by a
//! scale factor, and clamping the score; the magnitude is the scaled sum of
//! absolute contributions, so it grows with emotional content.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Lexicon, PosClass, WordList};
use crate::preprocess::CleanUtterance;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("replay cache has no entry for unit hash {0}")]
    CacheMiss(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed engine reply: {0}")]
    MalformedReply(String),
}

/// Sentiment of one text unit: polarity score and emotion magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sentiment {
    pub score: f64,
    pub magnitude: f64,
}

impl Sentiment {
    /// Validates the invariants: score in [-1, +1], magnitude finite and
    /// non-negative.
    pub fn try_new(score: f64, magnitude: f64) -> Result<Self, EngineError> {
        if !(score.is_finite() && (-1.0..=1.0).contains(&score)) {
            return Err(EngineError::MalformedReply(format!("score {score} outside [-1, 1]")));
        }
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(EngineError::MalformedReply(format!("negative magnitude {magnitude}")));
        }
        Ok(Self { score, magnitude })
    }

    pub fn neutral() -> Self {
        Self { score: 0.0, magnitude: 0.0 }
    }
}

/// Contract every sentiment engine implements.
///
/// `analyze` must be deterministic for a fixed engine configuration.
/// Engines that do not permit concurrent calls return `false` from
/// `concurrent_safe`; callers serialize calls to such engines.
pub trait SentimentEngine: Send + Sync {
    fn name(&self) -> &str;
    fn analyze(&self, unit: &CleanUtterance) -> Result<Sentiment, EngineError>;
    fn concurrent_safe(&self) -> bool {
        true
    }
}

/// Multipliers applied per part-of-speech class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosWeights {
    pub adjective: f64,
    pub adverb: f64,
    pub verb: f64,
    pub other: f64,
}

impl Default for PosWeights {
    fn default() -> Self {
        Self { adjective: 4.0, adverb: 3.0, verb: 2.0, other: 1.0 }
    }
}

impl PosWeights {
    pub fn multiplier(&self, class: PosClass) -> f64 {
        match class {
            PosClass::Adjective => self.adjective,
            PosClass::Adverb => self.adverb,
            PosClass::Verb => self.verb,
            PosClass::Other => self.other,
        }
    }
}

/// Signed contribution of one token: sign x weight x POS multiplier, with
/// the boost factor applied to depression terms. Tokens absent from the
/// lexicon contribute 0.
pub fn token_contribution(token: &str, lex: &Lexicon, weights: &PosWeights, boost: f64) -> f64 {
    debug_assert!(boost >= 1.0, "boost must be >= 1");
    match lex.get(token) {
        None => 0.0,
        Some(e) => {
            let b = if e.depression_term { boost } else { 1.0 };
            f64::from(e.sign) * e.weight * weights.multiplier(e.pos_class) * b
        }
    }
}

/// Scores one unit with the weighted lexicon.
///
/// Nonzero contributions are summed; `score = clamp(sum / scale, -1, +1)`
/// and `magnitude = sum(|c|) / scale`. A unit with no lexicon hits maps to
/// exactly (0, 0).
pub fn analyze_lexicon(
    unit: &CleanUtterance,
    lex: &Lexicon,
    weights: &PosWeights,
    boost: f64,
    scale: f64,
) -> Sentiment {
    assert!(scale > 0.0, "scale must be positive");
    let mut raw = 0.0;
    let mut total_abs = 0.0;
    for token in &unit.tokens {
        let c = token_contribution(token, lex, weights, boost);
        if c != 0.0 {
            raw += c;
            total_abs += c.abs();
        }
    }
    Sentiment { score: (raw / scale).clamp(-1.0, 1.0), magnitude: total_abs / scale }
}

/// The built-in weighted-lexicon engine. Immutable after construction and
/// safe to share across workers.
pub struct LexiconEngine {
    lexicon: Lexicon,
    weights: PosWeights,
    boost: f64,
    scale: f64,
}

impl LexiconEngine {
    pub fn new(lexicon: Lexicon, weights: PosWeights, boost: f64, scale: f64) -> Self {
        assert!(boost >= 1.0, "boost must be >= 1");
        assert!(scale > 0.0, "scale must be positive");
        Self { lexicon, weights, boost, scale }
    }

    /// Engine over the bundled lexicon with default POS weights, boost 2,
    /// and scale 4 (the maximum POS multiplier).
    pub fn bundled() -> Self {
        Self::new(crate::corpus::bundled_lexicon(), PosWeights::default(), 2.0, 4.0)
    }
}

impl SentimentEngine for LexiconEngine {
    fn name(&self) -> &str {
        "lexicon"
    }

    fn analyze(&self, unit: &CleanUtterance) -> Result<Sentiment, EngineError> {
        Ok(analyze_lexicon(unit, &self.lexicon, &self.weights, self.boost, self.scale))
    }
}

/// Signed emotion mass of one line: score x magnitude of the engine's
/// sentiment. Engine failures (remote engines only) propagate.
pub fn line_emotion(
    unit: &CleanUtterance,
    engine: &dyn SentimentEngine,
) -> Result<f64, EngineError> {
    let s = engine.analyze(unit)?;
    Ok(s.score * s.magnitude)
}

/// Fraction of first-person-singular tokens, counted on the pre-stopword
/// token stream. Returns 0 when there are no tokens.
pub fn pronoun_rate(units: &[CleanUtterance], pronouns: &WordList) -> f64 {
    debug_assert!(!pronouns.is_empty(), "pronoun list must be non-empty");
    let total: usize = units.iter().map(|u| u.all_tokens.len()).sum();
    if total == 0 {
        return 0.0;
    }
    let hits: usize = units
        .iter()
        .map(|u| u.all_tokens.iter().filter(|t| pronouns.contains(t)).count())
        .sum();
    hits as f64 / total as f64
}
