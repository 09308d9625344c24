//! The composite depression scale and its four-level classification.
//!
//! A unit is "negative" when its score falls in the closed window
//! [-1.0, -0.25]. Over a transcript, X is the fraction of negative units,
//! Y the mean score of negative units, and Z the mean magnitude of negative
//! units. The composite is `S = 100*X + |Y|/2 + Z/4`, clamped to [0, 100],
//! and classified as Happy (0..=25], Low (25..50], Medium (50..75], or High
//! (75..100]. The intensity percentage maps the mean per-line emotion
//! affinely onto [0, 100] with -1 -> 100 (maximally sad) and +1 -> 0.

use serde::Serialize;
use thiserror::Error;

use crate::sentiment::Sentiment;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("score {0} outside [0, 100]")]
    OutOfRange(f64),
}

/// Closed score window that counts as a negative sentence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativeWindow {
    pub low: f64,
    pub high: f64,
}

impl Default for NegativeWindow {
    fn default() -> Self {
        Self { low: -1.0, high: -0.25 }
    }
}

impl NegativeWindow {
    pub fn contains(&self, score: f64) -> bool {
        self.low <= score && score <= self.high
    }
}

/// True when the sentiment's score lies in the default window
/// [-1.0, -0.25], both endpoints inclusive.
pub fn is_negative(sent: &Sentiment) -> bool {
    NegativeWindow::default().contains(sent.score)
}

/// X, Y, Z, the composite S, and the underlying counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricComponents {
    /// Fraction of negative sentences, in [0, 1].
    pub x: f64,
    /// Mean score of negative sentences; 0 when there are none.
    pub y: f64,
    /// Mean magnitude of negative sentences; 0 when there are none.
    pub z: f64,
    /// Composite score on the 0-100 scale.
    pub s: f64,
    pub n_total: usize,
    pub n_negative: usize,
}

/// Folds per-unit sentiments into the composite components using the
/// default negative window.
pub fn compute_components(sents: &[Sentiment]) -> MetricComponents {
    compute_components_with(sents, NegativeWindow::default())
}

/// Folds per-unit sentiments into the composite components.
///
/// `S = 100*X + |Y|/2 + Z/4`, clamped to [0, 100]. With no negative
/// sentences Y = Z = 0 and S = 0.
pub fn compute_components_with(sents: &[Sentiment], window: NegativeWindow) -> MetricComponents {
    let n_total = sents.len();
    let mut n_negative = 0usize;
    let mut score_sum = 0.0;
    let mut magnitude_sum = 0.0;
    for s in sents {
        if window.contains(s.score) {
            n_negative += 1;
            score_sum += s.score;
            magnitude_sum += s.magnitude;
        }
    }
    let x = if n_total == 0 { 0.0 } else { n_negative as f64 / n_total as f64 };
    let (y, z) = if n_negative == 0 {
        (0.0, 0.0)
    } else {
        (score_sum / n_negative as f64, magnitude_sum / n_negative as f64)
    };
    let s = (100.0 * x + y.abs() / 2.0 + z / 4.0).clamp(0.0, 100.0);
    MetricComponents { x, y, z, s, n_total, n_negative }
}

/// Four-level classification of the composite score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DepressionLevel {
    Happy,
    LowDepressed,
    MediumDepressed,
    HighDepressed,
}

impl std::fmt::Display for DepressionLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Happy => "Happy",
            Self::LowDepressed => "Low Depressed",
            Self::MediumDepressed => "Medium Depressed",
            Self::HighDepressed => "High Depressed",
        };
        f.write_str(s)
    }
}

/// Classifies a composite score: [0, 25] Happy, (25, 50] Low, (50, 75]
/// Medium, (75, 100] High. The half-open partition is total and gap-free
/// over the real-valued scale.
pub fn classify(s: f64) -> Result<DepressionLevel, MetricsError> {
    if !(s.is_finite() && (0.0..=100.0).contains(&s)) {
        return Err(MetricsError::OutOfRange(s));
    }
    Ok(if s <= 25.0 {
        DepressionLevel::Happy
    } else if s <= 50.0 {
        DepressionLevel::LowDepressed
    } else if s <= 75.0 {
        DepressionLevel::MediumDepressed
    } else {
        DepressionLevel::HighDepressed
    })
}

/// Affine map from a mean emotion in [-1, +1] to a sadness percentage:
/// -1 -> 100, 0 -> 50, +1 -> 0.
pub fn percent_from_mean(mean: f64) -> f64 {
    (1.0 - mean) / 2.0 * 100.0
}

/// Overall intensity percentage: per-line emotions are clamped to [-1, +1],
/// averaged (0 when empty), and mapped so higher mean emotion yields a lower
/// (happier) percentage.
pub fn intensity_overall(line_emotions: &[f64]) -> f64 {
    let mean = if line_emotions.is_empty() {
        0.0
    } else {
        line_emotions.iter().map(|e| e.clamp(-1.0, 1.0)).sum::<f64>() / line_emotions.len() as f64
    };
    percent_from_mean(mean)
}
