//! Duration-based mood tracking: equal time bins over the session,
//! per-bin average emotion, an attention flag, and a consistency check
//! against the intensity percentage.

use serde::Serialize;
use thiserror::Error;

use crate::metrics::percent_from_mean;
use crate::preprocess::CleanUtterance;

/// Attention is raised when more than this fraction of defined bins has a
/// negative mean emotion.
pub const DEFAULT_ATTENTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum TimelineError {
    #[error("session has no units")]
    EmptySession,
    #[error("bin count must be at least 1")]
    BadK,
}

/// One time bin. `mean_emotion` is `None` when no unit starts inside the
/// bin; empty bins are excluded from the overall mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalScore {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub mean_emotion: Option<f64>,
    pub n_units: usize,
}

/// Equal-width bins over the session plus the overall mood.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoodTimeline {
    pub intervals: Vec<IntervalScore>,
    /// Unit-weighted mean emotion over defined bins; equal to the flat mean
    /// of all per-unit emotions.
    pub overall_mean: f64,
    pub attention: bool,
}

impl MoodTimeline {
    /// Timeline of a session with no units: no bins, neutral mood.
    pub fn empty() -> Self {
        Self { intervals: Vec::new(), overall_mean: 0.0, attention: false }
    }
}

/// Session bounds: start of the first reply and stop of the last.
pub fn session_duration(units: &[CleanUtterance]) -> Result<(f64, f64), TimelineError> {
    if units.is_empty() {
        return Err(TimelineError::EmptySession);
    }
    let start = units.iter().map(|u| u.source.start).fold(f64::INFINITY, f64::min);
    let end = units.iter().map(|u| u.source.stop).fold(f64::NEG_INFINITY, f64::max);
    Ok((start, end))
}

/// Splits the session into `k` equal bins and averages line emotions per
/// bin. Units are assigned by start time; the last bin is right-closed so
/// no unit is lost. Emotions are clamped to [-1, +1].
pub fn bin_intervals(
    units: &[CleanUtterance],
    emotions: &[f64],
    k: usize,
) -> Result<MoodTimeline, TimelineError> {
    assert_eq!(units.len(), emotions.len(), "one emotion per unit");
    if k == 0 {
        return Err(TimelineError::BadK);
    }
    let (start, end) = session_duration(units)?;
    let width = (end - start) / k as f64;

    let mut sums = vec![0.0f64; k];
    let mut counts = vec![0usize; k];
    for (unit, &emotion) in units.iter().zip(emotions) {
        let idx = if width > 0.0 {
            (((unit.source.start - start) / width).floor() as usize).min(k - 1)
        } else {
            0
        };
        sums[idx] += emotion.clamp(-1.0, 1.0);
        counts[idx] += 1;
    }

    let intervals = (0..k)
        .map(|i| IntervalScore {
            index: i,
            t_start: start + i as f64 * width,
            t_end: if i + 1 == k { end } else { start + (i + 1) as f64 * width },
            mean_emotion: (counts[i] > 0).then(|| sums[i] / counts[i] as f64),
            n_units: counts[i],
        })
        .collect();

    // The unit-weighted mean over defined bins telescopes to the flat mean
    // over all units; computing it flat keeps it bit-identical to the
    // intensity path.
    let overall_mean =
        emotions.iter().map(|e| e.clamp(-1.0, 1.0)).sum::<f64>() / emotions.len() as f64;

    let mut timeline = MoodTimeline { intervals, overall_mean, attention: false };
    timeline.attention = attention_flag(&timeline, DEFAULT_ATTENTION_THRESHOLD);
    Ok(timeline)
}

/// True when the fraction of defined bins with a negative mean emotion
/// strictly exceeds `threshold`. No defined bins means no alert.
pub fn attention_flag(timeline: &MoodTimeline, threshold: f64) -> bool {
    let defined: Vec<f64> =
        timeline.intervals.iter().filter_map(|b| b.mean_emotion).collect();
    if defined.is_empty() {
        return false;
    }
    let negative = defined.iter().filter(|m| **m < 0.0).count();
    negative as f64 / defined.len() as f64 > threshold
}

/// Agreement report between the duration-based and intensity-based
/// percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub duration_percent: f64,
    pub intensity_percent: f64,
    pub diff: f64,
    pub pass: bool,
}

/// Converts the timeline's overall mean through the same affine map as the
/// intensity percentage and reports the absolute difference.
pub fn consistency_check(
    timeline: &MoodTimeline,
    intensity_percent: f64,
    tolerance: f64,
) -> ConsistencyReport {
    debug_assert!(tolerance >= 0.0);
    let duration_percent = percent_from_mean(timeline.overall_mean);
    let diff = (duration_percent - intensity_percent).abs();
    ConsistencyReport { duration_percent, intensity_percent, diff, pass: diff <= tolerance }
}
