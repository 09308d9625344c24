//! Per-transcript composition: engine scoring, composite metrics, intensity
//! percentage, pronoun rate, mood timeline, and the consistency check.

use serde::Serialize;

use crate::corpus::WordList;
use crate::metrics::{
    classify, compute_components_with, intensity_overall, DepressionLevel, MetricComponents,
    NegativeWindow,
};
use crate::preprocess::CleanUtterance;
use crate::sentiment::{pronoun_rate, EngineError, Sentiment, SentimentEngine};
use crate::timeline::{
    attention_flag, bin_intervals, consistency_check, ConsistencyReport, MoodTimeline,
};

/// Tunables for one analysis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisParams {
    pub window: NegativeWindow,
    pub bins: usize,
    pub attention_threshold: f64,
    pub consistency_tolerance: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            window: NegativeWindow::default(),
            bins: 10,
            attention_threshold: 0.5,
            consistency_tolerance: 1.0,
        }
    }
}

/// Everything the pipeline derives from one transcript.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub n_units: usize,
    pub components: MetricComponents,
    pub level: DepressionLevel,
    pub intensity_percent: f64,
    pub pronoun_rate: f64,
    pub attention: bool,
    pub timeline: MoodTimeline,
    pub consistency: ConsistencyReport,
}

/// Runs the full per-transcript analysis over prepared units.
///
/// A transcript whose cleanup left no units (all agent lines or action-only
/// replies) yields a neutral report with an empty timeline rather than an
/// error, so batch runs keep going.
pub fn analyze_units(
    units: &[CleanUtterance],
    engine: &dyn SentimentEngine,
    pronouns: &WordList,
    params: &AnalysisParams,
) -> Result<Analysis, EngineError> {
    assert!(params.bins >= 1, "bin count must be at least 1");
    let sentiments: Vec<Sentiment> =
        units.iter().map(|u| engine.analyze(u)).collect::<Result<_, _>>()?;

    let components = compute_components_with(&sentiments, params.window);
    let level = classify(components.s).expect("composite score is clamped to [0, 100]");

    let emotions: Vec<f64> = sentiments.iter().map(|s| s.score * s.magnitude).collect();
    let intensity_percent = intensity_overall(&emotions);

    let mut timeline = if units.is_empty() {
        MoodTimeline::empty()
    } else {
        bin_intervals(units, &emotions, params.bins).expect("non-empty units, bins >= 1")
    };
    timeline.attention = attention_flag(&timeline, params.attention_threshold);
    let consistency =
        consistency_check(&timeline, intensity_percent, params.consistency_tolerance);

    Ok(Analysis {
        n_units: units.len(),
        components,
        level,
        intensity_percent,
        pronoun_rate: pronoun_rate(units, pronouns),
        attention: timeline.attention,
        timeline,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{bundled_pronouns, Utterance};
    use crate::sentiment::LexiconEngine;

    fn unit(start: f64, stop: f64, tokens: &[&str]) -> CleanUtterance {
        CleanUtterance {
            source: Utterance {
                start,
                stop,
                speaker: "Participant".into(),
                text: tokens.join(" "),
            },
            clean_text: tokens.join(" "),
            all_tokens: tokens.iter().map(|t| t.to_string()).collect(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn empty_transcript_yields_neutral_report() {
        let engine = LexiconEngine::bundled();
        let analysis =
            analyze_units(&[], &engine, &bundled_pronouns(), &AnalysisParams::default()).unwrap();
        assert_eq!(analysis.n_units, 0);
        assert_eq!(analysis.components.s, 0.0);
        assert_eq!(analysis.level, DepressionLevel::Happy);
        assert_eq!(analysis.intensity_percent, 50.0);
        assert_eq!(analysis.pronoun_rate, 0.0);
        assert!(!analysis.attention);
        assert!(analysis.timeline.intervals.is_empty());
        assert_eq!(analysis.consistency.diff, 0.0);
        assert!(analysis.consistency.pass);
    }

    #[test]
    fn wires_stages_together() {
        let engine = LexiconEngine::bundled();
        let units = [
            unit(0.0, 5.0, &["feel", "hopeless", "empty"]),
            unit(20.0, 25.0, &["doing", "good"]),
            unit(40.0, 50.0, &["sleeping", "fine"]),
        ];
        let analysis =
            analyze_units(&units, &engine, &bundled_pronouns(), &AnalysisParams::default())
                .unwrap();
        assert_eq!(analysis.n_units, 3);
        assert_eq!(analysis.components.n_negative, 1);
        assert!(analysis.components.s > 25.0 && analysis.components.s <= 50.0);
        assert_eq!(analysis.level, DepressionLevel::LowDepressed);
        // both percentage paths see the same emotions
        assert_eq!(analysis.consistency.diff, 0.0);
        let binned: usize = analysis.timeline.intervals.iter().map(|b| b.n_units).sum();
        assert_eq!(binned, 3);
    }

    #[test]
    fn engine_failures_propagate() {
        struct Failing;
        impl SentimentEngine for Failing {
            fn name(&self) -> &str {
                "failing"
            }
            fn analyze(&self, _: &CleanUtterance) -> Result<Sentiment, EngineError> {
                Err(EngineError::CacheMiss("deadbeef".into()))
            }
        }
        let units = [unit(0.0, 1.0, &["sad"])];
        let err = analyze_units(&units, &Failing, &bundled_pronouns(), &AnalysisParams::default())
            .unwrap_err();
        assert!(matches!(err, EngineError::CacheMiss(_)));
    }
}
