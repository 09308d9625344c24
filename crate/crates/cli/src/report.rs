//! Per-participant report artifacts. Serialization is deterministic: struct
//! field order fixes the JSON layout and floats print in shortest
//! round-trip form.

use serde::Serialize;

use moodmetric::pipeline::Analysis;
use moodmetric::timeline::MoodTimeline;

use crate::config::RunConfig;

#[derive(Serialize)]
pub struct Report<'a> {
    pub participant_id: u32,
    pub engine: &'a str,
    pub n_units: usize,
    pub components: &'a moodmetric::metrics::MetricComponents,
    pub level: moodmetric::metrics::DepressionLevel,
    pub intensity_percent: f64,
    pub pronoun_rate: f64,
    pub attention: bool,
    pub timeline: &'a MoodTimeline,
    pub consistency: &'a moodmetric::timeline::ConsistencyReport,
    pub config: &'a RunConfig,
}

pub fn report_json(participant_id: u32, analysis: &Analysis, cfg: &RunConfig) -> String {
    let report = Report {
        participant_id,
        engine: &cfg.engine,
        n_units: analysis.n_units,
        components: &analysis.components,
        level: analysis.level,
        intensity_percent: analysis.intensity_percent,
        pronoun_rate: analysis.pronoun_rate,
        attention: analysis.attention,
        timeline: &analysis.timeline,
        consistency: &analysis.consistency,
        config: cfg,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    json
}

/// Timeline as CSV: one row per bin, empty mean for bins with no units.
pub fn timeline_csv(timeline: &MoodTimeline) -> String {
    let mut out = String::from("bin,start,end,mean_emotion,n_units\n");
    for b in &timeline.intervals {
        let mean = b.mean_emotion.map(|m| m.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", b.index, b.t_start, b.t_end, mean, b.n_units));
    }
    out
}
