//! Cohort evaluation against PHQ-8 reference data: clinical thresholds,
//! per-participant comparison rows, and concordance/correlation diagnostics.
//!
//! Algorithm scores and PHQ-8 totals come from different procedures, so the
//! correlations here are descriptive only; every report carries [`CAVEAT`]
//! verbatim.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::PhqRecord;
use crate::metrics::{classify, DepressionLevel};

/// Fixed non-comparability note embedded in every report.
pub const CAVEAT: &str = "Algorithm scores and PHQ-8 scores are produced by different \
procedures and are not directly comparable; agreement and correlation figures are \
descriptive diagnostics, not clinical validation.";

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("PHQ8 total {0} outside 0..=24")]
    PhqOutOfRange(u8),
    #[error("participant {participant}: algorithm score {score} outside [0, 100]")]
    ScoreOutOfRange { participant: u32, score: f64 },
    #[error("no participant appears in both inputs")]
    NoOverlap,
}

/// Clinical PHQ-8 band: 0..=9 normal, 10..=19 major depression, 20..=24
/// severe major depression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PhqCategory {
    Normal,
    MajorDepression,
    SevereMajorDepression,
}

impl std::fmt::Display for PhqCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Normal => "Normal",
            Self::MajorDepression => "Major Depression",
            Self::SevereMajorDepression => "Severe Major Depression",
        };
        f.write_str(s)
    }
}

pub fn phq8_category(total_score: u8) -> Result<PhqCategory, EvalError> {
    match total_score {
        0..=9 => Ok(PhqCategory::Normal),
        10..=19 => Ok(PhqCategory::MajorDepression),
        20..=24 => Ok(PhqCategory::SevereMajorDepression),
        _ => Err(EvalError::PhqOutOfRange(total_score)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub participant_id: u32,
    pub algorithm_score: f64,
    pub algorithm_level: DepressionLevel,
    pub phq8_score: u8,
    pub phq8_category: PhqCategory,
    /// Binary agreement: algorithm Happy if and only if PHQ-8 Normal. The
    /// finer levels are reported but not scored; no mapping between them and
    /// the PHQ-8 bands is defined.
    pub concordant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// `None` marks an undefined correlation (fewer than 2 rows or zero
    /// variance); serialized as null, never NaN.
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub caveat: String,
}

impl ComparisonReport {
    pub fn concordant_count(&self) -> usize {
        self.rows.iter().filter(|r| r.concordant).count()
    }

    /// Plain-text rendering: a three-column table mirroring the reference
    /// layout, then the diagnostics and the caveat.
    pub fn to_text(&self) -> String {
        let headers = ["Transcript Number", "Algorithm Score", "PHQ8 Score"];
        let cells: Vec<[String; 3]> = self
            .rows
            .iter()
            .map(|r| {
                [r.participant_id.to_string(), r.algorithm_score.to_string(), r.phq8_score.to_string()]
            })
            .collect();
        let width = |i: usize| {
            cells.iter().map(|c| c[i].len()).chain([headers[i].len()]).max().unwrap_or(0)
        };
        let (w0, w1, w2) = (width(0), width(1), width(2));

        let mut out = String::new();
        out.push_str(&format!("{:<w0$} | {:<w1$} | {}\n", headers[0], headers[1], headers[2]));
        out.push_str(&format!("{}-+-{}-+-{}\n", "-".repeat(w0), "-".repeat(w1), "-".repeat(w2)));
        for c in &cells {
            out.push_str(&format!("{:<w0$} | {:<w1$} | {}\n", c[0], c[1], c[2]));
        }
        out.push('\n');
        out.push_str(&format!(
            "Concordant (Happy <-> Normal): {}/{}\n",
            self.concordant_count(),
            self.rows.len()
        ));
        let fmt_corr = |v: Option<f64>| match v {
            Some(v) => format!("{v:.6}"),
            None => "undefined".to_string(),
        };
        out.push_str(&format!("Pearson:  {}\n", fmt_corr(self.pearson)));
        out.push_str(&format!("Spearman: {}\n", fmt_corr(self.spearman)));
        out.push('\n');
        out.push_str(&format!("Note: {}\n", self.caveat));
        out
    }
}

/// Inner-joins algorithm scores with reference records on participant id and
/// computes the comparison diagnostics. Rows come out sorted by participant
/// id regardless of input order.
pub fn compare(
    scores: &BTreeMap<u32, f64>,
    refs: &[PhqRecord],
) -> Result<ComparisonReport, EvalError> {
    let by_id: BTreeMap<u32, &PhqRecord> =
        refs.iter().map(|r| (r.participant_id, r)).collect();

    let mut rows = Vec::new();
    for (&participant_id, &algorithm_score) in scores {
        let Some(record) = by_id.get(&participant_id) else { continue };
        let algorithm_level = classify(algorithm_score)
            .map_err(|_| EvalError::ScoreOutOfRange { participant: participant_id, score: algorithm_score })?;
        let phq8_cat = phq8_category(record.total_score)?;
        let concordant =
            (algorithm_level == DepressionLevel::Happy) == (phq8_cat == PhqCategory::Normal);
        rows.push(ComparisonRow {
            participant_id,
            algorithm_score,
            algorithm_level,
            phq8_score: record.total_score,
            phq8_category: phq8_cat,
            concordant,
        });
    }
    if rows.is_empty() {
        return Err(EvalError::NoOverlap);
    }

    let xs: Vec<f64> = rows.iter().map(|r| r.algorithm_score).collect();
    let ys: Vec<f64> = rows.iter().map(|r| f64::from(r.phq8_score)).collect();
    Ok(ComparisonReport {
        rows,
        pearson: pearson(&xs, &ys),
        spearman: spearman(&xs, &ys),
        caveat: CAVEAT.to_string(),
    })
}

/// Pearson correlation, clamped into [-1, 1]. `None` with fewer than two
/// points or zero variance on either side.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&ranks(xs), &ranks(ys))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based ranks; ties share the average rank of their run
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
