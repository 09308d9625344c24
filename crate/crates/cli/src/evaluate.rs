//! The `evaluate` subcommand: join algorithm scores with a PHQ-8 reference
//! file and write the comparison report as JSON and plain text.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::PathBuf;

use clap::Args;

use moodmetric::corpus::parse_reference;
use moodmetric::eval::{compare, EvalError};

use crate::CliError;

#[derive(Args)]
pub struct EvaluateArgs {
    /// Algorithm scores CSV with header `participant_id,score`
    /// (`analyze` writes one as `scores.csv`).
    pub scores: PathBuf,
    /// PHQ-8 reference CSV in the AVEC2017 dev-split layout.
    pub reference: PathBuf,
    /// Output directory for comparison.json and comparison.txt.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &EvaluateArgs) -> i32 {
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("moodmetric: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: &EvaluateArgs) -> Result<(), CliError> {
    let scores = parse_scores(&args.scores)?;
    let reference_file = File::open(&args.reference)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.reference.display())))?;
    let refs = parse_reference(reference_file)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.reference.display())))?;

    let report = compare(&scores, &refs).map_err(|e| match e {
        EvalError::NoOverlap => CliError::NoOverlap,
        other => CliError::Parse(other.to_string()),
    })?;

    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    let text = report.to_text();
    for (name, contents) in [("comparison.json", json), ("comparison.txt", text.clone())] {
        let path = out_dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn parse_scores(path: &PathBuf) -> Result<BTreeMap<u32, f64>, CliError> {
    let bad = |msg: String| CliError::Parse(format!("{}: {msg}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad("empty file".into()))?;
    if header.trim() != "participant_id,score" {
        return Err(bad(format!("expected header `participant_id,score`, got {header:?}")));
    }
    let mut scores = BTreeMap::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (id, score) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("line {}: expected two columns", idx + 1)))?;
        let id: u32 = id
            .trim()
            .parse()
            .map_err(|_| bad(format!("line {}: unparsable participant id {id:?}", idx + 1)))?;
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| bad(format!("line {}: unparsable score {score:?}", idx + 1)))?;
        if !score.is_finite() {
            return Err(bad(format!("line {}: score must be finite", idx + 1)));
        }
        if scores.insert(id, score).is_some() {
            return Err(bad(format!("line {}: duplicate participant id {id}", idx + 1)));
        }
    }
    if scores.is_empty() {
        return Err(bad("no score rows".into()));
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_score_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        fs::write(&path, "participant_id,score\n302,20.2\n346,36\n").unwrap();
        let scores = parse_scores(&path).unwrap();
        assert_eq!(scores.len(), 2);
        assert_eq!(scores[&302], 20.2);
        assert_eq!(scores[&346], 36.0);
    }

    #[test]
    fn rejects_bad_headers_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        fs::write(&path, "id,score\n302,20.2\n").unwrap();
        assert!(parse_scores(&path).is_err());
        fs::write(&path, "participant_id,score\n302,20.2\n302,21\n").unwrap();
        assert!(parse_scores(&path).is_err());
    }
}
