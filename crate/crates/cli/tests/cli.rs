//! End-to-end CLI behavior: exit codes, partial batches, config precedence,
//! artifact selection, and cache management.

mod common;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use common::{fixture, run, run_env, start_stub};

fn write_transcript(dir: &Path, name: &str, rows: &[(&str, &str, &str, &str)]) -> PathBuf {
    let mut text = String::from("start_time\tstop_time\tspeaker\tvalue\n");
    for (start, stop, speaker, value) in rows {
        text.push_str(&format!("{start}\t{stop}\t{speaker}\t{value}\n"));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn partial_batch_keeps_successes_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let good = fixture("301_TRANSCRIPT.csv");
    let missing = dir.path().join("42_missing.csv");
    let result = run(&[
        "analyze",
        good.to_str().unwrap(),
        missing.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 2);
    assert!(result.stderr.contains("42_missing.csv"), "stderr: {}", result.stderr);
    assert!(out.join("301.report.json").exists());
    let scores = fs::read_to_string(out.join("scores.csv")).unwrap();
    assert!(scores.starts_with("participant_id,score\n301,"));
}

#[test]
fn duplicate_participant_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_transcript(dir.path(), "77_a.csv", &[("0", "1", "Participant", "hello")]);
    let b = write_transcript(dir.path(), "77_b.csv", &[("0", "1", "Participant", "hello")]);
    let result = run(&["analyze", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(result.code, 2);
    assert!(result.stderr.contains("appears twice"));
}

#[test]
fn agent_only_transcript_yields_neutral_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_transcript(
        dir.path(),
        "55_agent_only.csv",
        &[("0", "1", "Ellie", "hi"), ("2", "3", "ellie ", "still me")],
    );
    let out = dir.path().join("out");
    let result = run(&["analyze", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("55.report.json")).unwrap()).unwrap();
    assert_eq!(report["n_units"].as_u64(), Some(0));
    assert_eq!(report["level"].as_str(), Some("Happy"));
    assert_eq!(report["intensity_percent"].as_f64(), Some(50.0));
    assert_eq!(report["timeline"]["intervals"].as_array().unwrap().len(), 0);
}

#[test]
fn comma_delimiter_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("88_comma.csv");
    fs::write(&path, "start_time,stop_time,speaker,value\n0,1,Participant,feeling good\n")
        .unwrap();
    let out = dir.path().join("out");
    let result = run(&[
        "analyze",
        path.to_str().unwrap(),
        "--delimiter",
        "comma",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("88.report.json")).unwrap()).unwrap();
    assert_eq!(report["n_units"].as_u64(), Some(1));
}

#[test]
fn config_file_applies_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "bins = 5\nagent_label = Wizard\n").unwrap();
    let transcript = fixture("301_TRANSCRIPT.csv");

    let out = dir.path().join("a");
    let result = run(&[
        "analyze",
        transcript.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("301.report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["bins"].as_u64(), Some(5));
    assert_eq!(report["config"]["agent_label"].as_str(), Some("Wizard"));
    // nobody in the fixture is named Wizard, so every line survives
    assert_eq!(report["n_units"].as_u64(), Some(10));
    assert_eq!(report["timeline"]["intervals"].as_array().unwrap().len(), 5);

    let out = dir.path().join("b");
    let result = run(&[
        "analyze",
        transcript.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
        "--bins",
        "4",
        "--agent-label",
        "Ellie",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("301.report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["bins"].as_u64(), Some(4));
    assert_eq!(report["n_units"].as_u64(), Some(7));
}

#[test]
fn format_selects_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = run(&[
        "analyze",
        fixture("301_TRANSCRIPT.csv").to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    assert!(out.join("301.report.json").exists());
    assert!(!out.join("301.timeline.csv").exists());
    assert!(!out.join("301.timeline.svg").exists());
    // the cross-run score index is always written for `evaluate`
    assert!(out.join("scores.csv").exists());
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "bin_count = 5\n").unwrap();
    let result = run(&[
        "analyze",
        fixture("301_TRANSCRIPT.csv").to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 2);
    assert!(result.stderr.contains("unknown config key"));
}

#[test]
fn evaluate_disjoint_participants_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(&scores, "participant_id,score\n999,12\n").unwrap();
    let result = run(&[
        "evaluate",
        scores.to_str().unwrap(),
        fixture("reference_phq8.csv").to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(result.code, 4);
}

#[test]
fn evaluate_single_overlap_marks_correlation_undefined() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(&scores, "participant_id,score\n439,29\n").unwrap();
    let out = dir.path().join("out");
    let result = run(&[
        "evaluate",
        scores.to_str().unwrap(),
        fixture("reference_phq8.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("comparison.json")).unwrap()).unwrap();
    assert!(report["pearson"].is_null());
    assert!(report["spearman"].is_null());
    assert!(result.stdout.contains("Pearson:  undefined"));
}

#[test]
fn evaluate_missing_scores_file_exits_2() {
    let result = run(&[
        "evaluate",
        "/nonexistent/scores.csv",
        fixture("reference_phq8.csv").to_str().unwrap(),
    ]);
    assert_eq!(result.code, 2);
}

#[test]
fn cache_record_then_verify() {
    let endpoint = start_stub();
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let covered = fixture("301_TRANSCRIPT.csv");

    let result = run_env(
        &["cache", "record", covered.to_str().unwrap(), "--cache", cache.to_str().unwrap()],
        &[("MOODMETRIC_ENDPOINT", &endpoint)],
    );
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    assert!(result.stdout.contains("recorded"));

    let result = run(&[
        "cache",
        "verify",
        covered.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    assert!(result.stdout.contains("covers all units"));

    // a transcript with unseen lines leaves gaps
    let extra = write_transcript(
        dir.path(),
        "302_extra.csv",
        &[("0", "1", "Participant", "a reply the cache has never seen")],
    );
    let result = run(&[
        "cache",
        "verify",
        covered.to_str().unwrap(),
        extra.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 3);
    assert!(result.stderr.contains("missing"));

    // a different preprocessing configuration invalidates the cache outright
    let result = run(&[
        "cache",
        "verify",
        covered.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
        "--agent-label",
        "Wizard",
    ]);
    assert_eq!(result.code, 3);
    assert!(result.stderr.contains("preprocessing configuration"), "stderr: {}", result.stderr);
}

#[test]
fn record_mode_analyze_writes_usable_cache() {
    let endpoint = start_stub();
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let out = dir.path().join("out");
    let transcript = fixture("301_TRANSCRIPT.csv");

    let result = run_env(
        &[
            "analyze",
            transcript.to_str().unwrap(),
            "--engine",
            "remote",
            "--remote-mode",
            "record",
            "--cache",
            cache.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[("MOODMETRIC_ENDPOINT", &endpoint)],
    );
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let recorded_report = fs::read_to_string(out.join("301.report.json")).unwrap();

    // the cache recorded along the way replays to the same report, modulo
    // the echoed remote_mode
    let out2 = dir.path().join("out2");
    let result = run(&[
        "analyze",
        transcript.to_str().unwrap(),
        "--engine",
        "remote",
        "--remote-mode",
        "replay",
        "--cache",
        cache.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(result.code, 0, "stderr: {}", result.stderr);
    let replayed_report = fs::read_to_string(out2.join("301.report.json")).unwrap();
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("remote_mode") && !l.contains("\"out\"") && !l.contains("\"cache\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&recorded_report), strip(&replayed_report));
}

#[test]
fn remote_record_without_endpoint_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let result = run(&[
        "cache",
        "record",
        fixture("301_TRANSCRIPT.csv").to_str().unwrap(),
        "--cache",
        dir.path().join("c.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(result.code, 2);
    assert!(result.stderr.contains("MOODMETRIC_ENDPOINT"));
}
