//! Transcript cleanup: keep only the participant's replies and reduce each
//! to a clean token sequence.
//!
//! The stages run in a fixed order: drop the agent's lines, strip
//! `<...>` action annotations, drop replies that were only actions, then
//! tokenize on whitespace with filler and stopword removal. A reply whose
//! tokens are all stopwords survives with an empty token list and scores
//! neutral downstream; only action-only replies are dropped.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{Transcript, Utterance, WordList};

/// One cleaned participant reply.
///
/// `all_tokens` is the token stream before stopword removal (fillers already
/// gone); pronoun counting runs on it because first-person pronouns are
/// typically stopwords. `tokens` is the final stream the sentiment engine
/// sees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleanUtterance {
    pub source: Utterance,
    pub clean_text: String,
    pub all_tokens: Vec<String>,
    pub tokens: Vec<String>,
}

/// Keeps only utterances whose speaker differs from `agent_label`
/// (case-insensitive, trimmed). Order is preserved; an empty result is fine.
pub fn filter_participant(t: &Transcript, agent_label: &str) -> Transcript {
    let agent = agent_label.trim();
    Transcript {
        participant_id: t.participant_id,
        utterances: t
            .utterances
            .iter()
            .filter(|u| !u.speaker.trim().eq_ignore_ascii_case(agent))
            .cloned()
            .collect(),
    }
}

/// Removes every balanced `<...>` span (nested brackets count as one span),
/// collapses whitespace runs to single spaces, and trims. An unmatched `<`
/// is kept literally.
pub fn strip_annotations(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut kept = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '<' {
            if let Some(end) = balanced_span_end(&chars, i) {
                i = end + 1;
                continue;
            }
        }
        kept.push(chars[i]);
        i += 1;
    }
    collapse_whitespace(&kept)
}

/// Index of the `>` closing the span opened at `open`, or None when the
/// bracket never closes.
fn balanced_span_end(chars: &[char], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, &c) in chars.iter().enumerate().skip(open) {
        match c {
            '<' => depth += 1,
            '>' => {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
            _ => {}
        }
    }
    None
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits on whitespace, lowercases, and strips leading/trailing ASCII
/// punctuation (interior apostrophes and hyphens survive). Angle brackets
/// also separate tokens: an unmatched bracket survives in `clean_text` but
/// never inside a token. Tokens that end up empty are dropped.
fn split_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| c.is_whitespace() || c == '<' || c == '>')
        .map(|w| w.to_lowercase())
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Tokenizes annotation-stripped text, removing fillers then stopwords.
pub fn tokenize_clean(text: &str, stopwords: &WordList, fillers: &WordList) -> Vec<String> {
    split_tokens(text)
        .into_iter()
        .filter(|t| !fillers.contains(t))
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// Runs the full cleanup over a transcript.
///
/// Agent lines are dropped, annotations stripped, and replies whose stripped
/// text is empty (action-only replies) are removed entirely. Survivors keep
/// their original timing.
pub fn prepare_transcript(
    t: &Transcript,
    stopwords: &WordList,
    fillers: &WordList,
    agent_label: &str,
) -> Vec<CleanUtterance> {
    filter_participant(t, agent_label)
        .utterances
        .into_iter()
        .filter_map(|source| {
            let clean_text = strip_annotations(&source.text);
            if clean_text.is_empty() {
                return None;
            }
            let all_tokens: Vec<String> = split_tokens(&clean_text)
                .into_iter()
                .filter(|t| !fillers.contains(t))
                .collect();
            let tokens =
                all_tokens.iter().filter(|t| !stopwords.contains(t)).cloned().collect();
            Some(CleanUtterance { source, clean_text, all_tokens, tokens })
        })
        .collect()
}

/// Fingerprint of the preprocessing configuration (agent label plus both
/// word lists). Remote sentiment caches record it and refuse to replay under
/// a different configuration.
pub fn config_fingerprint(agent_label: &str, stopwords: &WordList, fillers: &WordList) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"agent=");
    hasher.update(agent_label.trim().to_lowercase().as_bytes());
    hasher.update(b"\nstopwords=");
    for w in stopwords.iter() {
        hasher.update(w.as_bytes());
        hasher.update(b",");
    }
    hasher.update(b"\nfillers=");
    for w in fillers.iter() {
        hasher.update(w.as_bytes());
        hasher.update(b",");
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
