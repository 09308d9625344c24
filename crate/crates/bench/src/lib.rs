//! Deterministic synthetic fixtures shared by the benchmark suite.

use moodmetric::corpus::{Transcript, Utterance};

const AGENT_LINE: &str = "how have you been feeling this week";

const PARTICIPANT_LINES: [&str; 8] = [
    "um i guess i've been feeling pretty down lately",
    "i don't really <sigh> sleep well anymore",
    "work has been fine i suppose",
    "mmm hmm",
    "i used to enjoy hiking and seeing friends",
    "it's been hard to get out of bed most days",
    "<laugh> yeah maybe",
    "everything just feels so empty and hopeless sometimes",
];

/// Transcript with `n` alternating agent/participant turns drawn from a
/// fixed phrase pool; identical for a given `n`.
pub fn synthetic_transcript(n: usize) -> Transcript {
    let utterances = (0..n)
        .map(|i| {
            let start = i as f64 * 7.5;
            let (speaker, text) = if i % 2 == 0 {
                ("Ellie", AGENT_LINE)
            } else {
                ("Participant", PARTICIPANT_LINES[(i / 2) % PARTICIPANT_LINES.len()])
            };
            Utterance { start, stop: start + 6.0, speaker: speaker.into(), text: text.into() }
        })
        .collect();
    Transcript { participant_id: 300, utterances }
}
