//! Parsing of transcripts, PHQ-8 reference files, lexicons, and word lists
//! into validated in-memory records.
//!
//! Transcripts are tab-delimited with a `start_time  stop_time  speaker
//! value` header (the delimiter is overridable, see
//! [`parse_transcript_with`]). Reference files follow the AVEC2017
//! development-split CSV layout. Lexicons are five-column TSV; word lists are
//! one token per line. All parsers return immutable records that are safe to
//! hand to concurrent consumers.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Read};

use serde::Serialize;
use thiserror::Error;

/// Header of a transcript TSV, in column order.
pub const TRANSCRIPT_HEADER: [&str; 4] = ["start_time", "stop_time", "speaker", "value"];

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");
const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const BUNDLED_FILLERS: &str = include_str!("../data/fillers.txt");
const BUNDLED_PRONOUNS: &str = include_str!("../data/pronouns_first_singular.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: stop time {stop} is before start time {start}")]
    NegativeDuration { line: usize, start: f64, stop: f64 },
    #[error("no data rows")]
    EmptyFile,
    #[error("participant id must be a positive integer")]
    InvalidParticipantId,
    #[error("missing required column {0}")]
    MissingColumn(String),
    #[error("participant {participant}: PHQ8 score {score} outside 0..=24")]
    ScoreOutOfRange { participant: u32, score: i64 },
    #[error("participant {participant}: binary label contradicts the >=10 cut")]
    InconsistentBinary { participant: u32 },
    #[error("participant {participant}: item sum {sum} does not match total {total}")]
    ItemSumMismatch { participant: u32, sum: u32, total: u32 },
    #[error("duplicate lexicon token {0:?}")]
    DuplicateToken(String),
    #[error("lexicon token {0:?} has a non-positive weight")]
    NonPositiveWeight(String),
    #[error("unknown part-of-speech class {0:?}")]
    BadPosClass(String),
    #[error("empty word list for kind {0:?}")]
    EmptyList(WordListKind),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("reference csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One timed dialogue turn: start/stop seconds, speaker label, raw text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Utterance {
    pub start: f64,
    pub stop: f64,
    pub speaker: String,
    pub text: String,
}

/// A participant's transcript, ordered by non-decreasing start time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub participant_id: u32,
    pub utterances: Vec<Utterance>,
}

impl Transcript {
    /// Serializes back to transcript TSV. Times use the shortest decimal
    /// form that round-trips, so `parse -> to_tsv` reproduces well-formed
    /// input byte for byte.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&TRANSCRIPT_HEADER.join("\t"));
        out.push('\n');
        for u in &self.utterances {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", u.start, u.stop, u.speaker, u.text));
        }
        out
    }
}

/// Part-of-speech class attached to a lexicon entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PosClass {
    Adjective,
    Adverb,
    Verb,
    Other,
}

/// One lexicon entry: polarity sign, intensity weight, POS class, and
/// whether the token is a depression term that receives boosted weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexEntry {
    pub sign: i8,
    pub weight: f64,
    pub pos_class: PosClass,
    pub depression_term: bool,
}

/// Word-to-entry sentiment lexicon. Tokens are lowercase and unique.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexEntry>,
}

impl Lexicon {
    pub fn get(&self, token: &str) -> Option<&LexEntry> {
        self.entries.get(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordListKind {
    Stopwords,
    Fillers,
    PronounsFirstSingular,
}

/// A deduplicated set of lowercase tokens of one kind.
#[derive(Debug, Clone)]
pub struct WordList {
    pub kind: WordListKind,
    words: BTreeSet<String>,
}

impl WordList {
    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in sorted order (the backing set is ordered).
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Parses a transcript stream (tab-delimited) for the given participant.
pub fn parse_transcript(raw: impl Read, participant_id: u32) -> Result<Transcript, CorpusError> {
    parse_transcript_with(raw, participant_id, '\t')
}

/// Parses a transcript with an explicit column delimiter.
///
/// Rows keep file order. Rows out of start-time order are accepted but
/// re-sorted stably with a warning; corpus noise should not abort a batch.
pub fn parse_transcript_with(
    raw: impl Read,
    participant_id: u32,
    delimiter: char,
) -> Result<Transcript, CorpusError> {
    if participant_id == 0 {
        return Err(CorpusError::InvalidParticipantId);
    }
    let reader = BufReader::new(raw);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or(CorpusError::EmptyFile)?;
    let header = header?;
    check_transcript_header(&header, delimiter)?;

    let mut utterances = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1; // 1-based, counting the header
        // The value field may itself contain the delimiter; split off the
        // first three columns only.
        let mut parts = line.splitn(4, delimiter);
        let (start, stop, speaker, text) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => {
                return Err(CorpusError::MalformedRow {
                    line: lineno,
                    reason: format!("expected 4 columns, got {}", line.split(delimiter).count()),
                })
            }
        };
        let start = parse_seconds(start, "start_time", lineno)?;
        let stop = parse_seconds(stop, "stop_time", lineno)?;
        if stop < start {
            return Err(CorpusError::NegativeDuration { line: lineno, start, stop });
        }
        if speaker.trim().is_empty() {
            return Err(CorpusError::MalformedRow {
                line: lineno,
                reason: "empty speaker".into(),
            });
        }
        utterances.push(Utterance {
            start,
            stop,
            speaker: speaker.to_string(),
            text: text.to_string(),
        });
    }
    if utterances.is_empty() {
        return Err(CorpusError::EmptyFile);
    }
    if utterances.windows(2).any(|w| w[0].start > w[1].start) {
        log::warn!("participant {participant_id}: utterances out of time order, re-sorting");
        utterances.sort_by(|a, b| a.start.total_cmp(&b.start));
    }
    Ok(Transcript { participant_id, utterances })
}

fn check_transcript_header(header: &str, delimiter: char) -> Result<(), CorpusError> {
    let cols: Vec<&str> = header.split(delimiter).map(str::trim).collect();
    let ok = cols.len() == TRANSCRIPT_HEADER.len()
        && cols
            .iter()
            .zip(TRANSCRIPT_HEADER.iter())
            .all(|(got, want)| got.eq_ignore_ascii_case(want));
    if ok {
        Ok(())
    } else {
        Err(CorpusError::MalformedRow {
            line: 1,
            reason: format!("bad header {header:?}, expected {}", TRANSCRIPT_HEADER.join("\\t")),
        })
    }
}

fn parse_seconds(field: &str, name: &str, line: usize) -> Result<f64, CorpusError> {
    let malformed = |reason: String| CorpusError::MalformedRow { line, reason };
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| malformed(format!("unparsable {name} {field:?}")))?;
    if !v.is_finite() {
        return Err(malformed(format!("{name} must be finite")));
    }
    if v < 0.0 {
        return Err(malformed(format!("{name} must be non-negative")));
    }
    Ok(v)
}

/// A participant's PHQ-8 reference row.
///
/// `items` holds the eight per-question answers when the file carries them,
/// and is empty otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhqRecord {
    pub participant_id: u32,
    pub binary_label: u8,
    pub total_score: u8,
    pub gender: String,
    pub items: Vec<u8>,
}

/// Names of the eight per-item answer columns in the AVEC2017 layout.
pub const PHQ8_ITEM_COLUMNS: [&str; 8] = [
    "PHQ8_NoInterest",
    "PHQ8_Depressed",
    "PHQ8_Sleep",
    "PHQ8_Tired",
    "PHQ8_Appetite",
    "PHQ8_Failure",
    "PHQ8_Concentrating",
    "PHQ8_Moving",
];

/// Parses a PHQ-8 reference CSV (AVEC2017 dev-split layout).
pub fn parse_reference(raw: impl Read) -> Result<Vec<PhqRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(raw);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let required = |name: &str| col(name).ok_or_else(|| CorpusError::MissingColumn(name.into()));

    let id_col = required("Participant_ID")?;
    let binary_col = required("PHQ8_Binary")?;
    let score_col = required("PHQ8_Score")?;
    let gender_col = required("Gender")?;
    // Per-item columns are all-or-nothing; a partial set is treated as absent.
    let item_cols: Option<Vec<usize>> = PHQ8_ITEM_COLUMNS.iter().map(|n| col(n)).collect();

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let lineno = idx + 2;
        let malformed = |reason: String| CorpusError::MalformedRow { line: lineno, reason };
        let cell = |i: usize| row.get(i).unwrap_or("");

        let participant_id: u32 = cell(id_col)
            .parse()
            .map_err(|_| malformed(format!("unparsable participant id {:?}", cell(id_col))))?;
        let binary_label: u8 = cell(binary_col)
            .parse()
            .ok()
            .filter(|b| *b <= 1)
            .ok_or_else(|| malformed(format!("binary label must be 0 or 1, got {:?}", cell(binary_col))))?;
        let total: i64 = cell(score_col)
            .parse()
            .map_err(|_| malformed(format!("unparsable PHQ8 score {:?}", cell(score_col))))?;
        if !(0..=24).contains(&total) {
            return Err(CorpusError::ScoreOutOfRange { participant: participant_id, score: total });
        }
        let total_score = total as u8;
        let clinical_cut = u8::from(total_score >= 10);
        if binary_label != clinical_cut {
            return Err(CorpusError::InconsistentBinary { participant: participant_id });
        }

        let mut items = Vec::new();
        if let Some(cols) = &item_cols {
            for &c in cols {
                let item: u8 = cell(c)
                    .parse()
                    .ok()
                    .filter(|v| *v <= 3)
                    .ok_or_else(|| malformed(format!("item answer must be 0..=3, got {:?}", cell(c))))?;
                items.push(item);
            }
            let sum: u32 = items.iter().map(|&v| u32::from(v)).sum();
            if sum != u32::from(total_score) {
                return Err(CorpusError::ItemSumMismatch {
                    participant: participant_id,
                    sum,
                    total: u32::from(total_score),
                });
            }
        }

        records.push(PhqRecord {
            participant_id,
            binary_label,
            total_score,
            gender: cell(gender_col).to_string(),
            items,
        });
    }
    Ok(records)
}

/// Loads a five-column lexicon TSV: `token sign weight pos_class flag`.
/// Lines starting with `#` and blank lines are skipped.
pub fn load_lexicon(raw: impl Read) -> Result<Lexicon, CorpusError> {
    let reader = BufReader::new(raw);
    let mut entries = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let malformed = |reason: String| CorpusError::MalformedRow { line: lineno, reason };
        let cols: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(malformed(format!("expected 5 columns, got {}", cols.len())));
        }
        let token = cols[0].to_lowercase();
        let sign: i8 = match cols[1] {
            "+1" | "1" => 1,
            "-1" => -1,
            other => return Err(malformed(format!("sign must be +1 or -1, got {other:?}"))),
        };
        let weight: f64 = cols[2]
            .parse()
            .map_err(|_| malformed(format!("unparsable weight {:?}", cols[2])))?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(CorpusError::NonPositiveWeight(token));
        }
        let pos_class = match cols[3].to_lowercase().as_str() {
            "adjective" => PosClass::Adjective,
            "adverb" => PosClass::Adverb,
            "verb" => PosClass::Verb,
            "other" => PosClass::Other,
            other => return Err(CorpusError::BadPosClass(other.to_string())),
        };
        let depression_term = match cols[4] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(format!("flag must be 0 or 1, got {other:?}"))),
        };
        if entries
            .insert(token.clone(), LexEntry { sign, weight, pos_class, depression_term })
            .is_some()
        {
            return Err(CorpusError::DuplicateToken(token));
        }
    }
    Ok(Lexicon { entries })
}

/// Loads a word list, one token per line, lowercased and deduplicated.
/// `#` comment lines are skipped. An empty result is an error: the bundled
/// kinds are all required to be non-empty.
pub fn load_wordlist(raw: impl Read, kind: WordListKind) -> Result<WordList, CorpusError> {
    let reader = BufReader::new(raw);
    let mut words = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        words.insert(token.to_lowercase());
    }
    if words.is_empty() {
        return Err(CorpusError::EmptyList(kind));
    }
    Ok(WordList { kind, words })
}

/// The bundled default lexicon (replaceable via `load_lexicon`).
pub fn bundled_lexicon() -> Lexicon {
    load_lexicon(BUNDLED_LEXICON.as_bytes()).expect("bundled lexicon is well-formed")
}

pub fn bundled_stopwords() -> WordList {
    load_wordlist(BUNDLED_STOPWORDS.as_bytes(), WordListKind::Stopwords)
        .expect("bundled stopword list is well-formed")
}

pub fn bundled_fillers() -> WordList {
    load_wordlist(BUNDLED_FILLERS.as_bytes(), WordListKind::Fillers)
        .expect("bundled filler list is well-formed")
}

pub fn bundled_pronouns() -> WordList {
    load_wordlist(BUNDLED_PRONOUNS.as_bytes(), WordListKind::PronounsFirstSingular)
        .expect("bundled pronoun list is well-formed")
}
