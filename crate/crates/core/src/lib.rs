//! Depression-severity scoring from timed interview transcripts.
//!
//! The pipeline runs in stages: [`corpus`] parses transcripts, PHQ-8
//! reference files, lexicons, and word lists; [`preprocess`] keeps only the
//! participant's replies and reduces each to a clean token sequence;
//! [`sentiment`] assigns a (score, magnitude) pair per reply, either from the
//! built-in weighted lexicon or through the [`remote`] adapter; [`metrics`]
//! folds per-reply sentiments into the X/Y/Z composite scale with a
//! four-level classification plus an intensity percentage; [`timeline`] bins
//! replies into equal time intervals for mood tracking; and [`eval`] compares
//! cohort scores against PHQ-8 reference data.
//!
//! [`pipeline::analyze_units`] wires the per-transcript stages together.

pub mod corpus;
pub mod eval;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod remote;
pub mod sentiment;
pub mod timeline;

pub use corpus::{
    CorpusError, LexEntry, Lexicon, PhqRecord, PosClass, Transcript, Utterance, WordList,
    WordListKind,
};
pub use eval::{ComparisonReport, ComparisonRow, EvalError, PhqCategory};
pub use metrics::{DepressionLevel, MetricComponents, MetricsError, NegativeWindow};
pub use pipeline::{Analysis, AnalysisParams};
pub use preprocess::CleanUtterance;
pub use remote::{CacheError, RemoteConfig, RemoteEngine, RemoteMode, SentimentCache};
pub use sentiment::{EngineError, LexiconEngine, PosWeights, Sentiment, SentimentEngine};
pub use timeline::{ConsistencyReport, IntervalScore, MoodTimeline, TimelineError};
