//! Rule-based extraction of wildlife trafficking events from plain-text
//! enforcement briefs.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`corpus`] loads a brief and splits it into paragraphs, sentences and tokens.
//! * [`lexicon`] holds the ANIMAL, PRODUCT and COUNTRY term lists.
//! * [`ruler`] matches lexicon phrases leftmost-longest over tokens.
//! * [`measure`] finds numbers, weights and arrest counts.
//! * [`assemble`] groups spans into [`TraffickingEvent`]s.
//! * [`store`] persists events in SQLite and converts them to and from CSV.
//! * [`eval`] scores predictions against gold annotations.
//! * [`report`] renders summary statistics as JSON and a static HTML page.

pub mod assemble;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod inflect;
pub mod lexicon;
pub mod measure;
pub mod pipeline;
pub mod report;
pub mod ruler;
pub mod store;

pub use assemble::{assemble, TraffickingEvent};
pub use config::HeuristicConfig;
pub use corpus::{load_report, Abbreviations, ReportDocument, SentenceSpan, Token};
pub use error::{ConfigError, CorpusError, Error, EvalError, LexiconError, StoreError};
pub use lexicon::{Label, Lexicon};
pub use measure::{ArrestCount, Quantity, Weight};
pub use pipeline::Pipeline;
pub use ruler::{compile, find_entities, CompiledMatcher, EntitySpan};
pub use store::{EventStore, SummaryFilter, SummaryStats};
