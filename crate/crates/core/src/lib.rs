//! Interpretable text categorization with the Tsetlin Machine.
//!
//! Documents become term-presence bit vectors; each class owns a pool of
//! conjunctive clauses whose literals are chosen by teams of Tsetlin
//! Automata. Learned clauses export directly as `IF ... THEN` rules.
//!
//! Real-valued quantities are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix them to `f64`.

pub mod automata;
pub mod clause;
pub mod dataset;
pub mod document;
pub mod error;
pub mod explain;
pub mod learner;
pub mod metrics;
pub mod model_file;
pub mod rng;
pub mod scalar;
pub mod split;
pub mod text;

pub use automata::{Action, Feedback, TsetlinAutomaton};
pub use clause::{Clause, EvalMode, Literal, Polarity};
pub use document::BitDocument;
pub use error::{Error, Result};
pub use explain::{Explanation, Rule, RuleFormat};
pub use scalar::Scalar;
pub use split::{SplitIndices, SplitKind, SplitPlan};
pub use text::{Corpus, RawCorpus, RawDocument, TokenizerConfig, TrainSplit, Vocabulary};

pub type HyperParams = learner::HyperParams<f64>;
pub type TsetlinMachine = learner::TsetlinMachine<f64>;
pub type MultiClassTm = learner::MultiClassTm<f64>;
pub type TrainingHistory = learner::TrainingHistory<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type RunSummary = metrics::RunSummary<f64>;
pub type ModelBundle = model_file::ModelBundle<f64>;
pub type FeatureSelection = text::FeatureSelection<f64>;

pub type HyperParamsF32 = learner::HyperParams<f32>;
pub type MultiClassTmF32 = learner::MultiClassTm<f32>;
