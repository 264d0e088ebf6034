//! Behavioral classification of microblog accounts into six user types.
//!
//! The pipeline is: [`ingest`] validates a JSONL archive of account profiles
//! and recent tweets, [`features`] turns each account into a 17-value
//! vector, [`forest`] trains a bagged CART ensemble, and [`metrics`] runs
//! stratified cross-validation. [`synth`] generates labeled corpora with the
//! same schema for end-to-end runs.
//!
//! All randomness flows through [`rng::DetRng`], so every output is a pure
//! function of its inputs and seed, independent of thread count.

pub mod features;
pub mod forest;
pub mod ingest;
pub mod metrics;
pub mod rng;
pub mod synth;

pub use features::{extract_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use forest::{train_forest, RandomForestModel, TrainConfig};
pub use ingest::{parse_dataset, UserClass, UserRecord};
pub use metrics::{cross_validate, EvaluationReport};
pub use synth::{generate_corpus, SynthConfig};
