//! Bagged random forest of CART trees.
//!
//! Tree `t` of a forest trained with seed `s` draws its bootstrap sample and
//! all of its per-node feature subsets from `DetRng::stream(s, t)`, so the
//! trained model depends only on the data and the config, never on how many
//! worker threads built it.

mod model_file;
mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureConfig, FeatureVector, NormalizationParams, FEATURE_COUNT};
use crate::ingest::UserClass;
use crate::rng::DetRng;

pub use model_file::{ModelError, MODEL_FORMAT_VERSION};
pub use tree::{
    best_split, bootstrap_sample, build_tree, gini_impurity, majority, ClassCounts, Split, TreeNode,
};


pub type Probabilities = [f64; UserClass::COUNT];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub n_trees: usize,
    /// `None` grows until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub features_per_split: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            // floor(sqrt(17))
            features_per_split: 4,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ForestError> {
        let bad = |msg: String| Err(ForestError::InvalidConfig(msg));
        if self.n_trees == 0 {
            return bad("n_trees must be at least 1".into());
        }
        if self.features_per_split == 0 || self.features_per_split > FEATURE_COUNT {
            return bad(format!("features_per_split must be in 1..={FEATURE_COUNT}"));
        }
        if self.min_samples_split == 0 {
            return bad("min_samples_split must be at least 1".into());
        }
        if self.max_depth == Some(0) {
            return bad("max_depth must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForestError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),
    #[error("training data contains a single class ({0})")]
    DegenerateDataset(UserClass),
    #[error("feature vector has non-finite entries")]
    InvalidInput,
}

/// A trained ensemble. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    pub config: TrainConfig,
    /// Extraction settings the training vectors were built with; inputs
    /// classified later must be extracted the same way.
    pub features: FeatureConfig,
    pub normalization: NormalizationParams,
    pub trees: Vec<TreeNode>,
}

/// Fits normalization on `dataset`, then grows `config.n_trees` trees, each on
/// its own bootstrap resample of the normalized data.
pub fn train_forest(
    dataset: &[(FeatureVector, UserClass)],
    config: &TrainConfig,
) -> Result<RandomForestModel, ForestError> {
    config.validate()?;
    if dataset.len() < 2 {
        return Err(ForestError::TooFewSamples(dataset.len()));
    }
    if dataset.iter().any(|(v, _)| !v.is_finite()) {
        return Err(ForestError::InvalidInput);
    }
    let first = dataset[0].1;
    if dataset.iter().all(|(_, c)| *c == first) {
        return Err(ForestError::DegenerateDataset(first));
    }

    let raw: Vec<FeatureVector> = dataset.iter().map(|(v, _)| *v).collect();
    let normalization = NormalizationParams::fit(&raw).expect("non-empty");
    let vectors: Vec<FeatureVector> = raw.iter().map(|v| normalization.apply(v)).collect();
    let labels: Vec<UserClass> = dataset.iter().map(|(_, c)| *c).collect();

    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = DetRng::stream(config.seed, t as u64);
            let mut sample = bootstrap_sample(vectors.len(), &mut rng);
            tree::build_tree_indexed(&vectors, &labels, &mut sample, config, &mut rng)
        })
        .collect();

    Ok(RandomForestModel {
        config: config.clone(),
        features: FeatureConfig::default(),
        normalization,
        trees,
    })
}

impl RandomForestModel {
    /// Fraction of trees voting for each class.
    pub fn predict_proba(&self, raw: &FeatureVector) -> Result<Probabilities, ForestError> {
        if !raw.is_finite() {
            return Err(ForestError::InvalidInput);
        }
        let v = self.normalization.apply(raw);
        let mut votes = [0usize; UserClass::COUNT];
        for tree in &self.trees {
            votes[tree.vote(&v).index()] += 1;
        }
        let total = self.trees.len() as f64;
        Ok(votes.map(|n| n as f64 / total))
    }

    pub fn predict(&self, raw: &FeatureVector) -> Result<UserClass, ForestError> {
        Ok(argmax(&self.predict_proba(raw)?))
    }
}

pub fn predict_proba(model: &RandomForestModel, raw: &FeatureVector) -> Result<Probabilities, ForestError> {
    model.predict_proba(raw)
}

pub fn predict(model: &RandomForestModel, raw: &FeatureVector) -> Result<UserClass, ForestError> {
    model.predict(raw)
}

/// Highest score, ties to the lowest class index.
pub fn argmax(scores: &Probabilities) -> UserClass {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    UserClass::ALL[best]
}
