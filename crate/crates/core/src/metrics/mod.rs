//! Stratified k-fold cross-validation with pooled per-class precision,
//! recall, F-measure and one-vs-rest AUC.
//!
//! Every fold refits normalization and the forest on the other k−1 folds.
//! Held-out predictions from all folds are pooled before any metric is
//! computed, so a class too small to appear in every fold still gets a
//! single well-defined row.

mod auc;
mod folds;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{extract_all, format_significant, FeatureConfig, FeatureVector};
use crate::forest::{train_forest, ForestError, Probabilities, TrainConfig};
use crate::ingest::{UserClass, UserRecord};

pub use auc::auc_one_vs_rest;
pub use folds::{stratified_folds, FoldAssignment};

pub type ConfusionMatrix = [[u64; UserClass::COUNT]; UserClass::COUNT];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("k = {k} is invalid for {n} records (need 2 <= k <= n)")]
    InvalidK { k: usize, n: usize },
    #[error("AUC undefined with {positives} positives and {negatives} negatives")]
    UndefinedAuc { positives: usize, negatives: usize },
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("scores must be finite")]
    NonFiniteScore,
    #[error("{} record(s) have no label, e.g. index {}", .0.len(), .0[0])]
    Unlabeled(Vec<usize>),
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: ForestError },
}

/// `(precision, recall, F)` for one class from a confusion matrix whose rows
/// are true classes. Empty column → precision 0; empty row → recall 0;
/// `P + R = 0` → F 0.
pub fn precision_recall_f(confusion: &ConfusionMatrix, class_index: usize) -> (f64, f64, f64) {
    let tp = confusion[class_index][class_index] as f64;
    let predicted: u64 = confusion.iter().map(|row| row[class_index]).sum();
    let actual: u64 = confusion[class_index].iter().sum();
    let precision = if predicted == 0 { 0.0 } else { tp / predicted as f64 };
    let recall = if actual == 0 { 0.0 } else { tp / actual as f64 };
    (precision, recall, f_measure(precision, recall))
}

fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: UserClass,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// `None` when the pooled predictions hold no positive (or no negative) for this class.
    pub auc: Option<f64>,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledPrediction {
    pub index: usize,
    pub user_id: String,
    pub fold: usize,
    pub truth: UserClass,
    pub predicted: UserClass,
    pub scores: Probabilities,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub k: usize,
    pub seed: u64,
    pub train_config: TrainConfig,
    pub feature_config: FeatureConfig,
    pub n_records: usize,
    pub class_order: Vec<UserClass>,
    /// Rows are true classes, columns predicted classes.
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub predictions: Vec<PooledPrediction>,
}

impl EvaluationReport {
    pub fn accuracy(&self) -> f64 {
        let correct: u64 = (0..UserClass::COUNT).map(|i| self.confusion[i][i]).sum();
        correct as f64 / self.n_records as f64
    }

    /// Mean AUC over classes where it is defined.
    pub fn macro_auc(&self) -> Option<f64> {
        let defined: Vec<f64> = self.per_class.iter().filter_map(|m| m.auc).collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Per-class table: `class,precision,recall,f_measure,auc,support`.
    pub fn write_class_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["class", "precision", "recall", "f_measure", "auc", "support"])?;
        for m in &self.per_class {
            writer.write_record([
                m.class.name().to_owned(),
                format_significant(m.precision),
                format_significant(m.recall),
                format_significant(m.f_measure),
                m.auc.map_or_else(|| "undefined".to_owned(), format_significant),
                m.support.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Cross-validates labeled records with the default feature settings.
pub fn cross_validate(
    records: &[UserRecord],
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, MetricsError> {
    cross_validate_with(records, &FeatureConfig::default(), config, k, seed)
}

pub fn cross_validate_with(
    records: &[UserRecord],
    feature_config: &FeatureConfig,
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, MetricsError> {
    let unlabeled: Vec<usize> = (0..records.len()).filter(|&i| records[i].label.is_none()).collect();
    if !unlabeled.is_empty() {
        return Err(MetricsError::Unlabeled(unlabeled));
    }
    let vectors = extract_all(records, feature_config);
    let dataset: Vec<(FeatureVector, UserClass)> = vectors
        .into_iter()
        .zip(records)
        .map(|(v, r)| (v, r.label.expect("checked above")))
        .collect();
    let ids: Vec<String> = records.iter().map(|r| r.profile.user_id.clone()).collect();
    let mut report = cross_validate_dataset(&dataset, &ids, config, k, seed)?;
    report.feature_config = *feature_config;
    Ok(report)
}

/// Cross-validation on precomputed feature vectors. `ids` labels the pooled
/// predictions and must be as long as `dataset`.
pub fn cross_validate_dataset(
    dataset: &[(FeatureVector, UserClass)],
    ids: &[String],
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, MetricsError> {
    assert_eq!(dataset.len(), ids.len(), "one id per sample");
    let labels: Vec<UserClass> = dataset.iter().map(|(_, c)| *c).collect();
    let folds = stratified_folds(&labels, k, seed)?;

    let fold_scores: Vec<Vec<(usize, Probabilities)>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train: Vec<(FeatureVector, UserClass)> = (0..dataset.len())
                .filter(|&i| folds.fold_of[i] != fold)
                .map(|i| dataset[i])
                .collect();
            let model = train_forest(&train, config).map_err(|source| MetricsError::Fold { fold, source })?;
            folds
                .members(fold)
                .into_iter()
                .map(|i| {
                    let scores = model
                        .predict_proba(&dataset[i].0)
                        .map_err(|source| MetricsError::Fold { fold, source })?;
                    Ok((i, scores))
                })
                .collect()
        })
        .collect::<Result<_, MetricsError>>()?;

    let mut pooled: Vec<Option<PooledPrediction>> = vec![None; dataset.len()];
    for (fold, scored) in fold_scores.into_iter().enumerate() {
        for (i, scores) in scored {
            pooled[i] = Some(PooledPrediction {
                index: i,
                user_id: ids[i].clone(),
                fold,
                truth: labels[i],
                predicted: crate::forest::argmax(&scores),
                scores,
            });
        }
    }
    let predictions: Vec<PooledPrediction> = pooled
        .into_iter()
        .map(|p| p.expect("every record is held out exactly once"))
        .collect();

    Ok(summarize(predictions, config, k, seed))
}

fn summarize(predictions: Vec<PooledPrediction>, config: &TrainConfig, k: usize, seed: u64) -> EvaluationReport {
    let mut confusion: ConfusionMatrix = [[0; UserClass::COUNT]; UserClass::COUNT];
    for p in &predictions {
        confusion[p.truth.index()][p.predicted.index()] += 1;
    }
    let per_class = UserClass::ALL
        .into_iter()
        .map(|class| {
            let c = class.index();
            let (precision, recall, f_measure) = precision_recall_f(&confusion, c);
            let scores: Vec<f64> = predictions.iter().map(|p| p.scores[c]).collect();
            let positive: Vec<bool> = predictions.iter().map(|p| p.truth == class).collect();
            ClassMetrics {
                class,
                precision,
                recall,
                f_measure,
                auc: auc_one_vs_rest(&scores, &positive).ok(),
                support: confusion[c].iter().sum(),
            }
        })
        .collect();
    EvaluationReport {
        k,
        seed,
        train_config: config.clone(),
        feature_config: FeatureConfig::default(),
        n_records: predictions.len(),
        class_order: UserClass::ALL.to_vec(),
        confusion,
        per_class,
        predictions,
    }
}
