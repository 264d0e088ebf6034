use crate::ingest::UserClass;
use crate::rng::DetRng;

use super::MetricsError;

/// Fold index per record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// Record indices held out in `fold`, ascending.
    pub fn members(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }
}

/// Stratified assignment: each class's indices are shuffled with
/// `DetRng::stream(seed, class_index)` and dealt round-robin, the deal
/// continuing where the previous class stopped. Per-class fold counts then
/// differ by at most one, and so do overall fold sizes.
pub fn stratified_folds(labels: &[UserClass], k: usize, seed: u64) -> Result<FoldAssignment, MetricsError> {
    if k < 2 || k > labels.len() {
        return Err(MetricsError::InvalidK { k, n: labels.len() });
    }
    let mut fold_of = vec![0; labels.len()];
    let mut next_fold = 0;
    for class in UserClass::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        DetRng::stream(seed, class.index() as u64).shuffle(&mut members);
        for i in members {
            fold_of[i] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}
