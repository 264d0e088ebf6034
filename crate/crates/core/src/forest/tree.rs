use crate::features::{FeatureVector, FEATURE_COUNT};
use crate::ingest::UserClass;
use crate::rng::DetRng;

use super::TrainConfig;

pub type ClassCounts = [u64; UserClass::COUNT];

/// A CART node. Samples with `value <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        counts: ClassCounts,
    },
}

impl TreeNode {
    /// Class counts of the leaf `v` falls into.
    pub fn leaf_counts(&self, v: &FeatureVector) -> &ClassCounts {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Internal { feature, threshold, left, right } => {
                    node = if v.0[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Majority class of the reached leaf (ties to the lower class index).
    pub fn vote(&self, v: &FeatureVector) -> UserClass {
        majority(self.leaf_counts(v))
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

pub fn majority(counts: &ClassCounts) -> UserClass {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    UserClass::ALL[best]
}

/// `1 - Σ (c_k / N)²`. Panics when all counts are zero.
pub fn gini_impurity(counts: &ClassCounts) -> f64 {
    let n: u64 = counts.iter().sum();
    assert!(n > 0, "gini of an empty node");
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted Gini of the two children.
    pub impurity_decrease: f64,
}

/// Best Gini split over `candidate_features`, or `None` when no threshold
/// lowers impurity.
pub fn best_split(samples: &[(FeatureVector, UserClass)], candidate_features: &[usize]) -> Option<Split> {
    let (vectors, labels): (Vec<FeatureVector>, Vec<UserClass>) = samples.iter().copied().unzip();
    let indices: Vec<usize> = (0..samples.len()).collect();
    best_split_indexed(&vectors, &labels, &indices, candidate_features)
}

fn sum_squares(counts: &ClassCounts) -> u128 {
    counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum()
}

/// Midpoint of two consecutive distinct sorted values, kept strictly below
/// `hi` so the upper value always routes right.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi && mid >= lo {
        mid
    } else {
        lo
    }
}

/// Split search over the samples `indices` (repeats allowed).
///
/// Minimizing weighted child Gini is the same as maximizing
/// `S = ΣL²/nL + ΣR²/nR` (sums of squared class counts per side). `S` is
/// compared as the exact fraction `(ΣL²·nR + ΣR²·nL) / (nL·nR)` so ties are
/// detected exactly; the winner is the first strict maximum in
/// (feature index, threshold) order.
pub(crate) fn best_split_indexed(
    vectors: &[FeatureVector],
    labels: &[UserClass],
    indices: &[usize],
    candidate_features: &[usize],
) -> Option<Split> {
    let n = indices.len();
    if n < 2 {
        return None;
    }
    let mut total: ClassCounts = [0; UserClass::COUNT];
    for &i in indices {
        total[labels[i].index()] += 1;
    }
    let total_sq = sum_squares(&total);
    let n128 = n as u128;

    let mut features: Vec<usize> = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    // (numerator, denominator, feature, threshold)
    let mut best: Option<(u128, u128, usize, f64)> = None;
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);

    for &feature in &features {
        order.clear();
        order.extend(indices.iter().map(|&i| (vectors[i].0[feature], labels[i].index())));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left: ClassCounts = [0; UserClass::COUNT];
        let mut right = total;
        let mut left_sq: u128 = 0;
        let mut right_sq = total_sq;
        for pos in 0..n - 1 {
            let (value, class) = order[pos];
            left_sq += 2 * u128::from(left[class]) + 1;
            right_sq -= 2 * u128::from(right[class]) - 1;
            left[class] += 1;
            right[class] -= 1;

            let next = order[pos + 1].0;
            if next <= value {
                continue;
            }
            let n_left = (pos + 1) as u128;
            let n_right = n128 - n_left;
            let num = left_sq * n_right + right_sq * n_left;
            let den = n_left * n_right;
            // Strict decrease: S > Σc²/N.
            if num * n128 <= total_sq * den {
                continue;
            }
            let better = match best {
                None => true,
                Some((bn, bd, _, _)) => num * bd > bn * den,
            };
            if better {
                best = Some((num, den, feature, midpoint(value, next)));
            }
        }
    }

    best.map(|(num, den, feature, threshold)| {
        // (S − Σc²/N) / N = (num·N − Σc²·den) / (den·N²); the difference is
        // exact and positive, so the result is too.
        let excess = num * n128 - total_sq * den;
        let n = n as f64;
        Split {
            feature,
            threshold,
            impurity_decrease: excess as f64 / (den as f64 * n * n),
        }
    })
}

/// `n` draws with replacement from `0..n`.
pub fn bootstrap_sample(n: usize, rng: &mut DetRng) -> Vec<usize> {
    (0..n).map(|_| rng.index(n)).collect()
}

/// Grows a tree on all of `samples`.
pub fn build_tree(samples: &[(FeatureVector, UserClass)], config: &TrainConfig, rng: &mut DetRng) -> TreeNode {
    let (vectors, labels): (Vec<FeatureVector>, Vec<UserClass>) = samples.iter().copied().unzip();
    let mut indices: Vec<usize> = (0..samples.len()).collect();
    build_tree_indexed(&vectors, &labels, &mut indices, config, rng)
}

pub(crate) fn build_tree_indexed(
    vectors: &[FeatureVector],
    labels: &[UserClass],
    indices: &mut [usize],
    config: &TrainConfig,
    rng: &mut DetRng,
) -> TreeNode {
    assert!(!indices.is_empty(), "cannot grow a tree on zero samples");
    let grower = Grower { vectors, labels, config };
    grower.grow(indices, 0, rng)
}

struct Grower<'a> {
    vectors: &'a [FeatureVector],
    labels: &'a [UserClass],
    config: &'a TrainConfig,
}

impl Grower<'_> {
    /// Depth-first, left subtree before right; the feature subset is drawn
    /// only at nodes that attempt a split.
    fn grow(&self, indices: &mut [usize], depth: usize, rng: &mut DetRng) -> TreeNode {
        let mut counts: ClassCounts = [0; UserClass::COUNT];
        for &i in indices.iter() {
            counts[self.labels[i].index()] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.config.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || indices.len() < self.config.min_samples_split {
            return TreeNode::Leaf { counts };
        }

        let candidates = rng.choose_distinct(FEATURE_COUNT, self.config.features_per_split);
        let Some(split) = best_split_indexed(self.vectors, self.labels, indices, &candidates) else {
            return TreeNode::Leaf { counts };
        };
        assert!(split.impurity_decrease > 0.0, "accepted split must lower impurity");

        let boundary = partition(indices, |i| self.vectors[i].0[split.feature] <= split.threshold);
        let (left, right) = indices.split_at_mut(boundary);
        debug_assert!(!left.is_empty() && !right.is_empty());
        TreeNode::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow(left, depth + 1, rng)),
            right: Box::new(self.grow(right, depth + 1, rng)),
        }
    }
}

/// Stable partition: elements satisfying `goes_left` first. Returns their count.
fn partition(indices: &mut [usize], goes_left: impl Fn(usize) -> bool) -> usize {
    let (left, right): (Vec<usize>, Vec<usize>) = indices.iter().partition(|&&i| goes_left(i));
    let boundary = left.len();
    for (slot, value) in indices.iter_mut().zip(left.into_iter().chain(right)) {
        *slot = value;
    }
    boundary
}
