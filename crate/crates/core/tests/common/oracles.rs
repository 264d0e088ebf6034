//! Slow, obviously-correct reference implementations and the random case
//! generators used to compare them against the library.
#![allow(dead_code)]

use std::collections::HashMap;

use usertype::features::{FeatureVector, FEATURE_COUNT};
use usertype::ingest::UserClass;
use usertype::rng::DetRng;

/// Edit distance by memoized recursion on suffixes.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let d = (go(a, b, i + 1, j, memo) + 1)
            .min(go(a, b, i, j + 1, memo) + 1)
            .min(go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]));
        memo.insert((i, j), d);
        d
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    go(&a, &b, 0, 0, &mut HashMap::new())
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting ½.
pub fn auc_oracle(scores: &[f64], positive: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Exact fraction `num / den` with small integers.
#[derive(Debug, Clone, Copy)]
struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    fn lt(self, other: Frac) -> bool {
        self.num * other.den < other.num * self.den
    }
}

fn gini_frac(counts: &[u128; UserClass::COUNT]) -> Frac {
    let n: u128 = counts.iter().sum();
    let sq: u128 = counts.iter().map(|c| c * c).sum();
    Frac { num: n * n - sq, den: n * n }
}

/// Enumerates every (feature, midpoint) pair in feature-then-threshold order
/// and keeps the first strict minimum of size-weighted child Gini, provided
/// it is strictly below the parent's. Returns `(feature, threshold, decrease)`.
pub fn best_split_oracle(samples: &[(FeatureVector, UserClass)], candidates: &[usize]) -> Option<(usize, f64, f64)> {
    let n = samples.len() as u128;
    if n < 2 {
        return None;
    }
    let mut parent = [0u128; UserClass::COUNT];
    for (_, c) in samples {
        parent[c.index()] += 1;
    }
    let parent_gini = gini_frac(&parent);

    let mut features = candidates.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<(Frac, usize, f64)> = None;
    for &f in &features {
        let mut values: Vec<f64> = samples.iter().map(|(v, _)| v.0[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = pair[0] + (pair[1] - pair[0]) / 2.0;
            let mut left = [0u128; UserClass::COUNT];
            let mut right = [0u128; UserClass::COUNT];
            for (v, c) in samples {
                if v.0[f] <= threshold {
                    left[c.index()] += 1;
                } else {
                    right[c.index()] += 1;
                }
            }
            let nl: u128 = left.iter().sum();
            let nr: u128 = right.iter().sum();
            let gl = gini_frac(&left);
            let gr = gini_frac(&right);
            // nl/n·gl + nr/n·gr over the common denominator n·gl.den·gr.den
            let weighted = Frac {
                num: nl * gl.num * gr.den + nr * gr.num * gl.den,
                den: n * gl.den * gr.den,
            };
            if !weighted.lt(parent_gini) {
                continue;
            }
            if best.is_none_or(|(b, _, _)| weighted.lt(b)) {
                best = Some((weighted, f, threshold));
            }
        }
    }
    best.map(|(w, f, t)| {
        let decrease = parent_gini.num as f64 / parent_gini.den as f64 - w.num as f64 / w.den as f64;
        (f, t, decrease)
    })
}

const ALPHABET: [char; 8] = ['a', 'b', 'c', 'd', 'é', 'ß', '1', ' '];

pub fn random_string(rng: &mut DetRng, max_len: usize) -> String {
    let len = rng.index(max_len + 1);
    // Narrow alphabets make shared substrings, and so non-trivial alignments, common.
    let width = 2 + rng.index(ALPHABET.len() - 1);
    (0..len).map(|_| ALPHABET[rng.index(width)]).collect()
}

/// Scores on a coarse grid (ties are common) with at least one label of each kind.
pub fn random_auc_case(rng: &mut DetRng, max_n: usize) -> (Vec<f64>, Vec<bool>) {
    let n = 2 + rng.index(max_n - 1);
    let levels = 1 + rng.index(20) as u64;
    let p_positive = rng.uniform(0.05, 0.95);
    let mut scores: Vec<f64> = (0..n).map(|_| rng.below(levels) as f64 / levels as f64).collect();
    let mut labels: Vec<bool> = (0..n).map(|_| rng.bernoulli(p_positive)).collect();
    labels[0] = true;
    labels[1] = false;
    if rng.bernoulli(0.1) {
        scores.iter_mut().for_each(|s| *s = rng.unit());
    }
    (scores, labels)
}

/// Up to `max_n` samples over the first four features with small-grid
/// values, labels from a random subset of classes, and a random candidate set.
pub fn random_split_case(rng: &mut DetRng, max_n: usize) -> (Vec<(FeatureVector, UserClass)>, Vec<usize>) {
    let n = 1 + rng.index(max_n);
    let n_classes = 1 + rng.index(UserClass::COUNT);
    let grid = 1 + rng.below(8);
    let samples = (0..n)
        .map(|_| {
            let mut v = [0.0; FEATURE_COUNT];
            for x in v.iter_mut().take(4) {
                *x = rng.below(grid) as f64 * 0.25;
            }
            (FeatureVector(v), UserClass::ALL[rng.index(n_classes)])
        })
        .collect();
    let k = 1 + rng.index(4);
    let candidates = rng.choose_distinct(4, k);
    (samples, candidates)
}
