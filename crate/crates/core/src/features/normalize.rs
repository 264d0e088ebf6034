use serde::{Deserialize, Serialize};

use super::{FeatureVector, FEATURE_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

/// Per-feature min-max ranges fit on training vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub ranges: [FeatureRange; FEATURE_COUNT],
}

impl NormalizationParams {
    /// Ranges over `vectors`; `None` for an empty slice.
    pub fn fit(vectors: &[FeatureVector]) -> Option<Self> {
        let (first, rest) = vectors.split_first()?;
        let mut ranges = first.0.map(|v| FeatureRange { min: v, max: v });
        for v in rest {
            for (range, &x) in ranges.iter_mut().zip(&v.0) {
                range.min = range.min.min(x);
                range.max = range.max.max(x);
            }
        }
        Some(Self { ranges })
    }

    /// Maps each feature to `[0, 1]` by its training range, clamping values
    /// outside it. Degenerate ranges (min == max) map to 0.
    pub fn apply(&self, v: &FeatureVector) -> FeatureVector {
        let mut out = [0.0; FEATURE_COUNT];
        for ((o, &x), r) in out.iter_mut().zip(&v.0).zip(&self.ranges) {
            *o = if r.max > r.min {
                ((x - r.min) / (r.max - r.min)).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        FeatureVector(out)
    }

    pub fn is_valid(&self) -> bool {
        self.ranges
            .iter()
            .all(|r| r.min.is_finite() && r.max.is_finite() && r.min <= r.max)
    }
}

pub fn fit_normalization(vectors: &[FeatureVector]) -> Option<NormalizationParams> {
    NormalizationParams::fit(vectors)
}

pub fn apply_normalization(v: &FeatureVector, params: &NormalizationParams) -> FeatureVector {
    params.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(f: impl Fn(usize) -> f64) -> FeatureVector {
        FeatureVector(std::array::from_fn(f))
    }

    #[test]
    fn singleton_is_degenerate() {
        let v = vector(|i| i as f64 * 1.5);
        let p = fit_normalization(&[v]).unwrap();
        for (i, r) in p.ranges.iter().enumerate() {
            assert_eq!((r.min, r.max), (v.0[i], v.0[i]));
        }
        assert_eq!(p.apply(&v), FeatureVector([0.0; FEATURE_COUNT]));
    }

    #[test]
    fn one_varying_feature() {
        let mut a = vector(|_| 1.0);
        let mut b = a;
        a.0[0] = 2.0;
        b.0[0] = 10.0;
        let p = fit_normalization(&[a, b]).unwrap();
        assert_eq!((p.ranges[0].min, p.ranges[0].max), (2.0, 10.0));
        assert!(p.ranges[1..].iter().all(|r| r.min == r.max));
        let mut mid = a;
        mid.0[0] = 4.0;
        assert_eq!(p.apply(&mid).0[0], 0.25);
    }

    #[test]
    fn boundaries_and_clamp() {
        let lo = vector(|i| i as f64);
        let hi = vector(|i| 2.0 * i as f64 + 1.0);
        let p = fit_normalization(&[hi, lo]).unwrap();
        assert_eq!(p.apply(&lo), FeatureVector([0.0; FEATURE_COUNT]));
        assert_eq!(p.apply(&hi), FeatureVector([1.0; FEATURE_COUNT]));
        let mut beyond = hi;
        beyond.0[3] += 5.0;
        beyond.0[4] = -100.0;
        let n = p.apply(&beyond);
        assert_eq!(n.0[3], 1.0);
        assert_eq!(n.0[4], 0.0);
    }

    #[test]
    fn empty_fit() {
        assert!(fit_normalization(&[]).is_none());
    }
}
