use super::MetricsError;

/// One-vs-rest ROC AUC via the mid-rank form of the Mann-Whitney statistic:
/// `(R⁺ − P(P+1)/2) / (P·N)`, where `R⁺` sums the (tie-averaged) ranks of the
/// positives. Equals the fraction of positive/negative pairs ordered
/// correctly, counting ties as one half.
pub fn auc_one_vs_rest(scores: &[f64], is_positive: &[bool]) -> Result<f64, MetricsError> {
    if scores.len() != is_positive.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), labels: is_positive.len() });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore);
    }
    let positives = is_positive.iter().filter(|&&p| p).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::UndefinedAuc { positives, negatives });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ranks are 1-based; a tie block spanning ranks [lo+1, hi] gets their mean.
    let mut positive_rank_sum = 0.0;
    let mut lo = 0;
    while lo < order.len() {
        let mut hi = lo + 1;
        while hi < order.len() && scores[order[hi]] == scores[order[lo]] {
            hi += 1;
        }
        let mid_rank = (lo + 1 + hi) as f64 / 2.0;
        let tied_positives = order[lo..hi].iter().filter(|&&i| is_positive[i]).count();
        positive_rank_sum += mid_rank * tied_positives as f64;
        lo = hi;
    }

    let p = positives as f64;
    let n = negatives as f64;
    Ok((positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
