/// `2ab/(a+b)`, with zero whenever either input is zero.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Standard deviation with divisor N. Panics on an empty slice.
/// Depends only on the multiset of values, not their order.
pub fn population_std(values: &[u64]) -> f64 {
    assert!(!values.is_empty(), "population_std of an empty list");
    // Float sums are order-sensitive; sum in a canonical order.
    let mut values = values.to_vec();
    values.sort_unstable();
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let variance = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    variance.sqrt()
}
