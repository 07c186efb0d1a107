/// Quantile by linear interpolation between order statistics
/// (position `q * (n - 1)` in the sorted values). Empty input gives 0.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}
