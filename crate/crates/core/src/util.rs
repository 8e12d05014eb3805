//! Small numeric helpers shared across modules.

/// Mean of a nonempty slice.
pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean computed after sorting by `total_cmp`.  Summation order no longer
/// depends on the order of the input, so permuting a dataset's rows leaves
/// aggregate estimates bit-identical.
pub(crate) fn mean_sorted(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.iter().sum::<f64>() / s.len() as f64
}

/// Median of a nonempty slice (average of the middle two for even lengths).
pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Unbiased sample variance (n-1 denominator); 0.0 for a single value.
pub(crate) fn sample_variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}
