//! Noise ceilings from repeated trials.
//!
//! When responses are measured with trial-to-trial noise, no model can
//! explain all their variance.  Averaging over an image's repeats reduces
//! the noise by the repeat count, so the *effective* noise variance of a
//! set with `A` images shown three times, `B` twice, and `C` once is the
//! count-weighted mean `(A/3 + B/2 + C) / (A + B + C)` (in units of the
//! single-trial noise variance).  The ceiling on explainable variance is
//! then `S^2 / (S^2 + N_eff)` for signal variance `S^2`, and alignment
//! scores divided by the ceiling say how much of the *reachable* variance
//! a model captures.

use crate::alignment::{AlignmentResult, CeilingNormalized};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::util::{mean, sample_variance};

/// Ceilings below this are treated as unreliable: normalization excludes
/// the target instead of dividing by a near-zero ceiling.
pub const CEILING_FLOOR: f64 = 0.05;

/// How many images were presented three, two, and one times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TrialCounts {
    pub triple: u64,
    pub double: u64,
    pub single: u64,
}

impl TrialCounts {
    pub fn total(&self) -> u64 {
        self.triple + self.double + self.single
    }

    /// Derive counts from per-image repeat counts (each 1, 2, or 3).
    pub fn from_repeats(repeat_counts: &[usize]) -> Result<TrialCounts> {
        if repeat_counts.is_empty() {
            return Err(Error::EmptyCounts("no repeat counts given".into()));
        }
        let mut c = TrialCounts { triple: 0, double: 0, single: 0 };
        for (i, &r) in repeat_counts.iter().enumerate() {
            match r {
                1 => c.single += 1,
                2 => c.double += 1,
                3 => c.triple += 1,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "image {i} has {other} repeats; expected 1, 2, or 3"
                    )))
                }
            }
        }
        Ok(c)
    }
}

/// Effective noise variance `(A/3 + B/2 + C) / (A + B + C)`.
///
/// Computed as the integer ratio `(2A + 3B + 6C) / (6 (A + B + C))` so the
/// all-triple and all-single limits land exactly on `1/3` and `1`.
pub fn effective_noise(counts: &TrialCounts) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts("trial counts sum to zero".into()));
    }
    let num = 2 * counts.triple + 3 * counts.double + 6 * counts.single;
    Ok(num as f64 / (6 * total) as f64)
}

/// Noise ceiling `s2 / (s2 + n_eff)`.
pub fn ceiling(s2: f64, n_eff: f64) -> Result<f64> {
    if !(s2 >= 0.0) {
        return Err(Error::NegativeVariance(format!("signal variance {s2}")));
    }
    if !(n_eff > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "effective noise must be > 0, got {n_eff}"
        )));
    }
    Ok(s2 / (s2 + n_eff))
}

/// Effective noise, signal variance, and the resulting ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeilingResult {
    pub n_eff: f64,
    pub s2: f64,
    pub nc: f64,
}

/// Convenience constructor checking the `CeilingResult` invariants.
pub fn ceiling_result(s2: f64, n_eff: f64) -> Result<CeilingResult> {
    let nc = ceiling(s2, n_eff)?;
    Ok(CeilingResult { n_eff, s2, nc })
}

/// Estimate signal variance from repeated trials.
///
/// `trial_matrix` is `max_repeats x n_images`; image `i` holds valid
/// responses in rows `0..repeat_counts[i]`.  The estimator is the
/// repeated-measures decomposition `S^2 = max(0, B - W / H)` where `B` is
/// the between-image (unbiased) variance of per-image mean responses, `W`
/// pools the within-image variance over images with at least two repeats,
/// and `H` is the harmonic mean of all repeat counts — the `W / H` term
/// removes the noise that leaks into the spread of the means.
pub fn estimate_signal_variance(trial_matrix: &Matrix, repeat_counts: &[usize]) -> Result<f64> {
    let n_images = repeat_counts.len();
    if trial_matrix.cols() != n_images {
        return Err(Error::LengthMismatch(format!(
            "{} repeat counts for {} trial columns",
            n_images,
            trial_matrix.cols()
        )));
    }
    if n_images < 2 {
        return Err(Error::TooFewSamples(
            "signal variance needs at least 2 images".into(),
        ));
    }
    let max_reps = repeat_counts.iter().copied().max().unwrap_or(0);
    if max_reps < 2 {
        return Err(Error::NoRepeats(
            "no image has repeated presentations; noise cannot be separated".into(),
        ));
    }
    if max_reps > trial_matrix.rows() {
        return Err(Error::LengthMismatch(format!(
            "repeat count {max_reps} exceeds the {} trial rows",
            trial_matrix.rows()
        )));
    }
    if repeat_counts.iter().any(|&r| r == 0) {
        return Err(Error::InvalidArgument("every image needs at least 1 trial".into()));
    }

    let mut means = Vec::with_capacity(n_images);
    let mut within_ss = 0.0;
    let mut within_df = 0usize;
    for (i, &reps) in repeat_counts.iter().enumerate() {
        let vals: Vec<f64> = (0..reps).map(|r| trial_matrix.get(r, i)).collect();
        let m = mean(&vals);
        means.push(m);
        if reps >= 2 {
            within_ss += vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
            within_df += reps - 1;
        }
    }
    let between = sample_variance(&means);
    let within = if within_df > 0 { within_ss / within_df as f64 } else { 0.0 };
    let harmonic =
        n_images as f64 / repeat_counts.iter().map(|&r| 1.0 / r as f64).sum::<f64>();
    Ok((between - within / harmonic).max(0.0))
}

/// Divide per-target scores by per-target ceilings.
///
/// Returns a copy of the result with `ceiling_normalized` filled in.
/// Ceilings must lie in `(0, 1]`; targets whose ceiling falls below
/// [`CEILING_FLOOR`] are excluded (value `NaN`) and listed.
pub fn normalize_alignment(
    result: &AlignmentResult,
    nc_per_target: &[f64],
) -> Result<AlignmentResult> {
    if nc_per_target.len() != result.per_target_r2.len() {
        return Err(Error::LengthMismatch(format!(
            "{} ceilings for {} targets",
            nc_per_target.len(),
            result.per_target_r2.len()
        )));
    }
    for (t, &nc) in nc_per_target.iter().enumerate() {
        if !(nc > 0.0 && nc <= 1.0) {
            return Err(Error::InvalidCeiling(format!(
                "target {t}: ceiling {nc} outside (0, 1]"
            )));
        }
    }
    let mut values = Vec::with_capacity(nc_per_target.len());
    let mut excluded = Vec::new();
    for (t, (&r2, &nc)) in result.per_target_r2.iter().zip(nc_per_target).enumerate() {
        if nc < CEILING_FLOOR || !r2.is_finite() {
            if nc < CEILING_FLOOR {
                excluded.push(t);
            }
            values.push(f64::NAN);
        } else {
            values.push(r2 / nc);
        }
    }
    let mut out = result.clone();
    out.ceiling_normalized = Some(CeilingNormalized { values, excluded });
    Ok(out)
}
