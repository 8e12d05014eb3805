//! Correlation, binning, and grouped-comparison utilities.
//!
//! These are the downstream analyses run on result tables: Pearson and
//! Spearman correlations with two-sided significance, equal-count quantile
//! binning, within-group score distributions over a symmetric alignment
//! matrix, and per-group summaries keyed by a metadata column.

use crate::error::{Error, Result};
use crate::io::{Cell, ResultTable};
use crate::matrix::Matrix;
use crate::seed;
use crate::util;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::collections::BTreeMap;

/// Default bin count for quantile grouping.
pub const DEFAULT_BINS: usize = 4;

/// Correlation variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrMethod {
    Pearson,
    Spearman,
}

impl CorrMethod {
    pub fn name(self) -> &'static str {
        match self {
            CorrMethod::Pearson => "pearson",
            CorrMethod::Spearman => "spearman",
        }
    }
}

impl std::str::FromStr for CorrMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<CorrMethod> {
        match s {
            "pearson" => Ok(CorrMethod::Pearson),
            "spearman" => Ok(CorrMethod::Spearman),
            other => Err(Error::InvalidArgument(format!(
                "unknown correlation method '{other}' (expected pearson or spearman)"
            ))),
        }
    }
}

/// How the two-sided p-value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    /// Student-t reference with n−2 degrees of freedom; adequate for the
    /// sample sizes these tables typically hold (tens of models).
    TApprox,
    /// Seeded permutation test: shuffle `y`, recount.  Deterministic for a
    /// given seed at any thread count (each round draws its own subseed).
    Permutation { rounds: usize, seed: u64 },
}

impl Default for PValueMethod {
    fn default() -> Self {
        PValueMethod::TApprox
    }
}

/// A correlation with its significance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub method: CorrMethod,
    pub r: f64,
    /// Two-sided p-value in `[0,1]`.
    pub p: f64,
    pub n: usize,
}

fn validate_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "x has {} values, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::TooFewSamples(format!(
            "correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if let Some(i) = v.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFiniteValue(format!("{name}[{i}] is not finite")));
        }
        let (min, max) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
                (lo.min(a), hi.max(a))
            });
        if min == max {
            return Err(Error::ConstantInput(format!("{name} is constant ({min})")));
        }
    }
    Ok(())
}

/// Pearson r on pre-validated data, clamped into [−1, 1].
fn pearson_r_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let mx = util::mean(x);
    let my = util::mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // One square root of the product, not a product of square roots:
    // sqrt(s·s) == s in IEEE arithmetic, so perfect (anti-)correlation
    // lands on ±1.0 exactly instead of one ulp short.
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Two-sided p from the t-statistic r·√((n−2)/(1−r²)) against t(n−2).
fn p_from_t(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= f64::EPSILON {
        return 0.0;
    }
    let t = r.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1 given n >= 3");
    (2.0 * dist.sf(t)).clamp(0.0, 1.0)
}

/// Seeded permutation p-value: shuffle y, recompute r, count exceedances.
/// Uses the add-one estimator (1 + hits)/(rounds + 1) and a tiny tolerance
/// on the comparison so last-ulp noise errs toward the larger p.
fn p_from_permutation(x: &[f64], y: &[f64], r_obs: f64, rounds: usize, master: u64) -> f64 {
    let threshold = r_obs.abs() - 1e-12;
    let hits: u64 = (0..rounds)
        .into_par_iter()
        .map(|round| {
            let mut rng = seed::rng(master, &format!("corr-perm/{round}"));
            let mut shuffled = y.to_vec();
            shuffled.shuffle(&mut rng);
            u64::from(pearson_r_unchecked(x, &shuffled).abs() >= threshold)
        })
        .sum();
    (1 + hits) as f64 / (rounds + 1) as f64
}

/// Average fractional ranks, 1-based; ties share the mean of their ranks.
fn fractional_ranks(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Correlation with an explicit method and p-value strategy.
pub fn correlate(
    x: &[f64],
    y: &[f64],
    method: CorrMethod,
    p_method: PValueMethod,
) -> Result<CorrelationReport> {
    validate_pair(x, y)?;
    let (cx, cy);
    let (xs, ys): (&[f64], &[f64]) = match method {
        CorrMethod::Pearson => (x, y),
        CorrMethod::Spearman => {
            cx = fractional_ranks(x);
            cy = fractional_ranks(y);
            // Constant ranks can only come from constant input, already
            // rejected above.
            (&cx, &cy)
        }
    };
    let r = pearson_r_unchecked(xs, ys);
    let p = match p_method {
        PValueMethod::TApprox => p_from_t(r, xs.len()),
        PValueMethod::Permutation { rounds, seed } => {
            if rounds == 0 {
                return Err(Error::InvalidArgument(
                    "permutation test needs at least one round".into(),
                ));
            }
            p_from_permutation(xs, ys, r, rounds, seed)
        }
    };
    Ok(CorrelationReport { method, r, p, n: x.len() })
}

/// Pearson correlation with a t-based two-sided p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationReport> {
    correlate(x, y, CorrMethod::Pearson, PValueMethod::TApprox)
}

/// Spearman rank correlation with a t-based two-sided p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationReport> {
    correlate(x, y, CorrMethod::Spearman, PValueMethod::TApprox)
}

// ---------------------------------------------------------------------------
// Quantile binning
// ---------------------------------------------------------------------------

/// An equal-count bin assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    /// Bin index per input item, in input order; all < `n_bins`.
    pub labels: Vec<usize>,
    /// Largest value in each bin except the last (`n_bins − 1` edges).
    pub boundaries: Vec<f64>,
    pub n_bins: usize,
}

impl GroupAssignment {
    /// Item indices of one bin, ascending.
    pub fn members(&self, bin: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == bin)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Equal-count (quantile) bins, sizes differing by at most one with the
/// remainder given to the earliest bins.  A run of tied values never
/// straddles an edge: the whole run goes to the lower bin.  If that leaves
/// any bin empty the data cannot support the requested binning.
pub fn bin_by(values: &[f64], n_bins: usize) -> Result<GroupAssignment> {
    if n_bins == 0 {
        return Err(Error::InvalidArgument("n_bins must be positive".into()));
    }
    if values.len() < n_bins {
        return Err(Error::TooFewItems(format!(
            "{} values cannot fill {n_bins} bins",
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(format!("values[{i}] is not finite")));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    // Initial equal-count chunks over the sorted order.
    let base = n / n_bins;
    let rem = n % n_bins;
    let mut sorted_labels = vec![0usize; n];
    let mut cursor = 0;
    for bin in 0..n_bins {
        let size = base + usize::from(bin < rem);
        for _ in 0..size {
            sorted_labels[cursor] = bin;
            cursor += 1;
        }
    }
    debug_assert_eq!(cursor, n);

    // Pull tie runs down: an item equal to its sorted predecessor takes the
    // predecessor's bin, so no edge splits a run of equal values.
    for i in 1..n {
        if values[order[i]] == values[order[i - 1]] {
            sorted_labels[i] = sorted_labels[i - 1];
        }
    }

    let mut counts = vec![0usize; n_bins];
    for &b in &sorted_labels {
        counts[b] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::TieCollapse(format!(
            "tied values emptied a bin (occupancies {counts:?})"
        )));
    }

    let mut boundaries = Vec::with_capacity(n_bins - 1);
    for bin in 0..n_bins - 1 {
        let last = sorted_labels.iter().rposition(|&b| b == bin).expect("non-empty bin");
        boundaries.push(values[order[last]]);
    }
    let mut labels = vec![0usize; n];
    for (sorted_pos, &item) in order.iter().enumerate() {
        labels[item] = sorted_labels[sorted_pos];
    }
    Ok(GroupAssignment { labels, boundaries, n_bins })
}

// ---------------------------------------------------------------------------
// Within-group score distributions
// ---------------------------------------------------------------------------

/// Score values over the unordered pairs inside one bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WithinGroupValues {
    pub group: usize,
    /// `S[i][j]` for within-group pairs `i < j`, in ascending `(i, j)` order.
    pub pair_values: Vec<f64>,
    /// `None` for singleton groups (no pairs).
    pub mean: Option<f64>,
}

/// Collect the pairwise score distribution inside each bin of a symmetric
/// score matrix.  The diagonal is never read.
pub fn within_group_alignment(
    scores: &Matrix,
    groups: &GroupAssignment,
) -> Result<Vec<WithinGroupValues>> {
    let n = scores.rows();
    if scores.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "score matrix is {}x{}, not square",
            n,
            scores.cols()
        )));
    }
    if groups.labels.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} group labels for a {n}x{n} score matrix",
            groups.labels.len()
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = scores.get(i, j);
            let b = scores.get(j, i);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "score between items {i} and {j} is not finite"
                )));
            }
            if (a - b).abs() > 1e-9 {
                return Err(Error::NotSymmetric(format!(
                    "S[{i}][{j}] = {a} but S[{j}][{i}] = {b}"
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(groups.n_bins);
    for bin in 0..groups.n_bins {
        let members = groups.members(bin);
        let mut pair_values = Vec::new();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pair_values.push(scores.get(i, j));
            }
        }
        let mean = if pair_values.is_empty() {
            None
        } else {
            Some(util::mean_sorted(&pair_values))
        };
        out.push(WithinGroupValues { group: bin, pair_values, mean });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Grouped summaries over result tables
// ---------------------------------------------------------------------------

/// Per-group location statistics for every numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub label: String,
    pub n: usize,
    /// Parallel to `GroupedSummary::columns`; NaN when a group has no
    /// finite values in that column.
    pub means: Vec<f64>,
    pub medians: Vec<f64>,
}

/// Mean difference (group `a` minus group `b`) per numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupContrast {
    pub a: String,
    pub b: String,
    pub mean_differences: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSummary {
    pub key: String,
    /// The numeric columns summarized, in table order.
    pub columns: Vec<String>,
    /// Groups in sorted label order.
    pub groups: Vec<GroupStats>,
    /// All unordered group pairs, in sorted label order.
    pub contrasts: Vec<GroupContrast>,
}

/// Split table rows by a metadata column and summarize every numeric
/// column per group, with pairwise group-mean differences.
pub fn grouped_summary(table: &ResultTable, key: &str) -> Result<GroupedSummary> {
    let key_idx = table
        .column_index(key)
        .ok_or_else(|| Error::MissingField(format!("no column named '{key}'")))?;
    if table.n_rows() == 0 {
        return Err(Error::TooFewItems("table has no rows".into()));
    }
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, row) in table.rows().iter().enumerate() {
        let label = match &row[key_idx] {
            Cell::Str(s) if s.is_empty() => {
                return Err(Error::MissingField(format!(
                    "row {i} has an empty value for key '{key}'"
                )))
            }
            Cell::Str(s) => s.clone(),
            Cell::Float(v) => format!("{v}"),
        };
        by_label.entry(label).or_default().push(i);
    }
    let columns: Vec<(usize, String)> = table
        .headers()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != key_idx && table.is_float_column(*j))
        .map(|(j, h)| (j, h.clone()))
        .collect();

    let mut groups = Vec::with_capacity(by_label.len());
    for (label, members) in &by_label {
        let mut means = Vec::with_capacity(columns.len());
        let mut medians = Vec::with_capacity(columns.len());
        for (j, _) in &columns {
            let vals: Vec<f64> = members
                .iter()
                .filter_map(|&i| table.rows()[i][*j].as_float())
                .filter(|v| v.is_finite())
                .collect();
            if vals.is_empty() {
                means.push(f64::NAN);
                medians.push(f64::NAN);
            } else {
                means.push(util::mean_sorted(&vals));
                medians.push(util::median(&vals));
            }
        }
        groups.push(GroupStats { label: label.clone(), n: members.len(), means, medians });
    }
    let mut contrasts = Vec::new();
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let mean_differences = groups[a]
                .means
                .iter()
                .zip(&groups[b].means)
                .map(|(x, y)| x - y)
                .collect();
            contrasts.push(GroupContrast {
                a: groups[a].label.clone(),
                b: groups[b].label.clone(),
                mean_differences,
            });
        }
    }
    Ok(GroupedSummary {
        key: key.to_string(),
        columns: columns.into_iter().map(|(_, h)| h).collect(),
        groups,
        contrasts,
    })
}
