//! Intrinsic dimension estimation from nearest-neighbor distances.
//!
//! Three point estimators share one interface: each maps the ascending
//! distances from a point to its `K` nearest neighbors to a local dimension
//! estimate.
//!
//! * [`mle_point`] — maximum likelihood under a locally uniform density:
//!   the reciprocal of the mean log ratio between the `K`-th distance and
//!   each closer one.
//! * [`mom_point`] — method of moments on the same distances: with
//!   `s = mean(T_1..T_K) / T_K`, the estimate is `s / (1 - s)`.
//! * [`mada_point`] — dimension from the ratio between the full-scale and
//!   half-scale neighbor distances: `ln 2 / ln(T_K / T_{K/2})`.
//!
//! Dataset-level wrappers aggregate per-point estimates, sweep across
//! scales, restrict to one extracted neighborhood, or subsample rows.  The
//! correlation dimension takes a different route entirely — the growth rate
//! of the pair-distance distribution — and serves as a cross-check on the
//! neighbor-based estimators.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbors::{self, NeighborTable};
use crate::seed;
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Mle,
    Mom,
    Mada,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] =
        [EstimatorKind::Mle, EstimatorKind::Mom, EstimatorKind::Mada];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Mom => "mom",
            EstimatorKind::Mada => "mada",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(EstimatorKind::Mle),
            "mom" => Ok(EstimatorKind::Mom),
            "mada" => Ok(EstimatorKind::Mada),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimator '{other}' (expected mle, mom, or mada)"
            ))),
        }
    }
}

/// How per-point estimates combine into a dataset value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Arithmetic mean of per-point estimates.
    #[default]
    Mean,
    /// Reciprocal of the mean reciprocal; downweights outlier points.
    Harmonic,
}

/// Where the rows that produced an estimate came from.
#[derive(Debug, Clone, PartialEq)]
pub enum IdMode {
    /// Every row of the dataset.
    Global,
    /// One seeded anchor plus its nearest neighbors.
    LocalKnn { anchor: usize, neighborhood: usize, seed: u64 },
    /// A seeded random subset of rows.
    RandomSubsample { indices: Vec<usize>, seed: u64 },
}

/// A dataset-level intrinsic dimension estimate.
#[derive(Debug, Clone)]
pub struct IdEstimate {
    pub estimator: EstimatorKind,
    /// Neighborhood size the per-point estimates used.
    pub k: usize,
    pub mode: IdMode,
    /// Aggregated estimate.
    pub value: f64,
    /// Per analyzed row: the local estimate, or `None` where a duplicate
    /// point made the estimate undefined.
    pub per_point: Vec<Option<f64>>,
    /// Rows that contributed to `value`.
    pub evaluated: usize,
    /// Rows excluded for degenerate neighborhoods.
    pub excluded: usize,
}

/// Estimates across a ladder of neighborhood sizes.
#[derive(Debug, Clone)]
pub struct IdCurve {
    pub estimator: EstimatorKind,
    pub k_values: Vec<usize>,
    /// Aggregated estimate at each `k`, same order as `k_values`.
    pub estimates: Vec<f64>,
    /// Rows excluded at each `k`.
    pub excluded: Vec<usize>,
}

fn check_distances(d: &[f64]) -> Result<()> {
    if d.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 neighbor distances, got {}",
            d.len()
        )));
    }
    let mut prev = 0.0;
    for &x in d {
        if !x.is_finite() {
            return Err(Error::NonFiniteValue(format!("neighbor distance {x}")));
        }
        if x < prev {
            return Err(Error::InvalidArgument(
                "neighbor distances must be ascending".into(),
            ));
        }
        prev = x;
    }
    if d[0] == 0.0 || d[d.len() - 1] == 0.0 {
        return Err(Error::DegenerateNeighborhood(
            "zero neighbor distance (duplicate point)".into(),
        ));
    }
    Ok(())
}

/// Maximum-likelihood local dimension from ascending neighbor distances.
///
/// With distances `T_1 <= ... <= T_K`, the estimate is
/// `(K-1) / sum_{j<K} ln(T_K / T_j)`.  Any zero distance fails with
/// `DegenerateNeighborhood`; if every closer neighbor sits exactly at `T_K`
/// the log sum vanishes and the local dimension is unbounded, which is
/// reported as `DegenerateNeighborhood` as well.
pub fn mle_point(distances: &[f64]) -> Result<f64> {
    check_distances(distances)?;
    let k = distances.len();
    let tk = distances[k - 1];
    let mut acc = 0.0;
    for &t in &distances[..k - 1] {
        acc += (tk / t).ln();
    }
    if acc <= 0.0 {
        return Err(Error::DegenerateNeighborhood(
            "all neighbors at the same radius; likelihood estimate diverges".into(),
        ));
    }
    Ok((k - 1) as f64 / acc)
}

/// Method-of-moments local dimension from ascending neighbor distances.
///
/// With `mu = mean(T_1..T_K)`, the estimate is `mu / (T_K - mu)`.  Fails
/// with `DegenerateNeighborhood` on zero distances or when all distances
/// are equal (`mu = T_K`).
pub fn mom_point(distances: &[f64]) -> Result<f64> {
    check_distances(distances)?;
    let k = distances.len();
    let tk = distances[k - 1];
    let mu = distances.iter().sum::<f64>() / k as f64;
    if tk <= mu {
        return Err(Error::DegenerateNeighborhood(
            "all neighbors at the same radius; moment estimate diverges".into(),
        ));
    }
    Ok(mu / (tk - mu))
}

/// Dimension from the two-scale distance ratio
/// `ln 2 / ln(T_K / T_{ceil(K/2)})` (1-based indices).  Fails with
/// `DegenerateNeighborhood` when the two radii coincide.
pub fn mada_point(distances: &[f64]) -> Result<f64> {
    check_distances(distances)?;
    let k = distances.len();
    let tk = distances[k - 1];
    let th = distances[(k - 1) / 2]; // 1-based ceil(k/2)
    if tk <= th {
        return Err(Error::DegenerateNeighborhood(
            "half-scale and full-scale radii coincide; ratio estimate diverges".into(),
        ));
    }
    Ok(std::f64::consts::LN_2 / (tk / th).ln())
}

/// Dispatch to one of the three point estimators.
pub fn point_estimate(kind: EstimatorKind, distances: &[f64]) -> Result<f64> {
    match kind {
        EstimatorKind::Mle => mle_point(distances),
        EstimatorKind::Mom => mom_point(distances),
        EstimatorKind::Mada => mada_point(distances),
    }
}

/// Aggregate per-point estimates.  Values are sorted before summation so
/// the result is invariant to row order, and points with degenerate
/// neighborhoods are excluded (all-degenerate data is an error).
fn aggregate(
    per_point: &[Option<f64>],
    agg: Aggregation,
) -> Result<(f64, usize, usize)> {
    let mut vals: Vec<f64> = per_point.iter().filter_map(|v| *v).collect();
    let excluded = per_point.len() - vals.len();
    if vals.is_empty() {
        return Err(Error::AllDegenerate(format!(
            "all {} analyzed points have degenerate neighborhoods",
            per_point.len()
        )));
    }
    vals.sort_by(f64::total_cmp);
    let value = match agg {
        Aggregation::Mean => vals.iter().sum::<f64>() / vals.len() as f64,
        Aggregation::Harmonic => {
            let mut inv: Vec<f64> = vals.iter().map(|v| 1.0 / v).collect();
            inv.sort_by(f64::total_cmp);
            vals.len() as f64 / inv.iter().sum::<f64>()
        }
    };
    Ok((value, vals.len(), excluded))
}

fn id_from_lists(
    table: &NeighborTable,
    estimator: EstimatorKind,
    agg: Aggregation,
    mode: IdMode,
) -> Result<IdEstimate> {
    if table.k < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension estimation needs k >= 2, got {}",
            table.k
        )));
    }
    let per_point: Vec<Option<f64>> = table
        .lists
        .par_iter()
        .map(|l| point_estimate(estimator, &l.distances).ok())
        .collect();
    let (value, evaluated, excluded) = aggregate(&per_point, agg)?;
    Ok(IdEstimate {
        estimator,
        k: table.k,
        mode,
        value,
        per_point,
        evaluated,
        excluded,
    })
}

/// Dataset estimate from a precomputed neighbor table.
pub fn id_from_table(table: &NeighborTable, estimator: EstimatorKind) -> Result<IdEstimate> {
    id_from_lists(table, estimator, Aggregation::default(), IdMode::Global)
}

pub fn id_from_table_with(
    table: &NeighborTable,
    estimator: EstimatorKind,
    agg: Aggregation,
) -> Result<IdEstimate> {
    id_from_lists(table, estimator, agg, IdMode::Global)
}

/// Dataset estimate: per-point estimates at scale `k` over every row,
/// aggregated by the arithmetic mean.
pub fn id_dataset(z: &Matrix, k: usize, estimator: EstimatorKind) -> Result<IdEstimate> {
    id_dataset_with(z, k, estimator, Aggregation::default())
}

pub fn id_dataset_with(
    z: &Matrix,
    k: usize,
    estimator: EstimatorKind,
    agg: Aggregation,
) -> Result<IdEstimate> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension estimation needs k >= 2, got {k}"
        )));
    }
    let table = neighbors::knn_all(z, None, k)?;
    id_from_lists(&table, estimator, agg, IdMode::Global)
}

/// Dataset estimates across an ascending ladder of scales.
///
/// Neighbors are found once at the largest scale; smaller scales reuse
/// prefixes of the same lists, so each entry is bit-identical to a direct
/// [`id_dataset`] call at that scale.
pub fn scale_sweep(z: &Matrix, k_values: &[usize], estimator: EstimatorKind) -> Result<IdCurve> {
    if k_values.is_empty() {
        return Err(Error::InvalidArgument("empty scale ladder".into()));
    }
    for w in k_values.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument(
                "scale ladder must be strictly ascending".into(),
            ));
        }
    }
    if k_values[0] < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension estimation needs k >= 2, got {}",
            k_values[0]
        )));
    }
    let kmax = *k_values.last().expect("nonempty");
    let table = neighbors::knn_all(z, None, kmax)?;
    let mut estimates = Vec::with_capacity(k_values.len());
    let mut excluded = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let per_point: Vec<Option<f64>> = table
            .lists
            .par_iter()
            .map(|l| point_estimate(estimator, &l.distances[..k]).ok())
            .collect();
        let (value, _, exc) = aggregate(&per_point, Aggregation::default())?;
        estimates.push(value);
        excluded.push(exc);
    }
    Ok(IdCurve { estimator, k_values: k_values.to_vec(), estimates, excluded })
}

/// Estimate within one local neighborhood: a seeded anchor row and its `m`
/// nearest neighbors form the sub-dataset, which is then treated exactly
/// like [`id_dataset`].  With `m = N - 1` the sub-dataset is the whole
/// dataset (anchor-first row order does not change the estimate).
pub fn local_id(
    z: &Matrix,
    anchor_seed: u64,
    neighborhood: usize,
    k: usize,
    estimator: EstimatorKind,
) -> Result<IdEstimate> {
    let mut r = seed::rng(anchor_seed, "local-id/anchor");
    let anchor = r.random_range(0..z.rows());
    let sub = neighbors::neighborhood_extract(z, anchor, neighborhood)?;
    let est = id_dataset(&sub, k, estimator)?;
    Ok(IdEstimate {
        mode: IdMode::LocalKnn { anchor, neighborhood, seed: anchor_seed },
        ..est
    })
}

/// Estimate on a seeded random subset of `n_sub` rows (without
/// replacement; `n_sub = N` reproduces [`id_dataset`] exactly).
pub fn subsample_id(
    z: &Matrix,
    n_sub: usize,
    subsample_seed: u64,
    k: usize,
    estimator: EstimatorKind,
) -> Result<IdEstimate> {
    if n_sub < 2 || n_sub > z.rows() {
        return Err(Error::InvalidArgument(format!(
            "subsample size {n_sub} outside 2..={}",
            z.rows()
        )));
    }
    let mut r = seed::rng(subsample_seed, "subsample-id/rows");
    let mut indices: Vec<usize> = index_sample(&mut r, z.rows(), n_sub).into_vec();
    indices.sort_unstable();
    let sub = z.select_rows(&indices);
    let est = id_dataset(&sub, k, estimator)?;
    Ok(IdEstimate {
        mode: IdMode::RandomSubsample { indices, seed: subsample_seed },
        ..est
    })
}

/// One radius of a correlation integral curve.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationPoint {
    pub epsilon: f64,
    /// Fraction of point pairs closer than `epsilon` (strictly).
    pub c: f64,
    /// Whether this radius entered the slope fit (`0 < c < 1`).
    pub used: bool,
}

/// Correlation dimension: slope of `ln C(eps)` against `ln eps`.
#[derive(Debug, Clone)]
pub struct CorrelationDimension {
    pub slope: f64,
    pub curve: Vec<CorrelationPoint>,
    /// Number of point pairs each `c` was estimated from.
    pub pairs: u64,
    /// Whether pairs were subsampled rather than enumerated.
    pub subsampled: bool,
}

/// Datasets up to this many rows have all pairs enumerated exactly.
const CORR_DIM_EXACT_LIMIT: usize = 5_000;
/// Larger datasets use this many seeded random pairs instead.
const CORR_DIM_SAMPLED_PAIRS: u64 = 10_000_000;

/// Estimate the correlation dimension over the given ascending radii.
///
/// `C(eps)` counts the fraction of distinct point pairs with distance
/// strictly below `eps`.  The slope is an ordinary least squares fit of
/// `ln C` on `ln eps` restricted to radii with `0 < C < 1`; fewer than
/// three usable radii fails with `InsufficientRange`.
pub fn correlation_dimension(
    z: &Matrix,
    epsilons: &[f64],
    pair_seed: u64,
) -> Result<CorrelationDimension> {
    let n = z.rows();
    if n < 10 {
        return Err(Error::TooFewSamples(format!(
            "correlation dimension needs at least 10 rows, got {n}"
        )));
    }
    if epsilons.len() < 3 {
        return Err(Error::InsufficientRange(format!(
            "need at least 3 radii, got {}",
            epsilons.len()
        )));
    }
    for w in epsilons.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument("radii must be strictly ascending".into()));
        }
    }
    if epsilons[0] <= 0.0 || !epsilons.iter().all(|e| e.is_finite()) {
        return Err(Error::InvalidArgument("radii must be positive and finite".into()));
    }

    // Per-pair work: find the first radius the distance falls under, and
    // accumulate an integer histogram.  Integer merges keep the count —
    // and therefore the estimate — independent of thread count.
    let ne = epsilons.len();
    let histogram: Vec<u64>;
    let total_pairs: u64;
    let subsampled;
    if n <= CORR_DIM_EXACT_LIMIT {
        subsampled = false;
        total_pairs = (n as u64) * (n as u64 - 1) / 2;
        histogram = (0..n - 1)
            .into_par_iter()
            .map(|i| {
                let mut h = vec![0u64; ne + 1];
                let a = z.row(i);
                for j in i + 1..n {
                    let d = neighbors::euclidean(a, z.row(j));
                    let slot = epsilons.partition_point(|&e| e <= d);
                    h[slot] += 1;
                }
                h
            })
            .reduce(
                || vec![0u64; ne + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            );
    } else {
        subsampled = true;
        total_pairs = CORR_DIM_SAMPLED_PAIRS;
        let chunks: u64 = 256;
        let per_chunk = total_pairs / chunks;
        let remainder = total_pairs % chunks;
        histogram = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut h = vec![0u64; ne + 1];
                let mut r = seed::rng(pair_seed, &format!("corr-dim/pairs/{c}"));
                let count = per_chunk + if c < remainder { 1 } else { 0 };
                for _ in 0..count {
                    let i = r.random_range(0..n);
                    let mut j = r.random_range(0..n - 1);
                    if j >= i {
                        j += 1;
                    }
                    let d = neighbors::euclidean(z.row(i), z.row(j));
                    let slot = epsilons.partition_point(|&e| e <= d);
                    h[slot] += 1;
                }
                h
            })
            .reduce(
                || vec![0u64; ne + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            );
    }

    // histogram[s] counts pairs whose first containing radius is s;
    // C(eps_i) is the cumulative count at or below slot i.
    let mut curve = Vec::with_capacity(ne);
    let mut cum: u64 = 0;
    for (i, &eps) in epsilons.iter().enumerate() {
        cum += histogram[i];
        let c = cum as f64 / total_pairs as f64;
        curve.push(CorrelationPoint { epsilon: eps, c, used: c > 0.0 && c < 1.0 });
    }

    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.used)
        .map(|p| (p.epsilon.ln(), p.c.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientRange(format!(
            "only {} radii have 0 < C < 1; need at least 3",
            pts.len()
        )));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(CorrelationDimension { slope: sxy / sxx, curve, pairs: total_pairs, subsampled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::new(rows, cols, v.to_vec()).unwrap()
    }

    // --- point estimators against hand-computed values -------------------

    #[test]
    fn mle_hand_value() {
        // T = [1, 2, 4]: ln(4/1) + ln(4/2) = 3 ln 2, estimate = 2 / (3 ln 2).
        let v = mle_point(&[1.0, 2.0, 4.0]).unwrap();
        assert!((v - 2.0 / (3.0 * std::f64::consts::LN_2)).abs() < 1e-15);
    }

    #[test]
    fn mom_hand_values() {
        // T = [1, 2, 4]: s = 7/12, estimate = (7/12)/(5/12) = 1.4.
        let v = mom_point(&[1.0, 2.0, 4.0]).unwrap();
        assert!((v - 1.4).abs() < 1e-15);
        // T = [1, 2, 3, 4]: s = 10/16, estimate = (10/16)/(6/16) = 5/3.
        let v = mom_point(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mada_hand_values() {
        // T = [1, 2, 4], K = 3: half radius T_ceil(3/2) = T_2 = 2,
        // ratio 4/2 -> ln2/ln2 = 1 exactly.
        let v = mada_point(&[1.0, 2.0, 4.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // T = [1, 2, 3, 4]: T_2 = 2, ratio 4/2 -> 1 again.
        let v = mada_point(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // T = [1, 1, 8]: T_2 = 1, ratio 8 -> ln2/ln8 = 1/3.
        let v = mada_point(&[1.0, 1.0, 8.0]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_distance_is_degenerate_for_all_estimators() {
        for kind in EstimatorKind::ALL {
            let e = point_estimate(kind, &[0.0, 1.0, 2.0]).unwrap_err();
            assert!(matches!(e, Error::DegenerateNeighborhood(_)), "{kind:?}");
        }
    }

    #[test]
    fn equal_radii_diverge_for_all_estimators() {
        for kind in EstimatorKind::ALL {
            let e = point_estimate(kind, &[2.0, 2.0, 2.0]).unwrap_err();
            assert!(matches!(e, Error::DegenerateNeighborhood(_)), "{kind:?}");
        }
    }

    // --- dataset-level behavior -----------------------------------------

    fn hypercube(n: usize, d: usize, ambient: usize, seed_v: u64) -> Matrix {
        let mut r = seed::rng(seed_v, "dim-test/cube");
        let mut data = vec![0.0; n * ambient];
        for i in 0..n {
            for j in 0..d {
                data[i * ambient + j] = r.random::<f64>();
            }
        }
        mat(n, ambient, &data)
    }

    #[test]
    fn square_in_ten_dimensions_estimates_near_two() {
        let z = hypercube(1500, 2, 10, 4);
        for kind in EstimatorKind::ALL {
            let est = id_dataset(&z, 12, kind).unwrap();
            assert!(
                est.value > 1.6 && est.value < 2.4,
                "{kind:?}: {}",
                est.value
            );
            assert_eq!(est.excluded, 0);
            assert_eq!(est.evaluated, 1500);
        }
    }

    #[test]
    fn row_permutation_leaves_the_mean_bit_identical() {
        let z = hypercube(300, 3, 6, 9);
        let base = id_dataset(&z, 10, EstimatorKind::Mle).unwrap();
        // Reverse row order: same point set, same multiset of estimates.
        let rev: Vec<usize> = (0..z.rows()).rev().collect();
        let zr = z.select_rows(&rev);
        let permuted = id_dataset(&zr, 10, EstimatorKind::Mle).unwrap();
        assert_eq!(base.value.to_bits(), permuted.value.to_bits());
    }

    #[test]
    fn duplicated_rows_are_excluded_not_fatal() {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut r = seed::rng(3, "dup");
        for _ in 0..40 {
            rows.push(vec![r.random(), r.random()]);
        }
        rows.push(rows[0].clone()); // one exact duplicate pair
        let z = Matrix::from_rows(&rows).unwrap();
        let est = id_dataset(&z, 5, EstimatorKind::Mle).unwrap();
        assert_eq!(est.excluded, 2); // both copies see a zero distance
        assert_eq!(est.evaluated, 39);
    }

    #[test]
    fn all_identical_rows_is_all_degenerate() {
        let z = mat(6, 2, &[1.0, 2.0].repeat(6));
        assert!(matches!(
            id_dataset(&z, 3, EstimatorKind::Mle),
            Err(Error::AllDegenerate(_))
        ));
    }

    #[test]
    fn harmonic_aggregation_is_at_most_the_mean() {
        let z = hypercube(400, 4, 8, 13);
        let mean = id_dataset_with(&z, 10, EstimatorKind::Mle, Aggregation::Mean).unwrap();
        let harm = id_dataset_with(&z, 10, EstimatorKind::Mle, Aggregation::Harmonic).unwrap();
        assert!(harm.value <= mean.value + 1e-12);
        assert!(harm.value > 0.5 * mean.value);
    }

    #[test]
    fn sweep_matches_direct_calls_bit_for_bit() {
        let z = hypercube(250, 3, 5, 21);
        let ks = [4, 8, 16];
        let curve = scale_sweep(&z, &ks, EstimatorKind::Mom).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            let direct = id_dataset(&z, k, EstimatorKind::Mom).unwrap();
            assert_eq!(curve.estimates[i].to_bits(), direct.value.to_bits());
        }
    }

    #[test]
    fn sweep_requires_strictly_ascending_scales() {
        let z = hypercube(50, 2, 3, 1);
        assert!(matches!(
            scale_sweep(&z, &[4, 4, 8], EstimatorKind::Mle),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn local_id_with_full_neighborhood_equals_global() {
        let z = hypercube(120, 2, 4, 30);
        let global = id_dataset(&z, 8, EstimatorKind::Mle).unwrap();
        let local = local_id(&z, 7, z.rows() - 1, 8, EstimatorKind::Mle).unwrap();
        assert_eq!(local.value.to_bits(), global.value.to_bits());
        assert!(matches!(local.mode, IdMode::LocalKnn { neighborhood: 119, .. }));
    }

    #[test]
    fn local_id_is_reproducible() {
        let z = hypercube(200, 3, 6, 5);
        let a = local_id(&z, 42, 50, 10, EstimatorKind::Mom).unwrap();
        let b = local_id(&z, 42, 50, 10, EstimatorKind::Mom).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.mode, b.mode);
    }

    #[test]
    fn subsample_of_everything_equals_global() {
        let z = hypercube(100, 2, 4, 8);
        let global = id_dataset(&z, 6, EstimatorKind::Mada).unwrap();
        let sub = subsample_id(&z, 100, 3, 6, EstimatorKind::Mada).unwrap();
        assert_eq!(sub.value.to_bits(), global.value.to_bits());
        match &sub.mode {
            IdMode::RandomSubsample { indices, .. } => {
                assert_eq!(indices.len(), 100);
                assert!(indices.windows(2).all(|w| w[0] < w[1]));
            }
            other => panic!("unexpected mode {other:?}"),
        }
    }

    // --- correlation dimension ------------------------------------------

    #[test]
    fn correlation_dimension_of_a_segment_is_near_one() {
        let mut r = seed::rng(7, "corr-seg");
        let data: Vec<f64> = (0..800).map(|_| r.random::<f64>()).collect();
        let z = mat(800, 1, &data);
        let eps: Vec<f64> = (0..8).map(|i| 0.01 * 1.6f64.powi(i)).collect();
        let cd = correlation_dimension(&z, &eps, 0).unwrap();
        assert!((cd.slope - 1.0).abs() < 0.15, "{}", cd.slope);
        assert!(!cd.subsampled);
        // C must be non-decreasing in the radius.
        for w in cd.curve.windows(2) {
            assert!(w[0].c <= w[1].c);
        }
    }

    #[test]
    fn identical_points_give_no_usable_radii() {
        let z = mat(12, 1, &[3.0; 12]);
        assert!(matches!(
            correlation_dimension(&z, &[0.1, 1.0, 10.0], 0),
            Err(Error::InsufficientRange(_))
        ));
    }

    #[test]
    fn threshold_is_strict() {
        // 10 points on a line, unit spacing: at eps slightly above 1 every
        // adjacent pair counts, at eps = 1.0 exactly none of them do.
        let data: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let z = mat(10, 1, &data);
        let cd = correlation_dimension(&z, &[0.5, 1.0, 1.0000001, 2.5, 3.5, 20.0], 0).unwrap();
        // C(0.5) = 0; C(1.0) = 0 because the comparison is strict;
        // C(1.0000001) = 9/45 (adjacent pairs); C(2.5) = 17/45; C(3.5) = 24/45.
        assert_eq!(cd.curve[0].c, 0.0);
        assert_eq!(cd.curve[1].c, 0.0);
        assert!((cd.curve[2].c - 9.0 / 45.0).abs() < 1e-15);
        assert!((cd.curve[3].c - 17.0 / 45.0).abs() < 1e-15);
        assert!((cd.curve[4].c - 24.0 / 45.0).abs() < 1e-15);
        assert_eq!(cd.curve[5].c, 1.0);
        assert!(!cd.curve[5].used);
    }
}
