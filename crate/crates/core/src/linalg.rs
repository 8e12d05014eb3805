//! Column centering, principal component analysis, and ridge regression.
//!
//! These are the primitives under the encoding pipelines: PCA is fit by
//! singular value decomposition of the centered (optionally standardized)
//! data, and ridge solves all regularization strengths from a single SVD of
//! the design matrix, which stays numerically stable as the penalty
//! approaches zero.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::util::mean;
use nalgebra::DMatrix;

/// Relative cutoff under which a singular value counts as zero when solving
/// an unpenalized system.
const RANK_TOL: f64 = 1e-10;
/// Variance below which a column is treated as constant.
const VAR_TOL: f64 = 1e-15;

/// Subtract each column's mean; returns the centered matrix and the means.
pub fn center_columns(m: &Matrix) -> (Matrix, Vec<f64>) {
    let mut means = vec![0.0; m.cols()];
    for j in 0..m.cols() {
        means[j] = mean(&m.column(j));
    }
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j) - means[j]);
        }
    }
    (out, means)
}

/// Principal component basis fit on one dataset and reusable on another.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// Column means of the fitting data.
    pub means: Vec<f64>,
    /// Column scales when fit with standardization, else `None`.
    pub scales: Option<Vec<f64>>,
    /// Component directions, one per row, orthonormal.
    pub components: Matrix,
    /// Singular values of the centered data, non-increasing.
    pub singular_values: Vec<f64>,
}

impl PcaModel {
    /// Number of retained components.
    pub fn n_components(&self) -> usize {
        self.components.rows()
    }

    /// Variance of the fitting data along each component (non-increasing).
    pub fn explained_variance(&self, n_samples: usize) -> Vec<f64> {
        let denom = (n_samples.max(2) - 1) as f64;
        self.singular_values.iter().map(|s| s * s / denom).collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PcaOptions {
    /// Divide each centered column by its sample standard deviation before
    /// the decomposition.  Constant columns keep scale 1.
    pub standardize: bool,
}

/// Fit a PCA basis with at most `n_components` directions.
///
/// The retained count is capped at `min(rows - 1, cols)`, the rank bound of
/// centered data.  Fails with `DegenerateData` if all rows are identical.
pub fn pca_fit(m: &Matrix, n_components: usize) -> Result<PcaModel> {
    pca_fit_with(m, n_components, PcaOptions::default())
}

pub fn pca_fit_with(m: &Matrix, n_components: usize, opts: PcaOptions) -> Result<PcaModel> {
    if m.rows() < 2 {
        return Err(Error::TooFewSamples(format!(
            "PCA needs at least 2 rows, got {}",
            m.rows()
        )));
    }
    if n_components == 0 {
        return Err(Error::InvalidArgument("n_components must be >= 1".into()));
    }
    let (mut centered, means) = center_columns(m);
    let scales = if opts.standardize {
        let mut scales = vec![1.0; m.cols()];
        for j in 0..m.cols() {
            let var = crate::util::sample_variance(&m.column(j));
            if var > VAR_TOL {
                scales[j] = var.sqrt();
            }
        }
        for i in 0..centered.rows() {
            for j in 0..centered.cols() {
                centered.set(i, j, centered.get(i, j) / scales[j]);
            }
        }
        Some(scales)
    } else {
        None
    };

    let (mut sv, _u, vt) = thin_svd(&centered.to_dmatrix(), false)?;
    if sv.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::DegenerateData(
            "all rows are identical; no principal directions exist".into(),
        ));
    }
    let vt = vt.expect("requested V^T");
    let k = n_components.min(m.rows() - 1).min(m.cols());
    sv.truncate(k);
    let mut comp = Matrix::zeros(k, m.cols());
    for r in 0..k {
        for c in 0..m.cols() {
            comp.set(r, c, vt[(r, c)]);
        }
    }
    Ok(PcaModel { means, scales, components: comp, singular_values: sv })
}

/// Project rows of `m` onto a fitted basis: subtract the stored means (and
/// scales), then take inner products with each component.
pub fn pca_project(model: &PcaModel, m: &Matrix) -> Result<Matrix> {
    if m.cols() != model.components.cols() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} columns but the PCA basis was fit on {}",
            m.cols(),
            model.components.cols()
        )));
    }
    let k = model.n_components();
    let mut out = Matrix::zeros(m.rows(), k);
    for i in 0..m.rows() {
        let row = m.row(i);
        for r in 0..k {
            let comp = model.components.row(r);
            let mut acc = 0.0;
            match &model.scales {
                Some(scales) => {
                    for j in 0..m.cols() {
                        acc += (row[j] - model.means[j]) / scales[j] * comp[j];
                    }
                }
                None => {
                    for j in 0..m.cols() {
                        acc += (row[j] - model.means[j]) * comp[j];
                    }
                }
            }
            out.set(i, r, acc);
        }
    }
    Ok(out)
}

/// Multi-target linear map with per-target intercepts.
#[derive(Debug, Clone)]
pub struct RidgeModel {
    /// Weight matrix, `features x targets`.
    pub weights: Matrix,
    /// One intercept per target.
    pub intercepts: Vec<f64>,
    /// Penalty the model was fit with.
    pub lambda: f64,
}

impl RidgeModel {
    /// Predict targets for each row of `x`.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.weights.rows() {
            return Err(Error::DimensionMismatch(format!(
                "input has {} features but the model was fit with {}",
                x.cols(),
                self.weights.rows()
            )));
        }
        let m = self.weights.cols();
        let mut out = Matrix::zeros(x.rows(), m);
        for i in 0..x.rows() {
            let row = x.row(i);
            for t in 0..m {
                let mut acc = self.intercepts[t];
                for j in 0..x.cols() {
                    acc += row[j] * self.weights.get(j, t);
                }
                out.set(i, t, acc);
            }
        }
        Ok(out)
    }
}

/// Reusable SVD of a centered design matrix, for solving many penalties or
/// many target blocks without refactorizing.
pub(crate) struct DesignSvd {
    /// `U^T` restricted to the positive spectrum, `r x n`.
    pub ut: DMatrix<f64>,
    /// Singular values, non-increasing, length `r`.
    pub sv: Vec<f64>,
    /// `V` restricted to the positive spectrum, `d x r`.
    pub v: DMatrix<f64>,
    pub x_means: Vec<f64>,
}

impl DesignSvd {
    pub fn new(x: &Matrix) -> Result<DesignSvd> {
        let (xc, x_means) = center_columns(x);
        let (sv, u, vt) = thin_svd(&xc.to_dmatrix(), true)?;
        let u = u.expect("requested U");
        let vt = vt.expect("requested V^T");
        // Drop exact-zero singular values; they contribute nothing for any
        // penalty and their U/V columns are arbitrary.
        let r = sv.iter().take_while(|&&s| s > 0.0).count();
        let ut = u.columns(0, r).transpose();
        let v = vt.rows(0, r).transpose();
        Ok(DesignSvd { ut, sv: sv[..r].to_vec(), v, x_means })
    }

    /// Whether the design has full column rank at the relative tolerance
    /// used for unpenalized solves.
    pub fn full_column_rank(&self, cols: usize) -> bool {
        if self.sv.len() < cols {
            return false;
        }
        let smax = self.sv[0];
        self.sv[cols - 1] > RANK_TOL * smax
    }

    /// Solve for the weight block of the given centered targets.
    /// `yc` must be `n x m` with column means already removed.
    pub fn solve(&self, yc: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
        let mut t = &self.ut * yc; // r x m
        for (i, &s) in self.sv.iter().enumerate() {
            let f = if lambda == 0.0 { 1.0 / s } else { s / (s * s + lambda) };
            for j in 0..t.ncols() {
                t[(i, j)] *= f;
            }
        }
        &self.v * t // d x m
    }
}

/// Fit ridge regression of `y` on `x` with penalty `lambda`.
///
/// Both operands are centered internally; intercepts reproduce the training
/// column means.  With `lambda == 0` the design must have full column rank
/// (relative tolerance `1e-10` on singular values) or the call fails with
/// `SingularSystem`.
pub fn ridge_fit(x: &Matrix, y: &Matrix, lambda: f64) -> Result<RidgeModel> {
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows but y has {}",
            x.rows(),
            y.rows()
        )));
    }
    if x.rows() < 2 {
        return Err(Error::TooFewSamples(format!(
            "ridge needs at least 2 rows, got {}",
            x.rows()
        )));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be >= 0 and finite, got {lambda}"
        )));
    }
    let svd = DesignSvd::new(x)?;
    if lambda == 0.0 && !svd.full_column_rank(x.cols()) {
        return Err(Error::SingularSystem(format!(
            "design is rank deficient ({} of {} columns) and lambda is 0",
            svd.sv
                .iter()
                .filter(|&&s| s > RANK_TOL * svd.sv[0])
                .count(),
            x.cols()
        )));
    }
    let (yc, y_means) = center_columns(y);
    let w = svd.solve(&yc.to_dmatrix(), lambda);
    let weights = Matrix::from_dmatrix(&w);
    let intercepts = intercepts_from(&svd.x_means, &y_means, &weights);
    Ok(RidgeModel { weights, intercepts, lambda })
}

/// `b0 = mean(y) - mean(x) . W`, one entry per target.
pub(crate) fn intercepts_from(x_means: &[f64], y_means: &[f64], weights: &Matrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(y_means.len());
    for t in 0..y_means.len() {
        let mut acc = y_means[t];
        for (j, xm) in x_means.iter().enumerate() {
            acc -= xm * weights.get(j, t);
        }
        out.push(acc);
    }
    out
}

/// Coefficient of determination of predictions against observations.
///
/// `1 - SS_res / SS_tot` with `SS_tot` around the observed mean.  Fails with
/// `ConstantTarget` when the observations have variance below `1e-15`.
pub fn r2_score(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch(format!(
            "{} observed vs {} predicted values",
            observed.len(),
            predicted.len()
        )));
    }
    if observed.len() < 2 {
        return Err(Error::TooFewSamples("need at least 2 values for R^2".into()));
    }
    let m = mean(observed);
    let ss_tot: f64 = observed.iter().map(|y| (y - m) * (y - m)).sum();
    if ss_tot / (observed.len() - 1) as f64 <= VAR_TOL {
        return Err(Error::ConstantTarget(
            "observed values are constant; R^2 is undefined".into(),
        ));
    }
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Thin SVD with singular values sorted in non-increasing order.
///
/// Returns `(singular_values, U, V^T)`; `U` is computed only when `with_u`.
fn thin_svd(
    m: &DMatrix<f64>,
    with_u: bool,
) -> Result<(Vec<f64>, Option<DMatrix<f64>>, Option<DMatrix<f64>>)> {
    let svd = m
        .clone()
        .try_svd(with_u, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::SvdFailed("singular value decomposition did not converge".into()))?;
    let raw: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
    let sv: Vec<f64> = order.iter().map(|&i| raw[i]).collect();

    let vt_raw = svd.v_t.expect("requested V^T");
    let mut vt = DMatrix::zeros(vt_raw.nrows(), vt_raw.ncols());
    for (new_r, &old_r) in order.iter().enumerate() {
        for c in 0..vt_raw.ncols() {
            vt[(new_r, c)] = vt_raw[(old_r, c)];
        }
    }
    let u = if with_u {
        let u_raw = svd.u.expect("requested U");
        let mut u = DMatrix::zeros(u_raw.nrows(), u_raw.ncols());
        for (new_c, &old_c) in order.iter().enumerate() {
            for r in 0..u_raw.nrows() {
                u[(r, new_c)] = u_raw[(r, old_c)];
            }
        }
        Some(u)
    } else {
        None
    };
    Ok((sv, u, Some(vt)))
}
