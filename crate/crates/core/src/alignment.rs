//! Cross-representation prediction pipelines.
//!
//! Both pipelines share one core: split rows into train/test, fit PCA on
//! the training rows only, project both partitions, ridge-regress each
//! target on the projected features with the penalty tuned by
//! cross-validation inside the training partition, and report per-target
//! held-out R².
//!
//! * [`fit_encoding`] / [`score_encoding`] — predict response targets
//!   (e.g. voxels) from one representation.
//! * [`align_models`] — predict each representation's principal-component
//!   coordinates from the other and average the two mean R² values into a
//!   single symmetric score.
//! * [`reference_alignment`] — score every zoo model against the
//!   highest-accuracy one.

use crate::error::{Error, Result};
use crate::linalg::{self, intercepts_from, DesignSvd, PcaModel, PcaOptions};
use crate::matrix::Matrix;
use crate::seed;
use crate::util::{mean, median, sample_variance};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;

/// Variance below which a target column counts as constant.
const VAR_TOL: f64 = 1e-15;

/// A deterministic train/test partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    /// Training row indices, ascending.
    pub train_indices: Vec<usize>,
    /// Test row indices, ascending; disjoint from training.
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Split `n` rows into train/test by a seeded shuffle.
///
/// The test side receives `round(n * test_fraction)` rows, clamped so both
/// sides keep at least one row.
pub fn split_dataset(n: usize, test_fraction: f64, split_seed: u64) -> Result<SplitSpec> {
    if n < 5 {
        return Err(Error::TooFewSamples(format!(
            "splitting needs at least 5 rows, got {n}"
        )));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(split_seed, "split/shuffle"));
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut test_indices = order[..n_test].to_vec();
    let mut train_indices = order[n_test..].to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();
    Ok(SplitSpec { train_indices, test_indices, seed: split_seed, test_fraction })
}

/// How the ridge penalty is selected across targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSelect {
    /// Each target keeps the penalty that maximized its own validation R².
    #[default]
    PerTarget,
    /// One penalty for all targets, maximizing the mean validation R².
    Shared,
}

/// Configuration shared by every pipeline in this module.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentConfig {
    /// Principal components kept from the predictor side (capped at the
    /// rank bound of the training rows).
    pub n_components: usize,
    /// Candidate ridge penalties: non-empty, positive, ascending.
    pub lambda_grid: Vec<f64>,
    /// Folds of the evaluation protocol this configuration describes;
    /// recorded in outputs.  The pipeline itself evaluates on the single
    /// held-out test partition.
    pub outer_folds: usize,
    /// Folds of the penalty-selection cross-validation inside the
    /// training partition.
    pub inner_folds: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub lambda_select: LambdaSelect,
    /// Standardize predictor columns before PCA.
    pub standardize: bool,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            n_components: 300,
            lambda_grid: default_lambda_grid(),
            outer_folds: 5,
            inner_folds: 5,
            test_fraction: 0.2,
            seed: 0,
            lambda_select: LambdaSelect::PerTarget,
            standardize: false,
        }
    }
}

/// The default penalty grid: 13 points log-spaced from 1e-3 to 1e5.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-3.0 + i as f64 * 8.0 / 12.0)).collect()
}

impl AlignmentConfig {
    fn validate(&self) -> Result<()> {
        if self.n_components == 0 {
            return Err(Error::InvalidArgument("n_components must be >= 1".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidArgument("empty penalty grid".into()));
        }
        for w in self.lambda_grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument("penalty grid must be ascending".into()));
            }
        }
        if !self.lambda_grid.iter().all(|&l| l.is_finite() && l > 0.0) {
            return Err(Error::InvalidArgument("penalties must be positive and finite".into()));
        }
        if self.outer_folds < 2 || self.inner_folds < 2 {
            return Err(Error::InvalidArgument("fold counts must be >= 2".into()));
        }
        Ok(())
    }
}

/// A fitted encoding pipeline: projection basis plus per-target ridge maps.
#[derive(Debug, Clone)]
pub struct EncodingModel {
    pub pca: PcaModel,
    /// `components x targets` weights on the projected features.
    pub weights: Matrix,
    pub intercepts: Vec<f64>,
    /// Penalty chosen for each target (`NaN` for flagged targets).
    pub chosen_lambdas: Vec<f64>,
    /// Targets constant on the training rows; they predict their training
    /// mean and are excluded from score summaries.
    pub flagged_constant: Vec<usize>,
    pub split: SplitSpec,
    pub config: AlignmentConfig,
}

/// Mean and median of the valid per-target scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentSummary {
    pub mean: f64,
    pub median: f64,
}

/// Ceiling-normalized scores attached by the noise-ceiling module.
#[derive(Debug, Clone, PartialEq)]
pub struct CeilingNormalized {
    /// `per_target_r2 / ceiling`, `NaN` where excluded.
    pub values: Vec<f64>,
    /// Targets excluded for ceilings below the reliability floor.
    pub excluded: Vec<usize>,
}

/// Held-out scores of one fitted pipeline.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// Per-target held-out R² (`NaN` for targets flagged constant).
    pub per_target_r2: Vec<f64>,
    pub summary: AlignmentSummary,
    pub chosen_lambdas: Vec<f64>,
    pub flagged_constant: Vec<usize>,
    pub split: SplitSpec,
    /// Present only after ceiling normalization.
    pub ceiling_normalized: Option<CeilingNormalized>,
}

fn centered_dmatrix(m: &Matrix) -> (DMatrix<f64>, Vec<f64>) {
    let mut means = vec![0.0; m.cols()];
    for j in 0..m.cols() {
        means[j] = mean(&m.column(j));
    }
    let mut out = DMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        let row = m.row(i);
        for j in 0..m.cols() {
            out[(i, j)] = row[j] - means[j];
        }
    }
    (out, means)
}

/// Fit the encoding pipeline on the training partition of `(x, y)`.
///
/// PCA is fit on training predictors only (no leakage from test rows).
/// The ridge penalty is selected per target — or shared, per the config —
/// by `inner_folds`-fold cross-validation over the training rows, scored
/// by mean validation R²; exact ties go to the smallest penalty.  The final
/// model is refit on all training rows at the chosen penalties.
pub fn fit_encoding(x: &Matrix, y: &Matrix, cfg: &AlignmentConfig) -> Result<EncodingModel> {
    cfg.validate()?;
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows but y has {}",
            x.rows(),
            y.rows()
        )));
    }
    x.validate_finite()?;
    y.validate_finite()?;
    let split = split_dataset(x.rows(), cfg.test_fraction, cfg.seed)?;
    fit_encoding_on_split(x, y, cfg, split)
}

fn fit_encoding_on_split(
    x: &Matrix,
    y: &Matrix,
    cfg: &AlignmentConfig,
    split: SplitSpec,
) -> Result<EncodingModel> {
    let n_train = split.train_indices.len();
    if n_train < 2 * cfg.inner_folds {
        return Err(Error::TooFewSamples(format!(
            "{n_train} training rows cannot support {}-fold penalty selection",
            cfg.inner_folds
        )));
    }
    let x_train = x.select_rows(&split.train_indices);
    let y_train = y.select_rows(&split.train_indices);

    let pca = linalg::pca_fit_with(
        &x_train,
        cfg.n_components,
        PcaOptions { standardize: cfg.standardize },
    )?;
    let s_train = linalg::pca_project(&pca, &x_train)?;

    let m = y.cols();
    let flagged: Vec<usize> = (0..m)
        .filter(|&t| sample_variance(&y_train.column(t)) <= VAR_TOL)
        .collect();
    let is_flagged = |t: usize| flagged.binary_search(&t).is_ok();

    // Fold assignment: training-row positions shuffled once, then dealt
    // round-robin so fold sizes differ by at most one.
    let folds = cfg.inner_folds;
    let mut positions: Vec<usize> = (0..n_train).collect();
    positions.shuffle(&mut seed::rng(cfg.seed, "cv/folds"));
    let mut fold_of = vec![0usize; n_train];
    for (i, &p) in positions.iter().enumerate() {
        fold_of[p] = i % folds;
    }

    let grid = &cfg.lambda_grid;
    let mut r2_sum = vec![vec![0.0f64; grid.len()]; m];
    let mut r2_count = vec![0usize; m];
    for fold in 0..folds {
        let fit_rows: Vec<usize> = (0..n_train).filter(|&p| fold_of[p] != fold).collect();
        let val_rows: Vec<usize> = (0..n_train).filter(|&p| fold_of[p] == fold).collect();
        if val_rows.is_empty() || fit_rows.len() < 2 {
            continue;
        }
        let s_fit = s_train.select_rows(&fit_rows);
        let y_fit = y_train.select_rows(&fit_rows);
        let s_val = s_train.select_rows(&val_rows);
        let y_val = y_train.select_rows(&val_rows);

        // Targets scorable in this fold: non-constant on the validation rows.
        let scorable: Vec<usize> = (0..m)
            .filter(|&t| !is_flagged(t) && sample_variance(&y_val.column(t)) > VAR_TOL)
            .collect();
        if scorable.is_empty() {
            continue;
        }
        for &t in &scorable {
            r2_count[t] += 1;
        }

        let svd = DesignSvd::new(&s_fit)?;
        let (yc_fit, y_means) = centered_dmatrix(&y_fit);
        let projected = &svd.ut * &yc_fit; // spectrum x targets, penalty-free part
        for (li, &lambda) in grid.iter().enumerate() {
            let mut t_scaled = projected.clone();
            for (si, &sv) in svd.sv.iter().enumerate() {
                let f = sv / (sv * sv + lambda);
                for c in 0..t_scaled.ncols() {
                    t_scaled[(si, c)] *= f;
                }
            }
            let w = &svd.v * t_scaled; // components x targets
            let weights = Matrix::from_dmatrix(&w);
            let intercepts = intercepts_from(&svd.x_means, &y_means, &weights);
            for &t in &scorable {
                let mut obs = Vec::with_capacity(val_rows.len());
                let mut pred = Vec::with_capacity(val_rows.len());
                for (vi, _) in val_rows.iter().enumerate() {
                    obs.push(y_val.get(vi, t));
                    let row = s_val.row(vi);
                    let mut acc = intercepts[t];
                    for j in 0..s_val.cols() {
                        acc += row[j] * weights.get(j, t);
                    }
                    pred.push(acc);
                }
                let r2 = linalg::r2_score(&obs, &pred)?;
                r2_sum[t][li] += r2;
            }
        }
    }

    // Penalty choice: argmax of mean validation R², first (smallest) grid
    // entry on exact ties; targets never scored fall back to the smallest.
    let pick = |scores: &[f64]| -> usize {
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        best
    };
    let mut chosen_idx = vec![0usize; m];
    match cfg.lambda_select {
        LambdaSelect::PerTarget => {
            for t in 0..m {
                if r2_count[t] > 0 {
                    let means: Vec<f64> =
                        r2_sum[t].iter().map(|s| s / r2_count[t] as f64).collect();
                    chosen_idx[t] = pick(&means);
                }
            }
        }
        LambdaSelect::Shared => {
            let mut grid_means = vec![0.0f64; grid.len()];
            let mut contributors = 0usize;
            for t in 0..m {
                if r2_count[t] > 0 {
                    contributors += 1;
                    for (li, s) in r2_sum[t].iter().enumerate() {
                        grid_means[li] += s / r2_count[t] as f64;
                    }
                }
            }
            let shared = if contributors > 0 { pick(&grid_means) } else { 0 };
            chosen_idx = vec![shared; m];
        }
    }

    // Final refit on all training rows, one solve per distinct penalty.
    let svd = DesignSvd::new(&s_train)?;
    let (yc, y_means) = centered_dmatrix(&y_train);
    let projected = &svd.ut * &yc;
    let k = s_train.cols();
    let mut weights = Matrix::zeros(k, m);
    let mut by_lambda: Vec<Vec<usize>> = vec![Vec::new(); grid.len()];
    for t in 0..m {
        if !is_flagged(t) {
            by_lambda[chosen_idx[t]].push(t);
        }
    }
    for (li, targets) in by_lambda.iter().enumerate() {
        if targets.is_empty() {
            continue;
        }
        let lambda = grid[li];
        let mut block = DMatrix::zeros(projected.nrows(), targets.len());
        for (c, &t) in targets.iter().enumerate() {
            for r in 0..projected.nrows() {
                block[(r, c)] = projected[(r, t)];
            }
        }
        for (si, &sv) in svd.sv.iter().enumerate() {
            let f = sv / (sv * sv + lambda);
            for c in 0..block.ncols() {
                block[(si, c)] *= f;
            }
        }
        let w = &svd.v * block;
        for (c, &t) in targets.iter().enumerate() {
            for j in 0..k {
                weights.set(j, t, w[(j, c)]);
            }
        }
    }
    let intercepts = intercepts_from(&svd.x_means, &y_means, &weights);
    let chosen_lambdas: Vec<f64> = (0..m)
        .map(|t| if is_flagged(t) { f64::NAN } else { grid[chosen_idx[t]] })
        .collect();

    Ok(EncodingModel {
        pca,
        weights,
        intercepts,
        chosen_lambdas,
        flagged_constant: flagged,
        split,
        config: cfg.clone(),
    })
}

/// Score a fitted pipeline on held-out data.
///
/// Targets flagged constant at fit time — or constant on the test rows —
/// score `NaN` and stay out of the summary.
pub fn score_encoding(
    model: &EncodingModel,
    x_test: &Matrix,
    y_test: &Matrix,
) -> Result<AlignmentResult> {
    if x_test.rows() != y_test.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x_test has {} rows but y_test has {}",
            x_test.rows(),
            y_test.rows()
        )));
    }
    if y_test.cols() != model.weights.cols() {
        return Err(Error::DimensionMismatch(format!(
            "y_test has {} targets but the model was fit with {}",
            y_test.cols(),
            model.weights.cols()
        )));
    }
    if x_test.rows() < 2 {
        return Err(Error::TooFewSamples("scoring needs at least 2 rows".into()));
    }
    let s_test = linalg::pca_project(&model.pca, x_test)?;
    let m = y_test.cols();
    let mut flagged = model.flagged_constant.clone();
    let mut per_target = vec![f64::NAN; m];
    for t in 0..m {
        if model.flagged_constant.binary_search(&t).is_ok() {
            continue;
        }
        let obs = y_test.column(t);
        let mut pred = Vec::with_capacity(s_test.rows());
        for i in 0..s_test.rows() {
            let row = s_test.row(i);
            let mut acc = model.intercepts[t];
            for j in 0..s_test.cols() {
                acc += row[j] * model.weights.get(j, t);
            }
            pred.push(acc);
        }
        match linalg::r2_score(&obs, &pred) {
            Ok(r2) => per_target[t] = r2,
            Err(Error::ConstantTarget(_)) => flagged.push(t),
            Err(e) => return Err(e),
        }
    }
    flagged.sort_unstable();
    flagged.dedup();
    let valid: Vec<f64> = per_target.iter().copied().filter(|v| v.is_finite()).collect();
    if valid.is_empty() {
        return Err(Error::ConstantTarget("every target is constant; nothing to score".into()));
    }
    Ok(AlignmentResult {
        per_target_r2: per_target,
        summary: AlignmentSummary { mean: mean(&valid), median: median(&valid) },
        chosen_lambdas: model.chosen_lambdas.clone(),
        flagged_constant: flagged,
        split: model.split.clone(),
        ceiling_normalized: None,
    })
}

/// Split, fit, and score in one call, returning the model and its scores.
pub fn run_encoding(
    x: &Matrix,
    y: &Matrix,
    cfg: &AlignmentConfig,
) -> Result<(EncodingModel, AlignmentResult)> {
    let model = fit_encoding(x, y, cfg)?;
    let x_test = x.select_rows(&model.split.test_indices);
    let y_test = y.select_rows(&model.split.test_indices);
    let result = score_encoding(&model, &x_test, &y_test)?;
    Ok((model, result))
}

/// Two-directional model-to-model alignment.
#[derive(Debug, Clone)]
pub struct ModelAlignment {
    /// Mean of the two directions' mean R².
    pub score: f64,
    pub a_to_b: AlignmentResult,
    pub b_to_a: AlignmentResult,
}

/// Symmetric alignment between two representations of the same rows.
///
/// Each direction predicts the other side's principal-component
/// coordinates (basis fit on that side's training rows) from raw
/// embeddings; the final score averages the two directions' mean R².
/// Both directions share one split, so `align_models(a, b)` and
/// `align_models(b, a)` are bit-identical.
pub fn align_models(za: &Matrix, zb: &Matrix, cfg: &AlignmentConfig) -> Result<ModelAlignment> {
    cfg.validate()?;
    if za.rows() != zb.rows() {
        return Err(Error::DimensionMismatch(format!(
            "representations disagree on row count: {} vs {}",
            za.rows(),
            zb.rows()
        )));
    }
    za.validate_finite()?;
    zb.validate_finite()?;
    let split = split_dataset(za.rows(), cfg.test_fraction, cfg.seed)?;

    let direction = |src: &Matrix, dst: &Matrix| -> Result<AlignmentResult> {
        let dst_train = dst.select_rows(&split.train_indices);
        let dst_pca = linalg::pca_fit_with(
            &dst_train,
            cfg.n_components,
            PcaOptions { standardize: cfg.standardize },
        )?;
        let targets = linalg::pca_project(&dst_pca, dst)?;
        let model = fit_encoding_on_split(src, &targets, cfg, split.clone())?;
        let x_test = src.select_rows(&split.test_indices);
        let y_test = targets.select_rows(&split.test_indices);
        score_encoding(&model, &x_test, &y_test)
    };

    let a_to_b = direction(za, zb)?;
    let b_to_a = direction(zb, za)?;
    let score = 0.5 * (a_to_b.summary.mean + b_to_a.summary.mean);
    Ok(ModelAlignment { score, a_to_b, b_to_a })
}

/// One zoo model ready for alignment analysis.
#[derive(Debug, Clone)]
pub struct ZooModel {
    pub name: String,
    pub accuracy: f64,
    pub embedding: Matrix,
}

/// One model's score against the reference.
#[derive(Debug, Clone)]
pub struct ReferenceScore {
    pub model: String,
    pub score: f64,
    pub to_reference_mean: f64,
    pub from_reference_mean: f64,
}

/// Alignment of every zoo model against the highest-accuracy one.
#[derive(Debug, Clone)]
pub struct ReferenceTable {
    pub reference: String,
    /// True when several models tied for the best accuracy and the name
    /// order decided.
    pub tie_broken: bool,
    /// One row per non-reference model, input order preserved.
    pub scores: Vec<ReferenceScore>,
}

/// Score every model against the zoo's reference model.
///
/// The reference is the maximum-accuracy model; exact accuracy ties pick
/// the lexicographically smallest name, and the table records that a tie
/// occurred.  The reference itself gets no row.
pub fn reference_alignment(zoo: &[ZooModel], cfg: &AlignmentConfig) -> Result<ReferenceTable> {
    if zoo.len() < 2 {
        return Err(Error::ManifestError(format!(
            "reference analysis needs at least 2 models, got {}",
            zoo.len()
        )));
    }
    for m in zoo {
        if !m.accuracy.is_finite() {
            return Err(Error::ManifestError(format!(
                "model '{}' has no usable accuracy",
                m.name
            )));
        }
    }
    let mut names: Vec<&str> = zoo.iter().map(|m| m.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::ManifestError("duplicate model names".into()));
    }

    let mut ref_idx = 0;
    for (i, m) in zoo.iter().enumerate() {
        let r = &zoo[ref_idx];
        if m.accuracy > r.accuracy || (m.accuracy == r.accuracy && m.name < r.name) {
            ref_idx = i;
        }
    }
    let best_acc = zoo[ref_idx].accuracy;
    let tie_broken = zoo.iter().filter(|m| m.accuracy == best_acc).count() > 1;

    let reference = &zoo[ref_idx];
    let mut scores = Vec::with_capacity(zoo.len() - 1);
    for (i, m) in zoo.iter().enumerate() {
        if i == ref_idx {
            continue;
        }
        let pair = align_models(&m.embedding, &reference.embedding, cfg)?;
        scores.push(ReferenceScore {
            model: m.name.clone(),
            score: pair.score,
            to_reference_mean: pair.a_to_b.summary.mean,
            from_reference_mean: pair.b_to_a.summary.mean,
        });
    }
    Ok(ReferenceTable { reference: reference.name.clone(), tie_broken, scores })
}
