//! Executes resolved runs: library calls, output files, stdout summaries.
//!
//! Each command writes its result files under the run's output prefix and
//! finishes by writing the metadata sidecar, so a sidecar on disk implies
//! the outputs beside it are complete.  All file writes are atomic.

use crate::runspec::{AlignParams, IdModeSpec, PMethodSpec, RunSpec};
use repgeom::alignment::{self, AlignmentConfig, AlignmentResult, ZooModel};
use repgeom::dimension::{self, EstimatorKind, IdMode};
use repgeom::error::{Error, Result};
use repgeom::io::{self, Cell, ModelEntry, ModelManifest, ResultTable, RgmDtype};
use repgeom::noise_ceiling::{self, TrialCounts};
use repgeom::stats::{self, PValueMethod};
use repgeom::synthetic::{self, ManifoldSpec, TeacherNoise, TrialSpec, ZooSpec};
use std::path::{Path, PathBuf};

/// Run a command and record its sidecar once every output is in place.
pub fn execute_and_record(spec: &RunSpec) -> Result<()> {
    execute(spec)?;
    crate::runspec::write_sidecar(spec)
}

fn execute(spec: &RunSpec) -> Result<()> {
    match spec {
        RunSpec::IdEstimate { embeddings, estimator, k, mode, seed, out } => {
            id_estimate(embeddings, *estimator, *k, mode, *seed, out)
        }
        RunSpec::IdSweep { embeddings, estimator, k_list, out } => {
            id_sweep(embeddings, *estimator, k_list, out)
        }
        RunSpec::CorrelationDim { embeddings, epsilons, seed, out } => {
            correlation_dim(embeddings, epsilons, *seed, out)
        }
        RunSpec::AlignBrain { embeddings, responses, params, ceiling, out } => {
            align_brain(embeddings, responses, params, ceiling.as_deref(), out)
        }
        RunSpec::AlignModels { a, b, params, out } => align_models(a, b, params, out),
        RunSpec::AlignReference { manifest, params, out } => {
            align_reference(manifest, params, out)
        }
        RunSpec::CeilingFromTrials { trials, repeat_counts, out } => {
            ceiling_from_trials(trials, repeat_counts, out)
        }
        RunSpec::CeilingFromCounts { triple, double, single, s2, out } => {
            ceiling_from_counts(*triple, *double, *single, *s2, out)
        }
        RunSpec::StatsCorrelate { table, x, y, method, p_method, seed, out } => {
            stats_correlate(table, x, y, *method, *p_method, *seed, out)
        }
        RunSpec::StatsBin { table, x, bins, out } => stats_bin(table, x, *bins, out),
        RunSpec::StatsWithinGroup { scores, table, x, bins, out } => {
            stats_within_group(scores, table, x, *bins, out)
        }
        RunSpec::StatsGrouped { table, key, out } => stats_grouped(table, key, out),
        RunSpec::SynthManifold { kind, dim, ambient, n, noise, seed, out } => {
            let spec = ManifoldSpec {
                kind: *kind,
                intrinsic_dim: *dim,
                ambient: *ambient,
                n: *n,
                noise_sigma: *noise,
                seed: *seed,
            };
            synth_manifold(&spec, out)
        }
        RunSpec::SynthTeacher { embeddings, targets, fraction, noise_sigma, seed, out } => {
            synth_teacher(embeddings, *targets, *fraction, *noise_sigma, *seed, out)
        }
        RunSpec::SynthTrials { images, weights, signal, noise, seed, out } => {
            let spec = TrialSpec {
                n_images: *images,
                proportions: *weights,
                signal_variance: *signal,
                noise_variance: *noise,
                seed: *seed,
            };
            synth_trials(&spec, out)
        }
        RunSpec::SynthZoo { models, base_dim, ambient, samples, id_spread, coupling, seed, out } => {
            let spec = ZooSpec {
                n_models: *models,
                base_dim: *base_dim,
                ambient: *ambient,
                n_samples: *samples,
                id_spread: synthetic::linspace_levels(*models, *id_spread),
                coupling: *coupling,
                seed: *seed,
            };
            synth_zoo(&spec, out)
        }
    }
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", prefix.display()))
}

fn mean_median(values: &[f64]) -> (f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut sorted = finite;
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    (mean, median)
}

// ---------------------------------------------------------------------------
// id
// ---------------------------------------------------------------------------

fn id_estimate(
    embeddings: &Path,
    estimator: EstimatorKind,
    k: usize,
    mode: &IdModeSpec,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let z = io::read_matrix_auto(embeddings)?;
    let est = match mode {
        IdModeSpec::Global => dimension::id_dataset(&z, k, estimator)?,
        IdModeSpec::LocalKnn { neighborhood } => {
            dimension::local_id(&z, seed, *neighborhood, k, estimator)?
        }
        IdModeSpec::RandomSubsample { subsample } => {
            dimension::subsample_id(&z, *subsample, seed, k, estimator)?
        }
    };
    // Per-point table.  `row` is the dataset row for global and subsample
    // runs; for local runs it indexes the extracted neighborhood, with
    // row 0 the anchor.
    let mut t = ResultTable::new(vec!["row", "local_id"])?;
    for (pos, v) in est.per_point.iter().enumerate() {
        let row = match &est.mode {
            IdMode::RandomSubsample { indices, .. } => indices[pos],
            _ => pos,
        };
        t.push_row(vec![Cell::Float(row as f64), Cell::Float(v.unwrap_or(f64::NAN))])?;
    }
    io::write_table(&t, &suffixed(out, ".csv"))?;
    println!(
        "{} m(K={}) = {:.6}  (evaluated {}, excluded {})",
        estimator.name(),
        est.k,
        est.value,
        est.evaluated,
        est.excluded
    );
    Ok(())
}

fn id_sweep(embeddings: &Path, estimator: EstimatorKind, k_list: &[usize], out: &Path) -> Result<()> {
    let z = io::read_matrix_auto(embeddings)?;
    let curve = dimension::scale_sweep(&z, k_list, estimator)?;
    let mut t = ResultTable::new(vec!["k", "estimate", "excluded"])?;
    for (i, &k) in curve.k_values.iter().enumerate() {
        t.push_row(vec![
            Cell::Float(k as f64),
            Cell::Float(curve.estimates[i]),
            Cell::Float(curve.excluded[i] as f64),
        ])?;
        println!("{} m(K={k}) = {:.6}", estimator.name(), curve.estimates[i]);
    }
    io::write_table(&t, &suffixed(out, ".csv"))
}

fn correlation_dim(embeddings: &Path, epsilons: &[f64], seed: u64, out: &Path) -> Result<()> {
    let z = io::read_matrix_auto(embeddings)?;
    let est = dimension::correlation_dimension(&z, epsilons, seed)?;
    let mut curve = ResultTable::new(vec!["epsilon", "c", "used"])?;
    for p in &est.curve {
        curve.push_row(vec![
            Cell::Float(p.epsilon),
            Cell::Float(p.c),
            Cell::Float(f64::from(u8::from(p.used))),
        ])?;
    }
    io::write_table(&curve, &suffixed(out, ".csv"))?;
    let mut summary = ResultTable::new(vec!["slope", "pairs", "subsampled"])?;
    summary.push_row(vec![
        Cell::Float(est.slope),
        Cell::Float(est.pairs as f64),
        Cell::Float(f64::from(u8::from(est.subsampled))),
    ])?;
    io::write_table(&summary, &suffixed(out, ".slope.csv"))?;
    println!(
        "correlation dimension = {:.6}  ({} pairs{})",
        est.slope,
        est.pairs,
        if est.subsampled { ", subsampled" } else { "" }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

fn alignment_config(p: &AlignParams) -> AlignmentConfig {
    AlignmentConfig {
        n_components: p.pcs,
        lambda_grid: p.lambda_grid.clone(),
        outer_folds: AlignmentConfig::default().outer_folds,
        inner_folds: p.folds,
        test_fraction: p.test_fraction,
        seed: p.seed,
        lambda_select: p.lambda_select,
        standardize: p.standardize,
    }
}

/// Read a per-target float column: a column named `preferred` if present,
/// otherwise the table's only float column.
fn read_float_column(path: &Path, preferred: &str) -> Result<Vec<f64>> {
    let t = io::read_table(path)?;
    if t.column_index(preferred).is_some() {
        return t.float_column(preferred);
    }
    let float_cols: Vec<usize> = (0..t.headers().len()).filter(|&j| t.is_float_column(j)).collect();
    match float_cols.as_slice() {
        [only] => {
            let name = t.headers()[*only].clone();
            t.float_column(&name)
        }
        _ => Err(Error::MissingField(format!(
            "{path:?} has no '{preferred}' column and no unique numeric column"
        ))),
    }
}

fn write_per_target(result: &AlignmentResult, out: &Path) -> Result<()> {
    let normalized = result.ceiling_normalized.as_ref();
    let mut headers = vec!["target", "r2", "lambda", "constant"];
    if normalized.is_some() {
        headers.push("normalized_r2");
        headers.push("ceiling_excluded");
    }
    let mut t = ResultTable::new(headers)?;
    for (i, &r2) in result.per_target_r2.iter().enumerate() {
        let mut row = vec![
            Cell::Float(i as f64),
            Cell::Float(r2),
            Cell::Float(result.chosen_lambdas[i]),
            Cell::Float(f64::from(u8::from(result.flagged_constant.contains(&i)))),
        ];
        if let Some(cn) = normalized {
            row.push(Cell::Float(cn.values[i]));
            row.push(Cell::Float(f64::from(u8::from(cn.excluded.contains(&i)))));
        }
        t.push_row(row)?;
    }
    io::write_table(&t, &suffixed(out, ".csv"))
}

fn align_brain(
    embeddings: &Path,
    responses: &Path,
    params: &AlignParams,
    ceiling: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let x = io::read_matrix_auto(embeddings)?;
    let y = io::read_matrix_auto(responses)?;
    let cfg = alignment_config(params);
    let (_, mut result) = alignment::run_encoding(&x, &y, &cfg)?;
    if let Some(nc_path) = ceiling {
        let nc = read_float_column(nc_path, "nc")?;
        result = noise_ceiling::normalize_alignment(&result, &nc)?;
    }
    write_per_target(&result, out)?;

    let mut headers = vec!["mean_r2", "median_r2", "n_targets", "n_constant"];
    let mut row = vec![
        Cell::Float(result.summary.mean),
        Cell::Float(result.summary.median),
        Cell::Float(result.per_target_r2.len() as f64),
        Cell::Float(result.flagged_constant.len() as f64),
    ];
    if let Some(cn) = &result.ceiling_normalized {
        let (nmean, nmedian) = mean_median(&cn.values);
        headers.extend(["normalized_mean", "normalized_median", "n_ceiling_excluded"]);
        row.extend([
            Cell::Float(nmean),
            Cell::Float(nmedian),
            Cell::Float(cn.excluded.len() as f64),
        ]);
    }
    let mut summary = ResultTable::new(headers)?;
    summary.push_row(row)?;
    io::write_table(&summary, &suffixed(out, ".summary.csv"))?;
    println!(
        "held-out R²: mean = {:.6}, median = {:.6}  ({} targets, {} constant)",
        result.summary.mean,
        result.summary.median,
        result.per_target_r2.len(),
        result.flagged_constant.len()
    );
    if let Some(cn) = &result.ceiling_normalized {
        let (nmean, nmedian) = mean_median(&cn.values);
        println!(
            "ceiling-normalized: mean = {nmean:.6}, median = {nmedian:.6}  ({} excluded)",
            cn.excluded.len()
        );
    }
    Ok(())
}

fn align_models(a: &Path, b: &Path, params: &AlignParams, out: &Path) -> Result<()> {
    let za = io::read_matrix_auto(a)?;
    let zb = io::read_matrix_auto(b)?;
    let cfg = alignment_config(params);
    let res = alignment::align_models(&za, &zb, &cfg)?;
    let mut t = ResultTable::new(vec![
        "score",
        "a_to_b_mean",
        "b_to_a_mean",
        "a_to_b_median",
        "b_to_a_median",
    ])?;
    t.push_row(vec![
        Cell::Float(res.score),
        Cell::Float(res.a_to_b.summary.mean),
        Cell::Float(res.b_to_a.summary.mean),
        Cell::Float(res.a_to_b.summary.median),
        Cell::Float(res.b_to_a.summary.median),
    ])?;
    io::write_table(&t, &suffixed(out, ".csv"))?;
    println!(
        "alignment = {:.6}  (a→b mean {:.6}, b→a mean {:.6})",
        res.score, res.a_to_b.summary.mean, res.b_to_a.summary.mean
    );
    Ok(())
}

fn align_reference(manifest_path: &Path, params: &AlignParams, out: &Path) -> Result<()> {
    let manifest = io::load_manifest(manifest_path)?;
    let mut zoo = Vec::with_capacity(manifest.models.len());
    for entry in &manifest.models {
        let accuracy = entry.accuracy.ok_or_else(|| {
            Error::ManifestError(format!(
                "model '{}': accuracy is required for reference analysis",
                entry.name
            ))
        })?;
        let embedding = io::read_matrix_auto(Path::new(&entry.embedding_path))?;
        zoo.push(ZooModel { name: entry.name.clone(), accuracy, embedding });
    }
    let cfg = alignment_config(params);
    let table = alignment::reference_alignment(&zoo, &cfg)?;

    let mut t = ResultTable::new(vec![
        "model",
        "accuracy",
        "score",
        "to_reference_mean",
        "from_reference_mean",
    ])?;
    for s in &table.scores {
        let accuracy = zoo
            .iter()
            .find(|m| m.name == s.model)
            .map(|m| m.accuracy)
            .unwrap_or(f64::NAN);
        t.push_row(vec![
            Cell::Str(s.model.clone()),
            Cell::Float(accuracy),
            Cell::Float(s.score),
            Cell::Float(s.to_reference_mean),
            Cell::Float(s.from_reference_mean),
        ])?;
    }
    io::write_table(&t, &suffixed(out, ".csv"))?;

    let mut summary = ResultTable::new(vec!["reference", "tie_broken", "n_models"])?;
    summary.push_row(vec![
        Cell::Str(table.reference.clone()),
        Cell::Float(f64::from(u8::from(table.tie_broken))),
        Cell::Float(zoo.len() as f64),
    ])?;
    io::write_table(&summary, &suffixed(out, ".summary.csv"))?;
    println!(
        "reference = {}  ({} models scored{})",
        table.reference,
        table.scores.len(),
        if table.tie_broken { ", accuracy tie broken by name" } else { "" }
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ceiling
// ---------------------------------------------------------------------------

fn write_ceiling(counts: &TrialCounts, s2: f64, out: &Path) -> Result<()> {
    let n_eff = noise_ceiling::effective_noise(counts)?;
    let res = noise_ceiling::ceiling_result(s2, n_eff)?;
    let mut t = ResultTable::new(vec!["triple", "double", "single", "n_eff", "s2", "nc"])?;
    t.push_row(vec![
        Cell::Float(counts.triple as f64),
        Cell::Float(counts.double as f64),
        Cell::Float(counts.single as f64),
        Cell::Float(res.n_eff),
        Cell::Float(res.s2),
        Cell::Float(res.nc),
    ])?;
    io::write_table(&t, &suffixed(out, ".csv"))?;
    println!("noise ceiling = {:.6}  (N_eff = {:.6}, S² = {:.6})", res.nc, res.n_eff, res.s2);
    Ok(())
}

/// Repeat counts from a CSV: a `repeats` column if present, otherwise the
/// table's only numeric column.  Values must be whole numbers.
fn read_repeat_counts(path: &Path) -> Result<Vec<usize>> {
    let raw = read_float_column(path, "repeats")?;
    raw.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidArgument(format!(
                    "repeat count at row {i} is {v}, not a whole number"
                )))
            }
        })
        .collect()
}

fn ceiling_from_trials(trials: &Path, repeat_counts: &Path, out: &Path) -> Result<()> {
    let m = io::read_matrix_auto(trials)?;
    let reps = read_repeat_counts(repeat_counts)?;
    let s2 = noise_ceiling::estimate_signal_variance(&m, &reps)?;
    let counts = TrialCounts::from_repeats(&reps)?;
    write_ceiling(&counts, s2, out)
}

fn ceiling_from_counts(triple: u64, double: u64, single: u64, s2: f64, out: &Path) -> Result<()> {
    write_ceiling(&TrialCounts { triple, double, single }, s2, out)
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

fn stats_correlate(
    table: &Path,
    x: &str,
    y: &str,
    method: Option<stats::CorrMethod>,
    p_method: PMethodSpec,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let t = io::read_table(table)?;
    let xs = t.float_column(x)?;
    let ys = t.float_column(y)?;
    let pv = match p_method {
        PMethodSpec::TApprox => PValueMethod::TApprox,
        PMethodSpec::Permutation { rounds } => PValueMethod::Permutation { rounds, seed },
    };
    let methods = match method {
        Some(m) => vec![m],
        None => vec![stats::CorrMethod::Pearson, stats::CorrMethod::Spearman],
    };
    let mut result = ResultTable::new(vec!["method", "r", "p", "n"])?;
    for m in methods {
        let rep = stats::correlate(&xs, &ys, m, pv)?;
        result.push_row(vec![
            Cell::Str(m.name().to_string()),
            Cell::Float(rep.r),
            Cell::Float(rep.p),
            Cell::Float(rep.n as f64),
        ])?;
        println!("{}: r = {:.6}, p = {:.6}, n = {}", m.name(), rep.r, rep.p, rep.n);
    }
    io::write_table(&result, &suffixed(out, ".csv"))
}

fn stats_bin(table: &Path, x: &str, bins: usize, out: &Path) -> Result<()> {
    let t = io::read_table(table)?;
    let values = t.float_column(x)?;
    let g = stats::bin_by(&values, bins)?;
    let mut rows = ResultTable::new(vec!["row", "value", "bin"])?;
    for (i, (&v, &b)) in values.iter().zip(&g.labels).enumerate() {
        rows.push_row(vec![Cell::Float(i as f64), Cell::Float(v), Cell::Float(b as f64)])?;
    }
    io::write_table(&rows, &suffixed(out, ".csv"))?;
    let mut edges = ResultTable::new(vec!["bin", "upper_value"])?;
    for (b, &e) in g.boundaries.iter().enumerate() {
        edges.push_row(vec![Cell::Float(b as f64), Cell::Float(e)])?;
    }
    io::write_table(&edges, &suffixed(out, ".boundaries.csv"))?;
    let sizes: Vec<usize> = (0..g.n_bins).map(|b| g.members(b).len()).collect();
    println!("binned {} rows into {} bins, sizes {:?}", values.len(), g.n_bins, sizes);
    Ok(())
}

fn stats_within_group(
    scores_path: &Path,
    table: &Path,
    x: &str,
    bins: usize,
    out: &Path,
) -> Result<()> {
    let scores = io::read_matrix_auto(scores_path)?;
    let t = io::read_table(table)?;
    let values = t.float_column(x)?;
    let g = stats::bin_by(&values, bins)?;
    let dist = stats::within_group_alignment(&scores, &g)?;

    let mut means = ResultTable::new(vec!["group", "n_pairs", "mean"])?;
    let mut pairs = ResultTable::new(vec!["group", "i", "j", "value"])?;
    for w in &dist {
        means.push_row(vec![
            Cell::Float(w.group as f64),
            Cell::Float(w.pair_values.len() as f64),
            Cell::Float(w.mean.unwrap_or(f64::NAN)),
        ])?;
        let members = g.members(w.group);
        let mut k = 0;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pairs.push_row(vec![
                    Cell::Float(w.group as f64),
                    Cell::Float(i as f64),
                    Cell::Float(j as f64),
                    Cell::Float(w.pair_values[k]),
                ])?;
                k += 1;
            }
        }
        println!(
            "group {}: {} pairs, mean = {}",
            w.group,
            w.pair_values.len(),
            w.mean.map_or("n/a".to_string(), |m| format!("{m:.6}")),
        );
    }
    io::write_table(&means, &suffixed(out, ".csv"))?;
    io::write_table(&pairs, &suffixed(out, ".pairs.csv"))
}

fn stats_grouped(table: &Path, key: &str, out: &Path) -> Result<()> {
    let t = io::read_table(table)?;
    let summary = stats::grouped_summary(&t, key)?;

    let mut headers: Vec<String> = vec!["group".into(), "n".into()];
    for c in &summary.columns {
        headers.push(format!("mean:{c}"));
    }
    for c in &summary.columns {
        headers.push(format!("median:{c}"));
    }
    let mut groups = ResultTable::new(headers)?;
    for gr in &summary.groups {
        let mut row = vec![Cell::Str(gr.label.clone()), Cell::Float(gr.n as f64)];
        row.extend(gr.means.iter().map(|&v| Cell::Float(v)));
        row.extend(gr.medians.iter().map(|&v| Cell::Float(v)));
        groups.push_row(row)?;
        println!("group {} (n = {}): means {:?}", gr.label, gr.n, gr.means);
    }
    io::write_table(&groups, &suffixed(out, ".groups.csv"))?;

    let mut headers: Vec<String> = vec!["a".into(), "b".into()];
    for c in &summary.columns {
        headers.push(format!("diff:{c}"));
    }
    let mut contrasts = ResultTable::new(headers)?;
    for c in &summary.contrasts {
        let mut row = vec![Cell::Str(c.a.clone()), Cell::Str(c.b.clone())];
        row.extend(c.mean_differences.iter().map(|&v| Cell::Float(v)));
        contrasts.push_row(row)?;
    }
    io::write_table(&contrasts, &suffixed(out, ".contrasts.csv"))
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

fn synth_manifold(spec: &ManifoldSpec, out: &Path) -> Result<()> {
    let z = synthetic::sample_manifold(spec)?;
    io::write_matrix(&z, &suffixed(out, ".rgm"), RgmDtype::F64)?;
    println!(
        "wrote {} x {} embedding ({:?}, intrinsic dim {})",
        z.rows(),
        z.cols(),
        spec.kind,
        spec.intrinsic_dim
    );
    Ok(())
}

fn synth_teacher(
    embeddings: &Path,
    targets: usize,
    fraction: Option<f64>,
    noise_sigma: Option<f64>,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let x = io::read_matrix_auto(embeddings)?;
    let noise = match (fraction, noise_sigma) {
        (Some(f), None) => TeacherNoise::ExplainableFraction(f),
        (None, Some(s)) => TeacherNoise::Sigma(s),
        _ => {
            return Err(Error::InvalidArgument(
                "teacher noise needs exactly one of fraction / noise sigma".into(),
            ))
        }
    };
    let teacher = synthetic::linear_teacher(&x, targets, noise, seed)?;
    io::write_matrix(&teacher.targets, &suffixed(out, ".rgm"), RgmDtype::F64)?;
    io::write_matrix(&teacher.weights, &suffixed(out, ".weights.rgm"), RgmDtype::F64)?;
    let mut t = ResultTable::new(vec!["target", "explainable_fraction", "noise_sigma"])?;
    for i in 0..targets {
        t.push_row(vec![
            Cell::Float(i as f64),
            Cell::Float(teacher.explainable_fraction[i]),
            Cell::Float(teacher.noise_sigma[i]),
        ])?;
    }
    io::write_table(&t, &suffixed(out, ".targets.csv"))?;
    let (fmean, _) = mean_median(&teacher.explainable_fraction);
    println!(
        "wrote {} targets over {} rows (mean explainable fraction {:.6})",
        targets,
        x.rows(),
        fmean
    );
    Ok(())
}

fn synth_trials(spec: &TrialSpec, out: &Path) -> Result<()> {
    let data = synthetic::repeated_trials(spec)?;
    io::write_matrix(&data.trials, &suffixed(out, ".rgm"), RgmDtype::F64)?;
    let mut counts = ResultTable::new(vec!["image", "repeats"])?;
    for (i, &r) in data.repeat_counts.iter().enumerate() {
        counts.push_row(vec![Cell::Float(i as f64), Cell::Float(r as f64)])?;
    }
    io::write_table(&counts, &suffixed(out, ".counts.csv"))?;
    let mut truth = ResultTable::new(vec![
        "triple",
        "double",
        "single",
        "n_eff",
        "signal_variance",
        "noise_variance",
        "true_ceiling",
    ])?;
    truth.push_row(vec![
        Cell::Float(data.counts.triple as f64),
        Cell::Float(data.counts.double as f64),
        Cell::Float(data.counts.single as f64),
        Cell::Float(data.n_eff),
        Cell::Float(spec.signal_variance),
        Cell::Float(spec.noise_variance),
        Cell::Float(data.true_ceiling),
    ])?;
    io::write_table(&truth, &suffixed(out, ".truth.csv"))?;
    println!(
        "wrote {} images (counts {}/{}/{}), analytic ceiling {:.6}",
        spec.n_images, data.counts.triple, data.counts.double, data.counts.single, data.true_ceiling
    );
    Ok(())
}

fn synth_zoo(spec: &ZooSpec, out: &Path) -> Result<()> {
    let zoo = synthetic::synth_zoo(spec)?;
    let stem = out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "zoo".to_string());
    let mut entries = Vec::with_capacity(zoo.truth.len());
    let mut truth = ResultTable::new(vec!["model", "noise_level", "accuracy"])?;
    for (m, truth_row) in zoo.embeddings.iter().zip(&zoo.truth) {
        let file_name = format!("{stem}-{}.rgm", truth_row.name);
        io::write_matrix(m, &suffixed(out, &format!("-{}.rgm", truth_row.name)), RgmDtype::F64)?;
        entries.push(ModelEntry {
            name: truth_row.name.clone(),
            family: "synthetic".to_string(),
            accuracy: Some(truth_row.accuracy),
            embedding_path: file_name,
            params_m: None,
            pretrain_dataset: None,
        });
        truth.push_row(vec![
            Cell::Str(truth_row.name.clone()),
            Cell::Float(truth_row.noise_level),
            Cell::Float(truth_row.accuracy),
        ])?;
    }
    io::write_manifest(&ModelManifest { models: entries }, &suffixed(out, ".manifest.json"))?;
    io::write_table(&truth, &suffixed(out, ".truth.csv"))?;
    println!(
        "wrote {} model embeddings ({} x {}) and a manifest",
        zoo.embeddings.len(),
        spec.n_samples,
        spec.ambient
    );
    Ok(())
}
