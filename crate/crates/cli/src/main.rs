//! `repgeom` — representation-geometry analysis from the command line.
//!
//! Subcommands cover intrinsic-dimension estimation, encoding-model
//! alignment, noise ceilings, table statistics, and synthetic data
//! generation.  Every run resolves its arguments into a full description,
//! executes, and writes that description to `<out>.meta.json`; `repgeom
//! rerun --sidecar <file>` replays a run bit-identically at any thread
//! count.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/computation error.  Errors
//! print one machine-parseable `Class: message` line on standard error.

mod exec;
mod runspec;

use clap::{Args, Parser, Subcommand};
use repgeom::alignment::{self, LambdaSelect};
use repgeom::dimension::EstimatorKind;
use repgeom::stats::CorrMethod;
use repgeom::synthetic::ManifoldKind;
use runspec::{AlignParams, IdModeSpec, PMethodSpec, RunSpec};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "repgeom",
    version,
    about = "Geometry of learned representations: intrinsic dimension, alignment, noise ceilings",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).  Never
    /// affects results, only speed.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Intrinsic-dimension estimation.
    #[command(subcommand)]
    Id(IdCmd),
    /// Ridge-encoding alignment pipelines.
    #[command(subcommand)]
    Align(AlignCmd),
    /// Noise ceiling from trial data or explicit counts.
    Ceiling(CeilingArgs),
    /// Correlations, binning, and grouped comparisons on result tables.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Synthetic dataset generators.
    #[command(subcommand)]
    Synth(SynthCmd),
    /// Replay a previous run from its metadata sidecar.
    Rerun(RerunArgs),
}

#[derive(Subcommand)]
enum IdCmd {
    /// Estimate intrinsic dimension at one neighborhood size.
    Estimate(IdEstimateArgs),
    /// Estimate across an ascending ladder of neighborhood sizes.
    Sweep(IdSweepArgs),
    /// Correlation (fractal) dimension from pairwise distances.
    CorrelationDim(CorrelationDimArgs),
}

#[derive(Args)]
struct IdEstimateArgs {
    /// Embedding matrix (.rgm, or all-numeric .csv).
    #[arg(long)]
    embeddings: PathBuf,
    /// Estimator: mle, mom, or mada.
    #[arg(long, default_value = "mle")]
    estimator: String,
    /// Neighborhood size (number of nearest neighbors per point).
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Row selection: global, local-knn, or random-subsample.
    #[arg(long, default_value = "global")]
    mode: String,
    /// Neighborhood size for local-knn mode.
    #[arg(long, default_value_t = 1000)]
    neighborhood: usize,
    /// Subset size for random-subsample mode.
    #[arg(long, default_value_t = 1000)]
    subsample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <out>.csv and <out>.meta.json.
    #[arg(long, default_value = "id-estimate")]
    out: PathBuf,
}

#[derive(Args)]
struct IdSweepArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long, default_value = "mle")]
    estimator: String,
    /// Comma-separated ascending neighborhood sizes, e.g. 10,20,40,80.
    #[arg(long)]
    k_list: String,
    #[arg(long, default_value = "id-sweep")]
    out: PathBuf,
}

#[derive(Args)]
struct CorrelationDimArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Comma-separated ascending radii for the pair-count curve.
    #[arg(long)]
    epsilons: String,
    /// Seed for pair subsampling on large datasets.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "correlation-dim")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum AlignCmd {
    /// Predict measured responses from embeddings (encoding model).
    Brain(AlignBrainArgs),
    /// Symmetric model-to-model alignment.
    Models(AlignModelsArgs),
    /// Score every manifest model against the highest-accuracy one.
    Reference(AlignReferenceArgs),
}

#[derive(Args)]
struct AlignFlags {
    /// Principal components kept from the predictor side.
    #[arg(long, default_value_t = 300)]
    pcs: usize,
    /// Held-out fraction of rows.
    #[arg(long, default_value_t = 0.2)]
    test_frac: f64,
    /// Comma-separated ascending ridge penalties (default: 13 points
    /// log-spaced from 1e-3 to 1e5).
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Cross-validation folds for penalty selection.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Penalty selection: per-target or shared.
    #[arg(long, default_value = "per-target")]
    lambda_select: String,
    /// Standardize predictor columns before PCA.
    #[arg(long, default_value_t = false)]
    standardize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AlignBrainArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Response matrix, one column per target (e.g. voxel).
    #[arg(long)]
    responses: PathBuf,
    /// Optional per-target noise-ceiling CSV ('nc' column); adds
    /// ceiling-normalized scores.
    #[arg(long)]
    ceiling: Option<PathBuf>,
    #[command(flatten)]
    flags: AlignFlags,
    #[arg(long, default_value = "align-brain")]
    out: PathBuf,
}

#[derive(Args)]
struct AlignModelsArgs {
    /// First embedding matrix.
    #[arg(long)]
    a: PathBuf,
    /// Second embedding matrix (same row count).
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    flags: AlignFlags,
    #[arg(long, default_value = "align-models")]
    out: PathBuf,
}

#[derive(Args)]
struct AlignReferenceArgs {
    /// JSON model manifest; every entry needs an accuracy.
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    flags: AlignFlags,
    #[arg(long, default_value = "align-reference")]
    out: PathBuf,
}

#[derive(Args)]
struct CeilingArgs {
    /// Trial matrix (max-repeats x images) with a repeat-counts CSV.
    #[arg(long, requires = "repeat_counts", conflicts_with_all = ["counts", "s2"])]
    trials: Option<PathBuf>,
    /// Per-image repeat counts CSV ('repeats' column).
    #[arg(long)]
    repeat_counts: Option<PathBuf>,
    /// Image counts shown three, two, and one times: A,B,C.
    #[arg(long, requires = "s2")]
    counts: Option<String>,
    /// Signal variance to combine with --counts.
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long, default_value = "ceiling")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum StatsCmd {
    /// Correlate two numeric table columns.
    Correlate(StatsCorrelateArgs),
    /// Equal-count quantile bins over a numeric column.
    Bin(StatsBinArgs),
    /// Within-bin pair distributions over a symmetric score matrix.
    WithinGroup(StatsWithinGroupArgs),
    /// Per-group means/medians and contrasts keyed by a metadata column.
    Grouped(StatsGroupedArgs),
}

#[derive(Args)]
struct StatsCorrelateArgs {
    /// Result table (CSV).
    #[arg(long)]
    table: PathBuf,
    /// Column name of the first variable.
    #[arg(long)]
    x: String,
    /// Column name of the second variable.
    #[arg(long)]
    y: String,
    /// pearson or spearman; both when omitted.
    #[arg(long)]
    method: Option<String>,
    /// p-value method: t-approx or permutation.
    #[arg(long, default_value = "t-approx")]
    p_method: String,
    /// Permutation rounds (with --p-method permutation).
    #[arg(long, default_value_t = 10_000)]
    rounds: usize,
    /// Seed for permutation resampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "stats-correlate")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsBinArgs {
    #[arg(long)]
    table: PathBuf,
    /// Column to bin by.
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 4)]
    bins: usize,
    #[arg(long, default_value = "stats-bin")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsWithinGroupArgs {
    /// Symmetric score matrix (.rgm or .csv), rows aligned with the table.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    table: PathBuf,
    /// Column to bin by.
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 4)]
    bins: usize,
    #[arg(long, default_value = "stats-within-group")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsGroupedArgs {
    #[arg(long)]
    table: PathBuf,
    /// Metadata column to group rows by.
    #[arg(long)]
    key: String,
    #[arg(long, default_value = "stats-grouped")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SynthCmd {
    /// Sample a manifold and embed it in a higher-dimensional space.
    Manifold(SynthManifoldArgs),
    /// Linear-teacher targets for an embedding matrix.
    Teacher(SynthTeacherArgs),
    /// Repeated noisy trials with a known noise ceiling.
    Trials(SynthTrialsArgs),
    /// A zoo of model embeddings with planted accuracy structure.
    Zoo(SynthZooArgs),
}

#[derive(Args)]
struct SynthManifoldArgs {
    /// hypercube, sphere, swiss-roll, or gaussian.
    #[arg(long)]
    kind: String,
    /// Intrinsic dimension (must be 2 for swiss-roll).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Ambient dimension after the orthonormal embedding.
    #[arg(long, default_value_t = 50)]
    ambient: usize,
    /// Sample count.
    #[arg(long, default_value_t = 5000)]
    n: usize,
    /// Isotropic Gaussian noise sigma added in ambient space.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "manifold")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthTeacherArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Number of target columns to generate.
    #[arg(long, default_value_t = 100)]
    targets: usize,
    /// Explainable variance fraction in (0, 1] (default 0.8).
    #[arg(long, conflicts_with = "noise_sigma")]
    fraction: Option<f64>,
    /// Fixed noise sigma for every target (alternative to --fraction).
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "teacher")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthTrialsArgs {
    /// Number of images.
    #[arg(long, default_value_t = 500)]
    images: usize,
    /// Relative proportions of 3-, 2- and 1-repeat images: A,B,C.
    #[arg(long, default_value = "1,1,1")]
    weights: String,
    /// Variance of the per-image signal.
    #[arg(long, default_value_t = 1.0)]
    signal: f64,
    /// Variance of the per-trial noise.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "trials")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthZooArgs {
    /// Number of models.
    #[arg(long, default_value_t = 20)]
    models: usize,
    /// Dimension of the shared ground representation.
    #[arg(long, default_value_t = 8)]
    base_dim: usize,
    /// Embedding dimension of every model (must exceed base-dim).
    #[arg(long, default_value_t = 24)]
    ambient: usize,
    /// Rows per embedding.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Maximum per-model noise level; models span 0..=this evenly.
    #[arg(long, default_value_t = 2.0)]
    id_spread: f64,
    /// 1 ties planted accuracy to each model's own noise; 0 shuffles.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "zoo")]
    out: PathBuf,
}

#[derive(Args)]
struct RerunArgs {
    /// A <out>.meta.json file written by a previous run.
    #[arg(long)]
    sidecar: PathBuf,
}

// ---------------------------------------------------------------------------
// Argument resolution
// ---------------------------------------------------------------------------

type Resolved<T> = std::result::Result<T, String>;

fn absolutize(p: PathBuf) -> Resolved<PathBuf> {
    std::path::absolute(&p).map_err(|e| format!("cannot resolve path {p:?}: {e}"))
}

fn parse_f64_list(text: &str, flag: &str) -> Resolved<Vec<f64>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| format!("{flag} entry '{}' is not a number", f.trim()))
        })
        .collect()
}

fn parse_usize_list(text: &str, flag: &str) -> Resolved<Vec<usize>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<usize>()
                .map_err(|_| format!("{flag} entry '{}' is not a count", f.trim()))
        })
        .collect()
}

fn parse_enum<T: std::str::FromStr<Err = repgeom::Error>>(text: &str) -> Resolved<T> {
    text.parse::<T>().map_err(|e| {
        // Strip the library's "Class: " prefix; for argv problems the
        // class is always the usage one.
        let msg = e.to_string();
        msg.split_once(": ").map(|(_, m)| m.to_string()).unwrap_or(msg)
    })
}

fn parse_lambda_select(text: &str) -> Resolved<LambdaSelect> {
    match text {
        "per-target" => Ok(LambdaSelect::PerTarget),
        "shared" => Ok(LambdaSelect::Shared),
        other => Err(format!(
            "unknown lambda selection '{other}' (expected per-target or shared)"
        )),
    }
}

impl AlignFlags {
    fn resolve(self) -> Resolved<AlignParams> {
        let lambda_grid = match &self.lambda_grid {
            Some(text) => parse_f64_list(text, "--lambda-grid")?,
            None => alignment::default_lambda_grid(),
        };
        Ok(AlignParams {
            pcs: self.pcs,
            test_fraction: self.test_frac,
            lambda_grid,
            folds: self.folds,
            lambda_select: parse_lambda_select(&self.lambda_select)?,
            standardize: self.standardize,
            seed: self.seed,
        })
    }
}

impl Command {
    fn resolve(self) -> Resolved<RunSpec> {
        match self {
            Command::Id(IdCmd::Estimate(a)) => {
                let mode = match a.mode.as_str() {
                    "global" => IdModeSpec::Global,
                    "local-knn" => IdModeSpec::LocalKnn { neighborhood: a.neighborhood },
                    "random-subsample" => IdModeSpec::RandomSubsample { subsample: a.subsample },
                    other => {
                        return Err(format!(
                            "unknown mode '{other}' (expected global, local-knn, or random-subsample)"
                        ))
                    }
                };
                Ok(RunSpec::IdEstimate {
                    embeddings: absolutize(a.embeddings)?,
                    estimator: parse_enum::<EstimatorKind>(&a.estimator)?,
                    k: a.k,
                    mode,
                    seed: a.seed,
                    out: absolutize(a.out)?,
                })
            }
            Command::Id(IdCmd::Sweep(a)) => Ok(RunSpec::IdSweep {
                embeddings: absolutize(a.embeddings)?,
                estimator: parse_enum::<EstimatorKind>(&a.estimator)?,
                k_list: parse_usize_list(&a.k_list, "--k-list")?,
                out: absolutize(a.out)?,
            }),
            Command::Id(IdCmd::CorrelationDim(a)) => Ok(RunSpec::CorrelationDim {
                embeddings: absolutize(a.embeddings)?,
                epsilons: parse_f64_list(&a.epsilons, "--epsilons")?,
                seed: a.seed,
                out: absolutize(a.out)?,
            }),
            Command::Align(AlignCmd::Brain(a)) => Ok(RunSpec::AlignBrain {
                embeddings: absolutize(a.embeddings)?,
                responses: absolutize(a.responses)?,
                params: a.flags.resolve()?,
                ceiling: a.ceiling.map(absolutize).transpose()?,
                out: absolutize(a.out)?,
            }),
            Command::Align(AlignCmd::Models(a)) => Ok(RunSpec::AlignModels {
                a: absolutize(a.a)?,
                b: absolutize(a.b)?,
                params: a.flags.resolve()?,
                out: absolutize(a.out)?,
            }),
            Command::Align(AlignCmd::Reference(a)) => Ok(RunSpec::AlignReference {
                manifest: absolutize(a.manifest)?,
                params: a.flags.resolve()?,
                out: absolutize(a.out)?,
            }),
            Command::Ceiling(a) => match (a.trials, a.counts) {
                (Some(trials), None) => {
                    let repeat_counts = a
                        .repeat_counts
                        .ok_or_else(|| "--trials needs --repeat-counts".to_string())?;
                    Ok(RunSpec::CeilingFromTrials {
                        trials: absolutize(trials)?,
                        repeat_counts: absolutize(repeat_counts)?,
                        out: absolutize(a.out)?,
                    })
                }
                (None, Some(counts)) => {
                    let parts = parse_f64_list(&counts, "--counts")?;
                    let [triple, double, single] = parts.as_slice() else {
                        return Err("--counts needs exactly three values: A,B,C".to_string());
                    };
                    let to_count = |v: f64, name: &str| -> Resolved<u64> {
                        if v.fract() == 0.0 && v >= 0.0 && v <= u64::MAX as f64 {
                            Ok(v as u64)
                        } else {
                            Err(format!("--counts {name} value {v} is not a whole number"))
                        }
                    };
                    Ok(RunSpec::CeilingFromCounts {
                        triple: to_count(*triple, "A")?,
                        double: to_count(*double, "B")?,
                        single: to_count(*single, "C")?,
                        s2: a.s2.ok_or_else(|| "--counts needs --s2".to_string())?,
                        out: absolutize(a.out)?,
                    })
                }
                _ => Err("need exactly one of --trials or --counts".to_string()),
            },
            Command::Stats(StatsCmd::Correlate(a)) => {
                let p_method = match a.p_method.as_str() {
                    "t-approx" => PMethodSpec::TApprox,
                    "permutation" => PMethodSpec::Permutation { rounds: a.rounds },
                    other => {
                        return Err(format!(
                            "unknown p-value method '{other}' (expected t-approx or permutation)"
                        ))
                    }
                };
                Ok(RunSpec::StatsCorrelate {
                    table: absolutize(a.table)?,
                    x: a.x,
                    y: a.y,
                    method: a.method.as_deref().map(parse_enum::<CorrMethod>).transpose()?,
                    p_method,
                    seed: a.seed,
                    out: absolutize(a.out)?,
                })
            }
            Command::Stats(StatsCmd::Bin(a)) => Ok(RunSpec::StatsBin {
                table: absolutize(a.table)?,
                x: a.x,
                bins: a.bins,
                out: absolutize(a.out)?,
            }),
            Command::Stats(StatsCmd::WithinGroup(a)) => Ok(RunSpec::StatsWithinGroup {
                scores: absolutize(a.scores)?,
                table: absolutize(a.table)?,
                x: a.x,
                bins: a.bins,
                out: absolutize(a.out)?,
            }),
            Command::Stats(StatsCmd::Grouped(a)) => Ok(RunSpec::StatsGrouped {
                table: absolutize(a.table)?,
                key: a.key,
                out: absolutize(a.out)?,
            }),
            Command::Synth(SynthCmd::Manifold(a)) => Ok(RunSpec::SynthManifold {
                kind: parse_enum::<ManifoldKind>(&a.kind)?,
                dim: a.dim,
                ambient: a.ambient,
                n: a.n,
                noise: a.noise,
                seed: a.seed,
                out: absolutize(a.out)?,
            }),
            Command::Synth(SynthCmd::Teacher(a)) => {
                let (fraction, noise_sigma) = match (a.fraction, a.noise_sigma) {
                    (None, None) => (Some(0.8), None),
                    other => other,
                };
                Ok(RunSpec::SynthTeacher {
                    embeddings: absolutize(a.embeddings)?,
                    targets: a.targets,
                    fraction,
                    noise_sigma,
                    seed: a.seed,
                    out: absolutize(a.out)?,
                })
            }
            Command::Synth(SynthCmd::Trials(a)) => {
                let parts = parse_f64_list(&a.weights, "--weights")?;
                let [w3, w2, w1] = parts.as_slice() else {
                    return Err("--weights needs exactly three values: A,B,C".to_string());
                };
                Ok(RunSpec::SynthTrials {
                    images: a.images,
                    weights: (*w3, *w2, *w1),
                    signal: a.signal,
                    noise: a.noise,
                    seed: a.seed,
                    out: absolutize(a.out)?,
                })
            }
            Command::Synth(SynthCmd::Zoo(a)) => Ok(RunSpec::SynthZoo {
                models: a.models,
                base_dim: a.base_dim,
                ambient: a.ambient,
                samples: a.samples,
                id_spread: a.id_spread,
                coupling: a.coupling,
                seed: a.seed,
                out: absolutize(a.out)?,
            }),
            Command::Rerun(_) => unreachable!("rerun is handled before resolution"),
        }
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn first_line(text: &str) -> &str {
    text.lines().next().unwrap_or("invalid arguments").trim()
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    eprintln!("UsageError: {}", first_line(&e.to_string()));
                    1
                }
            };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("UsageError: --threads must be at least 1");
            return 1;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("UsageError: could not size the thread pool: {e}");
            return 1;
        }
    }
    let spec = match cli.command {
        Command::Rerun(r) => match runspec::read_sidecar(&r.sidecar) {
            Ok(spec) => spec,
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        },
        other => match other.resolve() {
            Ok(spec) => spec,
            Err(msg) => {
                eprintln!("UsageError: {msg}");
                return 1;
            }
        },
    };
    match exec::execute_and_record(&spec) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}

fn main() {
    std::process::exit(run());
}
