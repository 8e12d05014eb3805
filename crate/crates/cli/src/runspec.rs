//! The resolved description of one CLI run, as recorded in metadata
//! sidecars.
//!
//! Every command resolves its arguments — defaults filled in, list flags
//! parsed, paths made absolute — into a [`RunSpec`] before anything
//! executes.  The sidecar written next to the outputs is exactly this
//! value, so `repgeom rerun --sidecar <file>` replays the run from the
//! sidecar alone and reproduces every output bit for bit.

use repgeom::alignment::LambdaSelect;
use repgeom::dimension::EstimatorKind;
use repgeom::error::{Error, Result};
use repgeom::io;
use repgeom::stats::CorrMethod;
use repgeom::synthetic::ManifoldKind;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const TOOL_NAME: &str = "repgeom";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which rows a dimension estimate runs over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum IdModeSpec {
    /// Every row.
    Global,
    /// A seeded anchor row plus its nearest neighbors.
    LocalKnn { neighborhood: usize },
    /// A seeded random subset of rows.
    RandomSubsample { subsample: usize },
}

/// Ridge/PCA parameters shared by the alignment commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignParams {
    pub pcs: usize,
    pub test_fraction: f64,
    pub lambda_grid: Vec<f64>,
    pub folds: usize,
    pub lambda_select: LambdaSelect,
    pub standardize: bool,
    pub seed: u64,
}

/// How correlation p-values are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PMethodSpec {
    TApprox,
    Permutation { rounds: usize },
}

/// One fully-resolved command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunSpec {
    IdEstimate {
        embeddings: PathBuf,
        estimator: EstimatorKind,
        k: usize,
        #[serde(flatten)]
        mode: IdModeSpec,
        seed: u64,
        out: PathBuf,
    },
    IdSweep {
        embeddings: PathBuf,
        estimator: EstimatorKind,
        k_list: Vec<usize>,
        out: PathBuf,
    },
    CorrelationDim {
        embeddings: PathBuf,
        epsilons: Vec<f64>,
        seed: u64,
        out: PathBuf,
    },
    AlignBrain {
        embeddings: PathBuf,
        responses: PathBuf,
        #[serde(flatten)]
        params: AlignParams,
        ceiling: Option<PathBuf>,
        out: PathBuf,
    },
    AlignModels {
        a: PathBuf,
        b: PathBuf,
        #[serde(flatten)]
        params: AlignParams,
        out: PathBuf,
    },
    AlignReference {
        manifest: PathBuf,
        #[serde(flatten)]
        params: AlignParams,
        out: PathBuf,
    },
    CeilingFromTrials {
        trials: PathBuf,
        repeat_counts: PathBuf,
        out: PathBuf,
    },
    CeilingFromCounts {
        triple: u64,
        double: u64,
        single: u64,
        s2: f64,
        out: PathBuf,
    },
    StatsCorrelate {
        table: PathBuf,
        x: String,
        y: String,
        /// `None` reports both Pearson and Spearman.
        method: Option<CorrMethod>,
        p_method: PMethodSpec,
        seed: u64,
        out: PathBuf,
    },
    StatsBin {
        table: PathBuf,
        x: String,
        bins: usize,
        out: PathBuf,
    },
    StatsWithinGroup {
        scores: PathBuf,
        table: PathBuf,
        x: String,
        bins: usize,
        out: PathBuf,
    },
    StatsGrouped {
        table: PathBuf,
        key: String,
        out: PathBuf,
    },
    SynthManifold {
        kind: ManifoldKind,
        dim: usize,
        ambient: usize,
        n: usize,
        noise: f64,
        seed: u64,
        out: PathBuf,
    },
    SynthTeacher {
        embeddings: PathBuf,
        targets: usize,
        /// Exactly one of `fraction` / `noise_sigma` is set.
        fraction: Option<f64>,
        noise_sigma: Option<f64>,
        seed: u64,
        out: PathBuf,
    },
    SynthTrials {
        images: usize,
        weights: (f64, f64, f64),
        signal: f64,
        noise: f64,
        seed: u64,
        out: PathBuf,
    },
    SynthZoo {
        models: usize,
        base_dim: usize,
        ambient: usize,
        samples: usize,
        id_spread: f64,
        coupling: f64,
        seed: u64,
        out: PathBuf,
    },
}

impl RunSpec {
    /// The output prefix this run writes under.
    pub fn out(&self) -> &Path {
        match self {
            RunSpec::IdEstimate { out, .. }
            | RunSpec::IdSweep { out, .. }
            | RunSpec::CorrelationDim { out, .. }
            | RunSpec::AlignBrain { out, .. }
            | RunSpec::AlignModels { out, .. }
            | RunSpec::AlignReference { out, .. }
            | RunSpec::CeilingFromTrials { out, .. }
            | RunSpec::CeilingFromCounts { out, .. }
            | RunSpec::StatsCorrelate { out, .. }
            | RunSpec::StatsBin { out, .. }
            | RunSpec::StatsWithinGroup { out, .. }
            | RunSpec::StatsGrouped { out, .. }
            | RunSpec::SynthManifold { out, .. }
            | RunSpec::SynthTeacher { out, .. }
            | RunSpec::SynthTrials { out, .. }
            | RunSpec::SynthZoo { out, .. } => out,
        }
    }

    /// Path of this run's metadata sidecar.
    pub fn sidecar_path(&self) -> PathBuf {
        PathBuf::from(format!("{}.meta.json", self.out().display()))
    }
}

/// The sidecar file layout: tool identity plus the resolved command.
/// Deliberately excludes anything output-irrelevant (timestamps, host,
/// thread counts), so a sidecar fully determines its outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub command: RunSpec,
}

/// Serialize and atomically write the sidecar for a run.
pub fn write_sidecar(spec: &RunSpec) -> Result<()> {
    let sidecar = Sidecar {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        command: spec.clone(),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::ManifestError(format!("sidecar serialization: {e}")))?;
    text.push('\n');
    io::atomic_write(&spec.sidecar_path(), text.as_bytes())
}

/// Load a sidecar back into a replayable run.
pub fn read_sidecar(path: &Path) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path)?;
    let sidecar: Sidecar = serde_json::from_str(&text)
        .map_err(|e| Error::ManifestError(format!("malformed sidecar {path:?}: {e}")))?;
    if sidecar.tool != TOOL_NAME {
        return Err(Error::ManifestError(format!(
            "sidecar {path:?} was written by '{}', not {TOOL_NAME}",
            sidecar.tool
        )));
    }
    Ok(sidecar.command)
}
