//! Seeded generators with known ground truth.
//!
//! Every validation route in the crate bottoms out here: manifolds of known
//! intrinsic dimension, linear teacher targets with known explainable
//! variance, repeated-trial response sets with known noise ceilings, and
//! model zoos with a planted link between noise level, local dimension, and
//! accuracy.  All generators are pure functions of their spec, including
//! the seed; equal specs produce byte-identical output.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise_ceiling::{effective_noise, TrialCounts};
use crate::seed;
use crate::util::sample_variance;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    /// Uniform in the unit cube `[0,1]^d`.
    Hypercube,
    /// Uniform on the unit sphere surface `S^d` in `R^(d+1)`.
    Sphere,
    /// The classic 2-manifold `(t cos t, h, t sin t)` in `R^3`,
    /// `t` uniform on `[1.5 pi, 4.5 pi]`, `h` uniform on `[0, 21]`.
    SwissRoll,
    /// Standard normal in `R^d`.
    Gaussian,
}

impl std::str::FromStr for ManifoldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypercube" => Ok(ManifoldKind::Hypercube),
            "sphere" => Ok(ManifoldKind::Sphere),
            "swiss-roll" => Ok(ManifoldKind::SwissRoll),
            "gaussian" => Ok(ManifoldKind::Gaussian),
            other => Err(Error::InvalidArgument(format!(
                "unknown manifold '{other}' (expected hypercube, sphere, swiss-roll, or gaussian)"
            ))),
        }
    }
}

/// A manifold sampling request.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    /// Intrinsic dimension of the manifold itself.
    pub intrinsic_dim: usize,
    /// Ambient dimension after the orthonormal embedding; must be at least
    /// the manifold's native coordinate count.
    pub ambient: usize,
    pub n: usize,
    /// Isotropic Gaussian noise added in the ambient space.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ManifoldSpec {
    /// Coordinates the manifold is generated in before embedding.
    pub fn native_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Hypercube | ManifoldKind::Gaussian => self.intrinsic_dim,
            ManifoldKind::Sphere => self.intrinsic_dim + 1,
            ManifoldKind::SwissRoll => 3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.intrinsic_dim == 0 {
            return Err(Error::SpecError("intrinsic dimension must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::SpecError("sample count must be >= 1".into()));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::SpecError(format!(
                "noise sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        if self.kind == ManifoldKind::SwissRoll && self.intrinsic_dim != 2 {
            return Err(Error::SpecError(
                "the swiss roll is a 2-manifold; intrinsic dimension must be 2".into(),
            ));
        }
        if self.ambient < self.native_dim() {
            return Err(Error::SpecError(format!(
                "ambient dimension {} below the manifold's native {}",
                self.ambient,
                self.native_dim()
            )));
        }
        Ok(())
    }
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Orthonormal columns spanning a random `from_dim`-dimensional subspace of
/// `R^to_dim`, drawn by QR-factorizing a Gaussian matrix.  Applying it to
/// points preserves pairwise distances.
pub fn random_orthonormal_map(from_dim: usize, to_dim: usize, r: &mut ChaCha8Rng) -> Matrix {
    assert!(from_dim >= 1 && to_dim >= from_dim, "map cannot reduce dimension");
    let g = DMatrix::from_fn(to_dim, from_dim, |_, _| normal(r));
    let q = g.qr().q();
    Matrix::from_dmatrix(&q)
}

/// Sample `spec.n` points on the requested manifold, embed them into the
/// ambient space by a seeded random orthonormal map (the identity when the
/// ambient equals the native dimension), and add isotropic Gaussian noise.
pub fn sample_manifold(spec: &ManifoldSpec) -> Result<Matrix> {
    spec.validate()?;
    let native = spec.native_dim();
    let mut r = seed::rng(spec.seed, "manifold/sample");
    let mut points = Matrix::zeros(spec.n, native);
    match spec.kind {
        ManifoldKind::Hypercube => {
            for i in 0..spec.n {
                for j in 0..native {
                    points.set(i, j, r.random::<f64>());
                }
            }
        }
        ManifoldKind::Gaussian => {
            for i in 0..spec.n {
                for j in 0..native {
                    points.set(i, j, normal(&mut r));
                }
            }
        }
        ManifoldKind::Sphere => {
            for i in 0..spec.n {
                loop {
                    let g: Vec<f64> = (0..native).map(|_| normal(&mut r)).collect();
                    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        for (j, v) in g.iter().enumerate() {
                            points.set(i, j, v / norm);
                        }
                        break;
                    }
                }
            }
        }
        ManifoldKind::SwissRoll => {
            use std::f64::consts::PI;
            for i in 0..spec.n {
                let t = 1.5 * PI + 3.0 * PI * r.random::<f64>();
                let h = 21.0 * r.random::<f64>();
                points.set(i, 0, t * t.cos());
                points.set(i, 1, h);
                points.set(i, 2, t * t.sin());
            }
        }
    }

    let mut out = if spec.ambient == native {
        points
    } else {
        let mut er = seed::rng(spec.seed, "manifold/embed");
        let q = random_orthonormal_map(native, spec.ambient, &mut er);
        // Row vectors: y = x . Q^T.
        let mut out = Matrix::zeros(spec.n, spec.ambient);
        for i in 0..spec.n {
            let x = points.row(i);
            for a in 0..spec.ambient {
                let mut acc = 0.0;
                for j in 0..native {
                    acc += x[j] * q.get(a, j);
                }
                out.set(i, a, acc);
            }
        }
        out
    };

    if spec.noise_sigma > 0.0 {
        let mut nr = seed::rng(spec.seed, "manifold/noise");
        for i in 0..out.rows() {
            for j in 0..out.cols() {
                let v = out.get(i, j) + spec.noise_sigma * normal(&mut nr);
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

/// Noise specification for [`linear_teacher`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeacherNoise {
    /// One fixed noise standard deviation for every target.
    Sigma(f64),
    /// Per-target noise scaled so the explainable variance fraction
    /// `var(XW) / (var(XW) + sigma^2)` equals this value, in `(0, 1]`.
    ExplainableFraction(f64),
}

/// Targets generated by a random linear map plus Gaussian noise.
#[derive(Debug, Clone)]
pub struct Teacher {
    /// `n x n_targets` response matrix `Y = X W + noise`.
    pub targets: Matrix,
    /// The planted weights, `d x n_targets`.
    pub weights: Matrix,
    /// Analytic explainable variance fraction per target, from the realized
    /// signal variance and the planted noise scale.
    pub explainable_fraction: Vec<f64>,
    /// Planted noise standard deviation per target.
    pub noise_sigma: Vec<f64>,
}

/// Generate linear-teacher targets for the given inputs.
///
/// Weights are Gaussian with scale `1/sqrt(d)` so signal variance is
/// comparable to the input variance.  The reported fraction uses the
/// realized sample variance of `X W`, so in `ExplainableFraction` mode it
/// equals the requested value exactly.
pub fn linear_teacher(
    x: &Matrix,
    n_targets: usize,
    noise: TeacherNoise,
    teacher_seed: u64,
) -> Result<Teacher> {
    if n_targets == 0 {
        return Err(Error::InvalidArgument("need at least 1 target".into()));
    }
    if x.rows() < 2 {
        return Err(Error::TooFewSamples(format!(
            "teacher needs at least 2 rows, got {}",
            x.rows()
        )));
    }
    match noise {
        TeacherNoise::Sigma(s) if !(s >= 0.0) || !s.is_finite() => {
            return Err(Error::InvalidArgument(format!("noise sigma {s} must be >= 0")));
        }
        TeacherNoise::ExplainableFraction(f) if !(f > 0.0 && f <= 1.0) => {
            return Err(Error::InvalidArgument(format!(
                "explainable fraction {f} must lie in (0, 1]"
            )));
        }
        _ => {}
    }

    let d = x.cols();
    let mut wr = seed::rng(teacher_seed, "teacher/weights");
    let scale = 1.0 / (d as f64).sqrt();
    let mut weights = Matrix::zeros(d, n_targets);
    for j in 0..d {
        for t in 0..n_targets {
            weights.set(j, t, scale * normal(&mut wr));
        }
    }

    let mut signal = Matrix::zeros(x.rows(), n_targets);
    for i in 0..x.rows() {
        let row = x.row(i);
        for t in 0..n_targets {
            let mut acc = 0.0;
            for j in 0..d {
                acc += row[j] * weights.get(j, t);
            }
            signal.set(i, t, acc);
        }
    }

    let mut noise_sigma = Vec::with_capacity(n_targets);
    let mut fraction = Vec::with_capacity(n_targets);
    for t in 0..n_targets {
        let v = sample_variance(&signal.column(t));
        let s = match noise {
            TeacherNoise::Sigma(s) => s,
            TeacherNoise::ExplainableFraction(f) => (v * (1.0 - f) / f).sqrt(),
        };
        noise_sigma.push(s);
        let denom = v + s * s;
        fraction.push(if denom > 0.0 { v / denom } else { 1.0 });
    }

    let mut nr = seed::rng(teacher_seed, "teacher/noise");
    let mut targets = signal;
    for i in 0..targets.rows() {
        for t in 0..n_targets {
            let v = targets.get(i, t) + noise_sigma[t] * normal(&mut nr);
            targets.set(i, t, v);
        }
    }
    Ok(Teacher { targets, weights, explainable_fraction: fraction, noise_sigma })
}

/// A repeated-trials generation request.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub n_images: usize,
    /// Relative proportions of images presented three, two, and one times.
    pub proportions: (f64, f64, f64),
    /// Variance of the per-image signal means.
    pub signal_variance: f64,
    /// Variance of the per-trial noise.
    pub noise_variance: f64,
    pub seed: u64,
}

/// Generated repeated trials plus the analytic ceiling they should recover.
#[derive(Debug, Clone)]
pub struct TrialData {
    /// `3 x n_images`; image `i` has valid responses in rows
    /// `0..repeat_counts[i]`, remaining rows are zero padding.
    pub trials: Matrix,
    pub repeat_counts: Vec<usize>,
    pub counts: TrialCounts,
    pub n_eff: f64,
    /// `s2 / (s2 + noise_variance * n_eff)`, the ceiling an ideal estimator
    /// recovers; 0 when the signal variance is 0.
    pub true_ceiling: f64,
}

/// Generate per-image signals and per-trial noisy responses.
///
/// The image counts follow the requested proportions by largest-remainder
/// apportionment (ties to the three-repeat category first), so they always
/// sum to `n_images` exactly.
pub fn repeated_trials(spec: &TrialSpec) -> Result<TrialData> {
    if spec.n_images == 0 {
        return Err(Error::SpecError("need at least 1 image".into()));
    }
    if !(spec.signal_variance >= 0.0) || !(spec.noise_variance >= 0.0) {
        return Err(Error::SpecError(format!(
            "variances must be >= 0, got s2={}, noise={}",
            spec.signal_variance, spec.noise_variance
        )));
    }
    let (pa, pb, pc) = spec.proportions;
    if !(pa >= 0.0 && pb >= 0.0 && pc >= 0.0) || pa + pb + pc <= 0.0 {
        return Err(Error::SpecError(format!(
            "proportions must be >= 0 with a positive sum, got {:?}",
            spec.proportions
        )));
    }

    // Largest-remainder apportionment of n_images into the three classes.
    let total = pa + pb + pc;
    let quotas = [
        spec.n_images as f64 * pa / total,
        spec.n_images as f64 * pb / total,
        spec.n_images as f64 * pc / total,
    ];
    let mut counts = [0usize; 3];
    let mut assigned = 0;
    for (i, q) in quotas.iter().enumerate() {
        counts[i] = q.floor() as usize;
        assigned += counts[i];
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for i in 0..spec.n_images - assigned {
        counts[order[i % 3]] += 1;
    }

    let trial_counts = TrialCounts {
        triple: counts[0] as u64,
        double: counts[1] as u64,
        single: counts[2] as u64,
    };
    let n_eff = effective_noise(&trial_counts)?;

    let mut repeat_counts = Vec::with_capacity(spec.n_images);
    repeat_counts.extend(std::iter::repeat_n(3usize, counts[0]));
    repeat_counts.extend(std::iter::repeat_n(2usize, counts[1]));
    repeat_counts.extend(std::iter::repeat_n(1usize, counts[2]));

    let mut sig_rng = seed::rng(spec.seed, "trials/signal");
    let s_sd = spec.signal_variance.sqrt();
    let means: Vec<f64> = (0..spec.n_images).map(|_| s_sd * normal(&mut sig_rng)).collect();

    let mut noise_rng = seed::rng(spec.seed, "trials/noise");
    let n_sd = spec.noise_variance.sqrt();
    let mut trials = Matrix::zeros(3, spec.n_images);
    for (i, &reps) in repeat_counts.iter().enumerate() {
        for rep in 0..reps {
            trials.set(rep, i, means[i] + n_sd * normal(&mut noise_rng));
        }
    }

    let true_ceiling = if spec.signal_variance == 0.0 {
        0.0
    } else {
        spec.signal_variance / (spec.signal_variance + spec.noise_variance * n_eff)
    };
    Ok(TrialData { trials, repeat_counts, counts: trial_counts, n_eff, true_ceiling })
}

/// A synthetic model-zoo request.
#[derive(Debug, Clone, PartialEq)]
pub struct ZooSpec {
    pub n_models: usize,
    /// Dimension of the shared ground representation.
    pub base_dim: usize,
    /// Embedding dimension of every model; must exceed `base_dim` for the
    /// noise term to have room to raise the measured local dimension.
    pub ambient: usize,
    pub n_samples: usize,
    /// Per-model extra-noise level; drives local dimension up and planted
    /// accuracy down.  Length must equal `n_models`.
    pub id_spread: Vec<f64>,
    /// 1 links accuracy deterministically to the model's own noise level;
    /// 0 links it to a seeded shuffle of the noise levels (null structure).
    pub coupling: f64,
    pub seed: u64,
}

/// One zoo model's planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ZooTruth {
    pub name: String,
    pub noise_level: f64,
    pub accuracy: f64,
}

/// A generated model zoo.
#[derive(Debug, Clone)]
pub struct SynthZoo {
    /// One embedding per model, `n_samples x ambient`, in truth order.
    pub embeddings: Vec<Matrix>,
    pub truth: Vec<ZooTruth>,
}

/// Generate a zoo of model embeddings sharing one ground representation.
///
/// Model `m` sees `G . A_m + sigma_m * noise`: a fixed random linear view
/// of the ground representation plus isotropic ambient noise.  Accuracy is
/// planted as `1 - sigma/max(sigma)`, blended by `coupling` between the
/// model's own noise level and a seeded shuffle of the levels.
pub fn synth_zoo(spec: &ZooSpec) -> Result<SynthZoo> {
    if spec.n_models < 3 {
        return Err(Error::SpecError(format!(
            "zoo needs at least 3 models, got {}",
            spec.n_models
        )));
    }
    if spec.id_spread.len() != spec.n_models {
        return Err(Error::SpecError(format!(
            "{} noise levels for {} models",
            spec.id_spread.len(),
            spec.n_models
        )));
    }
    if !spec.id_spread.iter().all(|s| s.is_finite() && *s >= 0.0) {
        return Err(Error::SpecError("noise levels must be finite and >= 0".into()));
    }
    if !(spec.coupling >= 0.0 && spec.coupling <= 1.0) {
        return Err(Error::SpecError(format!(
            "coupling {} outside [0, 1]",
            spec.coupling
        )));
    }
    if spec.base_dim == 0 || spec.ambient < spec.base_dim {
        return Err(Error::SpecError(format!(
            "need 1 <= base_dim <= ambient, got base_dim={}, ambient={}",
            spec.base_dim, spec.ambient
        )));
    }
    if spec.n_samples < 2 {
        return Err(Error::SpecError("need at least 2 samples".into()));
    }

    let mut gr = seed::rng(spec.seed, "zoo/ground");
    let mut ground = Matrix::zeros(spec.n_samples, spec.base_dim);
    for i in 0..spec.n_samples {
        for j in 0..spec.base_dim {
            ground.set(i, j, normal(&mut gr));
        }
    }

    let sigma_max = spec.id_spread.iter().copied().fold(0.0f64, f64::max);
    let own_acc: Vec<f64> = spec
        .id_spread
        .iter()
        .map(|&s| if sigma_max > 0.0 { 1.0 - s / sigma_max } else { 1.0 })
        .collect();
    let mut perm: Vec<usize> = (0..spec.n_models).collect();
    perm.shuffle(&mut seed::rng(spec.seed, "zoo/shuffle"));

    let map_scale = 1.0 / (spec.base_dim as f64).sqrt();
    let mut embeddings = Vec::with_capacity(spec.n_models);
    let mut truth = Vec::with_capacity(spec.n_models);
    for m in 0..spec.n_models {
        let name = format!("model_{m:03}");
        let sigma = spec.id_spread[m];

        let mut ar = seed::rng(spec.seed, &format!("zoo/map/{name}"));
        let mut view = Matrix::zeros(spec.base_dim, spec.ambient);
        for j in 0..spec.base_dim {
            for a in 0..spec.ambient {
                view.set(j, a, map_scale * normal(&mut ar));
            }
        }

        let mut e = Matrix::zeros(spec.n_samples, spec.ambient);
        for i in 0..spec.n_samples {
            let g = ground.row(i);
            for a in 0..spec.ambient {
                let mut acc = 0.0;
                for j in 0..spec.base_dim {
                    acc += g[j] * view.get(j, a);
                }
                e.set(i, a, acc);
            }
        }
        if sigma > 0.0 {
            let mut nr = seed::rng(spec.seed, &format!("zoo/noise/{name}"));
            for i in 0..spec.n_samples {
                for a in 0..spec.ambient {
                    e.set(i, a, e.get(i, a) + sigma * normal(&mut nr));
                }
            }
        }

        let accuracy = spec.coupling * own_acc[m] + (1.0 - spec.coupling) * own_acc[perm[m]];
        embeddings.push(e);
        truth.push(ZooTruth { name, noise_level: sigma, accuracy });
    }
    Ok(SynthZoo { embeddings, truth })
}

/// Evenly spaced noise levels from 0 to `max`, one per model — the usual
/// way to fill [`ZooSpec::id_spread`].
pub fn linspace_levels(n_models: usize, max: f64) -> Vec<f64> {
    if n_models == 1 {
        return vec![max];
    }
    (0..n_models)
        .map(|i| max * i as f64 / (n_models - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::{id_dataset, EstimatorKind};
    use crate::neighbors::euclidean;

    #[test]
    fn unit_interval_without_embedding_stays_in_bounds() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::Hypercube,
            intrinsic_dim: 1,
            ambient: 1,
            n: 500,
            noise_sigma: 0.0,
            seed: 1,
        };
        let z = sample_manifold(&spec).unwrap();
        assert!(z.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn sphere_rows_have_unit_norm() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::Sphere,
            intrinsic_dim: 2,
            ambient: 3,
            n: 300,
            noise_sigma: 0.0,
            seed: 2,
        };
        let z = sample_manifold(&spec).unwrap();
        for i in 0..z.rows() {
            let norm = z.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_pairwise_distances() {
        let flat = ManifoldSpec {
            kind: ManifoldKind::Hypercube,
            intrinsic_dim: 3,
            ambient: 3,
            n: 60,
            noise_sigma: 0.0,
            seed: 5,
        };
        let lifted = ManifoldSpec { ambient: 12, ..flat.clone() };
        let a = sample_manifold(&flat).unwrap();
        let b = sample_manifold(&lifted).unwrap();
        for i in 0..10 {
            for j in (i + 1)..10 {
                let da = euclidean(a.row(i), a.row(j));
                let db = euclidean(b.row(i), b.row(j));
                assert!((da - db).abs() < 1e-10, "pair ({i},{j}): {da} vs {db}");
            }
        }
    }

    #[test]
    fn swiss_roll_demands_two_dimensions() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::SwissRoll,
            intrinsic_dim: 3,
            ambient: 5,
            n: 10,
            noise_sigma: 0.0,
            seed: 0,
        };
        assert!(matches!(sample_manifold(&spec), Err(Error::SpecError(_))));
    }

    #[test]
    fn ambient_below_native_is_rejected() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::Sphere,
            intrinsic_dim: 4, // native 5
            ambient: 4,
            n: 10,
            noise_sigma: 0.0,
            seed: 0,
        };
        assert!(matches!(sample_manifold(&spec), Err(Error::SpecError(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::Gaussian,
            intrinsic_dim: 4,
            ambient: 9,
            n: 50,
            noise_sigma: 0.3,
            seed: 77,
        };
        let a = sample_manifold(&spec).unwrap();
        let b = sample_manifold(&spec).unwrap();
        let ab: Vec<u64> = a.data().iter().map(|v| v.to_bits()).collect();
        let bb: Vec<u64> = b.data().iter().map(|v| v.to_bits()).collect();
        assert_eq!(ab, bb);
    }

    #[test]
    fn planted_cube_recovers_its_dimension() {
        let spec = ManifoldSpec {
            kind: ManifoldKind::Hypercube,
            intrinsic_dim: 2,
            ambient: 10,
            n: 1200,
            noise_sigma: 0.0,
            seed: 4,
        };
        let z = sample_manifold(&spec).unwrap();
        let est = id_dataset(&z, 15, EstimatorKind::Mle).unwrap();
        assert!(est.value > 1.7 && est.value < 2.3, "{}", est.value);
    }

    // --- linear teacher --------------------------------------------------

    fn cube(n: usize, d: usize, seed_v: u64) -> Matrix {
        sample_manifold(&ManifoldSpec {
            kind: ManifoldKind::Hypercube,
            intrinsic_dim: d,
            ambient: d,
            n,
            noise_sigma: 0.0,
            seed: seed_v,
        })
        .unwrap()
    }

    #[test]
    fn noiseless_teacher_reports_full_fraction() {
        let x = cube(100, 5, 8);
        let t = linear_teacher(&x, 7, TeacherNoise::Sigma(0.0), 3).unwrap();
        assert!(t.explainable_fraction.iter().all(|&f| f == 1.0));
        assert!(t.noise_sigma.iter().all(|&s| s == 0.0));
        // Targets are exactly X.W.
        for i in 0..5 {
            let row = x.row(i);
            for tcol in 0..7 {
                let want: f64 = (0..5).map(|j| row[j] * t.weights.get(j, tcol)).sum();
                assert_eq!(t.targets.get(i, tcol), want);
            }
        }
    }

    #[test]
    fn fraction_mode_reports_the_request_exactly_and_realizes_it_closely() {
        let x = cube(1500, 20, 12);
        let t = linear_teacher(&x, 12, TeacherNoise::ExplainableFraction(0.8), 5).unwrap();
        for &f in &t.explainable_fraction {
            assert_eq!(f, 0.8);
        }
        // Empirical check: realized var(signal)/var(target) near 0.8.
        for tcol in 0..12 {
            let signal: Vec<f64> = (0..x.rows())
                .map(|i| {
                    (0..x.cols())
                        .map(|j| x.get(i, j) * t.weights.get(j, tcol))
                        .sum()
                })
                .collect();
            let vs = sample_variance(&signal);
            let vt = sample_variance(&t.targets.column(tcol));
            let realized = vs / vt;
            assert!(
                realized > 0.74 && realized < 0.87,
                "target {tcol}: realized fraction {realized}"
            );
        }
    }

    #[test]
    fn teacher_is_deterministic() {
        let x = cube(50, 4, 1);
        let a = linear_teacher(&x, 3, TeacherNoise::Sigma(0.5), 11).unwrap();
        let b = linear_teacher(&x, 3, TeacherNoise::Sigma(0.5), 11).unwrap();
        assert_eq!(a.targets, b.targets);
        assert_eq!(a.weights, b.weights);
    }

    // --- repeated trials -------------------------------------------------

    #[test]
    fn apportionment_is_exact_with_ties_to_earlier_classes() {
        let spec = TrialSpec {
            n_images: 500,
            proportions: (1.0, 1.0, 1.0),
            signal_variance: 1.0,
            noise_variance: 1.0,
            seed: 0,
        };
        let t = repeated_trials(&spec).unwrap();
        assert_eq!(
            (t.counts.triple, t.counts.double, t.counts.single),
            (167, 167, 166)
        );
        assert_eq!(t.repeat_counts.len(), 500);
    }

    #[test]
    fn zero_noise_makes_repeats_identical_and_ceiling_one() {
        let spec = TrialSpec {
            n_images: 40,
            proportions: (1.0, 1.0, 1.0),
            signal_variance: 2.0,
            noise_variance: 0.0,
            seed: 9,
        };
        let t = repeated_trials(&spec).unwrap();
        assert_eq!(t.true_ceiling, 1.0);
        for (i, &reps) in t.repeat_counts.iter().enumerate() {
            for rep in 1..reps {
                assert_eq!(t.trials.get(rep, i), t.trials.get(0, i));
            }
        }
    }

    #[test]
    fn zero_signal_means_zero_ceiling() {
        let spec = TrialSpec {
            n_images: 20,
            proportions: (1.0, 0.0, 0.0),
            signal_variance: 0.0,
            noise_variance: 1.0,
            seed: 2,
        };
        assert_eq!(repeated_trials(&spec).unwrap().true_ceiling, 0.0);
    }

    #[test]
    fn all_triple_unit_case_matches_hand_formula() {
        // s2 = 1, noise 1, all triple: ceiling = 1 / (1 + 1/3) = 0.75.
        let spec = TrialSpec {
            n_images: 60,
            proportions: (1.0, 0.0, 0.0),
            signal_variance: 1.0,
            noise_variance: 1.0,
            seed: 3,
        };
        let t = repeated_trials(&spec).unwrap();
        assert_eq!(t.n_eff, 1.0 / 3.0);
        assert!((t.true_ceiling - 0.75).abs() < 1e-12);
    }

    // --- model zoo -------------------------------------------------------

    fn small_zoo(coupling: f64) -> ZooSpec {
        ZooSpec {
            n_models: 6,
            base_dim: 4,
            ambient: 16,
            n_samples: 300,
            id_spread: linspace_levels(6, 2.0),
            coupling,
            seed: 21,
        }
    }

    #[test]
    fn zoo_shapes_names_and_determinism() {
        let a = synth_zoo(&small_zoo(1.0)).unwrap();
        let b = synth_zoo(&small_zoo(1.0)).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.truth[0].name, "model_000");
        assert_eq!(a.truth[5].name, "model_005");
        for (ea, eb) in a.embeddings.iter().zip(&b.embeddings) {
            assert_eq!(ea, eb);
            assert_eq!(ea.rows(), 300);
            assert_eq!(ea.cols(), 16);
        }
    }

    #[test]
    fn full_coupling_orders_accuracy_against_noise() {
        let zoo = synth_zoo(&small_zoo(1.0)).unwrap();
        for w in zoo.truth.windows(2) {
            assert!(w[0].noise_level < w[1].noise_level);
            assert!(w[0].accuracy > w[1].accuracy);
        }
        assert_eq!(zoo.truth[0].accuracy, 1.0);
        assert_eq!(zoo.truth[5].accuracy, 0.0);
    }

    #[test]
    fn zero_coupling_shuffles_the_accuracy_link() {
        let zoo = synth_zoo(&small_zoo(0.0)).unwrap();
        // Accuracies are a permutation of the deterministic ones, but not
        // in noise order for this seed.
        let mut acc: Vec<f64> = zoo.truth.iter().map(|t| t.accuracy).collect();
        acc.sort_by(f64::total_cmp);
        let expected: Vec<f64> = (0..6).map(|i| i as f64 / 5.0).collect();
        for (a, e) in acc.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12);
        }
        let in_order = zoo
            .truth
            .windows(2)
            .all(|w| w[0].accuracy >= w[1].accuracy);
        assert!(!in_order, "shuffle left accuracies in noise order");
    }

    #[test]
    fn noise_raises_measured_dimension() {
        let zoo = synth_zoo(&ZooSpec {
            n_models: 3,
            base_dim: 3,
            ambient: 12,
            n_samples: 800,
            id_spread: vec![0.0, 0.4, 1.2],
            coupling: 1.0,
            seed: 31,
        })
        .unwrap();
        let ids: Vec<f64> = zoo
            .embeddings
            .iter()
            .map(|e| id_dataset(e, 15, EstimatorKind::Mle).unwrap().value)
            .collect();
        assert!(ids[0] < ids[1] && ids[1] < ids[2], "{ids:?}");
    }

    #[test]
    fn spec_validation_catches_bad_inputs() {
        assert!(matches!(
            synth_zoo(&ZooSpec { n_models: 2, ..small_zoo(1.0) }),
            Err(Error::SpecError(_))
        ));
        assert!(matches!(
            synth_zoo(&ZooSpec { coupling: 1.5, ..small_zoo(1.0) }),
            Err(Error::SpecError(_))
        ));
        assert!(matches!(
            synth_zoo(&ZooSpec { id_spread: vec![0.1; 4], ..small_zoo(1.0) }),
            Err(Error::SpecError(_))
        ));
    }
}
