//! Acceptance suite: one test per release criterion, each ending in a
//! single PASS/FAIL line (run with `--nocapture` to see them; the
//! harness's own per-test line carries the same verdict).
//!
//! Criteria 1–10 exercise the library directly; criterion 11 drives the
//! built binary.  The hypercube survey shared by criteria 1 and 3 is
//! computed once.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::LazyLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use repgeom::alignment::{
    align_models, reference_alignment, run_encoding, AlignmentConfig, ZooModel,
};
use repgeom::dimension::{
    correlation_dimension, id_dataset, id_from_table, local_id, EstimatorKind,
};
use repgeom::linalg::{r2_score, ridge_fit};
use repgeom::neighbors::{knn_all, knn_all_with, SearchBackend};
use repgeom::noise_ceiling::{ceiling, effective_noise, estimate_signal_variance, TrialCounts};
use repgeom::seed;
use repgeom::stats::{self, GroupAssignment};
use repgeom::synthetic::{
    linear_teacher, linspace_levels, random_orthonormal_map, repeated_trials, sample_manifold,
    synth_zoo, ManifoldKind, ManifoldSpec, TeacherNoise, TrialSpec, ZooSpec,
};
use repgeom::Matrix;

/// Print the per-criterion verdict line, then enforce it.
fn verdict(number: u32, name: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {number:02} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

fn manifold(kind: ManifoldKind, d: usize, ambient: usize, n: usize, seed: u64) -> Matrix {
    sample_manifold(&ManifoldSpec {
        kind,
        intrinsic_dim: d,
        ambient,
        n,
        noise_sigma: 0.0,
        seed,
    })
    .unwrap()
}

fn hypercube(d: usize, n: usize, ambient: usize, seed: u64) -> Matrix {
    manifold(ManifoldKind::Hypercube, d, ambient, n, seed)
}

/// `a * m` for an `n x d` cloud and a `d x d` map.
fn apply_map(a: &Matrix, m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), m.cols());
    for i in 0..a.rows() {
        for j in 0..m.cols() {
            let mut acc = 0.0;
            for l in 0..a.cols() {
                acc += a.get(i, l) * m.get(l, j);
            }
            out.set(i, j, acc);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Shared hypercube survey (criteria 1 and 3)
// ---------------------------------------------------------------------------

struct HypercubeSurvey {
    dims: [usize; 4],
    /// `estimates[name][i]` is that estimator's value on the `dims[i]` cube.
    estimates: BTreeMap<&'static str, [f64; 4]>,
    elapsed: Duration,
}

static SURVEY: LazyLock<HypercubeSurvey> = LazyLock::new(|| {
    let t0 = Instant::now();
    let dims = [1usize, 2, 5, 8];
    let mut estimates: BTreeMap<&'static str, [f64; 4]> =
        EstimatorKind::ALL.iter().map(|e| (e.name(), [0.0; 4])).collect();
    for (i, &d) in dims.iter().enumerate() {
        let z = hypercube(d, 5000, 50, 100 + d as u64);
        let table = knn_all(&z, None, 20).unwrap();
        for est in EstimatorKind::ALL {
            estimates.get_mut(est.name()).unwrap()[i] =
                id_from_table(&table, est).unwrap().value;
        }
    }
    HypercubeSurvey { dims, estimates, elapsed: t0.elapsed() }
});

#[test]
fn c01_hypercube_dimension_recovery() {
    let s = &*SURVEY;
    let mut ok = s.elapsed < Duration::from_secs(60);
    let mut parts = vec![format!("{:.1?}", s.elapsed)];
    for (i, &d) in s.dims.iter().enumerate() {
        let tol = if d <= 5 { 0.15 } else { 0.25 };
        let est = s.estimates["mle"][i];
        ok &= (est - d as f64).abs() / d as f64 <= tol;
        parts.push(format!("mle d={d}: {est:.2}"));
    }
    // MOM and MADA only carry a bound up to d = 5 (survey indices 0..3).
    for name in ["mom", "mada"] {
        for (i, &d) in s.dims.iter().enumerate().take(3) {
            let est = s.estimates[name][i];
            ok &= (est - d as f64).abs() / d as f64 <= 0.30;
            parts.push(format!("{name} d={d}: {est:.2}"));
        }
    }
    verdict(1, "hypercube dimension recovery", ok, &parts.join(", "));
}

#[test]
fn c02_swiss_roll_local_dimension() {
    let mut hits = 0;
    let mut values = Vec::new();
    for s in 0..10u64 {
        let z = manifold(ManifoldKind::SwissRoll, 2, 20, 4000, 200 + s);
        let est = local_id(&z, s, 1000, 20, EstimatorKind::Mle).unwrap();
        if (1.6..=2.5).contains(&est.value) {
            hits += 1;
        }
        values.push(format!("{:.2}", est.value));
    }
    verdict(
        2,
        "swiss-roll local dimension",
        hits >= 8,
        &format!("{hits}/10 seeds in [1.6, 2.5]: {}", values.join(" ")),
    );
}

#[test]
fn c03_estimators_agree_and_rank_identically() {
    let s = &*SURVEY;
    let names = ["mle", "mom", "mada"];
    let mut ok = true;
    let mut parts = Vec::new();
    // Pairwise agreement on the d=2 and d=5 cubes (survey indices 1, 2).
    for &i in &[1usize, 2] {
        for a in 0..names.len() {
            for b in a + 1..names.len() {
                let (va, vb) = (s.estimates[names[a]][i], s.estimates[names[b]][i]);
                let rel = (va - vb).abs() / va.min(vb);
                ok &= rel <= 0.35;
                parts.push(format!("d={} {}|{}: {:.0}%", s.dims[i], names[a], names[b], 100.0 * rel));
            }
        }
    }
    // All three estimators must order the four cubes the same way.
    let rank = |v: &[f64; 4]| {
        let mut idx = [0usize, 1, 2, 3];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        idx
    };
    let reference = rank(&s.estimates["mle"]);
    let ranks_match = names.iter().all(|n| rank(&s.estimates[n]) == reference);
    ok &= ranks_match;
    parts.push(format!("ranks identical: {ranks_match}"));
    verdict(3, "estimator agreement", ok, &parts.join(", "));
}

#[test]
fn c04_correlation_dimension_on_known_shapes() {
    let segment = hypercube(1, 2000, 5, 11);
    let seg = correlation_dimension(&segment, &[0.01, 0.0178, 0.0316, 0.0562, 0.1], 0).unwrap();
    let square = hypercube(2, 2000, 5, 12);
    let sq = correlation_dimension(&square, &[0.02, 0.0356, 0.0632, 0.1124, 0.2], 0).unwrap();
    let ok = (0.85..=1.15).contains(&seg.slope) && (1.7..=2.3).contains(&sq.slope);
    verdict(
        4,
        "correlation dimension",
        ok,
        &format!("segment slope {:.3}, square slope {:.3}", seg.slope, sq.slope),
    );
}

#[test]
fn c05_encoding_pipeline_closure() {
    let x = manifold(ManifoldKind::Gaussian, 300, 300, 2000, 505);
    let cfg = AlignmentConfig { n_components: 300, seed: 77, ..AlignmentConfig::default() };

    let noisy = linear_teacher(&x, 100, TeacherNoise::ExplainableFraction(0.8), 506).unwrap();
    let (_, noisy_fit) = run_encoding(&x, &noisy.targets, &cfg).unwrap();

    let clean = linear_teacher(&x, 100, TeacherNoise::Sigma(0.0), 502).unwrap();
    let (_, clean_fit) = run_encoding(&x, &clean.targets, &cfg).unwrap();

    // Breaking the row pairing destroys everything learnable.
    let mut perm: Vec<usize> = (0..x.rows()).collect();
    perm.shuffle(&mut seed::rng(503, "acceptance/target-shuffle"));
    let (_, null_fit) = run_encoding(&x, &noisy.targets.select_rows(&perm), &cfg).unwrap();

    let ok = (0.75..=0.85).contains(&noisy_fit.summary.median)
        && clean_fit.summary.median >= 0.99
        && null_fit.summary.median.abs() <= 0.05;
    verdict(
        5,
        "encoding pipeline closure",
        ok,
        &format!(
            "median held-out R²: 0.8-teacher {:.3}, noiseless {:.4}, shuffled {:+.4}",
            noisy_fit.summary.median, clean_fit.summary.median, null_fit.summary.median
        ),
    );
}

#[test]
fn c06_noise_ceiling_closure() {
    let data = repeated_trials(&TrialSpec {
        n_images: 500,
        proportions: (1.0, 1.0, 1.0),
        signal_variance: 1.0,
        noise_variance: 1.0,
        seed: 2,
    })
    .unwrap();
    let s2 = estimate_signal_variance(&data.trials, &data.repeat_counts).unwrap();
    let counts = TrialCounts::from_repeats(&data.repeat_counts).unwrap();
    let n_eff = effective_noise(&counts).unwrap();
    let nc = ceiling(s2, n_eff).unwrap();
    // Equal thirds of 3/2/1 repeats average the noise to 11/18 of a trial's.
    let analytic = 1.0 / (1.0 + 11.0 / 18.0);
    let recovered = (nc - analytic).abs() <= 0.05;

    let all_triple = effective_noise(&TrialCounts { triple: 7, double: 0, single: 0 }).unwrap();
    let all_single = effective_noise(&TrialCounts { triple: 0, double: 0, single: 9 }).unwrap();
    let limits_exact = all_triple == 1.0 / 3.0 && all_single == 1.0;

    verdict(
        6,
        "noise-ceiling closure",
        recovered && limits_exact,
        &format!(
            "recovered {nc:.4} vs analytic {analytic:.4}; limits {all_triple:.4} / {all_single:.1}"
        ),
    );
}

#[test]
fn c07_alignment_identities() {
    let cfg = AlignmentConfig { n_components: 40, seed: 7, ..AlignmentConfig::default() };
    let a = manifold(ManifoldKind::Gaussian, 50, 50, 1000, 700);
    let self_score = align_models(&a, &a, &cfg).unwrap().score;

    let q = random_orthonormal_map(50, 50, &mut seed::rng(701, "acceptance/rotation"));
    let b = apply_map(&a, &q);
    let ab = align_models(&a, &b, &cfg).unwrap();
    let ba = align_models(&b, &a, &cfg).unwrap();
    let symmetric = ab.score.to_bits() == ba.score.to_bits();

    let g1 = manifold(ManifoldKind::Gaussian, 50, 50, 2000, 702);
    let g2 = manifold(ManifoldKind::Gaussian, 50, 50, 2000, 703);
    let null_score = align_models(&g1, &g2, &cfg).unwrap().score;

    let ok = self_score >= 0.999 && ab.score >= 0.99 && null_score.abs() <= 0.05 && symmetric;
    verdict(
        7,
        "alignment identities",
        ok,
        &format!(
            "self {self_score:.4}, rotated {:.4}, independent {null_score:+.4}, symmetric {symmetric}",
            ab.score
        ),
    );
}

#[test]
fn c08_knn_backends_bit_identical() {
    let mut failures = 0;
    for case in 0..1000usize {
        let mut r = seed::rng(88, &format!("acceptance/knn/{case}"));
        let n: usize = r.random_range(20..=300);
        let d: usize = r.random_range(1..=16);
        let k: usize = r.random_range(1..=(n - 1).min(20));
        // Every third instance quantizes to a tiny grid: duplicate rows and
        // massed distance ties are exactly where tie-breaking can diverge.
        let quantized = case % 3 == 0;
        let mut z = Matrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                let v = if quantized {
                    r.random_range(0..4) as f64
                } else {
                    r.random_range(-1.0..1.0)
                };
                z.set(i, j, v);
            }
        }
        let brute = knn_all_with(&z, None, k, SearchBackend::BruteForce).unwrap();
        let kd = knn_all_with(&z, None, k, SearchBackend::KdTree).unwrap();
        let same = brute.lists.iter().zip(&kd.lists).all(|(x, y)| {
            x.indices == y.indices
                && x.distances.len() == y.distances.len()
                && x.distances.iter().zip(&y.distances).all(|(p, q)| p.to_bits() == q.to_bits())
        });
        if !same {
            failures += 1;
        }
    }
    verdict(8, "k-NN backend exactness", failures == 0, &format!("{failures}/1000 mismatches"));
}

#[test]
fn c09_planted_zoo_end_to_end() {
    let t0 = Instant::now();
    let spec = ZooSpec {
        n_models: 20,
        base_dim: 8,
        ambient: 24,
        n_samples: 2000,
        id_spread: linspace_levels(20, 2.0),
        coupling: 1.0,
        seed: 900,
    };
    let zoo = synth_zoo(&spec).unwrap();

    let mut ids = BTreeMap::new();
    for (m, truth) in zoo.truth.iter().enumerate() {
        let est = local_id(&zoo.embeddings[m], 900 + m as u64, 1000, 20, EstimatorKind::Mle)
            .unwrap();
        ids.insert(truth.name.clone(), est.value);
    }

    let models: Vec<ZooModel> = zoo
        .truth
        .iter()
        .zip(&zoo.embeddings)
        .map(|(t, e)| ZooModel { name: t.name.clone(), accuracy: t.accuracy, embedding: e.clone() })
        .collect();
    let cfg = AlignmentConfig { n_components: 24, seed: 9, ..AlignmentConfig::default() };
    let table = reference_alignment(&models, &cfg).unwrap();

    let scored_ids: Vec<f64> = table.scores.iter().map(|s| ids[&s.model]).collect();
    let scores: Vec<f64> = table.scores.iter().map(|s| s.score).collect();
    let corr = stats::pearson(&scored_ids, &scores).unwrap();

    let bins = stats::bin_by(&scored_ids, 4).unwrap();
    let mut bin_means = Vec::new();
    for b in 0..bins.n_bins {
        let members = bins.members(b);
        bin_means.push(members.iter().map(|&i| scores[i]).sum::<f64>() / members.len() as f64);
    }
    let monotone = bin_means.windows(2).all(|w| w[1] < w[0]);
    let elapsed = t0.elapsed();

    let ok = corr.r < 0.0 && corr.p < 0.01 && monotone && elapsed < Duration::from_secs(300);
    let means: Vec<String> = bin_means.iter().map(|m| format!("{m:.3}")).collect();
    verdict(
        9,
        "planted zoo end to end",
        ok,
        &format!(
            "r = {:+.3}, p = {:.1e}, bin means [{}], {:.1?}",
            corr.r,
            corr.p,
            means.join(" "),
            elapsed
        ),
    );
}

#[test]
fn c10_invariance_suites() {
    const CASES: usize = 1000;
    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();

    // Dimension estimates survive scaling, rotation, and translation.
    let mut bad = 0;
    for case in 0..CASES {
        let mut r = seed::rng(10, &format!("acceptance/invariance/estimator/{case}"));
        let n: usize = r.random_range(24..=60);
        let d: usize = r.random_range(2..=6);
        let k: usize = r.random_range(3..=8);
        let est = EstimatorKind::ALL[case % 3];
        let mut x = Matrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                x.set(i, j, r.random_range(-1.0..1.0));
            }
        }
        let scale = r.random_range(-2.0..2.0f64).exp();
        let q = random_orthonormal_map(d, d, &mut r);
        let shift: Vec<f64> = (0..d).map(|_| r.random_range(-10.0..10.0)).collect();
        let mut y = apply_map(&x, &q);
        for i in 0..n {
            for j in 0..d {
                y.set(i, j, scale * y.get(i, j) + shift[j]);
            }
        }
        let e1 = id_dataset(&x, k, est).unwrap().value;
        let e2 = id_dataset(&y, k, est).unwrap().value;
        if (e1 - e2).abs() > 1e-9 * e1.abs().max(1.0) {
            bad += 1;
        }
    }
    failures.insert("estimator rigid motion", bad);

    // R² is unchanged when observed and predicted shift together.
    let mut bad = 0;
    for case in 0..CASES {
        let mut r = seed::rng(10, &format!("acceptance/invariance/r2/{case}"));
        let n: usize = r.random_range(5..=40);
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = y.iter().map(|v| v + r.random_range(-0.5..0.5)).collect();
        let c: f64 = r.random_range(-100.0..100.0);
        let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
        let ps: Vec<f64> = p.iter().map(|v| v + c).collect();
        if (r2_score(&y, &p).unwrap() - r2_score(&ys, &ps).unwrap()).abs() > 1e-9 {
            bad += 1;
        }
    }
    failures.insert("r2 translation", bad);

    // Heavier ridge penalties never grow the weight norm.
    let mut bad = 0;
    for case in 0..CASES {
        let mut r = seed::rng(10, &format!("acceptance/invariance/ridge/{case}"));
        let n: usize = r.random_range(20..=50);
        let d: usize = r.random_range(2..=8);
        let mut x = Matrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                x.set(i, j, r.random_range(-1.0..1.0));
            }
        }
        let mut y = Matrix::zeros(n, 1);
        for i in 0..n {
            y.set(i, 0, r.random_range(-1.0..1.0));
        }
        let mut lambdas: Vec<f64> = (0..4).map(|_| r.random_range(-6.9..6.9f64).exp()).collect();
        lambdas.sort_by(f64::total_cmp);
        let norms: Vec<f64> = lambdas
            .iter()
            .map(|&l| {
                let w = ridge_fit(&x, &y, l).unwrap().weights;
                (0..w.rows()).map(|j| w.get(j, 0).powi(2)).sum::<f64>().sqrt()
            })
            .collect();
        if norms.windows(2).any(|w| w[1] > w[0] + 1e-10) {
            bad += 1;
        }
    }
    failures.insert("ridge shrinkage", bad);

    // Pearson r survives per-variable affine maps with matched sign.
    let mut bad = 0;
    for case in 0..CASES {
        let mut r = seed::rng(10, &format!("acceptance/invariance/pearson/{case}"));
        let n: usize = r.random_range(3..=40);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let flip = if r.random::<bool>() { -1.0 } else { 1.0 };
        let a = flip * r.random_range(-3.0..3.0f64).exp();
        let c = flip * r.random_range(-3.0..3.0f64).exp();
        let b: f64 = r.random_range(-50.0..50.0);
        let off: f64 = r.random_range(-50.0..50.0);
        let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let yt: Vec<f64> = y.iter().map(|v| c * v + off).collect();
        let r1 = stats::pearson(&x, &y).unwrap().r;
        let r2 = stats::pearson(&xt, &yt).unwrap().r;
        if (r1 - r2).abs() > 1e-10 {
            bad += 1;
        }
    }
    failures.insert("pearson affine", bad);

    // Within-group pair collection never looks at the diagonal.
    let mut bad = 0;
    for case in 0..CASES {
        let mut r = seed::rng(10, &format!("acceptance/invariance/diagonal/{case}"));
        let n: usize = r.random_range(4..=30);
        let n_bins: usize = r.random_range(1..=4.min(n));
        let mut labels: Vec<usize> = (0..n).map(|i| i % n_bins).collect();
        labels.shuffle(&mut r);
        let groups = GroupAssignment { labels, boundaries: vec![], n_bins };
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = r.random_range(-1.0..1.0);
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        let base = within(&s, &groups);
        let mut poisoned = s.clone();
        for i in 0..n {
            let v = match i % 3 {
                0 => f64::NAN,
                1 => f64::INFINITY,
                _ => r.random_range(-100.0..100.0),
            };
            poisoned.set(i, i, v);
        }
        if within(&poisoned, &groups) != base {
            bad += 1;
        }
    }
    failures.insert("diagonal blindness", bad);

    let total: usize = failures.values().sum();
    let detail: Vec<String> = failures.iter().map(|(k, v)| format!("{k} {v}")).collect();
    verdict(
        10,
        "invariance suites",
        total == 0,
        &format!("failures per 1000 cases: {}", detail.join(", ")),
    );
}

/// Bit-level fingerprint of a within-group result.
fn within(s: &Matrix, groups: &GroupAssignment) -> Vec<(usize, Vec<u64>, Option<u64>)> {
    stats::within_group_alignment(s, groups)
        .unwrap()
        .into_iter()
        .map(|g| {
            let bits = g.pair_values.iter().map(|v| v.to_bits()).collect();
            (g.group, bits, g.mean.map(f64::to_bits))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Criterion 11: binary-level replay
// ---------------------------------------------------------------------------

fn run_cli(dir: &Path, threads: &str, args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_repgeom"))
        .current_dir(dir)
        .args(["--threads", threads])
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().into_string().unwrap();
        files.insert(name, std::fs::read(entry.path()).unwrap());
    }
    files
}

#[test]
fn c11_sidecar_replay_thread_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("tab.csv"),
        "x,y\n0,0.1\n1,1.2\n2,1.8\n3,3.3\n4,4.1\n5,4.6\n6,6.4\n7,6.8\n8,8.5\n9,8.7\n10,10.2\n11,11.3\n",
    )
    .unwrap();

    // One run per command family that draws random numbers or fans out
    // across threads.
    let runs: &[&[&str]] = &[
        &[
            "synth", "manifold", "--kind", "swiss-roll", "--ambient", "12", "--n", "600",
            "--seed", "13", "--out", "sw",
        ],
        &[
            "id", "estimate", "--embeddings", "sw.rgm", "--mode", "local-knn",
            "--neighborhood", "200", "--k", "15", "--seed", "3", "--out", "sw-local",
        ],
        &[
            "stats", "correlate", "--table", "tab.csv", "--x", "x", "--y", "y", "--p-method",
            "permutation", "--rounds", "400", "--seed", "9", "--out", "corr",
        ],
        &["ceiling", "--counts", "10,20,30", "--s2", "0.5", "--out", "cc"],
    ];
    for args in runs {
        let out = run_cli(d, "1", args);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let reference = dir_snapshot(d);
    let sidecars = ["sw.meta.json", "sw-local.meta.json", "corr.meta.json", "cc.meta.json"];

    let mut pass = true;
    for threads in ["2", "4"] {
        // Wipe everything but the input table and the sidecars, then replay
        // in original run order (the estimate needs the regenerated matrix).
        for name in reference.keys() {
            if !name.ends_with(".meta.json") && name != "tab.csv" {
                std::fs::remove_file(d.join(name)).unwrap();
            }
        }
        for sidecar in &sidecars {
            let out = run_cli(d, threads, &["rerun", "--sidecar", sidecar]);
            assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        }
        pass &= dir_snapshot(d) == reference;
    }
    verdict(
        11,
        "sidecar replay thread invariance",
        pass,
        &format!("{} files bit-identical across thread counts 1/2/4", reference.len()),
    );
}
