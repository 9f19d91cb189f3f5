//! Release gate: one test per acceptance criterion, each printing a single
//! `[ACCEPTANCE] <criterion>: PASS|FAIL (<detail>)` line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the verdicts for
//! passing criteria too (cargo hides captured output on success).
//!
//! Criteria that need the optional UCI fixtures fail honestly when the CSVs
//! are absent; `tools/fetch_datasets.py` downloads them (network required).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;
use tempfile::TempDir;

use neurochaos::chaos::{
    generate_trace, lyapunov, skew_tent_lyapunov_exact, ChaoticMap, Hyperparams,
};
use neurochaos::chaosfex::{
    energy, entropy, firing_rate, transform_with, FeatureMatrix, TransformOptions,
};
use neurochaos::classify::{
    fit_cosine, fit_predict_knn, predict_cosine, predict_cosine_batch, GnbModel,
};
use neurochaos::dataio::{load_csv, normalize, split, Dataset, LabelColumn};
use neurochaos::layer::{build_layout, LayoutScheme};
use neurochaos::metrics::macro_f1;
use neurochaos::tune::{stratified_folds, Grid};

// ---------------------------------------------------------------------------
// shared plumbing

fn verdict(criterion: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[ACCEPTANCE] {criterion}: {tag} ({detail})");
    assert!(pass, "{criterion}: {detail}");
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

const FETCH_HINT: &str =
    "run `python3 tools/fetch_datasets.py` to download the missing CSVs, then re-run";

#[derive(Deserialize)]
struct Manifest {
    datasets: Vec<FixtureEntry>,
}

#[derive(Deserialize)]
struct FixtureEntry {
    name: String,
    file: String,
    has_header: bool,
    #[allow(dead_code)]
    label_column: String,
    train_counts: Vec<usize>,
    tuned: Tuned,
    reference_macro_f1: f64,
}

#[derive(Deserialize)]
struct Tuned {
    rh25l75g: Triple,
    #[allow(dead_code)]
    rh50l50g: Triple,
    #[allow(dead_code)]
    rh75l25g: Triple,
}

#[derive(Deserialize, Clone, Copy)]
struct Triple {
    q: f64,
    b: f64,
    epsilon: f64,
}

impl Triple {
    fn hyperparams(self) -> Hyperparams<f64> {
        Hyperparams::new(self.q, self.b, self.epsilon).expect("manifest triple in (0,1)")
    }
}

fn manifest() -> Manifest {
    let path = fixtures_dir().join("manifest.json");
    let text = fs::read_to_string(&path).expect("fixtures/manifest.json");
    serde_json::from_str(&text).expect("valid manifest")
}

fn entry(name: &str) -> FixtureEntry {
    manifest()
        .datasets
        .into_iter()
        .find(|d| d.name == name)
        .unwrap_or_else(|| panic!("{name} not in manifest"))
}

fn load_fixture(entry: &FixtureEntry) -> Option<Dataset<f64>> {
    let path = fixtures_dir().join(&entry.file);
    if !path.is_file() {
        return None;
    }
    let raw = load_csv(&path, &LabelColumn::Last, entry.has_header).expect("fixture parses");
    Some(normalize(&raw).expect("fixture normalizes"))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Macro F1 of one full replica at the manifest's tuned settings: random
/// heterogeneous layout (25% logistic), raw (unnormalized) features, cosine
/// classifier — the combination the manifest's reference scores refer to.
fn tuned_replica_f1(ds: &Dataset<f64>, entry: &FixtureEntry, seed: u64) -> f64 {
    let hp = entry.tuned.rh25l75g.hyperparams();
    let opts = TransformOptions {
        normalize: false,
        ..TransformOptions::default()
    };
    let layout = build_layout(
        ds.num_features(),
        LayoutScheme::RandomHeterogeneous,
        0.25,
        seed,
    )
    .expect("layout");
    let s = split(ds, &entry.train_counts, seed).expect("split");
    let all = transform_with(&ds.x, &layout, &hp, &opts)
        .expect("transform")
        .features;
    let model = fit_cosine(&all.select_rows(&s.train_indices), &s.train.y).expect("fit");
    let predicted =
        predict_cosine_batch(&model, &all.select_rows(&s.test_indices)).expect("predict");
    macro_f1(&s.test.y, &predicted, ds.num_classes()).expect("score")
}

fn tuned_median_f1(ds: &Dataset<f64>, entry: &FixtureEntry) -> f64 {
    let mut scores: Vec<f64> = (0..10)
        .map(|seed| tuned_replica_f1(ds, entry, seed))
        .collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    median(&scores)
}

/// Criterion body shared by the reference-band datasets: median macro F1
/// over ten seeded replicas must land within ±0.10 of the manifest score.
fn reference_band(criterion: &str, dataset: &str, budget: Duration) {
    let entry = entry(dataset);
    let Some(ds) = load_fixture(&entry) else {
        verdict(
            criterion,
            false,
            format!("fixture fixtures/{} missing — {FETCH_HINT}", entry.file),
        );
        return;
    };
    let start = Instant::now();
    let med = tuned_median_f1(&ds, &entry);
    let elapsed = start.elapsed();
    let gap = (med - entry.reference_macro_f1).abs();
    verdict(
        criterion,
        gap <= 0.10 && elapsed <= budget,
        format!(
            "median {med:.4} vs reference {:.2} (gap {gap:.4}), {elapsed:.2?}",
            entry.reference_macro_f1
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion: iris at its tuned settings is essentially solved

#[test]
fn iris_tuned_settings_reach_reference_accuracy() {
    let criterion = "iris tuned-settings median macro-F1 >= 0.95 in < 10 s";
    let entry = entry("iris");
    let ds = load_fixture(&entry).expect("iris.csv ships with the repository");
    let start = Instant::now();
    let med = tuned_median_f1(&ds, &entry);
    let elapsed = start.elapsed();
    verdict(
        criterion,
        med >= 0.95 && elapsed <= Duration::from_secs(10),
        format!("median {med:.4} over 10 seeds, {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------------
// criteria: reference scores on the harder UCI datasets

#[test]
fn haberman_tuned_settings_match_reference_accuracy() {
    reference_band(
        "haberman tuned-settings median macro-F1 within 0.73 +/- 0.10 in < 30 s",
        "haberman",
        Duration::from_secs(30),
    );
}

#[test]
fn breast_cancer_tuned_settings_match_reference_accuracy() {
    reference_band(
        "breast-cancer tuned-settings median macro-F1 within 0.85 +/- 0.10 in < 60 s",
        "breast-cancer-wisconsin",
        Duration::from_secs(60),
    );
}

// ---------------------------------------------------------------------------
// criterion: p = 0 / p = 1 random layouts collapse to the homogeneous schemes

#[test]
fn degenerate_random_layouts_match_homogeneous_pipelines() {
    let criterion = "p=0/p=1 random layouts match homogeneous pipelines bit-for-bit";
    let manifest = manifest();
    let mut missing = Vec::new();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();

    for entry in &manifest.datasets {
        let Some(ds) = load_fixture(entry) else {
            missing.push(entry.file.clone());
            continue;
        };
        let hp = entry.tuned.rh25l75g.hyperparams();
        let opts = TransformOptions {
            cap: 2_000,
            ..TransformOptions::default()
        };
        for seed in [0u64, 1] {
            for (p, pure) in [
                (0.0, LayoutScheme::HomogeneousGls),
                (1.0, LayoutScheme::HomogeneousLogistic),
            ] {
                let random = build_layout(
                    ds.num_features(),
                    LayoutScheme::RandomHeterogeneous,
                    p,
                    seed,
                )
                .expect("layout");
                let pure = build_layout(ds.num_features(), pure, p, seed).expect("layout");
                if random.kinds != pure.kinds {
                    mismatches.push(format!("{} p={p} seed={seed}: layouts differ", entry.name));
                    continue;
                }
                let a = transform_with(&ds.x, &random, &hp, &opts).expect("transform");
                let b = transform_with(&ds.x, &pure, &hp, &opts).expect("transform");
                if a.features != b.features {
                    mismatches.push(format!("{} p={p} seed={seed}: features differ", entry.name));
                    continue;
                }
                let s = split(&ds, &entry.train_counts, seed).expect("split");
                let fit = |m: &FeatureMatrix<f64>| {
                    let model =
                        fit_cosine(&m.select_rows(&s.train_indices), &s.train.y).expect("fit");
                    predict_cosine_batch(&model, &m.select_rows(&s.test_indices)).expect("predict")
                };
                if fit(&a.features) != fit(&b.features) {
                    mismatches.push(format!(
                        "{} p={p} seed={seed}: predictions differ",
                        entry.name
                    ));
                }
            }
        }
        checked += 1;
    }

    let mut detail = format!("{checked}/{} datasets verified", manifest.datasets.len());
    if !mismatches.is_empty() {
        detail.push_str(&format!("; mismatches: {}", mismatches.join(", ")));
    }
    if !missing.is_empty() {
        detail.push_str(&format!(
            "; missing fixtures: {} — {FETCH_HINT}",
            missing.join(", ")
        ));
    }
    verdict(
        criterion,
        mismatches.is_empty() && missing.is_empty(),
        detail,
    );
}

// ---------------------------------------------------------------------------
// criterion: Lyapunov estimates against closed forms

#[test]
fn lyapunov_estimates_match_closed_forms() {
    let criterion = "lyapunov within 0.01 of closed form at 1e6 iterations in < 5 s";
    let ln2 = std::f64::consts::LN_2;
    let cases = [
        (ChaoticMap::logistic(4.0).unwrap(), ln2),
        (ChaoticMap::skew_tent(0.5).unwrap(), ln2),
        (
            ChaoticMap::skew_tent(0.1).unwrap(),
            skew_tent_lyapunov_exact(0.1),
        ),
        (
            ChaoticMap::skew_tent(0.3).unwrap(),
            skew_tent_lyapunov_exact(0.3),
        ),
        (
            ChaoticMap::skew_tent(0.7).unwrap(),
            skew_tent_lyapunov_exact(0.7),
        ),
    ];

    let start = Instant::now();
    let mut worst = 0.0f64;
    for (map, exact) in cases {
        let estimate: f64 = lyapunov(map, 0.37, 1_000_000, 1_000).expect("estimate");
        worst = worst.max((estimate - exact).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        criterion,
        worst <= 0.01 && elapsed <= Duration::from_secs(5),
        format!("worst |error| {worst:.5} over {} maps, {elapsed:.2?}", 5),
    );
}

// ---------------------------------------------------------------------------
// criterion: property suites

fn check_transform_shapes() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let m = rng.gen_range(1..=20);
        let n = rng.gen_range(1..=12);
        let x: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen()).collect())
            .collect();
        let hp = Hyperparams::new(
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.4),
        )
        .unwrap();
        let layout = build_layout(n, LayoutScheme::RandomHeterogeneous, rng.gen(), case).unwrap();
        let opts = TransformOptions {
            cap: 200,
            ..TransformOptions::default()
        };
        let out = transform_with(&x, &layout, &hp, &opts).map_err(|e| e.to_string())?;
        if out.features.rows() != m || out.features.cols() != 4 * n {
            return Err(format!(
                "case {case}: {m}x{n} input gave {}x{} features",
                out.features.rows(),
                out.features.cols()
            ));
        }
    }
    Ok(())
}

fn check_trace_and_feature_bounds() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cap = 64;
    for case in 0..10_000 {
        let map = if rng.gen() {
            ChaoticMap::logistic_chaotic()
        } else {
            ChaoticMap::skew_tent(rng.gen_range(0.01..0.99)).unwrap()
        };
        let q = rng.gen_range(1e-6..1.0 - 1e-6);
        let stimulus: f64 = rng.gen();
        let eps = rng.gen_range(1e-3..0.5);
        let b = rng.gen_range(0.01..0.99);
        let trace = generate_trace(map, q, stimulus, eps, cap);

        let fail = |msg: String| Err(format!("case {case}: {msg}"));
        if trace.values.len() != trace.firing_time || !(1..=cap).contains(&trace.firing_time) {
            return fail(format!(
                "firing time {} vs {} values (cap {cap})",
                trace.firing_time,
                trace.values.len()
            ));
        }
        if trace.values.iter().any(|v| !(0.0..1.0).contains(v)) {
            return fail("trace left [0,1)".into());
        }
        // The trace must stop at the first value inside the epsilon-ball
        // and nowhere earlier; a capped trace never enters it at all.
        let hits: Vec<bool> = trace
            .values
            .iter()
            .map(|v| (v - stimulus).abs() < eps)
            .collect();
        if trace.detected {
            if !hits[trace.firing_time - 1] || hits[..trace.firing_time - 1].contains(&true) {
                return fail("detection not at the first epsilon-ball entry".into());
            }
        } else if hits.contains(&true) {
            return fail("capped trace entered the epsilon-ball".into());
        }
        let rate = firing_rate(&trace, b);
        let ent = entropy(&trace, b);
        let en = energy(&trace);
        let len = trace.values.len() as f64;
        if !(0.0..=1.0).contains(&rate) || !(0.0..=1.0).contains(&ent) {
            return fail(format!("rate {rate} or entropy {ent} out of [0,1]"));
        }
        if !(0.0..len).contains(&en) && en != 0.0 {
            return fail(format!("energy {en} out of [0,{len})"));
        }
    }
    Ok(())
}

fn check_cosine_scale_invariance() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..8).map(|_| rng.gen()).collect())
        .collect();
    let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
    let model = fit_cosine(&FeatureMatrix::from_rows(rows).unwrap(), &labels).unwrap();
    for case in 0..1_000 {
        let row: Vec<f64> = (0..8).map(|_| rng.gen()).collect();
        let scale = 10f64.powf(rng.gen_range(-6.0..6.0));
        let scaled: Vec<f64> = row.iter().map(|v| v * scale).collect();
        let a = predict_cosine(&model, &row).unwrap();
        let b = predict_cosine(&model, &scaled).unwrap();
        if a != b {
            return Err(format!("case {case}: scale {scale:e} changed {a} -> {b}"));
        }
    }
    Ok(())
}

/// Plain quadratic-scan kNN with the same tie rules: nearer row index wins
/// distance ties, lower label wins vote ties.
fn knn_oracle(train: &[Vec<f64>], labels: &[usize], query: &[f64], k: usize) -> usize {
    let mut dists: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d = row
                .iter()
                .zip(query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            (d, i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; labels.iter().max().unwrap() + 1];
    for (_, i) in &dists[..k] {
        votes[labels[*i]] += 1;
    }
    votes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap()
        .0
}

fn random_classification_case(
    rng: &mut ChaCha8Rng,
    num_classes: usize,
) -> (Vec<Vec<f64>>, Vec<usize>, Vec<Vec<f64>>) {
    let rows = rng.gen_range(num_classes.max(5)..30);
    let cols = rng.gen_range(1..6);
    let train: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen()).collect())
        .collect();
    // i % k guarantees every class appears; order is otherwise arbitrary.
    let labels: Vec<usize> = (0..rows).map(|i| i % num_classes).collect();
    let queries: Vec<Vec<f64>> = (0..rng.gen_range(1..5))
        .map(|_| (0..cols).map(|_| rng.gen()).collect())
        .collect();
    (train, labels, queries)
}

fn check_knn_against_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in 0..200 {
        let num_classes = rng.gen_range(2..5);
        let (train, labels, queries) = random_classification_case(&mut rng, num_classes);
        let k = *[1usize, 3, 5]
            .iter()
            .rev()
            .find(|k| **k <= train.len())
            .unwrap();
        let matrix = FeatureMatrix::from_rows(train.clone()).unwrap();
        let queries_m = FeatureMatrix::from_rows(queries.clone()).unwrap();
        let got = fit_predict_knn(&matrix, &labels, &queries_m, k).map_err(|e| e.to_string())?;
        for (q, (query, prediction)) in queries.iter().zip(&got).enumerate() {
            let want = knn_oracle(&train, &labels, query, k);
            if want != *prediction {
                return Err(format!(
                    "case {case} query {q}: {prediction} vs oracle {want}"
                ));
            }
        }
    }
    Ok(())
}

/// Direct density evaluation: ln prior + sum of Gaussian log densities with
/// population variances floored at the model's constant.
fn gnb_oracle_log_posteriors(
    train: &[Vec<f64>],
    labels: &[usize],
    query: &[f64],
    num_classes: usize,
) -> Vec<f64> {
    let n = labels.len() as f64;
    (0..num_classes)
        .map(|c| {
            let members: Vec<&Vec<f64>> = train
                .iter()
                .zip(labels)
                .filter(|(_, l)| **l == c)
                .map(|(row, _)| row)
                .collect();
            let count = members.len() as f64;
            let mut lp = (count / n).ln();
            for j in 0..query.len() {
                let mean = members.iter().map(|r| r[j]).sum::<f64>() / count;
                let var = (members.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / count)
                    .max(neurochaos::classify::GNB_VARIANCE_FLOOR);
                let d = query[j] - mean;
                lp += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var);
            }
            lp
        })
        .collect()
}

fn check_gnb_against_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for case in 0..200 {
        let num_classes = rng.gen_range(2..5);
        let (train, labels, queries) = random_classification_case(&mut rng, num_classes);
        let matrix = FeatureMatrix::from_rows(train.clone()).unwrap();
        let model = GnbModel::fit(&matrix, &labels).map_err(|e| e.to_string())?;
        for (q, query) in queries.iter().enumerate() {
            let got = model.log_posteriors(query).map_err(|e| e.to_string())?;
            let want = gnb_oracle_log_posteriors(&train, &labels, query, num_classes);
            for (class, (g, w)) in got.iter().zip(&want).enumerate() {
                // Floored variances blow the magnitudes up to ~1e8, so the
                // comparison has to be relative.
                if (g - w).abs() > 1e-9 * g.abs().max(w.abs()).max(1.0) {
                    return Err(format!(
                        "case {case} query {q} class {class}: {g} vs oracle {w}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_entropy_endpoints() -> Result<(), String> {
    let trace = |values: Vec<f64>| neurochaos::chaos::NeuralTrace {
        firing_time: values.len(),
        values,
        detected: true,
    };
    let all_low = trace(vec![0.2; 10]);
    let all_high = trace(vec![0.9; 10]);
    let balanced = trace(vec![0.2, 0.9, 0.2, 0.9]);
    let b = 0.5;
    if entropy(&all_low, b) != 0.0 || entropy(&all_high, b) != 0.0 {
        return Err("single-symbol trace should have zero entropy".into());
    }
    if entropy(&balanced, b) != 1.0 {
        return Err(format!(
            "balanced trace entropy {} != 1 bit",
            entropy(&balanced, b)
        ));
    }
    if firing_rate(&all_low, b) != 0.0 || firing_rate(&all_high, b) != 1.0 {
        return Err("firing rate endpoints broken".into());
    }
    Ok(())
}

fn check_fold_laws() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for case in 0..50 {
        let num_classes = rng.gen_range(2..5);
        let k = rng.gen_range(2..6);
        let len = rng.gen_range(num_classes * k..100);
        let labels: Vec<usize> = (0..len).map(|i| i % num_classes).collect();
        let folds = stratified_folds(&labels, k, case as u64).map_err(|e| e.to_string())?;
        let again = stratified_folds(&labels, k, case as u64).map_err(|e| e.to_string())?;
        if folds != again {
            return Err(format!("case {case}: folds not deterministic"));
        }
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (0..len).collect::<Vec<_>>() {
            return Err(format!("case {case}: folds are not a partition"));
        }
        for class in 0..num_classes {
            let per_fold: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|i| labels[**i] == class).count())
                .collect();
            let spread = per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap();
            if spread > 1 {
                return Err(format!(
                    "case {case}: class {class} fold counts {per_fold:?} spread > 1"
                ));
            }
        }
    }
    Ok(())
}

fn write_toy_dataset(dir: &Path) -> PathBuf {
    let path = dir.join("toy.csv");
    let mut text = String::from("u,v,w,class\n");
    for i in 0..12 {
        let d = i as f64 * 0.01;
        text.push_str(&format!("{},{},{},a\n", 0.10 + d, 0.20 + d, 0.15 + d));
        text.push_str(&format!("{},{},{},b\n", 0.80 + d, 0.70 + d, 0.85 + d));
    }
    fs::write(&path, text).expect("write dataset");
    path
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_neurochaos"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.expect("dir entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).expect("read output"),
            )
        })
        .collect();
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

/// Every subcommand, run twice with the same inputs into fresh directories,
/// must produce byte-identical files.
fn check_cli_reruns_identical() -> Result<(), String> {
    let tmp = TempDir::new().expect("tempdir");
    let dir = tmp.path();
    let dataset = write_toy_dataset(dir);

    let base = serde_json::json!({
        "dataset": { "file": dataset.display().to_string(), "train_counts": [8, 8] },
        "architecture": { "scheme": "random-heterogeneous", "proportion_logistic": 0.5 },
        "hyperparams": { "q": 0.34, "b": 0.46, "epsilon": 0.18 },
        "seed": 7,
        "cap": 100
    });
    let mut tune = base.clone();
    tune["grid"] = serde_json::json!({ "q": [0.2, 0.4], "b": [0.3], "epsilon": [0.1] });
    tune["folds"] = serde_json::json!(2);
    let mut sweep = base.clone();
    sweep.as_object_mut().unwrap().remove("architecture");
    sweep["architectures"] = serde_json::json!([
        { "scheme": "homogeneous-gls" },
        { "scheme": "odd-even" }
    ]);
    let mut lowsample = base.clone();
    lowsample["lowsample"] = serde_json::json!({ "per_class_max": 2, "trials": 2 });

    let configs = [
        ("tune", tune),
        ("eval", base.clone()),
        ("sweep", sweep),
        ("lowsample", lowsample),
        ("export-features", base),
    ];
    for (command, config) in &configs {
        let cfg = dir.join(format!("{command}.json"));
        fs::write(&cfg, serde_json::to_string(config).unwrap()).expect("write config");
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out_dir = dir.join(format!("{command}-{run}"));
            run_cli(&[
                command,
                "--config",
                cfg.to_str().unwrap(),
                "--seeds",
                "2",
                "--out",
                out_dir.to_str().unwrap(),
            ])?;
            outputs.push(dir_files(&out_dir));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{command}: reruns differ"));
        }
    }

    let mut outputs = Vec::new();
    for run in 0..2 {
        let out_dir = dir.join(format!("lyapunov-{run}"));
        run_cli(&[
            "lyapunov",
            "--map",
            "skew-tent",
            "--steps",
            "3",
            "--iterations",
            "2000",
            "--burn-in",
            "100",
            "--out",
            out_dir.to_str().unwrap(),
        ])?;
        outputs.push(dir_files(&out_dir));
    }
    if outputs[0] != outputs[1] {
        return Err("lyapunov: reruns differ".into());
    }
    Ok(())
}

#[test]
fn property_suites_hold() {
    let criterion = "property suites (shapes, bounds, invariance, oracles, folds, CLI reruns)";
    let families: Vec<(&str, Result<(), String>)> = vec![
        ("transform shapes", check_transform_shapes()),
        ("trace and feature bounds", check_trace_and_feature_bounds()),
        ("cosine scale invariance", check_cosine_scale_invariance()),
        ("knn vs oracle", check_knn_against_oracle()),
        ("gnb vs oracle", check_gnb_against_oracle()),
        ("entropy endpoints", check_entropy_endpoints()),
        ("stratified fold laws", check_fold_laws()),
        ("CLI reruns byte-identical", check_cli_reruns_identical()),
    ];
    let failures: Vec<String> = families
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    verdict(
        criterion,
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} families", families.len())
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// criterion: the default grid reaches every known tuned triple

#[test]
fn default_grid_contains_manifest_tuned_settings() {
    let criterion = "default grid contains every manifest tuned triple";
    let grid: Grid<f64> = Grid::default_search_space();
    let mut missing = Vec::new();
    let mut total = 0;
    for entry in manifest().datasets {
        for (arch, triple) in [
            ("rh25l75g", entry.tuned.rh25l75g),
            ("rh50l50g", entry.tuned.rh50l50g),
            ("rh75l25g", entry.tuned.rh75l25g),
        ] {
            total += 1;
            if !grid.contains(&triple.hyperparams()) {
                missing.push(format!(
                    "{} {arch} ({}, {}, {})",
                    entry.name, triple.q, triple.b, triple.epsilon
                ));
            }
        }
    }
    verdict(
        criterion,
        missing.is_empty(),
        if missing.is_empty() {
            format!("{total}/{total} triples on the grid")
        } else {
            format!("missing: {}", missing.join("; "))
        },
    );
}

// ---------------------------------------------------------------------------
// criterion: macro F1 grows with training-set size on separable data

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0; // ties share the average rank
        for t in i..=j {
            out[order[t]] = rank;
        }
        i = j + 1;
    }
    out
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let (va, vb): (f64, f64) = (
        ra.iter().map(|x| (x - ma).powi(2)).sum(),
        rb.iter().map(|y| (y - mb).powi(2)).sum(),
    );
    cov / (va * vb).sqrt()
}

#[test]
fn macro_f1_rises_with_training_set_size() {
    let criterion = "macro-F1 vs training size Spearman > 0.7";
    let tmp = TempDir::new().expect("tempdir");
    let dir = tmp.path();

    // Two overlapping Gaussian blobs, 50 samples each: hard enough that a
    // handful of training rows underperforms, easy enough to keep improving
    // through fifteen rows per class.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise: Normal<f64> = Normal::new(0.0, 0.20).unwrap();
    let mut text = String::from("x,y,class\n");
    for (mx, my, label) in [(0.35, 0.60, "a"), (0.65, 0.40, "b")] {
        for _ in 0..50 {
            let x = (mx + noise.sample(&mut rng)).clamp(0.01, 0.99);
            let y = (my + noise.sample(&mut rng)).clamp(0.01, 0.99);
            text.push_str(&format!("{x},{y},{label}\n"));
        }
    }
    let dataset = dir.join("blobs.csv");
    fs::write(&dataset, text).expect("write dataset");

    let config = serde_json::json!({
        "dataset": { "file": dataset.display().to_string() },
        "architecture": { "scheme": "random-heterogeneous", "proportion_logistic": 0.25 },
        "hyperparams": { "q": 0.34, "b": 0.49, "epsilon": 0.18 },
        // Naive Bayes keeps improving as its per-class estimates sharpen,
        // so the curve rises through the whole size range instead of
        // saturating after a few rows.
        "classifier": { "kind": "gnb" },
        "lowsample": { "per_class_max": 15, "trials": 25 },
        "seed": 42,
        "cap": 1000
    });
    let cfg = dir.join("lowsample.json");
    fs::write(&cfg, serde_json::to_string(&config).unwrap()).expect("write config");
    let out_dir = dir.join("out");
    run_cli(&[
        "lowsample",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ])
    .expect("lowsample run");

    let csv = fs::read_to_string(out_dir.join("lowsample.csv")).expect("lowsample.csv");
    let (mut sizes, mut scores) = (Vec::new(), Vec::new());
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        sizes.push(cells[0].parse::<f64>().unwrap());
        scores.push(cells[1].parse::<f64>().unwrap());
    }
    assert_eq!(sizes.len(), 15, "one curve point per training size");
    let rho = spearman(&sizes, &scores);
    verdict(
        criterion,
        rho > 0.7,
        format!("rho {rho:.3} over sizes 1..=15, 25 trials each"),
    );
}
