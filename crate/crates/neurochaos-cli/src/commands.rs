//! The six subcommands: each computes its full report first, then writes
//! every output file atomically, so failed runs leave nothing behind.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

use neurochaos::chaos::{lyapunov, ChaoticMap, Hyperparams};
use neurochaos::chaosfex::FeatureMatrix;
use neurochaos::dataio::lowsample_splits;
use neurochaos::layer::{build_layout, NeuronKind};
use neurochaos::metrics::macro_f1;
use neurochaos::tune::{grid_search_with, Grid};

use crate::config::{
    ClassifierSection, HyperparamsSection, NormalizationMode, SchemeName, Settings,
};
use crate::experiment::{
    classify, dataset_echo, features, hyperparams, load_dataset, run_replica, transform_options,
    DatasetEcho, ReplicaReport,
};
use crate::output::{index_digest, mean, median, write_atomic, write_json};
use crate::CliError;

#[derive(Debug, Serialize)]
struct ArchitectureEcho {
    scheme: SchemeName,
    proportion_logistic: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    median_macro_f1: f64,
    mean_macro_f1: f64,
}

fn summarize(replicas: &[ReplicaReport]) -> Summary {
    let scores: Vec<f64> = replicas.iter().map(|r| r.metrics.macro_f1).collect();
    Summary {
        median_macro_f1: median(&scores),
        mean_macro_f1: mean(&scores),
    }
}

// ---------------------------------------------------------------------------
// tune

#[derive(Debug, Serialize)]
struct GridEcho {
    source: &'static str,
    q_values: usize,
    b_values: usize,
    epsilon_values: usize,
    points: usize,
}

#[derive(Debug, Serialize)]
struct TuneReport {
    command: &'static str,
    dataset: DatasetEcho,
    architecture: ArchitectureEcho,
    grid: GridEcho,
    folds: usize,
    seed: u64,
    cap: usize,
    normalize_features: bool,
    tuned_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    train_rows_digest: Option<String>,
    best: Hyperparams<f64>,
    best_cv_macro_f1: f64,
}

pub fn tune(settings: &Settings) -> Result<(), CliError> {
    let section = settings.dataset()?;
    let arch = settings.architecture()?;
    let proportion = arch.proportion()?;
    let (grid, source) = match &settings.file.grid {
        Some(g) => (
            Grid::new(g.q.clone(), g.b.clone(), g.epsilon.clone())
                .map_err(|e| CliError::usage(e.to_string()))?,
            "config",
        ),
        None => (Grid::default_search_space(), "default"),
    };

    let loaded = load_dataset(section)?;
    // Tune on the training side when a split is configured, otherwise on
    // the whole dataset (cross-validation provides the held-out folds).
    let (x, y, train_rows_digest) = if section.train_counts.is_some() {
        let s = loaded.split_for(section, settings.seed)?;
        let digest = index_digest(&s.train_indices);
        (s.train.x, s.train.y, Some(digest))
    } else {
        (loaded.dataset.x.clone(), loaded.dataset.y.clone(), None)
    };

    let layout = build_layout(
        loaded.dataset.num_features(),
        arch.scheme.to_layout(),
        proportion,
        settings.seed,
    )
    .map_err(|e| CliError::usage(e.to_string()))?;

    let opts = transform_options(settings);
    let result = grid_search_with(&x, &y, &layout, &grid, settings.folds, settings.seed, &opts)
        .map_err(|e| CliError::Runtime(e.into()))?;

    let mut grid_csv = Vec::new();
    result
        .write_csv(&mut grid_csv)
        .map_err(|e| CliError::Runtime(e.into()))?;

    let report = TuneReport {
        command: "tune",
        dataset: dataset_echo(section, &loaded),
        architecture: ArchitectureEcho {
            scheme: arch.scheme,
            proportion_logistic: proportion,
        },
        grid: GridEcho {
            source,
            q_values: grid.q_values().len(),
            b_values: grid.b_values().len(),
            epsilon_values: grid.epsilon_values().len(),
            points: grid.num_points(),
        },
        folds: settings.folds,
        seed: settings.seed,
        cap: settings.cap,
        normalize_features: settings.normalize_features,
        tuned_rows: y.len(),
        train_rows_digest,
        best: result.best,
        best_cv_macro_f1: result.best_cv_macro_f1,
    };

    write_atomic(&settings.out.join("grid.csv"), &grid_csv)?;
    write_json(&settings.out.join("tuned.json"), &report)?;
    println!(
        "tune: best q={} b={} epsilon={} (cv macro-F1 {:.4}) over {} grid points",
        report.best.q,
        report.best.b,
        report.best.epsilon,
        report.best_cv_macro_f1,
        report.grid.points
    );
    println!("wrote {}", settings.out.join("tuned.json").display());
    println!("wrote {}", settings.out.join("grid.csv").display());
    Ok(())
}

// ---------------------------------------------------------------------------
// eval

#[derive(Debug, Serialize)]
struct EvalReport {
    command: &'static str,
    dataset: DatasetEcho,
    architecture: ArchitectureEcho,
    classifier: ClassifierSection,
    hyperparams: HyperparamsSection,
    cap: usize,
    normalize_features: bool,
    seed: u64,
    seeds: usize,
    per_seed: Vec<ReplicaReport>,
    summary: Summary,
}

pub fn eval(settings: &Settings) -> Result<(), CliError> {
    let section = settings.dataset()?;
    let arch = settings.architecture()?;
    let proportion = arch.proportion()?;
    let classifier = settings.classifier()?;
    let hp_section = settings.hyperparams()?;
    let hp = hyperparams(&hp_section)?;
    let opts = transform_options(settings);

    let loaded = load_dataset(section)?;
    let mut per_seed = Vec::with_capacity(settings.seeds);
    for seed in settings.seed..settings.seed + settings.seeds as u64 {
        per_seed.push(run_replica(
            &loaded,
            section,
            arch.scheme.to_layout(),
            proportion,
            &hp,
            &classifier,
            &opts,
            seed,
        )?);
    }

    let report = EvalReport {
        command: "eval",
        dataset: dataset_echo(section, &loaded),
        architecture: ArchitectureEcho {
            scheme: arch.scheme,
            proportion_logistic: proportion,
        },
        classifier,
        hyperparams: hp_section,
        cap: settings.cap,
        normalize_features: settings.normalize_features,
        seed: settings.seed,
        seeds: settings.seeds,
        summary: summarize(&per_seed),
        per_seed,
    };

    write_json(&settings.out.join("metrics.json"), &report)?;
    println!(
        "eval: median macro-F1 {:.4}, mean {:.4} over {} seed(s)",
        report.summary.median_macro_f1, report.summary.mean_macro_f1, report.seeds
    );
    println!("wrote {}", settings.out.join("metrics.json").display());
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Serialize)]
struct SweepCell {
    scheme: SchemeName,
    proportion_logistic: f64,
    classifier: String,
    hyperparams: HyperparamsSection,
    median_macro_f1: f64,
    mean_macro_f1: f64,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    command: &'static str,
    dataset: DatasetEcho,
    cap: usize,
    normalize_features: bool,
    seed: u64,
    seeds: usize,
    cells: Vec<SweepCell>,
}

impl SchemeName {
    fn label(self) -> &'static str {
        match self {
            SchemeName::HomogeneousGls => "homogeneous-gls",
            SchemeName::HomogeneousLogistic => "homogeneous-logistic",
            SchemeName::OddEven => "odd-even",
            SchemeName::RandomHeterogeneous => "random-heterogeneous",
        }
    }
}

pub fn sweep(settings: &Settings) -> Result<(), CliError> {
    let section = settings.dataset()?;
    let architectures = settings
        .file
        .architectures
        .as_ref()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| CliError::usage("sweep needs a non-empty `architectures` list"))?;
    let classifiers = match &settings.file.classifiers {
        Some(list) if list.is_empty() => {
            return Err(CliError::usage("`classifiers` must not be empty"))
        }
        Some(list) => list.clone(),
        None => vec![ClassifierSection::default()],
    };
    for c in &classifiers {
        c.validate()?;
    }
    let opts = transform_options(settings);

    let loaded = load_dataset(section)?;
    let mut cells = Vec::new();
    for arch in architectures {
        let proportion = arch.proportion()?;
        let hp_section = match arch.hyperparams_override()? {
            Some(hp) => hp,
            None => settings.hyperparams()?,
        };
        let hp = hyperparams(&hp_section)?;
        for classifier in &classifiers {
            let mut replicas = Vec::with_capacity(settings.seeds);
            for seed in settings.seed..settings.seed + settings.seeds as u64 {
                replicas.push(run_replica(
                    &loaded,
                    section,
                    arch.scheme.to_layout(),
                    proportion,
                    &hp,
                    classifier,
                    &opts,
                    seed,
                )?);
            }
            let summary = summarize(&replicas);
            cells.push(SweepCell {
                scheme: arch.scheme,
                proportion_logistic: proportion,
                classifier: classifier.name(),
                hyperparams: hp_section,
                median_macro_f1: summary.median_macro_f1,
                mean_macro_f1: summary.mean_macro_f1,
            });
        }
    }

    let mut csv = String::from(
        "scheme,proportion_logistic,classifier,q,b,epsilon,median_macro_f1,mean_macro_f1\n",
    );
    for cell in &cells {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            cell.scheme.label(),
            cell.proportion_logistic,
            cell.classifier,
            cell.hyperparams.q,
            cell.hyperparams.b,
            cell.hyperparams.epsilon,
            cell.median_macro_f1,
            cell.mean_macro_f1
        )
        .expect("string write");
    }

    let report = SweepReport {
        command: "sweep",
        dataset: dataset_echo(section, &loaded),
        cap: settings.cap,
        normalize_features: settings.normalize_features,
        seed: settings.seed,
        seeds: settings.seeds,
        cells,
    };

    write_atomic(&settings.out.join("sweep.csv"), csv.as_bytes())?;
    write_json(&settings.out.join("sweep.json"), &report)?;
    println!("sweep: {} cell(s)", report.cells.len());
    println!("wrote {}", settings.out.join("sweep.csv").display());
    println!("wrote {}", settings.out.join("sweep.json").display());
    Ok(())
}

// ---------------------------------------------------------------------------
// lowsample

#[derive(Debug, Serialize)]
struct LowsamplePoint {
    per_class: usize,
    mean_f1: f64,
    std: f64,
}

#[derive(Debug, Serialize)]
struct LowsampleReport {
    command: &'static str,
    dataset: DatasetEcho,
    architecture: ArchitectureEcho,
    classifier: ClassifierSection,
    hyperparams: HyperparamsSection,
    cap: usize,
    normalize_features: bool,
    seed: u64,
    trials: usize,
    per_class_max: usize,
    layout: Vec<NeuronKind>,
    curve: Vec<LowsamplePoint>,
}

pub fn lowsample(settings: &Settings) -> Result<(), CliError> {
    let section = settings.dataset()?;
    let arch = settings.architecture()?;
    let proportion = arch.proportion()?;
    let classifier = settings.classifier()?;
    let hp_section = settings.hyperparams()?;
    let hp = hyperparams(&hp_section)?;
    let ls = settings.file.lowsample.unwrap_or_default();
    if ls.per_class_max == 0 {
        return Err(CliError::usage("lowsample.per_class_max must be >= 1"));
    }
    if ls.trials == 0 {
        return Err(CliError::usage("lowsample.trials must be >= 1"));
    }
    let opts = transform_options(settings);

    let loaded = load_dataset(section)?;
    let ds = &loaded.dataset;
    // One layout draw for the whole curve: the experiment varies training
    // size and split, not architecture.
    let layout = build_layout(
        ds.num_features(),
        arch.scheme.to_layout(),
        proportion,
        settings.seed,
    )
    .map_err(|e| CliError::usage(e.to_string()))?;

    // Features only depend on the row under global normalization, so the
    // whole matrix is transformed once and splits select from it.
    let all = match section.normalization {
        NormalizationMode::Global => Some(features(&ds.x, &layout, &hp, &opts)?),
        NormalizationMode::TrainOnly => None,
    };

    let mut curve = Vec::with_capacity(ls.per_class_max);
    for per_class in 1..=ls.per_class_max {
        let splits = lowsample_splits(ds, per_class, ls.trials, settings.seed)
            .map_err(|e| CliError::Runtime(e.into()))?;
        let mut scores = Vec::with_capacity(splits.len());
        for s in &splits {
            let (train_x, test_x) = match &all {
                Some(all) => (
                    all.select_rows(&s.train_indices),
                    all.select_rows(&s.test_indices),
                ),
                None => (
                    features(&s.train.x, &layout, &hp, &opts)?,
                    features(&s.test.x, &layout, &hp, &opts)?,
                ),
            };
            let predicted = classify(&train_x, &s.train.y, &test_x, &classifier)?;
            let f1: f64 = macro_f1(&s.test.y, &predicted, ds.num_classes())
                .map_err(|e| CliError::Runtime(e.into()))?;
            scores.push(f1);
        }
        let m = mean(&scores);
        let variance = scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / scores.len() as f64;
        curve.push(LowsamplePoint {
            per_class,
            mean_f1: m,
            std: variance.sqrt(),
        });
    }

    let mut csv = String::from("per_class,mean_f1,std\n");
    for p in &curve {
        writeln!(csv, "{},{},{}", p.per_class, p.mean_f1, p.std).expect("string write");
    }

    let report = LowsampleReport {
        command: "lowsample",
        dataset: dataset_echo(section, &loaded),
        architecture: ArchitectureEcho {
            scheme: arch.scheme,
            proportion_logistic: proportion,
        },
        classifier,
        hyperparams: hp_section,
        cap: settings.cap,
        normalize_features: settings.normalize_features,
        seed: settings.seed,
        trials: ls.trials,
        per_class_max: ls.per_class_max,
        layout: layout.kinds,
        curve,
    };

    write_atomic(&settings.out.join("lowsample.csv"), csv.as_bytes())?;
    write_json(&settings.out.join("lowsample.json"), &report)?;
    println!(
        "lowsample: {} size(s) x {} trial(s)",
        report.per_class_max, report.trials
    );
    println!("wrote {}", settings.out.join("lowsample.csv").display());
    println!("wrote {}", settings.out.join("lowsample.json").display());
    Ok(())
}

// ---------------------------------------------------------------------------
// lyapunov

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Logistic,
    SkewTent,
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovParams {
    pub map: MapKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub x0: f64,
    pub iterations: usize,
    pub burn_in: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct LyapunovReport {
    command: &'static str,
    #[serde(flatten)]
    params: LyapunovParams,
}

pub fn lyapunov_sweep(params: &LyapunovParams) -> Result<(), CliError> {
    if params.steps == 0 {
        return Err(CliError::usage("steps must be >= 1"));
    }
    if params.from > params.to {
        return Err(CliError::usage("parameter range needs from <= to"));
    }
    let domain_ok = |v: f64| match params.map {
        MapKind::Logistic => v > 0.0 && v <= 4.0,
        MapKind::SkewTent => v > 0.0 && v < 1.0,
    };
    if !domain_ok(params.from) || !domain_ok(params.to) {
        return Err(CliError::usage(match params.map {
            MapKind::Logistic => "logistic parameter r must lie in (0,4]",
            MapKind::SkewTent => "skew-tent parameter b must lie in (0,1)",
        }));
    }
    if !(params.x0 > 0.0 && params.x0 < 1.0) {
        return Err(CliError::usage("x0 must lie in (0,1)"));
    }
    if params.iterations == 0 {
        return Err(CliError::usage("iterations must be >= 1"));
    }

    let mut csv = String::from("parameter,lambda\n");
    for i in 0..params.steps {
        let t = if params.steps == 1 {
            0.0
        } else {
            i as f64 / (params.steps - 1) as f64
        };
        let value = params.from + (params.to - params.from) * t;
        let map = match params.map {
            MapKind::Logistic => ChaoticMap::logistic(value),
            MapKind::SkewTent => ChaoticMap::skew_tent(value),
        }
        .map_err(|e| CliError::usage(e.to_string()))?;
        let lambda = lyapunov(map, params.x0, params.iterations, params.burn_in)
            .map_err(|e| CliError::Runtime(e.into()))?;
        writeln!(csv, "{value},{lambda}").expect("string write");
    }

    let report = LyapunovReport {
        command: "lyapunov",
        params: params.clone(),
    };
    write_atomic(&params.out.join("lyapunov.csv"), csv.as_bytes())?;
    write_json(&params.out.join("lyapunov.json"), &report)?;
    println!("lyapunov: {} point(s)", params.steps);
    println!("wrote {}", params.out.join("lyapunov.csv").display());
    println!("wrote {}", params.out.join("lyapunov.json").display());
    Ok(())
}

// ---------------------------------------------------------------------------
// export-features

#[derive(Debug, Serialize)]
struct ExportReport {
    command: &'static str,
    dataset: DatasetEcho,
    architecture: ArchitectureEcho,
    hyperparams: HyperparamsSection,
    cap: usize,
    normalize_features: bool,
    seed: u64,
    layout: Vec<NeuronKind>,
    feature_columns: Vec<String>,
    train_rows: usize,
    test_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    train_rows_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_rows_digest: Option<String>,
    files: Vec<String>,
}

fn feature_csv(features: &FeatureMatrix<f64>, labels: &[usize]) -> Vec<u8> {
    let mut text = String::new();
    text.push_str(&features.column_names().join(","));
    text.push_str(",label\n");
    for (row, label) in features.iter_rows().zip(labels) {
        for v in row {
            write!(text, "{v},").expect("string write");
        }
        writeln!(text, "{label}").expect("string write");
    }
    text.into_bytes()
}

pub fn export_features(settings: &Settings) -> Result<(), CliError> {
    let section = settings.dataset()?;
    let arch = settings.architecture()?;
    let proportion = arch.proportion()?;
    let hp_section = settings.hyperparams()?;
    let hp = hyperparams(&hp_section)?;
    let opts = transform_options(settings);

    let loaded = load_dataset(section)?;
    let ds = &loaded.dataset;
    let layout = build_layout(
        ds.num_features(),
        arch.scheme.to_layout(),
        proportion,
        settings.seed,
    )
    .map_err(|e| CliError::usage(e.to_string()))?;

    // With split counts the export mirrors an evaluation's train/test view;
    // without them every row lands in the train file.
    let (train, test, digests) = if section.train_counts.is_some() {
        let s = loaded.split_for(section, settings.seed)?;
        let (train_x, test_x) = match section.normalization {
            NormalizationMode::Global => {
                let all = features(&ds.x, &layout, &hp, &opts)?;
                (
                    all.select_rows(&s.train_indices),
                    all.select_rows(&s.test_indices),
                )
            }
            NormalizationMode::TrainOnly => (
                features(&s.train.x, &layout, &hp, &opts)?,
                features(&s.test.x, &layout, &hp, &opts)?,
            ),
        };
        let digests = (
            Some(index_digest(&s.train_indices)),
            Some(index_digest(&s.test_indices)),
        );
        ((train_x, s.train.y), (test_x, s.test.y), digests)
    } else {
        let all = features(&ds.x, &layout, &hp, &opts)?;
        let empty = FeatureMatrix::from_rows(Vec::new()).expect("empty matrix");
        ((all, ds.y.clone()), (empty, Vec::new()), (None, None))
    };

    let train_path = settings.out.join("features_train.csv");
    let test_path = settings.out.join("features_test.csv");
    let provenance_path = settings.out.join("provenance.json");

    write_atomic(&train_path, &feature_csv(&train.0, &train.1))?;
    let mut written = vec![train_path];
    if test.0.rows() > 0 {
        write_atomic(&test_path, &feature_csv(&test.0, &test.1))?;
        written.push(test_path);
    }
    written.push(provenance_path.clone());
    // Names only, so the report does not depend on where --out pointed.
    let files = written
        .iter()
        .map(|p| {
            p.file_name()
                .expect("file name")
                .to_string_lossy()
                .into_owned()
        })
        .collect();

    let report = ExportReport {
        command: "export-features",
        dataset: dataset_echo(section, &loaded),
        architecture: ArchitectureEcho {
            scheme: arch.scheme,
            proportion_logistic: proportion,
        },
        hyperparams: hp_section,
        cap: settings.cap,
        normalize_features: settings.normalize_features,
        seed: settings.seed,
        layout: layout.kinds.clone(),
        feature_columns: train.0.column_names(),
        train_rows: train.0.rows(),
        test_rows: test.0.rows(),
        train_rows_digest: digests.0,
        test_rows_digest: digests.1,
        files,
    };
    write_json(&provenance_path, &report)?;

    println!(
        "export-features: {} train row(s), {} test row(s)",
        report.train_rows, report.test_rows
    );
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
