//! Shared pipeline pieces: dataset loading, splitting, the feature
//! transform, classifier dispatch, and single-replica evaluation.

use serde::Serialize;

use neurochaos::chaos::Hyperparams;
use neurochaos::chaosfex::{transform_with, FeatureMatrix, TransformOptions};
use neurochaos::classify::{fit_cosine, fit_predict_gnb, fit_predict_knn, predict_cosine_batch};
use neurochaos::dataio::{
    load_csv, normalize, split, split_train_normalized, Dataset, LabelColumn, RawTable, Split,
};
use neurochaos::layer::{build_layout, NeuronKind, NeuronLayout};
use neurochaos::metrics::{confusion_matrix, MetricsReport};

use crate::config::{
    ClassifierKind, ClassifierSection, DatasetSection, HyperparamsSection, NormalizationMode,
    Settings,
};
use crate::output::index_digest;
use crate::CliError;

pub struct LoadedDataset {
    pub raw: RawTable,
    pub dataset: Dataset<f64>,
}

/// Loads and globally normalizes the configured CSV. The file's existence is
/// checked up front so a bad path is a usage error before any work happens.
pub fn load_dataset(section: &DatasetSection) -> Result<LoadedDataset, CliError> {
    if !section.file.is_file() {
        return Err(CliError::usage(format!(
            "dataset file {} does not exist",
            section.file.display()
        )));
    }
    let label_column = match &section.label_column {
        Some(name) => LabelColumn::Name(name.clone()),
        None => LabelColumn::Last,
    };
    let raw = load_csv(&section.file, &label_column, section.has_header)
        .map_err(|e| CliError::Runtime(e.into()))?;
    let dataset = normalize(&raw).map_err(|e| CliError::Runtime(e.into()))?;
    Ok(LoadedDataset { raw, dataset })
}

impl LoadedDataset {
    /// Builds the train/test split for one seed, honoring the configured
    /// normalization mode. `train_counts` must be present in the config.
    pub fn split_for(&self, section: &DatasetSection, seed: u64) -> Result<Split<f64>, CliError> {
        let counts = section
            .train_counts
            .as_ref()
            .ok_or_else(|| CliError::usage("dataset.train_counts is required for this command"))?;
        let result = match section.normalization {
            NormalizationMode::Global => split(&self.dataset, counts, seed),
            NormalizationMode::TrainOnly => split_train_normalized(&self.raw, counts, seed),
        };
        result.map_err(|e| CliError::Runtime(e.into()))
    }
}

pub fn hyperparams(section: &HyperparamsSection) -> Result<Hyperparams<f64>, CliError> {
    Hyperparams::new(section.q, section.b, section.epsilon)
        .map_err(|e| CliError::usage(e.to_string()))
}

pub fn transform_options(settings: &Settings) -> TransformOptions {
    TransformOptions {
        cap: settings.cap,
        normalize: settings.normalize_features,
        ..TransformOptions::default()
    }
}

pub fn features(
    x: &[Vec<f64>],
    layout: &NeuronLayout,
    hp: &Hyperparams<f64>,
    opts: &TransformOptions,
) -> Result<FeatureMatrix<f64>, CliError> {
    Ok(transform_with(x, layout, hp, opts)
        .map_err(|e| CliError::Runtime(e.into()))?
        .features)
}

/// Fits on the training features and predicts the test rows.
pub fn classify(
    train: &FeatureMatrix<f64>,
    train_y: &[usize],
    test: &FeatureMatrix<f64>,
    classifier: &ClassifierSection,
) -> Result<Vec<usize>, CliError> {
    let result = match classifier.kind {
        ClassifierKind::Cosine => {
            fit_cosine(train, train_y).and_then(|model| predict_cosine_batch(&model, test))
        }
        ClassifierKind::Knn => {
            let k = classifier.k.expect("validated");
            fit_predict_knn(train, train_y, test, k)
        }
        ClassifierKind::Gnb => fit_predict_gnb(train, train_y, test),
    };
    result.map_err(|e| CliError::Runtime(e.into()))
}

/// Everything needed to audit one seed's run.
#[derive(Debug, Serialize)]
pub struct ReplicaReport {
    pub seed: u64,
    pub layout: Vec<NeuronKind>,
    pub train_rows_digest: String,
    pub test_rows_digest: String,
    pub metrics: MetricsReport,
    /// confusion[i][j] = test rows of class i predicted as class j.
    pub confusion_matrix: Vec<Vec<u64>>,
}

/// Runs one complete replica: split, layout, transform, fit, predict.
#[allow(clippy::too_many_arguments)]
pub fn run_replica(
    loaded: &LoadedDataset,
    section: &DatasetSection,
    arch_scheme: neurochaos::layer::LayoutScheme,
    proportion: f64,
    hp: &Hyperparams<f64>,
    classifier: &ClassifierSection,
    opts: &TransformOptions,
    seed: u64,
) -> Result<ReplicaReport, CliError> {
    let ds = &loaded.dataset;
    let n = ds.num_features();
    let layout = build_layout(n, arch_scheme, proportion, seed)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let s = loaded.split_for(section, seed)?;

    // Feature rows are split-independent under global normalization, so one
    // transform of the full dataset serves both sides.
    let (train_x, test_x) = match section.normalization {
        NormalizationMode::Global => {
            let all = features(&ds.x, &layout, hp, opts)?;
            (
                all.select_rows(&s.train_indices),
                all.select_rows(&s.test_indices),
            )
        }
        NormalizationMode::TrainOnly => (
            features(&s.train.x, &layout, hp, opts)?,
            features(&s.test.x, &layout, hp, opts)?,
        ),
    };

    let predicted = classify(&train_x, &s.train.y, &test_x, classifier)?;
    let metrics = MetricsReport::compute(&s.test.y, &predicted, ds.num_classes())
        .map_err(|e| CliError::Runtime(e.into()))?;
    let confusion = confusion_matrix(&s.test.y, &predicted, ds.num_classes())
        .map_err(|e| CliError::Runtime(e.into()))?;

    Ok(ReplicaReport {
        seed,
        layout: layout.kinds,
        train_rows_digest: index_digest(&s.train_indices),
        test_rows_digest: index_digest(&s.test_indices),
        metrics,
        confusion_matrix: confusion,
    })
}

/// Summary of the dataset actually used, echoed into every report.
#[derive(Debug, Serialize)]
pub struct DatasetEcho {
    pub file: String,
    pub rows: usize,
    pub features: Vec<String>,
    pub classes: Vec<String>,
    pub class_counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_counts: Option<Vec<usize>>,
    pub normalization: NormalizationMode,
}

pub fn dataset_echo(section: &DatasetSection, loaded: &LoadedDataset) -> DatasetEcho {
    DatasetEcho {
        file: section.file.display().to_string(),
        rows: loaded.dataset.len(),
        features: loaded.dataset.feature_names.clone(),
        classes: loaded.dataset.class_names.clone(),
        class_counts: loaded.dataset.class_counts(),
        train_counts: section.train_counts.clone(),
        normalization: section.normalization,
    }
}
