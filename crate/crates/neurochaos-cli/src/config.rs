//! Experiment configuration: JSON or TOML file plus flag overrides.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use neurochaos::chaos::DEFAULT_CAP;
use neurochaos::layer::LayoutScheme;

use crate::CliError;

/// On-disk configuration shape. Every field is optional so one schema serves
/// all subcommands; each command validates the sections it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset: Option<DatasetSection>,
    pub architecture: Option<ArchitectureSection>,
    /// Sweep only: evaluated in order, outer loop of the cell grid.
    pub architectures: Option<Vec<ArchitectureSection>>,
    pub classifier: Option<ClassifierSection>,
    /// Sweep only: inner loop of the cell grid.
    pub classifiers: Option<Vec<ClassifierSection>>,
    pub hyperparams: Option<HyperparamsSection>,
    /// Tune only; omitting it selects the built-in search space.
    pub grid: Option<GridSection>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub cap: Option<usize>,
    pub folds: Option<usize>,
    /// Scale firing time by the cap and energy by the trace length
    /// (default). Reproductions of the published scores switch this off.
    pub normalize_features: Option<bool>,
    pub out: Option<PathBuf>,
    pub lowsample: Option<LowsampleSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub file: PathBuf,
    #[serde(default = "default_true")]
    pub has_header: bool,
    /// Header name of the label column; omitted means the last column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    /// Per-class training-row counts (class ids follow sorted class names).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_counts: Option<Vec<usize>>,
    #[serde(default)]
    pub normalization: NormalizationMode,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Min-max over the full dataset before splitting.
    #[default]
    Global,
    /// Min-max fitted on training rows only; test cells clamp into [0,1].
    TrainOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    HomogeneousGls,
    HomogeneousLogistic,
    OddEven,
    RandomHeterogeneous,
}

impl SchemeName {
    pub fn to_layout(self) -> LayoutScheme {
        match self {
            SchemeName::HomogeneousGls => LayoutScheme::HomogeneousGls,
            SchemeName::HomogeneousLogistic => LayoutScheme::HomogeneousLogistic,
            SchemeName::OddEven => LayoutScheme::OddEven,
            SchemeName::RandomHeterogeneous => LayoutScheme::RandomHeterogeneous,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSection {
    pub scheme: SchemeName,
    /// Required for `random-heterogeneous`, ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proportion_logistic: Option<f64>,
    /// Sweep convenience: per-architecture hyperparameter override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl ArchitectureSection {
    /// The logistic proportion actually used (0 for fixed schemes).
    pub fn proportion(&self) -> Result<f64, CliError> {
        match (self.scheme, self.proportion_logistic) {
            (SchemeName::RandomHeterogeneous, Some(p)) if (0.0..=1.0).contains(&p) => Ok(p),
            (SchemeName::RandomHeterogeneous, Some(p)) => Err(CliError::usage(format!(
                "architecture.proportion_logistic {p} not in [0,1]"
            ))),
            (SchemeName::RandomHeterogeneous, None) => Err(CliError::usage(
                "architecture.proportion_logistic is required for random-heterogeneous",
            )),
            (_, _) => Ok(self.proportion_logistic.unwrap_or(0.0)),
        }
    }

    pub fn hyperparams_override(&self) -> Result<Option<HyperparamsSection>, CliError> {
        match (self.q, self.b, self.epsilon) {
            (Some(q), Some(b), Some(epsilon)) => Ok(Some(HyperparamsSection { q, b, epsilon })),
            (None, None, None) => Ok(None),
            _ => Err(CliError::usage(
                "architecture hyperparameter override must set all of q, b, epsilon",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Cosine,
    Knn,
    Gnb,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSection {
    pub kind: ClassifierKind,
    /// Neighbour count; required for `knn`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        ClassifierSection {
            kind: ClassifierKind::Cosine,
            k: None,
        }
    }
}

impl ClassifierSection {
    pub fn validate(&self) -> Result<(), CliError> {
        match (self.kind, self.k) {
            (ClassifierKind::Knn, None) => Err(CliError::usage("classifier knn requires k")),
            (ClassifierKind::Knn, Some(0)) => Err(CliError::usage("classifier.k must be >= 1")),
            (ClassifierKind::Cosine | ClassifierKind::Gnb, Some(_)) => {
                Err(CliError::usage("classifier.k only applies to knn"))
            }
            _ => Ok(()),
        }
    }

    /// Stable text form used in sweep CSV rows.
    pub fn name(&self) -> String {
        match (self.kind, self.k) {
            (ClassifierKind::Knn, Some(k)) => format!("knn{k}"),
            (ClassifierKind::Knn, None) => "knn".into(),
            (ClassifierKind::Cosine, _) => "cosine".into(),
            (ClassifierKind::Gnb, _) => "gnb".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HyperparamsSection {
    pub q: f64,
    pub b: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub q: Vec<f64>,
    pub b: Vec<f64>,
    pub epsilon: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LowsampleSection {
    #[serde(default = "default_per_class_max")]
    pub per_class_max: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl Default for LowsampleSection {
    fn default() -> Self {
        LowsampleSection {
            per_class_max: default_per_class_max(),
            trials: default_trials(),
        }
    }
}

fn default_per_class_max() -> usize {
    15
}

fn default_trials() -> usize {
    10
}

/// Common flag overrides shared by the config-driven subcommands.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub cap: Option<usize>,
}

/// Fully resolved settings after merging file values, flags, and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub file: ConfigFile,
    pub seed: u64,
    pub seeds: usize,
    pub cap: usize,
    pub folds: usize,
    pub normalize_features: bool,
    pub out: PathBuf,
}

pub fn load(
    path: &Path,
    overrides: Overrides,
    out_flag: Option<&Path>,
) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let file: ConfigFile = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        Some("toml") => toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        _ => {
            return Err(CliError::usage(format!(
                "{}: config must be a .json or .toml file",
                path.display()
            )))
        }
    };

    let seed = overrides.seed.or(file.seed).unwrap_or(42);
    let seeds = overrides.seeds.or(file.seeds).unwrap_or(1);
    let cap = overrides.cap.or(file.cap).unwrap_or(DEFAULT_CAP);
    let folds = file.folds.unwrap_or(5);
    let normalize_features = file.normalize_features.unwrap_or(true);
    let out = out_flag
        .map(Path::to_path_buf)
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    if seeds == 0 {
        return Err(CliError::usage("seeds must be >= 1"));
    }
    if cap == 0 {
        return Err(CliError::usage("cap must be >= 1"));
    }
    if folds < 2 {
        return Err(CliError::usage("folds must be >= 2"));
    }

    Ok(Settings {
        file,
        seed,
        seeds,
        cap,
        folds,
        normalize_features,
        out,
    })
}

impl Settings {
    pub fn dataset(&self) -> Result<&DatasetSection, CliError> {
        self.file
            .dataset
            .as_ref()
            .ok_or_else(|| CliError::usage("config needs a [dataset] section"))
    }

    pub fn architecture(&self) -> Result<&ArchitectureSection, CliError> {
        self.file
            .architecture
            .as_ref()
            .ok_or_else(|| CliError::usage("config needs an [architecture] section"))
    }

    pub fn hyperparams(&self) -> Result<HyperparamsSection, CliError> {
        self.file
            .hyperparams
            .ok_or_else(|| CliError::usage("config needs a [hyperparams] section (q, b, epsilon)"))
    }

    pub fn classifier(&self) -> Result<ClassifierSection, CliError> {
        let c = self.file.classifier.clone().unwrap_or_default();
        c.validate()?;
        Ok(c)
    }
}
