//! Configuration ingestion: TOML model files, flag overrides, and the
//! fully resolved run description that gets hashed into every output.

use std::fs;
use std::path::Path;

use mfzeta::measures::IfsModel;
use mfzeta::statistics::WordStatistic;
use mfzeta::symbolic::GramTable;
use mfzeta::targets::Target;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{AppError, CommonArgs};

/// On-disk model file. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub seed: Option<u64>,
    pub model: ModelSection,
    pub statistic: Option<StatisticSection>,
    pub defaults: Option<DefaultsSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub ratios: Vec<f64>,
    pub probs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// Experiment parameters that make more sense in the file than on the
/// command line; flags still override each one.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsSection {
    pub target: Option<String>,
    pub radii: Option<Vec<f64>>,
    pub levels: Option<Vec<usize>>,
    pub deltas: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub max_len: Option<usize>,
    pub mode: Option<String>,
    pub family: Option<String>,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_steps: Option<usize>,
}

/// Everything a run depends on, with all defaults materialized. The JSON
/// serialization of this struct is the input to the config hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub model: ModelSection,
    pub statistic: StatisticSection,
    pub seed: u64,
    pub target: Option<String>,
    pub radii: Vec<f64>,
    pub levels: Vec<usize>,
    pub deltas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub max_len: usize,
    pub mode: String,
    pub family: String,
    pub q_min: f64,
    pub q_max: f64,
    pub q_steps: usize,
}

impl RunConfig {
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        hex::encode(hasher.finalize())
    }

    /// First entry of the radius ladder: the filter radius of the
    /// single-radius commands.
    pub fn radius(&self) -> f64 {
        self.radii.first().copied().unwrap_or(0.0)
    }

    /// Deepest level of the ladder.
    pub fn top_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(400)
    }

    pub fn q_grid(&self) -> Vec<f64> {
        let steps = self.q_steps.max(1);
        (0..=steps)
            .map(|i| self.q_min + (self.q_max - self.q_min) * i as f64 / steps as f64)
            .collect()
    }
}

/// The constructed domain objects behind a [`RunConfig`].
pub struct Runtime {
    pub model: IfsModel,
    pub stat: WordStatistic,
    pub target: Option<Target>,
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, AppError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| AppError::Config(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

pub fn load(command: &str, args: &CommonArgs) -> Result<(RunConfig, Runtime), AppError> {
    let raw = fs::read_to_string(&args.model).map_err(|e| {
        AppError::Config(format!("cannot read model file {}: {e}", args.model.display()))
    })?;
    let file: ModelFile = toml::from_str(&raw)
        .map_err(|e| AppError::Config(format!("model file: {e}")))?;
    let defaults = file.defaults.unwrap_or_default();

    let statistic = file.statistic.unwrap_or(StatisticSection {
        kind: "ratio".into(),
        window: None,
        values: None,
    });

    let radii = match &args.radius {
        Some(raw) => parse_list(raw, "radius")?,
        None => defaults.radii.unwrap_or_default(),
    };
    let levels = match &args.levels {
        Some(raw) => parse_list(raw, "levels")?,
        None => defaults.levels.unwrap_or_else(|| vec![400]),
    };
    let deltas = match &args.deltas {
        Some(raw) => parse_list(raw, "deltas")?,
        None => defaults
            .deltas
            .unwrap_or_else(|| (8..=16).map(|k| 0.5f64.powi(k)).collect()),
    };

    let config = RunConfig {
        command: command.to_string(),
        model: file.model,
        statistic,
        seed: args.seed.or(file.seed).unwrap_or(0),
        target: args.target.clone().or(defaults.target),
        radii,
        levels,
        deltas,
        s: args.s.or(defaults.s),
        max_len: args.max_len.or(defaults.max_len).unwrap_or(16),
        mode: args.mode.clone().or(defaults.mode).unwrap_or_else(|| "fixed".into()),
        family: args
            .family
            .clone()
            .or(defaults.family)
            .unwrap_or_else(|| "bernoulli".into()),
        q_min: defaults.q_min.unwrap_or(-10.0),
        q_max: defaults.q_max.unwrap_or(10.0),
        q_steps: defaults.q_steps.unwrap_or(200),
    };

    let model = IfsModel::new(config.model.ratios.clone(), config.model.probs.clone())?;
    let stat = build_statistic(&config.statistic, &model)?;
    let target = config
        .target
        .as_deref()
        .map(str::parse::<Target>)
        .transpose()?;

    Ok((config, Runtime { model, stat, target }))
}

fn build_statistic(section: &StatisticSection, model: &IfsModel) -> Result<WordStatistic, AppError> {
    match section.kind.as_str() {
        "ratio" => {
            if section.window.is_some() || section.values.is_some() {
                return Err(AppError::Config(
                    "statistic kind \"ratio\" takes no window or values".into(),
                ));
            }
            Ok(WordStatistic::ratio(model))
        }
        "birkhoff" => {
            let window = section.window.ok_or_else(|| {
                AppError::Config("statistic kind \"birkhoff\" needs a window".into())
            })?;
            let values = section.values.clone().ok_or_else(|| {
                AppError::Config("statistic kind \"birkhoff\" needs a values table".into())
            })?;
            let table = GramTable::new(values, window, model.num_maps() as u8)?;
            Ok(WordStatistic::birkhoff(table))
        }
        other => Err(AppError::Config(format!(
            "unknown statistic kind {other:?} (expected \"ratio\" or \"birkhoff\")"
        ))),
    }
}

/// Writes `contents` under `dir/name`, creating the directory if needed.
pub fn write_output(dir: &Path, name: &str, contents: &[u8]) -> Result<std::path::PathBuf, AppError> {
    fs::create_dir_all(dir)
        .map_err(|e| AppError::Numeric(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| AppError::Numeric(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
