//! Flat `key = value` experiment configuration. See `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combiners::CombinerMethod;
use crate::error::{Error, Result};
use crate::learners::{LearnerKind, LearnerSpec};
use crate::synthdata::GeneratorConfig;
use crate::validation::{BbcAggregation, ProtocolConfig};

pub const ENV_PREFIX: &str = "STACKSURE_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMode {
    Synthetic,
    Csv,
}

/// One column of the result tables. The new-data oracle appears twice: trained
/// on the whole sample and on a stratified 90% subsample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    TrainingSet,
    IndependentCv,
    BbcSl,
    NestedCv,
    NewData100,
    NewData90,
}

impl Estimator {
    pub const ALL: [Estimator; 6] = [
        Estimator::TrainingSet,
        Estimator::IndependentCv,
        Estimator::BbcSl,
        Estimator::NestedCv,
        Estimator::NewData100,
        Estimator::NewData90,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::TrainingSet => "training_set",
            Estimator::IndependentCv => "independent_cv",
            Estimator::BbcSl => "bbc_sl",
            Estimator::NestedCv => "nested_cv",
            Estimator::NewData100 => "new_data_100",
            Estimator::NewData90 => "new_data_90",
        }
    }

    pub fn needs_oracle(self) -> bool {
        matches!(self, Estimator::NewData100 | Estimator::NewData90)
    }

    /// Parses one entry of the `estimators` list; `new_data` expands to both
    /// training fractions.
    pub fn expand(token: &str) -> Result<Vec<Estimator>> {
        if token == "new_data" {
            return Ok(vec![Estimator::NewData100, Estimator::NewData90]);
        }
        Ok(vec![token.parse()?])
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: DataMode,
    pub generator: GeneratorConfig,
    /// Rows per synthetic repeat.
    pub sample_size: usize,
    /// Fresh rows drawn for the new-data oracle.
    pub n_new: usize,
    /// Draw new class parameters in every repeat instead of sharing one set.
    pub fresh_params_per_repeat: bool,
    pub data_path: Option<PathBuf>,
    pub protocol: ProtocolConfig,
    pub repeats: usize,
    /// Expanded estimator list, sorted and without duplicates.
    pub estimators: Vec<Estimator>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub worker_count: usize,
    /// Leave `wall_time_ms` empty in `records.csv` and `report.json` so that
    /// reports are byte-identical across runs; timings go to `timings.csv`.
    pub deterministic_reports: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: DataMode::Synthetic,
            generator: GeneratorConfig::default(),
            sample_size: 100,
            n_new: 2000,
            fresh_params_per_repeat: false,
            data_path: None,
            protocol: ProtocolConfig::default(),
            repeats: 100,
            estimators: Estimator::ALL.to_vec(),
            master_seed: 1,
            output_dir: PathBuf::from("stacksure-out"),
            worker_count: 1,
            deterministic_reports: true,
        }
    }
}

const KEYS: &[&str] = &[
    "mode",
    "data_path",
    "repeats",
    "master_seed",
    "output_dir",
    "workers",
    "estimators",
    "deterministic_reports",
    "generator.p",
    "generator.signal_dims",
    "generator.mean_gap",
    "generator.correlation_strength",
    "generator.seed",
    "generator.sample_size",
    "generator.n_new",
    "generator.fresh_params_per_repeat",
    "protocol.k_outer",
    "protocol.k_inner",
    "protocol.bootstraps",
    "protocol.feature_m",
    "protocol.stratified",
    "protocol.combiners",
    "protocol.learners",
    "protocol.bbc_aggregation",
];

/// Every key the parser accepts, including per-learner hyperparameters.
pub fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = KEYS.iter().map(|k| k.to_string()).collect();
    for kind in LearnerKind::ALL {
        for (param, _) in kind.defaults() {
            keys.push(format!("learner.{kind}.{param}"));
        }
    }
    keys
}

/// `generator.mean_gap` -> `STACKSURE_GENERATOR_MEAN_GAP`.
pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_uppercase().replace('.', "_"))
}

/// Splits config text into `(key, value)` pairs. `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
        let key = key.trim().to_string();
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{value}'"))),
    }
}

fn parse_list<T>(key: &str, value: &str, item: impl Fn(&str) -> Result<Vec<T>>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for token in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        out.extend(item(token)?);
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Defaults overridden by `pairs`, later pairs winning.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut kinds: Vec<LearnerKind> = cfg.protocol.learners.iter().map(|s| s.kind).collect();
        let mut overrides: BTreeMap<(LearnerKind, String), f64> = BTreeMap::new();
        for (key, value) in pairs {
            let (key, value) = (key.as_str(), value.as_str());
            match key {
                "mode" => {
                    cfg.mode = match value {
                        "synthetic" => DataMode::Synthetic,
                        "csv" => DataMode::Csv,
                        _ => return Err(Error::Config(format!("mode: expected synthetic or csv, got '{value}'"))),
                    }
                }
                "data_path" => cfg.data_path = (!value.is_empty()).then(|| PathBuf::from(value)),
                "repeats" => cfg.repeats = parse_num(key, value)?,
                "master_seed" => cfg.master_seed = parse_num(key, value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "workers" => cfg.worker_count = parse_num(key, value)?,
                "estimators" => cfg.estimators = parse_list(key, value, Estimator::expand)?,
                "deterministic_reports" => cfg.deterministic_reports = parse_bool(key, value)?,
                "generator.p" => cfg.generator.p = parse_num(key, value)?,
                "generator.signal_dims" => cfg.generator.signal_dims = parse_num(key, value)?,
                "generator.mean_gap" => cfg.generator.mean_gap = parse_num(key, value)?,
                "generator.correlation_strength" => cfg.generator.correlation_strength = parse_num(key, value)?,
                "generator.seed" => cfg.generator.seed = parse_num(key, value)?,
                "generator.sample_size" => cfg.sample_size = parse_num(key, value)?,
                "generator.n_new" => cfg.n_new = parse_num(key, value)?,
                "generator.fresh_params_per_repeat" => cfg.fresh_params_per_repeat = parse_bool(key, value)?,
                "protocol.k_outer" => cfg.protocol.k_outer = parse_num(key, value)?,
                "protocol.k_inner" => cfg.protocol.k_inner = parse_num(key, value)?,
                "protocol.bootstraps" => cfg.protocol.bootstraps = parse_num(key, value)?,
                "protocol.feature_m" => cfg.protocol.feature_m = parse_num(key, value)?,
                "protocol.stratified" => cfg.protocol.stratified = parse_bool(key, value)?,
                "protocol.combiners" => cfg.protocol.combiners = parse_list(key, value, |t| Ok(vec![t.parse()?]))?,
                "protocol.learners" => kinds = parse_list(key, value, |t| Ok(vec![t.parse()?]))?,
                "protocol.bbc_aggregation" => {
                    cfg.protocol.bbc_aggregation = match value {
                        "mean" => BbcAggregation::Mean,
                        "pooled" => BbcAggregation::Pooled,
                        _ => return Err(Error::Config(format!("{key}: expected mean or pooled, got '{value}'"))),
                    }
                }
                _ => {
                    let rest = key
                        .strip_prefix("learner.")
                        .ok_or_else(|| Error::Config(format!("unknown key '{key}'")))?;
                    let (kind, param) = rest
                        .split_once('.')
                        .ok_or_else(|| Error::Config(format!("unknown key '{key}'")))?;
                    let kind: LearnerKind = kind.parse()?;
                    // validates the parameter name
                    LearnerSpec::new(kind).with(param, parse_num(key, value)?)?;
                    overrides.insert((kind, param.to_string()), parse_num(key, value)?);
                }
            }
        }
        cfg.protocol.learners = kinds
            .into_iter()
            .map(|kind| {
                overrides
                    .iter()
                    .filter(|((k, _), _)| *k == kind)
                    .try_fold(LearnerSpec::new(kind), |spec, ((_, p), &v)| spec.with(p, v))
            })
            .collect::<Result<_>>()?;
        cfg.estimators.sort_unstable();
        cfg.estimators.dedup();
        cfg.protocol.combiners.sort_unstable();
        cfg.protocol.combiners.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(parse_pairs(text)?)
    }

    /// Reads `path`, then applies `STACKSURE_*` overrides from `env`.
    pub fn load(path: &Path, env: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = parse_pairs(&text)?;
        let env: BTreeMap<String, String> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
        for key in known_keys() {
            if let Some(value) = env.get(&env_name(&key)) {
                pairs.retain(|(k, _)| *k != key);
                pairs.push((key, value.clone()));
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.worker_count < 1 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimators must not be empty".into()));
        }
        match self.mode {
            DataMode::Synthetic => {
                self.generator.validate()?;
                if self.sample_size < 2 {
                    return Err(Error::Config("generator.sample_size must be >= 2".into()));
                }
                if self.n_new < 2 && self.estimators.iter().any(|e| e.needs_oracle()) {
                    return Err(Error::Config("generator.n_new must be >= 2".into()));
                }
            }
            DataMode::Csv => {
                if self.data_path.is_none() {
                    return Err(Error::Config("csv mode needs data_path".into()));
                }
                if let Some(e) = self.estimators.iter().find(|e| e.needs_oracle()) {
                    return Err(Error::Config(format!("{e} needs the generating distribution (synthetic mode)")));
                }
            }
        }
        Ok(())
    }

    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let join = |items: Vec<String>| items.join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put(
            "mode",
            match self.mode {
                DataMode::Synthetic => "synthetic".into(),
                DataMode::Csv => "csv".into(),
            },
        );
        if let Some(p) = &self.data_path {
            put("data_path", p.display().to_string());
        }
        put("repeats", self.repeats.to_string());
        put("master_seed", self.master_seed.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("workers", self.worker_count.to_string());
        put("estimators", join(self.estimators.iter().map(|e| e.to_string()).collect()));
        put("deterministic_reports", self.deterministic_reports.to_string());
        put("generator.p", self.generator.p.to_string());
        put("generator.signal_dims", self.generator.signal_dims.to_string());
        put("generator.mean_gap", format!("{:?}", self.generator.mean_gap));
        put("generator.correlation_strength", format!("{:?}", self.generator.correlation_strength));
        put("generator.seed", self.generator.seed.to_string());
        put("generator.sample_size", self.sample_size.to_string());
        put("generator.n_new", self.n_new.to_string());
        put("generator.fresh_params_per_repeat", self.fresh_params_per_repeat.to_string());
        put("protocol.k_outer", self.protocol.k_outer.to_string());
        put("protocol.k_inner", self.protocol.k_inner.to_string());
        put("protocol.bootstraps", self.protocol.bootstraps.to_string());
        put("protocol.feature_m", self.protocol.feature_m.to_string());
        put("protocol.stratified", self.protocol.stratified.to_string());
        put("protocol.combiners", join(self.protocol.combiners.iter().map(|c| c.to_string()).collect()));
        put("protocol.learners", join(self.protocol.learners.iter().map(|l| l.kind.to_string()).collect()));
        put(
            "protocol.bbc_aggregation",
            match self.protocol.bbc_aggregation {
                BbcAggregation::Mean => "mean".into(),
                BbcAggregation::Pooled => "pooled".into(),
            },
        );
        for spec in &self.protocol.learners {
            for (param, value) in &spec.hyperparams {
                put(&format!("learner.{}.{param}", spec.kind), format!("{value:?}"));
            }
        }
        s
    }

    pub fn combiners(&self) -> &[CombinerMethod] {
        &self.protocol.combiners
    }
}
