//! Repeated experiments: every requested estimator and combiner on every
//! repeat, with the work spread over a thread pool.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combiners::{fit_combiner, CombinerMethod};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{summarize, SummaryStat};
use crate::rng::RngStream;
use crate::synthdata::{generate_params, sample_dataset, GaussianClassParams};
use crate::validation::{
    bbc_sl, build_level_one_with, independent_cv_estimate_with, nested_cv_multi, new_data_estimate_multi,
    training_set_estimate,
};

use super::config::{DataMode, Estimator, ExperimentConfig};
use super::csv_io::load_csv;

// Path labels under the master stream.
const REPEAT: u64 = 1;
const PARAMS: u64 = 2;
// Path labels under a repeat stream.
const DATA: u64 = 1;
const LEVEL1: u64 = 2;
const TRAINING: u64 = 3;
const INDEPENDENT: u64 = 4;
const BBC: u64 = 5;
const NESTED: u64 = 6;
const NEW_DATA: u64 = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub estimator: Estimator,
    pub combiner: CombinerMethod,
    pub repeat: usize,
    /// Seed of the repeat's stream.
    pub seed: u64,
    /// `None` when the estimate was undefined or failed.
    pub auc: Option<f64>,
    /// Compute time of this estimate. Nested CV and the new-data oracle share
    /// their base-learner work across combiners, so every combiner of one such
    /// task reports the whole task's time.
    pub wall_time_ms: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub estimator: Estimator,
    pub combiner: CombinerMethod,
    /// Over defined records only; `None` if there were none.
    pub stat: Option<SummaryStat>,
    pub undefined: usize,
}

/// Combiner fitted on a repeat's full level-one data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsEntry {
    pub repeat: usize,
    pub combiner: CombinerMethod,
    pub learners: Vec<String>,
    pub weights: Vec<f64>,
    pub normalized_weights: Vec<f64>,
    pub chosen: Vec<usize>,
    pub intercept: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskTiming {
    pub repeat: usize,
    pub task: String,
    pub wall_time_ms: f64,
    pub base_fits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    /// Config text that parses back to the run's configuration.
    pub config: String,
    pub learners: Vec<crate::learners::LearnerSpec>,
    pub timings: Vec<TaskTiming>,
    pub total_wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    /// Sorted by (estimator, combiner, repeat).
    pub records: Vec<EvaluationRecord>,
    pub summaries: Vec<SummaryRow>,
    pub weights_log: Vec<WeightsEntry>,
    pub metadata: RunMetadata,
}

/// Per (estimator, combiner) summary over the defined records, in record order.
pub fn summarize_records(records: &[EvaluationRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Estimator, CombinerMethod), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry((r.estimator, r.combiner)).or_default();
        match r.auc {
            Some(a) => entry.0.push(a),
            None => entry.1 += 1,
        }
    }
    groups
        .into_iter()
        .map(|((estimator, combiner), (values, undefined))| SummaryRow {
            estimator,
            combiner,
            stat: summarize(&values).ok(),
            undefined,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TaskKind {
    LevelOne,
    Nested,
    NewData,
}

impl TaskKind {
    fn name(self) -> &'static str {
        match self {
            TaskKind::LevelOne => "level_one",
            TaskKind::Nested => "nested_cv",
            TaskKind::NewData => "new_data",
        }
    }
}

struct TaskOutput {
    records: Vec<EvaluationRecord>,
    weights: Vec<WeightsEntry>,
    timings: Vec<TaskTiming>,
}

struct Source {
    params: Option<GaussianClassParams>,
    csv: Option<Dataset>,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let started = Instant::now();
    let master = RngStream::new(cfg.master_seed);
    let source = match cfg.mode {
        DataMode::Synthetic => Source {
            params: if cfg.fresh_params_per_repeat {
                None
            } else {
                Some(generate_params(&cfg.generator, &RngStream::new(cfg.generator.seed))?)
            },
            csv: None,
        },
        DataMode::Csv => Source {
            params: None,
            csv: Some(load_csv(cfg.data_path.as_deref().expect("validated"))?),
        },
    };

    let wants = |e: Estimator| cfg.estimators.contains(&e);
    let mut kinds = Vec::new();
    if wants(Estimator::TrainingSet) || wants(Estimator::IndependentCv) || wants(Estimator::BbcSl) {
        kinds.push(TaskKind::LevelOne);
    }
    if wants(Estimator::NestedCv) {
        kinds.push(TaskKind::Nested);
    }
    if wants(Estimator::NewData100) || wants(Estimator::NewData90) {
        kinds.push(TaskKind::NewData);
    }
    let tasks: Vec<(usize, TaskKind)> = (0..cfg.repeats)
        .flat_map(|r| kinds.iter().map(move |&k| (r, k)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.worker_count)))?;
    let outputs: Vec<Result<TaskOutput>> =
        pool.install(|| tasks.par_iter().map(|&(r, kind)| run_task(cfg, &source, &master, r, kind)).collect());

    let mut records = Vec::new();
    let mut weights_log = Vec::new();
    let mut timings = Vec::new();
    for out in outputs {
        let out = out?;
        records.extend(out.records);
        weights_log.extend(out.weights);
        timings.extend(out.timings);
    }
    records.sort_by_key(|r| (r.estimator, r.combiner, r.repeat));
    weights_log.sort_by_key(|w| (w.repeat, w.combiner));
    timings.sort_by(|a, b| (a.repeat, &a.task).cmp(&(b.repeat, &b.task)));

    Ok(ReportBundle {
        summaries: summarize_records(&records),
        records,
        weights_log,
        metadata: RunMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.to_text(),
            learners: cfg.protocol.learners.clone(),
            timings,
            total_wall_time_ms: ms(started),
        },
    })
}

/// The dataset and distribution of repeat `r`.
fn repeat_data(
    cfg: &ExperimentConfig,
    source: &Source,
    master: &RngStream,
    r: usize,
) -> Result<(Dataset, Option<GaussianClassParams>)> {
    if let Some(d) = &source.csv {
        return Ok((d.clone(), None));
    }
    let params = match &source.params {
        Some(p) => p.clone(),
        None => generate_params(&cfg.generator, &master.child(PARAMS).child(r as u64))?,
    };
    let stream = master.child(REPEAT).child(r as u64);
    let data = sample_dataset(&params, cfg.sample_size, &stream.child(DATA))?;
    Ok((data, Some(params)))
}

/// The dataset of repeat `r` of a synthetic run, as `gen` exports it.
pub fn synthetic_dataset(cfg: &ExperimentConfig, r: usize) -> Result<Dataset> {
    let master = RngStream::new(cfg.master_seed);
    let source = Source {
        params: if cfg.fresh_params_per_repeat {
            None
        } else {
            Some(generate_params(&cfg.generator, &RngStream::new(cfg.generator.seed))?)
        },
        csv: None,
    };
    Ok(repeat_data(cfg, &source, &master, r)?.0)
}

fn record<E: std::fmt::Display>(
    estimator: Estimator,
    combiner: CombinerMethod,
    repeat: usize,
    seed: u64,
    result: std::result::Result<f64, E>,
    wall_time_ms: f64,
) -> EvaluationRecord {
    let (auc, note) = match result {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    };
    EvaluationRecord {
        estimator,
        combiner,
        repeat,
        seed,
        auc,
        wall_time_ms,
        note,
    }
}

fn run_task(cfg: &ExperimentConfig, source: &Source, master: &RngStream, r: usize, kind: TaskKind) -> Result<TaskOutput> {
    let started = Instant::now();
    let stream = master.child(REPEAT).child(r as u64);
    let seed = stream.seed();
    let (data, params) = repeat_data(cfg, source, master, r)?;
    let set = cfg.protocol.learner_set();
    let combiners = cfg.combiners();
    let wants = |e: Estimator| cfg.estimators.contains(&e);
    let mut out = TaskOutput {
        records: Vec::new(),
        weights: Vec::new(),
        timings: Vec::new(),
    };

    match kind {
        TaskKind::LevelOne => {
            let level_one = build_level_one_with(&set, &data, cfg.protocol.k_inner, cfg.protocol.stratified, &stream.child(LEVEL1));
            out.timings.push(TaskTiming {
                repeat: r,
                task: "level_one_build".into(),
                wall_time_ms: ms(started),
                base_fits: set.fit_count(),
            });
            let level_one = match level_one {
                Ok(l1) => l1,
                Err(e) => {
                    let note = e.to_string();
                    for est in [Estimator::TrainingSet, Estimator::IndependentCv, Estimator::BbcSl] {
                        if wants(est) {
                            for &c in combiners {
                                out.records
                                    .push(record(est, c, r, seed, Err(note.clone()), 0.0));
                            }
                        }
                    }
                    return Ok(out);
                }
            };
            for &c in combiners {
                let fit = fit_combiner(c, &level_one, &stream.child(TRAINING).child(c as u64));
                out.weights.push(match fit {
                    Ok(m) => WeightsEntry {
                        repeat: r,
                        combiner: c,
                        learners: level_one.learner_names().to_vec(),
                        normalized_weights: m.normalized_weights(),
                        weights: m.weights,
                        chosen: m.chosen,
                        intercept: m.intercept,
                        warnings: m.warnings,
                        error: None,
                    },
                    Err(e) => WeightsEntry {
                        repeat: r,
                        combiner: c,
                        learners: level_one.learner_names().to_vec(),
                        weights: Vec::new(),
                        normalized_weights: Vec::new(),
                        chosen: Vec::new(),
                        intercept: None,
                        warnings: Vec::new(),
                        error: Some(e.to_string()),
                    },
                });
                if wants(Estimator::TrainingSet) {
                    let t = Instant::now();
                    let a = training_set_estimate(&level_one, c, &stream.child(TRAINING).child(c as u64));
                    out.records.push(record(Estimator::TrainingSet, c, r, seed, a, ms(t)));
                }
                if wants(Estimator::IndependentCv) {
                    let t = Instant::now();
                    let a = independent_cv_estimate_with(
                        &level_one,
                        c,
                        cfg.protocol.k_outer,
                        cfg.protocol.stratified,
                        &stream.child(INDEPENDENT).child(c as u64),
                    );
                    out.records.push(record(Estimator::IndependentCv, c, r, seed, a, ms(t)));
                }
                if wants(Estimator::BbcSl) {
                    let t = Instant::now();
                    let a = bbc_sl(&level_one, c, cfg.protocol.bootstraps, &stream.child(BBC).child(c as u64))
                        .and_then(|o| o.value(cfg.protocol.bbc_aggregation));
                    out.records.push(record(Estimator::BbcSl, c, r, seed, a, ms(t)));
                }
            }
        }
        TaskKind::Nested => {
            let results = nested_cv_multi(&set, combiners, &data, &cfg.protocol, &stream.child(NESTED));
            let elapsed = ms(started);
            match results {
                Ok(per) => {
                    for (&c, res) in combiners.iter().zip(per) {
                        out.records
                            .push(record(Estimator::NestedCv, c, r, seed, res.map(|o| o.auc), elapsed));
                    }
                }
                Err(e) => {
                    let note = e.to_string();
                    for &c in combiners {
                        out.records.push(record(
                            Estimator::NestedCv,
                            c,
                            r,
                            seed,
                            Err(note.clone()),
                            elapsed,
                        ));
                    }
                }
            }
        }
        TaskKind::NewData => {
            for (est, fraction) in [(Estimator::NewData100, 1.0), (Estimator::NewData90, 0.9)] {
                if !wants(est) {
                    continue;
                }
                let t = Instant::now();
                let results = new_data_estimate_multi(
                    &set,
                    combiners,
                    &data,
                    params.as_ref(),
                    cfg.n_new,
                    fraction,
                    &cfg.protocol,
                    &stream.child(NEW_DATA),
                );
                let elapsed = ms(t);
                match results {
                    Ok(per) => {
                        for (&c, res) in combiners.iter().zip(per) {
                            out.records.push(record(est, c, r, seed, res, elapsed));
                        }
                    }
                    Err(e) => {
                        let note = e.to_string();
                        for &c in combiners {
                            out.records
                                .push(record(est, c, r, seed, Err(note.clone()), elapsed));
                        }
                    }
                }
            }
        }
    }
    if kind != TaskKind::LevelOne {
        out.timings.push(TaskTiming {
            repeat: r,
            task: kind.name().into(),
            wall_time_ms: ms(started),
            base_fits: set.fit_count(),
        });
    }
    Ok(out)
}
