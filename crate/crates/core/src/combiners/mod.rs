//! Second-level learning on out-of-fold base scores.

pub mod nnlog;
pub mod nnls;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::forest::{ForestParams, RandomForest};
use crate::learners::naive_bayes::logistic;
use crate::metrics::auc;
use crate::rng::RngStream;

pub use nnlog::{nnlog_solve, NnlogFit};
pub use nnls::nnls_solve;

/// Out-of-fold base-learner scores (one column per learner) plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelOneData {
    z: Array2<f64>,
    labels: Vec<u8>,
    learner_names: Vec<String>,
}

impl LevelOneData {
    pub fn new(z: Array2<f64>, labels: Vec<u8>, learner_names: Vec<String>) -> Result<Self> {
        if z.nrows() != labels.len() {
            return Err(Error::DimensionMismatch(format!("{} rows vs {} labels", z.nrows(), labels.len())));
        }
        if z.ncols() != learner_names.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns vs {} learner names",
                z.ncols(),
                learner_names.len()
            )));
        }
        if z.ncols() == 0 {
            return Err(Error::DimensionMismatch("level-one data needs at least one column".into()));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("level-one scores must be finite".into()));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::InvalidDataset("labels must be 0 or 1".into()));
        }
        Ok(LevelOneData { z, labels, learner_names })
    }

    pub fn z(&self) -> ArrayView2<'_, f64> {
        self.z.view()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn learner_names(&self) -> &[String] {
        &self.learner_names
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_learners(&self) -> usize {
        self.z.ncols()
    }

    /// Rows in the given order; indices may repeat (bootstrap bags).
    pub fn select_rows(&self, rows: &[usize]) -> LevelOneData {
        LevelOneData {
            z: self.z.select(Axis(0), rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            learner_names: self.learner_names.clone(),
        }
    }

    /// AUC of every column on these rows.
    pub fn column_aucs(&self) -> Result<Vec<f64>> {
        self.z
            .columns()
            .into_iter()
            .map(|c| auc(&c.to_vec(), &self.labels))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinerMethod {
    Nnls,
    Nnlog,
    Mean,
    Best1,
    Bestk,
    Rf,
}

impl CombinerMethod {
    pub const ALL: [CombinerMethod; 6] = [
        CombinerMethod::Nnls,
        CombinerMethod::Nnlog,
        CombinerMethod::Mean,
        CombinerMethod::Best1,
        CombinerMethod::Bestk,
        CombinerMethod::Rf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CombinerMethod::Nnls => "nnls",
            CombinerMethod::Nnlog => "nnlog",
            CombinerMethod::Mean => "mean",
            CombinerMethod::Best1 => "best1",
            CombinerMethod::Bestk => "bestk",
            CombinerMethod::Rf => "rf",
        }
    }
}

impl fmt::Display for CombinerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombinerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CombinerMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown combiner '{s}'")))
    }
}

/// A fitted combining rule.
#[derive(Debug, Clone)]
pub struct CombinerModel {
    pub method: CombinerMethod,
    /// Non-negative weights per learner; empty for `rf`.
    pub weights: Vec<f64>,
    /// Learners picked by `best1` / `bestk`.
    pub chosen: Vec<usize>,
    /// Logistic intercept for `nnlog`.
    pub intercept: Option<f64>,
    pub forest: Option<RandomForest>,
    /// Fallbacks and solver caps hit while fitting.
    pub warnings: Vec<String>,
}

impl CombinerModel {
    fn weighted(method: CombinerMethod, weights: Vec<f64>) -> Self {
        CombinerModel {
            method,
            weights,
            chosen: Vec::new(),
            intercept: None,
            forest: None,
            warnings: Vec::new(),
        }
    }

    fn mean(method: CombinerMethod, l: usize) -> Self {
        Self::weighted(method, vec![1.0 / l as f64; l])
    }

    /// Weights rescaled to sum to one (all-zero stays all-zero).
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 {
            self.weights.iter().map(|w| w / total).collect()
        } else {
            self.weights.clone()
        }
    }
}

/// Learner indices by decreasing AUC, ties to the lower index.
fn ranked_by_auc(l1: &LevelOneData) -> Result<Vec<usize>> {
    let aucs = l1.column_aucs()?;
    let mut order: Vec<usize> = (0..aucs.len()).collect();
    order.sort_by(|&a, &b| aucs[b].total_cmp(&aucs[a]).then(a.cmp(&b)));
    Ok(order)
}

fn weighted_scores(z: ArrayView2<f64>, weights: &[f64]) -> Vec<f64> {
    z.rows()
        .into_iter()
        .map(|row| row.iter().zip(weights).map(|(a, w)| a * w).sum())
        .collect()
}

pub fn fit_combiner(method: CombinerMethod, l1: &LevelOneData, stream: &RngStream) -> Result<CombinerModel> {
    let l = l1.n_learners();
    let z = l1.z();
    match method {
        CombinerMethod::Mean => Ok(CombinerModel::mean(method, l)),
        CombinerMethod::Best1 => {
            let best = ranked_by_auc(l1)?[0];
            let mut weights = vec![0.0; l];
            weights[best] = 1.0;
            let mut m = CombinerModel::weighted(method, weights);
            m.chosen = vec![best];
            Ok(m)
        }
        CombinerMethod::Bestk => {
            let order = ranked_by_auc(l1)?;
            let mut best: Option<(f64, usize, Vec<f64>)> = None;
            for k in 1..=l {
                let mut weights = vec![0.0; l];
                for &j in &order[..k] {
                    weights[j] = 1.0 / k as f64;
                }
                let a = auc(&weighted_scores(z, &weights), l1.labels())?;
                if best.as_ref().is_none_or(|(b, _, _)| a > *b) {
                    best = Some((a, k, weights));
                }
            }
            let (_, k, weights) = best.expect("at least one learner");
            let mut m = CombinerModel::weighted(method, weights);
            m.chosen = order[..k].to_vec();
            m.chosen.sort_unstable();
            Ok(m)
        }
        CombinerMethod::Nnls => {
            let y: Vec<f64> = l1.labels().iter().map(|&v| f64::from(v)).collect();
            let weights = nnls_solve(z, &y)?;
            if weights.iter().all(|&w| w == 0.0) {
                let mut m = CombinerModel::mean(method, l);
                m.warnings.push("nnls returned all-zero weights; fell back to the mean".into());
                return Ok(m);
            }
            Ok(CombinerModel::weighted(method, weights))
        }
        CombinerMethod::Nnlog => {
            let mut warnings = Vec::new();
            let (weights, intercept) = match nnlog_solve(z, l1.labels()) {
                Ok(fit) => (fit.weights, fit.intercept),
                Err(Error::IterationCap { iterations, mut last, .. }) => {
                    warnings.push(format!("nnlog stopped at the {iterations}-iteration cap; using the last iterate"));
                    let b = last.pop().expect("intercept in last iterate");
                    (last, b)
                }
                Err(e) => return Err(e),
            };
            if weights.iter().all(|&w| w == 0.0) {
                let mut m = CombinerModel::mean(method, l);
                m.warnings = warnings;
                m.warnings.push("nnlog returned all-zero slopes; fell back to the mean".into());
                return Ok(m);
            }
            let mut m = CombinerModel::weighted(method, weights);
            m.intercept = Some(intercept);
            m.warnings = warnings;
            Ok(m)
        }
        CombinerMethod::Rf => {
            if !l1.labels().contains(&0) || !l1.labels().contains(&1) {
                return Err(Error::SingleClass);
            }
            let forest = RandomForest::fit(z, l1.labels(), &ForestParams::default(), stream);
            Ok(CombinerModel {
                method,
                weights: Vec::new(),
                chosen: Vec::new(),
                intercept: None,
                forest: Some(forest),
                warnings: Vec::new(),
            })
        }
    }
}

pub fn apply_combiner(model: &CombinerModel, z_new: ArrayView2<f64>) -> Result<Vec<f64>> {
    if let Some(forest) = &model.forest {
        return Ok(forest.score(z_new));
    }
    if z_new.ncols() != model.weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "combiner expects {} columns, got {}",
            model.weights.len(),
            z_new.ncols()
        )));
    }
    let linear = weighted_scores(z_new, &model.weights);
    Ok(match model.intercept {
        Some(b) => linear.into_iter().map(|v| logistic(b + v)).collect(),
        None => linear,
    })
}
