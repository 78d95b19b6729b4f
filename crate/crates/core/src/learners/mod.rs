//! The six base classifiers behind one fit/score surface.
//!
//! Every learner screens features on its own training rows first (Welch t,
//! top `feature_m` columns) and scores only those columns afterwards.

pub mod adaboost;
pub mod forest;
pub mod knn;
pub mod lasso;
pub mod naive_bayes;
pub mod svm;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{select_top, FeatureRanking, DEFAULT_TOP_M};
use crate::rng::{label, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    RandomForest,
    Lasso,
    Svm,
    Adaboost,
    NaiveBayes,
    Knn,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 6] = [
        LearnerKind::RandomForest,
        LearnerKind::Lasso,
        LearnerKind::Svm,
        LearnerKind::Adaboost,
        LearnerKind::NaiveBayes,
        LearnerKind::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Lasso => "lasso",
            LearnerKind::Svm => "svm",
            LearnerKind::Adaboost => "adaboost",
            LearnerKind::NaiveBayes => "naive_bayes",
            LearnerKind::Knn => "knn",
        }
    }

    /// Documented hyperparameters and their defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            LearnerKind::RandomForest => &[("trees", 100.0), ("min_split", 2.0)],
            LearnerKind::Lasso => &[("lambda_ratio", 0.05), ("tol", 1e-7), ("max_sweeps", 10_000.0)],
            LearnerKind::Svm => &[("c", 1.0), ("epochs", 200.0)],
            LearnerKind::Adaboost => &[("rounds", 100.0)],
            LearnerKind::NaiveBayes => &[("var_floor", 1e-9)],
            LearnerKind::Knn => &[("k", 10.0)],
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown learner '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub hyperparams: BTreeMap<String, f64>,
    /// Columns kept by Welch screening before fitting.
    pub feature_m: usize,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        let hyperparams = kind
            .defaults()
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect();
        LearnerSpec {
            kind,
            hyperparams,
            feature_m: DEFAULT_TOP_M,
        }
    }

    /// All six kinds with default settings.
    pub fn defaults() -> Vec<LearnerSpec> {
        LearnerKind::ALL.into_iter().map(LearnerSpec::new).collect()
    }

    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        if !self.kind.defaults().iter().any(|&(k, _)| k == key) {
            return Err(Error::Config(format!("'{key}' is not a hyperparameter of {}", self.kind)));
        }
        if !value.is_finite() {
            return Err(Error::Config(format!("{}.{key} must be finite", self.kind)));
        }
        self.hyperparams.insert(key.to_string(), value);
        Ok(self)
    }

    pub fn with_feature_m(mut self, m: usize) -> Self {
        self.feature_m = m;
        self
    }

    fn param(&self, key: &str) -> f64 {
        self.hyperparams
            .get(key)
            .copied()
            .or_else(|| self.kind.defaults().iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
            .expect("hyperparameter documented for this kind")
    }

    fn count_param(&self, key: &str) -> Result<usize> {
        let v = self.param(key);
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!("{}.{key} must be a positive integer, got {v}", self.kind)));
        }
        Ok(v as usize)
    }
}

/// A fitted model that turns feature rows into class-1 scores.
pub trait Model: Send + Sync {
    fn score(&self, x: ArrayView2<f64>) -> Result<Vec<f64>>;
}

/// Anything that can be trained into a [`Model`].
pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    /// Stable identifier mixed into random streams, so identical learners
    /// see identical randomness.
    fn fingerprint(&self) -> u64 {
        label(&self.name())
    }

    fn fit(&self, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>>;
}

#[derive(Debug, Clone)]
pub(crate) enum ModelState {
    RandomForest(forest::RandomForest),
    Lasso(lasso::LassoModel),
    Svm(svm::LinearSvm),
    Adaboost(adaboost::AdaBoost),
    NaiveBayes(naive_bayes::GaussianNb),
    Knn(knn::Knn),
}

#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: LearnerSpec,
    pub selected_features: FeatureRanking,
    n_columns: usize,
    state: ModelState,
}

impl FittedModel {
    pub fn n_columns(&self) -> usize {
        self.n_columns
    }

    /// Intercept and per-selected-column slopes on the raw feature scale, for
    /// the linear kinds.
    pub fn linear_coefficients(&self) -> Option<(f64, Vec<f64>)> {
        match &self.state {
            ModelState::Lasso(m) => Some(m.raw_coefficients()),
            ModelState::Svm(m) => Some(m.raw_coefficients()),
            _ => None,
        }
    }

    pub fn score(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_columns {
            return Err(Error::DimensionMismatch(format!(
                "model trained on {} columns, got {}",
                self.n_columns,
                x.ncols()
            )));
        }
        let screened = x.select(Axis(1), &self.selected_features.selected);
        let scores = match &self.state {
            ModelState::RandomForest(m) => m.score(screened.view()),
            ModelState::Lasso(m) => m.score(screened.view()),
            ModelState::Svm(m) => m.score(screened.view()),
            ModelState::Adaboost(m) => m.score(screened.view()),
            ModelState::NaiveBayes(m) => m.score(screened.view()),
            ModelState::Knn(m) => m.score(screened.view()),
        };
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        Ok(scores)
    }
}

impl Model for FittedModel {
    fn score(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        FittedModel::score(self, x)
    }
}

pub fn fit(spec: &LearnerSpec, train: &Dataset, stream: &RngStream) -> Result<FittedModel> {
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let ranking = select_top(train, spec.feature_m)?;
    let x: Array2<f64> = train.features().select(Axis(1), &ranking.selected);
    let y = train.labels();
    let state = match spec.kind {
        LearnerKind::RandomForest => ModelState::RandomForest(forest::RandomForest::fit(
            x.view(),
            y,
            &forest::ForestParams {
                trees: spec.count_param("trees")?,
                min_split: spec.count_param("min_split")?,
                mtry: None,
            },
            stream,
        )),
        LearnerKind::Lasso => ModelState::Lasso(lasso::LassoModel::fit(
            x.view(),
            y,
            spec.param("lambda_ratio"),
            spec.param("tol"),
            spec.count_param("max_sweeps")?,
        )?),
        LearnerKind::Svm => ModelState::Svm(svm::LinearSvm::fit(
            x.view(),
            y,
            spec.param("c"),
            spec.count_param("epochs")?,
            stream,
        )?),
        LearnerKind::Adaboost => {
            ModelState::Adaboost(adaboost::AdaBoost::fit(x.view(), y, spec.count_param("rounds")?))
        }
        LearnerKind::NaiveBayes => {
            ModelState::NaiveBayes(naive_bayes::GaussianNb::fit(x.view(), y, spec.param("var_floor")))
        }
        LearnerKind::Knn => ModelState::Knn(knn::Knn::fit(x.view(), y, spec.count_param("k")?)),
    };
    Ok(FittedModel {
        spec: spec.clone(),
        selected_features: ranking,
        n_columns: train.p(),
        state,
    })
}

impl Learner for LearnerSpec {
    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn fingerprint(&self) -> u64 {
        let mut key = format!("{}|m={}", self.kind, self.feature_m);
        for (k, v) in &self.hyperparams {
            key.push_str(&format!("|{k}={:016x}", v.to_bits()));
        }
        label(&key)
    }

    fn fit(&self, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>> {
        Ok(Box::new(fit(self, train, stream)?))
    }
}

/// The base learners of one super learner, with an instrumented fit counter.
pub struct LearnerSet {
    learners: Vec<Box<dyn Learner>>,
    fits: AtomicUsize,
}

impl LearnerSet {
    pub fn new(learners: Vec<Box<dyn Learner>>) -> Self {
        LearnerSet {
            learners,
            fits: AtomicUsize::new(0),
        }
    }

    pub fn from_specs(specs: impl IntoIterator<Item = LearnerSpec>) -> Self {
        Self::new(specs.into_iter().map(|s| Box::new(s) as Box<dyn Learner>).collect())
    }

    pub fn len(&self) -> usize {
        self.learners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learners.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.learners.iter().map(|l| l.name()).collect()
    }

    pub fn get(&self, i: usize) -> &dyn Learner {
        self.learners[i].as_ref()
    }

    /// Number of base-learner fits performed through this set so far.
    pub fn fit_count(&self) -> usize {
        self.fits.load(Ordering::Relaxed)
    }

    pub fn reset_fit_count(&self) {
        self.fits.store(0, Ordering::Relaxed);
    }

    pub fn fit(&self, i: usize, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>> {
        self.fits.fetch_add(1, Ordering::Relaxed);
        self.learners[i].fit(train, stream)
    }
}

impl fmt::Debug for LearnerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LearnerSet")
            .field("learners", &self.names())
            .field("fits", &self.fit_count())
            .finish()
    }
}

/// Column-wise mean and standard deviation; zero-variance columns get sd 0.
pub(crate) fn column_moments(x: ArrayView2<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = x.nrows() as f64;
    let mut mean = Vec::with_capacity(x.ncols());
    let mut sd = Vec::with_capacity(x.ncols());
    for col in x.columns() {
        let m = col.sum() / n;
        let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        mean.push(m);
        sd.push(var.sqrt());
    }
    (mean, sd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::auc;
    use crate::synthdata::{generate_params, sample_dataset, GeneratorConfig};

    fn separable(n: usize, seed: u64) -> Dataset {
        let cfg = GeneratorConfig {
            p: 20,
            signal_dims: 5,
            mean_gap: 3.0,
            correlation_strength: 0.0,
            seed,
        };
        let params = generate_params(&cfg, &RngStream::new(seed)).unwrap();
        sample_dataset(&params, n, &RngStream::new(seed).child(1)).unwrap()
    }

    #[test]
    fn hyperparameter_keys_are_checked() {
        assert!(LearnerSpec::new(LearnerKind::Knn).with("k", 3.0).is_ok());
        assert!(LearnerSpec::new(LearnerKind::Knn).with("trees", 3.0).is_err());
        assert_eq!("naive_bayes".parse::<LearnerKind>().unwrap(), LearnerKind::NaiveBayes);
        assert!("gbm".parse::<LearnerKind>().is_err());
    }

    #[test]
    fn every_kind_fits_and_ranks_training_data() {
        let d = separable(60, 3);
        for spec in LearnerSpec::defaults() {
            let spec = spec.with_feature_m(10);
            let m = fit(&spec, &d, &RngStream::new(1)).unwrap();
            let s = m.score(d.features()).unwrap();
            assert_eq!(s.len(), d.n());
            assert!(s.iter().all(|v| v.is_finite()));
            let a = auc(&s, d.labels()).unwrap();
            assert!(a >= 0.5, "{}: training AUC {a}", spec.kind);
        }
    }

    #[test]
    fn fits_are_deterministic() {
        let d = separable(40, 5);
        let probe = separable(15, 6);
        for spec in LearnerSpec::defaults() {
            let a = fit(&spec, &d, &RngStream::new(9)).unwrap();
            let b = fit(&spec, &d, &RngStream::new(9)).unwrap();
            assert_eq!(a.score(probe.features()).unwrap(), b.score(probe.features()).unwrap());
        }
    }

    #[test]
    fn unselected_columns_are_never_read() {
        let d = separable(40, 7);
        let probe = separable(15, 8);
        for spec in LearnerSpec::defaults() {
            let spec = spec.with_feature_m(5);
            let m = fit(&spec, &d, &RngStream::new(2)).unwrap();
            let base = m.score(probe.features()).unwrap();
            let mut altered = probe.features().to_owned();
            for j in 0..d.p() {
                if !m.selected_features.selected.contains(&j) {
                    altered.column_mut(j).fill(1e6);
                }
            }
            assert_eq!(base, m.score(altered.view()).unwrap(), "{}", spec.kind);
        }
    }

    #[test]
    fn column_mismatch_and_single_class() {
        let d = separable(30, 1);
        let m = fit(&LearnerSpec::new(LearnerKind::Knn), &d, &RngStream::new(0)).unwrap();
        assert!(m.score(Array2::zeros((2, 3)).view()).is_err());
        let one = d.select_rows(&(0..d.n()).filter(|&i| d.labels()[i] == 1).collect::<Vec<_>>()).unwrap();
        assert!(matches!(
            fit(&LearnerSpec::new(LearnerKind::Lasso), &one, &RngStream::new(0)),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn set_counts_fits() {
        let d = separable(30, 2);
        let set = LearnerSet::from_specs([LearnerSpec::new(LearnerKind::Knn), LearnerSpec::new(LearnerKind::NaiveBayes)]);
        set.fit(0, &d, &RngStream::new(0)).unwrap();
        set.fit(1, &d, &RngStream::new(0)).unwrap();
        assert_eq!(set.fit_count(), 2);
        set.reset_fit_count();
        assert_eq!(set.fit_count(), 0);
    }
}
