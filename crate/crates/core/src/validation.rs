//! Performance estimation for super learners: out-of-fold predictions,
//! super learning itself, nested CV, bootstrap bias corrected CV over the
//! level-one data, independent CV over level-one rows, the training-set
//! estimate, and the new-data oracle for synthetic distributions.
//!
//! Every entry point reorders its input rows by content before drawing any
//! random numbers and maps results back afterwards, so outputs depend on the
//! data and the stream, never on the order rows were supplied in.

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combiners::{apply_combiner, fit_combiner, CombinerMethod, CombinerModel, LevelOneData};
use crate::dataset::{canonical_row_order, Dataset};
use crate::error::{Error, Result};
use crate::features::DEFAULT_TOP_M;
use crate::folds::{split_folds, stratified_subsample};
use crate::learners::{Learner, LearnerSet, LearnerSpec, Model};
use crate::metrics::auc;
use crate::rng::RngStream;
use crate::synthdata::{sample_dataset, GaussianClassParams};

// Path labels under a protocol's stream.
const SPLIT: u64 = 1;
const FOLDS: u64 = 2;
const FIT: u64 = 3;
const LEVEL1: u64 = 4;
const COMBINER: u64 = 5;
const BOOT: u64 = 6;
const SUBSAMPLE: u64 = 7;
const SUPER: u64 = 8;
const NEW_DATA: u64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BbcAggregation {
    /// Mean of the per-iteration out-of-bag AUCs.
    #[default]
    Mean,
    /// One AUC over all out-of-bag predictions concatenated.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub k_outer: usize,
    pub k_inner: usize,
    /// Bootstrap iterations for BBC.
    pub bootstraps: usize,
    pub feature_m: usize,
    pub stratified: bool,
    pub combiners: Vec<CombinerMethod>,
    pub learners: Vec<LearnerSpec>,
    pub bbc_aggregation: BbcAggregation,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            k_outer: 10,
            k_inner: 10,
            bootstraps: 100,
            feature_m: DEFAULT_TOP_M,
            stratified: true,
            combiners: CombinerMethod::ALL.to_vec(),
            learners: LearnerSpec::defaults(),
            bbc_aggregation: BbcAggregation::Mean,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_outer < 2 || self.k_inner < 2 {
            return Err(Error::Config(format!(
                "fold counts must be >= 2 (k_outer = {}, k_inner = {})",
                self.k_outer, self.k_inner
            )));
        }
        if self.bootstraps < 1 {
            return Err(Error::Config("protocol.bootstraps must be >= 1".into()));
        }
        if self.feature_m < 1 {
            return Err(Error::Config("protocol.feature_m must be >= 1".into()));
        }
        if self.combiners.is_empty() {
            return Err(Error::Config("at least one combiner is required".into()));
        }
        if self.learners.is_empty() {
            return Err(Error::Config("at least one learner is required".into()));
        }
        Ok(())
    }

    /// The configured learners with `feature_m` applied, behind a fit counter.
    pub fn learner_set(&self) -> LearnerSet {
        LearnerSet::from_specs(self.learners.iter().cloned().map(|s| s.with_feature_m(self.feature_m)))
    }
}

/// Uniform access to "learner j" for a set or a single learner.
trait Bank: Sync {
    fn size(&self) -> usize;
    fn name(&self, j: usize) -> String;
    fn fingerprint(&self, j: usize) -> u64;
    fn fit(&self, j: usize, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>>;
}

impl Bank for LearnerSet {
    fn size(&self) -> usize {
        self.len()
    }
    fn name(&self, j: usize) -> String {
        self.get(j).name()
    }
    fn fingerprint(&self, j: usize) -> u64 {
        self.get(j).fingerprint()
    }
    fn fit(&self, j: usize, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>> {
        LearnerSet::fit(self, j, train, stream)
    }
}

struct Single<'a>(&'a dyn Learner);

impl Bank for Single<'_> {
    fn size(&self) -> usize {
        1
    }
    fn name(&self, _: usize) -> String {
        self.0.name()
    }
    fn fingerprint(&self, _: usize) -> u64 {
        self.0.fingerprint()
    }
    fn fit(&self, _: usize, train: &Dataset, stream: &RngStream) -> Result<Box<dyn Model>> {
        self.0.fit(train, stream)
    }
}

fn names(bank: &dyn Bank) -> Vec<String> {
    (0..bank.size()).map(|j| bank.name(j)).collect()
}

// Identical learners fitted on identical data get identical streams.
fn fit_stream(stream: &RngStream, fingerprint: u64) -> RngStream {
    stream.child(FIT).child(fingerprint)
}

fn canonical(data: &Dataset) -> Result<(Vec<usize>, Dataset)> {
    let order = data.canonical_order();
    let canon = data.select_rows(&order)?;
    Ok((order, canon))
}

fn canonical_level_one(l1: &LevelOneData) -> LevelOneData {
    l1.select_rows(&canonical_row_order(l1.z(), l1.labels()))
}

fn restore_rows(order: &[usize], canon: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(canon.raw_dim());
    for (ci, &oi) in order.iter().enumerate() {
        out.row_mut(oi).assign(&canon.row(ci));
    }
    out
}

fn restore(order: &[usize], canon: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; canon.len()];
    for (ci, &oi) in order.iter().enumerate() {
        out[oi] = canon[ci];
    }
    out
}

/// Out-of-fold scores of every learner on canonically ordered data, with one
/// split shared by all learners.
fn out_of_fold(bank: &dyn Bank, canon: &Dataset, k: usize, stratified: bool, stream: &RngStream) -> Result<Array2<f64>> {
    let n = canon.n();
    let folds = split_folds(n, canon.labels(), k, stratified, &stream.child(SPLIT))?;
    let mut z = Array2::zeros((n, bank.size()));
    for f in 0..k {
        let test = folds.test_rows(f);
        let train = canon.select_rows(&folds.train_rows(f))?;
        let test_x = canon.features().select(Axis(0), &test);
        let fold_stream = stream.child(FOLDS).child(f as u64);
        for j in 0..bank.size() {
            let model = bank.fit(j, &train, &fit_stream(&fold_stream, bank.fingerprint(j)))?;
            let scores = model.score(test_x.view())?;
            for (&row, s) in test.iter().zip(scores) {
                z[[row, j]] = s;
            }
        }
    }
    Ok(z)
}

/// Out-of-fold scores of one learner under a stratified `k`-fold split.
pub fn cv_predictions(learner: &dyn Learner, data: &Dataset, k: usize, stream: &RngStream) -> Result<Vec<f64>> {
    cv_predictions_with(learner, data, k, true, stream)
}

pub fn cv_predictions_with(
    learner: &dyn Learner,
    data: &Dataset,
    k: usize,
    stratified: bool,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let (order, canon) = canonical(data)?;
    let z = out_of_fold(&Single(learner), &canon, k, stratified, stream)?;
    Ok(restore(&order, &z.column(0).to_vec()))
}

/// Level-one data: out-of-fold scores of every learner in the set, one shared
/// stratified split, rows in input order.
pub fn build_level_one(learners: &LearnerSet, data: &Dataset, k: usize, stream: &RngStream) -> Result<LevelOneData> {
    build_level_one_with(learners, data, k, true, stream)
}

pub fn build_level_one_with(
    learners: &LearnerSet,
    data: &Dataset,
    k: usize,
    stratified: bool,
    stream: &RngStream,
) -> Result<LevelOneData> {
    let (order, canon) = canonical(data)?;
    let z = out_of_fold(learners, &canon, k, stratified, stream)?;
    LevelOneData::new(restore_rows(&order, &z), data.labels().to_vec(), names(learners))
}

/// A fitted super learner: base learners refitted on all training rows plus
/// one or more combiners fitted on the level-one data.
pub struct SuperLearner {
    base: Vec<Box<dyn Model>>,
    level_one: LevelOneData,
    combiners: Vec<(CombinerMethod, Result<CombinerModel>)>,
}

impl SuperLearner {
    pub fn fit(
        learners: &LearnerSet,
        methods: &[CombinerMethod],
        data: &Dataset,
        k_inner: usize,
        stratified: bool,
        stream: &RngStream,
    ) -> Result<SuperLearner> {
        Self::fit_bank(learners, methods, data, k_inner, stratified, stream)
    }

    fn fit_bank(
        bank: &dyn Bank,
        methods: &[CombinerMethod],
        data: &Dataset,
        k_inner: usize,
        stratified: bool,
        stream: &RngStream,
    ) -> Result<SuperLearner> {
        let (order, canon) = canonical(data)?;
        let z = out_of_fold(bank, &canon, k_inner, stratified, &stream.child(LEVEL1))?;
        let l1 = LevelOneData::new(z, canon.labels().to_vec(), names(bank))?;
        let combiners = methods
            .iter()
            .map(|&m| (m, fit_combiner(m, &l1, &stream.child(COMBINER).child(m as u64))))
            .collect();
        let base = (0..bank.size())
            .map(|j| bank.fit(j, &canon, &fit_stream(stream, bank.fingerprint(j))))
            .collect::<Result<Vec<_>>>()?;
        let level_one = LevelOneData::new(
            restore_rows(&order, &l1.z().to_owned()),
            data.labels().to_vec(),
            l1.learner_names().to_vec(),
        )?;
        Ok(SuperLearner {
            base,
            level_one,
            combiners,
        })
    }

    /// Level-one data the combiners were fitted on, rows in input order.
    pub fn level_one(&self) -> &LevelOneData {
        &self.level_one
    }

    pub fn combiner(&self, method: CombinerMethod) -> Option<&Result<CombinerModel>> {
        self.combiners.iter().find(|(m, _)| *m == method).map(|(_, c)| c)
    }

    pub fn methods(&self) -> Vec<CombinerMethod> {
        self.combiners.iter().map(|(m, _)| *m).collect()
    }

    /// Refitted base-learner scores on `x`, one column per learner.
    pub fn base_scores(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let mut z = Array2::zeros((x.nrows(), self.base.len()));
        for (j, model) in self.base.iter().enumerate() {
            let s = model.score(x)?;
            z.column_mut(j).assign(&ndarray::Array1::from(s));
        }
        Ok(z)
    }

    /// Ensemble scores on `x` for every combiner, in fit order.
    pub fn score(&self, x: ArrayView2<f64>) -> Result<Vec<Result<Vec<f64>>>> {
        let z = self.base_scores(x)?;
        Ok(self
            .combiners
            .iter()
            .map(|(m, c)| match c {
                Ok(model) => apply_combiner(model, z.view()),
                Err(e) => Err(Error::CombinerFailed {
                    method: m.to_string(),
                    message: e.to_string(),
                }),
            })
            .collect())
    }
}

/// Super learning with one combiner: fit on `data`, score `new_x`.
pub fn super_learn(
    learners: &LearnerSet,
    method: CombinerMethod,
    data: &Dataset,
    new_x: ArrayView2<f64>,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<(SuperLearner, Vec<f64>)> {
    let sl = SuperLearner::fit(learners, &[method], data, cfg.k_inner, cfg.stratified, stream)?;
    let scores = sl.score(new_x)?.pop().expect("one combiner")?;
    Ok((sl, scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedOutcome {
    /// Held-out ensemble score of every row, in input order.
    pub scores: Vec<f64>,
    pub auc: f64,
}

pub fn nested_cv(
    learners: &LearnerSet,
    method: CombinerMethod,
    data: &Dataset,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<NestedOutcome> {
    nested_cv_multi(learners, &[method], data, cfg, stream)?
        .pop()
        .expect("one combiner")
}

/// Nested CV for several combiners at once. The base-learner work of every
/// outer fold is shared, so the fit count is `L * k_outer * (k_inner + 1)`
/// whatever the number of combiners.
pub fn nested_cv_multi(
    learners: &LearnerSet,
    methods: &[CombinerMethod],
    data: &Dataset,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<Vec<Result<NestedOutcome>>> {
    nested_bank(learners, methods, data, cfg, stream)
}

fn nested_bank(
    bank: &dyn Bank,
    methods: &[CombinerMethod],
    data: &Dataset,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<Vec<Result<NestedOutcome>>> {
    let (order, canon) = canonical(data)?;
    let n = canon.n();
    let outer = split_folds(n, canon.labels(), cfg.k_outer, cfg.stratified, &stream.child(SPLIT))?;
    let mut scores = vec![vec![0.0; n]; methods.len()];
    let mut failures: Vec<Option<Error>> = methods.iter().map(|_| None).collect();
    for f in 0..cfg.k_outer {
        let test = outer.test_rows(f);
        let train = canon.select_rows(&outer.train_rows(f))?;
        let sl = SuperLearner::fit_bank(
            bank,
            methods,
            &train,
            cfg.k_inner,
            cfg.stratified,
            &stream.child(FOLDS).child(f as u64),
        )?;
        let test_x = canon.features().select(Axis(0), &test);
        for (m, out) in sl.score(test_x.view())?.into_iter().enumerate() {
            match out {
                Ok(s) => {
                    for (&row, v) in test.iter().zip(s) {
                        scores[m][row] = v;
                    }
                }
                Err(e) => {
                    failures[m].get_or_insert(e);
                }
            }
        }
    }
    Ok(scores
        .into_iter()
        .zip(failures)
        .map(|(s, failure)| match failure {
            Some(e) => Err(e),
            None => {
                let scores = restore(&order, &s);
                let auc = auc(&scores, data.labels())?;
                Ok(NestedOutcome { scores, auc })
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbcOutcome {
    /// Out-of-bag AUC of every iteration that was not skipped.
    pub aucs: Vec<f64>,
    /// Iterations whose bag or out-of-bag set held a single class.
    pub skipped: usize,
    /// Mean of `aucs`.
    pub estimate: f64,
    pub percentile_2_5: f64,
    pub percentile_97_5: f64,
    /// AUC over all out-of-bag predictions concatenated.
    pub pooled: Option<f64>,
}

impl BbcOutcome {
    pub fn value(&self, aggregation: BbcAggregation) -> Result<f64> {
        match aggregation {
            BbcAggregation::Mean => Ok(self.estimate),
            BbcAggregation::Pooled => self.pooled.ok_or(Error::UndefinedAuc),
        }
    }
}

/// Linear interpolation between order statistics.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn both_classes(labels: impl Iterator<Item = u8>) -> bool {
    let (mut zero, mut one) = (false, false);
    for y in labels {
        if y == 0 {
            zero = true;
        } else {
            one = true;
        }
    }
    zero && one
}

/// Bootstrap bias corrected estimate: refit only the combiner on bootstrap
/// bags of the level-one rows and score the out-of-bag rows.
pub fn bbc_sl(l1: &LevelOneData, method: CombinerMethod, bootstraps: usize, stream: &RngStream) -> Result<BbcOutcome> {
    if bootstraps < 1 {
        return Err(Error::Config("bootstrap count must be >= 1".into()));
    }
    let l1 = canonical_level_one(l1);
    let n = l1.n();
    let mut aucs = Vec::with_capacity(bootstraps);
    let mut skipped = 0;
    let mut pooled_scores = Vec::new();
    let mut pooled_labels = Vec::new();
    for b in 0..bootstraps {
        let s = stream.child(BOOT).child(b as u64);
        let mut rng = s.rng();
        let mut in_bag = vec![false; n];
        let bag: Vec<usize> = (0..n)
            .map(|_| {
                let r = rng.random_range(0..n);
                in_bag[r] = true;
                r
            })
            .collect();
        let oob: Vec<usize> = (0..n).filter(|&i| !in_bag[i]).collect();
        let labels = l1.labels();
        if !both_classes(bag.iter().map(|&i| labels[i])) || !both_classes(oob.iter().map(|&i| labels[i])) {
            skipped += 1;
            continue;
        }
        let model = fit_combiner(method, &l1.select_rows(&bag), &s.child(COMBINER))?;
        let held = l1.select_rows(&oob);
        let scores = apply_combiner(&model, held.z())?;
        aucs.push(auc(&scores, held.labels())?);
        pooled_scores.extend(scores);
        pooled_labels.extend_from_slice(held.labels());
    }
    if aucs.is_empty() {
        return Err(Error::AllBootstrapsSkipped(bootstraps));
    }
    let estimate = aucs.iter().sum::<f64>() / aucs.len() as f64;
    let mut sorted = aucs.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(BbcOutcome {
        percentile_2_5: percentile(&sorted, 0.025),
        percentile_97_5: percentile(&sorted, 0.975),
        pooled: auc(&pooled_scores, &pooled_labels).ok(),
        aucs,
        skipped,
        estimate,
    })
}

/// Stratified `k`-fold CV over level-one rows, refitting only the combiner.
pub fn independent_cv_estimate(l1: &LevelOneData, method: CombinerMethod, k: usize, stream: &RngStream) -> Result<f64> {
    independent_cv_estimate_with(l1, method, k, true, stream)
}

pub fn independent_cv_estimate_with(
    l1: &LevelOneData,
    method: CombinerMethod,
    k: usize,
    stratified: bool,
    stream: &RngStream,
) -> Result<f64> {
    let l1 = canonical_level_one(l1);
    let folds = split_folds(l1.n(), l1.labels(), k, stratified, &stream.child(SPLIT))?;
    let mut scores = vec![0.0; l1.n()];
    for f in 0..k {
        let test = folds.test_rows(f);
        let model = fit_combiner(
            method,
            &l1.select_rows(&folds.train_rows(f)),
            &stream.child(FOLDS).child(f as u64),
        )?;
        let s = apply_combiner(&model, l1.select_rows(&test).z())?;
        for (&row, v) in test.iter().zip(s) {
            scores[row] = v;
        }
    }
    auc(&scores, l1.labels())
}

/// AUC of the combiner on the same level-one rows it was fitted on.
pub fn training_set_estimate(l1: &LevelOneData, method: CombinerMethod, stream: &RngStream) -> Result<f64> {
    let l1 = canonical_level_one(l1);
    let model = fit_combiner(method, &l1, &stream.child(COMBINER))?;
    auc(&apply_combiner(&model, l1.z())?, l1.labels())
}

/// New-data oracle: super learning on `train_fraction` of `data` (stratified
/// subsample), scored on `n_new` fresh rows from the generating distribution.
#[allow(clippy::too_many_arguments)]
pub fn new_data_estimate(
    learners: &LearnerSet,
    method: CombinerMethod,
    data: &Dataset,
    params: Option<&GaussianClassParams>,
    n_new: usize,
    train_fraction: f64,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<f64> {
    new_data_estimate_multi(learners, &[method], data, params, n_new, train_fraction, cfg, stream)?
        .pop()
        .expect("one combiner")
}

/// The new-data oracle for several combiners sharing one super-learner fit.
/// The fresh sample and the fitting streams do not depend on `train_fraction`.
#[allow(clippy::too_many_arguments)]
pub fn new_data_estimate_multi(
    learners: &LearnerSet,
    methods: &[CombinerMethod],
    data: &Dataset,
    params: Option<&GaussianClassParams>,
    n_new: usize,
    train_fraction: f64,
    cfg: &ProtocolConfig,
    stream: &RngStream,
) -> Result<Vec<Result<f64>>> {
    let params = params.ok_or(Error::OracleUnavailable)?;
    if params.p() != data.p() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} features, data has {}",
            params.p(),
            data.p()
        )));
    }
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Config(format!("train fraction must be in (0, 1], got {train_fraction}")));
    }
    let (_, canon) = canonical(data)?;
    let train = if train_fraction == 1.0 {
        canon
    } else {
        canon.select_rows(&stratified_subsample(canon.labels(), train_fraction, &stream.child(SUBSAMPLE)))?
    };
    let sl = SuperLearner::fit(learners, methods, &train, cfg.k_inner, cfg.stratified, &stream.child(SUPER))?;
    let fresh = sample_dataset(params, n_new, &stream.child(NEW_DATA))?;
    Ok(sl
        .score(fresh.features())?
        .into_iter()
        .map(|s| s.and_then(|s| auc(&s, fresh.labels())))
        .collect())
}
