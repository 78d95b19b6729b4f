//! Super learning for binary classification, and five ways to estimate how
//! well a super learner generalizes.
//!
//! A super learner stacks out-of-fold scores of several base learners into
//! level-one data and fits a combining rule on it. The library provides the
//! six base learners, six combiners (NNLS, non-negative logistic, mean,
//! best single, best-k mean, random forest) and the estimators: training
//! set, independent CV over level-one rows, bootstrap bias corrected CV,
//! nested CV, and new-data oracle for synthetic distributions.
//!
//! ```no_run
//! use stacksure::prelude::*;
//!
//! let cfg = GeneratorConfig::default();
//! let params = generate_params(&cfg, &RngStream::new(cfg.seed)).unwrap();
//! let data = sample_dataset(&params, 100, &RngStream::new(1)).unwrap();
//!
//! let learners = LearnerSet::from_specs(LearnerSpec::defaults());
//! let level_one = build_level_one(&learners, &data, 10, &RngStream::new(2)).unwrap();
//! let bbc = bbc_sl(&level_one, CombinerMethod::Nnls, 100, &RngStream::new(3)).unwrap();
//! println!("BBC estimate of NNLS super learner AUC: {:.3}", bbc.estimate);
//! ```

pub mod combiners;
pub mod dataset;
pub mod error;
pub mod features;
pub mod folds;
pub mod learners;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod synthdata;
pub mod validation;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::combiners::{apply_combiner, fit_combiner, CombinerMethod, CombinerModel, LevelOneData};
    pub use crate::dataset::Dataset;
    pub use crate::error::{Error, Result};
    pub use crate::folds::{split_folds, FoldAssignment};
    pub use crate::learners::{fit, Learner, LearnerKind, LearnerSet, LearnerSpec, Model};
    pub use crate::metrics::{auc, summarize, SummaryStat};
    pub use crate::rng::RngStream;
    pub use crate::synthdata::{generate_params, sample_dataset, GaussianClassParams, GeneratorConfig};
    pub use crate::validation::{
        bbc_sl, build_level_one, cv_predictions, independent_cv_estimate, nested_cv, new_data_estimate,
        super_learn, training_set_estimate, ProtocolConfig,
    };
}
