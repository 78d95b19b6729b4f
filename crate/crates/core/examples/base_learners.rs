//! The six base learners behind one interface, scored by 10-fold CV.

use stacksure::prelude::*;
use stacksure::validation::cv_predictions;

fn main() -> Result<()> {
    let cfg = GeneratorConfig::default();
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let data = sample_dataset(&params, 100, &RngStream::new(1))?;
    let fresh = sample_dataset(&params, 1000, &RngStream::new(2))?;

    println!("{:<14} {:>8} {:>8} {:>8}", "learner", "train", "cv", "new");
    for spec in LearnerSpec::defaults() {
        let model = fit(&spec, &data, &RngStream::new(3))?;
        let train_auc = auc(&model.score(data.features())?, data.labels())?;
        let new_auc = auc(&model.score(fresh.features())?, fresh.labels())?;
        let cv_auc = auc(&cv_predictions(&spec, &data, 10, &RngStream::new(4))?, data.labels())?;
        println!("{:<14} {train_auc:>8.3} {cv_auc:>8.3} {new_auc:>8.3}", spec.kind.name());
    }

    // hyperparameters are validated per kind
    let knn5 = LearnerSpec::new(LearnerKind::Knn).with("k", 5.0)?;
    println!("{knn5:?}");
    println!("{:?}", LearnerSpec::new(LearnerKind::Knn).with("depth", 3.0).unwrap_err());
    Ok(())
}
