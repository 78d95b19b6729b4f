//! Super learning: fit on one sample, score a fresh sample from the same
//! distribution, and compare with the best single learner.

use stacksure::prelude::*;
use stacksure::validation::SuperLearner;

fn main() -> Result<()> {
    let cfg = GeneratorConfig::default();
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let data = sample_dataset(&params, 100, &RngStream::new(1))?;
    let fresh = sample_dataset(&params, 2000, &RngStream::new(2))?;

    let learners = LearnerSet::from_specs(LearnerSpec::defaults());
    let sl = SuperLearner::fit(&learners, &CombinerMethod::ALL, &data, 10, true, &RngStream::new(3))?;
    println!("base-learner fits: {}", learners.fit_count());

    let base = sl.base_scores(fresh.features())?;
    for (j, name) in sl.level_one().learner_names().iter().enumerate() {
        println!("{name:<14} new-data AUC {:.3}", auc(&base.column(j).to_vec(), fresh.labels())?);
    }
    for (method, scores) in sl.methods().into_iter().zip(sl.score(fresh.features())?) {
        println!("SL {:<10} new-data AUC {:.3}", method.name(), auc(&scores?, fresh.labels())?);
    }

    let (_, scores) = super_learn(
        &learners,
        CombinerMethod::Nnls,
        &data,
        fresh.features(),
        &ProtocolConfig::default(),
        &RngStream::new(3),
    )?;
    println!("super_learn(nnls) agrees: AUC {:.3}", auc(&scores, fresh.labels())?);
    Ok(())
}
