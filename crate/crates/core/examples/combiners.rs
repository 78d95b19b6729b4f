//! Level-one data and the six combining rules, including raw NNLS.

use stacksure::combiners::{nnlog_solve, nnls_solve};
use stacksure::prelude::*;

fn main() -> Result<()> {
    let z = ndarray::array![[1.0, 0.0], [0.0, 1.0]];
    println!("nnls(I, [1, -1]) = {:?}", nnls_solve(z.view(), &[1.0, -1.0])?);

    let cfg = GeneratorConfig::default();
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let data = sample_dataset(&params, 100, &RngStream::new(1))?;
    let learners = LearnerSet::from_specs(LearnerSpec::defaults());
    let level_one = build_level_one(&learners, &data, 10, &RngStream::new(2))?;
    println!("level-one data {:?} from {} fits", level_one.z().dim(), learners.fit_count());
    for (name, a) in level_one.learner_names().iter().zip(level_one.column_aucs()?) {
        println!("  {name:<14} out-of-fold AUC {a:.3}");
    }

    let fit_ = nnlog_solve(level_one.z(), level_one.labels())?;
    println!("nnlog converged in {} iterations, intercept {:.3}", fit_.iterations, fit_.intercept);

    for method in CombinerMethod::ALL {
        let model = fit_combiner(method, &level_one, &RngStream::new(3))?;
        let weights: Vec<String> = model.normalized_weights().iter().map(|w| format!("{w:.2}")).collect();
        println!(
            "{:<6} weights [{}] chosen {:?} warnings {:?}",
            method.name(),
            weights.join(", "),
            model.chosen,
            model.warnings
        );
    }
    Ok(())
}
