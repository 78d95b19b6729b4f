//! A small repeated experiment driven by a config string, with reports
//! written to a temporary directory.

use stacksure::runner::{emit_report, run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::parse(
        "repeats = 3
         master_seed = 42
         generator.p = 50
         estimators = training_set, bbc_sl, nested_cv, new_data
         protocol.k_outer = 5
         protocol.k_inner = 5
         protocol.combiners = nnls, mean, best1
         protocol.learners = lasso, naive_bayes, knn",
    )?;
    let bundle = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join("stacksure-experiment");
    for path in emit_report(&bundle, &dir, cfg.deterministic_reports)? {
        println!("wrote {}", path.display());
    }
    print!("{}", std::fs::read_to_string(dir.join("summary.csv"))?);
    Ok(())
}
