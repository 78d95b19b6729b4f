//! The five performance estimates of one super learner on one dataset, and
//! what BBC saves compared with nested CV.

use std::time::Instant;

use stacksure::prelude::*;
use stacksure::validation::new_data_estimate;

fn main() -> Result<()> {
    let cfg = GeneratorConfig::default();
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let data = sample_dataset(&params, 100, &RngStream::new(1))?;
    let protocol = ProtocolConfig::default();
    let learners = protocol.learner_set();
    let method = CombinerMethod::Best1;

    let t = Instant::now();
    let level_one = build_level_one(&learners, &data, protocol.k_inner, &RngStream::new(2))?;
    println!("level-one build: {} fits, {:.2} s", learners.fit_count(), t.elapsed().as_secs_f64());

    let training = training_set_estimate(&level_one, method, &RngStream::new(3))?;
    let independent = independent_cv_estimate(&level_one, method, protocol.k_outer, &RngStream::new(4))?;
    learners.reset_fit_count();
    let t = Instant::now();
    let bbc = bbc_sl(&level_one, method, protocol.bootstraps, &RngStream::new(5))?;
    let bbc_time = t.elapsed().as_secs_f64();
    let bbc_fits = learners.fit_count();

    let t = Instant::now();
    let nested = nested_cv(&learners, method, &data, &protocol, &RngStream::new(6))?;
    let nested_time = t.elapsed().as_secs_f64();
    let nested_fits = learners.fit_count() - bbc_fits;

    let oracle = new_data_estimate(&learners, method, &data, Some(&params), 2000, 1.0, &protocol, &RngStream::new(7))?;

    println!("training set    {training:.3}");
    println!("independent CV  {independent:.3}");
    println!(
        "BBC             {:.3}  (95% of bootstraps in [{:.3}, {:.3}], {} fits, {:.3} s)",
        bbc.estimate, bbc.percentile_2_5, bbc.percentile_97_5, bbc_fits, bbc_time
    );
    println!(
        "nested CV       {:.3}  ({} fits, {:.2} s)",
        nested.auc,
        nested_fits, nested_time
    );
    println!("new data        {oracle:.3}");
    Ok(())
}
