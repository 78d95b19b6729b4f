//! Welch t screening: rank columns by |t| computed on training rows only.

use ndarray::array;
use stacksure::features::{select_top, welch_t};
use stacksure::prelude::*;

fn main() -> Result<()> {
    let x = array![1.0, 2.0, 3.0, 2.0, 4.0, 6.0];
    let group = [0u8, 0, 0, 1, 1, 1];
    println!("t = {:.3}", welch_t(x.view(), &group)?);

    let cfg = GeneratorConfig {
        p: 50,
        signal_dims: 3,
        mean_gap: 1.5,
        correlation_strength: 0.0,
        seed: 5,
    };
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let data = sample_dataset(&params, 80, &RngStream::new(6))?;
    let ranking = select_top(&data, 5)?;

    let signal: Vec<usize> = (0..cfg.p).filter(|&j| params.mu1[j] != params.mu0[j]).collect();
    println!("signal columns: {signal:?}");
    for &j in &ranking.selected {
        println!("column {j:>2}  |t| = {:.2}", ranking.statistic[j]);
    }
    Ok(())
}
