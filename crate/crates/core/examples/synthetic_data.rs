//! Two-class Gaussian data from one fixed distribution, CSV export and reload.

use stacksure::prelude::*;
use stacksure::runner::{export_csv, load_csv};
use stacksure::synthdata::cholesky;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = ndarray::array![[4.0, 2.0], [2.0, 3.0]];
    println!("cholesky of [[4,2],[2,3]] = {}", cholesky(s.view())?);

    let cfg = GeneratorConfig {
        p: 20,
        signal_dims: 4,
        mean_gap: 1.0,
        correlation_strength: 0.3,
        seed: 11,
    };
    let params = generate_params(&cfg, &RngStream::new(cfg.seed))?;
    let gap: Vec<f64> = (&params.mu1 - &params.mu0).iter().copied().filter(|d| *d != 0.0).collect();
    println!("nonzero mean differences: {gap:?}");

    // Same parameters, independent streams: two samples of one distribution.
    let train = sample_dataset(&params, 200, &RngStream::new(1))?;
    let fresh = sample_dataset(&params, 200, &RngStream::new(2))?;
    println!("train class counts {:?}, fresh class counts {:?}", train.class_counts(), fresh.class_counts());

    let dir = std::env::temp_dir().join("stacksure-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("train.csv");
    export_csv(&train, &path)?;
    let back = load_csv(&path)?;
    println!(
        "wrote {} and read back {}x{}, identical: {}",
        path.display(),
        back.n(),
        back.p(),
        back.features() == train.features() && back.labels() == train.labels()
    );
    Ok(())
}
