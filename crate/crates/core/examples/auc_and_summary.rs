//! AUC with tied scores and the mean ± standard-error summary used in reports.

use stacksure::prelude::*;

fn main() -> Result<()> {
    let labels = [0u8, 1, 1, 0];
    let scores = [0.2, 0.8, 0.4, 0.6];
    println!("AUC = {}", auc(&scores, &labels)?);

    // ties between a positive and a negative count one half
    println!("AUC of constant scores = {}", auc(&[0.5; 4], &labels)?);

    match auc(&[0.1, 0.2], &[1, 1]) {
        Err(Error::UndefinedAuc) => println!("single-class labels: undefined"),
        other => println!("unexpected: {other:?}"),
    }

    let repeats = [0.6, 0.7, 0.8];
    let s = summarize(&repeats)?;
    println!("mean {:.3}, se {:.5}, sd {:.3}, n {}", s.mean, s.se_of_mean, s.sd(), s.count);
    Ok(())
}
