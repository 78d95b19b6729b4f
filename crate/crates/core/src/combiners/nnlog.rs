//! Logistic regression with non-negative slopes and a free intercept, by
//! projected gradient descent with backtracking.

use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::learners::naive_bayes::logistic;

pub const GRADIENT_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlogFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
}

fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

struct Problem<'a> {
    z: ArrayView2<'a, f64>,
    y: &'a [u8],
}

impl Problem<'_> {
    fn linear(&self, w: &[f64], b: f64) -> Vec<f64> {
        self.z
            .rows()
            .into_iter()
            .map(|row| b + row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>())
            .collect()
    }

    /// Mean negative log-likelihood.
    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let eta = self.linear(w, b);
        eta.iter()
            .zip(self.y)
            .map(|(&e, &yi)| log1p_exp(e) - f64::from(yi) * e)
            .sum::<f64>()
            / self.y.len() as f64
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.y.len() as f64;
        let eta = self.linear(w, b);
        let resid: Vec<f64> = eta.iter().zip(self.y).map(|(&e, &yi)| logistic(e) - f64::from(yi)).collect();
        let gw = self
            .z
            .columns()
            .into_iter()
            .map(|col| col.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / n)
            .collect();
        (gw, resid.iter().sum::<f64>() / n)
    }
}

fn projected_gradient_norm(w: &[f64], gw: &[f64], gb: f64) -> f64 {
    w.iter()
        .zip(gw)
        .map(|(&wj, &gj)| if wj <= 0.0 && gj > 0.0 { 0.0 } else { gj.abs() })
        .fold(gb.abs(), f64::max)
}

/// Stops when the projected gradient's infinity norm drops below 1e-6.
/// Hitting [`MAX_ITERATIONS`] returns [`Error::IterationCap`] whose `last`
/// holds the slopes followed by the intercept.
pub fn nnlog_solve(z: ArrayView2<f64>, y: &[u8]) -> Result<NnlogFit> {
    let (n, l) = z.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} rows vs {} labels", y.len())));
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    if n1 == 0 || n1 == n {
        return Err(Error::SingleClass);
    }
    let problem = Problem { z, y };
    let mut w = vec![0.0; l];
    let mut b = (n1 as f64 / (n - n1) as f64).ln();
    let mut f = problem.loss(&w, b);
    let mut step = 1.0;

    for iteration in 0..MAX_ITERATIONS {
        let (gw, gb) = problem.gradient(&w, b);
        if projected_gradient_norm(&w, &gw, gb) < GRADIENT_TOL {
            return Ok(NnlogFit { weights: w, intercept: b, iterations: iteration });
        }
        step *= 2.0;
        loop {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wj, gj)| (wj - step * gj).max(0.0)).collect();
            let b_new = b - step * gb;
            let f_new = problem.loss(&w_new, b_new);
            let dw: Vec<f64> = w_new.iter().zip(&w).map(|(a, c)| a - c).collect();
            let db = b_new - b;
            let linear_term = dw.iter().zip(&gw).map(|(d, g)| d * g).sum::<f64>() + db * gb;
            let quad = (dw.iter().map(|d| d * d).sum::<f64>() + db * db) / (2.0 * step);
            if f_new <= f + linear_term + quad || step < 1e-16 {
                w = w_new;
                b = b_new;
                f = f_new;
                break;
            }
            step *= 0.5;
        }
    }
    let mut last = w;
    last.push(b);
    Err(Error::IterationCap {
        solver: "nnlog",
        iterations: MAX_ITERATIONS,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::auc;
    use crate::rng::RngStream;
    use ndarray::Array2;
    use rand::Rng;

    #[test]
    fn separating_column_diverges_to_the_cap() {
        let y: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let z = Array2::from_shape_fn((40, 1), |(i, _)| f64::from(y[i]) + 0.01 * i as f64 / 40.0);
        let (w, b) = match nnlog_solve(z.view(), &y) {
            Err(Error::IterationCap { last, .. }) => (last[..1].to_vec(), last[1]),
            Ok(fit) => (fit.weights, fit.intercept),
            Err(e) => panic!("{e}"),
        };
        assert!(w[0] > 10.0, "weight {}", w[0]);
        let scores: Vec<f64> = (0..40).map(|i| b + w[0] * z[[i, 0]]).collect();
        assert_eq!(auc(&scores, &y).unwrap(), 1.0);
    }

    #[test]
    fn noise_columns_get_intercept_only_model() {
        let mut rng = RngStream::new(21).rng();
        let n = 4000;
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
        let z = Array2::from_shape_fn((n, 3), |_| rng.random::<f64>());
        let fit = nnlog_solve(z.view(), &y).unwrap();
        let n1 = y.iter().filter(|&&v| v == 1).count() as f64;
        let expected = (n1 / (n as f64 - n1)).ln();
        assert!(fit.weights.iter().all(|&w| w < 0.15), "{:?}", fit.weights);
        let shift: f64 = fit.weights.iter().map(|w| w * 0.5).sum();
        assert!((fit.intercept + shift - expected).abs() < 0.05, "{} vs {expected}", fit.intercept);
    }

    #[test]
    fn column_permutation_permutes_weights() {
        let mut rng = RngStream::new(5).rng();
        let y: Vec<u8> = (0..60).map(|_| u8::from(rng.random::<bool>())).collect();
        let z = Array2::from_shape_fn((60, 3), |(i, j)| f64::from(y[i]) * (j as f64 + 1.0) * 0.3 + rng.random::<f64>());
        let perm = [2usize, 0, 1];
        let zp = z.select(ndarray::Axis(1), &perm);
        let a = nnlog_solve(z.view(), &y).unwrap();
        let b = nnlog_solve(zp.view(), &y).unwrap();
        for (k, &j) in perm.iter().enumerate() {
            assert!((b.weights[k] - a.weights[j]).abs() < 1e-4);
        }
        assert!((a.intercept - b.intercept).abs() < 1e-4);
    }
}
