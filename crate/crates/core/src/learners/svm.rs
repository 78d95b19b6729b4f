//! Linear soft-margin SVM trained by Pegasos-style stochastic subgradient
//! descent on standardised features.
//!
//! Minimises `(lambda/2) ||w||^2 + (1/n) sum_i max(0, 1 - y_i (w.x_i + b))`
//! with `lambda = 1 / (C n)`. The bias is carried as an extra constant
//! feature, so it is lightly regularised along with `w`.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;

use super::column_moments;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct LinearSvm {
    mean: Vec<f64>,
    sd: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

impl LinearSvm {
    pub fn fit(x: ArrayView2<f64>, y: &[u8], c: f64, epochs: usize, stream: &RngStream) -> Result<Self> {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::Config(format!("svm.c must be > 0, got {c}")));
        }
        let (n, p) = x.dim();
        let (mean, sd) = column_moments(x);
        // row-major standardised copy with a trailing 1 for the bias
        let width = p + 1;
        let mut z = vec![0.0; n * width];
        for (i, row) in x.rows().into_iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                z[i * width + j] = if sd[j] > 0.0 { (v - mean[j]) / sd[j] } else { 0.0 };
            }
            z[i * width + p] = 1.0;
        }
        let sign: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();

        let lambda = 1.0 / (c * n as f64);
        let mut w = vec![0.0; width];
        // w is kept as scale * v so the shrink step is O(1)
        let mut scale = 1.0f64;
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = stream.rng();
        let mut t = 0usize;
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let row = &z[i * width..(i + 1) * width];
                let margin = sign[i] * scale * row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                let shrink = 1.0 - eta * lambda;
                if shrink > 0.0 {
                    scale *= shrink;
                } else {
                    // first step: eta * lambda == 1 wipes w
                    w.iter_mut().for_each(|v| *v = 0.0);
                    scale = 1.0;
                }
                if margin < 1.0 {
                    let step = eta * sign[i] / scale;
                    for (wv, a) in w.iter_mut().zip(row) {
                        *wv += step * a;
                    }
                }
                if scale < 1e-9 {
                    w.iter_mut().for_each(|v| *v *= scale);
                    scale = 1.0;
                }
            }
        }
        let mut weights: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let bias = weights.pop().expect("bias slot");
        Ok(LinearSvm { mean, sd, weights, bias })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn raw_coefficients(&self) -> (f64, Vec<f64>) {
        let slopes: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.sd)
            .map(|(w, s)| if *s > 0.0 { w / s } else { 0.0 })
            .collect();
        let intercept = self.bias - slopes.iter().zip(&self.mean).map(|(b, m)| b * m).sum::<f64>();
        (intercept, slopes)
    }

    /// Linear score `w . standardise(x) + b`.
    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                let mut s = self.bias;
                for (j, v) in row.iter().enumerate() {
                    if self.sd[j] > 0.0 {
                        s += self.weights[j] * (v - self.mean[j]) / self.sd[j];
                    }
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::auc;
    use ndarray::{array, Array2};

    #[test]
    fn separates_two_clusters() {
        let x = array![[0.0, 0.1], [0.2, -0.1], [0.1, 0.0], [3.0, 3.1], [2.9, 3.2], [3.1, 2.8]];
        let y = [0, 0, 0, 1, 1, 1];
        let m = LinearSvm::fit(x.view(), &y, 1.0, 200, &RngStream::new(1)).unwrap();
        assert_eq!(auc(&m.score(x.view()), &y).unwrap(), 1.0);
    }

    #[test]
    fn centre_point_scores_the_bias() {
        let x = array![[0.0, 1.0], [1.0, 3.0], [2.0, 2.0], [3.0, 7.0]];
        let y = [0, 0, 1, 1];
        let m = LinearSvm::fit(x.view(), &y, 1.0, 50, &RngStream::new(4)).unwrap();
        let centre = Array2::from_shape_vec((1, 2), m.mean.clone()).unwrap();
        assert!((m.score(centre.view())[0] - m.bias()).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_c() {
        let x = array![[0.0], [1.0]];
        assert!(LinearSvm::fit(x.view(), &[0, 1], 0.0, 10, &RngStream::new(0)).is_err());
    }
}
