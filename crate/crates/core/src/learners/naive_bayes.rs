use ndarray::ArrayView2;

/// Gaussian naive Bayes with per-class, per-feature variances.
#[derive(Debug, Clone)]
pub struct GaussianNb {
    mean: [Vec<f64>; 2],
    var: [Vec<f64>; 2],
    log_prior: [f64; 2],
}

impl GaussianNb {
    pub fn fit(x: ArrayView2<f64>, y: &[u8], var_floor: f64) -> Self {
        let p = x.ncols();
        let mut mean = [vec![0.0; p], vec![0.0; p]];
        let mut var = [vec![0.0; p], vec![0.0; p]];
        let mut count = [0usize; 2];
        for (row, &c) in x.rows().into_iter().zip(y) {
            count[c as usize] += 1;
            for (m, v) in mean[c as usize].iter_mut().zip(row) {
                *m += v;
            }
        }
        for c in 0..2 {
            for m in mean[c].iter_mut() {
                *m /= count[c].max(1) as f64;
            }
        }
        for (row, &c) in x.rows().into_iter().zip(y) {
            let c = c as usize;
            for ((v, m), xv) in var[c].iter_mut().zip(&mean[c]).zip(row) {
                *v += (xv - m).powi(2);
            }
        }
        for c in 0..2 {
            let denom = (count[c] as f64 - 1.0).max(1.0);
            for v in var[c].iter_mut() {
                *v = (*v / denom).max(var_floor);
            }
        }
        let n = y.len() as f64;
        let log_prior = [(count[0] as f64 / n).ln(), (count[1] as f64 / n).ln()];
        GaussianNb { mean, var, log_prior }
    }

    fn log_likelihood(&self, c: usize, row: ndarray::ArrayView1<f64>) -> f64 {
        let mut ll = self.log_prior[c];
        for ((x, m), v) in row.iter().zip(&self.mean[c]).zip(&self.var[c]) {
            ll -= 0.5 * ((x - m).powi(2) / v + v.ln());
        }
        ll
    }

    /// Posterior probability of class 1.
    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                let log_odds = self.log_likelihood(1, row) - self.log_likelihood(0, row);
                logistic(log_odds)
            })
            .collect()
    }
}

pub(crate) fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn orders_by_proximity_to_positive_cluster() {
        let x = array![[0.0], [0.1], [10.0], [10.1]];
        let m = GaussianNb::fit(x.view(), &[0, 0, 1, 1], 1e-9);
        let s = m.score(array![[0.05], [4.0], [6.0], [10.05]].view());
        assert!(s.windows(2).all(|w| w[0] <= w[1]), "{s:?}");
        assert!(s[0] < 0.5 && s[3] > 0.5);
        assert!(s.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn constant_feature_uses_floor() {
        let x = array![[1.0, 0.0], [1.0, 0.2], [1.0, 3.0], [1.0, 3.3]];
        let m = GaussianNb::fit(x.view(), &[0, 0, 1, 1], 1e-9);
        assert!(m.score(x.view()).iter().all(|v| v.is_finite()));
    }
}
