//! Discrete AdaBoost over decision stumps.

use ndarray::ArrayView2;

const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// +1 votes positive above the threshold, -1 votes positive at or below it.
    pub polarity: f64,
}

impl Stump {
    pub fn vote(&self, value: f64) -> f64 {
        if value > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaBoost {
    stumps: Vec<(Stump, f64)>,
    /// Training misclassification rate of the ensemble after each round.
    training_error: Vec<f64>,
    /// Mean of exp(-y F(x)) over training rows after each round; it bounds
    /// the misclassification rate from above.
    exponential_loss: Vec<f64>,
}

impl AdaBoost {
    /// Stops early when the best stump's weighted error reaches 0.5 (the
    /// stump is discarded) or drops to zero (the stump is kept with its
    /// error clamped to 1e-10).
    pub fn fit(x: ArrayView2<f64>, y: &[u8], rounds: usize) -> Self {
        let (n, p) = x.dim();
        let sign: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
        let sorted: Vec<Vec<usize>> = (0..p)
            .map(|j| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| x[[a, j]].total_cmp(&x[[b, j]]).then(a.cmp(&b)));
                idx
            })
            .collect();
        let mut weight = vec![1.0 / n as f64; n];
        let mut margin = vec![0.0; n];
        let mut stumps = Vec::new();
        let mut training_error = Vec::new();
        let mut exponential_loss = Vec::new();

        for _ in 0..rounds {
            let Some((stump, err)) = best_stump(x, &sign, &weight, &sorted) else {
                break;
            };
            if err >= 0.5 {
                break;
            }
            let clamped = err.max(MIN_ERROR);
            let alpha = 0.5 * ((1.0 - clamped) / clamped).ln();
            let mut total = 0.0;
            for i in 0..n {
                let h = stump.vote(x[[i, stump.feature]]);
                margin[i] += alpha * h;
                weight[i] *= (-alpha * sign[i] * h).exp();
                total += weight[i];
            }
            for w in weight.iter_mut() {
                *w /= total;
            }
            stumps.push((stump, alpha));
            let wrong = (0..n).filter(|&i| sign[i] * margin[i] <= 0.0).count();
            training_error.push(wrong as f64 / n as f64);
            exponential_loss.push((0..n).map(|i| (-sign[i] * margin[i]).exp()).sum::<f64>() / n as f64);
            if err < MIN_ERROR {
                break;
            }
        }
        AdaBoost {
            stumps,
            training_error,
            exponential_loss,
        }
    }

    pub fn rounds(&self) -> usize {
        self.stumps.len()
    }

    pub fn training_error(&self) -> &[f64] {
        &self.training_error
    }

    pub fn exponential_loss(&self) -> &[f64] {
        &self.exponential_loss
    }

    /// Weighted vote `sum alpha_t h_t(x)`, divided by `sum alpha_t` so the
    /// scale stays within [-1, 1]. Zero when no stump was kept.
    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let total: f64 = self.stumps.iter().map(|(_, a)| a).sum();
        x.rows()
            .into_iter()
            .map(|row| {
                if total <= 0.0 {
                    return 0.0;
                }
                self.stumps.iter().map(|(s, a)| a * s.vote(row[s.feature])).sum::<f64>() / total
            })
            .collect()
    }
}

fn best_stump(x: ArrayView2<f64>, sign: &[f64], weight: &[f64], sorted: &[Vec<usize>]) -> Option<(Stump, f64)> {
    // weighted mass of positives and negatives in the whole sample
    let (mut pos_total, mut neg_total) = (0.0, 0.0);
    for (s, w) in sign.iter().zip(weight) {
        if *s > 0.0 {
            pos_total += w;
        } else {
            neg_total += w;
        }
    }
    let mut best: Option<(Stump, f64)> = None;
    for (j, idx) in sorted.iter().enumerate() {
        let first = x[[idx[0], j]];
        // threshold below every value: everything is "above"
        let mut consider = |threshold: f64, pos_below: f64, neg_below: f64| {
            // polarity +1 errs on positives at/below and negatives above
            let err_up = pos_below + (neg_total - neg_below);
            let err_down = (pos_total - pos_below) + neg_below;
            let (err, polarity) = if err_up <= err_down { (err_up, 1.0) } else { (err_down, -1.0) };
            if best.as_ref().is_none_or(|(_, e)| err < *e) {
                best = Some((Stump { feature: j, threshold, polarity }, err));
            }
        };
        consider(first - 1.0, 0.0, 0.0);
        let (mut pos_below, mut neg_below) = (0.0, 0.0);
        for k in 0..idx.len() {
            let i = idx[k];
            if sign[i] > 0.0 {
                pos_below += weight[i];
            } else {
                neg_below += weight[i];
            }
            let v = x[[i, j]];
            if k + 1 < idx.len() {
                let next = x[[idx[k + 1], j]];
                if next > v {
                    consider(0.5 * (v + next), pos_below, neg_below);
                }
            }
        }
    }
    best
}
