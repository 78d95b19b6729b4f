use ndarray::{Array2, ArrayView2};

/// k-nearest neighbours by Euclidean distance; the score is the fraction of
/// positive labels among the `k` closest training rows (ties to the lower row).
#[derive(Debug, Clone)]
pub struct Knn {
    train: Array2<f64>,
    labels: Vec<u8>,
    k: usize,
}

impl Knn {
    pub fn fit(x: ArrayView2<f64>, y: &[u8], k: usize) -> Self {
        Knn {
            train: x.to_owned(),
            labels: y.to_vec(),
            k: k.clamp(1, y.len()),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let mut dist: Vec<(f64, usize)> = Vec::with_capacity(self.labels.len());
        x.rows()
            .into_iter()
            .map(|q| {
                dist.clear();
                for (i, row) in self.train.rows().into_iter().enumerate() {
                    let d: f64 = row.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                    dist.push((d, i));
                }
                let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if self.k < dist.len() {
                    dist.select_nth_unstable_by(self.k - 1, cmp);
                }
                let positives = dist[..self.k].iter().filter(|&&(_, i)| self.labels[i] == 1).count();
                positives as f64 / self.k as f64
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn one_neighbour_returns_own_label() {
        let x = array![[0.0, 0.0], [1.0, 1.0], [5.0, 5.0], [6.0, 5.0]];
        let y = [0, 1, 1, 0];
        let m = Knn::fit(x.view(), &y, 1);
        assert_eq!(m.score(x.view()), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn scores_are_multiples_of_one_over_k() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]];
        let y = [0, 0, 1, 0, 1, 1];
        let m = Knn::fit(x.view(), &y, 3);
        for s in m.score(array![[0.5], [2.5], [4.9]].view()) {
            assert!((0.0..=1.0).contains(&s));
            assert!(((s * 3.0) - (s * 3.0).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn k_is_clamped_to_training_size() {
        let m = Knn::fit(array![[0.0], [1.0]].view(), &[0, 1], 10);
        assert_eq!(m.k(), 2);
        assert_eq!(m.score(array![[7.0]].view()), vec![0.5]);
    }
}
