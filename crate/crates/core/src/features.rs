//! Univariate screening by the Welch t statistic.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_TOP_M: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    /// |t| per column.
    pub statistic: Vec<f64>,
    /// Chosen columns by decreasing |t|, ties to the lower index.
    pub selected: Vec<usize>,
}

/// `(mean1 - mean0) / sqrt(v1/n1 + v0/n0)` with unbiased group variances,
/// each floored at `1e-12 * (pooled-sample variance + 1e-300)`.
pub fn welch_t(x: ArrayView1<f64>, group: &[u8]) -> Result<f64> {
    if x.len() != group.len() {
        return Err(Error::DimensionMismatch(format!("{} values vs {} labels", x.len(), group.len())));
    }
    let mut sum = [0.0f64; 2];
    let mut count = [0usize; 2];
    for (&v, &g) in x.iter().zip(group) {
        sum[g as usize] += v;
        count[g as usize] += 1;
    }
    for (g, &c) in count.iter().enumerate() {
        if c < 2 {
            return Err(Error::GroupTooSmall { group: g as u8, count: c });
        }
    }
    let mean = [sum[0] / count[0] as f64, sum[1] / count[1] as f64];
    let overall = (sum[0] + sum[1]) / x.len() as f64;
    let mut ss = [0.0f64; 2];
    let mut ss_all = 0.0;
    for (&v, &g) in x.iter().zip(group) {
        ss[g as usize] += (v - mean[g as usize]).powi(2);
        ss_all += (v - overall).powi(2);
    }
    let floor = 1e-12 * (ss_all / (x.len() - 1) as f64 + 1e-300);
    let v0 = (ss[0] / (count[0] - 1) as f64).max(floor);
    let v1 = (ss[1] / (count[1] - 1) as f64).max(floor);
    Ok((mean[1] - mean[0]) / (v1 / count[1] as f64 + v0 / count[0] as f64).sqrt())
}

/// Ranks all columns of `train` by |t| and keeps the top `m` (all of them when `p < m`).
pub fn select_top(train: &Dataset, m: usize) -> Result<FeatureRanking> {
    if m < 1 {
        return Err(Error::Config("feature count m must be >= 1".into()));
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let x = train.features();
    let statistic = x
        .columns()
        .into_iter()
        .map(|col| welch_t(col, train.labels()).map(f64::abs))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..statistic.len()).collect();
    order.sort_by(|&a, &b| statistic[b].total_cmp(&statistic[a]).then(a.cmp(&b)));
    order.truncate(m.min(statistic.len()));
    Ok(FeatureRanking {
        statistic,
        selected: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};
    use proptest::prelude::*;

    #[test]
    fn welch_examples() {
        assert_eq!(welch_t(array![1.0, 2.0, 1.0, 2.0].view(), &[0, 0, 1, 1]).unwrap(), 0.0);

        // means 2 and 4, variances 1 and 4, n = 3 each
        let expected = 2.0 / (4.0f64 / 3.0 + 1.0 / 3.0).sqrt();
        let t = welch_t(array![1.0, 2.0, 3.0, 2.0, 4.0, 6.0].view(), &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((t - expected).abs() < 1e-12);
        assert!((t - 1.549).abs() < 1e-3);

        // both groups constant: variances sit on the floor 1e-12 * (1/3)
        let floor: f64 = 1e-12 * (1.0 / 3.0 + 1e-300);
        let expected = 1.0 / (floor / 2.0 + floor / 2.0).sqrt();
        let t = welch_t(array![0.0, 0.0, 1.0, 1.0].view(), &[0, 0, 1, 1]).unwrap();
        assert!(t.is_finite() && t > 0.0);
        assert!((t - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn constant_column_is_zero() {
        let t = welch_t(array![3.0, 3.0, 3.0, 3.0].view(), &[0, 1, 0, 1]).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn small_groups_rejected() {
        assert!(matches!(
            welch_t(array![1.0, 2.0, 3.0].view(), &[0, 0, 1]),
            Err(Error::GroupTooSmall { group: 1, count: 1 })
        ));
    }

    fn data(x: Array2<f64>, y: Vec<u8>) -> Dataset {
        Dataset::new(x, y).unwrap()
    }

    #[test]
    fn informative_column_ranks_first() {
        let d = data(
            array![[1.0, 5.0, 0.0], [2.0, 4.0, 0.1], [2.0, 5.0, 3.0], [1.0, 4.0, 3.2]],
            vec![0, 0, 1, 1],
        );
        assert_eq!(select_top(&d, 1).unwrap().selected, vec![2]);
    }

    #[test]
    fn ties_break_by_index() {
        let col = array![0.3, 1.0, 0.2, 0.9, 0.6, 0.5];
        let x = Array2::from_shape_fn((6, 4), |(i, _)| col[i]);
        let d = data(x, vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(select_top(&d, 3).unwrap().selected, vec![0, 1, 2]);
        assert_eq!(select_top(&d, 10).unwrap().selected, vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_class_rejected() {
        let d = data(array![[1.0], [2.0], [3.0]], vec![1, 1, 1]);
        assert!(matches!(select_top(&d, 1), Err(Error::SingleClass)));
    }

    proptest! {
        #[test]
        fn affine_invariance(v in prop::collection::vec(-5.0f64..5.0, 8), a in 0.1f64..10.0, b in -10.0f64..10.0, neg in any::<bool>()) {
            let group = [0, 1, 0, 1, 1, 0, 0, 1];
            let x = Array1::from(v);
            let a = if neg { -a } else { a };
            let t0 = welch_t(x.view(), &group).unwrap();
            let t1 = welch_t(x.mapv(|u| a * u + b).view(), &group).unwrap();
            prop_assert!((t0.abs() - t1.abs()).abs() <= 1e-6 * (1.0 + t0.abs()));
        }

        #[test]
        fn full_selection_is_the_ranked_order(seed in 0u64..1000) {
            let x = Array2::from_shape_fn((10, 6), |(i, j)| (((i * 31 + j * 17) as u64 ^ seed) % 97) as f64);
            let d = data(x, vec![0, 1, 0, 1, 0, 1, 0, 1, 1, 0]);
            let r = select_top(&d, 6).unwrap();
            let mut sorted = r.selected.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..6).collect::<Vec<_>>());
            for w in r.selected.windows(2) {
                prop_assert!(r.statistic[w[0]] >= r.statistic[w[1]]);
            }
        }
    }
}
