//! AUC and across-repeat summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counting
/// one half. Computed from mid-ranks in O(n log n).
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Twice the positive rank sum keeps mid-ranks integral.
    let mut twice_rank_sum: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1..=j, mid-rank (i+1+j)/2
        let twice_mid = (i + 1 + j) as u64;
        let pos_in_group = order[i..j].iter().filter(|&&k| labels[k] == 1).count() as u64;
        twice_rank_sum += twice_mid * pos_in_group;
        i = j;
    }

    let n_pos = n_pos as u64;
    let twice_u = twice_rank_sum - n_pos * (n_pos + 1);
    Ok(twice_u as f64 / (2 * n_pos * n_neg as u64) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStat {
    pub mean: f64,
    /// Sample standard deviation over sqrt(count).
    pub se_of_mean: f64,
    pub count: usize,
}

impl SummaryStat {
    pub fn sd(&self) -> f64 {
        self.se_of_mean * (self.count as f64).sqrt()
    }
}

pub fn summarize(values: &[f64]) -> Result<SummaryStat> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return Ok(SummaryStat {
            mean,
            se_of_mean: 0.0,
            count,
        });
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let sd = (ss / (count - 1) as f64).sqrt();
    Ok(SummaryStat {
        mean,
        se_of_mean: sd / (count as f64).sqrt(),
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_auc(scores: &[f64], labels: &[u8]) -> f64 {
        let mut twice_wins = 0u64;
        let mut pairs = 0u64;
        for (i, &yi) in labels.iter().enumerate() {
            if yi != 1 {
                continue;
            }
            for (j, &yj) in labels.iter().enumerate() {
                if yj != 0 {
                    continue;
                }
                pairs += 1;
                if scores[i] > scores[j] {
                    twice_wins += 2;
                } else if scores[i] == scores[j] {
                    twice_wins += 1;
                }
            }
        }
        twice_wins as f64 / (2 * pairs) as f64
    }

    #[test]
    fn documented_values() {
        assert_eq!(auc(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 4], &[1, 0, 1, 0]).unwrap(), 0.5);
        assert_eq!(brute_force_auc(&[0.2, 0.8, 0.4, 0.6], &[0, 1, 1, 0]), 0.75);
        assert_eq!(auc(&[0.2, 0.8, 0.4, 0.6], &[0, 1, 1, 0]).unwrap(), 0.75);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(matches!(auc(&[0.1, 0.2], &[1, 1]), Err(Error::UndefinedAuc)));
        assert!(matches!(auc(&[0.1, 0.2], &[0, 0]), Err(Error::UndefinedAuc)));
        assert!(auc(&[0.1], &[0, 1]).is_err());
    }

    #[test]
    fn summary_values() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.se_of_mean, s.count), (1.0, 0.0, 3));
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert!((s.mean - 0.5).abs() < 1e-15 && (s.se_of_mean - 0.5).abs() < 1e-15);
        let s = summarize(&[0.6, 0.7, 0.8]).unwrap();
        assert!((s.mean - 0.7).abs() < 1e-12);
        assert!((s.se_of_mean - 0.1 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(summarize(&[0.3]).unwrap().se_of_mean, 0.0);
        assert!(matches!(summarize(&[]), Err(Error::EmptySample)));
    }

    fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (2usize..50).prop_flat_map(|n| {
            (
                prop::collection::vec((0u8..6).prop_map(|v| v as f64 / 5.0), n),
                prop::collection::vec(0u8..2, n),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_pair_counting((scores, labels) in scored_labels()) {
            match auc(&scores, &labels) {
                Ok(a) => prop_assert_eq!(a, brute_force_auc(&scores, &labels)),
                Err(_) => prop_assert!(labels.iter().all(|&y| y == labels[0])),
            }
        }

        #[test]
        fn negation_complements(labels in prop::collection::vec(0u8..2, 2..40), seed in any::<u64>()) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            // distinct scores
            let scores: Vec<f64> = (0..labels.len())
                .map(|i| ((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed) as f64)
                .collect();
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let a = auc(&scores, &labels).unwrap() + auc(&neg, &labels).unwrap();
            prop_assert!((a - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_transform_invariance((scores, labels) in scored_labels()) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let t: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(auc(&scores, &labels).unwrap(), auc(&t, &labels).unwrap());
        }

        #[test]
        fn se_ignores_order(mut v in prop::collection::vec(-10.0f64..10.0, 1..30)) {
            let a = summarize(&v).unwrap();
            v.reverse();
            let b = summarize(&v).unwrap();
            prop_assert!((a.se_of_mean - b.se_of_mean).abs() < 1e-12);
        }
    }
}
