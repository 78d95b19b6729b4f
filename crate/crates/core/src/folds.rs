use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Mapping of each observation to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    /// Held-out rows of fold `fold`, ascending.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// All rows outside fold `fold`, ascending.
    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Random partition of `n` rows into `k` folds whose sizes differ by at most
/// one. In stratified mode the per-class fold counts are balanced as well.
pub fn split_folds(
    n: usize,
    labels: &[u8],
    k: usize,
    stratified: bool,
    stream: &RngStream,
) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidSplit(format!("k = {k}, need k >= 2")));
    }
    if k > n {
        return Err(Error::InvalidSplit(format!("k = {k} exceeds n = {n}")));
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!("n = {n} but {} labels", labels.len())));
    }
    let mut rng = stream.rng();

    let mut sequence: Vec<usize> = Vec::with_capacity(n);
    if stratified {
        for class in [0u8, 1] {
            let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                return Err(Error::InvalidSplit(format!("class {class} has no members")));
            }
            if members.len() < k {
                return Err(Error::InvalidSplit(format!(
                    "class {class} has {} members, fewer than k = {k}; some fold would lack it",
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            sequence.extend(members);
        }
    } else {
        sequence.extend(0..n);
        sequence.shuffle(&mut rng);
    }

    // Dealing a class-grouped sequence round-robin balances both the totals
    // and every class's contiguous run.
    let mut fold_ids: Vec<usize> = (0..k).collect();
    fold_ids.shuffle(&mut rng);
    let mut fold_of = vec![0; n];
    for (pos, &row) in sequence.iter().enumerate() {
        fold_of[row] = fold_ids[pos % k];
    }
    Ok(FoldAssignment { fold_of, k })
}

/// Stratified subsample keeping `round(fraction * n_c)` rows of each class
/// (at least one). Returned indices are ascending.
pub fn stratified_subsample(labels: &[u8], fraction: f64, stream: &RngStream) -> Vec<usize> {
    let mut rng = stream.rng();
    let mut keep = Vec::new();
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        let m = ((fraction * members.len() as f64).round() as usize).clamp(1, members.len());
        members.shuffle(&mut rng);
        keep.extend_from_slice(&members[..m]);
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts_per_fold(a: &FoldAssignment, labels: &[u8], class: u8) -> Vec<usize> {
        let mut c = vec![0; a.k()];
        for (i, &f) in a.fold_of().iter().enumerate() {
            if labels[i] == class {
                c[f] += 1;
            }
        }
        c
    }

    #[test]
    fn stratified_ten_by_five() {
        let labels = [1, 0, 1, 0, 1, 0, 1, 0, 1, 0];
        let a = split_folds(10, &labels, 5, true, &RngStream::new(3)).unwrap();
        assert_eq!(counts_per_fold(&a, &labels, 0), vec![1; 5]);
        assert_eq!(counts_per_fold(&a, &labels, 1), vec![1; 5]);
    }

    #[test]
    fn seven_into_three() {
        let labels = [0, 1, 0, 1, 0, 1, 0];
        let a = split_folds(7, &labels, 3, false, &RngStream::new(1)).unwrap();
        let mut s = a.sizes();
        s.sort_unstable();
        assert_eq!(s, vec![2, 2, 3]);
    }

    #[test]
    fn deterministic_per_path() {
        let labels: Vec<u8> = (0..30).map(|i| (i % 3 == 0) as u8).collect();
        let s = RngStream::new(11).child(4);
        assert_eq!(
            split_folds(30, &labels, 5, true, &s).unwrap(),
            split_folds(30, &labels, 5, true, &s).unwrap()
        );
    }

    #[test]
    fn errors() {
        let labels = [0, 1, 0, 1];
        assert!(split_folds(4, &labels, 5, false, &RngStream::new(0)).is_err());
        assert!(split_folds(4, &labels, 1, false, &RngStream::new(0)).is_err());
        // two positives cannot populate three folds
        let labels = [0, 0, 0, 0, 1, 1];
        assert!(split_folds(6, &labels, 3, true, &RngStream::new(0)).is_err());
        assert!(split_folds(6, &labels, 3, false, &RngStream::new(0)).is_ok());
    }

    #[test]
    fn different_paths_permute_differently() {
        let labels: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        let root = RngStream::new(5);
        let splits: Vec<_> = (0..10)
            .map(|p| split_folds(100, &labels, 10, true, &root.child(p)).unwrap())
            .collect();
        let distinct = splits.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(distinct >= 1);
    }

    #[test]
    fn subsample_is_stratified() {
        let labels: Vec<u8> = (0..50).map(|i| (i < 20) as u8).collect();
        let keep = stratified_subsample(&labels, 0.9, &RngStream::new(2));
        let pos = keep.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!((keep.len(), pos), (45, 18));
    }

    proptest! {
        #[test]
        fn partition_invariants(n in 4usize..120, k in 2usize..10, seed in any::<u64>(), strat in any::<bool>(), frac in 0.2f64..0.8) {
            let labels: Vec<u8> = (0..n).map(|i| ((i as f64) < frac * n as f64) as u8).collect();
            let (n0, n1) = crate::dataset::class_counts(&labels);
            prop_assume!(k <= n && (!strat || (n0 >= k && n1 >= k)));
            let a = split_folds(n, &labels, k, strat, &RngStream::new(seed)).unwrap();
            let sizes = a.sizes();
            prop_assert!(sizes.iter().all(|&s| s > 0));
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(sizes.iter().sum::<usize>(), n);
            if strat {
                for class in [0, 1] {
                    let c = counts_per_fold(&a, &labels, class);
                    prop_assert!(c.iter().max().unwrap() - c.iter().min().unwrap() <= 1);
                }
            }
        }
    }
}
