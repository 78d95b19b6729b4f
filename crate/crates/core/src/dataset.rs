use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Feature matrix plus binary response. Rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        Self::with_names(features, labels, None)
    }

    pub fn with_names(
        features: Array2<f64>,
        labels: Vec<u8>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, p) = features.dim();
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidDataset("need at least 1 feature column".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{n} feature rows but {} labels",
                labels.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::InvalidDataset(format!(
                "label {} at row {i} is not 0 or 1",
                labels[i]
            )));
        }
        if let Some(((r, c), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("non-finite value {v} at ({r}, {c})")));
        }
        if let Some(names) = &feature_names {
            if names.len() != p {
                return Err(Error::InvalidDataset(format!(
                    "{p} feature columns but {} names",
                    names.len()
                )));
            }
        }
        Ok(Dataset {
            features,
            labels,
            feature_names,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// (negatives, positives)
    pub fn class_counts(&self) -> (usize, usize) {
        class_counts(&self.labels)
    }

    pub fn has_both_classes(&self) -> bool {
        let (n0, n1) = self.class_counts();
        n0 > 0 && n1 > 0
    }

    /// Rows in the given order. Indices may repeat.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let features = self.features.select(Axis(0), rows);
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Dataset::with_names(features, labels, self.feature_names.clone())
    }

    /// Row order that depends only on row content: label first, then a hash of
    /// the label and feature bits. Rows with identical content keep their
    /// relative order, and since they are interchangeable this does not leak
    /// the input order into anything computed downstream.
    pub fn canonical_order(&self) -> Vec<usize> {
        canonical_row_order(self.features.view(), &self.labels)
    }
}

pub(crate) fn canonical_row_order(x: ArrayView2<f64>, labels: &[u8]) -> Vec<usize> {
    let keys: Vec<(u8, u64)> = (0..labels.len()).map(|i| (labels[i], row_hash(x, labels, i))).collect();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| keys[i]);
    order
}

fn row_hash(x: ArrayView2<f64>, labels: &[u8], i: usize) -> u64 {
    let mut h = mix(0x9e37_79b9_7f4a_7c15 ^ u64::from(labels[i]));
    for &v in x.row(i) {
        // +0.0 and -0.0 are the same observation
        let bits = if v == 0.0 { 0 } else { v.to_bits() };
        h = mix(h ^ bits);
    }
    h
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn class_counts(labels: &[u8]) -> (usize, usize) {
    let n1 = labels.iter().filter(|&&y| y == 1).count();
    (labels.len() - n1, n1)
}
