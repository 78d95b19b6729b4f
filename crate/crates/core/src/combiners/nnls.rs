//! Non-negative least squares by the Lawson-Hanson active-set method.

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Reference scale for the optimality tolerances: `||Z||_F * ||y||`.
pub fn kkt_scale(z: ArrayView2<f64>, y: &[f64]) -> f64 {
    let zf = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let yn = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (zf * yn).max(f64::MIN_POSITIVE)
}

/// Gradient of `1/2 ||y - Z w||^2`, i.e. `Z^T (Z w - y)`.
pub fn gradient(z: ArrayView2<f64>, y: &[f64], w: &[f64]) -> Vec<f64> {
    let resid: Vec<f64> = z
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, yi)| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - yi)
        .collect();
    z.columns()
        .into_iter()
        .map(|col| col.iter().zip(&resid).map(|(a, r)| a * r).sum())
        .collect()
}

/// `argmin ||y - Z w||^2` subject to `w >= 0`.
///
/// Fails with [`Error::IterationCap`] after `10 * L` outer iterations.
pub fn nnls_solve(z: ArrayView2<f64>, y: &[f64]) -> Result<Vec<f64>> {
    let (n, l) = z.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} rows vs {} targets", y.len())));
    }
    let tol = 1e-11 * kkt_scale(z, y);
    let cap = 10 * l.max(1);
    let mut w = vec![0.0; l];
    let mut passive = vec![false; l];
    let mut blocked = vec![false; l];

    for _ in 0..cap {
        // negative gradient: the descent direction of each coordinate
        let g: Vec<f64> = gradient(z, y, &w).into_iter().map(|v| -v).collect();
        let candidate = (0..l)
            .filter(|&j| !passive[j] && !blocked[j] && g[j] > tol)
            .max_by(|&a, &b| g[a].total_cmp(&g[b]).then(b.cmp(&a)));
        let Some(j) = candidate else {
            return Ok(w);
        };
        passive[j] = true;

        loop {
            let cols: Vec<usize> = (0..l).filter(|&i| passive[i]).collect();
            let sub: Array2<f64> = z.select(Axis(1), &cols);
            let Some(s) = least_squares(sub.view(), y) else {
                // the new column is dependent on the passive set
                passive[j] = false;
                blocked[j] = true;
                break;
            };
            if s.iter().all(|&v| v > 0.0) {
                for (k, &c) in cols.iter().enumerate() {
                    w[c] = s[k];
                }
                blocked.iter_mut().for_each(|b| *b = false);
                break;
            }
            // step back towards w until the first passive coordinate hits zero
            let mut alpha = f64::INFINITY;
            for (k, &c) in cols.iter().enumerate() {
                if s[k] <= 0.0 {
                    let denom = w[c] - s[k];
                    let a = if denom > 0.0 { w[c] / denom } else { 0.0 };
                    alpha = alpha.min(a);
                }
            }
            for (k, &c) in cols.iter().enumerate() {
                w[c] += alpha * (s[k] - w[c]);
            }
            let floor = 1e-14 * (1.0 + w.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            for &c in &cols {
                if w[c] <= floor {
                    w[c] = 0.0;
                    passive[c] = false;
                }
            }
            if !passive[j] && alpha == 0.0 {
                // no progress from this candidate; numerically it cannot enter
                blocked[j] = true;
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Err(Error::IterationCap {
        solver: "nnls",
        iterations: cap,
        last: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn objective(z: ArrayView2<f64>, y: &[f64], w: &[f64]) -> f64 {
        z.rows()
            .into_iter()
            .zip(y)
            .map(|(r, yi)| (r.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - yi).powi(2))
            .sum()
    }

    fn assert_kkt(z: ArrayView2<f64>, y: &[f64], w: &[f64]) {
        let g = gradient(z, y, w);
        let tol = 1e-8 * kkt_scale(z, y);
        for (j, (&wj, &gj)) in w.iter().zip(&g).enumerate() {
            assert!(wj >= 0.0);
            if wj > 0.0 {
                assert!(gj.abs() <= tol, "active {j}: gradient {gj}");
            } else {
                assert!(gj >= -tol, "inactive {j}: gradient {gj}");
            }
        }
    }

    #[test]
    fn exact_single_column_fit() {
        let y = [0.0, 1.0, 1.0, 0.0, 1.0];
        let z = Array2::from_shape_vec((5, 1), y.to_vec()).unwrap();
        let w = nnls_solve(z.view(), &y).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_component_is_clipped() {
        let z = array![[1.0, 0.0], [0.0, 1.0]];
        let y = [1.0, -1.0];
        let w = nnls_solve(z.view(), &y).unwrap();
        assert_eq!(w, vec![1.0, 0.0]);
        // grid oracle at 1e-3 resolution
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for a in 0..=2000 {
            for b in 0..=2000 {
                let (wa, wb) = (a as f64 * 1e-3, b as f64 * 1e-3);
                let f = (wa - 1.0).powi(2) + (wb + 1.0).powi(2);
                if f < best.0 {
                    best = (f, wa, wb);
                }
            }
        }
        assert!((best.1 - w[0]).abs() <= 1e-3 && (best.2 - w[1]).abs() <= 1e-3);
    }

    #[test]
    fn duplicated_columns_fit_exactly() {
        let y = [0.2, 0.9, 0.4, 0.7];
        let z = Array2::from_shape_fn((4, 2), |(i, _)| y[i]);
        let w = nnls_solve(z.view(), &y).unwrap();
        assert!(objective(z.view(), &y, &w) < 1e-20);
        assert!((w[0] + w[1] - 1.0).abs() < 1e-12);
        assert_kkt(z.view(), &y, &w);
    }

    #[test]
    fn all_columns_anticorrelated_gives_zero() {
        // scores vanish on every positive row, so Z^T y = 0
        let z = array![[1.0, 2.0], [0.0, 0.0], [0.0, 0.0]];
        let y = [0.0, 1.0, 1.0];
        let w = nnls_solve(z.view(), &y).unwrap();
        assert_eq!(w, vec![0.0, 0.0]);
        assert_kkt(z.view(), &y, &w);
    }

    #[test]
    fn dominates_mean_and_single_columns() {
        let stream = crate::rng::RngStream::new(77);
        let mut rng = stream.rng();
        use rand::Rng;
        for _ in 0..50 {
            let z = Array2::from_shape_fn((25, 4), |_| rng.random::<f64>());
            let y: Vec<f64> = (0..25).map(|_| f64::from(rng.random::<bool>())).collect();
            let w = nnls_solve(z.view(), &y).unwrap();
            assert_kkt(z.view(), &y, &w);
            let f = objective(z.view(), &y, &w);
            assert!(f <= objective(z.view(), &y, &[0.25; 4]) + 1e-12);
            for j in 0..4 {
                let mut e = [0.0; 4];
                e[j] = 1.0;
                assert!(f <= objective(z.view(), &y, &e) + 1e-12);
            }
        }
    }
}
