//! Small dense least-squares kernel used by the NNLS combiner.

use ndarray::{Array2, ArrayView2};

/// Solves `min ||a x - b||` by Householder QR. Returns `None` when `a` is
/// numerically rank deficient (a diagonal entry of R below `1e-12` times the
/// largest column norm).
pub fn least_squares(a: ArrayView2<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = a.dim();
    if n == 0 {
        return Some(Vec::new());
    }
    if m < n || b.len() != m {
        return None;
    }
    let mut r: Array2<f64> = a.to_owned();
    let mut rhs = b.to_vec();
    let scale = a
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }

    let mut v = vec![0.0; m];
    for k in 0..n {
        let norm = (k..m).map(|i| r[[i, k]] * r[[i, k]]).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return None;
        }
        let alpha = if r[[k, k]] > 0.0 { -norm } else { norm };
        for i in k..m {
            v[i] = r[[i, k]];
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..m).map(|i| v[i] * v[i]).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let dot: f64 = (k..m).map(|i| v[i] * r[[i, j]]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    r[[i, j]] -= f * v[i];
                }
            }
            let dot: f64 = (k..m).map(|i| v[i] * rhs[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                rhs[i] -= f * v[i];
            }
        }
    }

    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in (k + 1)..n {
            s -= r[[k, j]] * x[j];
        }
        x[k] = s / r[[k, k]];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_overdetermined_system() {
        // y = 2 + 3t exactly
        let a = array![[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]];
        let x = least_squares(a.view(), &[2.0, 5.0, 8.0, 11.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn detects_rank_deficiency() {
        let a = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        assert!(least_squares(a.view(), &[1.0, 2.0, 3.0]).is_none());
    }
}
