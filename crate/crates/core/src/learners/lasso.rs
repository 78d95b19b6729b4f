//! L1-penalised least squares on 0/1 labels by cyclic coordinate descent.
//!
//! Objective: `(1/2n) ||y - b - X beta||^2 + lambda ||beta||_1`, intercept
//! unpenalised. At the optimum every active coefficient has
//! `|x_j^T r| / n = lambda` and every zero one `|x_j^T r| / n <= lambda`.

use ndarray::ArrayView2;

use super::column_moments;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LassoSolution {
    pub intercept: f64,
    pub coef: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Smallest penalty at which all coefficients are zero.
pub fn lambda_max(x: ArrayView2<f64>, y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    x.columns()
        .into_iter()
        .map(|col| {
            let m = col.sum() / n;
            col.iter().zip(y).map(|(a, b)| (a - m) * (b - y_mean)).sum::<f64>().abs() / n
        })
        .fold(0.0, f64::max)
}

/// Stops when the largest coefficient change in a sweep is below `tol`, or
/// after `max_sweeps` sweeps.
pub fn coordinate_descent(x: ArrayView2<f64>, y: &[f64], lambda: f64, tol: f64, max_sweeps: usize) -> LassoSolution {
    let (n, p) = x.dim();
    let nf = n as f64;
    // Column-major centred copy; the intercept drops out after centring.
    let mut means = vec![0.0; p];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for (j, col) in x.columns().into_iter().enumerate() {
        means[j] = col.sum() / nf;
        cols.push(col.iter().map(|v| v - means[j]).collect());
    }
    let sq: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut coef = vec![0.0; p];

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for j in 0..p {
            if sq[j] <= 0.0 {
                continue;
            }
            let col = &cols[j];
            let rho = col.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf + sq[j] * coef[j];
            let updated = soft_threshold(rho, lambda) / sq[j];
            let delta = updated - coef[j];
            if delta != 0.0 {
                for (r, a) in resid.iter_mut().zip(col) {
                    *r -= delta * a;
                }
                coef[j] = updated;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < tol {
            converged = true;
            break;
        }
    }
    let intercept = y_mean - coef.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    LassoSolution {
        intercept,
        coef,
        sweeps,
        converged,
    }
}

/// Lasso learner: standardises the screened columns, fits at
/// `lambda = lambda_ratio * lambda_max`, scores with the linear predictor.
#[derive(Debug, Clone)]
pub struct LassoModel {
    mean: Vec<f64>,
    sd: Vec<f64>,
    solution: LassoSolution,
}

impl LassoModel {
    pub fn fit(x: ArrayView2<f64>, y: &[u8], lambda_ratio: f64, tol: f64, max_sweeps: usize) -> Result<Self> {
        if lambda_ratio.is_nan() || lambda_ratio < 0.0 {
            return Err(Error::Config(format!("lasso.lambda_ratio must be >= 0, got {lambda_ratio}")));
        }
        let (mean, sd) = column_moments(x);
        let z = standardize(x, &mean, &sd);
        let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let lambda = lambda_ratio * lambda_max(z.view(), &target);
        let solution = coordinate_descent(z.view(), &target, lambda, tol, max_sweeps);
        Ok(LassoModel { mean, sd, solution })
    }

    pub fn solution(&self) -> &LassoSolution {
        &self.solution
    }

    pub fn raw_coefficients(&self) -> (f64, Vec<f64>) {
        let slopes: Vec<f64> = self
            .solution
            .coef
            .iter()
            .zip(&self.sd)
            .map(|(b, s)| if *s > 0.0 { b / s } else { 0.0 })
            .collect();
        let intercept = self.solution.intercept - slopes.iter().zip(&self.mean).map(|(b, m)| b * m).sum::<f64>();
        (intercept, slopes)
    }

    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let (b0, slopes) = self.raw_coefficients();
        x.rows()
            .into_iter()
            .map(|row| b0 + row.iter().zip(&slopes).map(|(v, b)| v * b).sum::<f64>())
            .collect()
    }
}

/// Centre and scale columns; zero-variance columns become all-zero.
pub(crate) fn standardize(x: ArrayView2<f64>, mean: &[f64], sd: &[f64]) -> ndarray::Array2<f64> {
    let mut z = x.to_owned();
    for (j, mut col) in z.columns_mut().into_iter().enumerate() {
        if sd[j] > 0.0 {
            col.mapv_inplace(|v| (v - mean[j]) / sd[j]);
        } else {
            col.fill(0.0);
        }
    }
    z
}
