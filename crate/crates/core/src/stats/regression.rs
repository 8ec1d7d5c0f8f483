//! Ordinary least squares and logistic regression (IRLS).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dist::{t_p_value, z_p_value};
use super::matrix::{qr_least_squares, Matrix};
use super::StatsError;

/// Predictor matrix with named columns; the intercept is always first.
#[derive(Debug, Clone)]
pub struct Design {
    names: Vec<String>,
    matrix: Matrix,
}

impl Design {
    /// Builds an intercept-plus-predictors design from named columns.
    pub fn with_intercept(n: usize, columns: &[(&str, &[f64])]) -> Self {
        let mut cols = vec![vec![1.0; n]];
        let mut names = vec!["(Intercept)".to_string()];
        for (name, values) in columns {
            assert_eq!(values.len(), n, "column `{name}` length mismatch");
            cols.push(values.to_vec());
            names.push((*name).to_string());
        }
        Design {
            names,
            matrix: Matrix::from_columns(&cols),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn terms(&self) -> usize {
        self.matrix.cols()
    }

    pub(crate) fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Fitted-model summary shared by OLS and logistic fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub terms: Vec<String>,
    pub coef: BTreeMap<String, f64>,
    pub se: BTreeMap<String, f64>,
    /// t statistics for OLS, z statistics for logistic fits.
    pub stat: BTreeMap<String, f64>,
    pub p: BTreeMap<String, f64>,
    pub n: usize,
    pub df_resid: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn keyed(names: &[String], values: &[f64]) -> BTreeMap<String, f64> {
    names.iter().cloned().zip(values.iter().copied()).collect()
}

/// Ordinary least squares with classical standard errors.
///
/// Coefficients solve the normal equations (computed through a Householder
/// QR for stability); p-values come from the t distribution on the residual
/// degrees of freedom.
pub fn ols(y: &[f64], design: &Design) -> Result<RegressionResult, StatsError> {
    let n = design.n();
    let k = design.terms();
    if y.len() != n {
        return Err(StatsError::DimensionMismatch(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(StatsError::InsufficientData { n, terms: k });
    }
    let fit = qr_least_squares(design.matrix(), y).map_err(|e| StatsError::SingularDesign {
        column: design.names[e.column].clone(),
    })?;
    let df_resid = n - k;
    let rss: f64 = fit.residuals.iter().map(|r| r * r).sum();
    let sigma2 = rss / df_resid as f64;
    let se: Vec<f64> = (0..k)
        .map(|j| (sigma2 * fit.xtx_inv.get(j, j)).sqrt())
        .collect();
    let stat: Vec<f64> = fit
        .beta
        .iter()
        .zip(&se)
        .map(|(b, s)| {
            if *s > 0.0 {
                b / s
            } else {
                f64::INFINITY * b.signum()
            }
        })
        .collect();
    let p: Vec<f64> = stat
        .iter()
        .map(|t| {
            if t.is_finite() {
                t_p_value(*t, df_resid as f64)
            } else {
                0.0
            }
        })
        .collect();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    Ok(RegressionResult {
        terms: design.names.clone(),
        coef: keyed(&design.names, &fit.beta),
        se: keyed(&design.names, &se),
        stat: keyed(&design.names, &stat),
        p: keyed(&design.names, &p),
        n,
        df_resid,
        r_squared: Some(r_squared),
        residual_se: Some(sigma2.sqrt()),
        converged: None,
        iterations: None,
        warnings: Vec::new(),
    })
}

const IRLS_TOL: f64 = 1e-8;
const IRLS_MAX_ITER: u32 = 50;
const SEPARATION_BETA: f64 = 30.0;

fn log_likelihood(eta: &[f64], y: &[f64]) -> f64 {
    eta.iter()
        .zip(y)
        .map(|(e, yi)| {
            // y*eta - ln(1 + exp(eta)), overflow-safe
            let log1p_exp = if *e > 30.0 { *e } else { e.exp().ln_1p() };
            yi * e - log1p_exp
        })
        .sum()
}

/// Logistic regression by iteratively reweighted least squares.
///
/// Convergence is declared when no coefficient moves by more than 1e-8;
/// suspected complete separation (coefficients running past 30 in absolute
/// value, or the working weights collapsing) stops the fit with
/// `converged = false` and a warning.
pub fn logistic(y: &[f64], design: &Design) -> Result<RegressionResult, StatsError> {
    logistic_detailed(y, design).map(|(result, _)| result)
}

/// Same fit, additionally returning the log-likelihood after each iteration.
pub fn logistic_detailed(
    y: &[f64],
    design: &Design,
) -> Result<(RegressionResult, Vec<f64>), StatsError> {
    let n = design.n();
    let k = design.terms();
    if y.len() != n {
        return Err(StatsError::DimensionMismatch(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(StatsError::InsufficientData { n, terms: k });
    }
    for v in y {
        if *v != 0.0 && *v != 1.0 {
            return Err(StatsError::NonBinaryResponse { value: *v });
        }
    }

    let x = design.matrix();
    let mut beta = vec![0.0; k];
    let mut iterations = 0;
    let mut converged = false;
    let mut warnings = Vec::new();
    let mut ll_trace = Vec::new();

    while iterations < IRLS_MAX_ITER {
        iterations += 1;
        let eta = x.mul_vec(&beta);
        let mu: Vec<f64> = eta.iter().map(|e| 1.0 / (1.0 + (-e).exp())).collect();
        let w: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();
        if w.iter().all(|wi| *wi < 1e-10) {
            warnings.push("complete separation suspected: working weights collapsed".into());
            break;
        }
        // Weighted least squares on the working response z = eta + (y - mu)/w.
        let sw: Vec<f64> = w.iter().map(|wi| wi.max(1e-10).sqrt()).collect();
        let mut wx = Matrix::zeros(n, k);
        let mut wz = vec![0.0; n];
        for i in 0..n {
            let z = eta[i] + (y[i] - mu[i]) / w[i].max(1e-10);
            wz[i] = sw[i] * z;
            for j in 0..k {
                wx.set(i, j, sw[i] * x.get(i, j));
            }
        }
        let fit = qr_least_squares(&wx, &wz).map_err(|e| StatsError::SingularDesign {
            column: design.names[e.column].clone(),
        })?;
        let delta: f64 = fit
            .beta
            .iter()
            .zip(&beta)
            .map(|(new, old)| (new - old).abs())
            .fold(0.0, f64::max);
        beta = fit.beta;
        ll_trace.push(log_likelihood(&x.mul_vec(&beta), y));
        if beta.iter().any(|b| b.abs() > SEPARATION_BETA) {
            warnings.push("complete separation suspected: coefficient magnitude diverging".into());
            break;
        }
        if delta < IRLS_TOL {
            converged = true;
            break;
        }
    }
    if !converged && warnings.is_empty() {
        warnings.push(format!(
            "IRLS did not converge within {IRLS_MAX_ITER} iterations"
        ));
    }

    // Standard errors from the inverse Fisher information at the final beta.
    let eta = x.mul_vec(&beta);
    let mu: Vec<f64> = eta.iter().map(|e| 1.0 / (1.0 + (-e).exp())).collect();
    let mut wx = Matrix::zeros(n, k);
    for (i, m) in mu.iter().enumerate() {
        let sw = (m * (1.0 - m)).max(1e-12).sqrt();
        for j in 0..k {
            wx.set(i, j, sw * x.get(i, j));
        }
    }
    let info_fit =
        qr_least_squares(&wx, &vec![0.0; n]).map_err(|e| StatsError::SingularDesign {
            column: design.names[e.column].clone(),
        })?;
    let se: Vec<f64> = (0..k).map(|j| info_fit.xtx_inv.get(j, j).sqrt()).collect();
    let stat: Vec<f64> = beta
        .iter()
        .zip(&se)
        .map(|(b, s)| if *s > 0.0 { b / s } else { 0.0 })
        .collect();
    let p: Vec<f64> = stat.iter().map(|z| z_p_value(*z)).collect();

    let result = RegressionResult {
        terms: design.names.clone(),
        coef: keyed(&design.names, &beta),
        se: keyed(&design.names, &se),
        stat: keyed(&design.names, &stat),
        p: keyed(&design.names, &p),
        n,
        df_resid: n - k,
        r_squared: None,
        residual_se: None,
        converged: Some(converged),
        iterations: Some(iterations),
        warnings,
    };
    Ok((result, ll_trace))
}
