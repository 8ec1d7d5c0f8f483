//! One-way multivariate linear model test: Wilks' lambda and Pillai's trace
//! for a single continuous predictor, with Rao's F approximation.

use serde::{Deserialize, Serialize};

use super::dist::f_p_value;
use super::matrix::{lu_det_inverse, qr_least_squares, Matrix};
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManovaResult {
    pub wilks_lambda: f64,
    pub pillai: f64,
    pub f_approx: f64,
    pub df1: f64,
    pub df2: f64,
    pub p: f64,
    /// Constant dependent variables are dropped before fitting.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Tests the effect of `predictor` on the dependent columns jointly.
///
/// Rows must be complete cases. The model is Y = XB + E with X = [1, x];
/// the hypothesis SSCP is the model improvement over the intercept-only fit.
pub fn manova(
    columns: &[(String, Vec<f64>)],
    predictor: &[f64],
) -> Result<ManovaResult, StatsError> {
    let n = predictor.len();
    for (name, col) in columns {
        if col.len() != n {
            return Err(StatsError::DimensionMismatch(format!(
                "column `{name}` has {} rows, predictor has {n}",
                col.len()
            )));
        }
    }

    let mut dropped = Vec::new();
    let mut warnings = Vec::new();
    let mut kept: Vec<(&String, &Vec<f64>)> = Vec::new();
    for (name, col) in columns {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let scale = col.iter().map(|v| v * v).sum::<f64>().max(1.0);
        if var <= scale * 1e-12 {
            warnings.push(format!("dependent variable `{name}` is constant; dropped"));
            dropped.push(name.clone());
        } else {
            kept.push((name, col));
        }
    }
    let p_dv = kept.len();
    if p_dv == 0 {
        return Err(StatsError::Degenerate(
            "no non-constant dependent variables".into(),
        ));
    }
    if n <= p_dv + 1 {
        return Err(StatsError::InsufficientData { n, terms: p_dv + 1 });
    }

    let x = Matrix::from_columns(&[vec![1.0; n], predictor.to_vec()]);
    let mut resid_cols: Vec<Vec<f64>> = Vec::with_capacity(p_dv);
    let mut centered_cols: Vec<Vec<f64>> = Vec::with_capacity(p_dv);
    for (name, col) in &kept {
        let fit = qr_least_squares(&x, col).map_err(|_| StatsError::SingularDesign {
            column: format!("predictor (fitting `{name}`)"),
        })?;
        resid_cols.push(fit.residuals);
        let mean = col.iter().sum::<f64>() / n as f64;
        centered_cols.push(col.iter().map(|v| v - mean).collect());
    }

    let e_mat = Matrix::from_columns(&resid_cols);
    let t_mat = Matrix::from_columns(&centered_cols);
    let e_sscp = e_mat.transpose().matmul(&e_mat);
    let t_sscp = t_mat.transpose().matmul(&t_mat);
    let mut h_sscp = Matrix::zeros(p_dv, p_dv);
    for i in 0..p_dv {
        for j in 0..p_dv {
            h_sscp.set(i, j, t_sscp.get(i, j) - e_sscp.get(i, j));
        }
    }

    let (det_e, _) = lu_det_inverse(&e_sscp)
        .ok_or_else(|| StatsError::Degenerate("error SSCP matrix is singular".into()))?;
    let (det_t, t_inv) = lu_det_inverse(&t_sscp)
        .ok_or_else(|| StatsError::Degenerate("total SSCP matrix (H+E) is singular".into()))?;
    if det_e <= 0.0 || det_t <= 0.0 {
        return Err(StatsError::Degenerate(
            "SSCP determinant is not positive".into(),
        ));
    }

    let wilks = (det_e / det_t).clamp(0.0, 1.0);
    let pillai = h_sscp.matmul(&t_inv).trace();

    // Rao's approximation, hypothesis df q = 1 (single slope).
    let p = p_dv as f64;
    let q = 1.0;
    let v = (n - 2) as f64; // error df for the two-column design
    let denom = p * p + q * q - 5.0;
    let t_exp = if denom > 0.0 {
        ((p * p * q * q - 4.0) / denom).sqrt()
    } else {
        1.0
    };
    let w = v + q - (p + q + 1.0) / 2.0;
    let df1 = p * q;
    let df2 = w * t_exp - (p * q - 2.0) / 2.0;
    let lambda_root = wilks.powf(1.0 / t_exp);
    let f_approx = if lambda_root > 0.0 {
        (1.0 - lambda_root) / lambda_root * df2 / df1
    } else {
        f64::INFINITY
    };
    let p_value = if f_approx.is_finite() {
        f_p_value(f_approx, df1, df2)
    } else {
        0.0
    };

    Ok(ManovaResult {
        wilks_lambda: wilks,
        pillai,
        f_approx,
        df1,
        df2,
        p: p_value,
        dropped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::regression::{ols, Design};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn toy_predictor(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i % 11) as f64 / 10.0).collect()
    }

    #[test]
    fn single_dv_equals_univariate_f() {
        let n = 80;
        let x = toy_predictor(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y: Vec<f64> = x
            .iter()
            .map(|xi| 1.0 + 0.8 * xi + rng.gen_range(-0.5..0.5))
            .collect();
        let result = manova(&[("y".to_string(), y.clone())], &x).unwrap();

        let design = Design::with_intercept(n, &[("x", &x)]);
        let fit = ols(&y, &design).unwrap();
        let t = fit.stat["x"];
        // For a single slope, the model F is t^2.
        assert_abs_diff_eq!(result.f_approx, t * t, epsilon = 1e-9);
        assert_abs_diff_eq!(result.df1, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(result.df2, (n - 2) as f64, epsilon = 0.0);
    }

    #[test]
    fn null_data_keeps_wilks_near_one() {
        // Simulation oracle: DVs independent of the predictor.
        let n = 200;
        let x = toy_predictor(n);
        let mut p_values = Vec::new();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<(String, Vec<f64>)> = (0..6)
                .map(|j| {
                    (
                        format!("dv{j}"),
                        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    )
                })
                .collect();
            let result = manova(&cols, &x).unwrap();
            assert!(
                result.wilks_lambda >= 0.9 && result.wilks_lambda <= 1.0,
                "seed {seed}: wilks {}",
                result.wilks_lambda
            );
            p_values.push(result.p);
        }
        // p should spread over (0,1) rather than cluster at either end.
        assert!(p_values.iter().any(|p| *p < 0.5));
        assert!(p_values.iter().any(|p| *p > 0.5));
    }

    #[test]
    fn wilks_and_pillai_agree_in_decision_direction() {
        let n = 150;
        let x = toy_predictor(n);
        for seed in 0..15u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let effect = (seed % 3) as f64 * 0.3;
            let cols: Vec<(String, Vec<f64>)> = (0..4)
                .map(|j| {
                    (
                        format!("dv{j}"),
                        x.iter()
                            .map(|xi| effect * xi * (j as f64 + 1.0) + rng.gen_range(-1.0..1.0))
                            .collect(),
                    )
                })
                .collect();
            let result = manova(&cols, &x).unwrap();
            // Pillai for q=1 is a monotone transform of Wilks; decisions line up.
            for alpha in [0.05, 0.01] {
                if result.p < alpha {
                    let pillai_lambda = 1.0 - result.pillai;
                    assert!(pillai_lambda <= result.wilks_lambda + 1e-12, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn two_dependent_variables_hit_the_rao_guard() {
        // p = 2, q = 1 makes the exponent formula 0/0; the guard pins t = 1.
        let n = 60;
        let x = toy_predictor(n);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cols: Vec<(String, Vec<f64>)> = (0..2)
            .map(|j| {
                (
                    format!("dv{j}"),
                    x.iter()
                        .map(|xi| 0.5 * xi * (j as f64 + 1.0) + rng.gen_range(-1.0..1.0))
                        .collect(),
                )
            })
            .collect();
        let result = manova(&cols, &x).unwrap();
        assert!(result.f_approx.is_finite());
        assert!(result.wilks_lambda > 0.0 && result.wilks_lambda <= 1.0);
        assert_eq!(result.df1, 2.0);
        assert_eq!(result.df2, (n - 3) as f64); // v - p + 1 with t = 1
        assert!((0.0..=1.0).contains(&result.p));
    }

    #[test]
    fn constant_column_is_dropped_with_warning() {
        let n = 50;
        let x = toy_predictor(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let live: Vec<f64> = x.iter().map(|xi| xi + rng.gen_range(-1.0..1.0)).collect();
        let cols = vec![
            ("flat".to_string(), vec![2.5; n]),
            ("live".to_string(), live),
        ];
        let result = manova(&cols, &x).unwrap();
        assert_eq!(result.dropped, vec!["flat".to_string()]);
        assert!(!result.warnings.is_empty());
    }

    #[test]
    fn duplicated_dv_is_degenerate() {
        let n = 40;
        let x = toy_predictor(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let col: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cols = vec![("a".to_string(), col.clone()), ("b".to_string(), col)];
        assert!(matches!(
            manova(&cols, &x).unwrap_err(),
            StatsError::Degenerate(_)
        ));
    }
}
