//! Pairwise-complete Pearson correlation matrices with significance.

use serde::{Deserialize, Serialize};

use super::dist::t_p_value;
use super::StatsError;

/// Symmetric correlation matrix.
///
/// Off-diagonal cells hold r (absent when undefined); the diagonal carries the
/// per-column sample variance. `p` holds two-sided p-values (diagonal absent)
/// and `n` the pairwise complete-case counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
    pub p: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64
}

/// Pairwise complete-case Pearson correlations over `columns`.
///
/// Cells with fewer than three complete pairs or a zero-variance member are
/// left absent; the diagonal still reports the (possibly zero) variance.
pub fn pearson_matrix(
    columns: &[Vec<Option<f64>>],
    labels: &[String],
) -> Result<CorrelationMatrix, StatsError> {
    let k = columns.len();
    if k != labels.len() {
        return Err(StatsError::DimensionMismatch(format!(
            "{k} columns but {} labels",
            labels.len()
        )));
    }
    let len = columns.first().map_or(0, Vec::len);
    for (j, col) in columns.iter().enumerate() {
        if col.len() != len {
            return Err(StatsError::DimensionMismatch(format!(
                "column `{}` has {} rows, expected {len}",
                labels[j],
                col.len()
            )));
        }
    }

    let mut r = vec![vec![None; k]; k];
    let mut p = vec![vec![None; k]; k];
    let mut n = vec![vec![0usize; k]; k];

    for i in 0..k {
        let complete: Vec<f64> = columns[i].iter().flatten().copied().collect();
        n[i][i] = complete.len();
        r[i][i] = Some(variance(&complete));
    }

    for i in 0..k {
        for j in (i + 1)..k {
            let pairs: Vec<(f64, f64)> = columns[i]
                .iter()
                .zip(&columns[j])
                .filter_map(|(a, b)| a.zip(*b))
                .collect();
            let m = pairs.len();
            n[i][j] = m;
            n[j][i] = m;
            if m < 3 {
                continue;
            }
            let mean_x = pairs.iter().map(|(a, _)| a).sum::<f64>() / m as f64;
            let mean_y = pairs.iter().map(|(_, b)| b).sum::<f64>() / m as f64;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            let mut sxy = 0.0;
            for (a, b) in &pairs {
                sxx += (a - mean_x) * (a - mean_x);
                syy += (b - mean_y) * (b - mean_y);
                sxy += (a - mean_x) * (b - mean_y);
            }
            if sxx <= 0.0 || syy <= 0.0 {
                continue;
            }
            let rij = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
            let df = (m - 2) as f64;
            let p_value = if rij.abs() >= 1.0 {
                0.0
            } else {
                let t = rij * (df / (1.0 - rij * rij)).sqrt();
                t_p_value(t, df)
            };
            r[i][j] = Some(rij);
            r[j][i] = Some(rij);
            p[i][j] = Some(p_value);
            p[j][i] = Some(p_value);
        }
    }

    Ok(CorrelationMatrix {
        labels: labels.to_vec(),
        r,
        p,
        n,
    })
}
