//! Deterministic statistics engine, built from scratch on a small dense
//! matrix kernel: no fit here depends on input ordering beyond the order of
//! the rows handed in, and identical inputs yield identical bits.

mod correlation;
mod describe;
mod dist;
mod manova;
pub mod matrix;
mod regression;

pub use correlation::{pearson_matrix, CorrelationMatrix};
pub use describe::{describe, DescriptiveStats};
pub use dist::{dist_cdf, f_p_value, inc_beta, ln_gamma, t_p_value, z_p_value, Dist};
pub use manova::{manova, ManovaResult};
pub use regression::{logistic, logistic_detailed, ols, Design, RegressionResult};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("singular design: column `{column}` is linearly dependent on earlier columns")]
    SingularDesign { column: String },
    #[error("insufficient data: {n} rows for {terms} terms")]
    InsufficientData { n: usize, terms: usize },
    #[error("response must be binary 0/1, found {value}")]
    NonBinaryResponse { value: f64 },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Significance stars, matching the report-table legend:
/// `*` p < .05, `**` p < .01, `***` p < .001.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stars_thresholds() {
        assert_eq!(significance_stars(0.0005), "***");
        assert_eq!(significance_stars(0.005), "**");
        assert_eq!(significance_stars(0.03), "*");
        assert_eq!(significance_stars(0.05), "");
        assert_eq!(significance_stars(0.7), "");
    }
}
