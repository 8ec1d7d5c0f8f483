//! Descriptive statistics over possibly-missing observations.

use serde::{Deserialize, Serialize};

/// NA observations are dropped before computing anything; `sd` uses the
/// sample (n-1) denominator and is absent for n < 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

pub fn describe(values: &[Option<f64>]) -> DescriptiveStats {
    let mut present: Vec<f64> = values.iter().flatten().copied().collect();
    let n = present.len();
    if n == 0 {
        return DescriptiveStats {
            n: 0,
            mean: None,
            sd: None,
            median: None,
            min: None,
            max: None,
        };
    }
    let mean = present.iter().sum::<f64>() / n as f64;
    let sd = if n >= 2 {
        let ss: f64 = present.iter().map(|v| (v - mean) * (v - mean)).sum();
        Some((ss / (n - 1) as f64).sqrt())
    } else {
        None
    };
    present.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    let median = if n % 2 == 1 {
        present[n / 2]
    } else {
        (present[n / 2 - 1] + present[n / 2]) / 2.0
    };
    DescriptiveStats {
        n,
        mean: Some(mean),
        sd,
        median: Some(median),
        min: Some(present[0]),
        max: Some(present[n - 1]),
    }
}
