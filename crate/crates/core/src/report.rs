//! Result tables and the machine-readable analysis bundle.
//!
//! Tables mirror the published layouts: descriptives by temperature with a
//! Total row, correlation matrices with significance stars in the lower
//! triangle and reference values in the upper, and baseline comparison rows
//! with standardized gaps. Every number re-derives from the profiles alone;
//! rounding is half-even and applied only at render time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instrument::BaselineTable;
use crate::score::{DemographicRow, RespondentProfile};
use crate::stats::{
    describe, logistic, manova, ols, pearson_matrix, significance_stars, CorrelationMatrix,
    DescriptiveStats, Design, ManovaResult, RegressionResult, StatsError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    ByTemperature,
    Correlation,
    RegressionSummary,
    Demographics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub kind: TableKind,
    pub instrument_id: String,
    pub rounding: u32,
    pub include_baselines: bool,
}

impl TableSpec {
    pub fn new(kind: TableKind, instrument_id: &str) -> Self {
        TableSpec {
            kind,
            instrument_id: instrument_id.to_string(),
            rounding: 2,
            include_baselines: false,
        }
    }
}

/// A rendered table, serializable to CSV (canonical) and Markdown (mirror).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.headers).expect("csv header");
        for row in &self.rows {
            writer.write_record(row).expect("csv row");
        }
        String::from_utf8(writer.into_inner().expect("csv buffer")).expect("utf-8 csv")
    }

    pub fn to_markdown_string(&self) -> String {
        let mut out = String::new();
        out.push('|');
        for h in &self.headers {
            out.push_str(&format!(" {h} |"));
        }
        out.push('\n');
        out.push('|');
        for _ in &self.headers {
            out.push_str(" --- |");
        }
        out.push('\n');
        for row in &self.rows {
            out.push('|');
            for cell in row {
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(
        "correlation labels do not match the reference: ours {ours:?}, reference {reference:?}"
    )]
    LabelMismatch {
        ours: Vec<String>,
        reference: Vec<String>,
    },
    #[error("no profiles to report")]
    Empty,
    #[error("stats failure: {0}")]
    Stats(#[from] StatsError),
}

/// Rounds half-even to `decimals` places.
pub fn round_half_even(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round_ties_even() / scale
}

/// Renders a value the way the published tables print them: fixed decimals,
/// then trailing zeros trimmed down to at least one decimal ("6.0", "0.1",
/// "4.99").
pub fn fmt_trimmed(value: f64, decimals: u32) -> String {
    let mut s = format!("{:.*}", decimals as usize, round_half_even(value, decimals));
    if s.contains('.') {
        while s.ends_with('0') && !s[..s.len() - 1].ends_with('.') {
            s.pop();
        }
    }
    if s == "-0.0" {
        s = "0.0".into();
    }
    s
}

fn fmt_fixed(value: f64, decimals: u32) -> String {
    let mut s = format!("{:.*}", decimals as usize, round_half_even(value, decimals));
    if s.starts_with("-0.") && s[1..].parse::<f64>() == Ok(0.0) {
        s = s[1..].to_string();
    }
    s
}

fn fmt_temperature(t: f64) -> String {
    let short = format!("{t:.1}");
    if short.parse::<f64>() == Ok(t) {
        short
    } else {
        format!("{t}")
    }
}

fn sorted_temperatures(profiles: &[RespondentProfile]) -> Vec<f64> {
    let mut bits: Vec<u64> = profiles.iter().map(|p| p.temperature.to_bits()).collect();
    bits.sort_unstable();
    bits.dedup();
    bits.into_iter().map(f64::from_bits).collect()
}

fn construct_column(profiles: &[RespondentProfile], construct: &str) -> Vec<Option<f64>> {
    profiles
        .iter()
        .map(|p| p.scores.get(construct).copied().flatten())
        .collect()
}

/// Descriptives-by-temperature table: one row per temperature plus a Total
/// row, cells "mean (sd)"; rows with a single respondent show the mean only.
pub fn table_by_temperature(
    profiles: &[RespondentProfile],
    constructs: &[String],
    spec: &TableSpec,
    baselines: Option<&[BaselineTable]>,
) -> Result<Table, ReportError> {
    if profiles.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut headers = vec!["Temp.".to_string()];
    headers.extend(constructs.iter().cloned());
    let mut rows = Vec::new();

    let mut emit = |label: String, subset: &[&RespondentProfile]| {
        let mut row = vec![label];
        for construct in constructs {
            let values: Vec<Option<f64>> = subset
                .iter()
                .map(|p| p.scores.get(construct).copied().flatten())
                .collect();
            let stats = describe(&values);
            row.push(match (stats.mean, stats.sd) {
                (Some(mean), Some(sd)) => format!(
                    "{} ({})",
                    fmt_trimmed(mean, spec.rounding),
                    fmt_trimmed(sd, spec.rounding)
                ),
                (Some(mean), None) => fmt_trimmed(mean, spec.rounding),
                _ => String::new(),
            });
        }
        rows.push(row);
    };

    for t in sorted_temperatures(profiles) {
        let subset: Vec<&RespondentProfile> = profiles
            .iter()
            .filter(|p| p.temperature.to_bits() == t.to_bits())
            .collect();
        emit(fmt_temperature(t), &subset);
    }
    let all: Vec<&RespondentProfile> = profiles.iter().collect();
    emit("Total".to_string(), &all);

    if spec.include_baselines {
        if let Some(tables) = baselines {
            for table in tables {
                let mut row = vec![table.source.clone()];
                for construct in constructs {
                    row.push(match table.entries.get(construct) {
                        Some(entry) => format!(
                            "{} ({})",
                            fmt_trimmed(entry.mean, spec.rounding),
                            fmt_trimmed(entry.sd, spec.rounding)
                        ),
                        None => String::new(),
                    });
                }
                rows.push(row);
            }
        }
    }

    Ok(Table {
        id: format!("{}_by_temperature", spec.instrument_id),
        headers,
        rows,
    })
}

/// Published reference correlations: upper-triangle cells kept verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMatrix {
    pub labels: Vec<String>,
    /// Row-major upper triangle, k(k-1)/2 cells.
    pub upper: Vec<String>,
}

impl ReferenceMatrix {
    pub fn load(document: &str) -> Result<Self, String> {
        let matrix: ReferenceMatrix = toml::from_str(document).map_err(|e| e.to_string())?;
        let k = matrix.labels.len();
        let expected = k * (k - 1) / 2;
        if matrix.upper.len() != expected {
            return Err(format!(
                "expected {expected} upper-triangle cells for {k} labels, got {}",
                matrix.upper.len()
            ));
        }
        Ok(matrix)
    }

    pub fn bundled_hexaco() -> Self {
        Self::load(crate::instrument::bundled::HEXACO_REFERENCE_CORRELATIONS)
            .expect("bundled reference matrix is valid")
    }

    pub fn bundled_hvs() -> Self {
        Self::load(crate::instrument::bundled::HVS_REFERENCE_CORRELATIONS)
            .expect("bundled reference matrix is valid")
    }

    fn cell(&self, i: usize, j: usize) -> &str {
        // (i, j) with i < j, row-major over the upper triangle.
        let k = self.labels.len();
        let index = i * k - i * (i + 1) / 2 + (j - i - 1);
        &self.upper[index]
    }
}

/// Matrix-layout correlation table: artifact r with stars below the diagonal,
/// reference values verbatim above, per-construct variance on the diagonal.
pub fn correlation_table(
    matrix: &CorrelationMatrix,
    reference: Option<&ReferenceMatrix>,
    rounding: u32,
) -> Result<Table, ReportError> {
    if let Some(reference) = reference {
        if reference.labels != matrix.labels {
            return Err(ReportError::LabelMismatch {
                ours: matrix.labels.clone(),
                reference: reference.labels.clone(),
            });
        }
    }
    let k = matrix.labels.len();
    let mut headers = vec![String::new()];
    headers.extend(matrix.labels.iter().cloned());
    let mut rows = Vec::new();
    for i in 0..k {
        let mut row = vec![matrix.labels[i].clone()];
        for j in 0..k {
            let cell = if i == j {
                matrix.r[i][i]
                    .map(|v| fmt_trimmed(v, rounding))
                    .unwrap_or_default()
            } else if i > j {
                match matrix.r[i][j] {
                    Some(r) => {
                        let stars = matrix.p[i][j].map(significance_stars).unwrap_or("");
                        format!("{}{stars}", fmt_trimmed(r, rounding))
                    }
                    None => String::new(),
                }
            } else {
                reference
                    .map(|m| m.cell(i, j).to_string())
                    .unwrap_or_default()
            };
            row.push(cell);
        }
        rows.push(row);
    }
    Ok(Table {
        id: "correlations".into(),
        headers,
        rows,
    })
}

/// Long-format correlation table for the canonical CSV: stars ride in their
/// own column so the r column stays numeric.
pub fn correlation_table_long(matrix: &CorrelationMatrix) -> Table {
    let k = matrix.labels.len();
    let mut rows = Vec::new();
    for i in 0..k {
        rows.push(vec![
            matrix.labels[i].clone(),
            matrix.labels[i].clone(),
            matrix.r[i][i].map(|v| format!("{v}")).unwrap_or_default(),
            String::new(),
            String::new(),
            format!("{}", matrix.n[i][i]),
        ]);
    }
    for i in 0..k {
        for j in (i + 1)..k {
            rows.push(vec![
                matrix.labels[i].clone(),
                matrix.labels[j].clone(),
                matrix.r[i][j].map(|v| format!("{v}")).unwrap_or_default(),
                matrix.p[i][j].map(|v| format!("{v}")).unwrap_or_default(),
                matrix.p[i][j].map(significance_stars).unwrap_or("").into(),
                format!("{}", matrix.n[i][j]),
            ]);
        }
    }
    Table {
        id: "correlations_long".into(),
        headers: vec![
            "construct_a".into(),
            "construct_b".into(),
            "r".into(),
            "p".into(),
            "stars".into(),
            "n".into(),
        ],
        rows,
    }
}

/// One construct compared against one published baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub construct: String,
    pub source: String,
    pub artifact_mean: f64,
    pub artifact_sd: Option<f64>,
    pub baseline_mean: f64,
    pub baseline_sd: f64,
    /// (artifact_mean - baseline_mean) / baseline_sd; absent when the
    /// baseline sd is zero.
    pub standardized_gap: Option<f64>,
}

/// Spread of construct means within one source family (gendered rows pool).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSummary {
    pub source_group: String,
    pub range_of_means: f64,
}

fn source_group(source: &str) -> String {
    source
        .strip_suffix("-male")
        .or_else(|| source.strip_suffix("-female"))
        .unwrap_or(source)
        .to_string()
}

/// Compares aggregate artifact scores against every baseline table, plus the
/// range-of-means summary per source family (and for the artifact itself).
pub fn compare_to_baseline(
    profiles: &[RespondentProfile],
    baselines: &[BaselineTable],
) -> (Vec<ComparisonRow>, Vec<RangeSummary>) {
    let mut constructs: Vec<String> = profiles
        .first()
        .map(|p| p.scores.keys().cloned().collect())
        .unwrap_or_default();
    constructs.sort();

    let mut artifact: BTreeMap<String, DescriptiveStats> = BTreeMap::new();
    for construct in &constructs {
        artifact.insert(
            construct.clone(),
            describe(&construct_column(profiles, construct)),
        );
    }

    let mut rows = Vec::new();
    for table in baselines {
        for construct in &constructs {
            let (Some(entry), Some(stats)) =
                (table.entries.get(construct), artifact.get(construct))
            else {
                continue;
            };
            let Some(mean) = stats.mean else { continue };
            rows.push(ComparisonRow {
                construct: construct.clone(),
                source: table.source.clone(),
                artifact_mean: mean,
                artifact_sd: stats.sd,
                baseline_mean: entry.mean,
                baseline_sd: entry.sd,
                standardized_gap: if entry.sd > 0.0 {
                    Some((mean - entry.mean) / entry.sd)
                } else {
                    None
                },
            });
        }
    }

    let mut summaries = Vec::new();
    let artifact_means: Vec<f64> = artifact.values().filter_map(|s| s.mean).collect();
    if let (Some(max), Some(min)) = (
        artifact_means.iter().copied().reduce(f64::max),
        artifact_means.iter().copied().reduce(f64::min),
    ) {
        summaries.push(RangeSummary {
            source_group: "artifact".into(),
            range_of_means: max - min,
        });
    }
    // Published ranges pool every construct of every row in the family,
    // independent of which constructs the artifact happens to cover.
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for table in baselines {
        let group = source_group(&table.source);
        let entry = groups.entry(group).or_default();
        entry.extend(table.entries.values().map(|e| e.mean));
    }
    for (group, means) in groups {
        if let (Some(max), Some(min)) = (
            means.iter().copied().reduce(f64::max),
            means.iter().copied().reduce(f64::min),
        ) {
            summaries.push(RangeSummary {
                source_group: group,
                range_of_means: max - min,
            });
        }
    }
    (rows, summaries)
}

pub fn comparison_table(rows: &[ComparisonRow], rounding: u32) -> Table {
    Table {
        id: "baseline_comparison".into(),
        headers: vec![
            "construct".into(),
            "source".into(),
            "artifact_mean".into(),
            "artifact_sd".into(),
            "baseline_mean".into(),
            "baseline_sd".into(),
            "standardized_gap".into(),
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.construct.clone(),
                    r.source.clone(),
                    fmt_fixed(r.artifact_mean, rounding),
                    r.artifact_sd
                        .map(|v| fmt_fixed(v, rounding))
                        .unwrap_or_default(),
                    fmt_fixed(r.baseline_mean, rounding),
                    fmt_fixed(r.baseline_sd, rounding),
                    r.standardized_gap
                        .map(|v| fmt_fixed(v, rounding))
                        .unwrap_or_default(),
                ]
            })
            .collect(),
    }
}

/// Demographics-by-temperature table (age statistics plus share of female
/// answers), one row per temperature and a Total row.
pub fn demographics_table(rows: &[DemographicRow], rounding: u32) -> Table {
    let mut bits: Vec<u64> = rows.iter().map(|r| r.temperature.to_bits()).collect();
    bits.sort_unstable();
    bits.dedup();

    let mut out = Vec::new();
    let mut emit = |label: String, subset: Vec<&DemographicRow>| {
        let ages: Vec<Option<f64>> = subset.iter().map(|r| r.age_years.map(f64::from)).collect();
        let stats = describe(&ages);
        let genders: Vec<&String> = subset
            .iter()
            .filter_map(|r| r.gender_category.as_ref())
            .collect();
        let p_female = if genders.is_empty() {
            None
        } else {
            Some(
                genders.iter().filter(|g| g.as_str() == "female").count() as f64
                    / genders.len() as f64,
            )
        };
        out.push(vec![
            label,
            stats
                .mean
                .map(|v| fmt_fixed(v, rounding))
                .unwrap_or_default(),
            stats
                .sd
                .map(|v| fmt_fixed(v, rounding))
                .unwrap_or_else(|| "NA".into()),
            stats.median.map(|v| fmt_trimmed(v, 1)).unwrap_or_default(),
            stats.min.map(|v| format!("{v}")).unwrap_or_default(),
            stats.max.map(|v| format!("{v}")).unwrap_or_default(),
            format!("{}", subset.len()),
            p_female.map(|v| fmt_fixed(v, rounding)).unwrap_or_default(),
        ]);
    };

    for bit in bits {
        let subset: Vec<&DemographicRow> = rows
            .iter()
            .filter(|r| r.temperature.to_bits() == bit)
            .collect();
        emit(fmt_temperature(f64::from_bits(bit)), subset);
    }
    emit("Total".into(), rows.iter().collect());

    Table {
        id: "demographics_by_temperature".into(),
        headers: vec![
            "Temp.".into(),
            "M_age".into(),
            "SD_age".into(),
            "Med_age".into(),
            "min_age".into(),
            "max_age".into(),
            "n".into(),
            "P_female".into(),
        ],
        rows: out,
    }
}

/// Demographic regressions: age on temperature (OLS), non-female on
/// temperature (logistic), and the joint age model with interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicsAnalysis {
    pub age_on_temperature: Option<RegressionResult>,
    pub non_female_on_temperature: Option<RegressionResult>,
    pub age_joint_model: Option<RegressionResult>,
    pub odds_ratio_temperature: Option<f64>,
}

/// Analyzes demographics rows; rows missing the relevant answer are dropped
/// per model.
pub fn analyze_demographics(rows: &[DemographicRow]) -> Result<DemographicsAnalysis, StatsError> {
    let aged: Vec<&DemographicRow> = rows.iter().filter(|r| r.age_years.is_some()).collect();
    let age_on_temperature = if aged.len() > 3 {
        let y: Vec<f64> = aged
            .iter()
            .map(|r| f64::from(r.age_years.unwrap()))
            .collect();
        let x: Vec<f64> = aged.iter().map(|r| r.temperature).collect();
        Some(ols(
            &y,
            &Design::with_intercept(y.len(), &[("temperature", &x)]),
        )?)
    } else {
        None
    };

    let gendered: Vec<&DemographicRow> = rows
        .iter()
        .filter(|r| r.gender_category.is_some())
        .collect();
    // DV is non-female = 1, so a positive slope means the odds of a
    // non-female answer grow with temperature.
    let non_female_on_temperature = if gendered.len() > 3 {
        let y: Vec<f64> = gendered
            .iter()
            .map(|r| {
                if r.gender_category.as_deref() == Some("female") {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        let x: Vec<f64> = gendered.iter().map(|r| r.temperature).collect();
        Some(logistic(
            &y,
            &Design::with_intercept(y.len(), &[("temperature", &x)]),
        )?)
    } else {
        None
    };
    let odds_ratio_temperature = non_female_on_temperature
        .as_ref()
        .and_then(|fit| fit.coef.get("temperature").map(|b| b.exp()));

    let complete: Vec<&DemographicRow> = rows
        .iter()
        .filter(|r| r.age_years.is_some() && r.gender_category.is_some())
        .collect();
    let age_joint_model = if complete.len() > 5 {
        let y: Vec<f64> = complete
            .iter()
            .map(|r| f64::from(r.age_years.unwrap()))
            .collect();
        let temp: Vec<f64> = complete.iter().map(|r| r.temperature).collect();
        let non_female: Vec<f64> = complete
            .iter()
            .map(|r| {
                if r.gender_category.as_deref() == Some("female") {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        let interaction: Vec<f64> = temp.iter().zip(&non_female).map(|(t, g)| t * g).collect();
        match ols(
            &y,
            &Design::with_intercept(
                y.len(),
                &[
                    ("temperature", &temp),
                    ("non_female", &non_female),
                    ("temperature:non_female", &interaction),
                ],
            ),
        ) {
            Ok(fit) => Some(fit),
            // Single-gender data makes the joint design collinear; the
            // primary models above still stand.
            Err(StatsError::SingularDesign { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    Ok(DemographicsAnalysis {
        age_on_temperature,
        non_female_on_temperature,
        age_joint_model,
        odds_ratio_temperature,
    })
}

/// The full analysis battery over one profiles set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub manifest_hash: Option<String>,
    /// construct -> temperature label -> descriptives (plus "Total").
    pub descriptives: BTreeMap<String, BTreeMap<String, DescriptiveStats>>,
    /// `"<construct>~temperature"` -> per-construct OLS fit.
    pub regressions: BTreeMap<String, RegressionResult>,
    pub manova: Option<ManovaResult>,
    pub correlations: Option<CorrelationMatrix>,
    pub demographics: Option<DemographicsAnalysis>,
    pub comparisons: Vec<ComparisonRow>,
    pub range_summaries: Vec<RangeSummary>,
    pub warnings: Vec<String>,
}

/// Runs descriptives, per-construct OLS against temperature, MANOVA, and the
/// inter-construct correlation matrix over respondent profiles.
pub fn analyze_profiles(
    profiles: &[RespondentProfile],
    constructs: &[String],
    manifest_hash: Option<String>,
) -> Result<AnalysisBundle, ReportError> {
    if profiles.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut warnings = Vec::new();

    let mut descriptives = BTreeMap::new();
    for construct in constructs {
        let mut per_temp = BTreeMap::new();
        for t in sorted_temperatures(profiles) {
            let values: Vec<Option<f64>> = profiles
                .iter()
                .filter(|p| p.temperature.to_bits() == t.to_bits())
                .map(|p| p.scores.get(construct).copied().flatten())
                .collect();
            per_temp.insert(fmt_temperature(t), describe(&values));
        }
        per_temp.insert(
            "Total".to_string(),
            describe(&construct_column(profiles, construct)),
        );
        descriptives.insert(construct.clone(), per_temp);
    }

    let mut regressions = BTreeMap::new();
    for construct in constructs {
        let pairs: Vec<(f64, f64)> = profiles
            .iter()
            .filter_map(|p| {
                p.scores
                    .get(construct)
                    .copied()
                    .flatten()
                    .map(|s| (p.temperature, s))
            })
            .collect();
        if pairs.len() < 4 {
            warnings.push(format!(
                "construct `{construct}`: too few complete observations for regression"
            ));
            continue;
        }
        let x: Vec<f64> = pairs.iter().map(|(t, _)| *t).collect();
        let y: Vec<f64> = pairs.iter().map(|(_, s)| *s).collect();
        match ols(&y, &Design::with_intercept(y.len(), &[("temperature", &x)])) {
            Ok(fit) => {
                regressions.insert(format!("{construct}~temperature"), fit);
            }
            Err(e) => warnings.push(format!("construct `{construct}`: {e}")),
        }
    }

    // Complete cases only for the multivariate test.
    let complete: Vec<&RespondentProfile> = profiles
        .iter()
        .filter(|p| {
            constructs
                .iter()
                .all(|c| p.scores.get(c).copied().flatten().is_some())
        })
        .collect();
    let manova_result = if complete.len() > constructs.len() + 1 {
        let predictor: Vec<f64> = complete.iter().map(|p| p.temperature).collect();
        let columns: Vec<(String, Vec<f64>)> = constructs
            .iter()
            .map(|c| {
                (
                    c.clone(),
                    complete
                        .iter()
                        .map(|p| p.scores[c].expect("complete case"))
                        .collect(),
                )
            })
            .collect();
        match manova(&columns, &predictor) {
            Ok(result) => Some(result),
            Err(e) => {
                warnings.push(format!("manova: {e}"));
                None
            }
        }
    } else {
        warnings.push("manova: not enough complete cases".into());
        None
    };

    let columns: Vec<Vec<Option<f64>>> = constructs
        .iter()
        .map(|c| construct_column(profiles, c))
        .collect();
    let correlations = match pearson_matrix(&columns, constructs) {
        Ok(matrix) => Some(matrix),
        Err(e) => {
            warnings.push(format!("correlations: {e}"));
            None
        }
    };

    Ok(AnalysisBundle {
        manifest_hash,
        descriptives,
        regressions,
        manova: manova_result,
        correlations,
        demographics: None,
        comparisons: Vec::new(),
        range_summaries: Vec::new(),
        warnings,
    })
}
