//! Cleans raw completions into typed answers.
//!
//! Likert answers follow a first-integer-token discipline: newlines are
//! removed, whitespace trimmed, a leading `Response:` echo stripped, and the
//! remaining text must begin with a bare integer. Verbal answers are recoded
//! to NA rather than interpreted. Demographic answers get their own rules:
//! ages take the first integer anywhere in the text, genders go through an
//! ordered keyword table shipped as a data file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::RawResponse;
use crate::instrument::{Instrument, InstrumentKind, ScaleDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaReason {
    NonNumeric,
    OutOfRange,
    Empty,
}

impl NaReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            NaReason::NonNumeric => "non_numeric",
            NaReason::OutOfRange => "out_of_range",
            NaReason::Empty => "empty",
        }
    }
}

/// A cleaned Likert answer; NA is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedAnswer {
    pub value: Option<i32>,
    pub na_reason: Option<NaReason>,
    pub raw_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemographicKind {
    Age,
    Gender,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicAnswer {
    pub kind: DemographicKind,
    pub age_years: Option<i32>,
    pub gender_category: Option<String>,
    pub na_reason: Option<NaReason>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("record references unknown item `{item_id}` (corrupt log)")]
    UnknownItem { item_id: String },
    #[error("record instrument `{got}` does not match `{expected}`")]
    InstrumentMismatch { expected: String, got: String },
    #[error("malformed gender map: {0}")]
    MalformedGenderMap(String),
    #[error("free-text construct `{0}` has no parser")]
    UnsupportedConstruct(String),
}

fn clean_text(raw: &str) -> String {
    raw.replace(['\n', '\r'], "").trim().to_string()
}

/// Maximal leading digit run (optionally signed); rejected when a letter
/// follows immediately, so "3rd" is not an integer token but "3." is.
fn leading_integer(text: &str) -> Option<i64> {
    let mut chars = text.char_indices().peekable();
    let mut end = 0;
    let mut start = 0;
    if let Some((_, '-')) = chars.peek() {
        chars.next();
        start = 1;
        end = 1;
    }
    for (i, c) in chars {
        if c.is_ascii_digit() {
            end = i + c.len_utf8();
        } else {
            if c.is_alphanumeric() && end > start {
                return None;
            }
            break;
        }
    }
    if end == start {
        return None;
    }
    text[..end].parse().ok()
}

/// Cleans one Likert completion against its scale.
pub fn parse_likert(raw: &str, scale: &ScaleDef) -> ParsedAnswer {
    let mut text = clean_text(raw);
    if let Some(rest) = text.strip_prefix("Response:") {
        text = rest.trim().to_string();
    }
    let (value, na_reason) = if text.is_empty() {
        (None, Some(NaReason::Empty))
    } else {
        match leading_integer(&text) {
            Some(v)
                if v >= i64::from(i32::MIN)
                    && v <= i64::from(i32::MAX)
                    && scale.contains(v as i32) =>
            {
                (Some(v as i32), None)
            }
            Some(_) => (None, Some(NaReason::OutOfRange)),
            None => (None, Some(NaReason::NonNumeric)),
        }
    };
    ParsedAnswer {
        value,
        na_reason,
        raw_text: raw.to_string(),
    }
}

const AGE_MIN: i64 = 0;
const AGE_MAX: i64 = 130;

/// First integer anywhere in the cleaned text becomes the age when it lies in
/// [0, 130]; anything else is NA.
pub fn parse_age(raw: &str) -> DemographicAnswer {
    let text = clean_text(raw);
    let (age, reason) = if text.is_empty() {
        (None, Some(NaReason::Empty))
    } else {
        let digits_start = text.find(|c: char| c.is_ascii_digit());
        match digits_start {
            Some(start) => {
                let run: String = text[start..]
                    .chars()
                    .take_while(|c| c.is_ascii_digit())
                    .collect();
                match run.parse::<i64>() {
                    Ok(v) if (AGE_MIN..=AGE_MAX).contains(&v) => (Some(v as i32), None),
                    _ => (None, Some(NaReason::OutOfRange)),
                }
            }
            None => (None, Some(NaReason::NonNumeric)),
        }
    };
    DemographicAnswer {
        kind: DemographicKind::Age,
        age_years: age,
        gender_category: None,
        na_reason: reason,
    }
}

#[derive(Debug, Clone, Deserialize)]
struct GenderRuleRaw {
    pattern: String,
    category: String,
}

#[derive(Debug, Clone, Deserialize)]
struct GenderMapDoc {
    rules: Vec<GenderRuleRaw>,
}

/// Ordered keyword rules mapping free-text gender statements to categories.
///
/// Rule order is total and authoritative: the file lists longer (more
/// specific) patterns first and the first match wins, so the same input can
/// never map to two categories.
#[derive(Debug, Clone)]
pub struct GenderMap {
    rules: Vec<(Vec<String>, String)>,
}

fn normalize_words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn contains_word_sequence(haystack: &[String], needle: &[String]) -> bool {
    if needle.is_empty() || haystack.len() < needle.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|window| window == needle)
}

impl GenderMap {
    pub fn load(document: &str) -> Result<Self, ParseError> {
        let doc: GenderMapDoc =
            toml::from_str(document).map_err(|e| ParseError::MalformedGenderMap(e.to_string()))?;
        let mut rules = Vec::with_capacity(doc.rules.len());
        for rule in doc.rules {
            let words = normalize_words(&rule.pattern);
            if words.is_empty() {
                return Err(ParseError::MalformedGenderMap(format!(
                    "pattern `{}` normalizes to nothing",
                    rule.pattern
                )));
            }
            rules.push((words, rule.category));
        }
        Ok(GenderMap { rules })
    }

    pub fn bundled() -> Self {
        Self::load(crate::instrument::bundled::GENDER_MAP).expect("bundled gender map is valid")
    }

    /// Categories this map can produce, including the `other` fallback.
    pub fn codomain(&self) -> Vec<String> {
        let mut categories: Vec<String> = self.rules.iter().map(|(_, c)| c.clone()).collect();
        categories.push("other".into());
        categories.dedup();
        categories
    }

    pub fn normalize(&self, raw: &str) -> DemographicAnswer {
        let text = clean_text(raw);
        if text.is_empty() {
            return DemographicAnswer {
                kind: DemographicKind::Gender,
                age_years: None,
                gender_category: None,
                na_reason: Some(NaReason::Empty),
            };
        }
        let words = normalize_words(&text);
        let category = self
            .rules
            .iter()
            .find(|(pattern, _)| contains_word_sequence(&words, pattern))
            .map(|(_, category)| category.clone())
            .unwrap_or_else(|| "other".into());
        DemographicAnswer {
            kind: DemographicKind::Gender,
            age_years: None,
            gender_category: Some(category),
            na_reason: None,
        }
    }
}

/// Normalizes a gender statement with the bundled rule table.
pub fn normalize_gender(raw: &str) -> DemographicAnswer {
    GenderMap::bundled().normalize(raw)
}

/// One cleaned record: raw provenance plus the typed answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanedRecord {
    pub instrument_id: String,
    pub item_id: String,
    pub temperature: f64,
    pub rep: u32,
    pub raw_text: String,
    #[serde(default)]
    pub partial: bool,
    pub parsed: ParsedValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParsedValue {
    Likert {
        value: Option<i32>,
        na_reason: Option<NaReason>,
    },
    Age {
        age_years: Option<i32>,
        na_reason: Option<NaReason>,
    },
    Gender {
        gender_category: Option<String>,
        na_reason: Option<NaReason>,
    },
}

impl ParsedValue {
    pub fn is_na(&self) -> bool {
        match self {
            ParsedValue::Likert { value, .. } => value.is_none(),
            ParsedValue::Age { age_years, .. } => age_years.is_none(),
            ParsedValue::Gender {
                gender_category, ..
            } => gender_category.is_none(),
        }
    }

    pub fn na_reason(&self) -> Option<NaReason> {
        match self {
            ParsedValue::Likert { na_reason, .. }
            | ParsedValue::Age { na_reason, .. }
            | ParsedValue::Gender { na_reason, .. } => *na_reason,
        }
    }
}

/// Exclusion accounting for one cleaned log; parsed + NA == total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub total: usize,
    pub na_count: usize,
    pub na_rate: f64,
    pub by_reason: BTreeMap<String, usize>,
    pub by_item: BTreeMap<String, usize>,
}

/// Parses every record of a raw log against its instrument.
///
/// NA records are retained with provenance (downstream stages exclude them);
/// a record referencing an unknown item is a hard error.
pub fn clean_run(
    log: &[RawResponse],
    instrument: &Instrument,
    gender_map: &GenderMap,
) -> Result<(Vec<CleanedRecord>, CleaningReport), ParseError> {
    let mut records = Vec::with_capacity(log.len());
    let mut na_count = 0;
    let mut by_reason: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_item: BTreeMap<String, usize> = BTreeMap::new();

    for response in log {
        if response.instrument_id != instrument.id {
            return Err(ParseError::InstrumentMismatch {
                expected: instrument.id.clone(),
                got: response.instrument_id.clone(),
            });
        }
        let item =
            instrument
                .item_by_id(&response.item_id)
                .ok_or_else(|| ParseError::UnknownItem {
                    item_id: response.item_id.clone(),
                })?;
        let parsed = match instrument.kind {
            InstrumentKind::Likert => {
                let scale = instrument.scale.as_ref().expect("likert scale present");
                let answer = parse_likert(&response.raw_text, scale);
                ParsedValue::Likert {
                    value: answer.value,
                    na_reason: answer.na_reason,
                }
            }
            InstrumentKind::FreeText => match item.construct.as_str() {
                "age" => {
                    let answer = parse_age(&response.raw_text);
                    ParsedValue::Age {
                        age_years: answer.age_years,
                        na_reason: answer.na_reason,
                    }
                }
                "gender" => {
                    let answer = gender_map.normalize(&response.raw_text);
                    ParsedValue::Gender {
                        gender_category: answer.gender_category,
                        na_reason: answer.na_reason,
                    }
                }
                other => return Err(ParseError::UnsupportedConstruct(other.to_string())),
            },
        };
        if parsed.is_na() {
            na_count += 1;
            if let Some(reason) = parsed.na_reason() {
                *by_reason.entry(reason.as_str().to_string()).or_default() += 1;
            }
            *by_item.entry(response.item_id.clone()).or_default() += 1;
        }
        records.push(CleanedRecord {
            instrument_id: response.instrument_id.clone(),
            item_id: response.item_id.clone(),
            temperature: response.temperature,
            rep: response.rep,
            raw_text: response.raw_text.clone(),
            partial: response.is_partial(),
            parsed,
        });
    }

    let total = records.len();
    let report = CleaningReport {
        total,
        na_count,
        na_rate: if total > 0 {
            na_count as f64 / total as f64
        } else {
            0.0
        },
        by_reason,
        by_item,
    };
    Ok((records, report))
}

/// Writes cleaned records as JSON lines (one record per line, UTF-8).
pub fn write_cleaned_jsonl(
    path: &std::path::Path,
    records: &[CleanedRecord],
) -> std::io::Result<()> {
    let mut buffer = Vec::new();
    for record in records {
        serde_json::to_writer(&mut buffer, record).expect("CleanedRecord serializes");
        buffer.push(b'\n');
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &buffer)?;
    std::fs::rename(&tmp, path)
}

pub fn read_cleaned_jsonl(path: &std::path::Path) -> std::io::Result<Vec<CleanedRecord>> {
    let content = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    for line in content.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let record: CleanedRecord = serde_json::from_str(line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        records.push(record);
    }
    Ok(records)
}
