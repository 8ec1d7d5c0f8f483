//! Pseudo-respondent assembly and composite construct scores.
//!
//! In stateless mode the pseudo-respondent (t, k) collects the k-th sample of
//! every item at temperature t — repetition-index pairing, the only
//! deterministic choice the log structure offers. In memory mode one chain is
//! one respondent. Per construct: reverse-key flagged items, invert when the
//! instrument scores inverted, then average the non-NA items.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instrument::{Instrument, InstrumentKind, ScaleDef};
use crate::parse::{CleanedRecord, ParsedValue};
use crate::prompt::PromptMode;

/// Flips a Likert value around the scale midpoint: min + max - value.
///
/// Out-of-range input is a contract violation.
pub fn reverse_key(value: i32, scale: &ScaleDef) -> i32 {
    assert!(
        scale.contains(value),
        "reverse_key: {value} outside scale [{}, {}]",
        scale.min,
        scale.max
    );
    scale.min + scale.max - value
}

/// Inverts a 6-point similarity rating (7 - value) so that higher scores mean
/// greater value importance.
pub fn invert_hvs(value: i32) -> i32 {
    assert!(
        (1..=6).contains(&value),
        "invert_hvs: {value} outside [1, 6]"
    );
    7 - value
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaHandling {
    /// Mean over the answered items; NA only when every item is missing.
    MeanOfAvailable,
    /// NA as soon as any item of the construct is missing.
    RequireAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringPolicy {
    pub na_handling: NaHandling,
    pub hvs_invert: bool,
    pub reverse_keying: bool,
}

impl ScoringPolicy {
    /// Default policy for an instrument: ignore NAs, honor the instrument's
    /// keying and inversion flags.
    pub fn for_instrument(instrument: &Instrument) -> Self {
        ScoringPolicy {
            na_handling: NaHandling::MeanOfAvailable,
            hvs_invert: instrument.invert_on_score,
            reverse_keying: true,
        }
    }

    pub fn validate(&self, instrument: &Instrument) -> Result<(), ScoreError> {
        if self.hvs_invert && !instrument.invert_on_score {
            return Err(ScoreError::InversionNotFlagged {
                instrument_id: instrument.id.clone(),
            });
        }
        Ok(())
    }
}

/// One pseudo-respondent's composite scores at one temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RespondentProfile {
    pub instrument_id: String,
    pub temperature: f64,
    /// Repetition index (stateless) or chain index (memory).
    pub rep: u32,
    pub scores: BTreeMap<String, Option<f64>>,
    pub answered: BTreeMap<String, u32>,
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(
        "policy requests inversion but instrument `{instrument_id}` is not flagged invert-on-score"
    )]
    InversionNotFlagged { instrument_id: String },
    #[error("record instrument `{got}` does not match `{expected}`")]
    InstrumentMismatch { expected: String, got: String },
    #[error("duplicate record for item `{item_id}` at temperature {temperature} rep {rep}")]
    DuplicateRecord {
        item_id: String,
        temperature: f64,
        rep: u32,
    },
    #[error(
        "instrument `{0}` is not a Likert instrument; demographics are summarized, not scored"
    )]
    NotLikert(String),
    #[error("profiles io: {0}")]
    Io(String),
    #[error("malformed profiles file: {0}")]
    MalformedProfiles(String),
}

/// Assembly output: profiles plus the memory chains excluded as partial.
#[derive(Debug, Clone)]
pub struct AssembledProfiles {
    pub profiles: Vec<RespondentProfile>,
    pub excluded_chains: Vec<(f64, u32)>,
}

/// Builds respondent profiles from cleaned answers.
pub fn assemble_respondents(
    records: &[CleanedRecord],
    instrument: &Instrument,
    mode: PromptMode,
    policy: &ScoringPolicy,
) -> Result<AssembledProfiles, ScoreError> {
    policy.validate(instrument)?;
    if instrument.kind != InstrumentKind::Likert {
        return Err(ScoreError::NotLikert(instrument.id.clone()));
    }
    let scale = instrument.scale.as_ref().expect("likert scale present");

    // Group answers by respondent key (temperature, rep).
    let mut groups: BTreeMap<(u64, u32), BTreeMap<&str, Option<i32>>> = BTreeMap::new();
    let mut partial_keys: Vec<(u64, u32)> = Vec::new();
    for record in records {
        if record.instrument_id != instrument.id {
            return Err(ScoreError::InstrumentMismatch {
                expected: instrument.id.clone(),
                got: record.instrument_id.clone(),
            });
        }
        let key = (record.temperature.to_bits(), record.rep);
        let value = match &record.parsed {
            ParsedValue::Likert { value, .. } => *value,
            _ => None,
        };
        let group = groups.entry(key).or_default();
        if group.insert(record.item_id.as_str(), value).is_some() {
            return Err(ScoreError::DuplicateRecord {
                item_id: record.item_id.clone(),
                temperature: record.temperature,
                rep: record.rep,
            });
        }
        if record.partial {
            partial_keys.push(key);
        }
    }

    let mut profiles = Vec::new();
    let mut excluded = Vec::new();
    for (key, answers) in &groups {
        let temperature = f64::from_bits(key.0);
        if mode == PromptMode::Memory && partial_keys.contains(key) {
            excluded.push((temperature, key.1));
            continue;
        }
        let mut scores = BTreeMap::new();
        let mut answered = BTreeMap::new();
        for construct in &instrument.constructs {
            let mut values: Vec<f64> = Vec::new();
            let mut missing = false;
            for item in instrument.items_for_construct(construct) {
                let raw = answers.get(item.id.as_str()).copied().flatten();
                match raw {
                    Some(v) => {
                        let mut v = v;
                        if policy.reverse_keying && item.reverse_keyed {
                            v = reverse_key(v, scale);
                        }
                        if policy.hvs_invert {
                            v = scale.min + scale.max - v;
                        }
                        values.push(f64::from(v));
                    }
                    None => missing = true,
                }
            }
            let score = match policy.na_handling {
                NaHandling::RequireAll if missing => None,
                _ if values.is_empty() => None,
                _ => Some(values.iter().sum::<f64>() / values.len() as f64),
            };
            scores.insert(construct.clone(), score);
            answered.insert(construct.clone(), values.len() as u32);
        }
        profiles.push(RespondentProfile {
            instrument_id: instrument.id.clone(),
            temperature,
            rep: key.1,
            scores,
            answered,
        });
    }

    Ok(AssembledProfiles {
        profiles,
        excluded_chains: excluded,
    })
}

/// One demographics pseudo-respondent (age and gender were asked
/// independently; the pairing is by repetition index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicRow {
    pub temperature: f64,
    pub rep: u32,
    pub age_years: Option<i32>,
    pub gender_category: Option<String>,
}

pub fn demographic_rows(records: &[CleanedRecord]) -> Vec<DemographicRow> {
    let mut groups: BTreeMap<(u64, u32), DemographicRow> = BTreeMap::new();
    for record in records {
        let key = (record.temperature.to_bits(), record.rep);
        let row = groups.entry(key).or_insert_with(|| DemographicRow {
            temperature: record.temperature,
            rep: record.rep,
            age_years: None,
            gender_category: None,
        });
        match &record.parsed {
            ParsedValue::Age { age_years, .. } => row.age_years = *age_years,
            ParsedValue::Gender {
                gender_category, ..
            } => row.gender_category = gender_category.clone(),
            ParsedValue::Likert { .. } => {}
        }
    }
    groups.into_values().collect()
}

/// Writes profiles as CSV: instrument, temperature, rep, one score column per
/// construct, one answered-count column per construct.
pub fn write_profiles_csv(
    path: &Path,
    profiles: &[RespondentProfile],
    instrument: &Instrument,
) -> Result<(), ScoreError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "instrument_id".to_string(),
        "temperature".to_string(),
        "rep".to_string(),
    ];
    header.extend(instrument.constructs.iter().cloned());
    header.extend(
        instrument
            .constructs
            .iter()
            .map(|c| format!("answered_{c}")),
    );
    writer
        .write_record(&header)
        .map_err(|e| ScoreError::Io(e.to_string()))?;
    for profile in profiles {
        let mut row = vec![
            profile.instrument_id.clone(),
            format!("{}", profile.temperature),
            format!("{}", profile.rep),
        ];
        for construct in &instrument.constructs {
            row.push(match profile.scores.get(construct).copied().flatten() {
                Some(v) => format!("{v}"),
                None => String::new(),
            });
        }
        for construct in &instrument.constructs {
            row.push(format!(
                "{}",
                profile.answered.get(construct).copied().unwrap_or(0)
            ));
        }
        writer
            .write_record(&row)
            .map_err(|e| ScoreError::Io(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| ScoreError::Io(e.to_string()))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes).map_err(|e| ScoreError::Io(e.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|e| ScoreError::Io(e.to_string()))
}

/// Reads a profiles CSV back; returns the profiles and the construct order
/// taken from the header.
pub fn read_profiles_csv(path: &Path) -> Result<(Vec<RespondentProfile>, Vec<String>), ScoreError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ScoreError::Io(e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| ScoreError::Io(e.to_string()))?
        .clone();
    let fields: Vec<&str> = header.iter().collect();
    if fields.len() < 3 || fields[0] != "instrument_id" {
        return Err(ScoreError::MalformedProfiles(
            "expected header starting with instrument_id,temperature,rep".into(),
        ));
    }
    let constructs: Vec<String> = fields[3..]
        .iter()
        .take_while(|f| !f.starts_with("answered_"))
        .map(|f| f.to_string())
        .collect();
    let expected_len = 3 + 2 * constructs.len();
    if fields.len() != expected_len {
        return Err(ScoreError::MalformedProfiles(format!(
            "expected {expected_len} columns (score and answered count per construct), got {}",
            fields.len()
        )));
    }
    let mut profiles = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ScoreError::Io(e.to_string()))?;
        let get = |i: usize| record.get(i).unwrap_or("");
        let parse_f64 = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| {
                ScoreError::MalformedProfiles(format!("row {}: bad {what} `{s}`", line + 2))
            })
        };
        let temperature = parse_f64(get(1), "temperature")?;
        let rep = get(2)
            .parse::<u32>()
            .map_err(|_| ScoreError::MalformedProfiles(format!("row {}: bad rep", line + 2)))?;
        let mut scores = BTreeMap::new();
        let mut answered = BTreeMap::new();
        for (j, construct) in constructs.iter().enumerate() {
            let raw = get(3 + j);
            let score = if raw.is_empty() {
                None
            } else {
                Some(parse_f64(raw, "score")?)
            };
            scores.insert(construct.clone(), score);
            let count = get(3 + constructs.len() + j).parse::<u32>().map_err(|_| {
                ScoreError::MalformedProfiles(format!("row {}: bad answered count", line + 2))
            })?;
            answered.insert(construct.clone(), count);
        }
        profiles.push(RespondentProfile {
            instrument_id: get(0).to_string(),
            temperature,
            rep,
            scores,
            answered,
        });
    }
    Ok((profiles, constructs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::bundled;

    fn likert_record(
        instrument_id: &str,
        item_id: &str,
        temperature: f64,
        rep: u32,
        value: Option<i32>,
    ) -> CleanedRecord {
        CleanedRecord {
            instrument_id: instrument_id.into(),
            item_id: item_id.into(),
            temperature,
            rep,
            raw_text: value.map(|v| v.to_string()).unwrap_or_default(),
            partial: false,
            parsed: ParsedValue::Likert {
                value,
                na_reason: None,
            },
        }
    }

    #[test]
    fn reverse_key_examples_and_involution() {
        let scale = ScaleDef {
            min: 1,
            max: 5,
            labels: vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
        };
        assert_eq!(reverse_key(2, &scale), 4);
        assert_eq!(reverse_key(3, &scale), 3);
        for v in 1..=5 {
            assert_eq!(reverse_key(reverse_key(v, &scale), &scale), v);
        }
    }

    #[test]
    #[should_panic(expected = "outside scale")]
    fn reverse_key_out_of_range_panics() {
        let scale = ScaleDef {
            min: 1,
            max: 5,
            labels: vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
        };
        reverse_key(6, &scale);
    }

    #[test]
    fn invert_hvs_endpoints_and_midpoints() {
        assert_eq!(invert_hvs(1), 6);
        assert_eq!(invert_hvs(6), 1);
        assert_eq!(invert_hvs(4), 3);
        for v in 1..=6 {
            assert_eq!(invert_hvs(invert_hvs(v)), v);
        }
    }

    #[test]
    fn all_midpoint_answers_score_the_midpoint_everywhere() {
        let inst = bundled::hexaco60();
        let policy = ScoringPolicy::for_instrument(&inst);
        let records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .map(|i| likert_record("hexaco60", &i.id, 0.0, 0, Some(3)))
            .collect();
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        assert_eq!(assembled.profiles.len(), 1);
        for construct in &inst.constructs {
            assert_eq!(
                assembled.profiles[0].scores[construct],
                Some(3.0),
                "{construct}"
            );
            assert_eq!(assembled.profiles[0].answered[construct], 10);
        }
    }

    #[test]
    fn hvs_inversion_matches_invert_hvs() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        assert!(policy.hvs_invert);
        let records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .map(|i| likert_record("hvs21", &i.id, 0.0, 0, Some(2)))
            .collect();
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        let expected = f64::from(invert_hvs(2));
        for construct in &inst.constructs {
            assert_eq!(assembled.profiles[0].scores[construct], Some(expected));
        }
    }

    #[test]
    fn reverse_keyed_items_are_flipped_before_averaging() {
        let inst = bundled::hexaco60();
        let policy = ScoringPolicy::for_instrument(&inst);
        // Everyone answers 5: reversed items contribute 1, plain items 5.
        let records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .map(|i| likert_record("hexaco60", &i.id, 0.0, 0, Some(5)))
            .collect();
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        let profile = &assembled.profiles[0];
        for construct in &inst.constructs {
            let items = inst.items_for_construct(construct);
            let reversed = items.iter().filter(|i| i.reverse_keyed).count() as f64;
            let plain = items.len() as f64 - reversed;
            let expected = (plain * 5.0 + reversed * 1.0) / items.len() as f64;
            assert_eq!(profile.scores[construct], Some(expected), "{construct}");
        }
    }

    #[test]
    fn stateless_profiles_count_follows_rep_indices() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        let mut records = Vec::new();
        for rep in 0..5 {
            for item in &inst.items {
                records.push(likert_record("hvs21", &item.id, 0.5, rep, Some(4)));
            }
        }
        for item in &inst.items {
            records.push(likert_record("hvs21", &item.id, 0.0, 0, Some(4)));
        }
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        assert_eq!(assembled.profiles.len(), 6);
        let at_half = assembled
            .profiles
            .iter()
            .filter(|p| p.temperature == 0.5)
            .count();
        assert_eq!(at_half, 5);
        // Deterministic ordering by (temperature, rep).
        assert_eq!(assembled.profiles[0].temperature, 0.0);
        assert_eq!(assembled.profiles[1].rep, 0);
    }

    #[test]
    fn scores_invariant_to_record_order() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        let mut records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .enumerate()
            .map(|(i, item)| likert_record("hvs21", &item.id, 0.3, 0, Some((i % 6 + 1) as i32)))
            .collect();
        let forward =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        records.reverse();
        let backward =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        assert_eq!(forward.profiles, backward.profiles);
    }

    #[test]
    fn missing_items_follow_policy() {
        let inst = bundled::hvs21();
        let mut policy = ScoringPolicy::for_instrument(&inst);
        // conformity has items hvs07 and hvs16; answer only hvs07.
        let records = vec![likert_record("hvs21", "hvs07", 0.0, 0, Some(2))];
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        let profile = &assembled.profiles[0];
        assert_eq!(profile.scores["conformity"], Some(5.0)); // inverted 7-2
        assert_eq!(profile.answered["conformity"], 1);
        assert_eq!(profile.scores["tradition"], None);

        policy.na_handling = NaHandling::RequireAll;
        let strict = assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        assert_eq!(strict.profiles[0].scores["conformity"], None);
    }

    #[test]
    fn partial_chains_are_excluded_in_memory_mode() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        let mut records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .map(|i| likert_record("hvs21", &i.id, 0.2, 0, Some(3)))
            .collect();
        let mut broken: Vec<CleanedRecord> = inst
            .items
            .iter()
            .take(6)
            .map(|i| likert_record("hvs21", &i.id, 0.2, 1, Some(3)))
            .collect();
        for r in &mut broken {
            r.partial = true;
        }
        records.extend(broken);
        let assembled = assemble_respondents(&records, &inst, PromptMode::Memory, &policy).unwrap();
        assert_eq!(assembled.profiles.len(), 1);
        assert_eq!(assembled.excluded_chains, vec![(0.2, 1)]);
    }

    #[test]
    fn inconsistent_instrument_id_is_an_error() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        let records = vec![likert_record("hexaco60", "hvs01", 0.0, 0, Some(3))];
        assert!(matches!(
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap_err(),
            ScoreError::InstrumentMismatch { .. }
        ));
    }

    #[test]
    fn composite_bounds_on_fuzzed_respondents() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let inst = bundled::hexaco60();
        let scale = inst.scale.clone().unwrap();
        let policy = ScoringPolicy::for_instrument(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut records = Vec::new();
        for rep in 0..1000u32 {
            for item in &inst.items {
                // Random value or NA.
                let value = if rng.gen_bool(0.9) {
                    Some(rng.gen_range(scale.min..=scale.max))
                } else {
                    None
                };
                records.push(likert_record("hexaco60", &item.id, 0.7, rep, value));
            }
        }
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        assert_eq!(assembled.profiles.len(), 1000);
        for profile in &assembled.profiles {
            for (construct, score) in &profile.scores {
                if let Some(s) = score {
                    assert!(
                        *s >= f64::from(scale.min) && *s <= f64::from(scale.max),
                        "{construct} score {s} out of bounds"
                    );
                }
                let answered = profile.answered[construct];
                assert!(answered <= inst.items_for_construct(construct).len() as u32);
            }
        }
    }

    #[test]
    fn inversion_policy_requires_the_instrument_flag() {
        let inst = bundled::hexaco60();
        let policy = ScoringPolicy {
            na_handling: NaHandling::MeanOfAvailable,
            hvs_invert: true,
            reverse_keying: true,
        };
        assert!(matches!(
            policy.validate(&inst).unwrap_err(),
            ScoreError::InversionNotFlagged { .. }
        ));
    }

    #[test]
    fn profiles_csv_round_trip() {
        let inst = bundled::hvs21();
        let policy = ScoringPolicy::for_instrument(&inst);
        let records: Vec<CleanedRecord> = inst
            .items
            .iter()
            .map(|i| likert_record("hvs21", &i.id, 0.5, 0, Some(2)))
            .collect();
        let assembled =
            assemble_respondents(&records, &inst, PromptMode::Stateless, &policy).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profiles.csv");
        write_profiles_csv(&path, &assembled.profiles, &inst).unwrap();
        let (read, constructs) = read_profiles_csv(&path).unwrap();
        assert_eq!(read, assembled.profiles);
        assert_eq!(constructs, inst.constructs);
    }

    #[test]
    fn demographic_rows_pair_by_rep() {
        let records = vec![
            CleanedRecord {
                instrument_id: "demographics".into(),
                item_id: "age".into(),
                temperature: 0.1,
                rep: 0,
                raw_text: "33".into(),
                partial: false,
                parsed: ParsedValue::Age {
                    age_years: Some(33),
                    na_reason: None,
                },
            },
            CleanedRecord {
                instrument_id: "demographics".into(),
                item_id: "gender".into(),
                temperature: 0.1,
                rep: 0,
                raw_text: "female".into(),
                partial: false,
                parsed: ParsedValue::Gender {
                    gender_category: Some("female".into()),
                    na_reason: None,
                },
            },
        ];
        let rows = demographic_rows(&records);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].age_years, Some(33));
        assert_eq!(rows[0].gender_category, Some("female".into()));
    }
}
