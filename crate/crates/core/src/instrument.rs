//! Questionnaire instruments and baseline tables, defined as data.
//!
//! Instruments live in TOML documents (see `data/` for the bundled ones); the
//! engine validates them on load and never hard-codes item texts, construct
//! assignments, or reverse keying.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Likert answer scale: integer anchors `min..=max` with one label per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleDef {
    pub min: i32,
    pub max: i32,
    pub labels: Vec<String>,
}

impl ScaleDef {
    pub fn points(&self) -> i32 {
        self.max - self.min + 1
    }

    pub fn contains(&self, value: i32) -> bool {
        (self.min..=self.max).contains(&value)
    }
}

/// One questionnaire item in administration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    /// 1-based administration order, contiguous within the instrument.
    pub ordinal: u32,
    pub text: String,
    pub construct: String,
    #[serde(rename = "reverse")]
    pub reverse_keyed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentKind {
    Likert,
    FreeText,
}

/// A validated questionnaire definition.
///
/// Field order matters for TOML serialization (scalars before tables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instrument {
    pub id: String,
    pub name: String,
    pub version: String,
    pub kind: InstrumentKind,
    /// Raw answers are inverted (`min + max - value`) at scoring time so that
    /// higher composite scores mean stronger endorsement.
    #[serde(default)]
    pub invert_on_score: bool,
    /// Preamble shown before every item; empty for bare probes.
    pub instructions: String,
    pub constructs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleDef>,
    pub items: Vec<Item>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstrumentError {
    #[error("malformed instrument document: {0}")]
    Malformed(String),
    #[error("duplicate item id `{id}`")]
    DuplicateItemId { id: String },
    #[error("duplicate construct `{construct}`")]
    DuplicateConstruct { construct: String },
    #[error("item `{item_id}` field `construct`: `{construct}` is not in the construct list")]
    UnknownConstruct { item_id: String, construct: String },
    #[error("construct `{construct}` is referenced by no item")]
    UnreferencedConstruct { construct: String },
    #[error("item ordinals must be contiguous 1..{expected}; problem at ordinal {ordinal}")]
    BadOrdinals { expected: u32, ordinal: u32 },
    #[error("field `scale`: likert instrument `{id}` has no scale")]
    MissingScale { id: String },
    #[error("field `scale`: free_text instrument `{id}` must not define a scale")]
    UnexpectedScale { id: String },
    #[error("field `scale`: min {min} must be less than max {max}")]
    BadScaleBounds { min: i32, max: i32 },
    #[error("field `scale.labels`: expected {expected} labels, got {got}")]
    ScaleLabelMismatch { expected: usize, got: usize },
    #[error("field `scale.labels`: label {index} is empty")]
    EmptyLabel { index: usize },
    #[error("instrument has no items")]
    NoItems,
    #[error("baseline `{source_label}`: unknown construct `{construct}`")]
    UnknownBaselineConstruct {
        source_label: String,
        construct: String,
    },
    #[error("baseline `{source_label}`: construct `{construct}` missing")]
    MissingBaselineConstruct {
        source_label: String,
        construct: String,
    },
    #[error("baseline `{source_label}` construct `{construct}`: sd {sd} is negative")]
    NegativeSd {
        source_label: String,
        construct: String,
        sd: f64,
    },
}

impl Instrument {
    pub fn validate(&self) -> Result<(), InstrumentError> {
        if self.items.is_empty() {
            return Err(InstrumentError::NoItems);
        }
        let mut constructs = BTreeSet::new();
        for c in &self.constructs {
            if !constructs.insert(c.as_str()) {
                return Err(InstrumentError::DuplicateConstruct {
                    construct: c.clone(),
                });
            }
        }
        let mut ids = BTreeSet::new();
        let mut referenced = BTreeSet::new();
        for item in &self.items {
            if !ids.insert(item.id.as_str()) {
                return Err(InstrumentError::DuplicateItemId {
                    id: item.id.clone(),
                });
            }
            if !constructs.contains(item.construct.as_str()) {
                return Err(InstrumentError::UnknownConstruct {
                    item_id: item.id.clone(),
                    construct: item.construct.clone(),
                });
            }
            referenced.insert(item.construct.as_str());
        }
        for c in &self.constructs {
            if !referenced.contains(c.as_str()) {
                return Err(InstrumentError::UnreferencedConstruct {
                    construct: c.clone(),
                });
            }
        }
        let n = self.items.len() as u32;
        let mut seen = vec![false; self.items.len()];
        for item in &self.items {
            if item.ordinal < 1 || item.ordinal > n || seen[(item.ordinal - 1) as usize] {
                return Err(InstrumentError::BadOrdinals {
                    expected: n,
                    ordinal: item.ordinal,
                });
            }
            seen[(item.ordinal - 1) as usize] = true;
        }
        match self.kind {
            InstrumentKind::Likert => {
                let scale = self.scale.as_ref().ok_or(InstrumentError::MissingScale {
                    id: self.id.clone(),
                })?;
                if scale.min >= scale.max {
                    return Err(InstrumentError::BadScaleBounds {
                        min: scale.min,
                        max: scale.max,
                    });
                }
                if scale.labels.len() != scale.points() as usize {
                    return Err(InstrumentError::ScaleLabelMismatch {
                        expected: scale.points() as usize,
                        got: scale.labels.len(),
                    });
                }
                for (i, label) in scale.labels.iter().enumerate() {
                    if label.trim().is_empty() {
                        return Err(InstrumentError::EmptyLabel { index: i });
                    }
                }
            }
            InstrumentKind::FreeText => {
                if self.scale.is_some() {
                    return Err(InstrumentError::UnexpectedScale {
                        id: self.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Items sorted by administration order.
    pub fn items_by_ordinal(&self) -> Vec<&Item> {
        let mut items: Vec<&Item> = self.items.iter().collect();
        items.sort_by_key(|i| i.ordinal);
        items
    }

    pub fn item_by_id(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn item_by_ordinal(&self, ordinal: u32) -> Option<&Item> {
        self.items.iter().find(|i| i.ordinal == ordinal)
    }

    pub fn item_by_text(&self, text: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.text == text)
    }

    pub fn items_for_construct(&self, construct: &str) -> Vec<&Item> {
        self.items
            .iter()
            .filter(|i| i.construct == construct)
            .collect()
    }
}

/// Parses and validates an instrument definition document.
pub fn load_instrument(document: &str) -> Result<Instrument, InstrumentError> {
    let mut instrument: Instrument =
        toml::from_str(document).map_err(|e| InstrumentError::Malformed(e.to_string()))?;
    instrument.validate()?;
    instrument.items.sort_by_key(|i| i.ordinal);
    Ok(instrument)
}

pub fn serialize_instrument(instrument: &Instrument) -> String {
    toml::to_string(instrument).expect("instrument serializes to TOML")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub mean: f64,
    pub sd: f64,
}

/// Published human reference statistics keyed by construct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineTable {
    pub source: String,
    pub entries: BTreeMap<String, BaselineEntry>,
}

#[derive(Deserialize)]
struct BaselineDoc {
    #[serde(default)]
    table: Vec<BaselineTable>,
}

/// Loads baseline tables, resolving construct ids against `instrument`.
///
/// Every construct of the instrument must be present in every table; an empty
/// document yields an empty list.
pub fn load_baselines(
    document: &str,
    instrument: &Instrument,
) -> Result<Vec<BaselineTable>, InstrumentError> {
    let doc: BaselineDoc =
        toml::from_str(document).map_err(|e| InstrumentError::Malformed(e.to_string()))?;
    for table in &doc.table {
        for (construct, entry) in &table.entries {
            if !instrument.constructs.iter().any(|c| c == construct) {
                return Err(InstrumentError::UnknownBaselineConstruct {
                    source_label: table.source.clone(),
                    construct: construct.clone(),
                });
            }
            if entry.sd < 0.0 {
                return Err(InstrumentError::NegativeSd {
                    source_label: table.source.clone(),
                    construct: construct.clone(),
                    sd: entry.sd,
                });
            }
        }
        for construct in &instrument.constructs {
            if !table.entries.contains_key(construct) {
                return Err(InstrumentError::MissingBaselineConstruct {
                    source_label: table.source.clone(),
                    construct: construct.clone(),
                });
            }
        }
    }
    Ok(doc.table)
}

/// Definitions and reference data shipped with the library.
pub mod bundled {
    use super::*;

    pub const HEXACO60: &str = include_str!("../data/hexaco60.toml");
    pub const HVS21: &str = include_str!("../data/hvs21.toml");
    pub const DEMOGRAPHICS: &str = include_str!("../data/demographics.toml");
    pub const HEXACO_BASELINES: &str = include_str!("../data/hexaco_baselines.toml");
    pub const HVS_BASELINES: &str = include_str!("../data/hvs_baselines.toml");
    pub const GENDER_MAP: &str = include_str!("../data/gender_map.toml");
    pub const HEXACO_REFERENCE_CORRELATIONS: &str =
        include_str!("../data/hexaco_reference_correlations.toml");
    pub const HVS_REFERENCE_CORRELATIONS: &str =
        include_str!("../data/hvs_reference_correlations.toml");

    pub fn hexaco60() -> Instrument {
        load_instrument(HEXACO60).expect("bundled hexaco60 definition is valid")
    }

    pub fn hvs21() -> Instrument {
        load_instrument(HVS21).expect("bundled hvs21 definition is valid")
    }

    pub fn demographics() -> Instrument {
        load_instrument(DEMOGRAPHICS).expect("bundled demographics definition is valid")
    }

    pub fn hexaco_baselines() -> Vec<BaselineTable> {
        load_baselines(HEXACO_BASELINES, &hexaco60()).expect("bundled hexaco baselines are valid")
    }

    pub fn hvs_baselines() -> Vec<BaselineTable> {
        load_baselines(HVS_BASELINES, &hvs21()).expect("bundled hvs baselines are valid")
    }

    /// Looks a bundled instrument up by id.
    pub fn instrument_by_id(id: &str) -> Option<Instrument> {
        match id {
            "hexaco60" => Some(hexaco60()),
            "hvs21" => Some(hvs21()),
            "demographics" => Some(demographics()),
            _ => None,
        }
    }
}
