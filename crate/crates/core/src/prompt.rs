//! Prompt rendering for stateless and response-memory administration.
//!
//! Rendering is pure and byte-exact: the layout is pinned by golden fixture
//! files under `fixtures/`, one per (instrument, mode) pair. Likert prompts
//! are the instructions block, a blank line, `Statement: <item>`, a blank
//! line, and the cue `Response: ` (with one trailing space). Memory-mode
//! prompts splice the prior `Statement:`/`Response:` exchanges between the
//! instructions and the final cue, with each recorded answer inserted
//! verbatim.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instrument::{Instrument, InstrumentKind, Item};

/// One completed item within a memory chain: the statement as administered
/// and the model's single-line answer, verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptExchange {
    pub item_ordinal: u32,
    pub statement: String,
    pub response: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    Stateless,
    Memory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPrompt {
    pub text: String,
    pub token_estimate: u32,
    pub item_id: String,
    pub mode: PromptMode,
}

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("history for item ordinal {item_ordinal} must cover ordinals {expected:?} in order, got {actual:?}")]
    HistoryMismatch {
        item_ordinal: u32,
        expected: Vec<u32>,
        actual: Vec<u32>,
    },
}

const CUE: &str = "Response: ";

/// Deterministic upper-bound token estimate: ceil(character count / 4).
///
/// Monotone in text length; used only as a context-limit guard, so it does
/// not need to match any particular tokenizer.
pub fn estimate_tokens(text: &str) -> u32 {
    let chars = text.chars().count() as u32;
    chars.div_ceil(4)
}

fn rendered(text: String, item: &Item, mode: PromptMode) -> RenderedPrompt {
    RenderedPrompt {
        token_estimate: estimate_tokens(&text),
        item_id: item.id.clone(),
        mode,
        text,
    }
}

/// Renders the single-item prompt: instructions, the statement, and the cue.
///
/// Free-text probes carry no instructions or `Statement:` label; their prompt
/// is the bare question followed by the cue on the next line.
pub fn render_stateless(instrument: &Instrument, item: &Item) -> RenderedPrompt {
    let text = match instrument.kind {
        InstrumentKind::Likert => format!(
            "{}\n\nStatement: {}\n\n{CUE}",
            instrument.instructions, item.text
        ),
        InstrumentKind::FreeText => format!("{}\n{CUE}", item.text),
    };
    rendered(text, item, PromptMode::Stateless)
}

/// Renders the response-memory prompt for `item`, splicing in the chain's own
/// prior exchanges.
///
/// `history` must contain exactly the exchanges for ordinals
/// `1..item.ordinal`, in order.
pub fn render_with_memory(
    instrument: &Instrument,
    item: &Item,
    history: &[PromptExchange],
) -> Result<RenderedPrompt, PromptError> {
    let expected: Vec<u32> = (1..item.ordinal).collect();
    let actual: Vec<u32> = history.iter().map(|e| e.item_ordinal).collect();
    if actual != expected {
        return Err(PromptError::HistoryMismatch {
            item_ordinal: item.ordinal,
            expected,
            actual,
        });
    }
    let mut text = String::new();
    if !instrument.instructions.is_empty() {
        text.push_str(&instrument.instructions);
        text.push_str("\n\n");
    }
    for exchange in history {
        text.push_str("Statement: ");
        text.push_str(&exchange.statement);
        text.push('\n');
        text.push_str("Response: ");
        text.push_str(&exchange.response);
        text.push_str("\n\n");
    }
    text.push_str("Statement: ");
    text.push_str(&item.text);
    text.push_str("\n\n");
    text.push_str(CUE);
    Ok(rendered(text, item, PromptMode::Memory))
}
