//! Prompt templates with `{SLOT}` placeholders.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    Plan,
    Stage1,
    Stage2,
    Stage3,
    Stage4,
    Search,
    Normalize,
}

impl TemplateId {
    pub const ALL: [TemplateId; 7] = [
        TemplateId::Plan,
        TemplateId::Stage1,
        TemplateId::Stage2,
        TemplateId::Stage3,
        TemplateId::Stage4,
        TemplateId::Search,
        TemplateId::Normalize,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::Plan => "plan",
            TemplateId::Stage1 => "stage1",
            TemplateId::Stage2 => "stage2",
            TemplateId::Stage3 => "stage3",
            TemplateId::Stage4 => "stage4",
            TemplateId::Search => "search",
            TemplateId::Normalize => "normalize",
        }
    }

    /// Raw template text with placeholders.
    pub fn text(self) -> &'static str {
        match self {
            TemplateId::Plan => include_str!("../../assets/prompts/plan.txt"),
            TemplateId::Stage1 => include_str!("../../assets/prompts/stage1.txt"),
            TemplateId::Stage2 => include_str!("../../assets/prompts/stage2.txt"),
            TemplateId::Stage3 => include_str!("../../assets/prompts/stage3.txt"),
            TemplateId::Stage4 => include_str!("../../assets/prompts/stage4.txt"),
            TemplateId::Search => include_str!("../../assets/prompts/search.txt"),
            TemplateId::Normalize => include_str!("../../assets/prompts/normalize.txt"),
        }
    }

    /// Placeholder names used by the template.
    pub fn slots(self) -> BTreeSet<String> {
        placeholders(self.text()).into_iter().map(|(_, _, n)| n.to_string()).collect()
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown template `{s}`"))
    }
}

/// Fixed demonstrations shown in the search prompt.
pub const SEARCH_EXAMPLES: &str = include_str!("../../assets/prompts/search_examples.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template {template} needs slot {slot}")]
    MissingSlot { template: TemplateId, slot: String },
    #[error("template {template} has no slot {slot}")]
    UnusedSlot { template: TemplateId, slot: String },
}

/// `(start, end, name)` of every `{NAME}` placeholder; names are upper-case
/// letters, digits and underscores.
fn placeholders(text: &str) -> Vec<(usize, usize, &str)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_uppercase() || bytes[j].is_ascii_digit() || bytes[j] == b'_') {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b'}' {
                out.push((i, j + 1, &text[i + 1..j]));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Substitutes every placeholder in one pass, so slot values are never
/// rescanned. Every placeholder needs a slot and every slot must be used.
pub fn render(template: TemplateId, slots: &BTreeMap<String, String>) -> Result<String, TemplateError> {
    let text = template.text();
    let places = placeholders(text);
    let used: BTreeSet<&str> = places.iter().map(|(_, _, n)| *n).collect();
    if let Some(extra) = slots.keys().find(|k| !used.contains(k.as_str())) {
        return Err(TemplateError::UnusedSlot { template, slot: extra.clone() });
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (start, end, name) in places {
        let value = slots.get(name).ok_or_else(|| TemplateError::MissingSlot {
            template,
            slot: name.to_string(),
        })?;
        out.push_str(&text[last..start]);
        out.push_str(value);
        last = end;
    }
    out.push_str(&text[last..]);
    Ok(out)
}
