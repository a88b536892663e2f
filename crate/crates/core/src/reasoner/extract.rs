//! Pulls a structured block out of free-form model text and checks it
//! against the reply schema of each template.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::template::TemplateId;
use crate::subgoal::Subgoal;
use crate::task::TaskParams;
use crate::vocab;

/// Plan reply; keys the planner does not consume are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReply {
    pub task: String,
    #[serde(default)]
    pub task_params: TaskParams,
    #[serde(default, rename = "objects of interest")]
    pub objects_of_interest: Vec<String>,
    #[serde(default, rename = "object locations")]
    pub object_locations: Vec<String>,
    pub subgoals: Vec<Subgoal>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parsed {
    Plan(PlanReply),
    Importance { important: bool, justification: String },
    Preconditions { missing: bool, actions: Vec<Subgoal> },
    Steps { steps: Vec<Subgoal> },
    Category { category: String },
}

/// Every JSON value that starts at an opening brace or bracket, in order of
/// position.
fn candidates(text: &str) -> impl Iterator<Item = Value> + '_ {
    text.char_indices()
        .filter(|(_, c)| *c == '{' || *c == '[')
        .filter_map(move |(i, _)| {
            serde_json::Deserializer::from_str(&text[i..])
                .into_iter::<Value>()
                .next()
                .and_then(Result::ok)
        })
}

/// The first block in `text` that satisfies the schema of `template`.
pub fn extract(template: TemplateId, text: &str) -> Option<Parsed> {
    candidates(text).find_map(|v| validate(template, &v))
}

fn squash(key: &str) -> String {
    key.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn field<'a>(v: &'a Value, names: &[&str]) -> Option<&'a Value> {
    let obj = v.as_object()?;
    names
        .iter()
        .find_map(|n| obj.iter().find(|(k, _)| squash(k) == *n).map(|(_, v)| v))
}

fn truthy(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "true" => Some(true),
            "no" | "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn subgoals(v: &Value) -> Option<Vec<Subgoal>> {
    v.as_array()?
        .iter()
        .map(|s| s.as_str().and_then(|s| s.parse().ok()))
        .collect()
}

fn strings(v: Option<&Value>) -> Option<Vec<String>> {
    match v {
        None | Some(Value::Null) => Some(Vec::new()),
        Some(v) => v
            .as_array()?
            .iter()
            .map(|s| s.as_str().map(str::to_string))
            .collect(),
    }
}

pub fn validate(template: TemplateId, v: &Value) -> Option<Parsed> {
    match template {
        TemplateId::Plan => {
            let task = field(v, &["task"])?.as_str()?.to_string();
            let task_params = match field(v, &["taskparams"]) {
                Some(p) => serde_json::from_value(p.clone()).ok()?,
                None => TaskParams::default(),
            };
            Some(Parsed::Plan(PlanReply {
                task,
                task_params,
                objects_of_interest: strings(field(v, &["objectsofinterest"]))?,
                object_locations: strings(field(v, &["objectlocations"]))?,
                subgoals: subgoals(field(v, &["subgoals"])?)?,
            }))
        }
        TemplateId::Stage1 => {
            let important = truthy(field(v, &["important", "isimportant", "answer"])?)?;
            let justification = match field(v, &["justification", "reason", "why"]) {
                Some(j) => j.as_str()?.to_string(),
                None => String::new(),
            };
            Some(Parsed::Importance { important, justification })
        }
        TemplateId::Stage2 => {
            let missing = truthy(field(v, &["priorrequiredactions", "priorrequired", "required"])?)?;
            let actions = match field(v, &["actions"]) {
                Some(a) => subgoals(a)?,
                None if !missing => Vec::new(),
                None => return None,
            };
            Some(Parsed::Preconditions { missing, actions })
        }
        TemplateId::Stage3 | TemplateId::Stage4 | TemplateId::Search => {
            let list = if v.is_array() {
                v
            } else {
                field(v, &["solution", "actions", "steps"])?
            };
            Some(Parsed::Steps { steps: subgoals(list)? })
        }
        TemplateId::Normalize => {
            let raw = match v {
                Value::String(s) => s.as_str(),
                _ => field(v, &["category"])?.as_str()?,
            };
            let category = vocab::canonical_category(raw)?;
            Some(Parsed::Category { category: category.to_string() })
        }
    }
}
