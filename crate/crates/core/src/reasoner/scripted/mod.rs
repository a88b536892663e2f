//! Deterministic backend that answers from the request text alone, using
//! fixed domain rules instead of a language model.

mod reflect;
mod stages;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{complete_with_retries, Reasoner, ReasonerError, ReasonerReply, ReasonerRequest, TemplateId};
use crate::scene::SceneView;
use crate::subgoal::{Subgoal, Verb};
use crate::task::TaskSpec;
use crate::vocab;

pub use stages::{postcondition_holds, workaround_substitutes};

/// Common names that edit distance alone maps poorly.
const SYNONYMS: &[(&str, &str)] = &[
    ("cupboard", "Cabinet"),
    ("cupboards", "Cabinet"),
    ("table", "DiningTable"),
    ("kitchentable", "DiningTable"),
    ("island", "CounterTop"),
    ("counter", "CounterTop"),
    ("refrigerator", "Fridge"),
    ("couch", "Sofa"),
    ("stove", "StoveBurner"),
    ("burner", "StoveBurner"),
    ("coffeemaker", "CoffeeMachine"),
    ("plant", "HousePlant"),
    ("remote", "RemoteControl"),
    ("sponge", "DishSponge"),
    ("phone", "CellPhone"),
    ("tv", "Television"),
    ("trash", "GarbageCan"),
    ("bin", "GarbageCan"),
    ("tap", "Faucet"),
    ("toast", "BreadSliced"),
    ("coffeecup", "Mug"),
];

/// Closest vocabulary entry: exact (case-insensitive) match, then the
/// synonym table, then minimum edit distance with ties broken by
/// vocabulary order.
pub fn closest_category(raw: &str) -> &'static str {
    if let Some(c) = vocab::canonical_category(raw) {
        return c;
    }
    let key: String = raw
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if let Some((_, c)) = SYNONYMS.iter().find(|(k, _)| *k == key) {
        return c;
    }
    let mut best = (usize::MAX, vocab::CATEGORIES[0]);
    for c in vocab::CATEGORIES {
        let d = strsim::levenshtein(&key, &c.to_ascii_lowercase());
        if d < best.0 {
            best = (d, c);
        }
    }
    best.1
}

/// `(subject, relation, object)` triples from text like
/// `[(Potato_1,inside,Fridge_1), ...]`.
pub fn parse_triples(text: &str) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('(') {
        let Some(len) = rest[start..].find(')') else { break };
        let parts: Vec<&str> = rest[start + 1..start + len].split(',').map(str::trim).collect();
        if let [s, r, o] = parts[..] {
            out.push((s.to_string(), r.to_ascii_lowercase(), o.to_string()));
        }
        rest = &rest[start + len + 1..];
    }
    out
}

pub fn is_containment(relation: &str) -> bool {
    matches!(relation, "in" | "inside" | "on")
}

/// Navigation steps that reveal `target`, outermost container first.
pub fn search_steps(target: &str, triples: &[(String, String, String)]) -> Vec<Subgoal> {
    let cat = vocab::category_of(target);
    let about = |subject: &str, containment: bool| {
        let pick = |exact: bool| {
            triples.iter().find(|(s, r, _)| {
                is_containment(r) == containment
                    && if exact { s == subject } else { vocab::category_of(s) == vocab::category_of(subject) }
            })
        };
        pick(true).or_else(|| pick(false)).map(|(_, _, o)| o.clone())
    };
    let mut chain: Vec<String> = Vec::new();
    let mut cur = target.to_string();
    while let Some(next) = about(&cur, true) {
        if chain.contains(&next) || next == target || vocab::category_of(&next) == cat {
            break;
        }
        chain.push(next.clone());
        cur = next;
    }
    if chain.is_empty() {
        return about(target, false)
            .map(|o| vec![Subgoal::one(Verb::GoTo, o)])
            .unwrap_or_default();
    }
    let mut steps = Vec::new();
    for c in chain.iter().rev() {
        steps.push(Subgoal::one(Verb::GoTo, c.clone()));
        if vocab::default_affordances(vocab::category_of(c)).openable {
            steps.push(Subgoal::one(Verb::Open, c.clone()));
        }
    }
    steps
}

fn steps_json(steps: &[Subgoal]) -> Vec<String> {
    steps.iter().map(Subgoal::to_string).collect()
}

/// Ground-truth backend for offline runs. Plan requests are answered from
/// canned replies keyed by dialogue text, falling back to the first
/// retrieved demonstration.
#[derive(Debug, Clone, Default)]
pub struct ScriptedReasoner {
    canned: BTreeMap<String, Value>,
}

impl ScriptedReasoner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the plan reply returned for `dialogue`.
    pub fn with_plan(mut self, dialogue: &str, reply: Value) -> Self {
        self.canned.insert(dialogue.trim().to_string(), reply);
        self
    }

    pub fn add_plan(&mut self, dialogue: &str, reply: Value) {
        self.canned.insert(dialogue.trim().to_string(), reply);
    }

    fn answer(&self, req: &ReasonerRequest) -> Result<Value, String> {
        let slot = |n: &str| req.slot(n).unwrap_or_default();
        let task = || slot("TASK").parse::<TaskSpec>().ok();
        let failing = || slot("FAILING_SUBGOAL").parse::<Subgoal>().map_err(|e| e.to_string());
        let scene = || SceneView::parse(slot("SCENE_REPRESENTATION"));
        Ok(match req.template {
            TemplateId::Plan => {
                if let Some(v) = self.canned.get(slot("INPUT_DIALOGUE").trim()) {
                    return Ok(v.clone());
                }
                let examples = slot("RETRIEVED_EXAMPLES");
                let after = examples.find("Output:").map(|i| &examples[i..]).ok_or("no examples to copy")?;
                let de = serde_json::Deserializer::from_str(&after[after.find('{').ok_or("no example output")?..]);
                de.into_iter::<Value>()
                    .next()
                    .and_then(Result::ok)
                    .ok_or("example output is not JSON")?
            }
            TemplateId::Normalize => json!({"category": closest_category(slot("OBJECT"))}),
            TemplateId::Search => {
                let goal = slot("GOAL");
                let target = match goal.parse::<Subgoal>() {
                    Ok(sg) => sg.object().to_string(),
                    Err(_) => goal.split_whitespace().last().unwrap_or_default().to_string(),
                };
                let triples = parse_triples(slot("OBJECT_LOCATIONS"));
                json!(steps_json(&search_steps(&target, &triples)))
            }
            TemplateId::Stage1 => {
                let sg = failing()?;
                let (important, justification) = stages::importance(task().as_ref(), &sg, &scene());
                json!({"important": important, "justification": justification})
            }
            TemplateId::Stage2 => {
                let actions = stages::preconditions(&failing()?, &scene());
                json!({"prior required actions": !actions.is_empty(), "actions": steps_json(&actions)})
            }
            TemplateId::Stage3 => json!({"solution": steps_json(&stages::workaround(&failing()?, &scene()))}),
            TemplateId::Stage4 => {
                let steps = match task() {
                    Some(t) => reflect::corrective_steps(&t, &scene()),
                    None => Vec::new(),
                };
                json!({"solution": steps_json(&steps)})
            }
        })
    }
}

impl Reasoner for ScriptedReasoner {
    fn complete(&self, request: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        request.render()?;
        let raw = self
            .answer(request)
            .map_err(ReasonerError::Unavailable)?
            .to_string();
        complete_with_retries(request.template, 0, || Ok(raw.clone()))
    }
}
