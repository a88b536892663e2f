//! Initial plan generation from a task dialogue: example retrieval, the plan
//! request, and category normalization of everything the reply mentions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::reasoner::extract::validate;
use crate::reasoner::scripted::closest_category;
use crate::reasoner::{Parsed, Reasoner, ReasonerError, ReasonerRequest, TemplateId};
use crate::subgoal::Subgoal;
use crate::task::{TaskError, TaskParams, TaskSpec};
use crate::vocab;

/// Examples handed to the plan prompt.
pub const RETRIEVED: usize = 3;

const EXAMPLE_INDENT: usize = 56;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Speaker {
    Commander,
    Driver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: Speaker,
    pub text: String,
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>", self.speaker)?;
        if !self.text.is_empty() {
            write!(f, " {}", self.text)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("dialogue has no turns")]
    Empty,
    #[error("turn `{0}` does not start with <Commander> or <Driver>")]
    BadTurn(String),
}

/// Ordered Commander/Driver turns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDialogue", into = "Vec<String>")]
pub struct Dialogue {
    turns: Vec<Turn>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDialogue {
    Text(String),
    Lines(Vec<String>),
    Turns(Vec<Turn>),
}

impl TryFrom<RawDialogue> for Dialogue {
    type Error = DialogueError;
    fn try_from(raw: RawDialogue) -> Result<Self, DialogueError> {
        match raw {
            RawDialogue::Text(t) => Dialogue::parse(&t),
            RawDialogue::Lines(lines) => Dialogue::parse(&lines.join("\n")),
            RawDialogue::Turns(turns) => Dialogue::new(turns),
        }
    }
}

impl From<Dialogue> for Vec<String> {
    fn from(d: Dialogue) -> Self {
        d.turns.iter().map(Turn::to_string).collect()
    }
}

impl Dialogue {
    pub fn new(turns: Vec<Turn>) -> Result<Self, DialogueError> {
        if turns.is_empty() {
            return Err(DialogueError::Empty);
        }
        Ok(Dialogue { turns })
    }

    /// One turn per non-blank line, each starting `<Commander>` or `<Driver>`.
    pub fn parse(text: &str) -> Result<Self, DialogueError> {
        let mut turns = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (speaker, rest) = if let Some(r) = line.strip_prefix("<Commander>") {
                (Speaker::Commander, r)
            } else if let Some(r) = line.strip_prefix("<Driver>") {
                (Speaker::Driver, r)
            } else {
                return Err(DialogueError::BadTurn(line.to_string()));
            };
            turns.push(Turn {
                speaker,
                text: rest.trim().to_string(),
            });
        }
        Dialogue::new(turns)
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    /// Lower-case word tokens of all turn texts.
    pub fn tokens(&self) -> BTreeSet<String> {
        self.turns
            .iter()
            .flat_map(|t| t.text.split(|c: char| !c.is_ascii_alphanumeric()))
            .filter(|w| !w.is_empty())
            .map(str::to_ascii_lowercase)
            .collect()
    }
}

impl fmt::Display for Dialogue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.turns.iter().map(Turn::to_string).collect();
        f.write_str(&lines.join("\n"))
    }
}

/// A dialogue with the plan reply it should produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub dialogue: Dialogue,
    pub output: Value,
}

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("invalid pool file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("demonstration {0} does not match the plan reply schema")]
    BadOutput(usize),
    #[error("pool needs at least {RETRIEVED} demonstrations, found {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoPool {
    demos: Vec<Demonstration>,
}

impl DemoPool {
    pub fn from_json(text: &str) -> Result<Self, PoolError> {
        let demos: Vec<Demonstration> = serde_json::from_str(text)?;
        Self::new(demos)
    }

    pub fn new(demos: Vec<Demonstration>) -> Result<Self, PoolError> {
        if demos.len() < RETRIEVED {
            return Err(PoolError::TooSmall(demos.len()));
        }
        if let Some(i) = demos.iter().position(|d| validate(TemplateId::Plan, &d.output).is_none()) {
            return Err(PoolError::BadOutput(i));
        }
        Ok(DemoPool { demos })
    }

    /// The shipped 24-entry pool.
    pub fn builtin() -> Self {
        Self::from_json(include_str!("../assets/demo_pool.json")).expect("shipped pool is valid")
    }

    pub fn demos(&self) -> &[Demonstration] {
        &self.demos
    }
}

/// Token overlap as `(shared, union)`, i.e. a Jaccard ratio kept exact.
pub fn similarity(a: &Dialogue, b: &Dialogue) -> (usize, usize) {
    let (ta, tb) = (a.tokens(), b.tokens());
    (ta.intersection(&tb).count(), ta.union(&tb).count())
}

fn cmp_ratio(a: (usize, usize), b: (usize, usize)) -> Ordering {
    let scale = |(n, d): (usize, usize), other: usize| if d == 0 { 0 } else { n * other };
    scale(a, b.1.max(1)).cmp(&scale(b, a.1.max(1)))
}

/// Indices of the most similar demonstrations, best first, ties by index.
pub fn retrieve_examples(dialogue: &Dialogue, pool: &DemoPool) -> Vec<usize> {
    let scores: Vec<(usize, usize)> = pool.demos.iter().map(|d| similarity(dialogue, &d.dialogue)).collect();
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| cmp_ratio(scores[j], scores[i]).then(i.cmp(&j)));
    idx.truncate(RETRIEVED);
    idx
}

/// Renders demonstrations in the layout the plan prompt expects.
pub fn format_examples(demos: &[&Demonstration]) -> String {
    demos
        .iter()
        .enumerate()
        .map(|(i, d)| {
            format!(
                "{:indent$}Example {}\nDialogue:\n{}\n\nOutput:\n{}",
                "",
                i + 1,
                d.dialogue,
                serde_json::to_string_pretty(&d.output).expect("values serialize"),
                indent = EXAMPLE_INDENT
            )
        })
        .collect::<Vec<_>>()
        .join("\n\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.subject, self.relation, self.object)
    }
}

/// Renders triples as `[(A,in,B), (C,on,D)]`.
pub fn render_triples(triples: &[Triple]) -> String {
    let parts: Vec<String> = triples.iter().map(Triple::to_string).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanOutput {
    pub task: TaskSpec,
    pub objects_of_interest: Vec<String>,
    pub object_locations: Vec<Triple>,
    pub subgoals: Vec<Subgoal>,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("plan request failed: {0}")]
    Reasoner(#[from] ReasonerError),
    #[error("plan reply names an unusable task: {error}")]
    Task { error: TaskError, raw: String },
    #[error("plan request returned a non-plan reply")]
    WrongReply { raw: String },
}

/// Maps a raw object name to a vocabulary category. Names already in the
/// vocabulary are kept; others go to the reasoner, and to the local
/// edit-distance rule if the reasoner cannot answer.
pub fn normalize_category(raw: &str, reasoner: &dyn Reasoner) -> String {
    if let Some(c) = vocab::canonical_category(raw) {
        return c.to_string();
    }
    let req = ReasonerRequest::new(TemplateId::Normalize).with("OBJECT", raw.trim());
    match reasoner.complete(&req) {
        Ok(r) => match r.parsed {
            Parsed::Category { category } => category,
            _ => closest_category(raw).to_string(),
        },
        Err(e) => {
            log::warn!("normalizing `{raw}` locally: {e}");
            closest_category(raw).to_string()
        }
    }
}

struct Normalizer<'a> {
    reasoner: &'a dyn Reasoner,
    cache: BTreeMap<String, String>,
}

impl Normalizer<'_> {
    fn category(&mut self, raw: &str) -> String {
        if let Some(c) = self.cache.get(raw) {
            return c.clone();
        }
        let c = normalize_category(raw, self.reasoner);
        self.cache.insert(raw.to_string(), c.clone());
        c
    }

    /// Normalizes the category part of an id, keeping any `_k` suffix.
    fn reference(&mut self, r: &str) -> String {
        let cat = vocab::category_of(r);
        format!("{}{}", self.category(cat), &r[cat.len()..])
    }
}

/// Asks the reasoner for a plan and normalizes every object mention in it.
pub fn generate_plan(dialogue: &Dialogue, pool: &DemoPool, reasoner: &dyn Reasoner) -> Result<PlanOutput, PlanError> {
    let chosen: Vec<&Demonstration> = retrieve_examples(dialogue, pool).into_iter().map(|i| &pool.demos[i]).collect();
    let req = ReasonerRequest::new(TemplateId::Plan)
        .with("RETRIEVED_EXAMPLES", format_examples(&chosen))
        .with("INPUT_DIALOGUE", dialogue.to_string());
    let reply = reasoner.complete(&req)?;
    let Parsed::Plan(plan) = reply.parsed else {
        return Err(PlanError::WrongReply { raw: reply.raw });
    };
    let mut norm = Normalizer {
        reasoner,
        cache: BTreeMap::new(),
    };
    let nonblank = |s: &Option<String>| s.as_deref().map(str::trim).filter(|s| !s.is_empty()).map(str::to_string);
    let params = TaskParams {
        n: plan.task_params.n,
        object: nonblank(&plan.task_params.object).map(|o| norm.category(&o)),
        receptacle: nonblank(&plan.task_params.receptacle).map(|r| norm.category(&r)),
    };
    let task = TaskSpec::from_parts(&plan.task, &params).map_err(|error| PlanError::Task {
        error,
        raw: reply.raw.clone(),
    })?;
    let objects_of_interest = plan.objects_of_interest.iter().map(|o| norm.category(o)).collect();
    let object_locations = crate::reasoner::scripted::parse_triples(&plan.object_locations.join(" "))
        .into_iter()
        .map(|(s, r, o)| Triple {
            subject: norm.reference(&s),
            relation: r,
            object: norm.reference(&o),
        })
        .collect();
    let subgoals = plan
        .subgoals
        .iter()
        .map(|sg| sg.map_categories(|c| norm.category(c)))
        .collect();
    Ok(PlanOutput {
        task,
        objects_of_interest,
        object_locations,
        subgoals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dialogue_round_trip() {
        let d = Dialogue::parse("<Driver> hi\n<Commander> make coffee\n<Driver>").unwrap();
        assert_eq!(d.to_string(), "<Driver> hi\n<Commander> make coffee\n<Driver>");
        assert!(Dialogue::parse("hello").is_err());
        assert!(Dialogue::parse("").is_err());
    }

    #[test]
    fn builtin_pool_loads() {
        assert_eq!(DemoPool::builtin().demos().len(), 24);
    }

    #[test]
    fn ratio_order() {
        assert_eq!(cmp_ratio((1, 2), (2, 4)), Ordering::Equal);
        assert_eq!(cmp_ratio((1, 3), (1, 2)), Ordering::Less);
        assert_eq!(cmp_ratio((0, 0), (0, 5)), Ordering::Equal);
    }
}
