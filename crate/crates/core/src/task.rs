//! Task templates and their goal conditions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::vocab::{self, category_of};
use crate::world::WorldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    WaterPlant,
    BoilPotato,
    MakeCoffee,
    MakePlateOfToast,
    CleanAll,
    PutAllOnAny,
    NSlicesIn,
    PutAllInOne,
    NCookedSlicesIn,
    PrepareBreakfast,
    PrepareSandwich,
    PrepareSalad,
}

impl TaskKind {
    pub const ALL: [TaskKind; 12] = [
        TaskKind::WaterPlant,
        TaskKind::BoilPotato,
        TaskKind::MakeCoffee,
        TaskKind::MakePlateOfToast,
        TaskKind::CleanAll,
        TaskKind::PutAllOnAny,
        TaskKind::NSlicesIn,
        TaskKind::PutAllInOne,
        TaskKind::NCookedSlicesIn,
        TaskKind::PrepareBreakfast,
        TaskKind::PrepareSandwich,
        TaskKind::PrepareSalad,
    ];

    /// Template name as written in the planning prompt's task list.
    pub fn template(self) -> &'static str {
        match self {
            TaskKind::WaterPlant => "Water plant",
            TaskKind::BoilPotato => "Boil potato",
            TaskKind::MakeCoffee => "Make coffee",
            TaskKind::MakePlateOfToast => "Make plate of toast",
            TaskKind::CleanAll => "Clean N Object",
            TaskKind::PutAllOnAny => "Put N Object on any Receptacle",
            TaskKind::NSlicesIn => "N slices of Object in Receptacle",
            TaskKind::PutAllInOne => "Put N Object in one Receptacle",
            TaskKind::NCookedSlicesIn => "N cooked Object slices in Receptacle",
            TaskKind::PrepareBreakfast => "Prepare breakfast",
            TaskKind::PrepareSandwich => "Prepare sandwich",
            TaskKind::PrepareSalad => "Prepare salad",
        }
    }

    /// Short name used in task lists and per-task report tables.
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::CleanAll => "Clean all X",
            TaskKind::PutAllOnAny => "Put all X on any Y",
            TaskKind::NSlicesIn => "N slices of X in Y",
            TaskKind::PutAllInOne => "Put all X in one Y",
            TaskKind::NCookedSlicesIn => "N cooked X slices in Y",
            other => other.template(),
        }
    }

    pub fn needs_n(self) -> bool {
        matches!(self, TaskKind::NSlicesIn | TaskKind::NCookedSlicesIn)
    }

    pub fn needs_object(self) -> bool {
        matches!(
            self,
            TaskKind::CleanAll
                | TaskKind::PutAllOnAny
                | TaskKind::NSlicesIn
                | TaskKind::PutAllInOne
                | TaskKind::NCookedSlicesIn
        )
    }

    pub fn needs_receptacle(self) -> bool {
        self.needs_object() && self != TaskKind::CleanAll
    }

    /// Accepts the prompt template name, the short name, or the TEACH style
    /// name, case-insensitively.
    pub fn from_name(s: &str) -> Option<TaskKind> {
        let key: String = s.trim().to_ascii_lowercase();
        let key = key.trim_end_matches('.');
        TaskKind::ALL.into_iter().find(|k| {
            key == k.template().to_ascii_lowercase()
                || key == k.name().to_ascii_lowercase()
                || aliases(*k).contains(&key)
        })
    }
}

fn aliases(k: TaskKind) -> &'static [&'static str] {
    match k {
        TaskKind::BoilPotato => &["boil a potato"],
        TaskKind::MakePlateOfToast => &["make a plate of toast"],
        TaskKind::CleanAll => &["clean all x", "clean all object"],
        TaskKind::PutAllOnAny => &["put all x on y", "put all x on any y", "put all object on any receptacle"],
        TaskKind::NCookedSlicesIn => &["n cooked slices of x in y"],
        TaskKind::PrepareBreakfast => &["make breakfast"],
        TaskKind::PrepareSandwich => &["make sandwich"],
        TaskKind::PrepareSalad => &["make salad"],
        _ => &[],
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("task `{task}` needs parameter {param}")]
    MissingParam { task: &'static str, param: &'static str },
    #[error("`{0}` is not an object category")]
    BadCategory(String),
}

/// Raw parameter block as it appears in plan replies and episode files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskParams {
    #[serde(rename = "N", default, deserialize_with = "de_count", skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(rename = "Object", default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(rename = "Receptacle", default, skip_serializing_if = "Option::is_none")]
    pub receptacle: Option<String>,
}

fn de_count<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<u32>, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    Ok(match v {
        serde_json::Value::Number(n) => n.as_u64().map(|n| n as u32),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaskSpec", into = "RawTaskSpec")]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub n: Option<u32>,
    pub object: Option<String>,
    pub receptacle: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawTaskSpec {
    task: String,
    #[serde(default, skip_serializing_if = "is_default_params")]
    task_params: TaskParams,
}

fn is_default_params(p: &TaskParams) -> bool {
    p == &TaskParams::default()
}

impl TryFrom<RawTaskSpec> for TaskSpec {
    type Error = TaskError;
    fn try_from(r: RawTaskSpec) -> Result<Self, TaskError> {
        TaskSpec::from_parts(&r.task, &r.task_params)
    }
}

impl From<TaskSpec> for RawTaskSpec {
    fn from(t: TaskSpec) -> Self {
        RawTaskSpec {
            task: t.kind.template().to_string(),
            task_params: TaskParams {
                n: t.n,
                object: t.object,
                receptacle: t.receptacle,
            },
        }
    }
}

impl TaskSpec {
    pub fn simple(kind: TaskKind) -> TaskSpec {
        TaskSpec {
            kind,
            n: None,
            object: None,
            receptacle: None,
        }
    }

    /// Builds a spec from a task name and a parameter block, keeping only
    /// the slots the template names.
    pub fn from_parts(task: &str, params: &TaskParams) -> Result<TaskSpec, TaskError> {
        let kind = TaskKind::from_name(task).ok_or_else(|| TaskError::UnknownTask(task.to_string()))?;
        let cat = |raw: &Option<String>, param: &'static str| -> Result<String, TaskError> {
            let raw = raw
                .as_deref()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or(TaskError::MissingParam { task: kind.name(), param })?;
            vocab::canonical_category(raw)
                .map(str::to_string)
                .ok_or_else(|| TaskError::BadCategory(raw.to_string()))
        };
        let mut spec = TaskSpec::simple(kind);
        if kind.needs_n() {
            spec.n = Some(params.n.filter(|n| *n > 0).ok_or(TaskError::MissingParam {
                task: kind.name(),
                param: "N",
            })?);
        }
        if kind.needs_object() {
            spec.object = Some(cat(&params.object, "Object")?);
        }
        if kind.needs_receptacle() {
            spec.receptacle = Some(cat(&params.receptacle, "Receptacle")?);
        }
        Ok(spec)
    }

    fn obj(&self) -> &str {
        self.object.as_deref().unwrap_or_default()
    }

    fn rec(&self) -> &str {
        self.receptacle.as_deref().unwrap_or_default()
    }
}

/// Concrete rendering used in prompts, e.g. `Put all Watch on any SideTable`.
/// Round-trips through `FromStr`.
impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n.unwrap_or(1);
        match self.kind {
            TaskKind::CleanAll => write!(f, "Clean all {}", self.obj()),
            TaskKind::PutAllOnAny => write!(f, "Put all {} on any {}", self.obj(), self.rec()),
            TaskKind::NSlicesIn => write!(f, "{n} slices of {} in {}", self.obj(), self.rec()),
            TaskKind::PutAllInOne => write!(f, "Put all {} in one {}", self.obj(), self.rec()),
            TaskKind::NCookedSlicesIn => {
                write!(f, "{n} cooked {} slices in {}", self.obj(), self.rec())
            }
            k => f.write_str(k.template()),
        }
    }
}

impl FromStr for TaskSpec {
    type Err = TaskError;
    fn from_str(s: &str) -> Result<TaskSpec, TaskError> {
        let s = s.trim();
        if let Some(kind) = TaskKind::from_name(s) {
            if !kind.needs_object() {
                return Ok(TaskSpec::simple(kind));
            }
        }
        let words: Vec<&str> = s.split_whitespace().collect();
        let p = |n: Option<&str>, o: &str, r: Option<&str>| TaskParams {
            n: n.and_then(|n| n.parse().ok()),
            object: Some(o.to_string()),
            receptacle: r.map(str::to_string),
        };
        let (name, params) = match words.as_slice() {
            ["Clean", "all", o] => ("Clean all X", p(None, o, None)),
            ["Put", "all", o, "on", "any", r] => ("Put all X on any Y", p(None, o, Some(r))),
            ["Put", "all", o, "in", "one", r] => ("Put all X in one Y", p(None, o, Some(r))),
            [n, "slices", "of", o, "in", r] => ("N slices of X in Y", p(Some(n), o, Some(r))),
            [n, "cooked", o, "slices", "in", r] => ("N cooked X slices in Y", p(Some(n), o, Some(r))),
            _ => return Err(TaskError::UnknownTask(s.to_string())),
        };
        TaskSpec::from_parts(name, &params)
    }
}

/// Property names shared by the simulator and the parsed scene text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    Toggled,
    Sliced,
    Water,
    Clean,
    Open,
    Cooked,
    Coffee,
}

/// Read-only view of object state. Implemented by the simulator and by the
/// textual scene representation, so goals can be judged from either.
pub trait StateView {
    /// All known object ids, sorted.
    fn object_ids(&self) -> Vec<String>;
    /// `None` when the property is unknown to this view.
    fn prop(&self, id: &str, prop: Prop) -> Option<bool>;
    fn parent(&self, id: &str) -> Option<String>;
    fn held(&self) -> Option<String>;

    fn instances(&self, category: &str) -> Vec<String> {
        self.object_ids()
            .into_iter()
            .filter(|id| category_of(id) == category)
            .collect()
    }

    fn has(&self, id: &str, prop: Prop) -> bool {
        self.prop(id, prop) == Some(true)
    }

    fn ancestors(&self, id: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = self.parent(id);
        while let Some(p) = cur {
            if out.contains(&p) {
                break;
            }
            cur = self.parent(&p);
            out.push(p);
        }
        out
    }
}

impl StateView for WorldState {
    fn object_ids(&self) -> Vec<String> {
        self.objects.keys().cloned().collect()
    }

    fn prop(&self, id: &str, prop: Prop) -> Option<bool> {
        let p = &self.objects.get(id)?.properties;
        Some(match prop {
            Prop::Toggled => p.is_toggled,
            Prop::Sliced => p.is_sliced,
            Prop::Water => p.is_filled_with_water,
            Prop::Clean => p.is_clean,
            Prop::Open => p.is_open,
            Prop::Cooked => p.is_cooked,
            Prop::Coffee => p.filled_with_coffee,
        })
    }

    fn parent(&self, id: &str) -> Option<String> {
        self.objects.get(id)?.parent.clone()
    }

    fn held(&self) -> Option<String> {
        self.agent.held.clone()
    }
}

/// A group of conditions judged against one jointly chosen set of objects,
/// e.g. "the same mug is clean and holds coffee".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoalGroup {
    WaterPlant,
    BoilPotato,
    Coffee,
    Toast,
    Clean { id: String },
    OnAny { id: String, receptacle: String },
    InOne { ids: Vec<String>, receptacle: String },
    Slices { n: u32, object: String, receptacle: String, cooked: bool },
    Sandwich,
    Salad,
}

/// How a group was judged: one flag per condition and the objects chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Grounding {
    pub satisfied: Vec<bool>,
    pub bindings: Vec<(&'static str, String)>,
}

impl Grounding {
    pub fn binding(&self, role: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(r, _)| *r == role)
            .map(|(_, id)| id.as_str())
    }
}

const BOIL_VESSELS: [&str; 3] = ["Pot", "Bowl", "Kettle"];

fn parent_is(view: &dyn StateView, id: &str, receptacle: &str) -> bool {
    view.parent(id).as_deref() == Some(receptacle)
}

/// Picks the candidate with the most satisfied conditions. Candidates come
/// in id order, so ties keep the lowest id.
fn best<C, F>(candidates: Vec<C>, width: usize, judge: F) -> (Option<C>, Vec<bool>)
where
    F: Fn(&C) -> Vec<bool>,
{
    let mut chosen: Option<(C, Vec<bool>)> = None;
    for c in candidates {
        let flags = judge(&c);
        let score = flags.iter().filter(|f| **f).count();
        let better = match &chosen {
            None => true,
            Some((_, prev)) => score > prev.iter().filter(|f| **f).count(),
        };
        if better {
            chosen = Some((c, flags));
        }
    }
    match chosen {
        Some((c, flags)) => (Some(c), flags),
        None => (None, vec![false; width]),
    }
}

fn count_on(view: &dyn StateView, category: &str, parent: &str, cooked: bool) -> usize {
    view.instances(category)
        .iter()
        .filter(|s| parent_is(view, s, parent) && (!cooked || view.has(s, Prop::Cooked)))
        .count()
}

fn dishware(category: &str) -> bool {
    vocab::default_affordances(category).dirtyable
}

impl GoalGroup {
    pub fn width(&self) -> usize {
        match self {
            GoalGroup::WaterPlant | GoalGroup::BoilPotato => 1,
            GoalGroup::Clean { .. } | GoalGroup::OnAny { .. } => 1,
            GoalGroup::Coffee => 2,
            GoalGroup::Toast => 3,
            GoalGroup::InOne { ids, .. } => ids.len(),
            GoalGroup::Slices { n, receptacle, .. } => *n as usize + usize::from(dishware(receptacle)),
            GoalGroup::Sandwich | GoalGroup::Salad => 4,
        }
    }

    pub fn descriptions(&self) -> Vec<String> {
        match self {
            GoalGroup::WaterPlant => vec!["a HousePlant is filled with water".into()],
            GoalGroup::BoilPotato => {
                vec!["a Potato is cooked inside a water-filled Pot, Bowl or Kettle".into()]
            }
            GoalGroup::Coffee => vec!["a Mug is clean".into(), "the same Mug is filled with coffee".into()],
            GoalGroup::Toast => vec![
                "a BreadSliced is cooked".into(),
                "a Plate is clean".into(),
                "the toast is on the plate".into(),
            ],
            GoalGroup::Clean { id } => vec![format!("{id} is clean")],
            GoalGroup::OnAny { id, receptacle } => vec![format!("{id} is on a {receptacle}")],
            GoalGroup::InOne { ids, receptacle } => ids
                .iter()
                .map(|id| format!("{id} is in the shared {receptacle}"))
                .collect(),
            GoalGroup::Slices {
                n,
                object,
                receptacle,
                cooked,
            } => {
                let what = if *cooked { "cooked " } else { "" };
                let mut out: Vec<String> = (1..=*n)
                    .map(|k| format!("at least {k} {what}{object} slice(s) in a {receptacle}"))
                    .collect();
                if dishware(receptacle) {
                    out.push(format!("the {receptacle} is clean"));
                }
                out
            }
            GoalGroup::Sandwich => vec![
                "a Plate is clean".into(),
                "one toasted BreadSliced on the plate".into(),
                "two toasted BreadSliced on the plate".into(),
                "a LettuceSliced on the plate".into(),
            ],
            GoalGroup::Salad => vec![
                "a Plate is clean".into(),
                "a LettuceSliced on the plate".into(),
                "a TomatoSliced on the plate".into(),
                "a cooked PotatoSliced on the plate".into(),
            ],
        }
    }

    pub fn ground(&self, view: &dyn StateView) -> Grounding {
        let mut g = Grounding::default();
        match self {
            GoalGroup::WaterPlant => {
                let (p, flags) = best(view.instances("HousePlant"), 1, |p| vec![view.has(p, Prop::Water)]);
                g.satisfied = flags;
                g.bindings.extend(p.map(|p| ("plant", p)));
            }
            GoalGroup::BoilPotato => {
                let mut potatoes = view.instances("Potato");
                potatoes.extend(view.instances("PotatoSliced"));
                let (p, flags) = best(potatoes, 1, |p| {
                    let boiled = view.has(p, Prop::Cooked)
                        && view.ancestors(p).iter().any(|a| {
                            BOIL_VESSELS.contains(&category_of(a)) && view.has(a, Prop::Water)
                        });
                    vec![boiled]
                });
                g.satisfied = flags;
                g.bindings.extend(p.map(|p| ("potato", p)));
            }
            GoalGroup::Coffee => {
                let (m, flags) = best(view.instances("Mug"), 2, |m| {
                    vec![view.has(m, Prop::Clean), view.has(m, Prop::Coffee)]
                });
                g.satisfied = flags;
                g.bindings.extend(m.map(|m| ("mug", m)));
            }
            GoalGroup::Toast => {
                let plates = view.instances("Plate");
                let toasts = view.instances("BreadSliced");
                let mut pairs: Vec<(Option<String>, Option<String>)> = Vec::new();
                let opt = |v: &[String]| -> Vec<Option<String>> {
                    if v.is_empty() {
                        vec![None]
                    } else {
                        v.iter().cloned().map(Some).collect()
                    }
                };
                for p in opt(&plates) {
                    for t in opt(&toasts) {
                        pairs.push((p.clone(), t));
                    }
                }
                let (pair, flags) = best(pairs, 3, |(p, t)| {
                    let cooked = t.as_ref().is_some_and(|t| view.has(t, Prop::Cooked));
                    let clean = p.as_ref().is_some_and(|p| view.has(p, Prop::Clean));
                    let on = match (p, t) {
                        (Some(p), Some(t)) => parent_is(view, t, p),
                        _ => false,
                    };
                    vec![cooked, clean, on]
                });
                g.satisfied = flags;
                if let Some((p, t)) = pair {
                    g.bindings.extend(p.map(|p| ("plate", p)));
                    g.bindings.extend(t.map(|t| ("toast", t)));
                }
            }
            GoalGroup::Clean { id } => {
                g.satisfied = vec![view.has(id, Prop::Clean)];
                g.bindings.push(("object", id.clone()));
            }
            GoalGroup::OnAny { id, receptacle } => {
                let on = view
                    .parent(id)
                    .is_some_and(|p| category_of(&p) == receptacle);
                g.satisfied = vec![on];
                g.bindings.push(("object", id.clone()));
            }
            GoalGroup::InOne { ids, receptacle } => {
                let (r, flags) = best(view.instances(receptacle), ids.len(), |r| {
                    ids.iter().map(|id| parent_is(view, id, r)).collect()
                });
                g.satisfied = flags;
                g.bindings.extend(r.map(|r| ("receptacle", r)));
            }
            GoalGroup::Slices {
                n,
                object,
                receptacle,
                cooked,
            } => {
                let sliced = vocab::sliced_category(object).unwrap_or(object.as_str());
                let needs_clean = dishware(receptacle);
                let (r, flags) = best(view.instances(receptacle), self.width(), |r| {
                    let have = count_on(view, sliced, r, *cooked);
                    let mut f: Vec<bool> = (1..=*n as usize).map(|k| have >= k).collect();
                    if needs_clean {
                        f.push(view.has(r, Prop::Clean));
                    }
                    f
                });
                g.satisfied = flags;
                g.bindings.extend(r.map(|r| ("receptacle", r)));
            }
            GoalGroup::Sandwich | GoalGroup::Salad => {
                let salad = matches!(self, GoalGroup::Salad);
                let (p, flags) = best(view.instances("Plate"), 4, |p| {
                    let clean = view.has(p, Prop::Clean);
                    if salad {
                        vec![
                            clean,
                            count_on(view, "LettuceSliced", p, false) >= 1,
                            count_on(view, "TomatoSliced", p, false) >= 1,
                            count_on(view, "PotatoSliced", p, true) >= 1,
                        ]
                    } else {
                        let toast = count_on(view, "BreadSliced", p, true);
                        vec![
                            clean,
                            toast >= 1,
                            toast >= 2,
                            count_on(view, "LettuceSliced", p, false) >= 1,
                        ]
                    }
                });
                g.satisfied = flags;
                g.bindings.extend(p.map(|p| ("plate", p)));
            }
        }
        debug_assert_eq!(g.satisfied.len(), self.width());
        g
    }
}

/// One condition of a task, checkable against any state view.
#[derive(Debug, Clone)]
pub struct GoalCondition {
    pub description: String,
    group: Arc<GoalGroup>,
    index: usize,
}

impl GoalCondition {
    pub fn check(&self, view: &dyn StateView) -> bool {
        self.group.ground(view).satisfied[self.index]
    }

    pub fn group(&self) -> &GoalGroup {
        &self.group
    }
}

/// Groups for a task, with "all X" quantifiers expanded over the instances
/// present in `world`.
pub fn goal_groups(task: &TaskSpec, world: &dyn StateView) -> Vec<GoalGroup> {
    let obj = task.obj().to_string();
    let rec = task.rec().to_string();
    match task.kind {
        TaskKind::WaterPlant => vec![GoalGroup::WaterPlant],
        TaskKind::BoilPotato => vec![GoalGroup::BoilPotato],
        TaskKind::MakeCoffee => vec![GoalGroup::Coffee],
        TaskKind::MakePlateOfToast => vec![GoalGroup::Toast],
        TaskKind::PrepareBreakfast => vec![GoalGroup::Coffee, GoalGroup::Toast],
        TaskKind::PrepareSandwich => vec![GoalGroup::Sandwich],
        TaskKind::PrepareSalad => vec![GoalGroup::Salad],
        TaskKind::CleanAll => world
            .instances(&obj)
            .into_iter()
            .map(|id| GoalGroup::Clean { id })
            .collect(),
        TaskKind::PutAllOnAny => world
            .instances(&obj)
            .into_iter()
            .map(|id| GoalGroup::OnAny {
                id,
                receptacle: rec.clone(),
            })
            .collect(),
        TaskKind::PutAllInOne => vec![GoalGroup::InOne {
            ids: world.instances(&obj),
            receptacle: rec,
        }],
        TaskKind::NSlicesIn | TaskKind::NCookedSlicesIn => vec![GoalGroup::Slices {
            n: task.n.unwrap_or(1),
            object: obj,
            receptacle: rec,
            cooked: task.kind == TaskKind::NCookedSlicesIn,
        }],
    }
}

pub fn goal_conditions_for(task: &TaskSpec, world: &dyn StateView) -> Vec<GoalCondition> {
    let mut out = Vec::new();
    for group in goal_groups(task, world) {
        let group = Arc::new(group);
        for (index, description) in group.descriptions().into_iter().enumerate() {
            out.push(GoalCondition {
                description,
                group: Arc::clone(&group),
                index,
            });
        }
    }
    out
}

/// Returns (satisfied, total).
pub fn evaluate_goals(task: &TaskSpec, world: &dyn StateView) -> (usize, usize) {
    let groups = goal_groups(task, world);
    let mut sat = 0;
    let mut total = 0;
    for g in &groups {
        let flags = g.ground(world).satisfied;
        total += flags.len();
        sat += flags.iter().filter(|f| **f).count();
    }
    (sat, total)
}
