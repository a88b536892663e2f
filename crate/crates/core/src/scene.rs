//! Pruned textual scene representation built from object memory.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::executor::memory::{MemoryEntry, ObjectMemory};
use crate::subgoal::Subgoal;
use crate::task::{Prop, StateView};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactKind {
    Property,
    Containment,
    Holding,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SceneFact {
    pub rendered: String,
    pub kind: FactKind,
}

impl SceneFact {
    fn new(kind: FactKind, body: String) -> Self {
        SceneFact {
            rendered: format!("({body})"),
            kind,
        }
    }
}

/// Joins ids as `A, B and C`.
pub fn join_ids<S: AsRef<str>>(ids: &[S]) -> String {
    match ids {
        [] => String::new(),
        [one] => one.as_ref().to_string(),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(|s| s.as_ref()).collect();
            format!("{} and {}", head.join(", "), last.as_ref())
        }
    }
}

fn property_facts(id: &str, e: &MemoryEntry, out: &mut Vec<SceneFact>) {
    let a = e.affordances;
    let p = e.properties;
    let mut push = |state: &str| out.push(SceneFact::new(FactKind::Property, format!("{id} is {state}")));
    if a.toggleable {
        push(if p.is_toggled { "toggled on" } else { "toggled off" });
    }
    if a.sliceable {
        push(if p.is_sliced { "sliced" } else { "not sliced" });
    }
    if a.fillable {
        push(if p.is_filled_with_water {
            "filled with water"
        } else if p.filled_with_coffee {
            "filled with coffee"
        } else {
            "not filled with water"
        });
    }
    if a.dirtyable {
        push(if p.is_clean { "clean" } else { "dirty" });
    }
    if a.openable {
        push(if p.is_open { "open" } else { "closed" });
    }
    if a.cookable {
        push(if p.is_cooked { "cooked" } else { "not cooked" });
    }
}

/// Facts about remembered objects whose category appears in `plan`, ordered
/// by id, with the holding fact last.
pub fn build_scene(memory: &ObjectMemory, plan: &[Subgoal], held: Option<&str>) -> Vec<SceneFact> {
    let relevant: BTreeSet<&str> = plan.iter().flat_map(|s| s.categories()).collect();
    let mut out = Vec::new();
    for (id, e) in memory.iter() {
        if !relevant.contains(e.category.as_str()) {
            continue;
        }
        property_facts(id, e, &mut out);
        if let Some(p) = &e.parent {
            out.push(SceneFact::new(FactKind::Containment, format!("{id} in {p}")));
        }
        if !e.children.is_empty() {
            let kids: Vec<&String> = e.children.iter().collect();
            out.push(SceneFact::new(
                FactKind::Containment,
                format!("{id} contains {}", join_ids(&kids)),
            ));
        }
    }
    out.push(SceneFact::new(
        FactKind::Holding,
        format!("agent holding {}", held.unwrap_or("nothing")),
    ));
    out
}

pub fn render_scene(facts: &[SceneFact]) -> String {
    facts
        .iter()
        .map(|f| f.rendered.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Object state recovered from scene text. Properties not mentioned are
/// unknown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SceneView {
    ids: BTreeSet<String>,
    props: BTreeMap<(String, Prop), bool>,
    parents: BTreeMap<String, String>,
    held: Option<String>,
}

fn split_ids(list: &str) -> Vec<String> {
    list.split(',')
        .flat_map(|part| part.split(" and "))
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl SceneView {
    pub fn parse(text: &str) -> SceneView {
        let mut v = SceneView::default();
        let mut rest = text;
        while let Some(start) = rest.find('(') {
            let Some(len) = rest[start..].find(')') else { break };
            let body = rest[start + 1..start + len].trim();
            rest = &rest[start + len + 1..];
            v.absorb(body);
        }
        v
    }

    fn absorb(&mut self, body: &str) {
        if let Some(h) = body.strip_prefix("agent holding ") {
            let h = h.trim();
            if h != "nothing" {
                self.ids.insert(h.to_string());
                self.held = Some(h.to_string());
            }
            return;
        }
        if let Some((id, kids)) = body.split_once(" contains ") {
            let id = id.trim().to_string();
            for k in split_ids(kids) {
                self.parents.insert(k.clone(), id.clone());
                self.ids.insert(k);
            }
            self.ids.insert(id);
            return;
        }
        if let Some((id, state)) = body.split_once(" is ") {
            let id = id.trim().to_string();
            let set: &[(Prop, bool)] = match state.trim() {
                "toggled on" => &[(Prop::Toggled, true)],
                "toggled off" => &[(Prop::Toggled, false)],
                "sliced" => &[(Prop::Sliced, true)],
                "not sliced" => &[(Prop::Sliced, false)],
                "filled with water" => &[(Prop::Water, true), (Prop::Coffee, false)],
                "filled with coffee" => &[(Prop::Coffee, true), (Prop::Water, false)],
                "not filled with water" => &[(Prop::Water, false), (Prop::Coffee, false)],
                "clean" => &[(Prop::Clean, true)],
                "dirty" => &[(Prop::Clean, false)],
                "open" => &[(Prop::Open, true)],
                "closed" => &[(Prop::Open, false)],
                "cooked" => &[(Prop::Cooked, true)],
                "not cooked" => &[(Prop::Cooked, false)],
                _ => &[],
            };
            for (p, b) in set {
                self.props.insert((id.clone(), *p), *b);
            }
            self.ids.insert(id);
            return;
        }
        if let Some((id, parent)) = body.split_once(" in ") {
            let (id, parent) = (id.trim().to_string(), parent.trim().to_string());
            self.ids.insert(id.clone());
            self.ids.insert(parent.clone());
            self.parents.insert(id, parent);
        }
    }

    pub fn children(&self, id: &str) -> Vec<String> {
        self.parents
            .iter()
            .filter(|(_, p)| p.as_str() == id)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    /// Known instances of `category` in id order.
    pub fn known(&self, category: &str) -> Vec<String> {
        self.ids
            .iter()
            .filter(|id| vocab::category_of(id) == category)
            .cloned()
            .collect()
    }
}

impl StateView for SceneView {
    fn object_ids(&self) -> Vec<String> {
        self.ids.iter().cloned().collect()
    }

    fn prop(&self, id: &str, prop: Prop) -> Option<bool> {
        self.props.get(&(id.to_string(), prop)).copied()
    }

    fn parent(&self, id: &str) -> Option<String> {
        self.parents.get(id).cloned()
    }

    fn held(&self) -> Option<String> {
        self.held.clone()
    }
}
