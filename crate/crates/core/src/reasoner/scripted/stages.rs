//! Scripted answers for the in-execution recovery stages.

use crate::scene::SceneView;
use crate::subgoal::{Subgoal, Verb};
use crate::task::{Prop, StateView, TaskSpec};
use crate::vocab::{self, category_of, default_affordances};

/// The scene id a reference denotes: the id itself when known, or the first
/// known instance of a bare category.
pub(super) fn resolve(view: &SceneView, r: &str) -> Option<String> {
    if view.contains_id(r) {
        return Some(r.to_string());
    }
    if vocab::is_instance_id(r) {
        return None;
    }
    view.known(r).into_iter().next()
}

fn resolve_or_raw(view: &SceneView, r: &str) -> String {
    resolve(view, r).unwrap_or_else(|| r.to_string())
}

fn empty_of_liquid(view: &SceneView, id: &str) -> bool {
    view.prop(id, Prop::Water) == Some(false) && view.prop(id, Prop::Coffee) != Some(true)
}

/// A sentence stating that the effect of `sg` already holds in the scene,
/// or `None` when it does not or the scene cannot tell.
pub fn postcondition_holds(sg: &Subgoal, view: &SceneView) -> Option<String> {
    let raw = sg.object();
    let x = resolve(view, raw);
    let held = view.held();
    match sg.verb {
        Verb::Find | Verb::GoTo => None,
        Verb::PickUp => {
            let x = x?;
            (held.as_deref() == Some(x.as_str())).then(|| format!("The agent is already holding {x}"))
        }
        Verb::Place => {
            let x = x?;
            let y = resolve(view, sg.receptacle()?)?;
            (view.parent(&x).as_deref() == Some(y.as_str())).then(|| format!("{x} is already in {y}"))
        }
        Verb::Open => {
            let x = x?;
            view.has(&x, Prop::Open).then(|| format!("{x} is already open"))
        }
        Verb::Close => {
            let x = x?;
            (view.prop(&x, Prop::Open) == Some(false)).then(|| format!("{x} is already closed"))
        }
        Verb::ToggleOn => {
            let x = x?;
            view.has(&x, Prop::Toggled).then(|| format!("{x} is already toggled on"))
        }
        Verb::ToggleOff => {
            let x = x?;
            (view.prop(&x, Prop::Toggled) == Some(false)).then(|| format!("{x} is already toggled off"))
        }
        Verb::Slice => match x {
            Some(x) => view.has(&x, Prop::Sliced).then(|| format!("{x} is already sliced")),
            None => {
                let sliced = vocab::sliced_category(category_of(raw))?;
                (!view.known(sliced).is_empty()).then(|| format!("{raw} has already been cut into {sliced}"))
            }
        },
        Verb::Pour => {
            let x = x?;
            empty_of_liquid(view, &x).then(|| format!("{x} is not filled with liquid, so there is nothing to pour"))
        }
        Verb::FillWithWater => {
            let x = x?;
            view.has(&x, Prop::Water).then(|| format!("{x} is already filled with water"))
        }
        Verb::Clean => {
            let x = x?;
            view.has(&x, Prop::Clean).then(|| format!("{x} is already clean"))
        }
        Verb::Empty => {
            let x = x?;
            let liquid = view.has(&x, Prop::Water) || view.has(&x, Prop::Coffee);
            (view.children(&x).is_empty() && !liquid).then(|| format!("{x} is already empty"))
        }
        Verb::PutAway => {
            let x = x?;
            (held.as_deref() != Some(x.as_str())).then(|| format!("{x} is not in the agent's hand"))
        }
    }
}

pub(super) fn importance(task: Option<&TaskSpec>, sg: &Subgoal, view: &SceneView) -> (bool, String) {
    let task = task.map(ToString::to_string).unwrap_or_else(|| "the task".to_string());
    match postcondition_holds(sg, view) {
        Some(fact) => (false, format!("{fact}, so {sg} is not needed for {task} and the plan can move on.")),
        None => (
            true,
            format!("{sg} has not taken effect yet and {task} depends on it."),
        ),
    }
}

/// Steps that put `x` in the agent's hand.
pub(super) fn take_in_hand(held: Option<&str>, x: &str) -> Vec<Subgoal> {
    match held {
        Some(h) if h == x => Vec::new(),
        Some(h) => vec![Subgoal::one(Verb::PutAway, h), Subgoal::one(Verb::PickUp, x)],
        None => vec![Subgoal::one(Verb::PickUp, x)],
    }
}

fn full(view: &SceneView, receptacle: &str, except: &str) -> bool {
    let kids = view.children(receptacle).into_iter().filter(|k| k != except).count();
    kids >= vocab::default_capacity(category_of(receptacle))
}

fn sink_needs_emptying(view: &SceneView, x: &str) -> Option<Subgoal> {
    let sink = view.known("Sink").into_iter().chain(view.known("SinkBasin")).next()?;
    full(view, &sink, x).then(|| Subgoal::one(Verb::Empty, sink))
}

/// Missing prerequisite steps for a failing subgoal; empty when none apply.
pub(super) fn preconditions(sg: &Subgoal, view: &SceneView) -> Vec<Subgoal> {
    let x = resolve_or_raw(view, sg.object());
    let cat = category_of(&x).to_string();
    let aff = default_affordances(&cat);
    let held = view.held();
    let held = held.as_deref();
    let mut out = Vec::new();
    match sg.verb {
        Verb::PickUp => {
            if !aff.pickupable {
                return out;
            }
            if let Some(h) = held.filter(|h| *h != x) {
                out.push(Subgoal::one(Verb::PutAway, h));
            }
            if let Some(p) = view.parent(&x).filter(|p| view.prop(p, Prop::Open) == Some(false)) {
                out.push(Subgoal::one(Verb::Open, p));
            }
        }
        Verb::Place => {
            out.extend(take_in_hand(held, &x));
            let y = resolve_or_raw(view, sg.receptacle().unwrap_or_default());
            if view.contains_id(&y) && full(view, &y, &x) {
                out.push(Subgoal::one(Verb::Empty, y.clone()));
            }
            if view.prop(&y, Prop::Open) == Some(false) {
                out.push(Subgoal::one(Verb::Open, y));
            }
        }
        Verb::Slice => {
            if !aff.sliceable || held.is_some_and(|h| vocab::is_knife(category_of(h))) {
                return out;
            }
            let knife = view
                .known("Knife")
                .into_iter()
                .chain(view.known("ButterKnife"))
                .next()
                .unwrap_or_else(|| "Knife".to_string());
            if let Some(h) = held {
                out.push(Subgoal::one(Verb::PutAway, h));
            }
            out.push(Subgoal::one(Verb::GoTo, knife.clone()));
            out.push(Subgoal::one(Verb::PickUp, knife));
        }
        Verb::Open => {
            if view.has(&x, Prop::Toggled) {
                out.push(Subgoal::one(Verb::ToggleOff, x));
            }
        }
        Verb::Pour => {
            if !empty_of_liquid(view, &x) {
                out.extend(take_in_hand(held, &x));
            }
        }
        Verb::Clean | Verb::FillWithWater => {
            let done = if sg.verb == Verb::Clean {
                view.has(&x, Prop::Clean)
            } else {
                !aff.fillable || view.has(&x, Prop::Water)
            };
            if done {
                return out;
            }
            out.extend(take_in_hand(held, &x));
            out.extend(sink_needs_emptying(view, &x));
        }
        _ => {}
    }
    out
}

/// Categories that can stand in for `category` when no instance of it works.
pub fn workaround_substitutes(category: &str) -> &'static [&'static str] {
    match category {
        "Chair" => &["Sofa", "ArmChair", "Stool"],
        "Sofa" => &["ArmChair", "Chair"],
        "ArmChair" => &["Sofa", "Chair"],
        "Mug" => &["Cup"],
        "Cup" => &["Mug"],
        "Knife" => &["ButterKnife"],
        "ButterKnife" => &["Knife"],
        "Bowl" => &["Plate"],
        "Plate" => &["Bowl"],
        "Pot" => &["Bowl", "Kettle"],
        "Pan" => &["Pot"],
        "DiningTable" => &["CounterTop", "CoffeeTable", "SideTable"],
        "CounterTop" => &["DiningTable"],
        "SideTable" => &["DiningTable", "Desk"],
        "CoffeeTable" => &["SideTable", "DiningTable"],
        "Desk" => &["DiningTable"],
        "Sink" => &["SinkBasin"],
        "SinkBasin" => &["Sink"],
        "Shelf" => &["ShelvingUnit"],
        "ShelvingUnit" => &["Shelf"],
        "Cabinet" => &["Drawer"],
        "Drawer" => &["Cabinet"],
        "WateringCan" => &["Cup", "Mug", "Bowl"],
        _ => &[],
    }
}

/// Replacement for a failing subgoal: another known instance of the same
/// category, else an instance of a substitute category.
pub(super) fn workaround(sg: &Subgoal, view: &SceneView) -> Vec<Subgoal> {
    let positions: &[usize] = if matches!(sg.verb, Verb::Place | Verb::Pour) { &[1] } else { &[0] };
    let with_arg = |pos: usize, id: String| {
        let mut out = sg.clone();
        out.args[pos] = id;
        vec![out]
    };
    for &pos in positions {
        let failing = &sg.args[pos];
        let taken = resolve(view, failing);
        let alternate = view
            .known(category_of(failing))
            .into_iter()
            .find(|id| id != failing && Some(id) != taken.as_ref());
        if let Some(alt) = alternate {
            return with_arg(pos, alt);
        }
    }
    for &pos in positions {
        let cat = category_of(&sg.args[pos]);
        if let Some(sub) = workaround_substitutes(cat).first() {
            let id = view.known(sub).into_iter().next().unwrap_or_else(|| format!("{sub}_1"));
            return with_arg(pos, id);
        }
    }
    Vec::new()
}
