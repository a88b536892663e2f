//! Scripted post-execution reflection: compares the task's goal conditions
//! with the scene and writes the steps that would close each gap.

use std::collections::{BTreeMap, BTreeSet};

use super::stages::take_in_hand;
use crate::scene::SceneView;
use crate::subgoal::{Subgoal, Verb};
use crate::task::{goal_groups, GoalGroup, Prop, StateView, TaskSpec};
use crate::vocab::{self, category_of};

const WATER_VESSELS: [&str; 7] = ["WateringCan", "Cup", "Mug", "Bowl", "Pot", "Kettle", "Bottle"];
const BOIL_VESSELS: [&str; 3] = ["Pot", "Bowl", "Kettle"];

/// Emits steps while tracking what they will change, so later steps can
/// build on earlier ones without re-reading the scene.
struct Composer<'a> {
    view: &'a SceneView,
    held: Option<String>,
    parent: BTreeMap<String, String>,
    done: BTreeSet<(String, Prop)>,
    fresh: BTreeMap<String, usize>,
    out: Vec<Subgoal>,
}

impl<'a> Composer<'a> {
    fn new(view: &'a SceneView) -> Self {
        Composer {
            view,
            held: view.held(),
            parent: BTreeMap::new(),
            done: BTreeSet::new(),
            fresh: BTreeMap::new(),
            out: Vec::new(),
        }
    }

    fn emit(&mut self, verb: Verb, arg: &str) {
        self.out.push(Subgoal::one(verb, arg));
    }

    fn has(&self, id: &str, p: Prop) -> bool {
        self.done.contains(&(id.to_string(), p)) || self.view.has(id, p)
    }

    fn parent_of(&self, id: &str) -> Option<String> {
        self.parent.get(id).cloned().or_else(|| self.view.parent(id))
    }

    fn within(&self, id: &str, ancestor: &str) -> bool {
        let mut cur = self.parent_of(id);
        let mut hops = 0;
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            hops += 1;
            if hops > 16 {
                break;
            }
            cur = self.parent_of(&p);
        }
        false
    }

    /// First known instance of `category`, else the bare category.
    fn inst(&self, category: &str) -> String {
        self.view.known(category).into_iter().next().unwrap_or_else(|| category.to_string())
    }

    fn hold(&mut self, x: &str) {
        self.out.extend(take_in_hand(self.held.as_deref(), x));
        self.held = Some(x.to_string());
    }

    fn put(&mut self, x: &str, receptacle: &str) {
        self.hold(x);
        self.out.push(Subgoal::two(Verb::Place, x, receptacle));
        self.held = None;
        self.parent.insert(x.to_string(), receptacle.to_string());
    }

    fn release(&mut self) {
        if let Some(h) = self.held.take() {
            self.emit(Verb::PutAway, &h);
        }
    }

    fn clean(&mut self, x: &str) {
        if self.has(x, Prop::Clean) {
            return;
        }
        self.hold(x);
        self.emit(Verb::Clean, x);
        self.done.insert((x.to_string(), Prop::Clean));
        self.done.insert((x.to_string(), Prop::Water));
    }

    /// Cleans a receptacle and sets it down again.
    fn clean_in_place(&mut self, x: &str) {
        if !self.has(x, Prop::Clean) {
            self.clean(x);
            self.release();
        }
    }

    fn restart(&mut self, appliance: &str) {
        if self.view.has(appliance, Prop::Toggled) {
            self.emit(Verb::ToggleOff, appliance);
        }
        self.emit(Verb::ToggleOn, appliance);
    }

    fn cook(&mut self, x: &str) {
        if self.has(x, Prop::Cooked) {
            return;
        }
        if category_of(x) == "BreadSliced" {
            let toaster = self.inst("Toaster");
            self.put(x, &toaster);
            self.restart(&toaster);
            self.emit(Verb::ToggleOff, &toaster);
        } else {
            let mw = self.inst("Microwave");
            if !self.view.has(&mw, Prop::Open) {
                self.emit(Verb::Open, &mw);
            }
            self.put(x, &mw);
            self.emit(Verb::Close, &mw);
            self.restart(&mw);
            self.emit(Verb::ToggleOff, &mw);
            self.emit(Verb::Open, &mw);
        }
        self.done.insert((x.to_string(), Prop::Cooked));
    }

    /// Cuts a whole object and returns the ids the pieces are expected to get.
    fn slice_fresh(&mut self, whole_category: &str) -> Vec<String> {
        let Some(sliced) = vocab::sliced_category(whole_category) else { return Vec::new() };
        let whole = self.inst(whole_category);
        let knife = self
            .view
            .known("Knife")
            .into_iter()
            .chain(self.view.known("ButterKnife"))
            .next()
            .unwrap_or_else(|| "Knife".to_string());
        self.hold(&knife);
        self.emit(Verb::Slice, &whole);
        self.release();
        let seen = self
            .view
            .known(sliced)
            .iter()
            .filter_map(|id| id.rsplit_once('_').and_then(|(_, k)| k.parse::<usize>().ok()))
            .max()
            .unwrap_or(0);
        let base = self.fresh.get(sliced).copied().unwrap_or(seen);
        self.fresh.insert(sliced.to_string(), base + 3);
        (base + 1..=base + 3).map(|k| format!("{sliced}_{k}")).collect()
    }

    /// Puts `need` slices of `sliced` (cooked if asked) directly on `target`.
    fn fill(&mut self, target: &str, sliced: &str, need: usize, cooked: bool, prefer: Option<&str>) {
        let on: Vec<String> = self
            .view
            .known(sliced)
            .into_iter()
            .filter(|s| self.parent_of(s).as_deref() == Some(target) && (!cooked || self.has(s, Prop::Cooked)))
            .collect();
        let mut missing = need.saturating_sub(on.len());
        if missing == 0 {
            return;
        }
        let mut pool: Vec<String> = self
            .view
            .known(sliced)
            .into_iter()
            .filter(|s| !on.contains(s) && self.parent_of(s).as_deref() != Some(target))
            .collect();
        pool.sort_by_key(|s| (Some(s.as_str()) != prefer, cooked && !self.has(s, Prop::Cooked)));
        if pool.len() < missing {
            if let Some(whole) = vocab::whole_category(sliced) {
                pool.extend(self.slice_fresh(whole));
            }
        }
        for s in pool {
            if missing == 0 {
                break;
            }
            if cooked {
                self.cook(&s);
            }
            self.put(&s, target);
            missing -= 1;
        }
    }

    fn group(&mut self, g: &GoalGroup) {
        let grounding = g.ground(self.view);
        if grounding.satisfied.iter().all(|s| *s) {
            return;
        }
        let bound = |role: &str| grounding.binding(role).map(str::to_string);
        match g {
            GoalGroup::WaterPlant => {
                let plant = bound("plant").unwrap_or_else(|| self.inst("HousePlant"));
                let vessel = self
                    .held
                    .clone()
                    .filter(|h| WATER_VESSELS.contains(&category_of(h)))
                    .or_else(|| WATER_VESSELS.iter().find_map(|c| self.view.known(c).into_iter().next()))
                    .unwrap_or_else(|| "WateringCan".to_string());
                self.hold(&vessel);
                if !self.has(&vessel, Prop::Water) {
                    self.emit(Verb::FillWithWater, &vessel);
                }
                self.out.push(Subgoal::two(Verb::Pour, &vessel, &plant));
            }
            GoalGroup::BoilPotato => {
                let potato = bound("potato").unwrap_or_else(|| self.inst("Potato"));
                let pot = self
                    .view
                    .ancestors(&potato)
                    .into_iter()
                    .find(|a| BOIL_VESSELS.contains(&category_of(a)))
                    .unwrap_or_else(|| self.inst("Pot"));
                let burner = self
                    .parent_of(&pot)
                    .filter(|p| category_of(p) == "StoveBurner")
                    .unwrap_or_else(|| self.inst("StoveBurner"));
                if !self.has(&pot, Prop::Water) {
                    self.hold(&pot);
                    self.emit(Verb::FillWithWater, &pot);
                    self.done.insert((pot.clone(), Prop::Water));
                }
                if self.parent_of(&pot).as_deref() != Some(burner.as_str()) {
                    self.put(&pot, &burner);
                }
                if !self.within(&potato, &pot) {
                    self.put(&potato, &pot);
                }
                if !self.has(&potato, Prop::Cooked) {
                    self.restart(&burner);
                }
            }
            GoalGroup::Coffee => {
                let mug = bound("mug").unwrap_or_else(|| self.inst("Mug"));
                let machine = self.inst("CoffeeMachine");
                self.clean(&mug);
                if !self.view.has(&mug, Prop::Coffee) {
                    if self.parent_of(&mug).as_deref() != Some(machine.as_str()) {
                        let occupied = self.view.children(&machine).iter().any(|c| *c != mug);
                        if occupied {
                            self.emit(Verb::Empty, &machine);
                        }
                        self.put(&mug, &machine);
                    }
                    self.restart(&machine);
                }
            }
            GoalGroup::Toast => {
                let plate = bound("plate").unwrap_or_else(|| self.inst("Plate"));
                self.clean_in_place(&plate);
                let toast = bound("toast");
                self.fill(&plate, "BreadSliced", 1, true, toast.as_deref());
            }
            GoalGroup::Clean { id } => {
                self.clean(id);
            }
            GoalGroup::OnAny { id, receptacle } => {
                let r = self.inst(receptacle);
                self.put(id, &r);
            }
            GoalGroup::InOne { ids, receptacle } => {
                let r = bound("receptacle").unwrap_or_else(|| self.inst(receptacle));
                if self.view.prop(&r, Prop::Open) == Some(false) {
                    self.emit(Verb::Open, &r);
                }
                for id in ids {
                    if self.parent_of(id).as_deref() != Some(r.as_str()) {
                        self.put(id, &r);
                    }
                }
            }
            GoalGroup::Slices { n, object, receptacle, cooked } => {
                let r = bound("receptacle").unwrap_or_else(|| self.inst(receptacle));
                if vocab::default_affordances(receptacle).dirtyable {
                    self.clean_in_place(&r);
                }
                let sliced = vocab::sliced_category(object).unwrap_or(object.as_str());
                self.fill(&r, sliced, *n as usize, *cooked, None);
            }
            GoalGroup::Sandwich => {
                let plate = bound("plate").unwrap_or_else(|| self.inst("Plate"));
                self.clean_in_place(&plate);
                self.fill(&plate, "BreadSliced", 2, true, None);
                self.fill(&plate, "LettuceSliced", 1, false, None);
            }
            GoalGroup::Salad => {
                let plate = bound("plate").unwrap_or_else(|| self.inst("Plate"));
                self.clean_in_place(&plate);
                self.fill(&plate, "LettuceSliced", 1, false, None);
                self.fill(&plate, "TomatoSliced", 1, false, None);
                self.fill(&plate, "PotatoSliced", 1, true, None);
            }
        }
    }
}

/// Steps that would satisfy every goal condition the scene shows unmet.
pub(super) fn corrective_steps(task: &TaskSpec, view: &SceneView) -> Vec<Subgoal> {
    let mut c = Composer::new(view);
    for g in goal_groups(task, view) {
        c.group(&g);
    }
    c.out
}
