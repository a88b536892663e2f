//! Turns subgoals into low-level simulator actions.

pub mod memory;
pub mod nav;
pub mod trace;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::subgoal::{Subgoal, Verb};
use crate::vocab;
use crate::world::{
    ActionKind, ActionOutcome, Cell, FailureReason, LowLevelAction, Pitch, WorldState, Yaw,
    INTERACTION_RANGE,
};
use memory::ObjectMemory;
use trace::ExecutionTrace;

/// Adjustments tried, in order, after a failed interaction.
pub const ADJUSTMENTS: [ActionKind; 6] = [
    ActionKind::RotateLeft,
    ActionKind::RotateRight,
    ActionKind::LookUp,
    ActionKind::LookDown,
    ActionKind::Forward,
    ActionKind::Backward,
];

const EXPLORE_CONTEXT: &str = "explore";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCounting {
    /// Every failed low-level action counts against the budget.
    #[default]
    PerAction,
    /// Only subgoals that end in failure count.
    PerSubgoal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorConfig {
    pub max_actions: usize,
    pub max_failures: usize,
    pub failure_counting: FailureCounting,
}

impl Default for ExecutorConfig {
    fn default() -> Self {
        ExecutorConfig {
            max_actions: 1000,
            max_failures: 30,
            failure_counting: FailureCounting::PerAction,
        }
    }
}

/// Why an episode stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Halt {
    ActionBudget,
    FailureBudget,
}

pub type Exec<T> = Result<T, Halt>;
pub type StepResult = Result<(), FailureReason>;

/// Supplies subgoals that should reveal an object missing from memory.
pub trait SearchHook: Send {
    fn steps_for(&mut self, target: &str) -> Vec<Subgoal>;
}

pub struct Executor {
    pub world: WorldState,
    pub memory: ObjectMemory,
    pub trace: ExecutionTrace,
    pub search_invocations: usize,
    cfg: ExecutorConfig,
    context: Option<String>,
    halted: Option<Halt>,
    search: Option<Box<dyn SearchHook>>,
    search_depth: usize,
    searched: BTreeSet<String>,
}

impl Executor {
    pub fn new(world: WorldState, cfg: ExecutorConfig) -> Executor {
        let mut memory = ObjectMemory::new();
        memory.observe(&world, 0);
        Executor {
            world,
            memory,
            trace: ExecutionTrace::default(),
            search_invocations: 0,
            cfg,
            context: None,
            halted: None,
            search: None,
            search_depth: 0,
            searched: BTreeSet::new(),
        }
    }

    pub fn set_search(&mut self, hook: Box<dyn SearchHook>) {
        self.search = Some(hook);
    }

    pub fn halted(&self) -> Option<Halt> {
        self.halted
    }

    pub fn config(&self) -> &ExecutorConfig {
        &self.cfg
    }

    pub fn held(&self) -> Option<&str> {
        self.world.agent.held.as_deref()
    }

    fn count_failure(&mut self) -> Exec<()> {
        self.trace.failed_actions += 1;
        if self.trace.failed_actions >= self.cfg.max_failures {
            self.halted = Some(Halt::FailureBudget);
            return Err(Halt::FailureBudget);
        }
        Ok(())
    }

    fn act(&mut self, action: LowLevelAction) -> Exec<ActionOutcome> {
        if let Some(h) = self.halted {
            return Err(h);
        }
        if self.trace.actions_taken >= self.cfg.max_actions {
            self.halted = Some(Halt::ActionBudget);
            return Err(Halt::ActionBudget);
        }
        let out = self.world.step(&action);
        self.trace.push(&action, out, self.context.as_deref());
        self.memory.observe(&self.world, self.trace.actions_taken);
        if !out.is_success() && self.cfg.failure_counting == FailureCounting::PerAction {
            self.count_failure()?;
        }
        Ok(out)
    }

    fn nav_act(&mut self, kind: ActionKind) -> Exec<ActionOutcome> {
        self.act(LowLevelAction::nav(kind))
    }

    fn face(&mut self, yaw: Yaw) -> Exec<()> {
        for r in nav::rotations(self.world.agent.yaw, yaw) {
            self.nav_act(r)?;
        }
        Ok(())
    }

    fn set_pitch(&mut self, target: Pitch) -> Exec<()> {
        while self.world.agent.pitch != target {
            let kind = if self.world.agent.pitch < target {
                ActionKind::LookUp
            } else {
                ActionKind::LookDown
            };
            self.nav_act(kind)?;
        }
        Ok(())
    }

    /// Walks `path` one orient-then-Forward step at a time. Returns the cell
    /// that could not be entered, if any.
    fn walk(&mut self, path: &[Cell]) -> Exec<Option<Cell>> {
        for next in path {
            let yaw = Yaw::toward(self.world.agent.cell, *next).expect("path cells are adjacent");
            self.face(yaw)?;
            if !self.nav_act(ActionKind::Forward)?.is_success() {
                return Ok(Some(*next));
            }
        }
        Ok(None)
    }

    /// Moves onto any cell in `goals`, renavigating once around a cell that
    /// turned out to be impassable.
    pub fn navigate_to_cells(&mut self, goals: &BTreeSet<Cell>) -> Exec<StepResult> {
        self.set_pitch(Pitch::LEVEL)?;
        let mut avoid = BTreeSet::new();
        let Some(path) = nav::shortest_path(&self.world.grid, &avoid, self.world.agent.cell, goals) else {
            return Ok(Err(FailureReason::NoPath));
        };
        let Some(stuck) = self.walk(&path)? else {
            return Ok(Ok(()));
        };
        log::debug!("renavigating around {stuck}");
        avoid.insert(stuck);
        let Some(path) = nav::shortest_path(&self.world.grid, &avoid, self.world.agent.cell, goals) else {
            return Ok(Err(FailureReason::NavigationFailed));
        };
        Ok(match self.walk(&path)? {
            None => Ok(()),
            Some(_) => Err(FailureReason::NavigationFailed),
        })
    }

    /// Goes next to a remembered object and turns to face it.
    pub fn navigate_to(&mut self, id: &str) -> Exec<StepResult> {
        if self.held() == Some(id) {
            return Ok(Ok(()));
        }
        let Some(cell) = self.memory.get(id).map(|e| e.cell) else {
            return Ok(Err(FailureReason::ObjectNotFound));
        };
        let goals: BTreeSet<Cell> = nav::walkable_neighbors(&self.world.grid, cell).into_iter().collect();
        if goals.is_empty() {
            return Ok(Err(FailureReason::NoPath));
        }
        if let Err(e) = self.navigate_to_cells(&goals)? {
            return Ok(Err(e));
        }
        if let Some(yaw) = Yaw::toward(self.world.agent.cell, cell) {
            self.face(yaw)?;
        }
        Ok(Ok(()))
    }

    /// One interactive action, retried after each positioning adjustment.
    /// On overall failure the heading and camera pitch are restored.
    pub fn interact(&mut self, kind: ActionKind, target: &str) -> Exec<StepResult> {
        let yaw = self.world.agent.yaw;
        let pitch = self.world.agent.pitch;
        let action = LowLevelAction::interact(kind, target);
        let mut out = self.act(action.clone())?;
        for adj in ADJUSTMENTS {
            if out.is_success() {
                break;
            }
            self.nav_act(adj)?;
            out = self.act(action.clone())?;
        }
        match out {
            ActionOutcome::Success => {
                if kind == ActionKind::Slice {
                    self.memory.forget(target);
                }
                Ok(Ok(()))
            }
            ActionOutcome::Failure(reason) => {
                self.face(yaw)?;
                self.set_pitch(pitch)?;
                Ok(Err(reason))
            }
        }
    }

    /// Navigates only if the object is out of reach from here.
    fn approach_and_interact(&mut self, kind: ActionKind, target: &str) -> Exec<StepResult> {
        let near = self
            .memory
            .get(target)
            .is_some_and(|e| e.cell.manhattan(self.world.agent.cell) <= INTERACTION_RANGE);
        if !near {
            if let Err(e) = self.navigate_to(target)? {
                return Ok(Err(e));
            }
        }
        self.interact(kind, target)
    }

    /// Nearest remembered instance of any of `categories` by path length,
    /// ties to the lowest id. The held object is at distance zero.
    fn nearest(&self, categories: &[&str], exclude: &dyn Fn(&str) -> bool) -> Option<String> {
        let dist = nav::distances(&self.world.grid, self.world.agent.cell);
        let mut best: Option<(usize, &String)> = None;
        for (id, e) in self.memory.iter() {
            if !categories.contains(&e.category.as_str()) || exclude(id) {
                continue;
            }
            let d = if self.held() == Some(id.as_str()) {
                0
            } else {
                nav::approach_distance(&dist, &self.world.grid, e.cell).unwrap_or(usize::MAX)
            };
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, id));
            }
        }
        best.map(|(_, id)| id.clone())
    }

    fn resolve_known(&self, reference: &str) -> Option<String> {
        if vocab::is_instance_id(reference) && self.memory.contains(reference) {
            return Some(reference.to_string());
        }
        self.nearest(&[vocab::category_of(reference)], &|_| false)
    }

    /// Memory lookup, falling back to search once per subgoal.
    fn resolve(&mut self, reference: &str) -> Exec<Option<String>> {
        if let Some(id) = self.resolve_known(reference) {
            return Ok(Some(id));
        }
        if self.search_depth >= 2 || !self.searched.insert(reference.to_string()) {
            return Ok(None);
        }
        let Some(mut hook) = self.search.take() else {
            return Ok(None);
        };
        let steps = hook.steps_for(reference);
        self.search = Some(hook);
        self.search_invocations += 1;
        log::debug!("search for {reference}: {} step(s)", steps.len());
        self.search_depth += 1;
        let mut result = Ok(());
        for s in &steps {
            match self.run(s) {
                Ok(Ok(())) => {}
                Ok(Err(_)) => break,
                Err(h) => {
                    result = Err(h);
                    break;
                }
            }
        }
        self.search_depth -= 1;
        result?;
        Ok(self.resolve_known(reference))
    }

    /// Sinks run water through a faucet unless they can be toggled directly.
    fn water_source(&self, sink: &str) -> String {
        let toggleable = self.memory.get(sink).is_some_and(|e| e.affordances.toggleable);
        if toggleable {
            return sink.to_string();
        }
        self.nearest(&["Faucet"], &|_| false).unwrap_or_else(|| sink.to_string())
    }

    fn toggle_target(&self, id: &str) -> String {
        if vocab::is_water_basin(vocab::category_of(id)) {
            self.water_source(id)
        } else {
            id.to_string()
        }
    }

    /// Checks that `reference` is what the agent holds.
    fn require_held(&self, reference: &str) -> Result<String, FailureReason> {
        let held = self.held().ok_or(FailureReason::HandEmpty)?.to_string();
        match self.resolve_known(reference) {
            Some(x) if x == held => Ok(held),
            _ => Err(FailureReason::HoldingOtherObject),
        }
    }

    fn put_away(&mut self, id: &str, exclude: Option<&str>) -> Exec<StepResult> {
        let dist = nav::distances(&self.world.grid, self.world.agent.cell);
        let mut best: Option<(usize, String)> = None;
        for (rid, e) in self.memory.iter() {
            if !vocab::is_surface(&e.category) || Some(rid.as_str()) == exclude || rid == id {
                continue;
            }
            if e.children.len() >= e.capacity {
                continue;
            }
            let Some(d) = nav::approach_distance(&dist, &self.world.grid, e.cell) else {
                continue;
            };
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, rid.clone()));
            }
        }
        let Some((_, surface)) = best else {
            return Ok(Err(FailureReason::ObjectNotFound));
        };
        if let Err(e) = self.navigate_to(&surface)? {
            return Ok(Err(e));
        }
        self.interact(ActionKind::Place, &surface)
    }

    fn wash(&mut self, reference: &str) -> Exec<StepResult> {
        let x = match self.require_held(reference) {
            Ok(x) => x,
            Err(e) => return Ok(Err(e)),
        };
        let Some(sink) = self.nearest(&["Sink", "SinkBasin"], &|_| false) else {
            return Ok(Err(FailureReason::ObjectNotFound));
        };
        if let Err(e) = self.navigate_to(&sink)? {
            return Ok(Err(e));
        }
        if let Err(e) = self.interact(ActionKind::Place, &sink)? {
            return Ok(Err(e));
        }
        let source = self.water_source(&sink);
        let running = self.memory.get(&source).is_some_and(|e| e.properties.is_toggled);
        if !running {
            if let Err(e) = self.approach_and_interact(ActionKind::ToggleOn, &source)? {
                return Ok(Err(e));
            }
        }
        if let Err(e) = self.approach_and_interact(ActionKind::ToggleOff, &source)? {
            return Ok(Err(e));
        }
        self.approach_and_interact(ActionKind::Pickup, &x)
    }

    fn empty(&mut self, reference: &str) -> Exec<StepResult> {
        let Some(x) = self.resolve(reference)? else {
            return Ok(Err(FailureReason::ObjectNotFound));
        };
        let held = self.held().map(str::to_string);
        let liquid = self.memory.get(&x).is_some_and(|e| e.properties.has_liquid());
        if held.as_deref() == Some(x.as_str()) && liquid {
            let Some(sink) = self.nearest(&["Sink", "SinkBasin"], &|_| false) else {
                return Ok(Err(FailureReason::ObjectNotFound));
            };
            if let Err(e) = self.navigate_to(&sink)? {
                return Ok(Err(e));
            }
            return self.interact(ActionKind::Pour, &sink);
        }
        if let Some(h) = &held {
            if let Err(e) = self.put_away(h, Some(&x))? {
                return Ok(Err(e));
            }
        }
        let children: Vec<String> = self
            .memory
            .get(&x)
            .map(|e| e.children.iter().cloned().collect())
            .unwrap_or_default();
        for c in children {
            if let Err(e) = self.approach_and_interact(ActionKind::Pickup, &c)? {
                return Ok(Err(e));
            }
            if let Err(e) = self.put_away(&c, Some(&x))? {
                return Ok(Err(e));
            }
        }
        if let Some(h) = held {
            return self.approach_and_interact(ActionKind::Pickup, &h);
        }
        Ok(Ok(()))
    }

    fn run(&mut self, sg: &Subgoal) -> Exec<StepResult> {
        let obj = sg.object();
        match sg.verb {
            Verb::Find => Ok(match self.resolve(obj)? {
                Some(_) => Ok(()),
                None => Err(FailureReason::ObjectNotFound),
            }),
            Verb::GoTo => match self.resolve(obj)? {
                Some(x) => self.navigate_to(&x),
                None => Ok(Err(FailureReason::ObjectNotFound)),
            },
            Verb::PickUp => {
                let Some(x) = self.resolve(obj)? else {
                    return Ok(Err(FailureReason::ObjectNotFound));
                };
                if self.held() == Some(x.as_str()) {
                    return Ok(Ok(()));
                }
                if let Err(e) = self.navigate_to(&x)? {
                    return Ok(Err(e));
                }
                self.interact(ActionKind::Pickup, &x)
            }
            Verb::Open | Verb::Close | Verb::ToggleOn | Verb::ToggleOff | Verb::Slice => {
                let Some(mut x) = self.resolve(obj)? else {
                    return Ok(Err(FailureReason::ObjectNotFound));
                };
                let kind = match sg.verb {
                    Verb::Open => ActionKind::Open,
                    Verb::Close => ActionKind::Close,
                    Verb::ToggleOn => ActionKind::ToggleOn,
                    Verb::ToggleOff => ActionKind::ToggleOff,
                    _ => ActionKind::Slice,
                };
                if matches!(kind, ActionKind::ToggleOn | ActionKind::ToggleOff) {
                    x = self.toggle_target(&x);
                }
                if let Err(e) = self.navigate_to(&x)? {
                    return Ok(Err(e));
                }
                self.interact(kind, &x)
            }
            Verb::Place | Verb::Pour => {
                let Some(rec) = self.resolve(sg.receptacle().expect("arity checked"))? else {
                    return Ok(Err(FailureReason::ObjectNotFound));
                };
                if self.held().is_some() {
                    if let Err(e) = self.require_held(obj) {
                        return Ok(Err(e));
                    }
                }
                if let Err(e) = self.navigate_to(&rec)? {
                    return Ok(Err(e));
                }
                let kind = if sg.verb == Verb::Place {
                    ActionKind::Place
                } else {
                    ActionKind::Pour
                };
                self.interact(kind, &rec)
            }
            Verb::Clean | Verb::FillWithWater => self.wash(obj),
            Verb::Empty => self.empty(obj),
            Verb::PutAway => match self.require_held(obj) {
                Ok(x) => self.put_away(&x, None),
                Err(e) => Ok(Err(e)),
            },
        }
    }

    /// Executes one subgoal. `Err` means the episode budget ran out.
    pub fn execute_subgoal(&mut self, sg: &Subgoal) -> Exec<StepResult> {
        if let Some(h) = self.halted {
            return Err(h);
        }
        self.context = Some(sg.to_string());
        self.searched.clear();
        let r = self.run(sg)?;
        if r.is_err() && self.cfg.failure_counting == FailureCounting::PerSubgoal {
            self.count_failure()?;
        }
        Ok(r)
    }

    /// Visits the room center and the four quadrant centers, turning a full
    /// circle at each.
    pub fn explore_initial(&mut self) -> Exec<()> {
        self.context = Some(EXPLORE_CONTEXT.to_string());
        for wp in exploration_waypoints(self.world.grid.width, self.world.grid.height) {
            let Some(cell) = nav::nearest_walkable(&self.world.grid, wp) else {
                continue;
            };
            match self.navigate_to_cells(&BTreeSet::from([cell]))? {
                Ok(()) => {
                    for _ in 0..4 {
                        self.nav_act(ActionKind::RotateRight)?;
                    }
                }
                Err(e) => log::warn!("skipping exploration waypoint {wp}: {e}"),
            }
        }
        self.context = None;
        Ok(())
    }
}

/// Room center, then the top-left, top-right, bottom-left and bottom-right
/// quadrant centers. `y` grows toward the top.
pub fn exploration_waypoints(width: i32, height: i32) -> [Cell; 5] {
    [
        Cell::new(width / 2, height / 2),
        Cell::new(width / 4, 3 * height / 4),
        Cell::new(3 * width / 4, 3 * height / 4),
        Cell::new(width / 4, height / 4),
        Cell::new(3 * width / 4, height / 4),
    ]
}
