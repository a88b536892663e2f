//! Deterministic symbolic household environment.
//!
//! The room is a rectangular grid of 0.25 m cells. Objects sit on cells at one
//! of three height bands and may be nested inside receptacles. The agent moves
//! one cell per `Forward`, turns in 90° steps and tilts the camera in 30° steps.

mod spec;
mod step;
mod view;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use crate::vocab::Affordances;
pub use spec::{AffordanceOverrides, AgentSpec, GridSpec, ObjectSpec, WorldSpec, SCHEMA_VERSION};
pub use view::{INTERACTION_RANGE, VIEW_RANGE};

pub type ObjectId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn manhattan(self, other: Cell) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn offset(self, dx: i32, dy: i32) -> Cell {
        Cell::new(self.x + dx, self.y + dy)
    }
}

impl From<[i32; 2]> for Cell {
    fn from(v: [i32; 2]) -> Self {
        Cell::new(v[0], v[1])
    }
}

impl From<Cell> for [i32; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightBand {
    Floor,
    Counter,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectProperties {
    #[serde(default)]
    pub is_toggled: bool,
    #[serde(default)]
    pub is_sliced: bool,
    #[serde(default)]
    pub is_filled_with_water: bool,
    #[serde(default = "default_true")]
    pub is_clean: bool,
    #[serde(default)]
    pub is_open: bool,
    #[serde(default)]
    pub is_cooked: bool,
    #[serde(default)]
    pub filled_with_coffee: bool,
}

fn default_true() -> bool {
    true
}

impl Default for ObjectProperties {
    fn default() -> Self {
        ObjectProperties {
            is_toggled: false,
            is_sliced: false,
            is_filled_with_water: false,
            is_clean: true,
            is_open: false,
            is_cooked: false,
            filled_with_coffee: false,
        }
    }
}

impl ObjectProperties {
    pub fn has_liquid(&self) -> bool {
        self.is_filled_with_water || self.filled_with_coffee
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub category: String,
    pub cell: Cell,
    pub band: HeightBand,
    pub properties: ObjectProperties,
    pub parent: Option<ObjectId>,
    pub children: BTreeSet<ObjectId>,
    pub affordances: Affordances,
    pub capacity: usize,
}

/// Agent heading in degrees, always one of 0, 90, 180, 270. 0 faces +y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Yaw(u16);

impl Yaw {
    pub const NORTH: Yaw = Yaw(0);
    pub const EAST: Yaw = Yaw(90);
    pub const SOUTH: Yaw = Yaw(180);
    pub const WEST: Yaw = Yaw(270);

    pub fn degrees(self) -> u16 {
        self.0
    }

    pub fn right(self) -> Yaw {
        Yaw((self.0 + 90) % 360)
    }

    pub fn left(self) -> Yaw {
        Yaw((self.0 + 270) % 360)
    }

    /// Unit step on the grid.
    pub fn delta(self) -> (i32, i32) {
        match self.0 {
            0 => (0, 1),
            90 => (1, 0),
            180 => (0, -1),
            _ => (-1, 0),
        }
    }

    pub fn toward(from: Cell, to: Cell) -> Option<Yaw> {
        match (to.x - from.x, to.y - from.y) {
            (0, dy) if dy > 0 => Some(Yaw::NORTH),
            (dx, 0) if dx > 0 => Some(Yaw::EAST),
            (0, dy) if dy < 0 => Some(Yaw::SOUTH),
            (dx, 0) if dx < 0 => Some(Yaw::WEST),
            _ => None,
        }
    }
}

impl TryFrom<i32> for Yaw {
    type Error = String;
    fn try_from(v: i32) -> Result<Self, Self::Error> {
        match v {
            0 | 90 | 180 | 270 => Ok(Yaw(v as u16)),
            _ => Err(format!("yaw must be 0, 90, 180 or 270, got {v}")),
        }
    }
}

impl From<Yaw> for i32 {
    fn from(y: Yaw) -> i32 {
        y.0 as i32
    }
}

/// Camera pitch in degrees, positive looks up. One of -60..=60 in 30° steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Pitch(i16);

impl Pitch {
    pub const LEVEL: Pitch = Pitch(0);

    pub fn degrees(self) -> i16 {
        self.0
    }

    pub fn up(self) -> Option<Pitch> {
        (self.0 < 60).then(|| Pitch(self.0 + 30))
    }

    pub fn down(self) -> Option<Pitch> {
        (self.0 > -60).then(|| Pitch(self.0 - 30))
    }
}

impl TryFrom<i32> for Pitch {
    type Error = String;
    fn try_from(v: i32) -> Result<Self, Self::Error> {
        match v {
            -60 | -30 | 0 | 30 | 60 => Ok(Pitch(v as i16)),
            _ => Err(format!("pitch must be one of -60, -30, 0, 30, 60, got {v}")),
        }
    }
}

impl From<Pitch> for i32 {
    fn from(p: Pitch) -> i32 {
        p.0 as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub cell: Cell,
    pub yaw: Yaw,
    pub pitch: Pitch,
    pub held: Option<ObjectId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub width: i32,
    pub height: i32,
    pub blocked: BTreeSet<Cell>,
    /// Cells passable only with an empty hand; carried objects collide there.
    pub narrow: BTreeSet<Cell>,
}

impl Grid {
    pub fn open(width: i32, height: i32) -> Self {
        Grid {
            width,
            height,
            blocked: BTreeSet::new(),
            narrow: BTreeSet::new(),
        }
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn walkable(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.blocked.contains(&c)
    }

    pub fn center(&self) -> Cell {
        Cell::new(self.width / 2, self.height / 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Forward,
    Backward,
    RotateLeft,
    RotateRight,
    LookUp,
    LookDown,
    StrafeLeft,
    StrafeRight,
    Pickup,
    Place,
    Open,
    Close,
    ToggleOn,
    ToggleOff,
    Slice,
    Pour,
}

impl ActionKind {
    pub fn is_interactive(self) -> bool {
        matches!(
            self,
            ActionKind::Pickup
                | ActionKind::Place
                | ActionKind::Open
                | ActionKind::Close
                | ActionKind::ToggleOn
                | ActionKind::ToggleOff
                | ActionKind::Slice
                | ActionKind::Pour
        )
    }

    pub const ALL: [ActionKind; 16] = [
        ActionKind::Forward,
        ActionKind::Backward,
        ActionKind::RotateLeft,
        ActionKind::RotateRight,
        ActionKind::LookUp,
        ActionKind::LookDown,
        ActionKind::StrafeLeft,
        ActionKind::StrafeRight,
        ActionKind::Pickup,
        ActionKind::Place,
        ActionKind::Open,
        ActionKind::Close,
        ActionKind::ToggleOn,
        ActionKind::ToggleOff,
        ActionKind::Slice,
        ActionKind::Pour,
    ];
}

/// A single simulator action. Navigational kinds carry no target, interactive
/// kinds exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LowLevelAction {
    kind: ActionKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    target: Option<ObjectId>,
}

impl LowLevelAction {
    pub fn nav(kind: ActionKind) -> Self {
        assert!(!kind.is_interactive(), "{kind:?} needs a target");
        LowLevelAction { kind, target: None }
    }

    pub fn interact(kind: ActionKind, target: impl Into<ObjectId>) -> Self {
        assert!(kind.is_interactive(), "{kind:?} takes no target");
        LowLevelAction {
            kind,
            target: Some(target.into()),
        }
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn target(&self) -> Option<&str> {
        self.target.as_deref()
    }
}

impl fmt::Display for LowLevelAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target {
            Some(t) => write!(f, "{:?}({t})", self.kind),
            None => write!(f, "{:?}()", self.kind),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    ObjectNotFound,
    NotInRange,
    HoldingOtherObject,
    HandEmpty,
    NoKnife,
    ReceptacleFull,
    ReceptacleClosed,
    AlreadyOpen,
    NotApplicable,
    /// Movement into a wall, furniture or a cell the carried object cannot pass.
    Blocked,
    /// Opening an appliance that is still running.
    ApplianceOn,
    NoPath,
    NavigationFailed,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::ObjectNotFound => "object_not_found",
            FailureReason::NotInRange => "not_in_range",
            FailureReason::HoldingOtherObject => "holding_other_object",
            FailureReason::HandEmpty => "hand_empty",
            FailureReason::NoKnife => "no_knife",
            FailureReason::ReceptacleFull => "receptacle_full",
            FailureReason::ReceptacleClosed => "receptacle_closed",
            FailureReason::AlreadyOpen => "already_open",
            FailureReason::NotApplicable => "not_applicable",
            FailureReason::Blocked => "blocked",
            FailureReason::ApplianceOn => "appliance_on",
            FailureReason::NoPath => "no_path",
            FailureReason::NavigationFailed => "navigation_failed",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum ActionOutcome {
    Success,
    Failure(FailureReason),
}

impl ActionOutcome {
    pub fn is_success(self) -> bool {
        matches!(self, ActionOutcome::Success)
    }

    pub fn failure(self) -> Option<FailureReason> {
        match self {
            ActionOutcome::Success => None,
            ActionOutcome::Failure(r) => Some(r),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("invalid world spec at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("containment cycle through `{0}`")]
    ContainmentCycle(ObjectId),
    #[error("malformed world spec: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub objects: BTreeMap<ObjectId, ObjectInstance>,
    pub agent: AgentState,
    pub grid: Grid,
    pub rng_seed: u64,
}

impl WorldState {
    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects.get(id)
    }

    pub fn held(&self) -> Option<&ObjectInstance> {
        self.agent.held.as_deref().and_then(|id| self.objects.get(id))
    }

    pub fn instances_of<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a ObjectInstance> + 'a {
        self.objects.values().filter(move |o| o.category == category)
    }

    /// Parent chain from the immediate parent outward.
    pub fn ancestors(&self, id: &str) -> Vec<&ObjectInstance> {
        let mut out = Vec::new();
        let mut cur = self.objects.get(id).and_then(|o| o.parent.as_deref());
        while let Some(p) = cur {
            match self.objects.get(p) {
                Some(o) => {
                    out.push(o);
                    cur = o.parent.as_deref();
                }
                None => break,
            }
            if out.len() > self.objects.len() {
                break;
            }
        }
        out
    }

    pub fn is_descendant_of(&self, id: &str, ancestor: &str) -> bool {
        self.ancestors(id).iter().any(|a| a.id == ancestor)
    }

    /// Checks every structural invariant. Returns a description of the first
    /// violation found.
    pub fn check_invariants(&self) -> Result<(), String> {
        if !self.grid.walkable(self.agent.cell) {
            return Err(format!("agent on non-walkable cell {}", self.agent.cell));
        }
        for (id, obj) in &self.objects {
            if id != &obj.id {
                return Err(format!("key {id} holds object {}", obj.id));
            }
            if crate::vocab::category_of(id) != obj.category {
                return Err(format!("{id} has category {}", obj.category));
            }
            if let Some(p) = &obj.parent {
                let parent = self
                    .objects
                    .get(p)
                    .ok_or_else(|| format!("{id} has dangling parent {p}"))?;
                if !parent.children.contains(id) {
                    return Err(format!("{p} does not list child {id}"));
                }
            }
            for c in &obj.children {
                let child = self
                    .objects
                    .get(c)
                    .ok_or_else(|| format!("{id} has dangling child {c}"))?;
                if child.parent.as_deref() != Some(id.as_str()) {
                    return Err(format!("{c} listed under {id} but parent is {:?}", child.parent));
                }
            }
            let props = &obj.properties;
            if props.is_open && !obj.affordances.openable {
                return Err(format!("{id} open but not openable"));
            }
            if props.is_toggled && !obj.affordances.toggleable {
                return Err(format!("{id} toggled but not toggleable"));
            }
            if props.is_sliced && !obj.affordances.sliceable {
                return Err(format!("{id} sliced but not sliceable"));
            }
            if props.is_filled_with_water && props.filled_with_coffee {
                return Err(format!("{id} holds both water and coffee"));
            }
            // acyclic: walking up must terminate within |objects| hops
            let mut hops = 0;
            let mut cur = obj.parent.as_deref();
            while let Some(p) = cur {
                hops += 1;
                if p == id || hops > self.objects.len() {
                    return Err(format!("containment cycle through {id}"));
                }
                cur = self.objects.get(p).and_then(|o| o.parent.as_deref());
            }
        }
        if let Some(h) = &self.agent.held {
            let obj = self
                .objects
                .get(h)
                .ok_or_else(|| format!("agent holds unknown {h}"))?;
            if !obj.affordances.pickupable {
                return Err(format!("agent holds non-pickupable {h}"));
            }
            if obj.parent.is_some() {
                return Err(format!("held {h} still has a parent"));
            }
        }
        Ok(())
    }
}
