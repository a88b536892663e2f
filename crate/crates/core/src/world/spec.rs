use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    AgentState, Cell, Grid, HeightBand, ObjectInstance, ObjectProperties, Pitch, WorldError,
    WorldState, Yaw,
};
use crate::vocab::{self, Affordances};

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk description of a room. See `WorldState::load` for validation rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub objects: Vec<ObjectSpec>,
    pub agent: AgentSpec,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: i32,
    pub height: i32,
    #[serde(default)]
    pub blocked: Vec<Cell>,
    #[serde(default)]
    pub narrow: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    pub category: String,
    /// Required for top-level objects; contained objects inherit their parent's.
    #[serde(default)]
    pub cell: Option<Cell>,
    #[serde(default)]
    pub height: Option<HeightBand>,
    #[serde(default)]
    pub properties: ObjectProperties,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub capacity: Option<usize>,
    #[serde(default)]
    pub affordances: AffordanceOverrides,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffordanceOverrides {
    pub pickupable: Option<bool>,
    pub receptacle: Option<bool>,
    pub openable: Option<bool>,
    pub toggleable: Option<bool>,
    pub sliceable: Option<bool>,
    pub fillable: Option<bool>,
    pub cookable: Option<bool>,
    pub dirtyable: Option<bool>,
}

impl AffordanceOverrides {
    fn apply(&self, mut a: Affordances) -> Affordances {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { a.$f = v; } )* };
        }
        take!(pickupable, receptacle, openable, toggleable, sliceable, fillable, cookable, dirtyable);
        a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub cell: Cell,
    #[serde(default = "default_yaw")]
    pub yaw: Yaw,
    #[serde(default = "default_pitch")]
    pub pitch: Pitch,
    #[serde(default)]
    pub held: Option<String>,
}

fn default_yaw() -> Yaw {
    Yaw::NORTH
}

fn default_pitch() -> Pitch {
    Pitch::LEVEL
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> WorldError {
    WorldError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

impl WorldSpec {
    pub fn from_json(text: &str) -> Result<WorldSpec, WorldError> {
        serde_json::from_str(text).map_err(|e| WorldError::Parse(e.to_string()))
    }

    pub fn from_value(value: serde_json::Value) -> Result<WorldSpec, WorldError> {
        serde_json::from_value(value).map_err(|e| WorldError::Parse(e.to_string()))
    }
}

impl WorldState {
    pub fn from_json(text: &str) -> Result<WorldState, WorldError> {
        WorldState::load(&WorldSpec::from_json(text)?)
    }

    /// Builds a validated world from a spec. Loading is deterministic.
    pub fn load(spec: &WorldSpec) -> Result<WorldState, WorldError> {
        if spec.schema_version != SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", spec.schema_version),
            ));
        }
        let g = &spec.grid;
        if g.width <= 0 || g.height <= 0 {
            return Err(schema("grid", "width and height must be positive"));
        }
        let mut grid = Grid::open(g.width, g.height);
        for (i, c) in g.blocked.iter().enumerate() {
            if !grid.in_bounds(*c) {
                return Err(schema(format!("grid.blocked[{i}]"), format!("{c} out of bounds")));
            }
            grid.blocked.insert(*c);
        }
        for (i, c) in g.narrow.iter().enumerate() {
            if !grid.in_bounds(*c) {
                return Err(schema(format!("grid.narrow[{i}]"), format!("{c} out of bounds")));
            }
            grid.narrow.insert(*c);
        }

        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, o) in spec.objects.iter().enumerate() {
            let field = format!("objects[{i}]");
            if !vocab::is_category(&o.category) {
                return Err(schema(
                    format!("{field}.category"),
                    format!("unknown category `{}`", o.category),
                ));
            }
            if !vocab::is_instance_id(&o.id) || vocab::category_of(&o.id) != o.category {
                return Err(schema(
                    format!("{field}.id"),
                    format!("`{}` must be `{}_<k>`", o.id, o.category),
                ));
            }
            if index.insert(o.id.as_str(), i).is_some() {
                return Err(schema(format!("{field}.id"), format!("duplicate id `{}`", o.id)));
            }
        }

        for (i, o) in spec.objects.iter().enumerate() {
            if let Some(p) = &o.parent {
                if !index.contains_key(p.as_str()) {
                    return Err(schema(
                        format!("objects[{i}].parent"),
                        format!("unknown object `{p}`"),
                    ));
                }
                if p == &o.id {
                    return Err(WorldError::ContainmentCycle(o.id.clone()));
                }
            } else if o.cell.is_none() {
                return Err(schema(format!("objects[{i}].cell"), "required for top-level objects"));
            }
        }
        // cycle check
        for o in &spec.objects {
            let mut seen = BTreeSet::new();
            let mut cur = Some(o.id.as_str());
            while let Some(id) = cur {
                if !seen.insert(id) {
                    return Err(WorldError::ContainmentCycle(o.id.clone()));
                }
                cur = spec.objects[index[id]].parent.as_deref();
            }
        }

        let mut objects: BTreeMap<String, ObjectInstance> = BTreeMap::new();
        for (i, o) in spec.objects.iter().enumerate() {
            let field = format!("objects[{i}]");
            let affordances = o.affordances.apply(vocab::default_affordances(&o.category));
            let p = &o.properties;
            if p.is_open && !affordances.openable {
                return Err(schema(format!("{field}.properties.is_open"), "object is not openable"));
            }
            if p.is_toggled && !affordances.toggleable {
                return Err(schema(
                    format!("{field}.properties.is_toggled"),
                    "object is not toggleable",
                ));
            }
            if p.is_sliced && !affordances.sliceable {
                return Err(schema(
                    format!("{field}.properties.is_sliced"),
                    "object is not sliceable",
                ));
            }
            if p.is_filled_with_water && p.filled_with_coffee {
                return Err(schema(
                    format!("{field}.properties"),
                    "water and coffee are mutually exclusive",
                ));
            }
            if let Some(c) = o.cell {
                if !grid.in_bounds(c) {
                    return Err(schema(format!("{field}.cell"), format!("{c} out of bounds")));
                }
            }
            objects.insert(
                o.id.clone(),
                ObjectInstance {
                    id: o.id.clone(),
                    category: o.category.clone(),
                    cell: o.cell.unwrap_or(Cell::new(0, 0)),
                    band: o.height.unwrap_or(HeightBand::Counter),
                    properties: *p,
                    parent: o.parent.clone(),
                    children: BTreeSet::new(),
                    affordances,
                    capacity: o.capacity.unwrap_or_else(|| vocab::default_capacity(&o.category)),
                },
            );
        }

        for (i, o) in spec.objects.iter().enumerate() {
            if let Some(p) = &o.parent {
                let parent = objects.get_mut(p).expect("checked above");
                if !parent.affordances.receptacle {
                    return Err(schema(
                        format!("objects[{i}].parent"),
                        format!("`{p}` is not a receptacle"),
                    ));
                }
                parent.children.insert(o.id.clone());
                if parent.children.len() > parent.capacity {
                    return Err(schema(
                        format!("objects[{i}].parent"),
                        format!("`{p}` holds more than its capacity of {}", parent.capacity),
                    ));
                }
            }
        }

        // contained objects take their position from the outermost container
        let ids: Vec<String> = objects.keys().cloned().collect();
        for id in &ids {
            let mut root = id.clone();
            while let Some(p) = objects[&root].parent.clone() {
                root = p;
            }
            if &root != id {
                let (cell, band) = (objects[&root].cell, objects[&root].band);
                let explicit_band = spec.objects[index[id.as_str()]].height;
                let obj = objects.get_mut(id).unwrap();
                obj.cell = cell;
                obj.band = explicit_band.unwrap_or(band);
            }
        }

        let a = &spec.agent;
        if !grid.walkable(a.cell) {
            return Err(schema("agent.cell", format!("{} is not walkable", a.cell)));
        }
        if let Some(h) = &a.held {
            let obj = objects
                .get_mut(h)
                .ok_or_else(|| schema("agent.held", format!("unknown object `{h}`")))?;
            if !obj.affordances.pickupable {
                return Err(schema("agent.held", format!("`{h}` is not pickupable")));
            }
            if obj.parent.is_some() {
                return Err(schema("agent.held", format!("`{h}` is inside a receptacle")));
            }
            obj.cell = a.cell;
        }

        let mut world = WorldState {
            objects,
            agent: AgentState {
                cell: a.cell,
                yaw: a.yaw,
                pitch: a.pitch,
                held: a.held.clone(),
            },
            grid,
            rng_seed: spec.rng_seed,
        };
        if let Some(h) = world.agent.held.clone() {
            world.move_subtree(&h, a.cell, HeightBand::Counter);
        }
        world
            .check_invariants()
            .map_err(|m| WorldError::Parse(format!("internal invariant: {m}")))?;
        Ok(world)
    }
}
