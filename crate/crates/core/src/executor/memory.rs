use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::vocab::Affordances;
use crate::world::{Cell, HeightBand, ObjectId, ObjectProperties, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemoryEntry {
    pub category: String,
    pub properties: ObjectProperties,
    pub affordances: Affordances,
    pub cell: Cell,
    pub band: HeightBand,
    pub parent: Option<ObjectId>,
    /// Only children that could be seen: empty while the object is closed.
    pub children: BTreeSet<ObjectId>,
    pub capacity: usize,
    pub last_seen_step: usize,
}

/// What the agent has observed so far, keyed by object id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ObjectMemory {
    entries: BTreeMap<ObjectId, MemoryEntry>,
}

impl ObjectMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records every currently visible object as seen at `step`.
    pub fn observe(&mut self, world: &WorldState, step: usize) {
        for id in world.visible_objects() {
            let o = &world.objects[&id];
            let closed = o.affordances.openable && !o.properties.is_open;
            let entry = MemoryEntry {
                category: o.category.clone(),
                properties: o.properties,
                affordances: o.affordances,
                cell: o.cell,
                band: o.band,
                parent: o.parent.clone(),
                children: if closed { BTreeSet::new() } else { o.children.clone() },
                capacity: o.capacity,
                last_seen_step: step,
            };
            self.entries.insert(id, entry);
        }
    }

    /// Drops an id that no longer exists, e.g. after it was sliced.
    pub fn forget(&mut self, id: &str) {
        if let Some(e) = self.entries.remove(id) {
            if let Some(p) = e.parent.and_then(|p| self.entries.get_mut(&p)) {
                p.children.remove(id);
            }
        }
    }

    pub fn get(&self, id: &str) -> Option<&MemoryEntry> {
        self.entries.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ObjectId, &MemoryEntry)> {
        self.entries.iter()
    }

    pub fn instances_of<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a ObjectId> + 'a {
        self.entries
            .iter()
            .filter(move |(_, e)| e.category == category)
            .map(|(id, _)| id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::WorldSpec;
    use serde_json::json;

    #[test]
    fn closed_container_children_stay_unknown() {
        let spec = json!({
            "schema_version": 1,
            "grid": {"width": 6, "height": 6, "blocked": [[2, 3]]},
            "objects": [
                {"id": "Fridge_1", "category": "Fridge", "cell": [2, 3]},
                {"id": "Potato_1", "category": "Potato", "parent": "Fridge_1"}
            ],
            "agent": {"cell": [2, 2]}
        });
        let mut w = WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap();
        let mut m = ObjectMemory::new();
        m.observe(&w, 0);
        assert!(m.get("Fridge_1").unwrap().children.is_empty());
        assert!(!m.contains("Potato_1"));
        w.step(&crate::world::LowLevelAction::interact(crate::world::ActionKind::Open, "Fridge_1"));
        m.observe(&w, 1);
        assert!(m.get("Fridge_1").unwrap().children.contains("Potato_1"));
        assert_eq!(m.get("Potato_1").unwrap().last_seen_step, 1);
        m.forget("Potato_1");
        assert!(m.get("Fridge_1").unwrap().children.is_empty());
    }
}
