#![allow(dead_code)]

pub mod scene_rows;
pub mod stubs;

use std::collections::BTreeSet;

use cmfr_core::world::{ActionKind, LowLevelAction, WorldSpec, WorldState};
use proptest::prelude::*;
use serde_json::json;

/// A cramped kitchen where most objects are within reach of the start cell,
/// so random interactions succeed often enough to exercise every effect.
pub fn dense_kitchen() -> WorldState {
    let spec = json!({
        "schema_version": 1,
        "grid": {"width": 5, "height": 5,
                 "blocked": [[1, 3], [2, 3], [3, 3], [0, 2], [4, 2], [1, 1], [3, 1]],
                 "narrow": [[2, 0]]},
        "objects": [
            {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 3]},
            {"id": "Sink_1", "category": "Sink", "cell": [1, 3]},
            {"id": "Faucet_1", "category": "Faucet", "cell": [0, 2]},
            {"id": "Microwave_1", "category": "Microwave", "cell": [3, 3], "height": "upper"},
            {"id": "Fridge_1", "category": "Fridge", "cell": [4, 2]},
            {"id": "StoveBurner_1", "category": "StoveBurner", "cell": [1, 1]},
            {"id": "Toaster_1", "category": "Toaster", "cell": [3, 1]},
            {"id": "CoffeeMachine_1", "category": "CoffeeMachine", "cell": [2, 3]},
            {"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1", "properties": {"is_clean": false}},
            {"id": "Pot_1", "category": "Pot", "parent": "StoveBurner_1"},
            {"id": "Pan_1", "category": "Pan", "parent": "CounterTop_1"},
            {"id": "Knife_1", "category": "Knife", "parent": "CounterTop_1"},
            {"id": "Bread_1", "category": "Bread", "parent": "CounterTop_1"},
            {"id": "Potato_1", "category": "Potato", "parent": "Fridge_1"},
            {"id": "Apple_1", "category": "Apple", "parent": "Sink_1"},
            {"id": "Plate_1", "category": "Plate", "parent": "Sink_1", "properties": {"is_clean": false}},
            {"id": "Bowl_1", "category": "Bowl", "parent": "Fridge_1"}
        ],
        "agent": {"cell": [2, 2]}
    });
    WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap()
}

/// Target ids for random interactions, including ids that will only exist
/// after slicing and one that never exists.
pub fn target_pool() -> Vec<String> {
    let mut ids: Vec<String> = dense_kitchen().objects.keys().cloned().collect();
    ids.extend(["BreadSliced_1", "BreadSliced_2", "PotatoSliced_2", "AppleSliced_3", "Ghost_1"].map(String::from));
    ids
}

pub fn action_strategy() -> impl Strategy<Value = LowLevelAction> {
    let pool = target_pool();
    (0..ActionKind::ALL.len(), 0..pool.len()).prop_map(move |(k, t)| {
        let kind = ActionKind::ALL[k];
        if kind.is_interactive() {
            LowLevelAction::interact(kind, pool[t].clone())
        } else {
            LowLevelAction::nav(kind)
        }
    })
}

pub fn ids(w: &WorldState) -> BTreeSet<String> {
    w.objects.keys().cloned().collect()
}

/// Runs `actions` and checks containment consistency, failure purity and
/// conservation after every step.
pub fn check_sequence(actions: &[LowLevelAction]) -> Result<Vec<bool>, String> {
    let mut w = dense_kitchen();
    let mut outcomes = Vec::with_capacity(actions.len());
    for (i, a) in actions.iter().enumerate() {
        let before = w.clone();
        let out = w.step(a);
        w.check_invariants().map_err(|e| format!("step {i} {a}: {e}"))?;
        if !out.is_success() {
            if w != before {
                return Err(format!("step {i} {a}: failed step mutated the world"));
            }
        } else {
            let (old, new) = (ids(&before), ids(&w));
            let gone: Vec<_> = old.difference(&new).cloned().collect();
            let born: Vec<_> = new.difference(&old).cloned().collect();
            if a.kind() == ActionKind::Slice {
                let t = a.target().unwrap();
                if gone != [t.to_string()] || born.len() != 3 {
                    return Err(format!("step {i} {a}: slice changed {gone:?} -> {born:?}"));
                }
            } else if !gone.is_empty() || !born.is_empty() {
                return Err(format!("step {i} {a}: ids changed {gone:?} -> {born:?}"));
            }
        }
        outcomes.push(out.is_success());
    }
    Ok(outcomes)
}

/// Episodes under `scenarios/<sub>` at the workspace root.
pub fn scenarios(sub: &str) -> Vec<cmfr_core::harness::Episode> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(sub);
    cmfr_core::harness::load_dir(&dir).unwrap()
}
