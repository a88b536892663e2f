//! Worlds rebuilt from three published scene rows.

use cmfr_core::executor::{Executor, ExecutorConfig};
use cmfr_core::scene::{build_scene, render_scene};
use cmfr_core::subgoal::Subgoal;
use cmfr_core::world::{WorldSpec, WorldState};
use serde_json::{json, Value};

pub fn explored(objects: Value, blocked: Value, held: Option<&str>) -> Executor {
    let spec = json!({
        "schema_version": 1,
        "grid": {"width": 10, "height": 10, "blocked": blocked},
        "objects": objects,
        "agent": {"cell": [5, 5], "held": held}
    });
    let w = WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap();
    let mut ex = Executor::new(w, ExecutorConfig::default());
    ex.explore_initial().unwrap();
    ex
}

pub fn plan(steps: &[&str]) -> Vec<Subgoal> {
    steps.iter().map(|s| s.parse().unwrap()).collect()
}

/// Splits a rendered fact list into facts, sorting the ids inside each
/// `contains` list and then the facts themselves.
pub fn normalize(text: &str) -> Vec<String> {
    let mut facts: Vec<String> = text
        .split("),")
        .map(|f| f.trim().trim_start_matches('(').trim_end_matches([')', ',']).trim().to_string())
        .filter(|f| !f.is_empty())
        .map(|f| match f.split_once(" contains ") {
            Some((head, list)) => {
                let mut ids: Vec<&str> = list.split(", ").flat_map(|p| p.split(" and ")).collect();
                ids.sort();
                format!("{head} contains {}", ids.join(","))
            }
            None => f,
        })
        .collect();
    facts.sort();
    facts
}

pub fn scene_text(ex: &Executor, p: &[Subgoal]) -> String {
    render_scene(&build_scene(&ex.memory, p, ex.world.agent.held.as_deref()))
}

/// Rendered scene and the listed fact row.
pub fn watches_on_side_table() -> (String, &'static str) {
    let ex = explored(
        json!([
            {"id": "SideTable_1", "category": "SideTable", "cell": [5, 7], "capacity": 4},
            {"id": "Watch_1", "category": "Watch", "parent": "SideTable_1"},
            {"id": "Watch_2", "category": "Watch", "parent": "SideTable_1"},
            {"id": "KeyChain_1", "category": "KeyChain", "parent": "SideTable_1"},
            {"id": "Box_1", "category": "Box", "parent": "SideTable_1", "properties": {"is_open": true}},
            {"id": "Sofa_1", "category": "Sofa", "cell": [2, 2]}
        ]),
        json!([[5, 7], [2, 2]]),
        None,
    );
    let p = plan(&["Find(Watch_1)", "Pick_up(Watch_1)", "Place(Watch_1,SideTable_1)"]);
    let expected = "(Watch_1 in SideTable_1), (Watch_2 in SideTable_1), (SideTable_1 contains Watch_1, Watch_2, KeyChain_1 and Box_1), (agent holding nothing)";
    (scene_text(&ex, &p), expected)
}

/// Rendered scene and the listed fact row.
pub fn make_coffee() -> (String, &'static str) {
    let ex = explored(
        json!([
            {"id": "CounterTop_1", "category": "CounterTop", "cell": [5, 7]},
            {"id": "CoffeeMachine_1", "category": "CoffeeMachine", "parent": "CounterTop_1",
             "properties": {"is_toggled": true}},
            {"id": "Sink_1", "category": "Sink", "cell": [3, 6]},
            {"id": "Cup_1", "category": "Cup", "parent": "Sink_1"},
            {"id": "WineBottle_1", "category": "WineBottle", "parent": "Sink_1"},
            {"id": "Fork_1", "category": "Fork", "parent": "Sink_1"},
            {"id": "Spoon_1", "category": "Spoon", "parent": "Sink_1"},
            {"id": "WineBottle_2", "category": "WineBottle", "parent": "Sink_1"},
            {"id": "Mug_1", "category": "Mug", "cell": [5, 5],
             "properties": {"is_clean": false, "is_filled_with_water": true}}
        ]),
        json!([[5, 7], [3, 6]]),
        Some("Mug_1"),
    );
    let p = plan(&[
        "Clean(Mug_1)",
        "Pour(Mug_1,Sink_1)",
        "Place(Mug_1,CoffeeMachine_1)",
        "Toggle_on(CoffeeMachine_1)",
    ]);
    let expected = "(Mug_1 is filled with water), (Mug_1 is dirty), (Sink_1 contains Cup_1, WineBottle_1, Fork_1, Spoon_1 and WineBottle_2), (CoffeeMachine_1 is toggled on), (CoffeeMachine_1 in CounterTop_1), (agent holding Mug_1)";
    (scene_text(&ex, &p), expected)
}

/// Rendered scene and the listed fact row.
pub fn cooked_potato_slices() -> (String, &'static str) {
    // Burners here are switched by knobs, as in the source environment.
    let knob = json!({"toggleable": false});
    let ex = explored(
        json!([
            {"id": "StoveBurner_1", "category": "StoveBurner", "cell": [4, 7], "affordances": knob},
            {"id": "StoveBurner_2", "category": "StoveBurner", "cell": [6, 7], "affordances": knob},
            {"id": "Pan_1", "category": "Pan", "parent": "StoveBurner_1"},
            {"id": "Pan_2", "category": "Pan", "parent": "StoveBurner_2"},
            {"id": "CounterTop_1", "category": "CounterTop", "cell": [3, 5]},
            {"id": "Apple_1", "category": "Apple", "parent": "CounterTop_1"},
            {"id": "SaltShaker_1", "category": "SaltShaker", "parent": "CounterTop_1"},
            {"id": "SoapBottle_1", "category": "SoapBottle", "parent": "CounterTop_1"},
            {"id": "Knife_1", "category": "Knife", "parent": "CounterTop_1"},
            {"id": "Microwave_1", "category": "Microwave", "parent": "CounterTop_1"},
            {"id": "Fridge_1", "category": "Fridge", "cell": [7, 5]},
            {"id": "Potato_1", "category": "Potato", "parent": "Fridge_1"},
            {"id": "DiningTable_1", "category": "DiningTable", "cell": [5, 3]},
            {"id": "Bowl_1", "category": "Bowl", "parent": "DiningTable_1"}
        ]),
        json!([[4, 7], [6, 7], [3, 5], [7, 5], [5, 3]]),
        None,
    );
    let p = plan(&[
        "Find(Knife)",
        "Pick_up(Knife)",
        "Open(Fridge)",
        "Find(Potato)",
        "Slice(Potato)",
        "Put_away(Knife)",
        "Pick_up(PotatoSliced)",
        "Place(PotatoSliced,StoveBurner)",
        "Place(PotatoSliced,Bowl)",
        "Place(Knife,CounterTop)",
    ]);
    // The listed row names "Bow_1" once; it is read as Bowl_1.
    let expected = "(StoveBurner_1 contains Pan_1), (StoveBurner_2 contains Pan_2), (CounterTop_1 contains Apple_1, SaltShaker_1, SoapBottle_1, Knife_1 and Microwave_1), (Fridge_1 is closed), (Knife_1 in CounterTop_1), (Bowl_1 is not filled with water), (Bowl_1 is clean), (Bowl_1 in DiningTable_1), (agent holding nothing)";
    (scene_text(&ex, &p), expected)
}

pub fn all() -> Vec<(&'static str, String, &'static str)> {
    let mut v = Vec::new();
    for (name, f) in [
        ("watches on side table", watches_on_side_table as fn() -> (String, &'static str)),
        ("make coffee", make_coffee),
        ("cooked potato slices", cooked_potato_slices),
    ] {
        let (got, expected) = f();
        v.push((name, got, expected));
    }
    v
}
