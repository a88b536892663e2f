mod common;

use common::scene_rows::{self, explored, normalize, plan, scene_text};
use cmfr_core::executor::{Executor, ExecutorConfig};
use cmfr_core::scene::SceneView;
use cmfr_core::task::{Prop, StateView};
use cmfr_core::world::{WorldSpec, WorldState};
use serde_json::json;

#[test]
fn watches_on_side_table_row() {
    let (got, expected) = scene_rows::watches_on_side_table();
    assert_eq!(normalize(&got), normalize(expected), "{got}");
    assert!(got.ends_with("(agent holding nothing)"));
}

#[test]
fn make_coffee_row() {
    let (got, expected) = scene_rows::make_coffee();
    assert_eq!(normalize(&got), normalize(expected), "{got}");
    assert!(got.ends_with("(agent holding Mug_1)"));
}

#[test]
fn cooked_potato_slices_row() {
    let (got, expected) = scene_rows::cooked_potato_slices();
    assert_eq!(normalize(&got), normalize(expected), "{got}");
}

#[test]
fn pruning_drops_unplanned_categories() {
    let ex = explored(
        json!([
            {"id": "CounterTop_1", "category": "CounterTop", "cell": [5, 7]},
            {"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1"},
            {"id": "Fork_1", "category": "Fork", "parent": "CounterTop_1"}
        ]),
        json!([[5, 7]]),
        None,
    );
    let got = scene_text(&ex, &plan(&["Pick_up(Mug_1)"]));
    assert_eq!(got, "(Mug_1 is not filled with water), (Mug_1 is clean), (Mug_1 in CounterTop_1), (agent holding nothing)");
    assert!(!got.contains("Fork_1 is"));
}

#[test]
fn empty_memory_gives_only_holding() {
    let ex = Executor::new(
        WorldState::load(&WorldSpec::from_value(json!({
            "schema_version": 1,
            "grid": {"width": 3, "height": 3, "blocked": []},
            "objects": [],
            "agent": {"cell": [1, 1]}
        })).unwrap())
        .unwrap(),
        ExecutorConfig::default(),
    );
    assert_eq!(scene_text(&ex, &plan(&["Find(Mug)"])), "(agent holding nothing)");
}

#[test]
fn rendered_scene_parses_back() {
    let text = "(Mug_1 is filled with water), (Mug_1 is dirty), (Sink_1 contains Cup_1, WineBottle_1 and Fork_1), (CoffeeMachine_1 in CounterTop_1), (agent holding Mug_1)";
    let v = SceneView::parse(text);
    assert_eq!(v.prop("Mug_1", Prop::Water), Some(true));
    assert_eq!(v.prop("Mug_1", Prop::Clean), Some(false));
    assert_eq!(v.parent("Fork_1").as_deref(), Some("Sink_1"));
    assert_eq!(v.parent("CoffeeMachine_1").as_deref(), Some("CounterTop_1"));
    assert_eq!(v.held().as_deref(), Some("Mug_1"));
    assert_eq!(v.prop("Mug_1", Prop::Cooked), None);
}
