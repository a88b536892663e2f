use cmfr_core::task::{evaluate_goals, goal_conditions_for, TaskKind, TaskSpec};
use cmfr_core::world::{ActionKind, LowLevelAction, WorldSpec, WorldState};
use proptest::prelude::*;
use serde_json::{json, Value};

fn load(objects: Value) -> WorldState {
    let spec = json!({
        "schema_version": 1,
        "grid": {"width": 5, "height": 5, "blocked": [[1, 3], [2, 3], [3, 3], [2, 4]]},
        "objects": objects,
        "agent": {"cell": [2, 2]}
    });
    WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap()
}

fn task(s: &str) -> TaskSpec {
    s.parse().unwrap()
}

#[test]
fn coffee_has_two_conditions() {
    let w = load(json!([
        {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 3]},
        {"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1"}
    ]));
    let t = task("Make coffee");
    assert_eq!(goal_conditions_for(&t, &w).len(), 2);
    assert_eq!(evaluate_goals(&t, &w), (1, 2));
}

#[test]
fn clean_all_expands_over_instances() {
    let w = load(json!([
        {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 3]},
        {"id": "Plate_1", "category": "Plate", "parent": "CounterTop_1", "properties": {"is_clean": false}},
        {"id": "Plate_2", "category": "Plate", "parent": "CounterTop_1"},
        {"id": "Plate_3", "category": "Plate", "parent": "CounterTop_1", "properties": {"is_clean": false}}
    ]));
    let t = task("Clean all Plate");
    let conds = goal_conditions_for(&t, &w);
    assert_eq!(conds.len(), 3);
    let flags: Vec<bool> = conds.iter().map(|c| c.check(&w)).collect();
    assert_eq!(flags, [false, true, false]);
    assert_eq!(evaluate_goals(&t, &w), (1, 3));
}

#[test]
fn watches_on_side_table() {
    let w = load(json!([
        {"id": "SideTable_1", "category": "SideTable", "cell": [2, 3]},
        {"id": "Watch_1", "category": "Watch", "parent": "SideTable_1"},
        {"id": "Watch_2", "category": "Watch", "parent": "SideTable_1"}
    ]));
    assert_eq!(evaluate_goals(&task("Put all Watch on any SideTable"), &w), (2, 2));
}

#[test]
fn in_one_requires_a_shared_receptacle() {
    let w = load(json!([
        {"id": "Box_1", "category": "Box", "cell": [1, 3]},
        {"id": "Box_2", "category": "Box", "cell": [3, 3]},
        {"id": "Pen_1", "category": "Pen", "parent": "Box_1"},
        {"id": "Pen_2", "category": "Pen", "parent": "Box_2"}
    ]));
    assert_eq!(evaluate_goals(&task("Put all Pen in one Box"), &w), (1, 2));
    assert_eq!(evaluate_goals(&task("Put all Pen on any Box"), &w), (2, 2));
}

#[test]
fn every_task_has_conditions() {
    let w = load(json!([
        {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 3]},
        {"id": "Plate_1", "category": "Plate", "parent": "CounterTop_1"}
    ]));
    for kind in TaskKind::ALL {
        let mut t = TaskSpec::simple(kind);
        if kind.needs_object() {
            t = task(&match kind {
                TaskKind::CleanAll => "Clean all Plate".to_string(),
                TaskKind::PutAllOnAny => "Put all Plate on any CounterTop".into(),
                TaskKind::PutAllInOne => "Put all Plate in one CounterTop".into(),
                TaskKind::NSlicesIn => "2 slices of Tomato in Plate".into(),
                _ => "1 cooked Potato slices in Plate".into(),
            });
        }
        let (s, total) = evaluate_goals(&t, &w);
        assert!(total > 0 && s <= total, "{t}");
    }
}

/// High-level moves for the boiling oracle. Each expands to a fixed
/// low-level script.
#[derive(Debug, Clone, Copy)]
enum Move {
    FillPot,
    PotatoToPot,
    PotatoToCounter,
    BurnerOn,
    BurnerOff,
}

const MOVES: [Move; 5] = [Move::FillPot, Move::PotatoToPot, Move::PotatoToCounter, Move::BurnerOn, Move::BurnerOff];

fn kitchen() -> WorldState {
    load(json!([
        {"id": "StoveBurner_1", "category": "StoveBurner", "cell": [2, 3]},
        {"id": "Sink_1", "category": "Sink", "cell": [1, 3]},
        {"id": "Faucet_1", "category": "Faucet", "cell": [3, 3]},
        {"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 4]},
        {"id": "Pot_1", "category": "Pot", "parent": "StoveBurner_1"},
        {"id": "Potato_1", "category": "Potato", "parent": "CounterTop_1"}
    ]))
}

fn play(w: &mut WorldState, m: Move) {
    use ActionKind::*;
    let script: &[(ActionKind, &str)] = match m {
        Move::FillPot => &[
            (Pickup, "Pot_1"),
            (Place, "Sink_1"),
            (ToggleOn, "Faucet_1"),
            (ToggleOff, "Faucet_1"),
            (Pickup, "Pot_1"),
            (Place, "StoveBurner_1"),
        ],
        Move::PotatoToPot => &[(Pickup, "Potato_1"), (Place, "Pot_1")],
        Move::PotatoToCounter => &[(Pickup, "Potato_1"), (Place, "CounterTop_1")],
        Move::BurnerOn => &[(ToggleOn, "StoveBurner_1")],
        Move::BurnerOff => &[(ToggleOff, "StoveBurner_1")],
    };
    for (k, t) in script {
        w.step(&LowLevelAction::interact(*k, *t));
    }
}

/// Abstract boiling model: the potato cooks only when it sits in a
/// water-filled pot on a lit burner, and counts as boiled only while it is
/// still in that pot.
fn oracle(moves: &[Move]) -> bool {
    let (mut water, mut in_pot, mut on, mut cooked) = (false, false, false, false);
    for m in moves {
        match m {
            Move::FillPot => water = true,
            Move::PotatoToPot => in_pot = true,
            Move::PotatoToCounter => in_pot = false,
            Move::BurnerOn => on = true,
            Move::BurnerOff => on = false,
        }
        cooked |= water && in_pot && on;
    }
    cooked && in_pot && water
}

fn sequences(max_len: usize) -> Vec<Vec<Move>> {
    let mut all = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for m in MOVES {
                let mut t: Vec<Move> = s.clone();
                t.push(m);
                next.push(t);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

#[test]
fn boil_potato_accepts_exactly_boiling_trajectories() {
    let t = TaskSpec::simple(TaskKind::BoilPotato);
    let mut accepted = 0;
    let seqs = sequences(5);
    assert_eq!(seqs.len(), 3906);
    for seq in &seqs {
        let mut w = kitchen();
        for m in seq {
            play(&mut w, *m);
        }
        w.check_invariants().unwrap();
        let (s, total) = evaluate_goals(&t, &w);
        assert_eq!(total, 1);
        assert_eq!(s == 1, oracle(seq), "{seq:?}");
        accepted += s;
    }
    assert!(accepted > 0);
}

proptest! {
    #[test]
    fn unrelated_objects_leave_fixed_task_totals(extra in 0usize..4, kind in 0usize..TaskKind::ALL.len()) {
        let kind = TaskKind::ALL[kind];
        prop_assume!(!kind.needs_object());
        let t = TaskSpec::simple(kind);
        let base = kitchen();
        let mut more = vec![
            json!({"id": "StoveBurner_1", "category": "StoveBurner", "cell": [2, 3]}),
            json!({"id": "Sink_1", "category": "Sink", "cell": [1, 3]}),
            json!({"id": "Faucet_1", "category": "Faucet", "cell": [3, 3]}),
            json!({"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 4]}),
            json!({"id": "Pot_1", "category": "Pot", "parent": "StoveBurner_1"}),
            json!({"id": "Potato_1", "category": "Potato", "parent": "CounterTop_1"}),
        ];
        for i in 0..extra {
            more.push(json!({"id": format!("Pen_{}", i + 1), "category": "Pen", "parent": "CounterTop_1"}));
        }
        let bigger = load(Value::Array(more));
        prop_assert_eq!(evaluate_goals(&t, &base).1, evaluate_goals(&t, &bigger).1);
        let again = evaluate_goals(&t, &bigger);
        prop_assert_eq!(again, evaluate_goals(&t, &bigger));
    }
}
