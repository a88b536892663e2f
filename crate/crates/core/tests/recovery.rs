mod common;

use common::stubs::{fixed, Down};
use cmfr_core::executor::{Executor, ExecutorConfig};
use cmfr_core::reasoner::scripted::ScriptedReasoner;
use cmfr_core::recovery::{run_recovery, FailureContext, PlanRunner, RecoveryConfig, Verdict};
use cmfr_core::scene::SceneFact;
use cmfr_core::subgoal::{PlanStep, StepStatus, Subgoal};
use cmfr_core::task::{evaluate_goals, TaskSpec};
use cmfr_core::world::{WorldSpec, WorldState};
use serde_json::{json, Value};

fn sg(s: &str) -> Subgoal {
    s.parse().unwrap()
}

fn plan(steps: &[&str]) -> Vec<Subgoal> {
    steps.iter().map(|s| sg(s)).collect()
}

fn ctx() -> FailureContext {
    FailureContext {
        task: "Make coffee".parse().unwrap(),
        plan: vec![PlanStep {
            subgoal: sg("Clean(Mug_1)"),
            status: StepStatus::Failed,
        }],
        failing_subgoal: sg("Clean(Mug_1)"),
        scene: Vec::<SceneFact>::new(),
        stage1_justification: None,
    }
}

#[test]
fn gating_verdicts() {
    let full = RecoveryConfig::default();
    let d = run_recovery(&mut ctx(), &fixed(false, &[], &[]), &full);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::Skip, vec![1]));

    let d = run_recovery(&mut ctx(), &fixed(true, &["Pick_up(Mug_1)"], &[]), &full);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::RetryAfter(plan(&["Pick_up(Mug_1)"])), vec![1, 2]));

    let d = run_recovery(&mut ctx(), &fixed(true, &[], &["Clean(Cup_1)"]), &full);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::ReplaceWith(plan(&["Clean(Cup_1)"])), vec![1, 2, 3]));

    let d = run_recovery(&mut ctx(), &fixed(true, &[], &[]), &full);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::GiveUp, vec![1, 2, 3]));
}

#[test]
fn justification_flows_to_later_stages() {
    let mut c = ctx();
    run_recovery(&mut c, &fixed(true, &[], &[]), &RecoveryConfig::default());
    assert_eq!(c.stage1_justification.as_deref(), Some("because"));
}

#[test]
fn unreachable_reasoner_degrades_to_give_up() {
    let d = run_recovery(&mut ctx(), &Down, &RecoveryConfig::default());
    assert_eq!(d.verdict, Verdict::GiveUp);
    assert_eq!(d.stages(), vec![1, 2, 3]);
    assert!(d.stage_trace.iter().all(|r| r.error.is_some()));
}

#[test]
fn ablated_stages_pass_through() {
    let r = fixed(false, &["Pick_up(Mug_1)"], &["Clean(Cup_1)"]);
    let no1 = RecoveryConfig {
        stage1: false,
        ..RecoveryConfig::default()
    };
    let d = run_recovery(&mut ctx(), &r, &no1);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::RetryAfter(plan(&["Pick_up(Mug_1)"])), vec![2]));
    let only3 = RecoveryConfig {
        stage1: false,
        stage2: false,
        ..RecoveryConfig::default()
    };
    let d = run_recovery(&mut ctx(), &r, &only3);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::ReplaceWith(plan(&["Clean(Cup_1)"])), vec![3]));
    let none = RecoveryConfig::disabled();
    let d = run_recovery(&mut ctx(), &r, &none);
    assert_eq!((d.verdict.clone(), d.stages()), (Verdict::GiveUp, vec![]));
}

fn kitchen(extra: Vec<Value>) -> Executor {
    let mut objects = vec![
        json!({"id": "CounterTop_1", "category": "CounterTop", "cell": [2, 6]}),
        json!({"id": "Sink_1", "category": "Sink", "cell": [0, 6]}),
        json!({"id": "Faucet_1", "category": "Faucet", "cell": [0, 7]}),
        json!({"id": "CoffeeMachine_1", "category": "CoffeeMachine", "cell": [4, 6]}),
        json!({"id": "Toaster_1", "category": "Toaster", "cell": [6, 6]}),
        json!({"id": "Sofa_1", "category": "Sofa", "cell": [7, 1]}),
    ];
    objects.extend(extra);
    let spec = json!({
        "schema_version": 1,
        "grid": {"width": 8, "height": 8,
                 "blocked": [[2, 6], [0, 6], [0, 7], [4, 6], [6, 6], [7, 1]]},
        "objects": objects,
        "agent": {"cell": [3, 3]}
    });
    let w = WorldState::load(&WorldSpec::from_value(spec).unwrap()).unwrap();
    let mut ex = Executor::new(w, ExecutorConfig::default());
    ex.explore_initial().unwrap();
    ex
}

#[test]
fn redundant_pour_is_skipped() {
    let mut ex = kitchen(vec![json!({"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1"})]);
    let task: TaskSpec = "Make coffee".parse().unwrap();
    let r = ScriptedReasoner::new();
    let p = plan(&[
        "Pick_up(Mug_1)",
        "Pour(Mug_1,Sink_1)",
        "Place(Mug_1,CoffeeMachine_1)",
        "Toggle_on(CoffeeMachine_1)",
    ]);
    let run = PlanRunner::new(&mut ex, &r, task.clone(), RecoveryConfig::default()).execute(&p);
    assert_eq!(run.events.len(), 1);
    assert_eq!(run.events[0].decision.verdict, Verdict::Skip);
    assert_eq!(run.events[0].decision.stages(), vec![1]);
    assert_eq!(run.stats.failed_plan_subgoals, 1);
    assert_eq!(run.stats.plan_subgoals_entering, [1, 0, 0]);
    assert_eq!(evaluate_goals(&task, &ex.world), (2, 2));
}

#[test]
fn missing_knife_is_fetched_then_slice_retried() {
    let mut ex = kitchen(vec![
        json!({"id": "Bread_1", "category": "Bread", "parent": "CounterTop_1"}),
        json!({"id": "Knife_1", "category": "Knife", "parent": "CounterTop_1"}),
    ]);
    let r = ScriptedReasoner::new();
    let task: TaskSpec = "Make plate of toast".parse().unwrap();
    let cfg = RecoveryConfig {
        stage4: false,
        ..RecoveryConfig::default()
    };
    let run = PlanRunner::new(&mut ex, &r, task, cfg).execute(&plan(&["Slice(Bread_1)"]));
    assert_eq!(run.events.len(), 1);
    assert_eq!(
        run.events[0].decision.verdict,
        Verdict::RetryAfter(plan(&["Go_to(Knife)", "Pick_up(Knife)"]))
    );
    assert_eq!(run.history.last().unwrap().status, StepStatus::Success);
    assert!(ex.world.object("BreadSliced_1").is_some());
}

#[test]
fn chair_replaced_by_sofa() {
    let mut ex = kitchen(vec![json!({"id": "RemoteControl_1", "category": "RemoteControl", "parent": "CounterTop_1"})]);
    let r = ScriptedReasoner::new();
    let task: TaskSpec = "Put all RemoteControl on any Sofa".parse().unwrap();
    let cfg = RecoveryConfig {
        stage4: false,
        ..RecoveryConfig::default()
    };
    let run = PlanRunner::new(&mut ex, &r, task.clone(), cfg)
        .execute(&plan(&["Pick_up(RemoteControl_1)", "Place(RemoteControl_1,Chair_1)"]));
    let last = run.events.last().unwrap();
    assert_eq!(last.decision.stages(), vec![1, 2, 3]);
    assert_eq!(last.decision.verdict, Verdict::ReplaceWith(plan(&["Place(RemoteControl_1,Sofa_1)"])));
    assert_eq!(evaluate_goals(&task, &ex.world), (1, 1));
}

#[test]
fn reflection_cleans_plate_and_places_toast() {
    let mut ex = kitchen(vec![
        json!({"id": "BreadSliced_1", "category": "BreadSliced", "parent": "CounterTop_1"}),
        json!({"id": "Plate_1", "category": "Plate", "parent": "CounterTop_1", "properties": {"is_clean": false}}),
    ]);
    let r = ScriptedReasoner::new();
    let task: TaskSpec = "Make plate of toast".parse().unwrap();
    let p = plan(&[
        "Pick_up(BreadSliced_1)",
        "Place(BreadSliced_1,Toaster_1)",
        "Toggle_on(Toaster_1)",
        "Toggle_off(Toaster_1)",
    ]);
    let run = PlanRunner::new(&mut ex, &r, task.clone(), RecoveryConfig::default()).execute(&p);
    assert!(run.events.is_empty());
    assert_eq!(run.reflections.len(), 1);
    assert_eq!(run.reflections[0].goals_before, (1, 3));
    let steps: Vec<String> = run.reflections[0].steps.iter().map(|s| s.to_string()).collect();
    assert!(steps.contains(&"Clean(Plate)".to_string()), "{steps:?}");
    assert_eq!(evaluate_goals(&task, &ex.world), (3, 3));
}

#[test]
fn reflection_not_invoked_when_goal_met() {
    let mut ex = kitchen(vec![json!({"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1"})]);
    let task: TaskSpec = "Make coffee".parse().unwrap();
    let p = plan(&["Pick_up(Mug_1)", "Place(Mug_1,CoffeeMachine_1)", "Toggle_on(CoffeeMachine_1)"]);
    let run = PlanRunner::new(&mut ex, &ScriptedReasoner::new(), task, RecoveryConfig::default()).execute(&p);
    assert!(run.reflections.is_empty());
    assert_eq!(run.stats.stage_calls, [0, 0, 0, 0]);
}

#[test]
fn chains_per_subgoal_are_bounded() {
    let mut ex = kitchen(vec![json!({"id": "Mug_1", "category": "Mug", "parent": "CounterTop_1"})]);
    let r = fixed(true, &["Find(Mug_1)"], &[]);
    let task: TaskSpec = "Make coffee".parse().unwrap();
    let cfg = RecoveryConfig {
        stage4: false,
        ..RecoveryConfig::default()
    };
    let run = PlanRunner::new(&mut ex, &r, task, cfg).execute(&plan(&["Slice(Mug_1)"]));
    assert_eq!(run.events.len(), cfg.r_max);
    assert_eq!(run.stats.retries, cfg.r_max);
    assert_eq!(run.history.last().unwrap().status, StepStatus::Failed);
    let s = run.stats;
    assert!(s.plan_subgoals_entering[0] >= s.plan_subgoals_entering[1]);
    assert!(s.plan_subgoals_entering[1] >= s.plan_subgoals_entering[2]);
}
