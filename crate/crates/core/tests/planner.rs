use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use cmfr_core::planner::{
    format_examples, generate_plan, normalize_category, retrieve_examples, DemoPool, Dialogue, PlanError,
};
use cmfr_core::reasoner::scripted::ScriptedReasoner;
use cmfr_core::reasoner::{
    complete_with_retries, Reasoner, ReasonerError, ReasonerReply, ReasonerRequest, DEFAULT_RETRIES,
};
use cmfr_core::task::TaskKind;
use cmfr_core::vocab;
use proptest::prelude::*;

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn example_layout_matches_published_examples() {
    let pool = DemoPool::builtin();
    let first: Vec<_> = pool.demos().iter().take(3).collect();
    assert_eq!(format_examples(&first) + "\n", golden("plan_examples.txt"));
}

fn words(d: &Dialogue) -> HashSet<String> {
    let mut out = HashSet::new();
    for t in d.turns() {
        for w in t.text.to_lowercase().split(|c: char| !c.is_ascii_alphanumeric()) {
            if !w.is_empty() {
                out.insert(w.to_string());
            }
        }
    }
    out
}

fn jaccard(a: &Dialogue, b: &Dialogue) -> f64 {
    let (wa, wb) = (words(a), words(b));
    let union = wa.union(&wb).count();
    if union == 0 {
        0.0
    } else {
        wa.intersection(&wb).count() as f64 / union as f64
    }
}

fn oracle_top3(d: &Dialogue, pool: &DemoPool) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = pool.demos().iter().enumerate().map(|(i, e)| (jaccard(d, &e.dialogue), i)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scored.into_iter().take(3).map(|(_, i)| i).collect()
}

#[test]
fn coffee_dialogue_retrieves_a_coffee_demo_first() {
    let pool = DemoPool::builtin();
    let d = Dialogue::parse("<Driver> hi\n<Commander> please make me a coffee\n<Commander> the mug is dirty").unwrap();
    let top = retrieve_examples(&d, &pool);
    assert_eq!(top, oracle_top3(&d, &pool));
    assert_eq!(pool.demos()[top[0]].output["task"], "Make coffee");
}

#[test]
fn identical_dialogue_scores_maximal() {
    let pool = DemoPool::builtin();
    for (i, demo) in pool.demos().iter().enumerate() {
        let top = retrieve_examples(&demo.dialogue, &pool);
        assert!((jaccard(&demo.dialogue, &pool.demos()[top[0]].dialogue) - 1.0).abs() < 1e-12);
        assert!(top[0] <= i);
    }
}

#[test]
fn unrelated_dialogue_still_gets_three() {
    let pool = DemoPool::builtin();
    let d = Dialogue::parse("<Commander> zzz qqq").unwrap();
    assert_eq!(retrieve_examples(&d, &pool), vec![0, 1, 2]);
}

fn published_dialogue(i: usize) -> Dialogue {
    DemoPool::builtin().demos()[i].dialogue.clone()
}

#[test]
fn boil_potato_plan() {
    let plan = generate_plan(&published_dialogue(1), &DemoPool::builtin(), &ScriptedReasoner::new()).unwrap();
    assert_eq!(plan.task.kind, TaskKind::BoilPotato);
    assert_eq!(plan.object_locations.len(), 1);
    assert_eq!(plan.object_locations[0].to_string(), "(Potato_1,inside,Fridge_1)");
    assert_eq!(plan.subgoals.len(), 12);
    assert_eq!(plan.subgoals.last().unwrap().to_string(), "Toggle_on(StoveBurner_1)");
}

#[test]
fn lettuce_plan_and_normalized_table() {
    let plan = generate_plan(&published_dialogue(0), &DemoPool::builtin(), &ScriptedReasoner::new()).unwrap();
    assert_eq!(plan.task.kind, TaskKind::NSlicesIn);
    assert_eq!(plan.task.n, Some(1));
    assert_eq!(plan.task.object.as_deref(), Some("Lettuce"));
    assert_eq!(plan.task.receptacle.as_deref(), Some("Bowl"));
    assert!(plan.subgoals.iter().any(|s| s.to_string() == "Place(Bowl_1,DiningTable_1)"));
    assert!(plan.object_locations.iter().any(|t| t.to_string() == "(Lettuce_1,on,DiningTable_1)"));
}

#[test]
fn canned_reply_wins_over_examples() {
    let d = Dialogue::parse("<Commander> water the plant").unwrap();
    let r = ScriptedReasoner::new().with_plan(
        &d.to_string(),
        serde_json::json!({"task": "Water plant", "task_params": {}, "objects of interest": ["Plant"],
            "subgoals": ["Find(Cupboard_1)", "Open(Cupboard_1)"]}),
    );
    let plan = generate_plan(&d, &DemoPool::builtin(), &r).unwrap();
    assert_eq!(plan.task.kind, TaskKind::WaterPlant);
    assert_eq!(plan.objects_of_interest, ["HousePlant"]);
    assert_eq!(plan.subgoals[1].to_string(), "Open(Cabinet_1)");
}

/// Replies with a plan lacking the task field, counting calls.
struct NoTask(AtomicUsize);

impl Reasoner for NoTask {
    fn complete(&self, req: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        req.render()?;
        complete_with_retries(req.template, DEFAULT_RETRIES, || {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(r#"{"task_params": {}, "subgoals": ["Find(Mug_1)"]}"#.to_string())
        })
    }
}

#[test]
fn missing_task_field_fails_after_retries() {
    let r = NoTask(AtomicUsize::new(0));
    let err = generate_plan(&published_dialogue(2), &DemoPool::builtin(), &r).unwrap_err();
    assert!(matches!(err, PlanError::Reasoner(ReasonerError::Unavailable(_))));
    assert_eq!(r.0.load(Ordering::SeqCst), DEFAULT_RETRIES + 1);
}

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

#[test]
fn normalization_examples() {
    let r = ScriptedReasoner::new();
    assert_eq!(normalize_category("Cupboard", &r), "Cabinet");
    assert_eq!(normalize_category("Mug", &r), "Mug");
    let oracle = vocab::CATEGORIES
        .iter()
        .min_by_key(|c| levenshtein("frdge", &c.to_lowercase()))
        .unwrap();
    assert_eq!(*oracle, "Fridge");
    assert_eq!(normalize_category("Frdge", &r), *oracle);
}

proptest! {
    #[test]
    fn normalization_is_idempotent(raw in "[A-Za-z]{1,12}") {
        let r = ScriptedReasoner::new();
        let once = normalize_category(&raw, &r);
        prop_assert!(vocab::is_category(&once));
        prop_assert_eq!(normalize_category(&once, &r), once.clone());
    }

    #[test]
    fn scripted_plans_type_check(i in 0usize..24, extra in "[a-z ]{0,30}") {
        let pool = DemoPool::builtin();
        let mut text = pool.demos()[i].dialogue.to_string();
        text.push_str(&format!("\n<Commander> {extra}"));
        let d = Dialogue::parse(&text).unwrap();
        let a = generate_plan(&d, &pool, &ScriptedReasoner::new()).unwrap();
        let b = generate_plan(&d, &pool, &ScriptedReasoner::new()).unwrap();
        prop_assert_eq!(&a, &b);
        for sg in &a.subgoals {
            prop_assert!(sg.validate_categories().is_ok(), "{}", sg);
        }
        for c in &a.objects_of_interest {
            prop_assert!(vocab::is_category(c));
        }
    }
}
