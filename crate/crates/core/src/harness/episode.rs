//! Episode files and the single-episode pipeline.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::metrics::{EpisodeMetrics, MetricError};
use crate::executor::trace::ExecutionTrace;
use crate::executor::{Executor, ExecutorConfig, FailureCounting, Halt};
use crate::planner::{generate_plan, DemoPool, Dialogue};
use crate::reasoner::http::{HttpConfig, HttpReasoner};
use crate::reasoner::scripted::ScriptedReasoner;
use crate::reasoner::{Reasoner, ReasonerError};
use crate::recovery::{PlanRun, PlanRunner, RecoveryConfig, RecoveryEvent, RecoveryStats, ReflectionEvent};
use crate::search::ReasonerSearch;
use crate::task::{evaluate_goals, TaskSpec};
use crate::world::{WorldSpec, WorldState};

/// A component whose removal is expected to make an episode fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    S1,
    S2,
    S3,
    S4,
    Search,
}

impl Requirement {
    pub fn is_stage(self) -> bool {
        self != Requirement::Search
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Requirement::S1 => "s1",
            Requirement::S2 => "s2",
            Requirement::S3 => "s3",
            Requirement::S4 => "s4",
            Requirement::Search => "search",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Annotations {
    /// Components each of which is necessary for success.
    pub requires: BTreeSet<Requirement>,
    /// Alternatives: success needs at least one of these.
    pub requires_any: BTreeSet<Requirement>,
    /// The budget this episode is built to exhaust, if any.
    pub exhausts: Option<Halt>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Episode {
    pub name: String,
    #[serde(default = "default_split")]
    pub split: String,
    pub world_spec: WorldSpec,
    pub dialogue: Dialogue,
    /// Task the episode is scored against, in display form.
    pub task: String,
    /// Plan reply the scripted backend returns for this dialogue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner_reply: Option<Value>,
    pub reference_length: usize,
    #[serde(default)]
    pub annotations: Annotations,
}

impl Annotations {
    /// Whether the episode is expected to fail with `disabled` switched off.
    pub fn fails_without(&self, disabled: &BTreeSet<Requirement>) -> bool {
        self.requires.iter().any(|r| disabled.contains(r))
            || (!self.requires_any.is_empty() && self.requires_any.is_subset(disabled))
    }

    pub fn needs_recovery(&self) -> bool {
        self.requires.iter().chain(&self.requires_any).any(|r| r.is_stage())
    }
}

/// Components switched off by a configuration.
pub fn disabled_components(opts: &RunOptions) -> BTreeSet<Requirement> {
    let r = &opts.recovery;
    [
        (r.stage1, Requirement::S1),
        (r.stage2, Requirement::S2),
        (r.stage3, Requirement::S3),
        (r.stage4, Requirement::S4),
        (opts.search, Requirement::Search),
    ]
    .into_iter()
    .filter(|(on, _)| !on)
    .map(|(_, c)| c)
    .collect()
}

fn default_split() -> String {
    "seen".to_string()
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed episode {path}: {message}")]
    Parse { path: String, message: String },
}

impl Episode {
    pub fn from_json(text: &str) -> Result<Episode, EpisodeError> {
        Self::parse(text, "<inline>")
    }

    pub fn load(path: &Path) -> Result<Episode, EpisodeError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| EpisodeError::Io {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &shown)
    }

    fn parse(text: &str, path: &str) -> Result<Episode, EpisodeError> {
        let bad = |message: String| EpisodeError::Parse {
            path: path.to_string(),
            message,
        };
        let ep: Episode = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        ep.gold_task().map_err(bad)?;
        if ep.reference_length == 0 {
            return Err(bad("reference_length must be positive".into()));
        }
        Ok(ep)
    }

    pub fn gold_task(&self) -> Result<TaskSpec, String> {
        self.task.parse().map_err(|e| format!("task: {e}"))
    }
}

/// Which reasoner answers prompts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Scripted,
    Http(HttpConfig),
}

/// Everything about a run except the episode itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    pub recovery: RecoveryConfig,
    pub search: bool,
    pub max_actions: usize,
    pub max_failures: usize,
    pub failure_counting: FailureCounting,
    /// Overrides the world's seed when set.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        let e = ExecutorConfig::default();
        RunOptions {
            recovery: RecoveryConfig::default(),
            search: true,
            max_actions: e.max_actions,
            max_failures: e.max_failures,
            failure_counting: e.failure_counting,
            seed: None,
        }
    }
}

impl RunOptions {
    fn executor_config(&self) -> ExecutorConfig {
        ExecutorConfig {
            max_actions: self.max_actions,
            max_failures: self.max_failures,
            failure_counting: self.failure_counting,
        }
    }
}

/// Builds the reasoner for one episode. The HTTP backend may be shared; the
/// scripted one is seeded with the episode's plan reply.
pub fn reasoner_for(
    backend: &Backend,
    shared: Option<&Arc<dyn Reasoner>>,
    ep: &Episode,
) -> Result<Arc<dyn Reasoner>, ReasonerError> {
    match backend {
        Backend::Scripted => {
            let mut r = ScriptedReasoner::new();
            if let Some(reply) = &ep.planner_reply {
                r.add_plan(&ep.dialogue.to_string(), reply.clone());
            }
            Ok(Arc::new(r))
        }
        Backend::Http(cfg) => match shared {
            Some(r) => Ok(Arc::clone(r)),
            None => Ok(Arc::new(HttpReasoner::new(cfg.clone())?)),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub name: String,
    pub split: String,
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_task: Option<String>,
    #[serde(flatten)]
    pub metrics: EpisodeMetrics,
    pub failed_actions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt: Option<Halt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub plan: Vec<String>,
    pub search_invocations: usize,
    pub recovery: RecoveryStats,
    pub events: Vec<RecoveryEvent>,
    pub reflections: Vec<ReflectionEvent>,
    #[serde(skip)]
    pub trace: ExecutionTrace,
}

impl EpisodeResult {
    /// A result for an episode that never ran.
    pub fn crashed(ep: &Episode, error: String) -> EpisodeResult {
        EpisodeResult {
            name: ep.name.clone(),
            split: ep.split.clone(),
            task: ep.task.clone(),
            predicted_task: None,
            metrics: EpisodeMetrics::new(false, (0, 0), 0, ep.reference_length.max(1))
                .expect("reference length is positive"),
            failed_actions: 0,
            halt: None,
            error: Some(error),
            plan: Vec::new(),
            search_invocations: 0,
            recovery: RecoveryStats::default(),
            events: Vec::new(),
            reflections: Vec::new(),
            trace: ExecutionTrace::default(),
        }
    }
}

/// Runs explore, plan, execute-with-recovery, reflect, and scoring.
pub fn run_episode(ep: &Episode, opts: &RunOptions, reasoner: Arc<dyn Reasoner>, pool: &DemoPool) -> EpisodeResult {
    let gold = match ep.gold_task() {
        Ok(t) => t,
        Err(e) => return EpisodeResult::crashed(ep, e),
    };
    let mut spec = ep.world_spec.clone();
    if let Some(seed) = opts.seed {
        spec.rng_seed = seed;
    }
    let world = match WorldState::load(&spec) {
        Ok(w) => w,
        Err(e) => return EpisodeResult::crashed(ep, e.to_string()),
    };
    let mut ex = Executor::new(world, opts.executor_config());
    let mut error = None;
    let mut predicted = None;
    let mut plan_steps = Vec::new();
    let mut run = PlanRun::default();
    let mut planned = false;
    if ex.explore_initial().is_ok() {
        match generate_plan(&ep.dialogue, pool, reasoner.as_ref()) {
            Ok(plan) => {
                planned = true;
                predicted = Some(plan.task.to_string());
                plan_steps = plan.subgoals.iter().map(ToString::to_string).collect();
                if opts.search {
                    ex.set_search(Box::new(ReasonerSearch::new(Arc::clone(&reasoner), plan.object_locations.clone())));
                }
                run = PlanRunner::new(&mut ex, reasoner.as_ref(), plan.task.clone(), opts.recovery)
                    .execute(&plan.subgoals);
            }
            Err(e) => error = Some(e.to_string()),
        }
    }
    let goals = evaluate_goals(&gold, &ex.world);
    let success = planned && goals.1 > 0 && goals.0 == goals.1;
    let metrics = match EpisodeMetrics::new(success, goals, ex.trace.actions_taken, ep.reference_length) {
        Ok(m) => m,
        Err(MetricError::ZeroReference) | Err(MetricError::RateOutOfRange(_)) => {
            return EpisodeResult::crashed(ep, "invalid metric inputs".into())
        }
    };
    EpisodeResult {
        name: ep.name.clone(),
        split: ep.split.clone(),
        task: gold.to_string(),
        predicted_task: predicted,
        metrics,
        failed_actions: ex.trace.failed_actions,
        halt: ex.halted(),
        error,
        plan: plan_steps,
        search_invocations: ex.search_invocations,
        recovery: run.stats,
        events: run.events,
        reflections: run.reflections,
        trace: ex.trace.clone(),
    }
}
