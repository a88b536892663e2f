//! The conditional recovery chain: importance, then missing preconditions,
//! then a workaround while the plan runs, and a reflection round once it has
//! been traversed without reaching the goal.

use serde::{Deserialize, Serialize};

use crate::executor::{Exec, Executor};
use crate::reasoner::scripted::closest_category;
use crate::reasoner::{Parsed, Reasoner, ReasonerRequest, TemplateId};
use crate::scene::{build_scene, render_scene, SceneFact};
use crate::subgoal::{render_history, PlanStep, StepStatus, Subgoal};
use crate::task::{evaluate_goals, TaskSpec};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoveryConfig {
    pub stage1: bool,
    pub stage2: bool,
    pub stage3: bool,
    pub stage4: bool,
    /// Recovery chains allowed per subgoal attempt.
    pub r_max: usize,
    /// Reflection rounds allowed per episode.
    pub s4_max: usize,
    /// Recovery-emitted steps may themselves recover up to this depth.
    pub max_depth: usize,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            stage1: true,
            stage2: true,
            stage3: true,
            stage4: true,
            r_max: 2,
            s4_max: 2,
            max_depth: 2,
        }
    }
}

impl RecoveryConfig {
    pub fn disabled() -> Self {
        RecoveryConfig {
            stage1: false,
            stage2: false,
            stage3: false,
            stage4: false,
            ..Self::default()
        }
    }

    fn in_execution(&self) -> bool {
        self.stage1 || self.stage2 || self.stage3
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureContext {
    pub task: TaskSpec,
    pub plan: Vec<PlanStep>,
    pub failing_subgoal: Subgoal,
    pub scene: Vec<SceneFact>,
    pub stage1_justification: Option<String>,
}

impl FailureContext {
    fn request(&self, template: TemplateId) -> ReasonerRequest {
        let mut req = ReasonerRequest::new(template)
            .with("TASK", self.task.to_string())
            .with("EXECUTION_HISTORY", render_history(&self.plan))
            .with("FAILING_SUBGOAL", self.failing_subgoal.to_string())
            .with("SCENE_REPRESENTATION", render_scene(&self.scene));
        if template != TemplateId::Stage1 {
            req = req.with(
                "JUSTIFICATION_FROM_STAGE_1",
                self.stage1_justification.clone().unwrap_or_default(),
            );
        }
        req
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "steps", rename_all = "snake_case")]
pub enum Verdict {
    Skip,
    RetryAfter(Vec<Subgoal>),
    ReplaceWith(Vec<Subgoal>),
    GiveUp,
}

/// One stage that fired and what it returned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply: Option<Parsed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryDecision {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub stage_trace: Vec<StageRecord>,
}

impl RecoveryDecision {
    pub fn stages(&self) -> Vec<u8> {
        self.stage_trace.iter().map(|r| r.stage).collect()
    }
}

/// Maps any out-of-vocabulary category in reasoner-emitted steps onto the
/// closest vocabulary entry.
fn in_vocabulary(steps: Vec<Subgoal>) -> Vec<Subgoal> {
    steps
        .into_iter()
        .map(|s| {
            s.map_categories(|c| match vocab::canonical_category(c) {
                Some(c) => c.to_string(),
                None => closest_category(c).to_string(),
            })
        })
        .collect()
}

fn call(reasoner: &dyn Reasoner, stage: u8, req: &ReasonerRequest) -> (Option<Parsed>, StageRecord) {
    match reasoner.complete(req) {
        Ok(r) => (
            Some(r.parsed.clone()),
            StageRecord {
                stage,
                reply: Some(r.parsed),
                error: None,
            },
        ),
        Err(e) => {
            log::warn!("stage {stage} reasoner call failed: {e}");
            (
                None,
                StageRecord {
                    stage,
                    reply: None,
                    error: Some(e.to_string()),
                },
            )
        }
    }
}

/// Whether the failing subgoal matters. A failed call counts as important.
pub fn stage1_importance(ctx: &FailureContext, reasoner: &dyn Reasoner) -> (bool, String, StageRecord) {
    let (parsed, rec) = call(reasoner, 1, &ctx.request(TemplateId::Stage1));
    match parsed {
        Some(Parsed::Importance { important, justification }) => (important, justification, rec),
        _ => (true, String::new(), rec),
    }
}

/// Steps that must run before the failing subgoal is retried. A failed call
/// counts as nothing missing.
pub fn stage2_preconditions(ctx: &FailureContext, reasoner: &dyn Reasoner) -> (bool, Vec<Subgoal>, StageRecord) {
    let (parsed, rec) = call(reasoner, 2, &ctx.request(TemplateId::Stage2));
    match parsed {
        Some(Parsed::Preconditions { missing, actions }) => (missing, in_vocabulary(actions), rec),
        _ => (false, Vec::new(), rec),
    }
}

/// Steps that replace the failing subgoal; empty means give up on it.
pub fn stage3_workaround(ctx: &FailureContext, reasoner: &dyn Reasoner) -> (Vec<Subgoal>, StageRecord) {
    let (parsed, rec) = call(reasoner, 3, &ctx.request(TemplateId::Stage3));
    match parsed {
        Some(Parsed::Steps { steps }) => (in_vocabulary(steps), rec),
        _ => (Vec::new(), rec),
    }
}

/// Corrective steps once the plan has run without reaching the goal.
pub fn stage4_post_execution(
    task: &TaskSpec,
    plan: &[PlanStep],
    scene: &[SceneFact],
    reasoner: &dyn Reasoner,
) -> (Vec<Subgoal>, StageRecord) {
    let req = ReasonerRequest::new(TemplateId::Stage4)
        .with("TASK", task.to_string())
        .with("EXECUTION_HISTORY", render_history(plan))
        .with("SCENE_REPRESENTATION", render_scene(scene));
    let (parsed, rec) = call(reasoner, 4, &req);
    match parsed {
        Some(Parsed::Steps { steps }) => (in_vocabulary(steps), rec),
        _ => (Vec::new(), rec),
    }
}

/// Runs stages 1 to 3 in order, each only when the previous one lets the
/// chain continue. A disabled stage passes straight through.
pub fn run_recovery(ctx: &mut FailureContext, reasoner: &dyn Reasoner, cfg: &RecoveryConfig) -> RecoveryDecision {
    let mut trace = Vec::new();
    if cfg.stage1 {
        let (important, why, rec) = stage1_importance(ctx, reasoner);
        trace.push(rec);
        if !important {
            return RecoveryDecision {
                verdict: Verdict::Skip,
                stage_trace: trace,
            };
        }
        ctx.stage1_justification = Some(why);
    }
    if cfg.stage2 {
        let (missing, steps, rec) = stage2_preconditions(ctx, reasoner);
        trace.push(rec);
        if missing && !steps.is_empty() {
            return RecoveryDecision {
                verdict: Verdict::RetryAfter(steps),
                stage_trace: trace,
            };
        }
    }
    if cfg.stage3 {
        let (steps, rec) = stage3_workaround(ctx, reasoner);
        trace.push(rec);
        if !steps.is_empty() {
            return RecoveryDecision {
                verdict: Verdict::ReplaceWith(steps),
                stage_trace: trace,
            };
        }
    }
    RecoveryDecision {
        verdict: Verdict::GiveUp,
        stage_trace: trace,
    }
}

/// A recovery chain as it happened during an episode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryEvent {
    pub subgoal: Subgoal,
    pub depth: usize,
    #[serde(flatten)]
    pub decision: RecoveryDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectionEvent {
    pub round: usize,
    pub goals_before: (usize, usize),
    pub record: StageRecord,
    pub steps: Vec<Subgoal>,
}

/// Counts behind the stage funnel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RecoveryStats {
    /// Steps of the initial plan.
    pub plan_subgoals: usize,
    /// Initial-plan steps whose first attempt failed.
    pub failed_plan_subgoals: usize,
    /// Initial-plan steps for which each of stages 1 to 3 fired at least once.
    pub plan_subgoals_entering: [usize; 3],
    /// Reasoner calls per stage, including nested chains.
    pub stage_calls: [usize; 4],
    pub skips: usize,
    pub retries: usize,
    pub replacements: usize,
    pub give_ups: usize,
    pub reasoner_failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Success,
    Skipped,
    Failed,
}

impl StepOutcome {
    fn status(self) -> StepStatus {
        match self {
            StepOutcome::Success => StepStatus::Success,
            StepOutcome::Skipped => StepStatus::Skipped,
            StepOutcome::Failed => StepStatus::Failed,
        }
    }
}

/// Everything a plan run produced besides the executor state.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PlanRun {
    /// Executed steps in order, recovery steps included.
    pub history: Vec<PlanStep>,
    pub events: Vec<RecoveryEvent>,
    pub reflections: Vec<ReflectionEvent>,
    pub stats: RecoveryStats,
}

/// Drives a plan through the executor, invoking the chain on failures.
pub struct PlanRunner<'a> {
    exec: &'a mut Executor,
    reasoner: &'a dyn Reasoner,
    cfg: RecoveryConfig,
    task: TaskSpec,
    pending: Vec<Subgoal>,
    run: PlanRun,
    fired: [bool; 3],
    first_failed: bool,
}

impl<'a> PlanRunner<'a> {
    pub fn new(exec: &'a mut Executor, reasoner: &'a dyn Reasoner, task: TaskSpec, cfg: RecoveryConfig) -> Self {
        PlanRunner {
            exec,
            reasoner,
            cfg,
            task,
            pending: Vec::new(),
            run: PlanRun::default(),
            fired: [false; 3],
            first_failed: false,
        }
    }

    fn all_subgoals(&self, current: &Subgoal) -> Vec<Subgoal> {
        self.run
            .history
            .iter()
            .map(|s| s.subgoal.clone())
            .chain([current.clone()])
            .chain(self.pending.iter().cloned())
            .collect()
    }

    fn scene(&self, plan: &[Subgoal]) -> Vec<SceneFact> {
        build_scene(&self.exec.memory, plan, self.exec.held())
    }

    fn context(&self, failing: &Subgoal) -> FailureContext {
        let mut plan = self.run.history.clone();
        plan.push(PlanStep {
            subgoal: failing.clone(),
            status: StepStatus::Failed,
        });
        plan.extend(self.pending.iter().map(|s| PlanStep {
            subgoal: s.clone(),
            status: StepStatus::Pending,
        }));
        FailureContext {
            task: self.task.clone(),
            plan,
            failing_subgoal: failing.clone(),
            scene: self.scene(&self.all_subgoals(failing)),
            stage1_justification: None,
        }
    }

    fn note(&mut self, sg: &Subgoal, outcome: StepOutcome) {
        self.run.history.push(PlanStep {
            subgoal: sg.clone(),
            status: outcome.status(),
        });
    }

    fn tally(&mut self, d: &RecoveryDecision) {
        for r in &d.stage_trace {
            let i = usize::from(r.stage - 1);
            self.run.stats.stage_calls[i] += 1;
            if i < 3 {
                self.fired[i] = true;
            }
            if r.error.is_some() {
                self.run.stats.reasoner_failures += 1;
            }
        }
        match d.verdict {
            Verdict::Skip => self.run.stats.skips += 1,
            Verdict::RetryAfter(_) => self.run.stats.retries += 1,
            Verdict::ReplaceWith(_) => self.run.stats.replacements += 1,
            Verdict::GiveUp => self.run.stats.give_ups += 1,
        }
    }

    /// Executes one subgoal with recovery, recording it in the history.
    fn step(&mut self, sg: &Subgoal, depth: usize) -> Exec<StepOutcome> {
        let mut chains = 0;
        loop {
            let result = self.exec.execute_subgoal(sg)?;
            if result.is_ok() {
                self.note(sg, StepOutcome::Success);
                return Ok(StepOutcome::Success);
            }
            if depth == 0 && chains == 0 {
                self.first_failed = true;
            }
            if !self.cfg.in_execution() || chains >= self.cfg.r_max || depth >= self.cfg.max_depth {
                self.note(sg, StepOutcome::Failed);
                return Ok(StepOutcome::Failed);
            }
            chains += 1;
            let mut ctx = self.context(sg);
            let decision = run_recovery(&mut ctx, self.reasoner, &self.cfg);
            self.tally(&decision);
            self.run.events.push(RecoveryEvent {
                subgoal: sg.clone(),
                depth,
                decision: decision.clone(),
            });
            match decision.verdict {
                Verdict::Skip => {
                    self.note(sg, StepOutcome::Skipped);
                    return Ok(StepOutcome::Skipped);
                }
                Verdict::RetryAfter(steps) => {
                    for s in &steps {
                        self.step(s, depth + 1)?;
                    }
                }
                Verdict::ReplaceWith(steps) => {
                    self.note(sg, StepOutcome::Failed);
                    let mut all_ok = true;
                    for s in &steps {
                        all_ok &= self.step(s, depth + 1)? != StepOutcome::Failed;
                    }
                    return Ok(if all_ok { StepOutcome::Success } else { StepOutcome::Failed });
                }
                Verdict::GiveUp => {
                    self.note(sg, StepOutcome::Failed);
                    return Ok(StepOutcome::Failed);
                }
            }
        }
    }

    /// Runs a top-level plan step and updates the funnel counts.
    fn plan_step(&mut self, sg: &Subgoal) -> Exec<StepOutcome> {
        self.fired = [false; 3];
        self.first_failed = false;
        let out = self.step(sg, 0);
        if self.first_failed {
            self.run.stats.failed_plan_subgoals += 1;
        }
        for (i, f) in self.fired.iter().enumerate() {
            self.run.stats.plan_subgoals_entering[i] += usize::from(*f);
        }
        out
    }

    /// Executes `plan`, then reflection rounds while the goal is unmet.
    /// Stops early when a budget runs out.
    pub fn execute(mut self, plan: &[Subgoal]) -> PlanRun {
        self.run.stats.plan_subgoals = plan.len();
        let _ = self.execute_inner(plan);
        self.run
    }

    fn execute_inner(&mut self, plan: &[Subgoal]) -> Exec<()> {
        for (i, sg) in plan.iter().enumerate() {
            self.pending = plan[i + 1..].to_vec();
            self.plan_step(sg)?;
        }
        self.pending.clear();
        if !self.cfg.stage4 {
            return Ok(());
        }
        for round in 1..=self.cfg.s4_max {
            let goals = evaluate_goals(&self.task, &self.exec.world);
            if goals.0 >= goals.1 || self.exec.halted().is_some() {
                break;
            }
            let subgoals: Vec<Subgoal> = self.run.history.iter().map(|s| s.subgoal.clone()).collect();
            let scene = self.scene(&subgoals);
            let (steps, record) = stage4_post_execution(&self.task, &self.run.history, &scene, self.reasoner);
            self.run.stats.stage_calls[3] += 1;
            if record.error.is_some() {
                self.run.stats.reasoner_failures += 1;
            }
            self.run.reflections.push(ReflectionEvent {
                round,
                goals_before: goals,
                record,
                steps: steps.clone(),
            });
            if steps.is_empty() {
                break;
            }
            for (i, sg) in steps.iter().enumerate() {
                self.pending = steps[i + 1..].to_vec();
                self.step(sg, 0)?;
            }
            self.pending.clear();
        }
        Ok(())
    }
}
