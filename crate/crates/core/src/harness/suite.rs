//! Suites of episodes, the ablation matrix and report assembly.

use std::collections::BTreeMap;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::episode::{reasoner_for, run_episode, Backend, Episode, EpisodeError, EpisodeResult, RunOptions};
use super::metrics::Aggregate;
use crate::planner::DemoPool;
use crate::reasoner::http::HttpReasoner;
use crate::reasoner::Reasoner;
use crate::recovery::RecoveryConfig;
use crate::task::TaskSpec;

pub const REPORT_VERSION: u32 = 1;

/// Loads every `*.json` episode directly inside `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Episode>, EpisodeError> {
    let entries = std::fs::read_dir(dir).map_err(|e| EpisodeError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Episode::load(p)).collect()
}

/// Funnel counts over initial-plan subgoals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageFlow {
    pub plan_subgoals: usize,
    pub failed_plan_subgoals: usize,
    pub entering: [usize; 3],
    /// Episodes in which post-execution reflection ran.
    pub reflection_episodes: usize,
    pub failed_fraction: f64,
    pub entering_fraction: [f64; 3],
}

impl StageFlow {
    pub fn over<'a>(results: impl IntoIterator<Item = &'a EpisodeResult>) -> StageFlow {
        let mut f = StageFlow::default();
        for r in results {
            f.plan_subgoals += r.recovery.plan_subgoals;
            f.failed_plan_subgoals += r.recovery.failed_plan_subgoals;
            for i in 0..3 {
                f.entering[i] += r.recovery.plan_subgoals_entering[i];
            }
            f.reflection_episodes += usize::from(!r.reflections.is_empty());
        }
        if f.plan_subgoals > 0 {
            let n = f.plan_subgoals as f64;
            f.failed_fraction = f.failed_plan_subgoals as f64 / n;
            f.entering_fraction = f.entering.map(|e| e as f64 / n);
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub report_version: u32,
    pub label: String,
    pub backend: &'static str,
    pub options: RunOptions,
    pub overall: Aggregate,
    pub per_split: BTreeMap<String, Aggregate>,
    pub per_task: BTreeMap<String, Aggregate>,
    pub stage_flow: StageFlow,
    pub episodes: Vec<EpisodeResult>,
}

impl SuiteReport {
    pub fn failed(&self) -> Vec<&str> {
        self.episodes.iter().filter(|e| !e.metrics.success).map(|e| e.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Writes one `<episode>.jsonl` action trace per episode.
    pub fn write_traces(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for e in &self.episodes {
            let f = std::fs::File::create(dir.join(format!("{}.jsonl", e.name)))?;
            e.trace.write_jsonl(io::BufWriter::new(f))?;
        }
        Ok(())
    }
}

fn task_key(task: &str) -> String {
    task.parse::<TaskSpec>()
        .map(|t| t.kind.name().to_string())
        .unwrap_or_else(|_| task.to_string())
}

fn backend_name(b: &Backend) -> &'static str {
    match b {
        Backend::Scripted => "scripted",
        Backend::Http(_) => "http",
    }
}

fn shared_reasoner(backend: &Backend) -> Result<Option<Arc<dyn Reasoner>>, String> {
    match backend {
        Backend::Scripted => Ok(None),
        Backend::Http(cfg) => HttpReasoner::new(cfg.clone())
            .map(|r| Some(Arc::new(r) as Arc<dyn Reasoner>))
            .map_err(|e| e.to_string()),
    }
}

fn run_one(ep: &Episode, opts: &RunOptions, backend: &Backend, shared: Option<&Arc<dyn Reasoner>>, pool: &DemoPool) -> EpisodeResult {
    let reasoner = match reasoner_for(backend, shared, ep) {
        Ok(r) => r,
        Err(e) => return EpisodeResult::crashed(ep, e.to_string()),
    };
    match catch_unwind(AssertUnwindSafe(|| run_episode(ep, opts, reasoner, pool))) {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "episode panicked".into());
            EpisodeResult::crashed(ep, msg)
        }
    }
}

/// Runs every episode (in parallel) and aggregates in input order.
pub fn run_suite(label: &str, episodes: &[Episode], opts: &RunOptions, backend: &Backend, pool: &DemoPool) -> SuiteReport {
    let shared = shared_reasoner(backend);
    let results: Vec<EpisodeResult> = episodes
        .par_iter()
        .map(|ep| match &shared {
            Ok(s) => run_one(ep, opts, backend, s.as_ref(), pool),
            Err(e) => EpisodeResult::crashed(ep, e.clone()),
        })
        .collect();
    assemble(label, backend, opts, results)
}

pub fn assemble(label: &str, backend: &Backend, opts: &RunOptions, episodes: Vec<EpisodeResult>) -> SuiteReport {
    let mut splits: BTreeMap<String, Vec<_>> = BTreeMap::new();
    let mut tasks: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for e in &episodes {
        splits.entry(e.split.clone()).or_default().push(&e.metrics);
        tasks.entry(task_key(&e.task)).or_default().push(&e.metrics);
    }
    SuiteReport {
        report_version: REPORT_VERSION,
        label: label.to_string(),
        backend: backend_name(backend),
        options: *opts,
        overall: Aggregate::over(episodes.iter().map(|e| &e.metrics)),
        per_split: splits.into_iter().map(|(k, v)| (k, Aggregate::over(v))).collect(),
        per_task: tasks.into_iter().map(|(k, v)| (k, Aggregate::over(v))).collect(),
        stage_flow: StageFlow::over(&episodes),
        episodes,
    }
}

/// One row of the ablation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ablation {
    pub name: &'static str,
    pub recovery: RecoveryConfig,
    pub search: bool,
}

pub fn ablation_rows() -> Vec<Ablation> {
    let full = RecoveryConfig::default();
    let row = |name, recovery, search| Ablation { name, recovery, search };
    vec![
        row("full", full, true),
        row("w/o s1", RecoveryConfig { stage1: false, ..full }, true),
        row("w/o s2", RecoveryConfig { stage2: false, ..full }, true),
        row("w/o s3", RecoveryConfig { stage3: false, ..full }, true),
        row("w/o s4", RecoveryConfig { stage4: false, ..full }, true),
        row("w/o s2&4", RecoveryConfig { stage2: false, stage4: false, ..full }, true),
        row("w/o search", full, false),
        row("none", RecoveryConfig::disabled(), true),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRow {
    pub name: &'static str,
    pub overall: Aggregate,
    pub stage_flow: StageFlow,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixReport {
    pub report_version: u32,
    pub backend: &'static str,
    pub rows: Vec<MatrixRow>,
}

impl MatrixReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn row(&self, name: &str) -> Option<&MatrixRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

/// Runs the suite once per ablation row. `base` supplies budgets and seed.
pub fn run_matrix(episodes: &[Episode], base: &RunOptions, backend: &Backend, pool: &DemoPool) -> (MatrixReport, Vec<SuiteReport>) {
    let suites: Vec<SuiteReport> = ablation_rows()
        .iter()
        .map(|a| {
            let opts = RunOptions {
                recovery: RecoveryConfig {
                    r_max: base.recovery.r_max,
                    s4_max: base.recovery.s4_max,
                    max_depth: base.recovery.max_depth,
                    ..a.recovery
                },
                search: a.search,
                ..*base
            };
            run_suite(a.name, episodes, &opts, backend, pool)
        })
        .collect();
    let rows = suites
        .iter()
        .zip(ablation_rows())
        .map(|(s, a)| MatrixRow {
            name: a.name,
            overall: s.overall,
            stage_flow: s.stage_flow,
            failed: s.failed().into_iter().map(String::from).collect(),
        })
        .collect();
    (
        MatrixReport {
            report_version: REPORT_VERSION,
            backend: backend_name(backend),
            rows,
        },
        suites,
    )
}

/// Text table of the matrix, one row per configuration.
pub fn render_matrix(m: &MatrixReport) -> String {
    let mut out = format!("{:<12} {:>7} {:>7} {:>7} {:>7}\n", "config", "SR", "GC", "PLW-SR", "PLW-GC");
    for r in &m.rows {
        let o = &r.overall;
        out += &format!(
            "{:<12} {:>7.2} {:>7.2} {:>7.2} {:>7.2}\n",
            r.name,
            100.0 * o.sr,
            100.0 * o.gc,
            100.0 * o.plw_sr,
            100.0 * o.plw_gc
        );
    }
    out
}
