use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cmfr_core::harness::suite::{render_matrix, SuiteReport};
use cmfr_core::harness::{load_dir, run_matrix, run_suite, Backend, Episode, RunOptions};
use cmfr_core::planner::DemoPool;
use cmfr_core::reasoner::http::HttpConfig;

#[derive(Parser)]
#[command(name = "cmfr", version, about = "Offline embodied-agent episodes with staged failure recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single episode file.
    Run {
        episode: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write the low-level action trace here as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every episode file in a directory.
    Suite {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Directory for per-episode action traces.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Run the directory under every ablation configuration.
    Ablate {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Scripted,
    Http,
}

#[derive(Args)]
struct Common {
    /// Enabled recovery stages, e.g. `s1,s2,s4`; `none` disables all.
    #[arg(long, default_value = "s1,s2,s3,s4")]
    stages: String,
    #[arg(long)]
    no_search: bool,
    #[arg(long, value_enum, default_value = "scripted")]
    backend: BackendKind,
    /// Chat-completion URL for the http backend.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long, default_value_t = 1000)]
    max_actions: usize,
    #[arg(long, default_value_t = 30)]
    max_failures: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> Result<RunOptions> {
        if self.max_actions == 0 || self.max_failures == 0 {
            bail!("budgets must be positive");
        }
        let mut opts = RunOptions {
            search: !self.no_search,
            max_actions: self.max_actions,
            max_failures: self.max_failures,
            seed: self.seed,
            ..RunOptions::default()
        };
        let wanted: BTreeSet<&str> = self.stages.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for s in &wanted {
            if !matches!(*s, "s1" | "s2" | "s3" | "s4" | "none") {
                bail!("unknown stage `{s}` (expected s1..s4 or none)");
            }
        }
        let r = &mut opts.recovery;
        r.stage1 = wanted.contains("s1");
        r.stage2 = wanted.contains("s2");
        r.stage3 = wanted.contains("s3");
        r.stage4 = wanted.contains("s4");
        Ok(opts)
    }

    fn backend(&self) -> Backend {
        match self.backend {
            BackendKind::Scripted => Backend::Scripted,
            BackendKind::Http => {
                let mut cfg = HttpConfig::default();
                if let Some(e) = &self.endpoint {
                    cfg.endpoint = e.clone();
                }
                if let Some(m) = &self.model {
                    cfg.model = m.clone();
                }
                if let Some(k) = &self.api_key_env {
                    cfg.api_key_env = Some(k.clone());
                }
                Backend::Http(cfg)
            }
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn summarize(report: &SuiteReport) {
    for e in &report.episodes {
        let m = &e.metrics;
        println!(
            "{:<32} {:<7} goals {}/{}  actions {:>4}  failures {:>2}{}",
            e.name,
            if m.success { "success" } else { "failed" },
            m.satisfied,
            m.total,
            m.actions_taken,
            e.failed_actions,
            e.error.as_deref().map(|x| format!("  error: {x}")).unwrap_or_default()
        );
    }
    let o = &report.overall;
    println!(
        "episodes {}  SR {:.2}  GC {:.2}  PLW-SR {:.2}  PLW-GC {:.2}",
        o.episodes,
        100.0 * o.sr,
        100.0 * o.gc,
        100.0 * o.plw_sr,
        100.0 * o.plw_gc
    );
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = DemoPool::builtin();
    match cli.command {
        Command::Run { episode, common, trace } => {
            let ep = Episode::load(&episode)?;
            let report = run_suite("run", &[ep], &common.options()?, &common.backend(), &pool);
            if let Some(t) = trace {
                let f = std::fs::File::create(&t).with_context(|| format!("creating {}", t.display()))?;
                report.episodes[0].trace.write_jsonl(std::io::BufWriter::new(f))?;
            }
            write_out(common.out.as_deref(), &report.to_json())?;
            summarize(&report);
        }
        Command::Suite { dir, common, traces } => {
            let eps = load_dir(&dir)?;
            if eps.is_empty() {
                bail!("no episode files in {}", dir.display());
            }
            let report = run_suite("suite", &eps, &common.options()?, &common.backend(), &pool);
            if let Some(d) = traces {
                report.write_traces(&d)?;
            }
            write_out(common.out.as_deref(), &report.to_json())?;
            summarize(&report);
        }
        Command::Ablate { dir, common } => {
            let eps = load_dir(&dir)?;
            if eps.is_empty() {
                bail!("no episode files in {}", dir.display());
            }
            let (matrix, _) = run_matrix(&eps, &common.options()?, &common.backend(), &pool);
            write_out(common.out.as_deref(), &matrix.to_json())?;
            print!("{}", render_matrix(&matrix));
            for r in &matrix.rows {
                if !r.failed.is_empty() {
                    println!("{:<12} failed: {}", r.name, r.failed.join(", "));
                }
            }
        }
    }
    Ok(())
}
