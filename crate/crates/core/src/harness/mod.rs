//! Batch evaluation: episodes, metrics, suites and ablations.

pub mod episode;
pub mod metrics;
pub mod suite;

pub use episode::{run_episode, Annotations, Backend, Episode, EpisodeError, EpisodeResult, Requirement, RunOptions};
pub use metrics::{compute_plw, Aggregate, EpisodeMetrics, MetricError};
pub use suite::{ablation_rows, load_dir, run_matrix, run_suite, Ablation, MatrixReport, SuiteReport};
