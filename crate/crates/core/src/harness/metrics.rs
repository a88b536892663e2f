//! Success, goal-condition and path-length-weighted metrics.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("reference length must be positive")]
    ZeroReference,
    #[error("rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
}

/// Path-length-weighted rate: `m * L* / max(L*, L_hat)`.
pub fn compute_plw(m: f64, l_star: usize, l_hat: usize) -> Result<f64, MetricError> {
    if l_star == 0 {
        return Err(MetricError::ZeroReference);
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(MetricError::RateOutOfRange(m));
    }
    if l_hat <= l_star {
        return Ok(m);
    }
    Ok(m * l_star as f64 / l_hat as f64)
}

/// Per-episode scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeMetrics {
    pub success: bool,
    pub satisfied: usize,
    pub total: usize,
    pub gc: f64,
    pub actions_taken: usize,
    pub reference_length: usize,
    pub plw_sr: f64,
    pub plw_gc: f64,
}

impl EpisodeMetrics {
    /// `success` is forced false when the plan could not be produced.
    pub fn new(
        success: bool,
        (satisfied, total): (usize, usize),
        actions_taken: usize,
        reference_length: usize,
    ) -> Result<Self, MetricError> {
        let gc = if total == 0 { 0.0 } else { satisfied as f64 / total as f64 };
        let sr = if success { 1.0 } else { 0.0 };
        Ok(EpisodeMetrics {
            success,
            satisfied,
            total,
            gc,
            actions_taken,
            reference_length,
            plw_sr: compute_plw(sr, reference_length, actions_taken)?,
            plw_gc: compute_plw(gc, reference_length, actions_taken)?,
        })
    }
}

/// Rates over a set of episodes. GC and the PLW rates are means of the
/// per-episode values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Aggregate {
    pub episodes: usize,
    pub successes: usize,
    pub sr: f64,
    pub gc: f64,
    pub plw_sr: f64,
    pub plw_gc: f64,
}

impl Aggregate {
    pub fn over<'a>(metrics: impl IntoIterator<Item = &'a EpisodeMetrics>) -> Aggregate {
        let mut a = Aggregate::default();
        for m in metrics {
            a.episodes += 1;
            a.successes += usize::from(m.success);
            a.gc += m.gc;
            a.plw_sr += m.plw_sr;
            a.plw_gc += m.plw_gc;
        }
        if a.episodes > 0 {
            let n = a.episodes as f64;
            a.sr = a.successes as f64 / n;
            a.gc /= n;
            a.plw_sr /= n;
            a.plw_gc /= n;
        }
        a
    }
}
