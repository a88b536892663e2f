use std::io::{self, Write};

use serde::Serialize;

use crate::world::{ActionOutcome, LowLevelAction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub action: String,
    pub outcome: ActionOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgoal: Option<String>,
}

/// Every low-level action emitted in an episode, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExecutionTrace {
    pub records: Vec<TraceRecord>,
    pub actions_taken: usize,
    pub failed_actions: usize,
}

impl ExecutionTrace {
    pub fn push(&mut self, action: &LowLevelAction, outcome: ActionOutcome, subgoal: Option<&str>) {
        self.records.push(TraceRecord {
            step: self.actions_taken,
            action: action.to_string(),
            outcome,
            subgoal: subgoal.map(str::to_string),
        });
        self.actions_taken += 1;
    }

    pub fn failures_in_records(&self) -> usize {
        self.records.iter().filter(|r| !r.outcome.is_success()).count()
    }

    /// One JSON object per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
