//! Reasoners with canned answers.

use cmfr_core::reasoner::{complete_with_retries, Reasoner, ReasonerError, ReasonerReply, ReasonerRequest, TemplateId};
use serde_json::{json, Value};

/// Answers every template with a fixed body.
pub struct Fixed {
    pub stage1: Value,
    pub stage2: Value,
    pub stage3: Value,
}

impl Reasoner for Fixed {
    fn complete(&self, req: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        let body = match req.template {
            TemplateId::Stage1 => &self.stage1,
            TemplateId::Stage2 => &self.stage2,
            TemplateId::Stage3 => &self.stage3,
            _ => return Err(ReasonerError::Unavailable("not scripted".into())),
        };
        let raw = body.to_string();
        complete_with_retries(req.template, 0, || Ok(raw.clone()))
    }
}

pub struct Down;

impl Reasoner for Down {
    fn complete(&self, _: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        Err(ReasonerError::Unavailable("connection refused".into()))
    }
}

pub fn fixed(important: bool, missing: &[&str], workaround: &[&str]) -> Fixed {
    Fixed {
        stage1: json!({"important": important, "justification": "because"}),
        stage2: json!({"prior required actions": !missing.is_empty(), "actions": missing}),
        stage3: json!({"solution": workaround}),
    }
}
