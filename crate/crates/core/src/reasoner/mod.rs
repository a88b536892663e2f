//! Text-in, structured-out boundary shared by the remote model client and the
//! scripted backend.

pub mod extract;
pub mod http;
pub mod scripted;
pub mod template;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use extract::{Parsed, PlanReply};
pub use template::{TemplateError, TemplateId};

/// Schema-failure retries after the first call.
pub const DEFAULT_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReasonerRequest {
    pub template: TemplateId,
    pub slots: BTreeMap<String, String>,
}

impl ReasonerRequest {
    pub fn new(template: TemplateId) -> Self {
        ReasonerRequest {
            template,
            slots: BTreeMap::new(),
        }
    }

    pub fn with(mut self, slot: &str, value: impl Into<String>) -> Self {
        self.slots.insert(slot.to_string(), value.into());
        self
    }

    pub fn slot(&self, name: &str) -> Option<&str> {
        self.slots.get(name).map(String::as_str)
    }

    pub fn render(&self) -> Result<String, TemplateError> {
        template::render(self.template, &self.slots)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasonerReply {
    pub raw: String,
    pub parsed: Parsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("reasoner unavailable: {0}")]
    Unavailable(String),
}

pub trait Reasoner: Send + Sync {
    fn complete(&self, request: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError>;
}

impl<R: Reasoner + ?Sized> Reasoner for std::sync::Arc<R> {
    fn complete(&self, request: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        (**self).complete(request)
    }
}

impl<R: Reasoner + ?Sized> Reasoner for Box<R> {
    fn complete(&self, request: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        (**self).complete(request)
    }
}

/// Calls `attempt` until its text holds a schema-valid block, making at most
/// `retries + 1` calls. Transport errors use up attempts the same way.
pub fn complete_with_retries(
    template: TemplateId,
    retries: usize,
    mut attempt: impl FnMut() -> Result<String, String>,
) -> Result<ReasonerReply, ReasonerError> {
    let mut last = String::from("no attempt made");
    for i in 0..=retries {
        match attempt() {
            Ok(raw) => match extract::extract(template, &raw) {
                Some(parsed) => return Ok(ReasonerReply { raw, parsed }),
                None => {
                    log::warn!("{template} reply failed schema check (attempt {})", i + 1);
                    last = format!("malformed reply: {}", raw.chars().take(200).collect::<String>());
                }
            },
            Err(e) => {
                log::warn!("{template} call failed (attempt {}): {e}", i + 1);
                last = e;
            }
        }
    }
    Err(ReasonerError::Unavailable(last))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retries_then_gives_up() {
        let mut calls = 0;
        let r = complete_with_retries(TemplateId::Stage3, DEFAULT_RETRIES, || {
            calls += 1;
            Ok("no json here".to_string())
        });
        assert!(matches!(r, Err(ReasonerError::Unavailable(_))));
        assert_eq!(calls, DEFAULT_RETRIES + 1);
    }

    #[test]
    fn recovers_on_a_later_attempt() {
        let mut calls = 0;
        let r = complete_with_retries(TemplateId::Stage3, DEFAULT_RETRIES, || {
            calls += 1;
            if calls < 3 {
                Err("timeout".to_string())
            } else {
                Ok("{\"solution\": []}".to_string())
            }
        })
        .unwrap();
        assert_eq!(r.parsed, Parsed::Steps { steps: vec![] });
        assert_eq!(calls, 3);
    }
}
