//! Chat-completion client.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{complete_with_retries, Reasoner, ReasonerError, ReasonerReply, ReasonerRequest, DEFAULT_RETRIES};

const SYSTEM_PROMPT: &str = "You are a household robot assistant. Answer with JSON only.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    pub timeout_secs: u64,
    pub temperature: f64,
    pub retries: usize,
    pub max_in_flight: usize,
    pub system_prompt: String,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "gpt-4o".to_string(),
            api_key_env: Some("OPENAI_API_KEY".to_string()),
            timeout_secs: 60,
            temperature: 0.0,
            retries: DEFAULT_RETRIES,
            max_in_flight: 4,
            system_prompt: SYSTEM_PROMPT.to_string(),
        }
    }
}

/// Counting gate limiting concurrent requests.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

pub struct HttpReasoner {
    cfg: HttpConfig,
    client: reqwest::blocking::Client,
    gate: Gate,
}

impl HttpReasoner {
    pub fn new(cfg: HttpConfig) -> Result<Self, ReasonerError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| ReasonerError::Unavailable(e.to_string()))?;
        let gate = Gate {
            free: Mutex::new(cfg.max_in_flight.max(1)),
            cv: Condvar::new(),
        };
        Ok(HttpReasoner { cfg, client, gate })
    }

    pub fn config(&self) -> &HttpConfig {
        &self.cfg
    }

    fn call(&self, prompt: &str) -> Result<String, String> {
        let body = json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                {"role": "system", "content": self.cfg.system_prompt},
                {"role": "user", "content": prompt},
            ],
        });
        let mut req = self.client.post(&self.cfg.endpoint).json(&body);
        if let Some(key) = self.cfg.api_key_env.as_deref().and_then(|v| std::env::var(v).ok()) {
            req = req.bearer_auth(key);
        }
        let _slot = self.gate.acquire();
        let resp = req.send().map_err(|e| e.to_string())?;
        let status = resp.status();
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        let v: Value = resp.json().map_err(|e| e.to_string())?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| "response has no message content".to_string())
    }
}

impl Reasoner for HttpReasoner {
    fn complete(&self, request: &ReasonerRequest) -> Result<ReasonerReply, ReasonerError> {
        let prompt = request.render()?;
        complete_with_retries(request.template, self.cfg.retries, || self.call(&prompt))
    }
}
