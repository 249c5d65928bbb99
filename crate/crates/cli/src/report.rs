use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

/// One measured quantity against its threshold. A check passes when the value
/// is finite and at most the threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), value, threshold, pass: value.is_finite() && value <= threshold, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub environment: Environment,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            sigma: None,
            lambda: None,
            pass: true,
            checks: Vec::new(),
            data: BTreeMap::new(),
            environment: Environment {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                timestamp,
                timings_ms: BTreeMap::new(),
            },
        }
    }

    pub fn push(&mut self, check: Check) {
        log::info!(
            "{}: {:e} (threshold {:e}) {}",
            check.name,
            check.value,
            check.threshold,
            if check.pass { "ok" } else { "FAILED" }
        );
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.data.insert(key.to_string(), v);
    }

    /// Runs `f` and records its wall time under `name`.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.environment.timings_ms.insert(name.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// The report with the run-dependent fields (timestamp and timings) cleared.
    pub fn without_run_fields(&self) -> Self {
        let mut r = self.clone();
        r.environment.timestamp = 0;
        r.environment.timings_ms.clear();
        r
    }
}
