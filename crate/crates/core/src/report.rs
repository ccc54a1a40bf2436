//! Machine-readable verdict reports.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// Outcome of one command. Serialized with sorted keys, so equal reports
/// produce byte-equal documents.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// A boolean verdict or a computed value.
    pub verdict: Value,
    pub witness: Option<Value>,
    /// Caps and budgets in force.
    pub bounds: Map<String, Value>,
    pub details: Map<String, Value>,
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: impl Into<Value>) -> Self {
        Report {
            command: command.into(),
            verdict: verdict.into(),
            witness: None,
            bounds: Map::new(),
            details: Map::new(),
            timing_ms: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<Value>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn bound(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.bounds.insert(key.to_string(), value.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// `Some(b)` for a boolean verdict.
    pub fn verdict_bool(&self) -> Option<bool> {
        self.verdict.as_bool()
    }

    fn value(&self, with_timing: bool) -> Value {
        let mut v = json!({
            "bounds": self.bounds,
            "command": self.command,
            "details": self.details,
            "verdict": self.verdict,
            "witness": self.witness,
        });
        if with_timing {
            v["timing_ms"] = json!(self.timing_ms);
        }
        v
    }

    /// Canonical JSON document.
    pub fn to_machine(&self) -> String {
        format!("{}\n", serde_json::to_string_pretty(&self.value(true)).expect("report serializes"))
    }

    /// Canonical JSON without the timing field.
    pub fn to_machine_untimed(&self) -> String {
        format!("{}\n", serde_json::to_string_pretty(&self.value(false)).expect("report serializes"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = match &self.verdict {
            Value::Bool(b) => b.to_string(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let _ = writeln!(out, "{}: {}", self.command, verdict);
        if let Some(w) = &self.witness {
            match w {
                Value::String(s) => {
                    let _ = writeln!(out, "witness: {s}");
                }
                other => {
                    let _ = writeln!(out, "witness:\n{}", serde_json::to_string_pretty(other).expect("json"));
                }
            }
        }
        for (k, v) in &self.details {
            let _ = writeln!(out, "{k}: {}", compact(v));
        }
        if !self.bounds.is_empty() {
            let bounds: Vec<String> = self.bounds.iter().map(|(k, v)| format!("{k}={}", compact(v))).collect();
            let _ = writeln!(out, "bounds: {}", bounds.join(" "));
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(out, "time: {t} ms");
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
