//! Text and machine (JSON) rendering of command results.

use mirrorext_core::{Check, CheckReport};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// Everything a command wants to say, independent of the output format.
#[derive(Debug, Default)]
pub struct Rendered {
    pub command: &'static str,
    pub report: CheckReport,
    /// Free-form lines shown after the report in text mode.
    pub notes: Vec<String>,
    /// Structured result for machine mode.
    pub result: Map<String, Value>,
}

impl Rendered {
    pub fn new(command: &'static str) -> Self {
        Rendered {
            command,
            ..Rendered::default()
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.result.insert(String::from(key), value);
    }

    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self, quiet: bool) -> String {
        let mut out = String::new();
        if !quiet {
            out.push_str(&self.report.to_string());
            for n in &self.notes {
                out.push_str(n);
                out.push('\n');
            }
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.command,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }

    pub fn to_machine(&self) -> String {
        let value = json!({
            "command": self.command,
            "passed": self.passed(),
            "exit_code": self.exit_code(),
            "checks": self.report.checks().iter().map(check_json).collect::<Vec<_>>(),
            "result": Value::Object(self.result.clone()),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn check_json(c: &Check) -> Value {
    json!({
        "code": c.code,
        "name": c.name,
        "outcome": c.outcome.to_string(),
        "detail": c.detail,
        "offenders": c.offenders,
    })
}
