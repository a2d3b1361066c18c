use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

/// Result of one command, rendered as text or as the JSON envelope.
#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub failures: Vec<String>,
    /// Human-readable lines for the text format.
    pub lines: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'static str,
    command: &'a str,
    inputs: &'a Value,
    results: &'a Value,
    failures: &'a [String],
    elapsed_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Value) -> Report {
        Report {
            command: command.into(),
            inputs,
            results: json!(null),
            ..Report::default()
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn fail(&mut self, text: impl Into<String>) {
        self.failures.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn write(&self, json: bool, out: &mut impl Write) -> io::Result<()> {
        if json {
            let env = Envelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                command: &self.command,
                inputs: &self.inputs,
                results: &self.results,
                failures: &self.failures,
                elapsed_ms: self.elapsed_ms,
            };
            serde_json::to_writer_pretty(&mut *out, &env)?;
            writeln!(out)
        } else {
            for l in &self.lines {
                writeln!(out, "{l}")?;
            }
            for f in &self.failures {
                writeln!(out, "FAILED: {f}")?;
            }
            let status = if self.passed() { "ok" } else { "failed" };
            writeln!(out, "{}: {status} ({} failures)", self.command, self.failures.len())
        }
    }
}
