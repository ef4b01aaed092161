//! Structured pass/fail records.
//!
//! A [`VerdictReport`] starts out passing. The only way to make it fail is
//! [`VerdictReport::violation`], which also records the counterexample, so a
//! failing report always carries at least one witness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisUnsatisfied,
    Error,
}

impl Status {
    /// Severity used when combining sections: error > fail > pass/vacuous.
    fn rank(self) -> u8 {
        match self {
            Status::Pass | Status::HypothesisUnsatisfied => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn is_failure(self) -> bool {
        self.rank() > 0
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisUnsatisfied => "hypothesis-unsatisfied",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// `violation` for counterexamples, `certificate` for supporting evidence.
    pub kind: WitnessKind,
    pub detail: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Violation,
    Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub check_name: String,
    /// The mathematical statement this check certifies.
    pub statement: String,
    pub status: Status,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Computed quantities (bounds, intersections, deltas, ...).
    #[serde(default)]
    pub facts: BTreeMap<String, Value>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<VerdictReport>,
}

/// Reports keep at most this many violation witnesses; the total is kept in
/// the `violations` fact.
pub const MAX_WITNESSES: usize = 16;

impl VerdictReport {
    pub fn new(check_name: impl Into<String>, statement: impl Into<String>) -> Self {
        VerdictReport {
            check_name: check_name.into(),
            statement: statement.into(),
            status: Status::Pass,
            witnesses: Vec::new(),
            tolerances: BTreeMap::new(),
            facts: BTreeMap::new(),
            notes: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_owned(), value);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn fact(&mut self, name: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.facts.insert(name.to_owned(), value);
    }

    /// Records a counterexample and marks the report failed.
    pub fn violation(&mut self, detail: Value) {
        let count = self.violation_count() + 1;
        self.facts.insert("violations".into(), Value::from(count));
        if self.status != Status::Error {
            self.status = Status::Fail;
        }
        if self
            .witnesses
            .iter()
            .filter(|w| w.kind == WitnessKind::Violation)
            .count()
            < MAX_WITNESSES
        {
            self.witnesses.push(Witness {
                kind: WitnessKind::Violation,
                detail,
            });
        }
    }

    pub fn certificate(&mut self, detail: Value) {
        self.witnesses.push(Witness {
            kind: WitnessKind::Certificate,
            detail,
        });
    }

    pub fn violation_count(&self) -> u64 {
        self.facts
            .get("violations")
            .and_then(Value::as_u64)
            .unwrap_or(0)
    }

    /// Marks the check vacuous: its hypothesis does not hold on this input.
    pub fn hypothesis_unsatisfied(&mut self, reason: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::HypothesisUnsatisfied;
        }
        self.notes.push(reason.into());
    }

    /// Records an error that prevented the check from completing.
    pub fn error(&mut self, message: impl Into<String>) {
        self.status = Status::Error;
        self.notes.push(message.into());
    }

    /// Appends a sub-report, folding its status into this one.
    pub fn push_section(&mut self, section: VerdictReport) {
        if section.status.rank() > self.status.rank() {
            self.status = section.status;
        }
        self.sections.push(section);
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn violations(&self) -> impl Iterator<Item = &Value> {
        self.witnesses
            .iter()
            .filter(|w| w.kind == WitnessKind::Violation)
            .map(|w| &w.detail)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    /// Renders a compact, human-readable table of this report and its sections.
    pub fn table(&self) -> String {
        let mut out = String::new();
        self.write_rows(&mut out, 0);
        out
    }

    fn write_rows(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let name = format!("{}{}", "  ".repeat(depth), self.check_name);
        let _ = writeln!(out, "{name:<44} {:<24} {}", self.status, self.statement);
        for w in self.violations().take(3) {
            let _ = writeln!(out, "{}  ! {w}", "  ".repeat(depth));
        }
        for s in &self.sections {
            s.write_rows(out, depth + 1);
        }
    }
}
