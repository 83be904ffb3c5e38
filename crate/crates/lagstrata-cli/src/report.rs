//! Report pieces: assertions with expected values and provenance, grouped into sections.

use lagstrata::Error;
use serde_json::{json, Value};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Stated in the source mathematics.
    Paper,
    /// Computed by an independent oracle.
    Derived,
    /// Forced by definitions.
    Trivial,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Paper => "paper",
            Source::Derived => "derived",
            Source::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub source: Source,
    pub passed: bool,
}

impl Assertion {
    pub fn equal(name: impl Into<String>, expected: impl Into<Value>, actual: impl Into<Value>, source: Source) -> Self {
        let (expected, actual) = (expected.into(), actual.into());
        let passed = expected == actual;
        Assertion { name: name.into(), expected, actual, source, passed }
    }

    pub fn holds(name: impl Into<String>, value: bool, source: Source) -> Self {
        Assertion::equal(name, true, value, source)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "expected": self.expected,
            "actual": self.actual,
            "source": self.source.as_str(),
            "passed": self.passed,
        })
    }
}

/// The outcome of one experiment: a results object and the assertions made about it.
#[derive(Clone, Debug, Default)]
pub struct Section {
    pub results: serde_json::Map<String, Value>,
    pub assertions: Vec<Assertion>,
    pub budget_exhausted: bool,
}

impl Section {
    pub fn new() -> Self {
        Section::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, assertion: Assertion) {
        self.assertions.push(assertion);
    }

    /// Records a library error: budget and retry exhaustion set the budget flag, anything
    /// else becomes a failed assertion.
    pub fn absorb(&mut self, context: &str, error: Error) {
        match error {
            Error::BudgetExceeded(_) | Error::RetriesExhausted(_) => self.budget_exhausted = true,
            _ => {}
        }
        self.assertions.push(Assertion {
            name: format!("{context} completes"),
            expected: Value::from("ok"),
            actual: Value::from(error.to_string()),
            source: Source::Trivial,
            passed: false,
        });
    }

    pub fn passed(&self) -> bool {
        !self.budget_exhausted && self.assertions.iter().all(|a| a.passed)
    }

    /// Merges another section under `key`, prefixing its assertion names.
    pub fn nest(&mut self, key: &str, other: Section) {
        self.results.insert(key.to_string(), Value::Object(other.results));
        self.assertions.extend(other.assertions.into_iter().map(|mut a| {
            a.name = format!("{key}: {}", a.name);
            a
        }));
        self.budget_exhausted |= other.budget_exhausted;
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }
}
