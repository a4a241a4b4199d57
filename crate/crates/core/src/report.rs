use std::fmt;

use serde::Serialize;

/// One expected-vs-computed comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<EntryMismatch>,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Check {
        let expected = expected.to_string();
        let computed = computed.to_string();
        Check {
            name: name.into(),
            passed: expected == computed,
            expected,
            computed,
            mismatches: Vec::new(),
        }
    }

    pub fn with_verdict(
        name: impl Into<String>,
        expected: impl ToString,
        computed: impl ToString,
        passed: bool,
    ) -> Check {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            passed,
            mismatches: Vec::new(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok  " } else { "FAIL" };
        write!(
            f,
            "[{mark}] {}: expected {}, computed {}",
            self.name, self.expected, self.computed
        )?;
        for m in &self.mismatches {
            write!(
                f,
                "\n         at ({}, {}): expected {}, found {}",
                m.row, m.col, m.expected, m.found
            )?;
        }
        Ok(())
    }
}

/// A single failing entry of an entrywise identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

/// Collects entry mismatches, keeping only the first few but counting all.
#[derive(Debug, Default)]
pub(crate) struct MismatchLog {
    pub kept: Vec<EntryMismatch>,
    pub total: usize,
}

impl MismatchLog {
    const KEEP: usize = 10;

    pub fn push(&mut self, row: usize, col: usize, expected: impl ToString, found: impl ToString) {
        self.total += 1;
        if self.kept.len() < Self::KEEP {
            self.kept.push(EntryMismatch {
                row,
                col,
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
    }
}
