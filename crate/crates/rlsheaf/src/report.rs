//! Validation reports and the crate-wide error type.
//!
//! Checkers certify or refute a property; each refutation carries a concrete
//! witness. Structural problems with the input (bad labels, wrong arity) are
//! `Error::Format` and never mix with mathematical failures.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Outcome of validating one object: a list of named checks plus free-form
/// notes (used for erratum diagnostics).
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: true,
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
        });
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl Into<String>) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness);
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn merge(&mut self, other: ValidationReport) {
        let prefix = other.subject;
        for c in other.checks {
            self.checks.push(Check {
                name: format!("{prefix}: {}", c.name),
                passed: c.passed,
                witness: c.witness,
            });
        }
        self.notes.extend(other.notes);
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.subject,
            if self.is_valid() { "valid" } else { "INVALID" }
        )?;
        for c in &self.checks {
            match &c.witness {
                Some(w) if !c.passed => writeln!(f, "  [fail] {} -- {}", c.name, w)?,
                _ => writeln!(f, "  [ ok ] {}", c.name)?,
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Error {
    /// Malformed input: unknown labels, wrong table arity, unparsable file.
    Format(String),
    /// A declared precondition does not hold (e.g. the given set is not a filter).
    Precondition(String),
    /// A configured enumeration budget was exceeded.
    Resource(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Format(m) => write!(f, "format error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
            Error::Resource(m) => write!(f, "resource budget exceeded: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration budgets. Every potentially exponential scan is bounded by one
/// of these and fails with `Error::Resource` instead of running away.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Largest algebra size admitted by the filter enumerator.
    pub filter_algebra: usize,
    /// Maximum number of open families considered when enumerating covers.
    pub cover_families: usize,
    /// Maximum size of a candidate space when enumerating sections.
    pub section_candidates: usize,
    /// Maximum number of tuples scanned by the equalizer / gluing checkers.
    pub tuple_scan: usize,
    /// Maximum number of nodes visited by morphism-space searches.
    pub morphism_search: usize,
    /// Maximum number of opens materialized for one space.
    pub opens: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            filter_algebra: 20,
            cover_families: 1 << 12,
            section_candidates: 1 << 20,
            tuple_scan: 1 << 20,
            morphism_search: 1 << 20,
            opens: 1 << 12,
        }
    }
}
