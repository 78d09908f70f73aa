//! Error and violation types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Which row of an instance a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRef {
    /// A reported preference row, by 0-based agent index.
    Agent(usize),
    /// The liar's true preference row.
    Truth,
}

impl fmt::Display for RowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowRef::Agent(i) => write!(f, "agent {}", i + 1),
            RowRef::Truth => write!(f, "truth"),
        }
    }
}

/// A single instance-invariant violation, with row/column coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A value outside the permitted open interval (0, 100).
    ValueOutOfRange { row: RowRef, col: usize, value: f64 },
    /// A row whose values do not sum to the limited-mode target.
    RowSum { row: RowRef, sum: f64, expected: f64, tolerance: f64 },
    /// A row with the wrong number of values.
    RowLength { row: RowRef, len: usize, expected: usize },
    /// A liar index outside 0..n.
    LiarIndex { liar: usize, agents: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ValueOutOfRange { row, col, value } => {
                write!(f, "{row}, resource {}: value {value} outside (0, 100)", col + 1)
            }
            Violation::RowSum { row, sum, expected, tolerance } => {
                write!(f, "{row}: values sum to {sum}, expected {expected} (tolerance {tolerance})")
            }
            Violation::RowLength { row, len, expected } => {
                write!(f, "{row}: {len} values, expected {expected}")
            }
            Violation::LiarIndex { liar, agents } => {
                write!(f, "liar index {} out of range for {agents} agents", liar + 1)
            }
        }
    }
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid instance: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{candidates} allocations to enumerate, exceeding the budget of {budget}")]
    Budget { candidates: u128, budget: u128 },
    #[error("renormalization infeasible: {0}")]
    Renormalize(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_refs_display_one_based() {
        assert_eq!(RowRef::Agent(0).to_string(), "agent 1");
        assert_eq!(RowRef::Truth.to_string(), "truth");
    }

    #[test]
    fn violations_display_coordinates() {
        let v = Violation::ValueOutOfRange { row: RowRef::Agent(2), col: 4, value: -1.0 };
        assert_eq!(v.to_string(), "agent 3, resource 5: value -1 outside (0, 100)");
    }

    #[test]
    fn validation_error_joins_all_violations() {
        let e = Error::Validation(vec![
            Violation::RowLength { row: RowRef::Agent(0), len: 9, expected: 10 },
            Violation::LiarIndex { liar: 4, agents: 4 },
        ]);
        let msg = e.to_string();
        assert!(msg.contains("agent 1: 9 values, expected 10"));
        assert!(msg.contains("liar index 5 out of range for 4 agents"));
    }
}
