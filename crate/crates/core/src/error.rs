use std::fmt;

use thiserror::Error;

/// The three index spaces of a money tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Sector,
    Agent,
    Time,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Sector, Axis::Agent, Axis::Time];

    pub fn index(self) -> usize {
        match self {
            Axis::Sector => 0,
            Axis::Agent => 1,
            Axis::Time => 2,
        }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            0 => Ok(Axis::Sector),
            1 => Ok(Axis::Agent),
            2 => Ok(Axis::Time),
            other => Err(Error::InvalidArgument(format!("invalid mode id {other}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Sector => "sector",
            Axis::Agent => "agent",
            Axis::Time => "period",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sector" | "0" => Ok(Axis::Sector),
            "agent" | "1" => Ok(Axis::Agent),
            "time" | "period" | "2" => Ok(Axis::Time),
            other => Err(Error::InvalidArgument(format!("invalid mode id `{other}`"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown {axis} label `{label}`")]
    UnknownLabel { axis: Axis, label: String },

    #[error("transaction {index}: {source}")]
    Transaction {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Malformed CSV input. Lines are 1-based and count the header.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: invalid value: {message}")]
    Validation { line: usize, message: String },

    #[error("missing roles [{}]; roles found: [{}]", missing.join(", "), found.join(", "))]
    MissingRole { missing: Vec<String>, found: Vec<String> },

    #[error("{path}: {message}")]
    Scenario { path: String, message: String },

    #[error("tensor json: {0}")]
    TensorJson(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
