use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ring::Command;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A label outside the range of the ring's labelling map. This is the oracle's ⊥.
    #[error("invalid element label")]
    InvalidLabel,
    /// `invert` on a non-unit. Also ⊥.
    #[error("element is not a unit")]
    NotInvertible,
    #[error("ring command {0:?} is not supported by this family")]
    Unsupported(Command),
    #[error("command {cmd:?} takes {expected} argument(s), got {got}")]
    Arity { cmd: Command, expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("protocol aborted: {0}")]
    Abort(Abort),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("circuit error: {0}")]
    Circuit(String),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    /// True for the errors the ring oracle reports as ⊥.
    pub fn is_bottom(&self) -> bool {
        matches!(self, Error::InvalidLabel | Error::NotInvertible)
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, Error::Abort(_))
    }
}

/// Structured abort report: which stage failed and which parties complained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abort {
    pub stage: String,
    pub complainers: Vec<usize>,
    pub reason: String,
}

impl Abort {
    pub fn new(stage: impl Into<String>, reason: impl Into<String>) -> Self {
        Abort { stage: stage.into(), complainers: Vec::new(), reason: reason.into() }
    }

    pub fn with_complainers(mut self, complainers: Vec<usize>) -> Self {
        self.complainers = complainers;
        self
    }
}

impl fmt::Display for Abort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage, self.reason)?;
        if !self.complainers.is_empty() {
            write!(f, " (complaints from {:?})", self.complainers)?;
        }
        Ok(())
    }
}

impl From<Abort> for Error {
    fn from(a: Abort) -> Self {
        Error::Abort(a)
    }
}
