use std::time::{Duration, Instant};

use crate::formula::FormulaError;
use crate::model::ModelError;

/// Failure of a model-checking run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("timed out")]
    Timeout,
}

/// Cooperative time limit, polled inside solver loops.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Deadline {
        Deadline(None)
    }

    pub fn after(limit: Duration) -> Deadline {
        Deadline(Instant::now().checked_add(limit))
    }

    pub fn at(instant: Instant) -> Deadline {
        Deadline(Some(instant))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> Result<(), CheckError> {
        if self.expired() {
            Err(CheckError::Timeout)
        } else {
            Ok(())
        }
    }
}
