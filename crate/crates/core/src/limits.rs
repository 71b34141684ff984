//! Resource limits shared by the quantifier-manipulation subroutines.
//!
//! The procedures are non-elementary in the worst case; rather than hang,
//! every enumeration checks its size against these limits up front and
//! reports a structured error.

use std::time::Instant;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Cap on the members any single cover or worklist may reach.
    pub max_disjuncts: u64,
    /// Cap on the bit length of any coefficient, constant or modulus.
    pub max_coeff_bits: u64,
    /// Wall-clock budget for one solve.
    pub max_seconds: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_disjuncts: 1_000_000,
            max_coeff_bits: 1_000_000,
            max_seconds: 300,
        }
    }
}

#[derive(Clone, Debug, Error)]
pub enum SolveError {
    #[error("resource limit exceeded: {reason}")]
    ResourceExceeded {
        reason: String,
        /// Trace events recorded up to the point of failure, serialized;
        /// empty outside the engine.
        partial_trace: Vec<serde_json::Value>,
    },
}

impl SolveError {
    pub fn exceeded(reason: impl Into<String>) -> SolveError {
        SolveError::ResourceExceeded {
            reason: reason.into(),
            partial_trace: Vec::new(),
        }
    }

    /// Attaches the trace collected so far to a propagating error.
    pub fn with_trace(self, trace: Vec<serde_json::Value>) -> SolveError {
        match self {
            SolveError::ResourceExceeded { reason, .. } => SolveError::ResourceExceeded {
                reason,
                partial_trace: trace,
            },
        }
    }
}

/// Deadline handle threaded through the subroutines.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: Instant,
    budget_secs: u64,
}

impl Deadline {
    pub fn new(limits: &Limits) -> Deadline {
        Deadline {
            start: Instant::now(),
            budget_secs: limits.max_seconds,
        }
    }

    pub fn check(&self) -> Result<(), SolveError> {
        if self.start.elapsed().as_secs() >= self.budget_secs {
            Err(SolveError::exceeded(format!(
                "time budget of {}s exhausted",
                self.budget_secs
            )))
        } else {
            Ok(())
        }
    }
}

/// Guards a prospective enumeration size against `max_disjuncts`.
pub fn check_count(limits: &Limits, count: &BigInt, what: &str) -> Result<(), SolveError> {
    if count > &BigInt::from(limits.max_disjuncts) {
        Err(SolveError::exceeded(format!(
            "{what} would produce {count} members (cap {})",
            limits.max_disjuncts
        )))
    } else {
        Ok(())
    }
}

/// Guards coefficient growth against `max_coeff_bits`.
pub fn check_bits(limits: &Limits, value: &BigInt, what: &str) -> Result<(), SolveError> {
    if value.bits() > limits.max_coeff_bits {
        Err(SolveError::exceeded(format!(
            "{what} reached {} bits (cap {})",
            value.bits(),
            limits.max_coeff_bits
        )))
    } else {
        Ok(())
    }
}
