//! LTL satisfiability with lasso-shaped witnesses.
//!
//! `ltl_sat` runs formula → NNF → generalized Büchi automaton → emptiness
//! check, building the automaton only as far as the search needs it.
//! [`build_gba`] and [`find_accepting_lasso`] do the same in two passes over
//! the whole automaton. The [`Oracle`] trait is the boundary the decomposition talks to;
//! [`Engine`] is the in-process implementation and [`ExternalSolver`] talks to
//! a child process.

mod gba;
mod nnf;
mod oracle;

use thiserror::Error;

use crate::syntax::Formula;
use crate::trace::LassoTrace;

pub use gba::{build_gba, check_on_the_fly, find_accepting_lasso, Gba, Guard};
pub use nnf::{is_nnf, to_nnf};
pub use oracle::{ExternalSolver, Oracle, OracleError};

pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Unsat,
    Sat(LassoTrace),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn witness(&self) -> Option<&LassoTrace> {
        match self {
            SatResult::Sat(t) => Some(t),
            SatResult::Unsat => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("automaton exceeded the state cap of {cap}")]
    StateLimit { cap: usize },
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
    #[error("engine produced a witness that does not satisfy the query: {witness} ⊭ {formula}")]
    UnsoundWitness { formula: String, witness: String },
}

/// The in-process tableau engine. Each call builds a fresh automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    pub state_cap: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl Engine {
    pub fn with_state_cap(state_cap: usize) -> Self {
        Engine { state_cap }
    }

    pub fn ltl_sat(&self, f: &Formula) -> Result<SatResult, EngineError> {
        let result = check_on_the_fly(&to_nnf(f), self.state_cap)?;
        // the automaton checked its witness against the NNF; check the original too
        if let SatResult::Sat(t) = &result {
            if !crate::trace::eval(t, f, 0) {
                return Err(EngineError::UnsoundWitness {
                    formula: f.to_string(),
                    witness: t.to_string(),
                });
            }
        }
        Ok(result)
    }
}

/// [`Engine::ltl_sat`] with the default state cap.
pub fn ltl_sat(f: &Formula) -> Result<SatResult, EngineError> {
    Engine::default().ltl_sat(f)
}
