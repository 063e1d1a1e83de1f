use std::io::Write;
use std::process::{Command, Stdio};

use thiserror::Error;

use super::{Engine, EngineError, SatResult};
use crate::syntax::Formula;
use crate::trace::{eval, parse_trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("failed to run external solver `{command}`: {message}")]
    Spawn { command: String, message: String },
    #[error("external solver exited with {status}: {stderr}")]
    ChildFailed { status: String, stderr: String },
    #[error("malformed external solver output: {0}")]
    Malformed(String),
    #[error("external witness {witness} does not satisfy {formula}")]
    WitnessRejected { formula: String, witness: String },
}

impl OracleError {
    /// Resource exhaustion or solver failure, as opposed to a soundness fault.
    pub fn is_resource_failure(&self) -> bool {
        !matches!(
            self,
            OracleError::Engine(EngineError::UnsoundWitness { .. })
        )
    }
}

/// Something that decides LTL satisfiability and hands back a model.
///
/// Every `Sat` witness returned must satisfy the queried formula at
/// position 0.
pub trait Oracle: Sync {
    fn solve(&self, f: &Formula) -> Result<SatResult, OracleError>;
}

impl Oracle for Engine {
    fn solve(&self, f: &Formula) -> Result<SatResult, OracleError> {
        Ok(self.ltl_sat(f)?)
    }
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn solve(&self, f: &Formula) -> Result<SatResult, OracleError> {
        (**self).solve(f)
    }
}

/// Runs a solver as a child process per query.
///
/// The child reads one formula plus newline on stdin and answers `UNSAT` or
/// `SAT` followed by one trace line on stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args,
        }
    }

    /// Splits a command line on whitespace; `None` if it is blank.
    pub fn from_command_line(cmd: &str) -> Option<Self> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(ExternalSolver::new(program, parts.collect()))
    }

    fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Parses the child's stdout into a verdict, without checking the witness.
pub(crate) fn parse_response(stdout: &str) -> Result<SatResult, OracleError> {
    let mut lines = stdout.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("UNSAT") => Ok(SatResult::Unsat),
        Some("SAT") => {
            let line = lines
                .next()
                .ok_or_else(|| OracleError::Malformed("SAT without a trace line".into()))?;
            parse_trace(line)
                .map(SatResult::Sat)
                .map_err(|e| OracleError::Malformed(e.to_string()))
        }
        Some(other) => Err(OracleError::Malformed(format!(
            "expected SAT or UNSAT, got `{other}`"
        ))),
        None => Err(OracleError::Malformed("empty output".into())),
    }
}

impl Oracle for ExternalSolver {
    fn solve(&self, f: &Formula) -> Result<SatResult, OracleError> {
        let spawn_err = |e: std::io::Error| OracleError::Spawn {
            command: self.command_line(),
            message: e.to_string(),
        };
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_err)?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            // a child that exits without reading is reported through its status
            let _ = writeln!(stdin, "{f}");
        }
        let out = child.wait_with_output().map_err(spawn_err)?;
        if !out.status.success() {
            return Err(OracleError::ChildFailed {
                status: out.status.to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        let stdout = String::from_utf8(out.stdout)
            .map_err(|_| OracleError::Malformed("output is not UTF-8".into()))?;
        let result = parse_response(&stdout)?;
        if let SatResult::Sat(t) = &result {
            if !eval(t, f, 0) {
                return Err(OracleError::WitnessRejected {
                    formula: f.to_string(),
                    witness: t.to_string(),
                });
            }
        }
        Ok(result)
    }
}
