//! Partitioning the system variables into minimal independent blocks.
//!
//! A set `W ⊆ S` is independent in `φ` exactly when
//! `φ'_W ∧ φ'_{S∖W} ∧ ¬φ` is unsatisfiable. [`Decomposer::partition`] grows
//! each block from a single variable, adding a variable `z` only once the
//! solver certifies that the block depends on it: `z` is locked to its primed
//! copy with `G (z <-> z')` until the query turns unsatisfiable.
//!
//! The guarantee is about traces (models of `φ`), not about winning
//! strategies; a block can be minimal here yet split further under
//! realisability.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{Oracle, OracleError, SatResult};
use crate::syntax::{dependence_query, lock_conjunct, Formula, ProjectionError, Signature, Spec};
use crate::trace::{compute_z, LassoTrace};

/// How "choose a variable" is resolved, both for the seed of each block and
/// for picking from the disagreement set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrder {
    /// Order of the `env:`/`sys:` declarations.
    #[default]
    Declaration,
    Lexicographic,
}

impl VarOrder {
    pub fn sort(self, vars: &mut [String], sig: &Signature) {
        match self {
            VarOrder::Declaration => vars.sort_by_key(|v| (sig.decl_index(v), v.clone())),
            VarOrder::Lexicographic => vars.sort(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    /// `φ'_{x} ∧ φ'_{S∖{x}} ∧ ¬φ` for a fresh seed `x`.
    Seed(String),
    /// The current query with one more `G (z <-> z')` conjunct.
    Lock(String),
    /// `φ'_W ∧ φ'_Y ∧ ¬φ` after `W` grew.
    Rebuild,
}

#[derive(Debug, Clone)]
pub struct QueryRecord {
    pub kind: QueryKind,
    pub formula: Formula,
    pub result: SatResult,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vars: Vec<String>,
    /// The unsatisfiable query that closed the block.
    pub certificate: Formula,
}

#[derive(Debug, Clone)]
pub struct PartitionResult {
    pub blocks: Vec<Block>,
    pub query_log: Vec<QueryRecord>,
    /// Satisfiable answers inside the block-growing loop whose disagreement
    /// set was checked to be nonempty.
    pub z_checks: usize,
}

impl PartitionResult {
    pub fn query_count(&self) -> usize {
        self.query_log.len()
    }

    /// Blocks with members in declaration order, sorted by their first
    /// member's declaration index.
    pub fn canonical_blocks(&self, sig: &Signature) -> Vec<Vec<String>> {
        let mut blocks: Vec<Vec<String>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut vars = b.vars.clone();
                VarOrder::Declaration.sort(&mut vars, sig);
                vars
            })
            .collect();
        blocks.sort_by_key(|b| b.first().and_then(|v| sig.decl_index(v)));
        blocks
    }
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("solver failed: {source}")]
    Oracle {
        source: OracleError,
        log: Vec<QueryRecord>,
    },
    #[error("satisfiable query produced an empty disagreement set (solver soundness bug): {query}")]
    EmptyDisagreement { query: String, log: Vec<QueryRecord> },
    #[error("blocks do not partition the system variables: {0}")]
    NotAPartition(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

impl DecomposeError {
    /// Queries answered before the failure.
    pub fn partial_log(&self) -> &[QueryRecord] {
        match self {
            DecomposeError::Oracle { log, .. } | DecomposeError::EmptyDisagreement { log, .. } => log,
            _ => &[],
        }
    }
}

/// Result of a single independence test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// A model of `φ'_W ∧ φ'_{S∖W} ∧ ¬φ`.
    Dependent(LassoTrace),
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

fn to_set(vars: &[String]) -> BTreeSet<String> {
    vars.iter().cloned().collect()
}

/// Decides whether `w` is independent in `phi` relative to system variables `sys`.
pub fn check_independent<O: Oracle + ?Sized>(
    oracle: &O,
    phi: &Formula,
    w: &BTreeSet<String>,
    sys: &BTreeSet<String>,
) -> Result<Independence, OracleError> {
    let rest: BTreeSet<String> = sys.difference(w).cloned().collect();
    let query = dependence_query(phi, w, &rest).expect("input formula has no primed atoms");
    Ok(match oracle.solve(&query)? {
        SatResult::Unsat => Independence::Independent,
        SatResult::Sat(t) => Independence::Dependent(t),
    })
}

/// Runs the partition algorithm, recording every solver query.
pub struct Decomposer<'a, O: ?Sized> {
    oracle: &'a O,
    signature: Signature,
    order: VarOrder,
    log: Vec<QueryRecord>,
    z_checks: usize,
}

impl<'a, O: Oracle + ?Sized> Decomposer<'a, O> {
    pub fn new(oracle: &'a O, signature: Signature, order: VarOrder) -> Self {
        Decomposer {
            oracle,
            signature,
            order,
            log: Vec::new(),
            z_checks: 0,
        }
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    fn solve(&mut self, kind: QueryKind, formula: Formula) -> Result<SatResult, DecomposeError> {
        let start = Instant::now();
        match self.oracle.solve(&formula) {
            Ok(result) => {
                self.log.push(QueryRecord {
                    kind,
                    formula,
                    result: result.clone(),
                    elapsed: start.elapsed(),
                });
                Ok(result)
            }
            Err(source) => Err(DecomposeError::Oracle {
                source,
                log: std::mem::take(&mut self.log),
            }),
        }
    }

    fn ordered(&self, vars: impl IntoIterator<Item = String>) -> Vec<String> {
        let mut v: Vec<String> = vars.into_iter().collect();
        self.order.sort(&mut v, &self.signature);
        v
    }

    /// Disagreement set of a satisfiable answer; empty is a soundness fault.
    fn disagreement(
        &mut self,
        witness: &LassoTrace,
        candidates: &[String],
        query: &Formula,
    ) -> Result<Vec<String>, DecomposeError> {
        self.z_checks += 1;
        let z = compute_z(witness, candidates);
        if z.is_empty() {
            return Err(DecomposeError::EmptyDisagreement {
                query: query.to_string(),
                log: std::mem::take(&mut self.log),
            });
        }
        Ok(z)
    }

    /// Splits `sys` into blocks that are independent in `phi`.
    pub fn partition(&mut self, phi: &Formula, sys: &[String]) -> Result<Vec<Block>, DecomposeError> {
        let mut remaining = self.ordered(sys.iter().cloned());
        let mut blocks = Vec::new();
        while let Some(x) = remaining.first().cloned() {
            let rest: Vec<String> = remaining[1..].to_vec();
            let seed = to_set(std::slice::from_ref(&x));
            let query = dependence_query(phi, &seed, &to_set(&rest))?;
            let block = if rest.is_empty() {
                // a lone variable is trivially independent of nothing else
                Block {
                    vars: vec![x],
                    certificate: query,
                }
            } else {
                match self.solve(QueryKind::Seed(x.clone()), query.clone())? {
                    SatResult::Unsat => Block {
                        vars: vec![x],
                        certificate: query,
                    },
                    SatResult::Sat(mu) => {
                        let z = self.disagreement(&mu, &rest, &query)?;
                        self.look_for_dependent_variables(phi, query, z, vec![x], rest)?
                    }
                }
            };
            remaining.retain(|v| !block.vars.contains(v));
            blocks.push(block);
        }
        Ok(blocks)
    }

    /// Grows `w` until `φ'_W ∧ φ'_Y ∧ ¬φ` is unsatisfiable.
    ///
    /// `query` must be the last satisfiable query and `z` the disagreement
    /// set of its witness over `y`. Each round locks variables of `z` one at
    /// a time; the variable whose lock makes the query unsatisfiable moves
    /// from `y` into `w`, and the query is rebuilt from `phi` without the
    /// locks.
    pub fn look_for_dependent_variables(
        &mut self,
        phi: &Formula,
        mut query: Formula,
        mut z: Vec<String>,
        mut w: Vec<String>,
        mut y: Vec<String>,
    ) -> Result<Block, DecomposeError> {
        loop {
            let chosen = loop {
                let candidate = self
                    .ordered(z.iter().cloned())
                    .into_iter()
                    .next()
                    .expect("disagreement set is nonempty");
                query = lock_conjunct(query, &candidate);
                match self.solve(QueryKind::Lock(candidate.clone()), query.clone())? {
                    SatResult::Unsat => break candidate,
                    SatResult::Sat(nu) => {
                        z = self.disagreement(&nu, &y, &query)?;
                    }
                }
            };
            w.push(chosen.clone());
            y.retain(|v| *v != chosen);
            query = dependence_query(phi, &to_set(&w), &to_set(&y))?;
            match self.solve(QueryKind::Rebuild, query.clone())? {
                SatResult::Sat(nu) => {
                    z = self.disagreement(&nu, &y, &query)?;
                }
                SatResult::Unsat => {
                    return Ok(Block {
                        vars: self.ordered(w),
                        certificate: query,
                    })
                }
            }
        }
    }

    pub fn finish(self, blocks: Vec<Block>) -> PartitionResult {
        PartitionResult {
            blocks,
            query_log: self.log,
            z_checks: self.z_checks,
        }
    }
}

/// Partitions the system variables of `spec`.
pub fn partition<O: Oracle + ?Sized>(
    spec: &Spec,
    oracle: &O,
    order: VarOrder,
) -> Result<PartitionResult, DecomposeError> {
    let mut d = Decomposer::new(oracle, spec.signature.clone(), order);
    let blocks = d.partition(&spec.formula, spec.sys())?;
    check_partition(&blocks, spec.sys())?;
    Ok(d.finish(blocks))
}

/// Blocks must be nonempty, pairwise disjoint, and cover `sys` exactly.
pub fn check_partition(blocks: &[Block], sys: &[String]) -> Result<(), DecomposeError> {
    let mut seen = BTreeSet::new();
    for b in blocks {
        if b.vars.is_empty() {
            return Err(DecomposeError::NotAPartition("empty block".into()));
        }
        for v in &b.vars {
            if !seen.insert(v.clone()) {
                return Err(DecomposeError::NotAPartition(format!("`{v}` is in two blocks")));
            }
        }
    }
    if seen != to_set(sys) {
        return Err(DecomposeError::NotAPartition(
            "blocks do not cover the system variables".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditKind {
    /// The block's own certificate re-solves to Unsat.
    Certificate,
    /// The block is independent with respect to all of S.
    Soundness,
    /// A nonempty proper subset of the block is dependent.
    Minimality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditOutcome {
    Pass,
    /// The dependence witness for a failed soundness check, if any.
    Fail(Option<LassoTrace>),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditCheck {
    pub kind: AuditKind,
    pub block: Vec<String>,
    /// The variable set whose dependence query was solved.
    pub subset: Vec<String>,
    pub outcome: AuditOutcome,
}

impl AuditCheck {
    pub fn passed(&self) -> bool {
        self.outcome == AuditOutcome::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    pub minimality: bool,
    /// Blocks larger than this are skipped by the minimality audit.
    pub max_minimality_block: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            minimality: false,
            max_minimality_block: 6,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
    /// Blocks skipped by the minimality audit because of their size.
    pub skipped: Vec<Vec<String>>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AuditCheck::passed)
    }

    pub fn of_kind(&self, kind: AuditKind) -> impl Iterator<Item = &AuditCheck> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }
}

/// Nonempty proper subsets of `block`, smallest first.
fn proper_subsets(block: &[String]) -> Vec<Vec<String>> {
    let n = block.len();
    let mut out: Vec<Vec<String>> = (1u64..(1u64 << n) - 1)
        .map(|mask| {
            block
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect();
    out.sort_by_key(Vec::len);
    out
}

/// Re-checks a partition: every certificate and every block's dependence
/// query must be Unsat, and (optionally) every nonempty proper subset of a
/// block must be dependent. Solver errors are recorded per check. Checks
/// run in parallel.
pub fn verify_partition<O: Oracle + ?Sized>(
    spec: &Spec,
    result: &PartitionResult,
    oracle: &O,
    options: AuditOptions,
) -> AuditReport {
    let sys = spec.signature.sys_set();
    let phi = &spec.formula;

    enum Job<'r> {
        Certificate(&'r Block),
        Query(AuditKind, Vec<String>, Vec<String>),
    }
    let mut jobs: Vec<Job> = Vec::new();
    let mut skipped = Vec::new();
    for block in &result.blocks {
        jobs.push(Job::Certificate(block));
        jobs.push(Job::Query(AuditKind::Soundness, block.vars.clone(), block.vars.clone()));
        if options.minimality {
            if block.vars.len() > options.max_minimality_block {
                skipped.push(block.vars.clone());
                continue;
            }
            for subset in proper_subsets(&block.vars) {
                jobs.push(Job::Query(AuditKind::Minimality, block.vars.clone(), subset));
            }
        }
    }

    let checks = jobs
        .into_par_iter()
        .map(|job| match job {
            Job::Certificate(block) => {
                let outcome = match oracle.solve(&block.certificate) {
                    Ok(SatResult::Unsat) => AuditOutcome::Pass,
                    Ok(SatResult::Sat(t)) => AuditOutcome::Fail(Some(t)),
                    Err(e) => AuditOutcome::Error(e.to_string()),
                };
                AuditCheck {
                    kind: AuditKind::Certificate,
                    block: block.vars.clone(),
                    subset: block.vars.clone(),
                    outcome,
                }
            }
            Job::Query(kind, block, subset) => {
                let outcome = match check_independent(oracle, phi, &to_set(&subset), &sys) {
                    Ok(Independence::Independent) if kind == AuditKind::Soundness => {
                        AuditOutcome::Pass
                    }
                    Ok(Independence::Dependent(t)) if kind == AuditKind::Soundness => {
                        AuditOutcome::Fail(Some(t))
                    }
                    Ok(Independence::Dependent(_)) => AuditOutcome::Pass,
                    Ok(Independence::Independent) => AuditOutcome::Fail(None),
                    Err(e) => AuditOutcome::Error(e.to_string()),
                };
                AuditCheck {
                    kind,
                    block,
                    subset,
                    outcome,
                }
            }
        })
        .collect();

    AuditReport { checks, skipped }
}
