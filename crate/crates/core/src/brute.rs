//! Brute-force reference semantics: bounded lasso enumeration and explicit
//! finite trace sets with projection and join.
//!
//! Nothing here is used by the decomposition itself. It exists so the
//! automaton engine and the set algebra can be cross-checked against
//! something too simple to be wrong.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{AtomId, Formula};
use crate::trace::{eval, LassoTrace, State, TraceError};

/// Largest number of candidate lassos a single [`bounded_sat`] call may try.
pub const ENUMERATION_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    #[error("{candidates} candidate traces exceed the enumeration budget of {budget}")]
    Budget { candidates: u128, budget: u64 },
    #[error("trace sets have different shapes {0:?} and {1:?}; align them first")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("trace sets disagree on the environment variables")]
    EnvMismatch,
    #[error("trace {trace} does not fit the set: {reason}")]
    BadTrace { trace: String, reason: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// First lasso of exactly this shape (in enumeration order) satisfying `f`,
/// over the atoms of `f`.
pub fn bounded_sat(f: &Formula, prefix_len: usize, loop_len: usize) -> Result<Option<LassoTrace>, BruteError> {
    if loop_len == 0 {
        return Err(TraceError::EmptyLoop.into());
    }
    let atoms: Vec<AtomId> = f.atoms().into_iter().collect();
    let positions = prefix_len + loop_len;
    let bits = atoms.len() * positions;
    let candidates = 1u128.checked_shl(bits as u32).unwrap_or(u128::MAX);
    if bits >= 64 || candidates > ENUMERATION_BUDGET as u128 {
        return Err(BruteError::Budget {
            candidates,
            budget: ENUMERATION_BUDGET,
        });
    }
    let k = atoms.len();
    for mask in 0..(1u64 << bits) {
        let state = |pos: usize| -> State {
            atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> (pos * k + j) & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        };
        let t = LassoTrace::new(
            (0..prefix_len).map(state).collect(),
            (prefix_len..positions).map(state).collect(),
        )?;
        if eval(&t, f, 0) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Tries every shape with prefix `0..=max_prefix` and loop `1..=max_loop`.
pub fn bounded_sat_up_to(f: &Formula, max_prefix: usize, max_loop: usize) -> Result<Option<LassoTrace>, BruteError> {
    for p in 0..=max_prefix {
        for l in 1..=max_loop {
            if let Some(t) = bounded_sat(f, p, l)? {
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}

/// An explicit finite set of lassos, all of one shape, over the environment
/// variables plus the system variables `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    env: BTreeSet<String>,
    vars: BTreeSet<String>,
    shape: (usize, usize),
    traces: BTreeSet<LassoTrace>,
}

impl TraceSet {
    pub fn new(
        env: BTreeSet<String>,
        vars: BTreeSet<String>,
        shape: (usize, usize),
        traces: impl IntoIterator<Item = LassoTrace>,
    ) -> Result<Self, BruteError> {
        if shape.1 == 0 {
            return Err(TraceError::EmptyLoop.into());
        }
        let traces: BTreeSet<LassoTrace> = traces.into_iter().collect();
        for t in &traces {
            let bad = |reason: String| BruteError::BadTrace {
                trace: t.to_string(),
                reason,
            };
            if t.shape() != shape {
                return Err(bad(format!("shape {:?} is not {:?}", t.shape(), shape)));
            }
            if let Some(a) = t
                .alphabet()
                .into_iter()
                .find(|a| a.primed || !(env.contains(&a.base) || vars.contains(&a.base)))
            {
                return Err(bad(format!("atom `{a}` is outside the variable set")));
            }
        }
        Ok(TraceSet {
            env,
            vars,
            shape,
            traces,
        })
    }

    pub fn empty(env: BTreeSet<String>, vars: BTreeSet<String>, shape: (usize, usize)) -> Self {
        TraceSet {
            env,
            vars,
            shape,
            traces: BTreeSet::new(),
        }
    }

    pub fn env(&self) -> &BTreeSet<String> {
        &self.env
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn traces(&self) -> &BTreeSet<LassoTrace> {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, t: &LassoTrace) -> bool {
        self.traces.contains(t)
    }

    pub fn is_subset(&self, other: &TraceSet) -> bool {
        self.traces.is_subset(&other.traces)
    }

    /// Same traces re-expressed with a longer prefix and a loop that is a
    /// multiple of the current one.
    pub fn reshape(&self, prefix_len: usize, loop_len: usize) -> Result<TraceSet, BruteError> {
        let traces = self
            .traces
            .iter()
            .map(|t| t.reshape(prefix_len, loop_len))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if loop_len == 0 || prefix_len < self.shape.0 || !loop_len.is_multiple_of(self.shape.1) {
            return Err(TraceError::BadShape {
                from_prefix: self.shape.0,
                from_loop: self.shape.1,
                to_prefix: prefix_len,
                to_loop: loop_len,
            }
            .into());
        }
        Ok(TraceSet {
            env: self.env.clone(),
            vars: self.vars.clone(),
            shape: (prefix_len, loop_len),
            traces,
        })
    }
}

fn restrict(s: &State, keep: impl Fn(&str) -> bool) -> State {
    s.iter().filter(|a| keep(&a.base)).cloned().collect()
}

/// Element-wise projection onto the environment plus `w`.
pub fn set_project(sigma: &TraceSet, w: &BTreeSet<String>) -> TraceSet {
    let vars: BTreeSet<String> = sigma.vars.intersection(w).cloned().collect();
    let keep = |b: &str| sigma.env.contains(b) || vars.contains(b);
    let traces = sigma
        .traces
        .iter()
        .map(|t| t.map_states(|s| restrict(s, keep)))
        .collect();
    TraceSet {
        env: sigma.env.clone(),
        vars,
        shape: sigma.shape,
        traces,
    }
}

/// Every trace over the union of both variable sets whose projections lie
/// in `s1` and `s2`. Both sets must share the environment and the shape.
pub fn set_join(s1: &TraceSet, s2: &TraceSet) -> Result<TraceSet, BruteError> {
    if s1.env != s2.env {
        return Err(BruteError::EnvMismatch);
    }
    if s1.shape != s2.shape {
        return Err(BruteError::ShapeMismatch(s1.shape, s2.shape));
    }
    let shared: BTreeSet<&String> = s1.vars.intersection(&s2.vars).collect();
    let key = |t: &LassoTrace| -> Vec<State> {
        t.states()
            .map(|s| restrict(s, |b| s1.env.contains(b) || shared.contains(&b.to_string())))
            .collect()
    };
    let mut by_key: BTreeMap<Vec<State>, Vec<&LassoTrace>> = BTreeMap::new();
    for t in &s2.traces {
        by_key.entry(key(t)).or_default().push(t);
    }
    let (p, l) = s1.shape;
    let mut traces = BTreeSet::new();
    for t1 in &s1.traces {
        let Some(partners) = by_key.get(&key(t1)) else {
            continue;
        };
        for t2 in partners {
            let merged: Vec<State> = (0..p + l)
                .map(|i| t1.state(i).union(t2.state(i)).cloned().collect())
                .collect();
            traces.insert(LassoTrace::new(merged[..p].to_vec(), merged[p..].to_vec())?);
        }
    }
    Ok(TraceSet {
        env: s1.env.clone(),
        vars: s1.vars.union(&s2.vars).cloned().collect(),
        shape: s1.shape,
        traces,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unrolls both sets to the longer prefix and the least common multiple of
/// the loop lengths.
pub fn align(s1: &TraceSet, s2: &TraceSet) -> Result<(TraceSet, TraceSet), BruteError> {
    let p = s1.shape.0.max(s2.shape.0);
    let l = s1.shape.1 / gcd(s1.shape.1, s2.shape.1) * s2.shape.1;
    Ok((s1.reshape(p, l)?, s2.reshape(p, l)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn tr(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoTrace {
        LassoTrace::from_names(prefix, cycle).unwrap()
    }

    #[test]
    fn bounded_finds_models() {
        let f = parse_formula("X a & G !b").unwrap();
        let t = bounded_sat(&f, 1, 1).unwrap().unwrap();
        assert!(eval(&t, &f, 0));
        assert_eq!(bounded_sat(&parse_formula("a & !a").unwrap(), 1, 1).unwrap(), None);
        // needs a loop of length 2
        let alt = parse_formula("G (a <-> X !a)").unwrap();
        assert_eq!(bounded_sat(&alt, 0, 1).unwrap(), None);
        assert!(bounded_sat(&alt, 0, 2).unwrap().is_some());
        assert!(bounded_sat_up_to(&alt, 1, 2).unwrap().is_some());
    }

    #[test]
    fn bounded_respects_budget() {
        let f = parse_formula("a & b & c & d").unwrap();
        assert!(matches!(bounded_sat(&f, 3, 3), Err(BruteError::Budget { .. })));
    }

    #[test]
    fn projection_of_a_model() {
        let sigma = TraceSet::new(set(&["p"]), set(&["a", "b", "c"]), (0, 1), [tr(&[], &[&["p", "a", "c"]])]).unwrap();
        let projected = set_project(&sigma, &set(&["b", "c"]));
        assert_eq!(projected.vars(), &set(&["b", "c"]));
        assert_eq!(projected.traces(), &[tr(&[], &[&["p", "c"]])].into_iter().collect());
        let empty = TraceSet::empty(set(&["p"]), set(&["a"]), (0, 1));
        assert!(set_project(&empty, &set(&["a"])).is_empty());
        assert_eq!(set_project(&sigma, &set(&["a", "b", "c"])), sigma);
    }

    #[test]
    fn join_of_projections_contains_a_non_model() {
        let s1 = TraceSet::new(set(&["p"]), set(&["b", "c"]), (0, 1), [tr(&[], &[&["p", "c"]])]).unwrap();
        let s2 = TraceSet::new(set(&["p"]), set(&["a"]), (0, 1), [tr(&[], &[&["p"]])]).unwrap();
        let joined = set_join(&s1, &s2).unwrap();
        assert!(joined.contains(&tr(&[], &[&["p", "c"]])));
        let phi = parse_formula("G ((p -> (a | b)) & (!p -> (!a & b)) & c)").unwrap();
        assert!(!eval(&tr(&[], &[&["p", "c"]]), &phi, 0));
        let none = TraceSet::empty(set(&["p"]), set(&["a"]), (0, 1));
        assert!(set_join(&s1, &none).unwrap().is_empty());
    }

    #[test]
    fn join_requires_matching_shapes() {
        let s1 = TraceSet::new(set(&["p"]), set(&["a"]), (0, 1), [tr(&[], &[&["a"]])]).unwrap();
        let s2 = TraceSet::new(set(&["p"]), set(&["b"]), (1, 2), [tr(&[&[]], &[&["b"], &[]])]).unwrap();
        assert!(matches!(set_join(&s1, &s2), Err(BruteError::ShapeMismatch(..))));
        let (a1, a2) = align(&s1, &s2).unwrap();
        assert_eq!(a1.shape(), (1, 2));
        let with_p = TraceSet::new(set(&["p"]), set(&["b"]), (1, 2), [tr(&[&[]], &[&["b"], &["p"]])]).unwrap();
        // p disagrees at the second loop position
        assert!(set_join(&a1, &with_p).unwrap().is_empty());
        let joined = set_join(&a1, &a2).unwrap();
        // a holds everywhere in s1, so the only joined trace is s2's with a added
        assert_eq!(joined.traces(), &[tr(&[&["a"]], &[&["a", "b"], &["a"]])].into_iter().collect());
    }

    #[test]
    fn rejects_foreign_traces() {
        assert!(TraceSet::new(set(&["p"]), set(&["a"]), (0, 1), [tr(&[], &[&["b"]])]).is_err());
        assert!(TraceSet::new(set(&["p"]), set(&["a"]), (0, 1), [tr(&[], &[&["a'"]])]).is_err());
        assert!(TraceSet::new(set(&["p"]), set(&["a"]), (0, 1), [tr(&[&[]], &[&["a"]])]).is_err());
    }
}
