//! Ultimately periodic traces `prefix · loop^ω` and LTL evaluation over them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{AtomId, Formula, Signature};

/// A single position of a trace: the atoms that are true there. Every atom
/// not listed is false.
pub type State = BTreeSet<AtomId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("a lasso trace needs a nonempty loop")]
    EmptyLoop,
    #[error("cannot reshape a ({from_prefix},{from_loop}) lasso to ({to_prefix},{to_loop})")]
    BadShape {
        from_prefix: usize,
        from_loop: usize,
        to_prefix: usize,
        to_loop: usize,
    },
    #[error("malformed trace: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LassoTrace {
    prefix: Vec<State>,
    cycle: Vec<State>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<State>, cycle: Vec<State>) -> Result<Self, TraceError> {
        if cycle.is_empty() {
            return Err(TraceError::EmptyLoop);
        }
        Ok(LassoTrace { prefix, cycle })
    }

    /// Convenience constructor from atom-name lists; `"a'"` denotes a primed atom.
    pub fn from_names(prefix: &[&[&str]], cycle: &[&[&str]]) -> Result<Self, TraceError> {
        let conv = |states: &[&[&str]]| -> Vec<State> {
            states
                .iter()
                .map(|s| s.iter().map(|n| atom_from_name(n)).collect())
                .collect()
        };
        LassoTrace::new(conv(prefix), conv(cycle))
    }

    pub fn prefix(&self) -> &[State] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[State] {
        &self.cycle
    }

    /// `(prefix length, loop length)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.prefix.len(), self.cycle.len())
    }

    /// Number of distinct positions, `|prefix| + |loop|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Maps any position onto its representative in `0..positions()`.
    pub fn normalize(&self, i: usize) -> usize {
        let p = self.prefix.len();
        if i < p {
            i
        } else {
            p + (i - p) % self.cycle.len()
        }
    }

    pub fn state(&self, i: usize) -> &State {
        let i = self.normalize(i);
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    fn successor(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &State> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    /// Every atom occurring anywhere in the trace.
    pub fn alphabet(&self) -> BTreeSet<AtomId> {
        self.states().flatten().cloned().collect()
    }

    /// Applies `f` to every state, keeping the shape.
    pub fn map_states(&self, mut f: impl FnMut(&State) -> State) -> LassoTrace {
        LassoTrace {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    /// Re-expresses the same infinite word with a longer prefix and a loop
    /// that is a multiple of the current one.
    pub fn reshape(&self, prefix_len: usize, loop_len: usize) -> Result<LassoTrace, TraceError> {
        let (p, l) = self.shape();
        if prefix_len < p || loop_len == 0 || !loop_len.is_multiple_of(l) {
            return Err(TraceError::BadShape {
                from_prefix: p,
                from_loop: l,
                to_prefix: prefix_len,
                to_loop: loop_len,
            });
        }
        Ok(LassoTrace {
            prefix: (0..prefix_len).map(|i| self.state(i).clone()).collect(),
            cycle: (prefix_len..prefix_len + loop_len)
                .map(|i| self.state(i).clone())
                .collect(),
        })
    }
}

fn atom_from_name(name: &str) -> AtomId {
    match name.strip_suffix('\'') {
        Some(base) => AtomId::primed(base),
        None => AtomId::plain(name),
    }
}

/// Truth values of `f` at every position `0..positions()`.
fn eval_all(t: &LassoTrace, f: &Formula) -> Vec<bool> {
    let n = t.positions();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => (0..n).map(|i| t.state(i).contains(a)).collect(),
        Formula::Not(x) => eval_all(t, x).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip_with(eval_all(t, a), eval_all(t, b), |x, y| x && y),
        Formula::Or(a, b) => zip_with(eval_all(t, a), eval_all(t, b), |x, y| x || y),
        Formula::Implies(a, b) => zip_with(eval_all(t, a), eval_all(t, b), |x, y| !x || y),
        Formula::Iff(a, b) => zip_with(eval_all(t, a), eval_all(t, b), |x, y| x == y),
        Formula::Next(x) => {
            let v = eval_all(t, x);
            (0..n).map(|i| v[t.successor(i)]).collect()
        }
        Formula::Eventually(x) => until(t, &vec![true; n], &eval_all(t, x)),
        Formula::Always(x) => release(t, &vec![false; n], &eval_all(t, x)),
        Formula::Until(a, b) => until(t, &eval_all(t, a), &eval_all(t, b)),
        Formula::Release(a, b) => release(t, &eval_all(t, a), &eval_all(t, b)),
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Least fixpoint of `v = rhs ∨ (lhs ∧ X v)`. The loop is swept backwards
/// twice, so every witness that wraps around once has been seen.
fn until(t: &LassoTrace, lhs: &[bool], rhs: &[bool]) -> Vec<bool> {
    fixpoint(t, false, |i, next| rhs[i] || (lhs[i] && next))
}

/// Greatest fixpoint of `v = rhs ∧ (lhs ∨ X v)`.
fn release(t: &LassoTrace, lhs: &[bool], rhs: &[bool]) -> Vec<bool> {
    fixpoint(t, true, |i, next| rhs[i] && (lhs[i] || next))
}

fn fixpoint(t: &LassoTrace, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = t.positions();
    let p = t.prefix.len();
    let mut v = vec![init; n];
    for _ in 0..2 {
        for i in (p..n).rev() {
            v[i] = step(i, v[t.successor(i)]);
        }
    }
    for i in (0..p).rev() {
        v[i] = step(i, v[i + 1]);
    }
    v
}

/// Whether position `i` of the trace satisfies `f`. Atoms absent from a
/// state are false.
pub fn eval(t: &LassoTrace, f: &Formula, i: usize) -> bool {
    eval_all(t, f)[t.normalize(i)]
}

/// Restriction to the environment variables plus the system variables in
/// `keep`. Primed atoms are dropped.
pub fn project_trace(t: &LassoTrace, sig: &Signature, keep: &BTreeSet<String>) -> LassoTrace {
    t.map_states(|s| {
        s.iter()
            .filter(|a| {
                !a.primed && (sig.is_env(&a.base) || (sig.is_sys(&a.base) && keep.contains(&a.base)))
            })
            .cloned()
            .collect()
    })
}

pub fn strip_primes(t: &LassoTrace) -> LassoTrace {
    t.map_states(|s| s.iter().filter(|a| !a.primed).cloned().collect())
}

/// Candidates whose primed and unprimed copies disagree at some position,
/// in the order of `candidates`.
pub fn compute_z(t: &LassoTrace, candidates: &[String]) -> Vec<String> {
    candidates
        .iter()
        .filter(|z| {
            let plain = AtomId::plain(z.as_str());
            let primed = AtomId::primed(z.as_str());
            t.states()
                .any(|s| s.contains(&plain) != s.contains(&primed))
        })
        .cloned()
        .collect()
}

/// Renders a trace as `s ; s ; ... | s ; ...` with states `{x, x', y}`.
/// Declared atoms come first in declaration order (unprimed before primed),
/// then anything undeclared in lexicographic order.
pub fn format_trace(t: &LassoTrace, sig: &Signature) -> String {
    let state = |s: &State| {
        let mut atoms: Vec<&AtomId> = s.iter().collect();
        atoms.sort_by_key(|a| {
            (
                sig.decl_index(&a.base).unwrap_or(usize::MAX),
                a.base.clone(),
                a.primed,
            )
        });
        let names: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        format!("{{{}}}", names.join(", "))
    };
    let prefix: Vec<String> = t.prefix.iter().map(state).collect();
    let cycle: Vec<String> = t.cycle.iter().map(state).collect();
    if prefix.is_empty() {
        format!("| {}", cycle.join(" ; "))
    } else {
        format!("{} | {}", prefix.join(" ; "), cycle.join(" ; "))
    }
}

/// Inverse of [`format_trace`]; whitespace is insignificant.
pub fn parse_trace(text: &str) -> Result<LassoTrace, TraceError> {
    let malformed = |msg: &str| TraceError::Malformed(format!("{msg} in `{}`", text.trim()));
    let mut halves = text.split('|');
    let (Some(prefix), Some(cycle), None) = (halves.next(), halves.next(), halves.next()) else {
        return Err(malformed("expected exactly one `|`"));
    };
    let states = |part: &str| -> Result<Vec<State>, TraceError> {
        if part.trim().is_empty() {
            return Ok(Vec::new());
        }
        part.split(';')
            .map(|s| {
                let s = s.trim();
                let inner = s
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| malformed("state must be wrapped in braces"))?;
                inner
                    .split(',')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .map(|n| {
                        let base = n.strip_suffix('\'').unwrap_or(n);
                        let mut chars = base.chars();
                        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
                        if ok {
                            Ok(atom_from_name(n))
                        } else {
                            Err(malformed(&format!("bad atom `{n}`")))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    LassoTrace::new(states(prefix)?, states(cycle)?)
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_trace(self, &Signature::default()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn tr(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoTrace {
        LassoTrace::from_names(prefix, cycle).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn strategy_trace_is_a_model() {
        let phi = parse_formula("G (p -> (a | (b & c))) & F (p -> (d | e)) & F (!p -> !e)").unwrap();
        assert!(eval(&tr(&[], &[&["p", "a", "d"]]), &phi, 0));
    }

    #[test]
    fn joined_trace_is_not_a_model() {
        let phi = parse_formula("F ((p -> (a | b) & c) & (!p -> !c))").unwrap();
        let t = tr(&[&["p", "a"], &["p", "c"]], &[&["p"]]);
        assert!(!eval(&t, &phi, 0));
        assert!(eval(&t, &Formula::True, 0));
        assert!(eval(&t, &Formula::True, 17));
    }

    #[test]
    fn until_on_the_loop_needs_wraparound() {
        // b only holds at the loop head, so a U b at the loop tail must wrap
        let t = tr(&[&[]], &[&["b"], &["a"], &["a"]]);
        let f = parse_formula("a U b").unwrap();
        assert!(!eval(&t, &f, 0));
        assert!(eval(&t, &f, 1));
        assert!(eval(&t, &f, 2));
        assert!(eval(&t, &f, 3));
        let g = parse_formula("G F b").unwrap();
        assert!(eval(&t, &g, 0));
        let r = parse_formula("b R a").unwrap();
        assert!(!eval(&t, &r, 1));
        assert!(eval(&tr(&[], &[&["a"]]), &r, 0));
    }

    #[test]
    fn position_access_is_total() {
        let t = tr(&[&["x"]], &[&["y"], &["z"]]);
        assert_eq!(t.state(0), &[AtomId::plain("x")].into_iter().collect());
        assert_eq!(t.state(1), t.state(3));
        assert_eq!(t.state(2), t.state(100));
    }

    #[test]
    fn projection_examples() {
        let sig = Signature::new(["p"], ["a", "b", "c", "d", "e"]);
        assert_eq!(
            project_trace(&tr(&[], &[&["p", "a", "d"]]), &sig, &set(&["a"])),
            tr(&[], &[&["p", "a"]])
        );
        assert_eq!(
            project_trace(&tr(&[], &[&["p", "a", "c"]]), &sig, &set(&["b", "c"])),
            tr(&[], &[&["p", "c"]])
        );
        let t = tr(&[&["p", "a'", "b"]], &[&["c", "e"]]);
        assert_eq!(
            project_trace(&t, &sig, &sig.sys_set()),
            tr(&[&["p", "b"]], &[&["c", "e"]])
        );
    }

    #[test]
    fn strip_primes_examples() {
        let t = tr(&[&["p", "a", "c'"], &["p", "a'", "c"]], &[&["p", "c"]]);
        assert_eq!(strip_primes(&t), tr(&[&["p", "a"], &["p", "c"]], &[&["p", "c"]]));
        let plain = tr(&[], &[&["a"]]);
        assert_eq!(strip_primes(&plain), plain);
        assert_eq!(strip_primes(&tr(&[], &[&["t", "t'", "z", "z'"]])), tr(&[], &[&["t", "z"]]));
    }

    #[test]
    fn z_from_first_witness() {
        let mu = tr(
            &[&["p", "v'", "t'"], &["v", "v'", "w'", "z'"], &["t", "t'", "z", "z'"]],
            &[&["t", "t'", "w", "w'"]],
        );
        let cands: Vec<String> = ["t", "v", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(compute_z(&mu, &cands), ["t", "v", "z"]);
    }

    #[test]
    fn z_from_second_witness() {
        // Position-by-position: {v} has z,z' both absent; {t,t',w',z'} has z'
        // without z; {t,t',w,w'} agrees. So only z disagrees.
        let nu = tr(&[&["v"], &["t", "t'", "w'", "z'"]], &[&["t", "t'", "w", "w'"]]);
        let cands: Vec<String> = ["t", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(compute_z(&nu, &cands), ["z"]);
        let agree = tr(&[], &[&["t", "t'"]]);
        assert!(compute_z(&agree, &cands).is_empty());
    }

    #[test]
    fn serialization() {
        let sig = Signature::new(["p"], ["t", "v", "w", "z"]);
        let t = tr(&[&["p", "v'", "t'"], &["z'", "v", "v'", "w'"]], &[&["t", "t'", "w", "w'"]]);
        let text = format_trace(&t, &sig);
        assert_eq!(text, "{p, t', v'} ; {v, v', w', z'} | {t, t', w, w'}");
        assert_eq!(parse_trace(&text).unwrap(), t);
        let no_prefix = tr(&[], &[&[]]);
        assert_eq!(format_trace(&no_prefix, &sig), "| {}");
        assert_eq!(parse_trace("| {}").unwrap(), no_prefix);
        assert!(parse_trace("{a}").is_err());
        assert!(parse_trace("{a} |").is_err());
        assert!(parse_trace("| {a b}").is_err());
    }

    #[test]
    fn reshape_preserves_the_word() {
        let t = tr(&[&["a"]], &[&["b"], &[]]);
        let r = t.reshape(2, 4).unwrap();
        assert_eq!(r.shape(), (2, 4));
        for i in 0..20 {
            assert_eq!(t.state(i), r.state(i));
        }
        assert!(t.reshape(0, 2).is_err());
        assert!(t.reshape(1, 3).is_err());
        assert_eq!(LassoTrace::new(vec![], vec![]), Err(TraceError::EmptyLoop));
    }
}
