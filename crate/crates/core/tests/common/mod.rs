//! Generators and law checks shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ltl_decompose::brute::{set_join, set_project, TraceSet};
use ltl_decompose::syntax::{AtomId, Formula, Signature, Spec};
use ltl_decompose::trace::{LassoTrace, State};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn names(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn leaf(atoms: &'static [&'static str], primes: bool) -> BoxedStrategy<Formula> {
    let atom = prop::sample::select(atoms).prop_map(Formula::atom);
    let mut leaves = vec![
        (6, atom.boxed()),
        (1, Just(Formula::True).boxed()),
        (1, Just(Formula::False).boxed()),
    ];
    if primes {
        leaves.push((2, prop::sample::select(atoms).prop_map(Formula::primed).boxed()));
    }
    prop::strategy::Union::new_weighted(leaves).boxed()
}

/// Arbitrary formulas over `atoms`, every constructor included.
pub fn formula(atoms: &'static [&'static str], depth: u32, primes: bool) -> BoxedStrategy<Formula> {
    leaf(atoms, primes)
        .prop_recursive(depth, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::next),
                inner.clone().prop_map(Formula::eventually),
                inner.clone().prop_map(Formula::always),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
            ]
        })
        .boxed()
}

fn state(atoms: &'static [&'static str]) -> impl Strategy<Value = State> {
    prop::sample::subsequence(atoms, 0..=atoms.len())
        .prop_map(|v| v.into_iter().map(AtomId::plain).collect())
}

/// Lassos over `atoms` with prefix `0..=max_prefix` and loop `1..=max_loop`.
pub fn lasso(atoms: &'static [&'static str], max_prefix: usize, max_loop: usize) -> impl Strategy<Value = LassoTrace> {
    (
        prop::collection::vec(state(atoms), 0..=max_prefix),
        prop::collection::vec(state(atoms), 1..=max_loop),
    )
        .prop_map(|(p, c)| LassoTrace::new(p, c).unwrap())
}

const OPS: usize = 10;

/// Uniform-ish random formula with exactly `nodes` AST nodes.
pub fn formula_with_nodes(rng: &mut impl Rng, atoms: &[String], nodes: usize) -> Formula {
    if nodes <= 1 {
        return match rng.gen_range(0..8) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(atoms.choose(rng).unwrap().clone()),
        };
    }
    if nodes == 2 || rng.gen_bool(0.4) {
        let inner = formula_with_nodes(rng, atoms, nodes - 1);
        return match rng.gen_range(0..4) {
            0 => Formula::not(inner),
            1 => Formula::next(inner),
            2 => Formula::eventually(inner),
            _ => Formula::always(inner),
        };
    }
    let left = rng.gen_range(1..nodes - 1);
    let a = formula_with_nodes(rng, atoms, left);
    let b = formula_with_nodes(rng, atoms, nodes - 1 - left);
    binary(rng.gen_range(0..6), a, b)
}

fn binary(k: usize, a: Formula, b: Formula) -> Formula {
    match k {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        3 => Formula::iff(a, b),
        4 => Formula::until(a, b),
        _ => Formula::release(a, b),
    }
}

/// Random formula of depth at most `depth`.
pub fn formula_with_depth(rng: &mut impl Rng, atoms: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.05) {
            Formula::True
        } else {
            Formula::atom(atoms.choose(rng).unwrap().clone())
        };
    }
    match rng.gen_range(0..OPS) {
        0 => Formula::not(formula_with_depth(rng, atoms, depth - 1)),
        1 => Formula::next(formula_with_depth(rng, atoms, depth - 1)),
        2 => Formula::eventually(formula_with_depth(rng, atoms, depth - 1)),
        3 => Formula::always(formula_with_depth(rng, atoms, depth - 1)),
        k => {
            let a = formula_with_depth(rng, atoms, depth - 1);
            let b = formula_with_depth(rng, atoms, depth - 1);
            binary(k - 4, a, b)
        }
    }
}

/// A random specification with `1..=max_env` inputs, `1..=max_sys` outputs
/// and a formula of depth at most `depth` over all of them.
pub fn random_spec(rng: &mut impl Rng, max_env: usize, max_sys: usize, depth: usize) -> Spec {
    let env: Vec<String> = ["p", "q"][..rng.gen_range(1..=max_env)]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let sys: Vec<String> = ["a", "b", "c", "d"][..rng.gen_range(1..=max_sys)]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let all: Vec<String> = env.iter().chain(&sys).cloned().collect();
    Spec {
        signature: Signature::new(env, sys),
        formula: formula_with_depth(rng, &all, depth),
    }
}

fn random_lasso(rng: &mut impl Rng, env_column: &[State], vars: &[String], shape: (usize, usize)) -> LassoTrace {
    let states: Vec<State> = env_column
        .iter()
        .map(|e| {
            let mut s = e.clone();
            s.extend(vars.iter().filter(|_| rng.gen_bool(0.5)).map(AtomId::plain));
            s
        })
        .collect();
    LassoTrace::new(states[..shape.0].to_vec(), states[shape.0..].to_vec()).unwrap()
}

/// A few environment sequences of the given shape. Drawing every trace's
/// environment from a small pool keeps joins from being trivially empty.
pub fn env_pool(rng: &mut impl Rng, env: &[String], shape: (usize, usize)) -> Vec<Vec<State>> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            (0..shape.0 + shape.1)
                .map(|_| env.iter().filter(|_| rng.gen_bool(0.5)).map(AtomId::plain).collect())
                .collect()
        })
        .collect()
}

pub fn random_trace_set(
    rng: &mut impl Rng,
    env: &[String],
    vars: &[String],
    shape: (usize, usize),
    pool: &[Vec<State>],
    max_traces: usize,
) -> TraceSet {
    let n = rng.gen_range(0..=max_traces);
    let traces: Vec<LassoTrace> = (0..n)
        .map(|_| {
            let column = pool.choose(rng).unwrap();
            random_lasso(rng, column, vars, shape)
        })
        .collect();
    TraceSet::new(
        env.iter().cloned().collect(),
        vars.iter().cloned().collect(),
        shape,
        traces,
    )
    .unwrap()
}

fn random_subset(rng: &mut impl Rng, vars: &[String]) -> Vec<String> {
    vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

fn set_of(v: &[String]) -> BTreeSet<String> {
    v.iter().cloned().collect()
}

/// One randomly drawn instance of each join/projection law. Returns the
/// first violated law, if any.
pub fn check_algebra_instance(rng: &mut impl Rng) -> Result<(), String> {
    // at most 4 atoms in total: one or two inputs, the rest outputs
    let env_n = rng.gen_range(1..=2);
    let env: Vec<String> = ["p", "q"][..env_n].iter().map(|s| s.to_string()).collect();
    let sys: Vec<String> = ["a", "b", "c"][..4 - env_n].iter().map(|s| s.to_string()).collect();
    let shape = (rng.gen_range(0..=2), rng.gen_range(1..=2));
    let pool = env_pool(rng, &env, shape);

    let w1 = random_subset(rng, &sys);
    let w2 = random_subset(rng, &sys);
    let w3 = random_subset(rng, &sys);
    let s1 = random_trace_set(rng, &env, &w1, shape, &pool, 8);
    let s2 = random_trace_set(rng, &env, &w2, shape, &pool, 8);
    let s3 = random_trace_set(rng, &env, &w3, shape, &pool, 8);
    let join = |a: &TraceSet, b: &TraceSet| set_join(a, b).map_err(|e| e.to_string());

    // (a) commutativity, associativity, monotonicity
    if join(&s1, &s2)? != join(&s2, &s1)? {
        return Err(format!("join is not commutative on {s1:?} and {s2:?}"));
    }
    if join(&join(&s1, &s2)?, &s3)? != join(&s1, &join(&s2, &s3)?)? {
        return Err(format!("join is not associative on {s1:?}, {s2:?}, {s3:?}"));
    }
    let sub: Vec<LassoTrace> = s1.traces().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let s1_sub = TraceSet::new(s1.env().clone(), s1.vars().clone(), shape, sub).unwrap();
    if !join(&s1_sub, &s2)?.is_subset(&join(&s1, &s2)?) {
        return Err(format!("join is not monotone on {s1_sub:?} ⊆ {s1:?} with {s2:?}"));
    }

    // (b) idempotency
    let w = set_of(&random_subset(rng, &sys));
    let full = random_trace_set(rng, &env, &sys, shape, &pool, 8);
    let proj = set_project(&full, &w);
    if join(&full, &proj)? != full {
        return Err(format!("Σ ⋈ Σ↾W ≠ Σ for {full:?}, W = {w:?}"));
    }
    if join(&proj, &proj)? != proj {
        return Err(format!("Σ↾W ⋈ Σ↾W ≠ Σ↾W for {full:?}, W = {w:?}"));
    }

    // (c) projection distributes into the join
    let u = set_of(&random_subset(rng, &sys));
    let uw: BTreeSet<String> = u.union(&w).cloned().collect();
    if !set_project(&full, &uw).is_subset(&join(&set_project(&full, &u), &proj)?) {
        return Err(format!("Σ↾(U∪W) ⊄ Σ↾U ⋈ Σ↾W for {full:?}, U = {u:?}, W = {w:?}"));
    }

    // (d) join distributes over projection for disjoint variable sets
    let mut shuffled = sys.clone();
    shuffled.shuffle(rng);
    let cut = rng.gen_range(0..=shuffled.len());
    let (v1, v2) = shuffled.split_at(cut);
    let d1 = random_trace_set(rng, &env, v1, shape, &pool, 8);
    let d2 = random_trace_set(rng, &env, v2, shape, &pool, 8);
    let x = set_of(&random_subset(rng, v1));
    let y = set_of(&random_subset(rng, v2));
    let xy: BTreeSet<String> = x.union(&y).cloned().collect();
    let lhs = set_project(&join(&d1, &d2)?, &xy);
    let rhs = join(&set_project(&d1, &x), &set_project(&d2, &y))?;
    if lhs != rhs {
        return Err(format!(
            "(Σ1 ⋈ Σ2)↾(X∪Y) ≠ Σ1↾X ⋈ Σ2↾Y for {d1:?}, {d2:?}, X = {x:?}, Y = {y:?}"
        ));
    }
    Ok(())
}
