//! Tableau construction of a generalized Büchi automaton and its emptiness
//! check.
//!
//! A state is the set of formulas owed from the current position on. Its
//! out-edges are the expansions of that set: each one carries the literals
//! that must hold now, leads to the state of its next-step obligations and
//! lists the Until formulas it postpones. Acceptance sits on edges: an edge
//! is accepting for an Until it does not postpone. Only states reachable
//! from the root formula are built.
//!
//! An expansion that asks for a superset of another's literals, next-step
//! obligations and postponed Untils accepts no word the smaller one does
//! not, so it is dropped.

use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{EngineError, SatResult};
use crate::syntax::{AtomId, Formula};
use crate::trace::{eval, LassoTrace, State};

type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Next(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

/// Hash-consed subformulas of an NNF formula.
#[derive(Debug, Default)]
struct Closure {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    atoms: Vec<AtomId>,
    atom_index: HashMap<AtomId, u32>,
}

impl Closure {
    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn atom(&mut self, a: &AtomId) -> u32 {
        if let Some(&i) = self.atom_index.get(a) {
            return i;
        }
        let i = self.atoms.len() as u32;
        self.atoms.push(a.clone());
        self.atom_index.insert(a.clone(), i);
        i
    }

    fn add(&mut self, f: &Formula) -> Result<NodeId, EngineError> {
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Atom(a) => Node::Lit(self.atom(a), true),
            Formula::Not(x) => match &**x {
                Formula::Atom(a) => Node::Lit(self.atom(a), false),
                _ => return Err(EngineError::NotNnf(f.to_string())),
            },
            Formula::And(a, b) => Node::And(self.add(a)?, self.add(b)?),
            Formula::Or(a, b) => Node::Or(self.add(a)?, self.add(b)?),
            Formula::Next(x) => Node::Next(self.add(x)?),
            Formula::Until(a, b) => Node::Until(self.add(a)?, self.add(b)?),
            Formula::Release(a, b) => Node::Release(self.add(a)?, self.add(b)?),
            Formula::Implies(..) | Formula::Iff(..) | Formula::Eventually(_) | Formula::Always(_) => {
                return Err(EngineError::NotNnf(f.to_string()))
            }
        };
        Ok(self.intern(node))
    }
}

/// Three-valued guard: atoms required true, atoms required false, the rest
/// unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard {
    pub positive: BTreeSet<AtomId>,
    pub negative: BTreeSet<AtomId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Letter {
    pos: Vec<u32>,
    neg: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    target: usize,
    letter: u32,
    postponed: u32,
}

#[derive(Debug)]
pub struct Gba {
    source: Formula,
    closure: Closure,
    expander: Expander,
    /// Obligations of each state, sorted.
    states: Vec<Vec<NodeId>>,
    index: HashMap<Vec<NodeId>, usize>,
    initial: Vec<usize>,
    /// Out-edges; empty until the state is expanded.
    out: Vec<Vec<Edge>>,
    expanded: Vec<bool>,
    letters: Vec<Letter>,
    letter_index: HashMap<Letter, u32>,
    /// Postponed Untils of an edge, and the acceptance sets (as bit words)
    /// such an edge belongs to.
    postponed: Vec<(Vec<NodeId>, Vec<u64>)>,
    postponed_index: HashMap<Vec<NodeId>, u32>,
    /// The Until subformulas, one acceptance set each.
    untils: Vec<NodeId>,
}

impl Gba {
    fn new(f: &Formula) -> Result<Gba, EngineError> {
        let mut closure = Closure::default();
        let root = closure.add(f)?;
        let untils = (0..closure.nodes.len() as NodeId)
            .filter(|&id| matches!(closure.nodes[id as usize], Node::Until(..)))
            .collect();
        Ok(Gba {
            source: f.clone(),
            expander: Expander::new(&closure),
            closure,
            states: vec![vec![root]],
            index: HashMap::from([(vec![root], 0)]),
            initial: vec![0],
            out: vec![Vec::new()],
            expanded: vec![false],
            letters: Vec::new(),
            letter_index: HashMap::new(),
            postponed: Vec::new(),
            postponed_index: HashMap::new(),
            untils,
        })
    }

    /// Computes the out-edges of `state`, creating its successors. Fails
    /// once more than `state_cap` states would exist.
    fn expand_state(&mut self, state: usize, state_cap: usize) -> Result<(), EngineError> {
        if self.expanded[state] {
            return Ok(());
        }
        let terms = self.expander.expand(&self.closure, &self.states[state]);
        let mut edges = Vec::with_capacity(terms.len());
        for term in terms {
            let letter = Letter {
                pos: term.pos,
                neg: term.neg,
            };
            let letter = match self.letter_index.get(&letter) {
                Some(&l) => l,
                None => {
                    self.letters.push(letter.clone());
                    self.letter_index.insert(letter, (self.letters.len() - 1) as u32);
                    (self.letters.len() - 1) as u32
                }
            };
            let postponed = match self.postponed_index.get(&term.pending) {
                Some(&p) => p,
                None => {
                    let mut mask = vec![0u64; self.untils.len().div_ceil(64)];
                    for (i, u) in self.untils.iter().enumerate() {
                        if term.pending.binary_search(u).is_err() {
                            mask[i / 64] |= 1 << (i % 64);
                        }
                    }
                    self.postponed_index.insert(term.pending.clone(), self.postponed.len() as u32);
                    self.postponed.push((term.pending, mask));
                    (self.postponed.len() - 1) as u32
                }
            };
            let target = match self.index.get(&term.next) {
                Some(&t) => t,
                None => {
                    if self.states.len() >= state_cap {
                        return Err(EngineError::StateLimit { cap: state_cap });
                    }
                    self.index.insert(term.next.clone(), self.states.len());
                    self.states.push(term.next);
                    self.out.push(Vec::new());
                    self.expanded.push(false);
                    self.states.len() - 1
                }
            };
            edges.push(Edge {
                target,
                letter,
                postponed,
            });
        }
        self.out[state] = edges;
        self.expanded[state] = true;
        Ok(())
    }

    fn acceptance_mask(&self, edge: &Edge) -> &[u64] {
        &self.postponed[edge.postponed as usize].1
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    /// Distinct successor states, in edge order.
    pub fn successors(&self, state: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        self.out[state]
            .iter()
            .map(|e| e.target)
            .filter(|t| seen.insert(*t))
            .collect()
    }

    /// Number of acceptance sets.
    pub fn acceptance_sets(&self) -> usize {
        self.untils.len()
    }

    fn accepts(&self, edge: &Edge, set: usize) -> bool {
        self.acceptance_mask(edge)[set / 64] >> (set % 64) & 1 == 1
    }

    /// The formula this automaton was built from.
    pub fn source(&self) -> &Formula {
        &self.source
    }

    fn guard(&self, letter: u32) -> Guard {
        let l = &self.letters[letter as usize];
        let names = |ids: &[u32]| ids.iter().map(|&i| self.closure.atoms[i as usize].clone()).collect();
        Guard {
            positive: names(&l.pos),
            negative: names(&l.neg),
        }
    }

    /// `(from, to, guard)` for every transition.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Guard)> + '_ {
        (0..self.states.len()).flat_map(move |s| self.out[s].iter().map(move |e| (s, e.target, self.guard(e.letter))))
    }

    /// Acceptance sets the edge `index` of `state` belongs to.
    pub fn accepting_sets(&self, state: usize, index: usize) -> Vec<usize> {
        let e = &self.out[state][index];
        (0..self.untils.len()).filter(|&i| self.accepts(e, i)).collect()
    }

    /// Don't-care atoms completed to false.
    fn completed(&self, letter: u32) -> State {
        self.letters[letter as usize]
            .pos
            .iter()
            .map(|&i| self.closure.atoms[i as usize].clone())
            .collect()
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// One way of satisfying a formula at a single position. All lists are
/// sorted. `pending` holds the Until nodes postponed here.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Term {
    pos: Vec<u32>,
    neg: Vec<u32>,
    next: Vec<NodeId>,
    pending: Vec<NodeId>,
}

impl Term {
    fn conjoin(&self, other: &Term) -> Option<Term> {
        if !disjoint(&self.pos, &other.neg) || !disjoint(&self.neg, &other.pos) {
            return None;
        }
        Some(Term {
            pos: union(&self.pos, &other.pos),
            neg: union(&self.neg, &other.neg),
            next: union(&self.next, &other.next),
            pending: union(&self.pending, &other.pending),
        })
    }

    /// Every word accepted through `other` is accepted through `self`.
    fn dominates(&self, other: &Term) -> bool {
        is_subset(&self.pos, &other.pos)
            && is_subset(&self.neg, &other.neg)
            && is_subset(&self.next, &other.next)
            && is_subset(&self.pending, &other.pending)
    }

    /// Summary bits: `a.dominates(b)` implies `a.signature() & !b.signature() == 0`.
    fn signature(&self) -> u64 {
        let bits = |ids: &[u32], salt: u32| {
            ids.iter()
                .fold(0u64, |acc, &i| acc | 1 << (i.wrapping_mul(0x9E37_79B9).wrapping_add(salt) >> 26))
        };
        bits(&self.pos, 0) | bits(&self.neg, 1 << 26) | bits(&self.next, 2 << 26) | bits(&self.pending, 3 << 26)
    }

    fn weight(&self) -> usize {
        self.pos.len() + self.neg.len() + self.next.len() + self.pending.len()
    }
}

/// Drops duplicates and dominated terms; the survivors come out in a
/// deterministic order.
fn minimize(mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| a.cmp(b)));
    terms.dedup();
    let mut kept: Vec<(u64, Term)> = Vec::with_capacity(terms.len());
    for t in terms {
        let sig = t.signature();
        if !kept.iter().any(|(ks, k)| ks & !sig == 0 && k.dominates(&t)) {
            kept.push((sig, t));
        }
    }
    kept.into_iter().map(|(_, t)| t).collect()
}

fn product(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            if let Some(t) = x.conjoin(y) {
                out.push(t);
            }
        }
    }
    minimize(out)
}

/// Covering terms of every closure node, computed on demand.
#[derive(Debug)]
struct Expander {
    memo: Vec<Option<Vec<Term>>>,
}

impl Expander {
    fn new(closure: &Closure) -> Self {
        Expander {
            memo: vec![None; closure.nodes.len()],
        }
    }

    fn terms(&mut self, closure: &Closure, id: NodeId) -> Vec<Term> {
        if let Some(t) = &self.memo[id as usize] {
            return t.clone();
        }
        let single = |t: Term| vec![t];
        let result = match closure.nodes[id as usize] {
            Node::True => single(Term::default()),
            Node::False => Vec::new(),
            Node::Lit(a, true) => single(Term {
                pos: vec![a],
                ..Term::default()
            }),
            Node::Lit(a, false) => single(Term {
                neg: vec![a],
                ..Term::default()
            }),
            Node::And(a, b) => {
                let (ta, tb) = (self.terms(closure, a), self.terms(closure, b));
                product(&ta, &tb)
            }
            Node::Or(a, b) => {
                let mut t = self.terms(closure, a);
                t.extend(self.terms(closure, b));
                minimize(t)
            }
            Node::Next(x) => single(Term {
                next: vec![x],
                ..Term::default()
            }),
            Node::Until(a, b) => {
                let mut now: Vec<Term> = self.terms(closure, b);
                let later = Term {
                    next: vec![id],
                    pending: vec![id],
                    ..Term::default()
                };
                now.extend(product(&self.terms(closure, a), &[later]));
                minimize(now)
            }
            Node::Release(a, b) => {
                let tb = self.terms(closure, b);
                let mut now = product(&self.terms(closure, a), &tb);
                let later = Term {
                    next: vec![id],
                    ..Term::default()
                };
                now.extend(product(&tb, &[later]));
                minimize(now)
            }
        };
        self.memo[id as usize] = Some(result.clone());
        result
    }

    /// All minimal ways of satisfying every node of `obligations` at one
    /// position.
    fn expand(&mut self, closure: &Closure, obligations: &[NodeId]) -> Vec<Term> {
        let mut acc = vec![Term::default()];
        for &o in obligations {
            let t = self.terms(closure, o);
            acc = product(&acc, &t);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

/// Builds the automaton of an NNF formula, exploring at most `state_cap`
/// states. State 0 is the initial state and owes the whole formula.
pub fn build_gba(f: &Formula, state_cap: usize) -> Result<Gba, EngineError> {
    let mut g = Gba::new(f)?;
    let mut s = 0;
    while s < g.states.len() {
        g.expand_state(s, state_cap)?;
        s += 1;
    }
    Ok(g)
}

/// Shortest path from `from` whose last edge satisfies `target`, staying
/// inside `allowed`. The path is returned as `(state, edge index)` pairs
/// and is never empty.
fn bfs_path(
    g: &Gba,
    from: usize,
    allowed: &[bool],
    target: impl Fn(&Edge) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen: BTreeSet<usize> = [from].into_iter().collect();
    while let Some(s) = queue.pop_front() {
        for (i, e) in g.out[s].iter().enumerate() {
            if !allowed[e.target] {
                continue;
            }
            if target(e) {
                let mut path = vec![(s, i)];
                let mut cur = s;
                while cur != from {
                    let step = parent[&cur];
                    path.push(step);
                    cur = step.0;
                }
                path.reverse();
                return Some(path);
            }
            if seen.insert(e.target) {
                parent.insert(e.target, (s, i));
                queue.push_back(e.target);
            }
        }
    }
    None
}

/// Searches for a reachable cycle visiting every acceptance set and reads
/// a lasso-shaped witness off it.
pub fn find_accepting_lasso(g: &Gba) -> Result<SatResult, EngineError> {
    let n = g.state_count();
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    for s in 0..n {
        for t in g.successors(s) {
            graph.add_edge(NodeIndex::new(s), NodeIndex::new(t), ());
        }
    }

    let sccs = tarjan_scc(&graph);
    let mut scc_of = vec![0usize; n];
    for (k, scc) in sccs.iter().enumerate() {
        for x in scc {
            scc_of[x.index()] = k;
        }
    }
    // An SCC is fair when its internal edges meet every acceptance set.
    let sets = g.acceptance_sets();
    let mut internal = vec![false; sccs.len()];
    let mut covered = vec![vec![false; sets]; sccs.len()];
    for s in 0..n {
        let k = scc_of[s];
        for e in g.out[s].iter().filter(|e| scc_of[e.target] == k) {
            internal[k] = true;
            for (i, c) in covered[k].iter_mut().enumerate() {
                *c = *c || g.accepts(e, i);
            }
        }
    }
    let fair: Vec<bool> = (0..sccs.len()).map(|k| internal[k] && covered[k].iter().all(|&c| c)).collect();

    // BFS from the initial states, in order, for the nearest fair SCC.
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in &g.initial {
        if !visited[s] {
            visited[s] = true;
            queue.push_back(s);
        }
    }
    let mut entry = None;
    while let Some(s) = queue.pop_front() {
        if fair[scc_of[s]] {
            entry = Some(s);
            break;
        }
        for e in &g.out[s] {
            if !visited[e.target] {
                visited[e.target] = true;
                queue.push_back(e.target);
            }
        }
    }
    let Some(entry) = entry else {
        return Ok(SatResult::Unsat);
    };

    let component = scc_of[entry];
    let allowed: Vec<bool> = scc_of.iter().map(|&k| k == component).collect();
    witness(g, entry, &allowed)
}

/// Letters along a shortest path from an initial state to `entry`.
fn stem_to(g: &Gba, entry: usize) -> Vec<u32> {
    let mut parent: Vec<Option<(usize, u32)>> = vec![None; g.states.len()];
    let mut visited = vec![false; g.states.len()];
    let mut queue = VecDeque::new();
    for &s in &g.initial {
        if !visited[s] {
            visited[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if s == entry {
            break;
        }
        for e in &g.out[s] {
            if !visited[e.target] {
                visited[e.target] = true;
                parent[e.target] = Some((s, e.letter));
                queue.push_back(e.target);
            }
        }
    }
    let mut stem = Vec::new();
    let mut cur = entry;
    while let Some((p, l)) = parent[cur] {
        stem.push(l);
        cur = p;
    }
    stem.reverse();
    stem
}

/// Reads a witness off a fair component: `allowed` marks its states and
/// `entry` is one of them.
fn witness(g: &Gba, entry: usize, allowed: &[bool]) -> Result<SatResult, EngineError> {
    let stem = stem_to(g, entry);
    let sets = g.acceptance_sets();
    let mut cycle: Vec<u32> = Vec::new();
    let mut met = vec![false; sets];
    let mut cur = entry;
    for i in 0..sets {
        if met[i] {
            continue;
        }
        let detour = bfs_path(g, cur, allowed, |e| g.accepts(e, i)).expect("fair SCC meets each acceptance set");
        for &(s, k) in &detour {
            let e = &g.out[s][k];
            for (j, m) in met.iter_mut().enumerate() {
                *m = *m || g.accepts(e, j);
            }
            cycle.push(e.letter);
            cur = e.target;
        }
    }
    if cycle.is_empty() || cur != entry {
        let back = bfs_path(g, cur, allowed, |e| e.target == entry).expect("SCC member reaches the entry");
        cycle.extend(back.iter().map(|&(s, k)| g.out[s][k].letter));
    }

    let mut prefix: Vec<State> = stem.iter().map(|&l| g.completed(l)).collect();
    let mut lasso: VecDeque<State> = cycle.iter().map(|&l| g.completed(l)).collect();
    // w·a·(u·a)^ω is w·(a·u)^ω
    while prefix.last().is_some_and(|s| Some(s) == lasso.back()) {
        prefix.pop();
        let last = lasso.pop_back().unwrap();
        lasso.push_front(last);
    }
    let witness = LassoTrace::new(prefix, lasso.into()).expect("cycle is nonempty");

    if !eval(&witness, &g.source, 0) {
        return Err(EngineError::UnsoundWitness {
            formula: g.source.to_string(),
            witness: witness.to_string(),
        });
    }
    Ok(SatResult::Sat(witness))
}

/// Emptiness check that expands states only when the search reaches them
/// and stops at the first fair component. The search is a depth-first SCC
/// decomposition that merges the acceptance sets met inside each candidate
/// component as back edges close cycles.
///
/// A state whose component was closed without acceptance has an empty
/// language, and so has every state owing a superset of its obligations;
/// those are never expanded.
pub fn check_on_the_fly(f: &Formula, state_cap: usize) -> Result<SatResult, EngineError> {
    struct Root {
        order: u32,
        acc: Vec<u64>,
        /// Acceptance of the edge that entered this root.
        arc: Vec<u64>,
    }
    let mut g = Gba::new(f)?;
    let sets = g.acceptance_sets();
    let words = sets.div_ceil(64);
    let full: Vec<u64> = (0..words)
        .map(|w| if w + 1 < words || sets % 64 == 0 { u64::MAX } else { (1 << (sets % 64)) - 1 })
        .collect();
    let or_into = |a: &mut [u64], b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);

    // order[s] == 0: not yet visited
    let mut order: Vec<u32> = Vec::new();
    let mut dead: Vec<bool> = Vec::new();
    let mut live: Vec<usize> = Vec::new();
    let mut roots: Vec<Root> = Vec::new();
    let mut todo: Vec<(usize, usize)> = Vec::new();
    let mut count = 0u32;
    let mut empty: Vec<(u64, usize)> = Vec::new();
    let sig = |set: &[NodeId]| set.iter().fold(0u64, |acc, &i| acc | 1 << (i.wrapping_mul(0x9E37_79B9) >> 26));
    let subsumed = |g: &Gba, empty: &[(u64, usize)], set: &[NodeId]| {
        let s = sig(set);
        empty.iter().any(|&(es, x)| es & !s == 0 && is_subset(&g.states[x], set))
    };

    for &start in &g.initial.clone() {
        if order.get(start).is_some_and(|&o| o != 0) {
            continue;
        }
        let mut arrive = Some((start, vec![0u64; words]));
        loop {
            if let Some((t, arc)) = arrive.take() {
                g.expand_state(t, state_cap)?;
                order.resize(g.states.len(), 0);
                dead.resize(g.states.len(), false);
                count += 1;
                order[t] = count;
                roots.push(Root {
                    order: count,
                    acc: vec![0; words],
                    arc,
                });
                live.push(t);
                todo.push((t, 0));
            }
            let Some(top) = todo.last_mut() else { break };
            let (s, i) = *top;
            if i < g.out[s].len() {
                top.1 += 1;
                let e = g.out[s][i];
                let t = e.target;
                if order[t] == 0 {
                    if subsumed(&g, &empty, &g.states[t]) {
                        order[t] = u32::MAX;
                        dead[t] = true;
                    } else {
                        arrive = Some((t, g.acceptance_mask(&e).to_vec()));
                    }
                    continue;
                }
                if dead[t] {
                    continue;
                }
                // t is on the live stack: everything above its root joins one SCC
                let mut acc = g.acceptance_mask(&e).to_vec();
                while order[t] < roots.last().unwrap().order {
                    let r = roots.pop().unwrap();
                    or_into(&mut acc, &r.acc);
                    or_into(&mut acc, &r.arc);
                }
                let root = roots.last_mut().unwrap();
                or_into(&mut root.acc, &acc);
                if root.acc == full {
                    let mut allowed = vec![false; g.states.len()];
                    for &x in live.iter().rev() {
                        if order[x] < root.order {
                            break;
                        }
                        allowed[x] = true;
                    }
                    return witness(&g, t, &allowed);
                }
            } else {
                todo.pop();
                if roots.last().unwrap().order == order[s] {
                    roots.pop();
                    while let Some(x) = live.pop() {
                        dead[x] = true;
                        if !subsumed(&g, &empty, &g.states[x]) {
                            empty.push((sig(&g.states[x]), x));
                        }
                        if x == s {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(SatResult::Unsat)
}
