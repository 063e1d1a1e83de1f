use crate::syntax::Formula;

/// Negation normal form: negation only on atoms, `->`/`<->` desugared,
/// `F g` as `true U g` and `G g` as `false R g`. Constants are folded and
/// operators with identical operands collapsed on the way.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, x) | (x, Formula::True) => x,
        (a, b) if a == b => a,
        (a, b) => Formula::and(a, b),
    }
}

fn or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, x) | (x, Formula::False) => x,
        (a, b) if a == b => a,
        (a, b) => Formula::or(a, b),
    }
}

fn next(x: Formula) -> Formula {
    match x {
        Formula::True | Formula::False => x,
        x => Formula::next(x),
    }
}

fn until(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (_, b @ (Formula::True | Formula::False)) => b,
        (Formula::False, b) => b,
        (a, b) if a == b => a,
        // a U F b = F b, F (a U b) = F b
        (_, b @ Formula::Until(..)) if matches!(&b, Formula::Until(t, _) if **t == Formula::True) => b,
        (Formula::True, Formula::Until(_, b)) => Formula::until(Formula::True, *b),
        (a, b) => Formula::until(a, b),
    }
}

fn release(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (_, b @ (Formula::True | Formula::False)) => b,
        (Formula::True, b) => b,
        (a, b) if a == b => a,
        // a R G b = G b, G (a R b) = G b
        (_, b @ Formula::Release(..)) if matches!(&b, Formula::Release(f, _) if **f == Formula::False) => b,
        (Formula::False, Formula::Release(_, b)) => Formula::release(Formula::False, *b),
        (a, b) => Formula::release(a, b),
    }
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    use Formula::*;
    match (f, negate) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(a), false) => Atom(a.clone()),
        (Atom(a), true) => Formula::not(Atom(a.clone())),
        (Not(x), n) => nnf(x, !n),
        (And(a, b), false) => and(nnf(a, false), nnf(b, false)),
        (And(a, b), true) => or(nnf(a, true), nnf(b, true)),
        (Or(a, b), false) => or(nnf(a, false), nnf(b, false)),
        (Or(a, b), true) => and(nnf(a, true), nnf(b, true)),
        (Implies(a, b), false) => or(nnf(a, true), nnf(b, false)),
        (Implies(a, b), true) => and(nnf(a, false), nnf(b, true)),
        (Iff(a, b), false) => or(
            and(nnf(a, false), nnf(b, false)),
            and(nnf(a, true), nnf(b, true)),
        ),
        (Iff(a, b), true) => or(
            and(nnf(a, false), nnf(b, true)),
            and(nnf(a, true), nnf(b, false)),
        ),
        (Next(x), n) => next(nnf(x, n)),
        (Eventually(x), false) => until(True, nnf(x, false)),
        (Eventually(x), true) => release(False, nnf(x, true)),
        (Always(x), false) => release(False, nnf(x, false)),
        (Always(x), true) => until(True, nnf(x, true)),
        (Until(a, b), false) => until(nnf(a, false), nnf(b, false)),
        (Until(a, b), true) => release(nnf(a, true), nnf(b, true)),
        (Release(a, b), false) => release(nnf(a, false), nnf(b, false)),
        (Release(a, b), true) => until(nnf(a, true), nnf(b, true)),
    }
}

/// True when the formula only uses the constructors [`to_nnf`] produces.
pub fn is_nnf(f: &Formula) -> bool {
    use Formula::*;
    match f {
        True | False | Atom(_) => true,
        Not(x) => matches!(**x, Atom(_)),
        And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => is_nnf(a) && is_nnf(b),
        Next(x) => is_nnf(x),
        Implies(..) | Iff(..) | Eventually(_) | Always(_) => false,
    }
}
