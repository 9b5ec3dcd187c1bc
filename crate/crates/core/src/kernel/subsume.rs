//! Clause subsumption with built-in comparison awareness.

use super::builtin::builtin_implies;
use super::clause::{Atom, Clause, Literal};
use super::ops::{rename_apart, FreshCounter};
use super::subst::Subst;
use super::term::Term;

/// True when some substitution maps every literal of `c` onto a literal of
/// `d` of the same polarity (as sets, so collapsing is allowed). Matching is
/// one-way: only variables of `c` are instantiated. A built-in body literal
/// of `c` may also land on a strictly stronger built-in of `d`: whenever the
/// stronger constraint holds, the mapped literal holds too, so `c` still
/// entails `d`.
pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    let mut ctr = FreshCounter::above(c.vars().into_iter().chain(d.vars()));
    let c = rename_apart(c, &mut ctr);
    let pattern_vars = c.vars();
    let mut subst = Subst::new();
    match_heads(&c.head, &c.body, d, &pattern_vars, &mut subst)
}

type VarSet = std::collections::BTreeSet<String>;

fn match_heads(
    heads: &[Atom],
    body: &[Literal],
    d: &Clause,
    pvars: &VarSet,
    subst: &mut Subst,
) -> bool {
    match heads.split_first() {
        None => match_body(body, d, pvars, subst),
        Some((first, rest)) => {
            for target in &d.head {
                let saved = subst.clone();
                if match_atom(first, target, pvars, subst)
                    && match_heads(rest, body, d, pvars, subst)
                {
                    return true;
                }
                *subst = saved;
            }
            false
        }
    }
}

fn match_body(body: &[Literal], d: &Clause, pvars: &VarSet, subst: &mut Subst) -> bool {
    let (first, rest) = match body.split_first() {
        None => return true,
        Some(x) => x,
    };
    for target in &d.body {
        if target.positive != first.positive {
            continue;
        }
        let saved = subst.clone();
        if match_atom(&first.atom, &target.atom, pvars, subst)
            && match_body(rest, d, pvars, subst)
        {
            return true;
        }
        *subst = saved;
        // A built-in literal is also covered by any stronger built-in.
        if first.atom.is_builtin() && target.atom.is_builtin() {
            let mapped = subst.apply_atom(&first.atom);
            if mapped.vars().is_empty() || mapped.vars() == target.atom.vars() {
                if builtin_implies(&target.atom, &mapped) && match_body(rest, d, pvars, subst) {
                    return true;
                }
            }
        }
    }
    false
}

fn match_atom(pat: &Atom, tgt: &Atom, pvars: &VarSet, subst: &mut Subst) -> bool {
    pat.pred == tgt.pred
        && pat.args.len() == tgt.args.len()
        && pat
            .args
            .iter()
            .zip(&tgt.args)
            .all(|(p, t)| match_term(p, t, pvars, subst))
}

/// One-way matching: only variables of the pattern bind; a target variable
/// surfacing inside the pattern image must match itself exactly.
fn match_term(pat: &Term, tgt: &Term, pvars: &VarSet, subst: &mut Subst) -> bool {
    let pat = subst.apply_term(pat);
    match (&pat, tgt) {
        (Term::Var(v), t) => {
            if pvars.contains(v) {
                subst.bind(v, t)
            } else {
                *t == pat
            }
        }
        (Term::Cst(a), Term::Cst(b)) => a == b,
        (Term::Sk(f, fa), Term::Sk(g, ga)) => {
            f == g
                && fa.len() == ga.len()
                && fa.iter().zip(ga).all(|(p, t)| match_term(p, t, pvars, subst))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::clause::{CmpOp, Origin};

    fn lit(name: &str, args: Vec<Term>) -> Literal {
        Literal::pos(Atom::new(name, args))
    }

    #[test]
    fn test_denial_subsumes_query() {
        // :- p2(X,U), p3(X,Y) subsumes the larger goal, which means that
        // goal can have no answers.
        let ic = Clause::new(
            vec![],
            vec![
                lit("p2", vec![Term::var("X"), Term::var("U")]),
                lit("p3", vec![Term::var("X"), Term::var("Y")]),
            ],
            Origin::Ic,
        );
        let query = Clause::goal(vec![
            lit("p1", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]),
            lit("p2", vec![Term::var("X"), Term::var("U")]),
            lit("p3", vec![Term::var("X"), Term::var("Y")]),
            Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Z"), Term::int(1))),
        ]);
        assert!(subsumes(&ic, &query));
        assert!(!subsumes(&query, &ic));
    }

    #[test]
    fn test_reflexive() {
        let c = Clause::goal(vec![lit("p", vec![Term::var("X")])]);
        assert!(subsumes(&c, &c));
    }

    #[test]
    fn test_constant_clash() {
        let a = Clause::goal(vec![lit("p", vec![Term::sym("a")])]);
        let b = Clause::goal(vec![lit("p", vec![Term::sym("b")])]);
        assert!(!subsumes(&a, &b));
    }

    #[test]
    fn test_matching_is_one_way() {
        // :- p(a) does not subsume :- p(Y): the target variable must not
        // be instantiated.
        let ground = Clause::goal(vec![lit("p", vec![Term::sym("a")])]);
        let general = Clause::goal(vec![lit("p", vec![Term::var("Y")])]);
        assert!(!subsumes(&ground, &general));
        assert!(subsumes(&general, &ground));
    }

    #[test]
    fn test_builtin_covering() {
        // :- p(X), X > 0 subsumes :- p(X), X > 1 because X > 1 is stronger.
        let weak = Clause::goal(vec![
            lit("p", vec![Term::var("X")]),
            Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("X"), Term::int(0))),
        ]);
        let strong = Clause::goal(vec![
            lit("p", vec![Term::var("Y")]),
            Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Y"), Term::int(1))),
        ]);
        assert!(subsumes(&weak, &strong));
        assert!(!subsumes(&strong, &weak));
    }
}
