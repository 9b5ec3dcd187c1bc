//! Clause-level operations: renaming apart, binary resolution, factoring,
//! and variant equality.

use super::clause::{Atom, Clause, Literal, Origin};
use super::subst::Subst;
use super::term::Term;
use super::unify::{unify_atoms, unify_atoms_under};
use std::collections::BTreeMap;

/// Monotone source of fresh variable names `_V<n>`. A run keeps a single
/// counter so derivations are reproducible.
#[derive(Clone, Debug, Default)]
pub struct FreshCounter {
    next: u64,
}

impl FreshCounter {
    pub fn new() -> FreshCounter {
        FreshCounter { next: 0 }
    }

    /// Starts the counter above any `_V<n>` already present, so fresh names
    /// never collide with user variables.
    pub fn above(vars: impl Iterator<Item = String>) -> FreshCounter {
        let mut next = 0;
        for v in vars {
            if let Some(rest) = v.strip_prefix("_V") {
                if let Ok(n) = rest.parse::<u64>() {
                    next = next.max(n + 1);
                }
            }
        }
        FreshCounter { next }
    }

    pub fn fresh(&mut self) -> String {
        let name = format!("_V{}", self.next);
        self.next += 1;
        name
    }
}

/// Replaces every variable in the clause with a globally fresh one.
pub fn rename_apart(c: &Clause, ctr: &mut FreshCounter) -> Clause {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for v in c.vars() {
        map.insert(v, ctr.fresh());
    }
    fn term(t: &Term, map: &BTreeMap<String, String>) -> Term {
        match t {
            Term::Var(v) => Term::Var(map[v].clone()),
            Term::Cst(_) => t.clone(),
            Term::Sk(f, args) => {
                Term::Sk(f.clone(), args.iter().map(|a| term(a, map)).collect())
            }
        }
    }
    let atom = |a: &Atom| Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| term(t, &map)).collect(),
    };
    Clause {
        head: c.head.iter().map(atom).collect(),
        body: c
            .body
            .iter()
            .map(|l| Literal {
                atom: atom(&l.atom),
                positive: l.positive,
            })
            .collect(),
        origin: c.origin,
        support: c.support,
    }
}

/// Binary resolution. `neg` contributes a positive body literal at
/// `body_idx`; `pos` contributes the head atom at `head_idx`. The clauses
/// must already be renamed apart. The resolvent keeps everything else from
/// both clauses under the unifier, with origin `Derived`, and is supported
/// if either parent was.
pub fn resolve(
    neg: &Clause,
    body_idx: usize,
    pos: &Clause,
    head_idx: usize,
) -> Option<(Clause, Subst)> {
    let lit = &neg.body[body_idx];
    if !lit.positive {
        return None;
    }
    let mgu = unify_atoms(&lit.atom, &pos.head[head_idx])?;
    let mut head: Vec<Atom> = neg.head.iter().map(|a| mgu.apply_atom(a)).collect();
    head.extend(
        pos.head
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != head_idx)
            .map(|(_, a)| mgu.apply_atom(a)),
    );
    let mut body: Vec<Literal> = neg
        .body
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != body_idx)
        .map(|(_, l)| mgu.apply_literal(l))
        .collect();
    body.extend(pos.body.iter().map(|l| mgu.apply_literal(l)));
    let clause = Clause {
        head,
        body,
        origin: Origin::Derived,
        support: neg.support || pos.support,
    };
    Some((clause, mgu))
}

/// Merges unifiable duplicate atoms within the head and within the body
/// until none remain. Leftmost pairs are merged first, so the result is
/// deterministic, and a second application is the identity.
pub fn factor(c: &Clause) -> Clause {
    let mut out = c.clone();
    loop {
        let mut merged = false;
        'outer: for i in 0..out.head.len() {
            for j in (i + 1)..out.head.len() {
                if let Some(mgu) = unify_atoms(&out.head[i], &out.head[j]) {
                    out.head.remove(j);
                    out = mgu.apply_clause(&out);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if merged {
            continue;
        }
        'outer2: for i in 0..out.body.len() {
            for j in (i + 1)..out.body.len() {
                if out.body[i].positive == out.body[j].positive {
                    let mut s = Subst::new();
                    if unify_atoms_under(&out.body[i].atom, &out.body[j].atom, &mut s) {
                        out.body.remove(j);
                        out = s.apply_clause(&out);
                        merged = true;
                        break 'outer2;
                    }
                }
            }
        }
        if !merged {
            return out;
        }
    }
}

/// Removes exact duplicate head atoms and body literals, keeping first
/// occurrences. Unlike `factor` this never instantiates variables.
pub fn dedup_exact(c: &Clause) -> Clause {
    let mut head: Vec<Atom> = Vec::new();
    for a in &c.head {
        if !head.contains(a) {
            head.push(a.clone());
        }
    }
    let mut body: Vec<Literal> = Vec::new();
    for l in &c.body {
        if !body.contains(l) {
            body.push(l.clone());
        }
    }
    Clause {
        head,
        body,
        origin: c.origin,
        support: c.support,
    }
}

/// True when the clauses are equal up to a bijective variable renaming,
/// treating heads and bodies as multisets.
pub fn variant_eq(a: &Clause, b: &Clause) -> bool {
    if a.head.len() != b.head.len() || a.body.len() != b.body.len() {
        return false;
    }
    if a.vars().len() != b.vars().len() {
        return false;
    }
    let mut fwd: BTreeMap<String, String> = BTreeMap::new();
    let mut bwd: BTreeMap<String, String> = BTreeMap::new();
    match_atom_multiset(&a.head, &b.head, &mut fwd, &mut bwd)
        && match_literal_multiset(&a.body, &b.body, &mut fwd, &mut bwd)
}

fn match_atom_multiset(
    xs: &[Atom],
    ys: &[Atom],
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    if xs.is_empty() {
        return ys.is_empty();
    }
    let x = &xs[0];
    for (i, y) in ys.iter().enumerate() {
        let save_fwd = fwd.clone();
        let save_bwd = bwd.clone();
        if match_atoms(x, y, fwd, bwd) {
            let rest: Vec<Atom> = ys
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, a)| a.clone())
                .collect();
            if match_atom_multiset(&xs[1..], &rest, fwd, bwd) {
                return true;
            }
        }
        *fwd = save_fwd;
        *bwd = save_bwd;
    }
    false
}

fn match_literal_multiset(
    xs: &[Literal],
    ys: &[Literal],
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    if xs.is_empty() {
        return ys.is_empty();
    }
    let x = &xs[0];
    for (i, y) in ys.iter().enumerate() {
        if x.positive != y.positive {
            continue;
        }
        let save_fwd = fwd.clone();
        let save_bwd = bwd.clone();
        if match_atoms(&x.atom, &y.atom, fwd, bwd) {
            let rest: Vec<Literal> = ys
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, l)| l.clone())
                .collect();
            if match_literal_multiset(&xs[1..], &rest, fwd, bwd) {
                return true;
            }
        }
        *fwd = save_fwd;
        *bwd = save_bwd;
    }
    false
}

fn match_atoms(
    a: &Atom,
    b: &Atom,
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    a.pred == b.pred
        && a.args.len() == b.args.len()
        && a.args
            .iter()
            .zip(&b.args)
            .all(|(x, y)| match_terms(x, y, fwd, bwd))
}

fn match_terms(
    a: &Term,
    b: &Term,
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            match (fwd.get(x), bwd.get(y)) {
                (Some(mapped), Some(back)) => mapped == y && back == x,
                (None, None) => {
                    fwd.insert(x.clone(), y.clone());
                    bwd.insert(y.clone(), x.clone());
                    true
                }
                _ => false,
            }
        }
        (Term::Cst(c), Term::Cst(d)) => c == d,
        (Term::Sk(f, fa), Term::Sk(g, ga)) => {
            f == g
                && fa.len() == ga.len()
                && fa.iter().zip(ga).all(|(x, y)| match_terms(x, y, fwd, bwd))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::clause::CmpOp;

    fn lit(name: &str, args: Vec<Term>) -> Literal {
        Literal::pos(Atom::new(name, args))
    }

    #[test]
    fn test_rename_apart() {
        let c = Clause::rule(
            Atom::new("p", vec![Term::var("X")]),
            vec![lit("q", vec![Term::var("X"), Term::var("Y")])],
            Origin::Idb,
        );
        let mut ctr = FreshCounter { next: 7 };
        let r = rename_apart(&c, &mut ctr);
        assert_eq!(r.head[0].to_string(), "p(_V7)");
        assert_eq!(r.body[0].to_string(), "q(_V7,_V8)");
    }

    #[test]
    fn test_rename_ground_unchanged() {
        let c = Clause::fact(Atom::new("p", vec![Term::sym("a")]));
        let mut ctr = FreshCounter::new();
        assert_eq!(rename_apart(&c, &mut ctr), c);
    }

    #[test]
    fn test_rename_twice_disjoint() {
        let c = Clause::rule(
            Atom::new("p", vec![Term::var("X")]),
            vec![lit("q", vec![Term::var("X"), Term::var("Y")])],
            Origin::Idb,
        );
        let mut ctr = FreshCounter::new();
        let a = rename_apart(&c, &mut ctr);
        let b = rename_apart(&c, &mut ctr);
        assert!(a.vars().intersection(&b.vars()).next().is_none());
        assert!(variant_eq(&a, &b));
    }

    #[test]
    fn test_resolve_drops_both_resolved_literals() {
        // Goal with p3 selected against an input whose head is p3.
        let goal = Clause::goal(vec![
            lit("p1", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]),
            lit("p3", vec![Term::var("X"), Term::var("Y")]),
            Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Z"), Term::int(1))),
        ]);
        let input = Clause::rule(
            Atom::new("p3", vec![Term::var("X1"), Term::var("Y1")]),
            vec![
                lit("p1", vec![Term::var("X1"), Term::var("Y1"), Term::var("Z1")]),
                Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Z1"), Term::int(0))),
            ],
            Origin::Ic,
        );
        let (r, _mgu) = resolve(&goal, 1, &input, 0).unwrap();
        assert!(r.head.is_empty());
        assert_eq!(r.body.len(), 4);
        assert_eq!(r.body[0].to_string(), "p1(X,Y,Z)");
        assert_eq!(r.body[2].to_string(), "p1(X,Y,Z1)");
        assert_eq!(r.origin, Origin::Derived);
    }

    #[test]
    fn test_resolve_with_fact() {
        let goal = Clause::goal(vec![lit("r", vec![Term::var("X")])]);
        let fact = Clause::fact(Atom::new("r", vec![Term::sym("a")]));
        let (r, _) = resolve(&goal, 0, &fact, 0).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn test_resolve_requires_unifier() {
        let goal = Clause::goal(vec![lit("r", vec![Term::sym("b")])]);
        let fact = Clause::fact(Atom::new("r", vec![Term::sym("a")]));
        assert!(resolve(&goal, 0, &fact, 0).is_none());
    }

    #[test]
    fn test_factor_merges_duplicates() {
        let c = Clause::goal(vec![
            lit("r", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]),
            lit("r", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]),
            Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Z"), Term::int(1))),
        ]);
        let f = factor(&c);
        assert_eq!(f.body.len(), 2);
    }

    #[test]
    fn test_factor_noop() {
        let c = Clause::goal(vec![lit("r", vec![Term::var("X"), Term::var("Y")])]);
        assert_eq!(factor(&c), c);
    }

    #[test]
    fn test_factor_head_and_body() {
        // p7(X,Y) | p7(X,Y) :- r2(X,Y), r2(X,Y) collapses on both sides.
        let c = Clause::new(
            vec![
                Atom::new("p7", vec![Term::var("X"), Term::var("Y")]),
                Atom::new("p7", vec![Term::var("X"), Term::var("Y")]),
            ],
            vec![
                lit("r2", vec![Term::var("X"), Term::var("Y")]),
                lit("r2", vec![Term::var("X"), Term::var("Y")]),
            ],
            Origin::Derived,
        );
        let f = factor(&c);
        assert_eq!(f.head.len(), 1);
        assert_eq!(f.body.len(), 1);
    }

    #[test]
    fn test_variant_eq() {
        let a = Clause::goal(vec![
            lit("r1", vec![Term::var("X"), Term::var("Y"), Term::var("W4")]),
            lit("r2", vec![Term::var("X"), Term::var("W6"), Term::var("Y")]),
        ]);
        let b = Clause::goal(vec![
            lit("r2", vec![Term::var("A"), Term::var("B"), Term::var("C")]),
            lit("r1", vec![Term::var("A"), Term::var("C"), Term::var("D")]),
        ]);
        assert!(variant_eq(&a, &b));
        let c = Clause::goal(vec![
            lit("r1", vec![Term::var("X"), Term::var("Y"), Term::var("W4")]),
            lit("r2", vec![Term::var("X"), Term::var("W6"), Term::var("X")]),
        ]);
        assert!(!variant_eq(&a, &c));
    }
}
