//! Rule expansion (rectification) and non-recursive rule compilation.

use super::analysis::{rules_recursive, stratify};
use crate::kernel::{
    Atom, Clause, CmpOp, FreshCounter, Literal, PredSym, Subst, Term,
};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Puts a rule into expanded form: walking the body's ordinary atoms left to
/// right, every constant and every repeated variable occurrence is replaced
/// by a fresh variable, with the matching equality appended to the body.
/// Built-in literals and the head are left alone. The result is equivalent
/// to the input.
pub fn expand_rule(rule: &Clause, ctr: &mut FreshCounter) -> Clause {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut equalities: Vec<Literal> = Vec::new();
    let mut body: Vec<Literal> = Vec::new();
    for lit in &rule.body {
        if !lit.positive || lit.atom.is_builtin() {
            body.push(lit.clone());
            continue;
        }
        let mut args = Vec::with_capacity(lit.atom.args.len());
        for t in &lit.atom.args {
            match t {
                Term::Var(v) if !seen.contains(v) => {
                    seen.insert(v.clone());
                    args.push(t.clone());
                }
                Term::Var(v) => {
                    let fresh = ctr.fresh();
                    equalities.push(Literal::pos(Atom::cmp(
                        CmpOp::Eq,
                        Term::var(v),
                        Term::var(&fresh),
                    )));
                    args.push(Term::var(&fresh));
                }
                Term::Cst(_) => {
                    let fresh = ctr.fresh();
                    equalities.push(Literal::pos(Atom::cmp(
                        CmpOp::Eq,
                        Term::var(&fresh),
                        t.clone(),
                    )));
                    args.push(Term::var(&fresh));
                }
                Term::Sk(_, _) => args.push(t.clone()),
            }
        }
        body.push(Literal::pos(Atom {
            pred: lit.atom.pred.clone(),
            args,
        }));
    }
    body.extend(equalities);
    Clause {
        head: rule.head.clone(),
        body,
        origin: rule.origin,
        support: rule.support,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileIdbError {
    #[error("derived rules are recursive; bottom-up evaluation is required")]
    CyclicIdb,
    #[error("compilation requires negation-free rules")]
    HasNegation,
}

/// Unfolds a non-recursive, negation-free rule set so that every defined
/// predicate is written over base predicates only. Deduction through the
/// rules then takes a single step.
pub fn compile_idb(idb: &[Clause], ctr: &mut FreshCounter) -> Result<Vec<Clause>, CompileIdbError> {
    if rules_recursive(idb) {
        return Err(CompileIdbError::CyclicIdb);
    }
    if idb.iter().any(|r| r.body.iter().any(|l| !l.positive)) {
        return Err(CompileIdbError::HasNegation);
    }
    let strata = stratify(idb).expect("negation-free rules always stratify");
    // Topological order with one predicate per stratum, so every body
    // predicate is compiled before the rules that use it.
    let order = super::analysis::rescale_strata(idb, &strata);
    let mut rules: Vec<(usize, Clause)> = idb
        .iter()
        .map(|r| (order[&r.head[0].pred.name()], r.clone()))
        .collect();
    rules.sort_by_key(|(s, _)| *s);
    let mut compiled: BTreeMap<String, Vec<Clause>> = BTreeMap::new();
    let mut out: Vec<Clause> = Vec::new();
    for (_, rule) in rules {
        let mut frontier = vec![rule.clone()];
        loop {
            let target = frontier.iter().enumerate().find_map(|(ci, c)| {
                c.body.iter().enumerate().find_map(|(li, l)| {
                    match &l.atom.pred {
                        PredSym::Named(n) if compiled.contains_key(n) => Some((ci, li, n.clone())),
                        _ => None,
                    }
                })
            });
            let (ci, li, pred) = match target {
                Some(t) => t,
                None => break,
            };
            let host = frontier.remove(ci);
            for def in &compiled[&pred] {
                let renamed = crate::kernel::rename_apart(def, ctr);
                let mut subst = Subst::new();
                if !crate::kernel::unify_atoms_under(
                    &host.body[li].atom,
                    &renamed.head[0],
                    &mut subst,
                ) {
                    continue;
                }
                let mut body: Vec<Literal> = host
                    .body
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != li)
                    .map(|(_, l)| subst.apply_literal(l))
                    .collect();
                body.extend(renamed.body.iter().map(|l| subst.apply_literal(l)));
                frontier.push(Clause {
                    head: host.head.iter().map(|a| subst.apply_atom(a)).collect(),
                    body,
                    origin: host.origin,
                    support: host.support,
                });
            }
        }
        let name = rule.head[0].pred.name();
        compiled.entry(name).or_default().extend(frontier.clone());
        out.extend(frontier);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Origin;

    fn atom(name: &str, vars: &[&str]) -> Atom {
        Atom::new(name, vars.iter().map(|v| Term::var(v)).collect())
    }

    #[test]
    fn test_expand_constant() {
        // q(X) :- p1(X,c) becomes q(X) :- p1(X,W), W = c.
        let rule = Clause::rule(
            atom("q", &["X"]),
            vec![Literal::pos(Atom::new(
                "p1",
                vec![Term::var("X"), Term::sym("c")],
            ))],
            Origin::Query,
        );
        let mut ctr = FreshCounter::new();
        let e = expand_rule(&rule, &mut ctr);
        assert_eq!(e.body.len(), 2);
        assert_eq!(e.body[0].to_string(), "p1(X,_V0)");
        assert_eq!(e.body[1].to_string(), "_V0 = c");
    }

    #[test]
    fn test_expand_repeats_and_constants() {
        // Repeated variable across atoms and an embedded constant both get
        // fresh variables with equalities.
        let rule = Clause::rule(
            atom("q", &["P"]),
            vec![
                Literal::pos(Atom::new(
                    "s",
                    vec![
                        Term::var("A"),
                        Term::var("N"),
                        Term::var("D"),
                        Term::sym("mike"),
                        Term::var("C"),
                    ],
                )),
                Literal::pos(Atom::new(
                    "s",
                    vec![
                        Term::var("A"),
                        Term::var("N2"),
                        Term::var("D2"),
                        Term::var("P"),
                        Term::var("C2"),
                    ],
                )),
            ],
            Origin::Query,
        );
        let mut ctr = FreshCounter::new();
        let e = expand_rule(&rule, &mut ctr);
        assert_eq!(e.body.len(), 4);
        assert_eq!(e.body[0].to_string(), "s(A,N,D,_V0,C)");
        assert_eq!(e.body[1].to_string(), "s(_V1,N2,D2,P,C2)");
        assert_eq!(e.body[2].to_string(), "_V0 = mike");
        assert_eq!(e.body[3].to_string(), "A = _V1");
    }

    #[test]
    fn test_expand_noop() {
        let rule = Clause::rule(
            atom("q", &["X"]),
            vec![Literal::pos(atom("p", &["X", "Y"]))],
            Origin::Query,
        );
        let mut ctr = FreshCounter::new();
        assert_eq!(expand_rule(&rule, &mut ctr), rule);
    }

    #[test]
    fn test_compile_two_step_chain() {
        // a(X) :- b(X); b(X) :- e(X) compiles a to a(X) :- e(X).
        let idb = vec![
            Clause::rule(atom("a", &["X"]), vec![Literal::pos(atom("b", &["X"]))], Origin::Idb),
            Clause::rule(atom("b", &["X"]), vec![Literal::pos(atom("e", &["X"]))], Origin::Idb),
        ];
        let mut ctr = FreshCounter::new();
        let out = compile_idb(&idb, &mut ctr).unwrap();
        let a_rules: Vec<_> = out
            .iter()
            .filter(|c| c.head[0].pred.name() == "a")
            .collect();
        assert_eq!(a_rules.len(), 1);
        assert_eq!(a_rules[0].body.len(), 1);
        assert_eq!(a_rules[0].body[0].atom.pred.name(), "e");
    }

    #[test]
    fn test_compile_empty() {
        let mut ctr = FreshCounter::new();
        assert_eq!(compile_idb(&[], &mut ctr).unwrap(), vec![]);
    }

    #[test]
    fn test_compile_rejects_recursion() {
        let idb = vec![Clause::rule(
            atom("a", &["X"]),
            vec![Literal::pos(atom("a", &["X"]))],
            Origin::Idb,
        )];
        let mut ctr = FreshCounter::new();
        assert_eq!(compile_idb(&idb, &mut ctr), Err(CompileIdbError::CyclicIdb));
    }
}
