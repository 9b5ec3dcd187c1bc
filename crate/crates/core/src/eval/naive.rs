//! Naive stratified fixpoint evaluation: every rule is recomputed in full
//! each round. This is the reference semantics the property suites compare
//! against, so it shares no join or delta machinery with the semi-naive
//! path.

use super::{AnswerSet, FactStore, GroundTerm, Tuple};
use crate::kernel::{eval_ground, Atom, Clause, CmpOp, Term};
use crate::program::analysis::stratify;
use crate::program::QueryDef;
use std::collections::BTreeMap;

type Bindings = BTreeMap<String, GroundTerm>;

/// Answers a query by naive fixpoint over the given rules and facts,
/// returning only all-constant tuples.
pub fn naive_answers(
    rules: &[Clause],
    base: &FactStore,
    query: &QueryDef,
) -> Result<AnswerSet, super::EvalError> {
    let mut all_rules = rules.to_vec();
    all_rules.extend(query.rules.iter().cloned());
    let store = naive_fixpoint(&all_rules, base)?;
    Ok(super::filter_answers(&store, query))
}

pub fn naive_fixpoint(rules: &[Clause], base: &FactStore) -> Result<FactStore, super::EvalError> {
    let strata = stratify(rules).map_err(super::EvalError::NotStratified)?;
    let max = strata.values().copied().max().unwrap_or(0);
    let mut store = base.clone();
    for level in 0..=max {
        let level_rules: Vec<&Clause> = rules
            .iter()
            .filter(|r| strata.get(&r.head[0].pred.name()).copied().unwrap_or(0) == level)
            .collect();
        loop {
            let mut grew = false;
            for rule in &level_rules {
                let mut solutions = Vec::new();
                enumerate(&rule.body, 0, Bindings::new(), &store, &mut solutions);
                for b in solutions {
                    let tuple: Tuple = rule.head[0]
                        .args
                        .iter()
                        .map(|t| ground(t, &b).expect("safe rules ground their heads"))
                        .collect();
                    if store.insert(&rule.head[0].pred.name(), tuple) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
    Ok(store)
}

/// Plain left-to-right enumeration with deferral: a literal whose variables
/// are not yet bound is pushed to the end of the work list.
fn enumerate(
    body: &[crate::kernel::Literal],
    _depth: usize,
    bindings: Bindings,
    store: &FactStore,
    out: &mut Vec<Bindings>,
) {
    // Work on an index list so deferred literals retry after others bind.
    let mut pending: Vec<usize> = (0..body.len()).collect();
    solve(body, &mut pending, bindings, store, out);
}

fn solve(
    body: &[crate::kernel::Literal],
    pending: &mut Vec<usize>,
    bindings: Bindings,
    store: &FactStore,
    out: &mut Vec<Bindings>,
) {
    if pending.is_empty() {
        out.push(bindings);
        return;
    }
    // Pick the first literal that is ready: positive ordinary literals are
    // always ready; negation and comparisons wait for their variables.
    let ready = pending.iter().position(|&i| {
        let l = &body[i];
        if l.positive && !l.atom.is_builtin() {
            return true;
        }
        if l.positive && l.atom.builtin_op() == Some(CmpOp::Eq) {
            // An equality is ready when one side is ground under bindings.
            return l.atom.args.iter().any(|t| ground(t, &bindings).is_some());
        }
        l.atom.vars().iter().all(|v| bindings.contains_key(v))
    });
    let pos = match ready {
        Some(p) => p,
        None => return,
    };
    let idx = pending.remove(pos);
    let lit = &body[idx];
    if lit.atom.is_builtin() {
        let lhs = ground(&lit.atom.args[0], &bindings);
        let rhs = ground(&lit.atom.args[1], &bindings);
        let op = lit.atom.builtin_op().unwrap();
        match (lhs, rhs) {
            (Some(l), Some(r)) => {
                if builtin_holds(op, &l, &r) {
                    solve(body, pending, bindings, store, out);
                }
            }
            // One side of an equality binds the other.
            (Some(l), None) if op == CmpOp::Eq => {
                if let Term::Var(v) = &lit.atom.args[1] {
                    let mut next = bindings.clone();
                    next.insert(v.clone(), l);
                    solve(body, pending, next, store, out);
                }
            }
            (None, Some(r)) if op == CmpOp::Eq => {
                if let Term::Var(v) = &lit.atom.args[0] {
                    let mut next = bindings.clone();
                    next.insert(v.clone(), r);
                    solve(body, pending, next, store, out);
                }
            }
            _ => {}
        }
        pending.insert(pos, idx);
        return;
    }
    if !lit.positive {
        let tuple: Option<Tuple> = lit.atom.args.iter().map(|t| ground(t, &bindings)).collect();
        if let Some(tuple) = tuple {
            if !store.contains(&lit.atom.pred.name(), &tuple) {
                solve(body, pending, bindings, store, out);
            }
        }
        pending.insert(pos, idx);
        return;
    }
    for tuple in store.get(&lit.atom.pred.name()) {
        if let Some(next) = extend(&lit.atom, tuple, &bindings) {
            solve(body, pending, next, store, out);
        }
    }
    pending.insert(pos, idx);
}

fn extend(atom: &Atom, tuple: &Tuple, bindings: &Bindings) -> Option<Bindings> {
    if atom.args.len() != tuple.len() {
        return None;
    }
    let mut next = bindings.clone();
    for (t, g) in atom.args.iter().zip(tuple) {
        match t {
            Term::Var(v) => {
                if let Some(existing) = next.get(v) {
                    if existing != g {
                        return None;
                    }
                } else {
                    next.insert(v.clone(), g.clone());
                }
            }
            Term::Cst(c) => {
                if GroundTerm::Cst(c.clone()) != *g {
                    return None;
                }
            }
            Term::Sk(_, _) => return None,
        }
    }
    Some(next)
}

fn ground(t: &Term, bindings: &Bindings) -> Option<GroundTerm> {
    match t {
        Term::Var(v) => bindings.get(v).cloned(),
        Term::Cst(c) => Some(GroundTerm::Cst(c.clone())),
        Term::Sk(_, _) => None,
    }
}

fn builtin_holds(op: CmpOp, l: &GroundTerm, r: &GroundTerm) -> bool {
    match (l, r) {
        (GroundTerm::Cst(_), GroundTerm::Cst(_)) => {
            eval_ground(op, &l.to_term(), &r.to_term()).unwrap_or(false)
        }
        _ => match op {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn test_join_with_comparison() {
        // Matches hand evaluation: only the row with Z = 2 > 1 and a
        // matching p3 row answers.
        let p = parse_program(
            "#edb\np1/3. p2/2. p3/2.\n#facts\np1(a,b,2). p2(a,c). p3(a,b).\n#query\nq(X,Y) :- p1(X,Y,Z), p2(X,U), p3(X,Y), Z > 1.\n",
        )
        .program
        .unwrap();
        let query = p.query.clone().unwrap();
        let base = FactStore::from_facts(&p.facts);
        let answers = naive_answers(&[], &base, &query).unwrap();
        assert_eq!(crate::eval::format_answers(&answers), "(a,b)");
    }

    #[test]
    fn test_empty_facts() {
        let p = parse_program("#edb\np/1.\n#query\nq(X) :- p(X).\n")
            .program
            .unwrap();
        let answers = naive_answers(&[], &FactStore::new(), &p.query.unwrap()).unwrap();
        assert!(answers.is_empty());
    }

    #[test]
    fn test_matches_seminaive_on_closure() {
        let p = parse_program(
            "#edb\nedge/2.\n#facts\nedge(a,b). edge(b,c). edge(c,a).\n#query\nq(X,Y) :- edge(X,Y).\nq(X,Y) :- edge(X,Z), q(Z,Y).\n",
        )
        .program
        .unwrap();
        let query = p.query.clone().unwrap();
        let base = FactStore::from_facts(&p.facts);
        let naive = naive_answers(&[], &base, &query).unwrap();
        let semi = super::super::seminaive(&query.rules, &base).unwrap();
        let semi = crate::eval::filter_answers(&semi, &query);
        assert_eq!(naive, semi);
        assert_eq!(naive.len(), 9);
    }
}
