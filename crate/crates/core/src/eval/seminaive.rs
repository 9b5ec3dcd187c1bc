//! Stratified semi-naive fixpoint evaluation. Within each stratum only rule
//! instantiations touching the previous round's delta are recomputed;
//! default negation consults the completed lower strata.

use super::{FactStore, GroundTerm, Tuple};
use crate::kernel::{eval_ground, Atom, Clause, Literal, PredSym, Term};
use crate::program::analysis::stratify;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("recursion through negation: {0:?}")]
    NotStratified(Vec<String>),
    #[error("rule `{0}` cannot be evaluated: unbound variables in `{1}`")]
    Unbound(String, String),
}

type Bindings = BTreeMap<String, GroundTerm>;

/// Runs every rule to fixpoint over the base facts, stratum by stratum, and
/// returns the store extended with all derived facts.
pub fn seminaive(rules: &[Clause], base: &FactStore) -> Result<FactStore, EvalError> {
    let strata = stratify(rules).map_err(EvalError::NotStratified)?;
    let max = strata.values().copied().max().unwrap_or(0);
    let mut store = base.clone();
    for level in 0..=max {
        let level_rules: Vec<&Clause> = rules
            .iter()
            .filter(|r| strata.get(&r.head[0].pred.name()).copied().unwrap_or(0) == level)
            .collect();
        if level_rules.is_empty() {
            continue;
        }
        let level_preds: Vec<String> =
            level_rules.iter().map(|r| r.head[0].pred.name()).collect();
        // First round: full evaluation.
        let mut delta = FactStore::new();
        for rule in &level_rules {
            for tuple in eval_rule(rule, &store, None, &level_preds)? {
                if !store.contains(&rule.head[0].pred.name(), &tuple) {
                    delta.insert(&rule.head[0].pred.name(), tuple);
                }
            }
        }
        store.merge(&delta);
        // Delta rounds: at least one same-stratum literal matches the delta.
        while !delta.is_empty() {
            let mut next = FactStore::new();
            for rule in &level_rules {
                for tuple in eval_rule(rule, &store, Some(&delta), &level_preds)? {
                    if !store.contains(&rule.head[0].pred.name(), &tuple) {
                        next.insert(&rule.head[0].pred.name(), tuple);
                    }
                }
            }
            store.merge(&next);
            delta = next;
        }
    }
    store.assert_no_nested_nulls();
    Ok(store)
}

/// Evaluates one rule against the store. With `delta` set, only
/// instantiations where some recursive (same-stratum) positive literal is
/// matched against the delta are produced.
fn eval_rule(
    rule: &Clause,
    store: &FactStore,
    delta: Option<&FactStore>,
    level_preds: &[String],
) -> Result<Vec<Tuple>, EvalError> {
    let recursive_positions: Vec<usize> = rule
        .body
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            l.positive
                && matches!(&l.atom.pred, PredSym::Named(n) if level_preds.contains(n))
        })
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    let variants: Vec<Option<usize>> = match delta {
        None => vec![None],
        Some(_) if recursive_positions.is_empty() => vec![],
        Some(_) => recursive_positions.iter().map(|i| Some(*i)).collect(),
    };
    for delta_at in variants {
        let mut results = Vec::new();
        join(
            rule,
            &order_body(rule)?,
            0,
            Bindings::new(),
            store,
            delta,
            delta_at,
            &mut results,
        );
        for b in results {
            let tuple: Tuple = rule.head[0]
                .args
                .iter()
                .map(|t| instantiate(t, &b))
                .collect::<Option<Tuple>>()
                .ok_or_else(|| {
                    EvalError::Unbound(
                        crate::parser::format_clause(rule),
                        rule.head[0].to_string(),
                    )
                })?;
            out.push(tuple);
        }
    }
    Ok(out)
}

/// Orders the body so every negative or built-in literal comes after the
/// positive literals that bind its variables. Safety guarantees an order
/// exists.
fn order_body(rule: &Clause) -> Result<Vec<usize>, EvalError> {
    let mut remaining: Vec<usize> = (0..rule.body.len()).collect();
    let mut bound: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .position(|&i| {
                let l = &rule.body[i];
                if l.positive && !l.atom.is_builtin() {
                    true
                } else {
                    l.atom.vars().iter().all(|v| bound.contains(v))
                }
            })
            .or_else(|| {
                // An equality literal can bind a variable from a bound side.
                remaining.iter().position(|&i| {
                    let l = &rule.body[i];
                    l.positive
                        && l.atom.builtin_op() == Some(crate::kernel::CmpOp::Eq)
                        && l.atom.args.iter().any(|t| match t {
                            Term::Var(v) => bound.contains(v),
                            Term::Cst(_) => true,
                            _ => false,
                        })
                })
            })
            .ok_or_else(|| {
                EvalError::Unbound(
                    crate::parser::format_clause(rule),
                    "body cannot be ordered".into(),
                )
            })?;
        let idx = remaining.remove(pick);
        rule.body[idx].atom.collect_vars(&mut bound);
        order.push(idx);
    }
    Ok(order)
}

#[allow(clippy::too_many_arguments)]
fn join(
    rule: &Clause,
    order: &[usize],
    at: usize,
    bindings: Bindings,
    store: &FactStore,
    delta: Option<&FactStore>,
    delta_at: Option<usize>,
    out: &mut Vec<Bindings>,
) {
    if at == order.len() {
        out.push(bindings);
        return;
    }
    let idx = order[at];
    let lit = &rule.body[idx];
    if lit.atom.is_builtin() {
        if eval_builtin(&lit.atom, &bindings) == Some(lit.positive) {
            join(rule, order, at + 1, bindings, store, delta, delta_at, out);
        }
        return;
    }
    if !lit.positive {
        // Default negation against the completed lower strata.
        let tuple: Option<Tuple> = lit.atom.args.iter().map(|t| instantiate(t, &bindings)).collect();
        if let Some(tuple) = tuple {
            if !store.contains(&lit.atom.pred.name(), &tuple) {
                join(rule, order, at + 1, bindings, store, delta, delta_at, out);
            }
        }
        return;
    }
    let source: Box<dyn Iterator<Item = &Tuple>> = if delta_at == Some(idx) {
        Box::new(delta.expect("delta set when delta_at is").get(&lit.atom.pred.name()))
    } else {
        Box::new(store.get(&lit.atom.pred.name()))
    };
    for tuple in source {
        if let Some(next) = match_atom(&lit.atom, tuple, &bindings) {
            join(rule, order, at + 1, next, store, delta, delta_at, out);
        }
    }
}

fn match_atom(atom: &Atom, tuple: &Tuple, bindings: &Bindings) -> Option<Bindings> {
    if atom.args.len() != tuple.len() {
        return None;
    }
    let mut next = bindings.clone();
    for (t, g) in atom.args.iter().zip(tuple) {
        match t {
            Term::Var(v) => match next.get(v) {
                Some(existing) if existing != g => return None,
                Some(_) => {}
                None => {
                    next.insert(v.clone(), g.clone());
                }
            },
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

fn instantiate(t: &Term, bindings: &Bindings) -> Option<GroundTerm> {
    match t {
        Term::Var(v) => bindings.get(v).cloned(),
        Term::Cst(c) => Some(GroundTerm::Cst(c.clone())),
        Term::Sk(_, _) => None,
    }
}

fn eval_builtin(atom: &Atom, bindings: &Bindings) -> Option<bool> {
    let op = atom.builtin_op()?;
    let l = instantiate(&atom.args[0], bindings)?;
    let r = instantiate(&atom.args[1], bindings)?;
    match (&l, &r) {
        (GroundTerm::Cst(_), GroundTerm::Cst(_)) => {
            eval_ground(op, &l.to_term(), &r.to_term())
        }
        // Nulls compare only by identity.
        _ => match op {
            crate::kernel::CmpOp::Eq => Some(l == r),
            crate::kernel::CmpOp::Ne => Some(l != r),
            _ => Some(false),
        },
    }
}

/// Evaluates a single goal body over a store, returning the bindings of the
/// requested variables. Used to answer folded queries and to materialize
/// resources from their forward definitions.
pub fn eval_goal(
    body: &[Literal],
    vars: &[String],
    store: &FactStore,
) -> Result<Vec<Tuple>, EvalError> {
    let head = Atom::new("$goal", vars.iter().map(|v| Term::var(v)).collect());
    let rule = Clause::rule(head, body.to_vec(), crate::kernel::Origin::Derived);
    let order = order_body(&rule)?;
    let mut results = Vec::new();
    join(&rule, &order, 0, Bindings::new(), store, None, None, &mut results);
    let mut out = Vec::new();
    for b in results {
        let tuple: Tuple = rule.head[0]
            .args
            .iter()
            .map(|t| instantiate(t, &b))
            .collect::<Option<Tuple>>()
            .ok_or_else(|| EvalError::Unbound("goal".into(), "head".into()))?;
        out.push(tuple);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::filter_answers;
    use crate::parser::parse_program;

    #[test]
    fn test_transitive_closure() {
        let p = parse_program(
            "#edb\nedge/2.\n#facts\nedge(a,b). edge(b,c).\n#query\nq(X,Y) :- edge(X,Y).\nq(X,Y) :- edge(X,Z), q(Z,Y).\n",
        )
        .program
        .unwrap();
        let query = p.query.clone().unwrap();
        let base = FactStore::from_facts(&p.facts);
        let store = seminaive(&query.rules, &base).unwrap();
        let answers = filter_answers(&store, &query);
        assert_eq!(crate::eval::format_answers(&answers), "(a,b) (a,c) (b,c)");
    }

    #[test]
    fn test_stratified_negation_matches_enumeration() {
        let p = parse_program(
            "#edb\ns/2. p/2.\n#facts\ns(a,b). s(b,c). p(a,b).\n#query\nt(X,Y) :- s(X,Y), not p(X,Y).\n",
        )
        .program
        .unwrap();
        let query = p.query.clone().unwrap();
        let base = FactStore::from_facts(&p.facts);
        let store = seminaive(&query.rules, &base).unwrap();
        let answers = filter_answers(&store, &query);
        assert_eq!(crate::eval::format_answers(&answers), "(b,c)");
    }

    #[test]
    fn test_empty_base() {
        let p = parse_program("#edb\nedge/2.\n#query\nq(X,Y) :- edge(X,Y).\n")
            .program
            .unwrap();
        let query = p.query.clone().unwrap();
        let store = seminaive(&query.rules, &FactStore::new()).unwrap();
        assert!(filter_answers(&store, &query).is_empty());
    }
}
