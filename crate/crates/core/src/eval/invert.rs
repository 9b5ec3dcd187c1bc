//! Generating base facts from resource facts through the inverse rules.

use super::{FactStore, GroundTerm, Tuple};
use crate::completion::{BaseRecoveryRule, InverseRuleSet, InversionTemplate};
use crate::kernel::{Const, Term};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvertError {
    #[error("resource `{0}` has disjunctive inverse rules; use certain-answer evaluation")]
    DisjunctiveHeads(String),
    #[error("no inverse rules for resource `{0}`")]
    UnknownResource(String),
}

/// Instantiates one Skolemized definition body for a resource fact: head
/// variables map to the fact's components, Skolem terms ground to nulls over
/// them. Built-in literals are constraints, not facts, and are skipped.
pub fn instantiate_def(
    template: &InversionTemplate,
    def_index: usize,
    fact: &Tuple,
) -> Vec<(String, Tuple)> {
    let env: BTreeMap<&String, &GroundTerm> =
        template.head_vars.iter().zip(fact.iter()).collect();
    let mut out = Vec::new();
    for lit in &template.defs[def_index] {
        if lit.atom.is_builtin() {
            continue;
        }
        let tuple: Tuple = lit
            .atom
            .args
            .iter()
            .map(|t| ground_template_term(t, &env))
            .collect();
        out.push((lit.atom.pred.name(), tuple));
    }
    out
}

fn ground_template_term(t: &Term, env: &BTreeMap<&String, &GroundTerm>) -> GroundTerm {
    match t {
        Term::Var(v) => (*env.get(v).expect("template variables are head variables")).clone(),
        Term::Cst(c) => GroundTerm::Cst(c.clone()),
        Term::Sk(f, args) => {
            let consts: Vec<Const> = args
                .iter()
                .map(|a| match ground_template_term(a, env) {
                    GroundTerm::Cst(c) => c,
                    // Resource facts are constant tuples, so null arguments
                    // are always constants.
                    GroundTerm::Null(_, _) => unreachable!("no nested nulls"),
                })
                .collect();
            GroundTerm::Null(f.clone(), consts)
        }
    }
}

/// Inverts every resource fact through single-definition inverse rules.
/// Identical instantiations share one null, and distinct resource facts
/// never share a null, because null identity is exactly the instantiated
/// argument tuple.
pub fn invert_facts(res_facts: &FactStore, inv: &InverseRuleSet) -> Result<FactStore, InvertError> {
    let mut out = FactStore::new();
    for pred in res_facts.preds() {
        let template = match inv.templates.get(pred) {
            Some(t) => t,
            None => continue,
        };
        if template.is_disjunctive() {
            return Err(InvertError::DisjunctiveHeads(pred.clone()));
        }
        for fact in res_facts.get(pred) {
            for (p, tuple) in instantiate_def(template, 0, fact) {
                out.insert(&p, tuple);
            }
        }
    }
    out.assert_no_nested_nulls();
    Ok(out)
}

/// Recovers base facts from a recursive resource: a tuple is kept when no
/// assignment of the existential variables over the active domain satisfies
/// the residual conjunction. Base-predicate atoms inside the residual are
/// checked against the resource relation itself, which contains the base
/// relation and so can only over-reject; the recovery stays sound.
pub fn eval_base_recovery(res_facts: &FactStore, rule: &BaseRecoveryRule) -> FactStore {
    let mut out = FactStore::new();
    let domain: Vec<GroundTerm> = res_facts.active_domain().into_iter().collect();
    let base_name = rule.base.pred.name();
    for fact in res_facts.get(&rule.resource) {
        let mut env: BTreeMap<String, GroundTerm> = rule
            .head_vars
            .iter()
            .cloned()
            .zip(fact.iter().cloned())
            .collect();
        if !exists_witness(rule, &mut env, 0, &domain, res_facts, &base_name) {
            out.insert(&base_name, fact.clone());
        }
    }
    out
}

fn exists_witness(
    rule: &BaseRecoveryRule,
    env: &mut BTreeMap<String, GroundTerm>,
    next_var: usize,
    domain: &[GroundTerm],
    store: &FactStore,
    base_name: &str,
) -> bool {
    if next_var == rule.exist_vars.len() {
        return rule.residual.iter().all(|lit| {
            let tuple: Tuple = lit
                .atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => env[v].clone(),
                    Term::Cst(c) => GroundTerm::Cst(c.clone()),
                    Term::Sk(_, _) => unreachable!("residuals are function-free"),
                })
                .collect();
            let pred = lit.atom.pred.name();
            let lookup = if pred == base_name { &rule.resource } else { &pred };
            store.contains(lookup, &tuple)
        });
    }
    let var = rule.exist_vars[next_var].clone();
    for value in domain {
        env.insert(var.clone(), value.clone());
        if exists_witness(rule, env, next_var + 1, domain, store, base_name) {
            env.remove(&var);
            return true;
        }
    }
    env.remove(&var);
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{base_recovery, clark_completion};
    use crate::parser::parse_program;

    fn path_program() -> crate::program::Program {
        parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Z), edge(Z,Y).\n#facts\nr(a,b). r(b,c).\n",
        )
        .program
        .unwrap()
    }

    #[test]
    fn test_invert_generates_null_midpoints() {
        let p = path_program();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let res_facts = FactStore::from_facts(&p.facts);
        let edb = invert_facts(&res_facts, &inv).unwrap();
        assert_eq!(edb.len(), 4);
        let nulls: std::collections::BTreeSet<_> = edb
            .get("edge")
            .flat_map(|t| t.iter())
            .filter(|g| !g.is_const())
            .collect();
        // One midpoint null per resource fact.
        assert_eq!(nulls.len(), 2);
    }

    #[test]
    fn test_invert_empty() {
        let p = path_program();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let edb = invert_facts(&FactStore::new(), &inv).unwrap();
        assert!(edb.is_empty());
    }

    #[test]
    fn test_invert_rejects_disjunctive() {
        let p = parse_program(
            "#edb\np1/1. p2/1.\n#res\nr(X) :- p1(X).\nr(X) :- p2(X).\n#facts\nr(a).\n",
        )
        .program
        .unwrap();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let res_facts = FactStore::from_facts(&p.facts);
        assert_eq!(
            invert_facts(&res_facts, &inv),
            Err(InvertError::DisjunctiveHeads("r".into()))
        );
    }

    #[test]
    fn test_base_recovery_drops_decomposable_paths() {
        let p = parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Y).\nr(X,Y) :- edge(X,Z), r(Z,Y).\n#facts\nr(a,b). r(b,c). r(a,c).\n",
        )
        .program
        .unwrap();
        let rule = base_recovery(&p.res).unwrap();
        let res_facts = FactStore::from_facts(&p.facts);
        let edges = eval_base_recovery(&res_facts, &rule);
        let got: Vec<String> = edges
            .get("edge")
            .map(|t| format!("({},{})", t[0], t[1]))
            .collect();
        // (a,c) decomposes through b and is rejected.
        assert_eq!(got, vec!["(a,b)", "(b,c)"]);
    }

    #[test]
    fn test_base_recovery_singleton() {
        let p = parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Y).\nr(X,Y) :- edge(X,Z), r(Z,Y).\n#facts\nr(a,b).\n",
        )
        .program
        .unwrap();
        let rule = base_recovery(&p.res).unwrap();
        let res_facts = FactStore::from_facts(&p.facts);
        let edges = eval_base_recovery(&res_facts, &rule);
        assert_eq!(edges.len(), 1);
    }

    #[test]
    fn test_base_recovery_empty() {
        let p = parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Y).\nr(X,Y) :- edge(X,Z), r(Z,Y).\n",
        )
        .program
        .unwrap();
        let rule = base_recovery(&p.res).unwrap();
        let edges = eval_base_recovery(&FactStore::new(), &rule);
        assert!(edges.is_empty());
    }
}
