//! Compiling stratified negation away. Derived definitions are merged per
//! predicate, lower definitions are substituted in (negation pushed through
//! by De Morgan), and everything is put back into disjunctive normal form.
//! Definitions that are not extra safe are left in place rather than
//! substituted, since inlining them would tear apart their existential
//! variables and produce unsafe rules. Remaining default-negated atoms are
//! renamed to fresh positive predicates, one guard constraint per renaming.

use crate::kernel::{Atom, Clause, CmpOp, Literal, Origin, PredSym, Subst, Term};
use crate::program::{
    analysis::{rescale_strata, stratify},
    Decls, PredicateDecl, Program, QueryDef, Role,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NegationError {
    #[error("recursion through negation: {0:?}")]
    NotStratified(Vec<String>),
    #[error("derived rules for `{0}` are recursive; bottom-up evaluation is required")]
    Recursive(String),
    #[error("rule head for `{0}` is not a tuple of distinct variables")]
    NotRectified(String),
    #[error("normal form of `{0}` exceeds {1} conjunctions")]
    DnfOverflow(String, usize),
}

const MAX_DNF: usize = 256;

#[derive(Clone, Debug)]
enum Formula {
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, Debug)]
pub struct CompiledProgram {
    /// The rewritten program: derived rules and resource rules in
    /// disjunctive normal form, negated atoms renamed to positive guard
    /// predicates, guard constraints appended.
    pub program: Program,
    /// base predicate name -> guard predicate standing for its negation.
    pub renames: BTreeMap<String, String>,
    pub added_ics: Vec<Clause>,
    /// Derived predicates whose definitions were substituted away.
    pub compiled_preds: Vec<String>,
    /// Derived predicates left uncompiled because they are not extra safe.
    pub skipped_preds: Vec<String>,
}

pub fn compile_negation(input: &Program) -> Result<CompiledProgram, NegationError> {
    let rule_universe: Vec<Clause> = input.idb.clone();
    let strata = stratify(&rule_universe).map_err(NegationError::NotStratified)?;
    if crate::program::analysis::rules_recursive(&rule_universe) {
        let name = rule_universe[0].head[0].pred.name();
        return Err(NegationError::Recursive(name));
    }
    let order = rescale_strata(&rule_universe, &strata);
    let mut heads: Vec<String> = input
        .idb
        .iter()
        .map(|r| r.head[0].pred.name())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    heads.sort_by_key(|p| order.get(p).copied().unwrap_or(0));

    // Compile stratum by stratum.
    let mut compiled: BTreeMap<String, (Vec<String>, Formula)> = BTreeMap::new();
    let mut compiled_preds = Vec::new();
    let mut skipped_preds = Vec::new();
    for pred in &heads {
        let rules: Vec<&Clause> = input
            .idb
            .iter()
            .filter(|r| r.head[0].pred.name() == *pred)
            .collect();
        let (head_vars, formula) = merge_definitions(pred, &rules)?;
        let formula = substitute(formula, &compiled);
        let def_clause_vars = formula_vars(&formula);
        let extra_safe = def_clause_vars
            == head_vars.iter().cloned().collect::<std::collections::BTreeSet<_>>();
        if extra_safe {
            compiled.insert(pred.clone(), (head_vars, formula));
            compiled_preds.push(pred.clone());
        } else {
            skipped_preds.push(pred.clone());
        }
    }

    // Rebuild the derived rules in disjunctive normal form. Compiled
    // predicates get their substituted definitions; skipped ones keep their
    // original rules.
    let mut idb_c: Vec<Clause> = Vec::new();
    for pred in &heads {
        if let Some((head_vars, formula)) = compiled.get(pred) {
            let head = Atom::new(pred, head_vars.iter().map(|v| Term::var(v)).collect());
            for conj in dnf(pred, formula)? {
                idb_c.push(Clause::rule(head.clone(), conj, Origin::Idb));
            }
        } else {
            for r in input.idb.iter().filter(|r| r.head[0].pred.name() == *pred) {
                idb_c.push(r.clone());
            }
        }
    }

    // Rewrite resource definitions over the compiled predicates.
    let mut res_c: Vec<Clause> = Vec::new();
    for r in &input.res {
        let formula = substitute(
            Formula::And(r.body.iter().cloned().map(Formula::Lit).collect()),
            &compiled,
        );
        for conj in dnf(&r.head[0].pred.name(), &formula)? {
            res_c.push(Clause::rule(r.head[0].clone(), conj, Origin::Resource));
        }
    }

    // Uniformly rename surviving negated atoms to guard predicates.
    let mut renames: BTreeMap<String, String> = BTreeMap::new();
    let mut decls = input.decls.clone();
    let mut added_ics: Vec<Clause> = Vec::new();
    let rename_clause = |c: &Clause, decls: &mut Decls, renames: &mut BTreeMap<String, String>, added: &mut Vec<Clause>| -> Clause {
        let body = c
            .body
            .iter()
            .map(|l| {
                if l.positive || l.atom.is_builtin() {
                    return l.clone();
                }
                let base = l.atom.pred.name();
                let guard = renames.entry(base.clone()).or_insert_with(|| {
                    let mut name = format!("not_{}", base);
                    while decls.get(&name).is_some() {
                        name.push('_');
                    }
                    decls.insert(PredicateDecl {
                        name: name.clone(),
                        arity: l.atom.args.len(),
                        role: Role::Edb,
                        cwa_complete: false,
                        key_prefix_len: None,
                    });
                    let vars: Vec<Term> = (0..l.atom.args.len())
                        .map(|i| Term::var(&format!("V{}", i)))
                        .collect();
                    added.push(Clause::new(
                        vec![],
                        vec![
                            Literal::pos(Atom::new(&base, vars.clone())),
                            Literal::pos(Atom::new(&name, vars)),
                        ],
                        Origin::Ic,
                    ));
                    name
                });
                Literal::pos(Atom {
                    pred: PredSym::Named(guard.clone()),
                    args: l.atom.args.clone(),
                })
            })
            .collect();
        Clause {
            head: c.head.clone(),
            body,
            origin: c.origin,
            support: c.support,
        }
    };

    let idb_c: Vec<Clause> = idb_c
        .iter()
        .map(|c| rename_clause(c, &mut decls, &mut renames, &mut added_ics))
        .collect();
    let res_c: Vec<Clause> = res_c
        .iter()
        .map(|c| rename_clause(c, &mut decls, &mut renames, &mut added_ics))
        .collect();
    let query = input.query.as_ref().map(|q| QueryDef {
        name: q.name.clone(),
        dvars: q.dvars.clone(),
        rules: q
            .rules
            .iter()
            .map(|c| rename_clause(c, &mut decls, &mut renames, &mut added_ics))
            .collect(),
    });

    let mut ics = input.ics.clone();
    ics.extend(added_ics.clone());
    Ok(CompiledProgram {
        program: Program {
            decls,
            idb: idb_c,
            ics,
            res: res_c,
            facts: input.facts.clone(),
            query,
        },
        renames,
        added_ics,
        compiled_preds,
        skipped_preds,
    })
}

/// Merges the rules for one predicate into a single definition: the
/// disjunction of the rule bodies over a canonical head-variable tuple.
fn merge_definitions(
    pred: &str,
    rules: &[&Clause],
) -> Result<(Vec<String>, Formula), NegationError> {
    let first = &rules[0].head[0];
    let mut head_vars = Vec::new();
    for t in &first.args {
        match t {
            Term::Var(v) if !head_vars.contains(v) => head_vars.push(v.clone()),
            _ => return Err(NegationError::NotRectified(pred.to_string())),
        }
    }
    let mut disjuncts = Vec::new();
    for r in rules {
        let mut align = Subst::new();
        if r.head[0].args.len() != head_vars.len() {
            return Err(NegationError::NotRectified(pred.to_string()));
        }
        for (t, v) in r.head[0].args.iter().zip(&head_vars) {
            match t {
                Term::Var(x) => {
                    if !align.bind(x, &Term::var(v)) {
                        return Err(NegationError::NotRectified(pred.to_string()));
                    }
                }
                _ => return Err(NegationError::NotRectified(pred.to_string())),
            }
        }
        disjuncts.push(Formula::And(
            r.body
                .iter()
                .map(|l| Formula::Lit(align.apply_literal(l)))
                .collect(),
        ));
    }
    Ok((head_vars, Formula::Or(disjuncts)))
}

/// Replaces literals over compiled predicates by their definitions, pushing
/// negation through with De Morgan's rules.
fn substitute(f: Formula, compiled: &BTreeMap<String, (Vec<String>, Formula)>) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.into_iter().map(|g| substitute(g, compiled)).collect()),
        Formula::Or(fs) => Formula::Or(fs.into_iter().map(|g| substitute(g, compiled)).collect()),
        Formula::Lit(lit) => {
            let name = match &lit.atom.pred {
                PredSym::Named(n) => n.clone(),
                PredSym::Cmp(_) => return Formula::Lit(lit),
            };
            let (head_vars, def) = match compiled.get(&name) {
                Some(d) => d,
                None => return Formula::Lit(lit),
            };
            let mut map = Subst::new();
            for (v, t) in head_vars.iter().zip(&lit.atom.args) {
                map.bind(v, t);
            }
            let body = apply_formula(def, &map);
            if lit.positive {
                body
            } else {
                negate(body)
            }
        }
    }
}

fn apply_formula(f: &Formula, s: &Subst) -> Formula {
    match f {
        Formula::Lit(l) => Formula::Lit(s.apply_literal(l)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| apply_formula(g, s)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| apply_formula(g, s)).collect()),
    }
}

fn negate(f: Formula) -> Formula {
    match f {
        Formula::And(fs) => Formula::Or(fs.into_iter().map(negate).collect()),
        Formula::Or(fs) => Formula::And(fs.into_iter().map(negate).collect()),
        Formula::Lit(l) => {
            if let Some(op) = l.atom.builtin_op() {
                let flipped = match op {
                    CmpOp::Eq => CmpOp::Ne,
                    CmpOp::Ne => CmpOp::Eq,
                    CmpOp::Lt => CmpOp::Ge,
                    CmpOp::Le => CmpOp::Gt,
                    CmpOp::Gt => CmpOp::Le,
                    CmpOp::Ge => CmpOp::Lt,
                };
                Formula::Lit(Literal::pos(Atom::cmp(
                    flipped,
                    l.atom.args[0].clone(),
                    l.atom.args[1].clone(),
                )))
            } else {
                Formula::Lit(Literal {
                    atom: l.atom,
                    positive: !l.positive,
                })
            }
        }
    }
}

fn formula_vars(f: &Formula) -> std::collections::BTreeSet<String> {
    let mut out = std::collections::BTreeSet::new();
    fn walk(f: &Formula, out: &mut std::collections::BTreeSet<String>) {
        match f {
            Formula::Lit(l) => l.atom.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| walk(g, out)),
        }
    }
    walk(f, &mut out);
    out
}

/// Disjunctive normal form with duplicate removal and absorption.
fn dnf(pred: &str, f: &Formula) -> Result<Vec<Vec<Literal>>, NegationError> {
    fn go(f: &Formula) -> Vec<Vec<Literal>> {
        match f {
            Formula::Lit(l) => vec![vec![l.clone()]],
            Formula::Or(fs) => fs.iter().flat_map(go).collect(),
            Formula::And(fs) => {
                let mut acc: Vec<Vec<Literal>> = vec![vec![]];
                for g in fs {
                    let options = go(g);
                    let mut next = Vec::new();
                    for base in &acc {
                        for opt in &options {
                            let mut row = base.clone();
                            for l in opt {
                                if !row.contains(l) {
                                    row.push(l.clone());
                                }
                            }
                            next.push(row);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }
    let rows = go(f);
    if rows.len() > MAX_DNF {
        return Err(NegationError::DnfOverflow(pred.to_string(), rows.len()));
    }
    let mut kept: Vec<Vec<Literal>> = Vec::new();
    for row in &rows {
        if rows
            .iter()
            .any(|other| other.len() < row.len() && other.iter().all(|l| row.contains(l)))
        {
            continue;
        }
        if kept
            .iter()
            .any(|k| k.len() == row.len() && k.iter().all(|l| row.contains(l)))
        {
            continue;
        }
        kept.push(row.clone());
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::analysis::check_extra_safety;
    use crate::parser::{format_clause, parse_program};

    const LAYERED: &str = "\
#edb\ne01/2. e02/3. e03/2. e04/2.\n\
#idb\n\
e11(X,Y,Z) :- e01(X,Y), e02(X,Y,Z).\n\
e11(X,Y,Z) :- e02(X,Y,Z), not e03(X,Y).\n\
e12(X,Y) :- e04(X,Y), not e01(X,Y).\n\
e21(X,Y) :- e03(X,Y), not e12(X,Y).\n\
#res\n\
r(X,Y,Z) :- e11(X,Y,Z), not e12(X,Y).\n\
#query\nq(X,Y) :- e21(X,Y).\n";

    #[test]
    fn test_full_compilation_layers() {
        let p = parse_program(LAYERED).program.unwrap();
        let c = compile_negation(&p).unwrap();
        assert_eq!(c.compiled_preds, vec!["e11", "e12", "e21"]);
        // e21 compiles to e03 & (not e04 | e01), i.e. two normal-form rules.
        let e21: Vec<String> = c
            .program
            .idb
            .iter()
            .filter(|r| r.head[0].pred.name() == "e21")
            .map(format_clause)
            .collect();
        assert_eq!(
            e21,
            vec![
                "e21(X,Y) :- e03(X,Y), not_e04(X,Y).".to_string(),
                "e21(X,Y) :- e03(X,Y), e01(X,Y).".to_string(),
            ]
        );
        // The resource rewrites to e02 & (e01 | not e03) & (e01 | not e04).
        let res: Vec<String> = c.program.res.iter().map(format_clause).collect();
        assert_eq!(
            res,
            vec![
                "r(X,Y,Z) :- e01(X,Y), e02(X,Y,Z).".to_string(),
                "r(X,Y,Z) :- e02(X,Y,Z), not_e03(X,Y), not_e04(X,Y).".to_string(),
            ]
        );
        // One guard constraint per renamed predicate: the compiled rules
        // keep not_e01, not_e03, and not_e04.
        assert_eq!(c.added_ics.len(), 3);
        let ics: Vec<String> = c.added_ics.iter().map(format_clause).collect();
        assert!(ics.contains(&":- e04(V0,V1), not_e04(V0,V1).".to_string()));
    }

    #[test]
    fn test_extra_safety_preserved() {
        let p = parse_program(LAYERED).program.unwrap();
        let c = compile_negation(&p).unwrap();
        for rule in &c.program.idb {
            assert!(
                check_extra_safety(rule),
                "compiled rule lost extra safety: {}",
                format_clause(rule)
            );
        }
    }

    #[test]
    fn test_modified_compilation_skips_non_extra_safe() {
        let text = "\
#edb\nh/2. k/2. s/2. l/3.\n\
#idb\n\
p(X,Y) :- h(X,Z), k(Z,Y).\n\
t(X,Y) :- s(X,Y), not p(X,Y).\n\
#res\n\
r(X,Y,Z) :- t(X,Y), l(Y,Z,U).\n\
#query\nq(X,Y) :- s(X,Y), k(Y,Z).\n";
        let p = parse_program(text).program.unwrap();
        let c = compile_negation(&p).unwrap();
        assert_eq!(c.skipped_preds, vec!["p"]);
        // The resource body keeps `not p` (as its guard) rather than
        // tearing apart the join definition of p.
        let res: Vec<String> = c.program.res.iter().map(format_clause).collect();
        assert_eq!(
            res,
            vec!["r(X,Y,Z) :- s(X,Y), not_p(X,Y), l(Y,Z,U).".to_string()]
        );
    }

    #[test]
    fn test_negation_free_is_identity_on_shape() {
        let text = "#edb\ne/2.\n#idb\na(X,Y) :- e(X,Y).\n#res\nr(X,Y) :- a(X,Y).\n#query\nq(X,Y) :- a(X,Y).\n";
        let p = parse_program(text).program.unwrap();
        let c = compile_negation(&p).unwrap();
        assert!(c.renames.is_empty());
        assert!(c.added_ics.is_empty());
        let res: Vec<String> = c.program.res.iter().map(format_clause).collect();
        assert_eq!(res, vec!["r(X,Y) :- e(X,Y).".to_string()]);
    }

    #[test]
    fn test_unstratified_rejected() {
        let text = "#edb\ne/1.\n#idb\np(X) :- e(X), not q(X).\nq(X) :- e(X), not p(X).\n";
        let p = parse_program(text).program.unwrap();
        match compile_negation(&p) {
            Err(NegationError::NotStratified(cycle)) => {
                let mut c = cycle;
                c.sort();
                c.dedup();
                assert_eq!(c, vec!["p".to_string(), "q".to_string()]);
            }
            other => panic!("expected stratification failure, got {:?}", other),
        }
    }
}
