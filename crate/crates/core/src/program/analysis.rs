//! Safety, extra safety, and stratification.

use crate::kernel::{Clause, CmpOp, PredSym, Term};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Safety {
    Safe,
    Unsafe(Vec<String>),
}

/// A variable is limited when it appears in a positive non-builtin body
/// literal, or is equated (transitively) with a constant or a limited
/// variable. A rule is safe when every variable in it is limited.
pub fn check_safety(rule: &Clause) -> Safety {
    let mut limited: BTreeSet<String> = BTreeSet::new();
    for lit in &rule.body {
        if lit.positive && !lit.atom.is_builtin() {
            lit.atom.collect_vars(&mut limited);
        }
    }
    // Propagate limitedness through equalities until a fixpoint.
    loop {
        let mut changed = false;
        for lit in &rule.body {
            if !lit.positive || lit.atom.builtin_op() != Some(CmpOp::Eq) {
                continue;
            }
            let (a, b) = (&lit.atom.args[0], &lit.atom.args[1]);
            for (x, y) in [(a, b), (b, a)] {
                if let Term::Var(v) = x {
                    if !limited.contains(v) && term_limited(y, &limited) {
                        limited.insert(v.clone());
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let offending: Vec<String> = rule
        .vars()
        .into_iter()
        .filter(|v| !limited.contains(v))
        .collect();
    if offending.is_empty() {
        Safety::Safe
    } else {
        Safety::Unsafe(offending)
    }
}

fn term_limited(t: &Term, limited: &BTreeSet<String>) -> bool {
    match t {
        Term::Var(v) => limited.contains(v),
        Term::Cst(_) => true,
        Term::Sk(_, args) => args.iter().all(|a| term_limited(a, limited)),
    }
}

/// Extra safety: the variables of the body equal the variables of the head,
/// so substituting the definition for an atom introduces no existentials.
pub fn check_extra_safety(rule: &Clause) -> bool {
    let mut head_vars = BTreeSet::new();
    for a in &rule.head {
        a.collect_vars(&mut head_vars);
    }
    let mut body_vars = BTreeSet::new();
    for l in &rule.body {
        l.atom.collect_vars(&mut body_vars);
    }
    head_vars == body_vars
}

pub fn rules_recursive(rules: &[Clause]) -> bool {
    let heads: BTreeSet<String> = rules
        .iter()
        .flat_map(|r| r.head.iter().map(|a| a.pred.name()))
        .collect();
    // Build the dependency graph among rule-defined predicates and look for
    // a cycle.
    let mut edges: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in rules {
        for h in &r.head {
            for b in &r.body {
                if let PredSym::Named(n) = &b.atom.pred {
                    if heads.contains(n) {
                        edges.entry(h.pred.name()).or_default().insert(n.clone());
                    }
                }
            }
        }
    }
    has_cycle(&edges)
}

pub fn has_cycle(edges: &BTreeMap<String, BTreeSet<String>>) -> bool {
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(
        n: &'a str,
        edges: &'a BTreeMap<String, BTreeSet<String>>,
        state: &mut BTreeMap<&'a str, u8>,
    ) -> bool {
        match state.get(n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(n, 1);
        if let Some(succ) = edges.get(n) {
            for s in succ {
                if visit(s, edges, state) {
                    return true;
                }
            }
        }
        state.insert(n, 2);
        false
    }
    edges.keys().any(|n| visit(n, edges, &mut state))
}

/// Assigns strata so that a rule head's stratum is at least the stratum of
/// every positive body predicate and strictly above the stratum of every
/// default-negated one. Base (non-head) predicates sit at stratum 0.
/// Returns a witnessing cycle when negation occurs inside recursion.
pub fn stratify(rules: &[Clause]) -> Result<BTreeMap<String, usize>, Vec<String>> {
    let heads: BTreeSet<String> = rules
        .iter()
        .flat_map(|r| r.head.iter().map(|a| a.pred.name()))
        .collect();
    let mut preds: BTreeSet<String> = heads.clone();
    for r in rules {
        for l in &r.body {
            if let PredSym::Named(n) = &l.atom.pred {
                preds.insert(n.clone());
            }
        }
    }
    let mut strata: BTreeMap<String, usize> = preds.iter().map(|p| (p.clone(), 0)).collect();
    let bound = preds.len() + 1;
    loop {
        let mut changed = false;
        for r in rules {
            for h in &r.head {
                let hname = h.pred.name();
                for l in &r.body {
                    let bname = match &l.atom.pred {
                        PredSym::Named(n) => n.clone(),
                        PredSym::Cmp(_) => continue,
                    };
                    let need = strata[&bname] + if l.positive { 0 } else { 1 };
                    if strata[&hname] < need {
                        strata.insert(hname.clone(), need);
                        changed = true;
                        if need > bound {
                            return Err(negative_cycle_witness(rules));
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(strata);
        }
    }
}

fn negative_cycle_witness(rules: &[Clause]) -> Vec<String> {
    // Report the strongly-connected set of predicates reachable through a
    // negative edge; a simple DFS cycle hunt is enough for diagnostics.
    let mut edges: BTreeMap<String, Vec<(String, bool)>> = BTreeMap::new();
    for r in rules {
        for h in &r.head {
            for l in &r.body {
                if let PredSym::Named(n) = &l.atom.pred {
                    edges
                        .entry(h.pred.name())
                        .or_default()
                        .push((n.clone(), l.positive));
                }
            }
        }
    }
    fn hunt(
        node: &str,
        edges: &BTreeMap<String, Vec<(String, bool)>>,
        path: &mut Vec<String>,
        saw_neg: bool,
    ) -> Option<Vec<String>> {
        if let Some(pos) = path.iter().position(|p| p == node) {
            if saw_neg {
                return Some(path[pos..].to_vec());
            }
            return None;
        }
        path.push(node.to_string());
        if let Some(succ) = edges.get(node) {
            for (next, positive) in succ {
                if let Some(c) = hunt(next, edges, path, saw_neg || !positive) {
                    return Some(c);
                }
            }
        }
        path.pop();
        None
    }
    for start in edges.keys() {
        let mut path = Vec::new();
        if let Some(c) = hunt(start, &edges, &mut path, false) {
            return c;
        }
    }
    Vec::new()
}

/// Rescales a stratification of a non-recursive rule set so each rule-defined
/// predicate occupies its own stratum, ordered topologically with ties broken
/// by name.
pub fn rescale_strata(
    rules: &[Clause],
    strata: &BTreeMap<String, usize>,
) -> BTreeMap<String, usize> {
    let heads: BTreeSet<String> = rules
        .iter()
        .flat_map(|r| r.head.iter().map(|a| a.pred.name()))
        .collect();
    let mut deps: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in rules {
        for h in &r.head {
            let entry = deps.entry(h.pred.name()).or_default();
            for l in &r.body {
                if let PredSym::Named(n) = &l.atom.pred {
                    if heads.contains(n) {
                        entry.insert(n.clone());
                    }
                }
            }
        }
    }
    let mut order: Vec<String> = heads.iter().cloned().collect();
    order.sort_by_key(|p| (strata.get(p).copied().unwrap_or(0), p.clone()));
    // Topological insertion: a predicate goes after everything it depends on.
    let mut placed: Vec<String> = Vec::new();
    let mut remaining: Vec<String> = order;
    while !remaining.is_empty() {
        let idx = remaining
            .iter()
            .position(|p| {
                deps.get(p)
                    .map(|d| d.iter().all(|q| q == p || placed.contains(q)))
                    .unwrap_or(true)
            })
            .unwrap_or(0);
        placed.push(remaining.remove(idx));
    }
    let mut out: BTreeMap<String, usize> = strata
        .iter()
        .filter(|(p, _)| !heads.contains(*p))
        .map(|(p, _)| (p.clone(), 0))
        .collect();
    for (i, p) in placed.iter().enumerate() {
        out.insert(p.clone(), i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Atom, Literal, Origin};

    fn atom(name: &str, vars: &[&str]) -> Atom {
        Atom::new(name, vars.iter().map(|v| Term::var(v)).collect())
    }

    #[test]
    fn test_safe_join_rule() {
        let rule = Clause::rule(
            atom("p", &["X", "Y"]),
            vec![
                Literal::pos(atom("h", &["X", "Z"])),
                Literal::pos(atom("k", &["Z", "Y"])),
            ],
            Origin::Idb,
        );
        assert_eq!(check_safety(&rule), Safety::Safe);
        assert!(!check_extra_safety(&rule));
    }

    #[test]
    fn test_unsafe_negated_variable() {
        let rule = Clause::rule(
            atom("t", &["X", "Y"]),
            vec![
                Literal::pos(atom("s", &["X", "Y"])),
                Literal::neg(atom("h", &["X", "Z"])),
            ],
            Origin::Idb,
        );
        assert_eq!(check_safety(&rule), Safety::Unsafe(vec!["Z".into()]));
    }

    #[test]
    fn test_equality_limits_variable() {
        let rule = Clause::rule(
            atom("q", &["X"]),
            vec![
                Literal::pos(atom("p", &["Y"])),
                Literal::pos(Atom::cmp(CmpOp::Eq, Term::var("X"), Term::var("Y"))),
            ],
            Origin::Idb,
        );
        assert_eq!(check_safety(&rule), Safety::Safe);
    }

    #[test]
    fn test_extra_safety() {
        let rule = Clause::rule(
            atom("t", &["X", "Y"]),
            vec![
                Literal::pos(atom("s", &["X", "Y"])),
                Literal::neg(atom("p", &["X", "Y"])),
            ],
            Origin::Idb,
        );
        assert!(check_extra_safety(&rule));
        let propositional = Clause::rule(Atom::new("p", vec![]), vec![Literal::pos(Atom::new("q", vec![]))], Origin::Idb);
        assert!(check_extra_safety(&propositional));
    }

    #[test]
    fn test_recursion_through_negation() {
        let rules = vec![
            Clause::rule(atom("p", &["X"]), vec![Literal::neg(atom("q", &["X"]))], Origin::Idb),
            Clause::rule(atom("q", &["X"]), vec![Literal::neg(atom("p", &["X"]))], Origin::Idb),
        ];
        let err = stratify(&rules).unwrap_err();
        let mut cycle = err.clone();
        cycle.sort();
        assert_eq!(cycle, vec!["p".to_string(), "q".to_string()]);
    }

    #[test]
    fn test_stratify_layers() {
        let rules = vec![
            Clause::rule(
                atom("e12", &["X", "Y"]),
                vec![
                    Literal::pos(atom("e04", &["X", "Y"])),
                    Literal::neg(atom("e01", &["X", "Y"])),
                ],
                Origin::Idb,
            ),
            Clause::rule(
                atom("e21", &["X", "Y"]),
                vec![
                    Literal::pos(atom("e03", &["X", "Y"])),
                    Literal::neg(atom("e12", &["X", "Y"])),
                ],
                Origin::Idb,
            ),
        ];
        let strata = stratify(&rules).unwrap();
        assert_eq!(strata["e01"], 0);
        assert_eq!(strata["e04"], 0);
        assert!(strata["e12"] > strata["e04"]);
        assert!(strata["e21"] > strata["e12"]);
        let rescaled = rescale_strata(&rules, &strata);
        assert_eq!(rescaled["e12"], 1);
        assert_eq!(rescaled["e21"], 2);
    }

    #[test]
    fn test_pure_base_program() {
        let strata = stratify(&[]).unwrap();
        assert!(strata.is_empty());
    }
}
