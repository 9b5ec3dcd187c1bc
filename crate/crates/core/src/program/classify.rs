//! Integrity-constraint case classification and the singular-rule test for
//! bounded recursion.

use super::analysis::has_cycle;
use crate::kernel::{Clause, PredSym, Term};
use std::collections::{BTreeMap, BTreeSet};

/// The three constraint regimes the folding search distinguishes.
///
/// Case 1: no recursion and no built-in heads; nothing special is needed.
/// Case 2: recursion, but every recursive constraint is singular, so the
/// recursion is bounded and a repetition check suffices.
/// Case 3: unbounded recursion or a built-in in some head (functional
/// dependencies induce recursion through equality); a depth bound applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcCase {
    Case1,
    Case2,
    Case3,
}

pub fn classify_ic_case(ics: &[Clause]) -> IcCase {
    if ics
        .iter()
        .any(|ic| ic.head.iter().any(|a| a.is_builtin()))
    {
        return IcCase::Case3;
    }
    let mut edges: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for ic in ics {
        for h in &ic.head {
            for b in &ic.body {
                if let PredSym::Named(n) = &b.atom.pred {
                    edges.entry(h.pred.name()).or_default().insert(n.clone());
                }
            }
        }
    }
    if !has_cycle(&edges) {
        return IcCase::Case1;
    }
    let all_singular = ics
        .iter()
        .filter(|ic| is_recursive_rule(ic))
        .all(|ic| is_singular(ic) == Singularity::Singular);
    if all_singular {
        IcCase::Case2
    } else {
        IcCase::Case3
    }
}

fn is_recursive_rule(rule: &Clause) -> bool {
    rule.head.iter().any(|h| {
        rule.body
            .iter()
            .any(|b| b.positive && b.atom.pred == h.pred)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Singularity {
    Singular,
    NotSingular,
    NotRecursive,
}

/// The singular-rule test. For a recursive Horn rule whose head predicate
/// reappears in the body:
///
/// 1. every variable of a recursive body atom that is absent from the head
///    occurs in that atom only, and
/// 2. every head variable keeps its argument position in each recursive
///    body atom where it appears; at most one recursive atom may deviate,
///    and only if it carries all head variables while at least one aligned
///    recursive atom remains.
pub fn is_singular(rule: &Clause) -> Singularity {
    let head = match rule.head.first() {
        Some(h) => h,
        None => return Singularity::NotRecursive,
    };
    let recursive_idx: Vec<usize> = rule
        .body
        .iter()
        .enumerate()
        .filter(|(_, l)| l.positive && l.atom.pred == head.pred)
        .map(|(i, _)| i)
        .collect();
    if recursive_idx.is_empty() {
        return Singularity::NotRecursive;
    }
    let head_vars = head.vars();

    // Condition 1: a variable of a recursive atom that is not in the head
    // must be private to that atom.
    for &bi in &recursive_idx {
        for v in rule.body[bi].atom.vars() {
            if head_vars.contains(&v) {
                continue;
            }
            let elsewhere = rule
                .body
                .iter()
                .enumerate()
                .any(|(j, l)| j != bi && l.atom.vars().contains(&v));
            if elsewhere {
                return Singularity::NotSingular;
            }
        }
    }

    // Condition 2: positional alignment of head variables.
    let head_pos: BTreeMap<&String, usize> = head
        .args
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            Term::Var(v) => Some((v, i)),
            _ => None,
        })
        .collect();
    let aligned = |atom: &crate::kernel::Atom| -> bool {
        atom.args.iter().enumerate().all(|(i, t)| match t {
            Term::Var(v) => head_pos.get(v).map(|p| *p == i).unwrap_or(true),
            t => !head_pos.keys().any(|v| t.contains_var(v)),
        })
    };
    let recursive: Vec<&crate::kernel::Atom> =
        recursive_idx.iter().map(|&i| &rule.body[i].atom).collect();
    let misaligned: Vec<_> = recursive.iter().filter(|a| !aligned(a)).collect();
    match misaligned.len() {
        0 => Singularity::Singular,
        1 => {
            let exception_ok = head_vars
                .iter()
                .all(|v| misaligned[0].vars().contains(v))
                && recursive.len() >= 2;
            if exception_ok {
                Singularity::Singular
            } else {
                Singularity::NotSingular
            }
        }
        _ => Singularity::NotSingular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Atom, CmpOp, Literal, Origin};

    fn atom(name: &str, vars: &[&str]) -> Atom {
        Atom::new(name, vars.iter().map(|v| Term::var(v)).collect())
    }

    #[test]
    fn test_multivalued_dependency_is_singular() {
        // R(X,Y,Z) :- R(X,Y',Z), R(X,Y,Z').
        let rule = Clause::rule(
            atom("R", &["X", "Y", "Z"]),
            vec![
                Literal::pos(atom("R", &["X", "Yp", "Z"])),
                Literal::pos(atom("R", &["X", "Y", "Zp"])),
            ],
            Origin::Ic,
        );
        assert_eq!(is_singular(&rule), Singularity::Singular);
    }

    #[test]
    fn test_position_swap_not_singular() {
        let rule = Clause::rule(
            atom("R", &["X", "Y"]),
            vec![Literal::pos(atom("R", &["Y", "X"]))],
            Origin::Ic,
        );
        assert_eq!(is_singular(&rule), Singularity::NotSingular);
    }

    #[test]
    fn test_non_recursive_reported() {
        let rule = Clause::rule(
            atom("p", &["X"]),
            vec![Literal::pos(atom("q", &["X"]))],
            Origin::Ic,
        );
        assert_eq!(is_singular(&rule), Singularity::NotRecursive);
    }

    #[test]
    fn test_case1_plain_constraint() {
        let ic = Clause::rule(
            atom("p3", &["X", "Y"]),
            vec![
                Literal::pos(atom("p1", &["X", "Y", "Z"])),
                Literal::pos(Atom::cmp(CmpOp::Gt, Term::var("Z"), Term::int(0))),
            ],
            Origin::Ic,
        );
        assert_eq!(classify_ic_case(&[ic]), IcCase::Case1);
    }

    #[test]
    fn test_case3_functional_dependency() {
        let ic = Clause::rule(
            Atom::cmp(CmpOp::Eq, Term::var("X2"), Term::var("Y2")),
            vec![
                Literal::pos(atom("patients", &["X1", "X2", "X3", "X4"])),
                Literal::pos(atom("patients", &["X1", "Y2", "Y3", "Y4"])),
            ],
            Origin::Ic,
        );
        assert_eq!(classify_ic_case(&[ic]), IcCase::Case3);
    }

    #[test]
    fn test_case2_bounded_recursion() {
        let ic = Clause::rule(
            atom("R", &["X", "Y", "Z"]),
            vec![
                Literal::pos(atom("R", &["X", "Yp", "Z"])),
                Literal::pos(atom("R", &["X", "Y", "Zp"])),
            ],
            Origin::Ic,
        );
        assert_eq!(classify_ic_case(&[ic]), IcCase::Case2);
    }
}
