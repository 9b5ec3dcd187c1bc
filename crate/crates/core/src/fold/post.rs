//! Folding post-processing: renamed guard predicates turn back into default
//! negation, expansion equalities are folded back into their atoms, and
//! redundant literals are dropped.

use crate::kernel::{builtin_implies, Atom, Clause, CmpOp, Literal, PredSym, Subst, Term};
use std::collections::BTreeMap;

/// Cleans up a folding for presentation and evaluation. `renames` maps base
/// predicate names to their guard names; `protected` are the distinguished
/// variables, whose equalities are kept rather than inlined away.
pub fn postprocess(
    clause: &Clause,
    renames: &BTreeMap<String, String>,
    protected: &[String],
) -> Clause {
    let guard_to_base: BTreeMap<&String, &String> =
        renames.iter().map(|(b, g)| (g, b)).collect();
    let mut out = clause.clone();
    // Guards back to default negation.
    out.body = out
        .body
        .iter()
        .map(|l| match &l.atom.pred {
            PredSym::Named(n) if l.positive => match guard_to_base.get(n) {
                Some(base) => Literal::neg(Atom::new(base, l.atom.args.clone())),
                None => l.clone(),
            },
            _ => l.clone(),
        })
        .collect();
    // Re-inline equalities introduced by expansion.
    loop {
        let target = out.body.iter().enumerate().find_map(|(i, l)| {
            if !l.positive || l.atom.builtin_op() != Some(CmpOp::Eq) {
                return None;
            }
            let (a, b) = (&l.atom.args[0], &l.atom.args[1]);
            if a == b {
                return Some((i, None));
            }
            let eliminable = |t: &Term, other: &Term| match t {
                Term::Var(v) if !protected.contains(v) && !other.contains_var(v) => {
                    Some((v.clone(), other.clone()))
                }
                _ => None,
            };
            if let Some(binding) = eliminable(a, b) {
                return Some((i, Some(binding)));
            }
            if let Some(binding) = eliminable(b, a) {
                return Some((i, Some(binding)));
            }
            None
        });
        match target {
            Some((i, binding)) => {
                out.body.remove(i);
                if let Some((v, t)) = binding {
                    let mut s = Subst::new();
                    s.bind(&v, &t);
                    out = s.apply_clause(&out);
                }
            }
            None => break,
        }
    }
    // Duplicate and implied-comparison removal.
    out = crate::kernel::dedup_exact(&out);
    loop {
        let removable = out.body.iter().enumerate().find_map(|(i, l)| {
            if !l.positive || !l.atom.is_builtin() {
                return None;
            }
            out.body
                .iter()
                .enumerate()
                .any(|(j, other)| {
                    i != j
                        && other.positive
                        && other.atom.is_builtin()
                        && other.atom != l.atom
                        && builtin_implies(&other.atom, &l.atom)
                })
                .then_some(i)
        });
        match removable {
            Some(i) => {
                out.body.remove(i);
            }
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{format_clause, parse_clause};

    #[test]
    fn test_constant_reinlined() {
        let c = parse_clause(":- r1(X,Z), r2(Z,W), W = c.").unwrap();
        let out = postprocess(&c, &BTreeMap::new(), &["X".into()]);
        assert_eq!(format_clause(&out), ":- r1(X,Z), r2(Z,c).");
    }

    #[test]
    fn test_guard_back_to_negation() {
        let c = parse_clause(":- r(X), not_p3(X).").unwrap();
        let mut renames = BTreeMap::new();
        renames.insert("p3".to_string(), "not_p3".to_string());
        let out = postprocess(&c, &renames, &["X".into()]);
        assert_eq!(format_clause(&out), ":- r(X), not p3(X).");
    }

    #[test]
    fn test_implied_comparison_dropped() {
        let c = parse_clause(":- r(X,Y,Z), Z > 1, Z > 0.").unwrap();
        let out = postprocess(&c, &BTreeMap::new(), &["X".into(), "Y".into()]);
        assert_eq!(format_clause(&out), ":- r(X,Y,Z), Z > 1.");
    }

    #[test]
    fn test_protected_variable_equality_kept() {
        // The distinguished variable X must stay visible, so X = c is kept.
        let c = parse_clause(":- r(Y), X = c.").unwrap();
        let out = postprocess(&c, &BTreeMap::new(), &["X".into()]);
        assert_eq!(format_clause(&out), ":- r(Y), X = c.");
    }

    #[test]
    fn test_variable_equality_inlined() {
        let c = parse_clause(":- r(X,Z1), k(Y,Z), Z1 = Z.").unwrap();
        let out = postprocess(&c, &BTreeMap::new(), &["X".into(), "Y".into()]);
        assert_eq!(format_clause(&out), ":- r(X,Z), k(Y,Z).");
    }
}
