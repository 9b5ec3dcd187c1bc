//! Substitutions: finite maps from variables to terms. Bindings are kept in
//! triangular form internally and chased on application, so the observable
//! behavior is idempotent: applying twice equals applying once.

use super::clause::{Atom, Clause, Literal};
use super::term::Term;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Debug, Default)]
pub struct Subst {
    bindings: HashMap<String, Term>,
}

impl PartialEq for Subst {
    fn eq(&self, other: &Self) -> bool {
        if self.bindings.len() != other.bindings.len() {
            return false;
        }
        self.bindings
            .keys()
            .chain(other.bindings.keys())
            .all(|k| self.apply_term(&Term::Var(k.clone())) == other.apply_term(&Term::Var(k.clone())))
    }
}

impl Eq for Subst {}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// The fully resolved binding of a variable, if any.
    pub fn get(&self, var: &str) -> Option<Term> {
        self.bindings
            .get(var)
            .map(|t| self.apply_term(t))
    }

    /// All bindings, fully resolved, in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (String, Term)> + '_ {
        let mut keys: Vec<&String> = self.bindings.keys().collect();
        keys.sort();
        keys.into_iter()
            .map(|k| (k.clone(), self.apply_term(&self.bindings[k])))
    }

    /// Binds `var` to `term`. The term is resolved under the current
    /// bindings first; a failed occurs check leaves the substitution
    /// unchanged and returns false.
    pub fn bind(&mut self, var: &str, term: &Term) -> bool {
        let resolved = self.apply_term(term);
        if let Term::Var(v) = &resolved {
            if v == var {
                return true;
            }
        }
        if resolved.contains_var(var) {
            return false;
        }
        self.bindings.insert(var.to_string(), resolved);
        true
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.bindings.get(v) {
                Some(bound) => self.apply_term(bound),
                None => t.clone(),
            },
            Term::Cst(_) => t.clone(),
            Term::Sk(f, args) => Term::Sk(
                f.clone(),
                args.iter().map(|a| self.apply_term(a)).collect(),
            ),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.apply_term(t)).collect(),
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            atom: self.apply_atom(&l.atom),
            positive: l.positive,
        }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause {
            head: c.head.iter().map(|a| self.apply_atom(a)).collect(),
            body: c.body.iter().map(|l| self.apply_literal(l)).collect(),
            origin: c.origin,
            support: c.support,
        }
    }

    /// Restricts the substitution to bindings whose variable is in `vars`,
    /// resolving ranges fully.
    pub fn restricted_to(&self, vars: &std::collections::BTreeSet<String>) -> Subst {
        Subst {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), self.apply_term(v)))
                .collect(),
        }
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}/{}", v, t)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::clause::Atom;

    #[test]
    fn test_parallel_application() {
        // p(X,Y) under {X/a, Y/b} becomes p(a,b).
        let mut s = Subst::new();
        assert!(s.bind("X", &Term::sym("a")));
        assert!(s.bind("Y", &Term::sym("b")));
        let a = Atom::new("p", vec![Term::var("X"), Term::var("Y")]);
        assert_eq!(s.apply_atom(&a).to_string(), "p(a,b)");
    }

    #[test]
    fn test_identity_substitution() {
        let s = Subst::new();
        let a = Atom::new("p", vec![Term::var("X")]);
        assert_eq!(s.apply_atom(&a), a);
    }

    #[test]
    fn test_idempotence_via_chained_bindings() {
        // Binding X to a term mentioning Y, then Y to a, must leave no
        // residual Y after application: applying once equals applying twice.
        let mut s = Subst::new();
        let sk = crate::kernel::term::SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "Z".into(),
        };
        assert!(s.bind("X", &Term::Sk(sk, vec![Term::var("Y")])));
        assert!(s.bind("Y", &Term::sym("a")));
        let a = Atom::new("p", vec![Term::var("X"), Term::var("Z")]);
        let once = s.apply_atom(&a);
        let twice = s.apply_atom(&once);
        assert_eq!(once, twice);
        // No resolved binding's range mentions a bound variable.
        for (_, range) in s.iter() {
            let mut vars = std::collections::BTreeSet::new();
            range.collect_vars(&mut vars);
            assert!(vars.iter().all(|v| s.get(v).is_none()));
        }
    }

    #[test]
    fn test_occurs_check_on_bind() {
        let mut s = Subst::new();
        let sk = crate::kernel::term::SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "Z".into(),
        };
        assert!(!s.bind("X", &Term::Sk(sk, vec![Term::var("X")])));
    }

    #[test]
    fn test_occurs_check_through_chain() {
        // y -> f(x), then x -> g(y) must fail: it would close a cycle.
        let mut s = Subst::new();
        let f = crate::kernel::term::SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "F".into(),
        };
        let g = crate::kernel::term::SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "G".into(),
        };
        assert!(s.bind("Y", &Term::Sk(f, vec![Term::var("X")])));
        assert!(!s.bind("X", &Term::Sk(g, vec![Term::var("Y")])));
    }
}
