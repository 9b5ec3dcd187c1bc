//! Most-general unification with the occurs check.

use super::clause::Atom;
use super::subst::Subst;
use super::term::Term;

/// Unifies two terms under an accumulating substitution.
pub fn unify_terms(a: &Term, b: &Term, subst: &mut Subst) -> bool {
    let a = subst.apply_term(a);
    let b = subst.apply_term(b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        // Between two variables, bind the right one so the left clause's
        // names survive; derivations then read like their source clauses.
        (Term::Var(_), Term::Var(y)) => subst.bind(y, &a),
        (Term::Var(x), t) => subst.bind(x, t),
        (t, Term::Var(y)) => subst.bind(y, t),
        (Term::Cst(c), Term::Cst(d)) => c == d,
        (Term::Sk(f, fa), Term::Sk(g, ga)) => {
            f == g && fa.len() == ga.len() && unify_lists(fa, ga, subst)
        }
        _ => false,
    }
}

fn unify_lists(xs: &[Term], ys: &[Term], subst: &mut Subst) -> bool {
    xs.iter().zip(ys).all(|(x, y)| unify_terms(x, y, subst))
}

/// Returns a most general unifier of two atoms, or None when the predicates
/// differ, a constant clashes, or the occurs check fails. Callers are
/// expected to have renamed the atoms apart.
pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Subst> {
    let mut subst = Subst::new();
    if unify_atoms_under(a, b, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

pub fn unify_atoms_under(a: &Atom, b: &Atom, subst: &mut Subst) -> bool {
    a.pred == b.pred && a.args.len() == b.args.len() && unify_lists(&a.args, &b.args, subst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::term::SkolemFn;

    #[test]
    fn test_constant_matching() {
        // unify(p(X,b), p(a,Y)) yields {X/a, Y/b}.
        let a = Atom::new("p", vec![Term::var("X"), Term::sym("b")]);
        let b = Atom::new("p", vec![Term::sym("a"), Term::var("Y")]);
        let s = unify_atoms(&a, &b).unwrap();
        assert_eq!(s.get("X"), Some(Term::sym("a")));
        assert_eq!(s.get("Y"), Some(Term::sym("b")));
        assert_eq!(s.apply_atom(&a), s.apply_atom(&b));
    }

    #[test]
    fn test_predicate_mismatch() {
        let a = Atom::new("p", vec![Term::var("X")]);
        let b = Atom::new("q", vec![Term::var("X")]);
        assert!(unify_atoms(&a, &b).is_none());
    }

    #[test]
    fn test_skolem_binding() {
        // unify(edge(X,Z), edge(X',f(X',Y'))) binds Z to the Skolem term.
        let f = SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "Z".into(),
        };
        let a = Atom::new("edge", vec![Term::var("X"), Term::var("Z")]);
        let b = Atom::new(
            "edge",
            vec![
                Term::var("X1"),
                Term::Sk(f.clone(), vec![Term::var("X1"), Term::var("Y1")]),
            ],
        );
        let s = unify_atoms(&a, &b).unwrap();
        assert_eq!(s.apply_atom(&a), s.apply_atom(&b));
        let z = s.apply_term(&Term::var("Z"));
        assert!(z.has_skolem());
    }

    #[test]
    fn test_occurs_check() {
        let f = SkolemFn {
            resource: "r".into(),
            def_index: 0,
            var: "Z".into(),
        };
        let a = Atom::new("p", vec![Term::var("X")]);
        let b = Atom::new("p", vec![Term::Sk(f, vec![Term::var("X")])]);
        assert!(unify_atoms(&a, &b).is_none());
    }
}
