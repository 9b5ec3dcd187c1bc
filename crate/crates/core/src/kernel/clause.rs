//! Atoms, literals, and clauses in implication form: a disjunction of head
//! atoms implied by a conjunction of body literals.

use super::term::Term;
use std::collections::BTreeSet;
use std::fmt;

/// Built-in comparison operators. Always binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn text(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredSym {
    Named(String),
    Cmp(CmpOp),
}

impl PredSym {
    pub fn name(&self) -> String {
        match self {
            PredSym::Named(s) => s.clone(),
            PredSym::Cmp(op) => op.text().to_string(),
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, PredSym::Cmp(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: PredSym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: PredSym::Named(name.to_string()),
            args,
        }
    }

    pub fn cmp(op: CmpOp, lhs: Term, rhs: Term) -> Atom {
        Atom {
            pred: PredSym::Cmp(op),
            args: vec![lhs, rhs],
        }
    }

    pub fn is_builtin(&self) -> bool {
        self.pred.is_builtin()
    }

    pub fn builtin_op(&self) -> Option<CmpOp> {
        match self.pred {
            PredSym::Cmp(op) => Some(op),
            PredSym::Named(_) => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn has_skolem(&self) -> bool {
        self.args.iter().any(|t| t.has_skolem())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pred {
            PredSym::Cmp(op) => write!(f, "{} {} {}", self.args[0], op, self.args[1]),
            PredSym::Named(name) => {
                write!(f, "{}", name)?;
                if !self.args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in self.args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// An atom or its default negation. Negated literals appear only in bodies,
/// and built-in atoms are never default-negated (flip the operator instead).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal {
            atom,
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "not {}", self.atom)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Query,
    Ic,
    Idb,
    /// An inverse (Clark completion) resource rule.
    Inverse,
    /// A forward resource rule, usable in the completeness test.
    Resource,
    Fact,
    Derived,
    /// A built-in axiom such as equality transitivity.
    Axiom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Vec<Atom>,
    pub body: Vec<Literal>,
    pub origin: Origin,
    pub support: bool,
}

impl Clause {
    pub fn new(head: Vec<Atom>, body: Vec<Literal>, origin: Origin) -> Clause {
        Clause {
            head,
            body,
            origin,
            support: false,
        }
    }

    /// A headless goal clause.
    pub fn goal(body: Vec<Literal>) -> Clause {
        Clause::new(vec![], body, Origin::Query)
    }

    pub fn rule(head: Atom, body: Vec<Literal>, origin: Origin) -> Clause {
        Clause::new(vec![head], body, origin)
    }

    pub fn fact(atom: Atom) -> Clause {
        Clause::new(vec![atom], vec![], Origin::Fact)
    }

    pub fn is_horn(&self) -> bool {
        self.head.len() <= 1
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in &self.head {
            a.collect_vars(&mut out);
        }
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn has_skolem(&self) -> bool {
        self.head.iter().any(Atom::has_skolem) || self.body.iter().any(|l| l.atom.has_skolem())
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_empty() && self.body.is_empty()
    }

    pub fn with_support(mut self, support: bool) -> Clause {
        self.support = support;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Atom {
        Atom::new("p", args)
    }

    #[test]
    fn test_atom_display() {
        assert_eq!(p(vec![Term::var("X"), Term::sym("a")]).to_string(), "p(X,a)");
        assert_eq!(Atom::new("q", vec![]).to_string(), "q");
        assert_eq!(
            Atom::cmp(CmpOp::Gt, Term::var("Z"), Term::int(1)).to_string(),
            "Z > 1"
        );
    }

    #[test]
    fn test_clause_vars() {
        let c = Clause::rule(
            p(vec![Term::var("X")]),
            vec![Literal::pos(Atom::new("q", vec![Term::var("X"), Term::var("Y")]))],
            Origin::Idb,
        );
        let vars: Vec<_> = c.vars().into_iter().collect();
        assert_eq!(vars, vec!["X".to_string(), "Y".to_string()]);
    }

    #[test]
    fn test_empty_clause() {
        let c = Clause::goal(vec![]);
        assert!(c.is_empty());
        assert!(c.is_horn());
    }
}
