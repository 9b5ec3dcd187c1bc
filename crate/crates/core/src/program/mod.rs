//! The four-part database (base declarations, derived rules, integrity
//! constraints, resource definitions) plus its static analyses.

pub mod analysis;
pub mod classify;
pub mod transform;

pub use analysis::{check_extra_safety, check_safety, rescale_strata, stratify, Safety};
pub use classify::{classify_ic_case, is_singular, IcCase, Singularity};
pub use transform::{compile_idb, expand_rule};

use crate::kernel::{Atom, Clause, PredSym, Term};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Edb,
    Idb,
    Res,
    Builtin,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Edb => "edb",
            Role::Idb => "idb",
            Role::Res => "resource",
            Role::Builtin => "builtin",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub arity: usize,
    pub role: Role,
    pub cwa_complete: bool,
    /// When set to k, the first k columns form a key for the relation.
    pub key_prefix_len: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decls {
    map: BTreeMap<String, PredicateDecl>,
}

impl Decls {
    pub fn new() -> Decls {
        Decls::default()
    }

    pub fn insert(&mut self, decl: PredicateDecl) -> Option<PredicateDecl> {
        self.map.insert(decl.name.clone(), decl)
    }

    pub fn get(&self, name: &str) -> Option<&PredicateDecl> {
        self.map.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut PredicateDecl> {
        self.map.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PredicateDecl> {
        self.map.values()
    }

    pub fn role_of(&self, pred: &PredSym) -> Option<Role> {
        match pred {
            PredSym::Cmp(_) => Some(Role::Builtin),
            PredSym::Named(name) => self.map.get(name).map(|d| d.role),
        }
    }

    pub fn role_of_atom(&self, atom: &Atom) -> Option<Role> {
        self.role_of(&atom.pred)
    }
}

/// A query: a named head over distinguished variables, defined by one or
/// more rules. Several rules with the same head form a disjunction; a rule
/// whose body mentions the query predicate itself makes the query recursive
/// (such queries are answered bottom-up, not folded).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDef {
    pub name: String,
    pub dvars: Vec<String>,
    pub rules: Vec<Clause>,
}

impl QueryDef {
    pub fn head_atom(&self) -> Atom {
        Atom::new(
            &self.name,
            self.dvars.iter().map(|v| Term::var(v)).collect(),
        )
    }

    pub fn is_recursive(&self) -> bool {
        self.rules.iter().any(|r| {
            r.body
                .iter()
                .any(|l| l.atom.pred == PredSym::Named(self.name.clone()))
        })
    }

    /// The disjuncts of a non-recursive query: one conjunctive body per rule.
    pub fn disjuncts(&self) -> Vec<Vec<crate::kernel::Literal>> {
        self.rules.iter().map(|r| r.body.clone()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub decls: Decls,
    pub idb: Vec<Clause>,
    pub ics: Vec<Clause>,
    pub res: Vec<Clause>,
    pub facts: Vec<Clause>,
    pub query: Option<QueryDef>,
}

impl Program {
    /// Resource rules grouped by the predicate they define, in declaration
    /// order within each group.
    pub fn res_by_pred(&self) -> BTreeMap<String, Vec<Clause>> {
        let mut out: BTreeMap<String, Vec<Clause>> = BTreeMap::new();
        for r in &self.res {
            out.entry(r.head[0].pred.name()).or_default().push(r.clone());
        }
        out
    }

    pub fn has_negation(&self) -> bool {
        let rule_neg = |c: &Clause| c.body.iter().any(|l| !l.positive);
        self.idb.iter().any(rule_neg)
            || self.res.iter().any(rule_neg)
            || self.ics.iter().any(rule_neg)
            || self
                .query
                .as_ref()
                .map(|q| q.rules.iter().any(rule_neg))
                .unwrap_or(false)
    }

    pub fn idb_is_recursive(&self) -> bool {
        analysis::rules_recursive(&self.idb)
    }

    pub fn res_is_recursive(&self) -> bool {
        // A resource is recursive if its body mentions any resource predicate.
        self.res.iter().any(|r| {
            r.body.iter().any(|l| {
                matches!(self.decls.role_of(&l.atom.pred), Some(Role::Res))
            })
        })
    }
}
