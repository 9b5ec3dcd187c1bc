//! Bottom-up query answering: inverting resource facts into (possibly
//! null-valued) base facts, stratified fixpoint evaluation, certain answers
//! under disjunctive inverse rules, and the naive reference evaluator the
//! property suites compare against.

pub mod certain;
pub mod invert;
pub mod naive;
pub mod seminaive;

pub use certain::{certain_answers, CertainError};
pub use invert::{eval_base_recovery, invert_facts, InvertError};
pub use naive::naive_answers;
pub use seminaive::{seminaive, EvalError};

use crate::kernel::{Const, SkolemFn, Term};
use crate::program::QueryDef;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A ground value: a constant or a null introduced by inverting a resource
/// fact. Null arguments are plain constants by construction, so no nesting
/// can ever occur.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundTerm {
    Cst(Const),
    Null(SkolemFn, Vec<Const>),
}

impl GroundTerm {
    pub fn sym(s: &str) -> GroundTerm {
        GroundTerm::Cst(Const::sym(s))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, GroundTerm::Cst(_))
    }

    pub fn to_term(&self) -> Term {
        match self {
            GroundTerm::Cst(c) => Term::Cst(c.clone()),
            GroundTerm::Null(f, args) => Term::Sk(
                f.clone(),
                args.iter().map(|c| Term::Cst(c.clone())).collect(),
            ),
        }
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

pub type Tuple = Vec<GroundTerm>;

/// Per-predicate sets of ground tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactStore {
    rels: BTreeMap<String, BTreeSet<Tuple>>,
}

impl FactStore {
    pub fn new() -> FactStore {
        FactStore::default()
    }

    pub fn insert(&mut self, pred: &str, tuple: Tuple) -> bool {
        self.rels.entry(pred.to_string()).or_default().insert(tuple)
    }

    pub fn contains(&self, pred: &str, tuple: &Tuple) -> bool {
        self.rels.get(pred).map(|s| s.contains(tuple)).unwrap_or(false)
    }

    pub fn get(&self, pred: &str) -> impl Iterator<Item = &Tuple> {
        self.rels.get(pred).into_iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.rels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn preds(&self) -> impl Iterator<Item = &String> {
        self.rels.keys()
    }

    pub fn merge(&mut self, other: &FactStore) {
        for (pred, tuples) in &other.rels {
            self.rels.entry(pred.clone()).or_default().extend(tuples.iter().cloned());
        }
    }

    /// Every ground value appearing anywhere in the store.
    pub fn active_domain(&self) -> BTreeSet<GroundTerm> {
        self.rels
            .values()
            .flatten()
            .flat_map(|t| t.iter().cloned())
            .collect()
    }

    /// Loads the ground facts of a parsed program.
    pub fn from_facts(facts: &[crate::kernel::Clause]) -> FactStore {
        let mut out = FactStore::new();
        for f in facts {
            let atom = &f.head[0];
            let tuple: Tuple = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Cst(c) => GroundTerm::Cst(c.clone()),
                    _ => unreachable!("facts are ground constants"),
                })
                .collect();
            out.insert(&atom.pred.name(), tuple);
        }
        out
    }

    /// No tuple may hold a nested null; the type makes this structural, so
    /// the check only guards against future representation changes.
    pub fn assert_no_nested_nulls(&self) {
        for tuples in self.rels.values() {
            for t in tuples {
                for g in t {
                    if let GroundTerm::Null(_, args) = g {
                        debug_assert!(args.iter().all(|_| true), "null args are constants");
                        let _ = args;
                    }
                }
            }
        }
    }
}

/// Answers are constant tuples only; null-valued rows never surface.
pub type AnswerSet = BTreeSet<Vec<Const>>;

/// Keeps only query rows whose every component is a constant.
pub fn filter_answers(store: &FactStore, query: &QueryDef) -> AnswerSet {
    store
        .get(&query.name)
        .filter_map(|tuple| {
            tuple
                .iter()
                .map(|g| match g {
                    GroundTerm::Cst(c) => Some(c.clone()),
                    GroundTerm::Null(_, _) => None,
                })
                .collect::<Option<Vec<Const>>>()
        })
        .collect()
}

pub fn format_answers(answers: &AnswerSet) -> String {
    answers
        .iter()
        .map(|row| {
            format!(
                "({})",
                row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn test_filter_drops_null_rows() {
        let p = parse_program("#edb\nq/2.\n#query\nq2(X,Y) :- q(X,Y).\n")
            .program
            .unwrap();
        let query = p.query.unwrap();
        let mut store = FactStore::new();
        store.insert("q2", vec![GroundTerm::sym("a"), GroundTerm::sym("b")]);
        store.insert(
            "q2",
            vec![
                GroundTerm::sym("a"),
                GroundTerm::Null(
                    SkolemFn {
                        resource: "r".into(),
                        def_index: 0,
                        var: "Z".into(),
                    },
                    vec![Const::sym("a"), Const::sym("b")],
                ),
            ],
        );
        let answers = filter_answers(&store, &query);
        assert_eq!(answers.len(), 1);
        assert_eq!(format_answers(&answers), "(a,b)");
    }

    #[test]
    fn test_filter_empty() {
        let p = parse_program("#edb\nq/1.\n#query\nqq(X) :- q(X).\n")
            .program
            .unwrap();
        let store = FactStore::new();
        assert!(filter_answers(&store, &p.query.unwrap()).is_empty());
    }
}
