//! A query-folding engine for deductive databases.
//!
//! Given a database split into base relations, derived rules, integrity
//! constraints, and materialized resource views, this crate rewrites queries
//! posed over the base and derived predicates into queries over the
//! resources. The rewriting is resolution-based: resource definitions are
//! inverted into Clark-completion rules, a linear or set-of-support search
//! derives candidate rewritings, and each result is classified as a complete
//! or partial folding. A companion checker decides when the folded queries
//! return every answer of the original, and a bottom-up evaluator answers
//! recursive queries directly from resource facts.

pub mod completeness;
pub mod completion;
pub mod eval;
pub mod fold;
pub mod kernel;
pub mod parser;
pub mod program;

pub use kernel::{Atom, Clause, CmpOp, Const, Literal, Origin, PredSym, SkolemFn, Subst, Term};
pub use program::{Decls, PredicateDecl, Program, QueryDef, Role};
