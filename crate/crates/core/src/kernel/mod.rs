//! Value-semantic clausal representation and its core operations:
//! unification, resolution, factoring, subsumption, and comparison
//! reasoning. Everything here is immutable after construction; the only
//! mutable state is the fresh-name counter a search thread owns.

pub mod builtin;
pub mod clause;
pub mod ops;
pub mod subst;
pub mod subsume;
pub mod term;
pub mod unify;

pub use builtin::{builtin_implies, eval_ground};
pub use clause::{Atom, Clause, CmpOp, Literal, Origin, PredSym};
pub use ops::{dedup_exact, factor, rename_apart, resolve, variant_eq, FreshCounter};
pub use subst::Subst;
pub use subsume::subsumes;
pub use term::{Const, SkolemFn, Term};
pub use unify::{unify_atoms, unify_atoms_under, unify_terms};
