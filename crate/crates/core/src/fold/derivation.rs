//! Derivation records. Every search node stores the step that produced it;
//! re-executing the step on the parent must reproduce the node's clause
//! exactly, which the proof-replay tests verify.

use crate::kernel::{resolve, Clause, PredSym, Subst};

/// Reserved head atom carrying the query's distinguished variables through
/// resolution. It is never selected for resolution and is stripped from all
/// user-facing output.
pub const ANS_PRED: &str = "$ans";

pub fn ans_pred() -> PredSym {
    PredSym::Named(ANS_PRED.to_string())
}

pub fn is_ans(atom: &crate::kernel::Atom) -> bool {
    atom.pred == ans_pred()
}

/// Strips the answer atom, returning the visible clause.
pub fn strip_ans(c: &Clause) -> Clause {
    Clause {
        head: c.head.iter().filter(|a| !is_ans(a)).cloned().collect(),
        body: c.body.clone(),
        origin: c.origin,
        support: c.support,
    }
}

/// The answer tuple, when present.
pub fn ans_args(c: &Clause) -> Option<&[crate::kernel::Term]> {
    c.head.iter().find(|a| is_ans(a)).map(|a| a.args.as_slice())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Partner {
    Input(usize),
    Supported(usize),
    Ancestor(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    /// A positive body literal of this clause against a head atom of the
    /// partner.
    BodyVsHead,
    /// A head atom of this clause against a positive body literal of the
    /// partner.
    HeadVsBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Top {
        disjunct: usize,
    },
    Resolve {
        partner: Partner,
        dir: Dir,
        this_idx: usize,
        partner_idx: usize,
        /// The partner clause after renaming apart, recorded so replay is
        /// exact.
        renamed: Clause,
        mgu: Subst,
    },
    /// Merge of two unifiable atoms of the same polarity.
    Factor {
        in_head: bool,
        keep: usize,
        merged: usize,
        mgu: Subst,
    },
    /// Removal of an exact duplicate literal.
    RemoveDuplicate {
        in_head: bool,
        removed: usize,
    },
    /// Removal of a ground comparison that evaluates to true.
    BuiltinTrue {
        removed: usize,
    },
    /// Removal of a comparison implied by a stronger one in the same body.
    BuiltinSubsume {
        removed: usize,
        implied_by: usize,
    },
    /// Head atoms moved to the body under default negation (closed world).
    CwaRewrite,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Top { .. } => "top",
            Step::Resolve { partner, .. } => match partner {
                Partner::Ancestor(_) => "ancestry",
                _ => "resolve",
            },
            Step::Factor { .. } => "factor",
            Step::RemoveDuplicate { .. } => "factor",
            Step::BuiltinTrue { .. } | Step::BuiltinSubsume { .. } => "builtin-subsume",
            Step::CwaRewrite => "cwa-rewrite",
        }
    }
}

/// Re-executes a recorded step against the parent clause.
pub fn replay(parent: &Clause, step: &Step) -> Option<Clause> {
    match step {
        Step::Top { .. } => None,
        Step::Resolve {
            dir,
            this_idx,
            partner_idx,
            renamed,
            ..
        } => {
            let (clause, _mgu) = match dir {
                Dir::BodyVsHead => resolve(parent, *this_idx, renamed, *partner_idx)?,
                Dir::HeadVsBody => resolve(renamed, *partner_idx, parent, *this_idx)?,
            };
            Some(clause)
        }
        Step::Factor {
            in_head,
            keep,
            merged,
            ..
        } => {
            let mut subst = Subst::new();
            let ok = if *in_head {
                crate::kernel::unify_atoms_under(
                    &parent.head[*keep],
                    &parent.head[*merged],
                    &mut subst,
                )
            } else {
                parent.body[*keep].positive == parent.body[*merged].positive
                    && crate::kernel::unify_atoms_under(
                        &parent.body[*keep].atom,
                        &parent.body[*merged].atom,
                        &mut subst,
                    )
            };
            if !ok {
                return None;
            }
            let mut out = parent.clone();
            if *in_head {
                out.head.remove(*merged);
            } else {
                out.body.remove(*merged);
            }
            Some(subst.apply_clause(&out))
        }
        Step::RemoveDuplicate { in_head, removed } => {
            let mut out = parent.clone();
            if *in_head {
                out.head.remove(*removed);
            } else {
                out.body.remove(*removed);
            }
            Some(out)
        }
        Step::BuiltinTrue { removed } | Step::BuiltinSubsume { removed, .. } => {
            let mut out = parent.clone();
            out.body.remove(*removed);
            Some(out)
        }
        Step::CwaRewrite => {
            let mut out = parent.clone();
            let moved: Vec<_> = out.head.iter().filter(|a| !is_ans(a)).cloned().collect();
            out.head.retain(|a| is_ans(a));
            for a in moved {
                out.body.push(crate::kernel::Literal::neg(a));
            }
            Some(out)
        }
    }
}

/// One node of a derivation chain as handed to reports and tests.
#[derive(Clone, Debug)]
pub struct DerivationNode {
    pub clause: Clause,
    pub step: Step,
    pub depth: usize,
}

/// Checks that every node of a chain reproduces from its predecessor.
pub fn replays(chain: &[DerivationNode]) -> bool {
    for w in chain.windows(2) {
        match replay(&w[0].clause, &w[1].step) {
            Some(c) if c == w[1].clause => {}
            _ => return false,
        }
    }
    true
}
