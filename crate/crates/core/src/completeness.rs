//! The completeness test: does the union of the folded queries return every
//! answer of the original query?
//!
//! The query is asserted in non-negated form with a fresh constant per
//! distinguished variable, the case-1 and case-2 leaves are given support,
//! and set-of-support resolution with factoring and ancestry runs over the
//! derived rules, constraints, and forward resource definitions. Reaching
//! the empty clause proves completeness; anything else leaves the question
//! open.

use crate::fold::{
    extract_chain, DerivationNode, Engine, EngineConfig, FoldOutcome, InputClause, Mode,
    OutcomeKind, Prepared, SearchConfig,
};
use crate::kernel::{Atom, Clause, Const, Origin, Subst, Term};
use crate::program::QueryDef;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    NotProven,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    DepthBoundReached,
    SearchExhausted,
}

#[derive(Clone, Debug)]
pub struct CompletenessVerdict {
    pub status: Status,
    pub reason: Option<Reason>,
    /// A replayable refutation ending in the empty clause, when proven.
    pub refutation: Vec<DerivationNode>,
}

/// Fresh assertion constants are drawn from a reserved namespace so they can
/// never collide with program constants.
fn assertion_constant(i: usize) -> Term {
    Term::Cst(Const::Sym(format!("$k{}", i)))
}

const MAX_CNF: usize = 64;

/// Grounds the non-negated query: each distinguished or body variable gets
/// one fresh constant shared across disjuncts, and the disjunction of the
/// ground conjunctions is put into conjunctive normal form, one disjunctive
/// fact per factor.
fn assert_query(query: &QueryDef) -> Option<Vec<Clause>> {
    let mut subst = Subst::new();
    let mut counter = 0usize;
    let mut vars: Vec<String> = Vec::new();
    for rule in &query.rules {
        for v in rule.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    for v in vars {
        subst.bind(&v, &assertion_constant(counter));
        counter += 1;
    }
    let grounded: Vec<Vec<Atom>> = query
        .rules
        .iter()
        .map(|r| {
            r.body
                .iter()
                .filter(|l| l.positive)
                .map(|l| subst.apply_atom(&l.atom))
                .collect()
        })
        .collect();
    let mut factors: Vec<Vec<Atom>> = vec![vec![]];
    for disjunct in &grounded {
        let mut next = Vec::new();
        for f in &factors {
            for atom in disjunct {
                let mut g = f.clone();
                if !g.contains(atom) {
                    g.push(atom.clone());
                }
                next.push(g);
                if next.len() > MAX_CNF {
                    return None;
                }
            }
        }
        factors = next;
    }
    Some(
        factors
            .into_iter()
            .map(|head| Clause::new(head, vec![], Origin::Query))
            .collect(),
    )
}

/// Runs the completeness test over the case-1 and case-2 leaves of a fold
/// report. Leaves rewritten under the closed world assumption are skipped:
/// their default negation has no clausal reading here.
pub fn check_completeness(
    prep: &Prepared,
    outcomes: &[FoldOutcome],
    cfg: &SearchConfig,
) -> CompletenessVerdict {
    let leaves: Vec<&FoldOutcome> = outcomes
        .iter()
        .filter(|o| {
            matches!(o.kind, OutcomeKind::Complete | OutcomeKind::Partial) && !o.used_cwa
        })
        .collect();
    let mut inputs: Vec<InputClause> = Vec::new();
    for (i, rule) in prep.program.idb.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("idb{}", i + 1),
            clause: rule.clone(),
        });
    }
    for (i, ic) in prep.program.ics.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("ic{}", i + 1),
            clause: ic.clone(),
        });
    }
    for (i, fwd) in prep.program.res.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("res{}", i + 1),
            clause: fwd.clone(),
        });
    }
    let asserted = match assert_query(&prep.query) {
        Some(a) => a,
        None => {
            return CompletenessVerdict {
                status: Status::NotProven,
                reason: Some(Reason::SearchExhausted),
                refutation: Vec::new(),
            }
        }
    };
    debug_assert!(asserted.iter().all(|c| c
        .head
        .iter()
        .flat_map(|a| a.args.iter())
        .all(|t| matches!(t, Term::Cst(Const::Sym(s)) if s.starts_with("$k")))));
    for (i, fact) in asserted.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("query_fact{}", i + 1),
            clause: fact.clone(),
        });
    }
    let engine_cfg = EngineConfig {
        mode: Mode::Disjunctive,
        depth_bound: if prep.has_builtins {
            Some(cfg.depth_bound)
        } else {
            None
        },
        ancestry: true,
        stop_at_empty: true,
        require_var_answers: false,
        supported_pairs: false,
        step_budget: cfg.step_budget,
    };
    let mut engine = Engine::new(inputs, engine_cfg);
    for (i, leaf) in leaves.iter().enumerate() {
        let mut clause = leaf.raw.clone();
        clause.support = true;
        engine.add_top(clause, i);
    }
    engine.run();
    match engine.empty_clause {
        Some(node) => CompletenessVerdict {
            status: Status::Proven,
            reason: None,
            refutation: extract_chain(&engine, node),
        },
        None => CompletenessVerdict {
            status: Status::NotProven,
            reason: Some(if engine.hit_depth_bound || engine.hit_budget {
                Reason::DepthBoundReached
            } else {
                Reason::SearchExhausted
            }),
            refutation: Vec::new(),
        },
    }
}

/// The disjuncts of the original query not covered by any case-1 or case-2
/// leaf: a conservative under-approximation of the residue that still has
/// to be answered directly.
pub fn residual_query(query: &QueryDef, outcomes: &[FoldOutcome]) -> QueryDef {
    let covered: BTreeSet<usize> = outcomes
        .iter()
        .filter(|o| matches!(o.kind, OutcomeKind::Complete | OutcomeKind::Partial))
        .flat_map(|o| o.roots.iter().copied())
        .collect();
    QueryDef {
        name: query.name.clone(),
        dvars: query.dvars.clone(),
        rules: query
            .rules
            .iter()
            .enumerate()
            .filter(|(i, _)| !covered.contains(i))
            .map(|(_, r)| r.clone())
            .collect(),
    }
}
