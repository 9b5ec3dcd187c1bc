//! Query folding: rewriting the query over base and derived predicates into
//! queries over resource predicates.
//!
//! Preparation compiles negation away, rewrites resources over compiled
//! definitions, inverts them, and adds key-combined inverse rules. A Horn
//! program with a conjunctive query runs as a linear derivation; anything
//! disjunctive runs as set-of-support saturation. Leaves are classified into
//! the four cases, rewritten under the closed world assumption where
//! declared, and post-processed into presentable folded queries.

pub mod classify;
pub mod derivation;
pub mod engine;
pub mod post;

pub use classify::{apply_cwa_rewrite, classify_leaf, OutcomeKind};
pub use derivation::{ans_args, ans_pred, is_ans, replays, strip_ans, DerivationNode, Step};
pub use engine::{has_applicable_step, refuted_by_constraint, Engine, EngineConfig, InputClause, Mode};
pub use post::postprocess;

use crate::completion::{clark_completion, compile_negation, InverseRuleSet};
use crate::kernel::{Atom, Clause, CmpOp, FreshCounter, Literal, Origin, PredSym, Term};
use crate::program::{classify_ic_case, expand_rule, IcCase, Program, QueryDef};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FoldError {
    #[error("the program has no query")]
    NoQuery,
    #[error("the query is recursive; use bottom-up evaluation instead of folding")]
    RecursiveQuery,
    #[error("a resource is defined recursively; use bottom-up evaluation instead of folding")]
    RecursiveResource,
    #[error(transparent)]
    Completion(#[from] crate::completion::CompletionError),
    #[error(transparent)]
    Negation(#[from] crate::completion::NegationError),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Depth bound on resolutions, applied when constraints force one.
    pub depth_bound: usize,
    pub max_foldings: usize,
    /// Abandon a disjunct when a constraint subsumes it outright.
    pub prune_subsumption: bool,
    pub step_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            depth_bound: 12,
            max_foldings: 32,
            prune_subsumption: true,
            step_budget: 200_000,
        }
    }
}

/// Everything the search needs, derived once from the source program.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// The working program: negation compiled away, resources rewritten.
    pub program: Program,
    pub inv: InverseRuleSet,
    pub renames: BTreeMap<String, String>,
    pub mode: Mode,
    pub ic_case: IcCase,
    pub query: QueryDef,
    /// Expanded top-clause bodies, one per query disjunct.
    pub tops: Vec<Clause>,
    pub inputs: Vec<InputClause>,
    pub has_builtins: bool,
}

#[derive(Clone, Debug)]
pub struct FoldOutcome {
    pub kind: OutcomeKind,
    /// The leaf as derived, before post-processing.
    pub raw: Clause,
    /// The cleaned-up clause: guards renamed back, equalities re-inlined.
    pub clause: Clause,
    /// For complete and partial foldings, the runnable rewritten query.
    pub folded_query: Option<Clause>,
    pub used_cwa: bool,
    pub roots: BTreeSet<usize>,
    pub chain: Vec<DerivationNode>,
}

#[derive(Clone, Debug, Default)]
pub struct FoldReport {
    pub outcomes: Vec<FoldOutcome>,
    pub warnings: Vec<String>,
    pub refuted_disjuncts: Vec<usize>,
    pub truncated: bool,
}

impl FoldReport {
    pub fn foldings(&self) -> impl Iterator<Item = &FoldOutcome> {
        self.outcomes
            .iter()
            .filter(|o| matches!(o.kind, OutcomeKind::Complete | OutcomeKind::Partial))
    }
}

/// Rewrites a rule so its head is a tuple of distinct fresh-enough
/// variables, pushing constants and repeats into body equalities.
fn rectify_head(rule: &Clause, ctr: &mut FreshCounter) -> Clause {
    let head = &rule.head[0];
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut args = Vec::with_capacity(head.args.len());
    let mut extra = Vec::new();
    for t in &head.args {
        match t {
            Term::Var(v) if !seen.contains(v) => {
                seen.insert(v.clone());
                args.push(t.clone());
            }
            _ => {
                let fresh = ctr.fresh();
                extra.push(Literal::pos(Atom::cmp(
                    CmpOp::Eq,
                    Term::var(&fresh),
                    t.clone(),
                )));
                args.push(Term::var(&fresh));
            }
        }
    }
    if extra.is_empty() {
        return rule.clone();
    }
    let mut body = rule.body.clone();
    body.extend(extra);
    Clause {
        head: vec![Atom {
            pred: head.pred.clone(),
            args,
        }],
        body,
        origin: rule.origin,
        support: rule.support,
    }
}

pub fn prepare(source: &Program) -> Result<Prepared, FoldError> {
    let query = source.query.as_ref().ok_or(FoldError::NoQuery)?;
    if query.is_recursive() {
        return Err(FoldError::RecursiveQuery);
    }
    if source.res_is_recursive() {
        return Err(FoldError::RecursiveResource);
    }
    let mut ctr = FreshCounter::above(
        source
            .idb
            .iter()
            .chain(&source.res)
            .chain(&source.ics)
            .flat_map(|c| c.vars().into_iter()),
    );
    let mut cleaned = source.clone();
    cleaned.idb = cleaned.idb.iter().map(|r| rectify_head(r, &mut ctr)).collect();
    cleaned.res = cleaned.res.iter().map(|r| rectify_head(r, &mut ctr)).collect();

    let compiled = compile_negation(&cleaned)?;
    let program = compiled.program;
    let renames = compiled.renames;
    let inv = clark_completion(&program.res, &program.decls)?;
    let ic_case = classify_ic_case(&program.ics);
    let query = program.query.clone().expect("query survives compilation");

    let horn = !inv.has_disjunctive_heads()
        && query.rules.len() == 1
        && program.ics.iter().all(|ic| ic.head.len() <= 1);
    let mode = if horn { Mode::Horn } else { Mode::Disjunctive };

    // Inputs in resolution order: key-combined inverse rules first (they
    // shorten derivations), then inverse rules, constraints, derived rules,
    // and finally equality axioms when equality constraints exist.
    let mut inputs: Vec<InputClause> = Vec::new();
    for (label, clause) in inv.all_rules() {
        inputs.push(InputClause {
            label: label.clone(),
            clause: clause.clone(),
        });
    }
    for (i, ic) in program.ics.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("ic{}", i + 1),
            clause: ic.clone(),
        });
    }
    for (i, rule) in program.idb.iter().enumerate() {
        inputs.push(InputClause {
            label: format!("idb{}", i + 1),
            clause: rule.clone(),
        });
    }
    let eq_headed = program
        .ics
        .iter()
        .any(|ic| ic.head.iter().any(|a| a.builtin_op() == Some(CmpOp::Eq)));
    if eq_headed {
        inputs.push(InputClause {
            label: "eq_trans".to_string(),
            clause: Clause::rule(
                Atom::cmp(CmpOp::Eq, Term::var("EQ_X"), Term::var("EQ_Z")),
                vec![
                    Literal::pos(Atom::cmp(CmpOp::Eq, Term::var("EQ_X"), Term::var("EQ_Y"))),
                    Literal::pos(Atom::cmp(CmpOp::Eq, Term::var("EQ_Y"), Term::var("EQ_Z"))),
                ],
                Origin::Axiom,
            ),
        });
    }

    // Expansion frees embedded constants when built-in heads exist among
    // the resolution inputs, so equality constraints can reach them.
    let expand = inputs
        .iter()
        .any(|i| i.clause.head.iter().any(|a| a.is_builtin()));
    let mut tops = Vec::new();
    let mut top_ctr = FreshCounter::above(
        query
            .rules
            .iter()
            .flat_map(|r| r.vars().into_iter())
            .chain(inputs.iter().flat_map(|i| i.clause.vars().into_iter())),
    );
    for rule in &query.rules {
        let expanded = if expand {
            expand_rule(rule, &mut top_ctr)
        } else {
            rule.clone()
        };
        let head = vec![Atom {
            pred: ans_pred(),
            args: query.dvars.iter().map(|v| Term::var(v)).collect(),
        }];
        tops.push(Clause {
            head,
            body: expanded.body,
            origin: Origin::Query,
            support: true,
        });
    }

    let has_builtins = inputs
        .iter()
        .map(|i| &i.clause)
        .chain(tops.iter())
        .any(|c| {
            c.head.iter().any(|a| a.is_builtin())
                || c.body.iter().any(|l| l.atom.is_builtin())
        });

    Ok(Prepared {
        program,
        inv,
        renames,
        mode,
        ic_case,
        query,
        tops,
        inputs,
        has_builtins,
    })
}

pub fn fold(source: &Program, cfg: &SearchConfig) -> Result<(Prepared, FoldReport), FoldError> {
    let prep = prepare(source)?;
    let report = fold_prepared(&prep, cfg);
    Ok((prep, report))
}

pub fn fold_prepared(prep: &Prepared, cfg: &SearchConfig) -> FoldReport {
    let mut report = FoldReport::default();
    let engine_cfg = EngineConfig {
        mode: prep.mode,
        depth_bound: match prep.ic_case {
            IcCase::Case3 => Some(cfg.depth_bound),
            _ => None,
        },
        ancestry: false,
        stop_at_empty: false,
        require_var_answers: true,
        supported_pairs: true,
        step_budget: cfg.step_budget,
    };
    let mut engine = Engine::new(prep.inputs.clone(), engine_cfg);
    for (i, top) in prep.tops.iter().enumerate() {
        if cfg.prune_subsumption && refuted_by_constraint(top, &prep.program.ics) {
            report.refuted_disjuncts.push(i);
            report.warnings.push(format!(
                "query disjunct {} is subsumed by a constraint and can have no answers",
                i + 1
            ));
            continue;
        }
        engine.add_top(top.clone(), i);
    }
    engine.run();
    if std::env::var("QFOLD_STATS").is_ok() {
        let mut hist = std::collections::BTreeMap::new();
        for n in engine.nodes.iter().filter(|n| n.processed) {
            *hist.entry(n.res_depth).or_insert(0usize) += 1;
        }
        eprintln!(
            "stats: nodes={} admits={} memo_hits={} processed-by-depth={:?}",
            engine.nodes.len(),
            engine.stat_admits,
            engine.stat_memo_hits,
            hist
        );
    }
    if engine.hit_depth_bound {
        report.truncated = true;
        report.warnings.push(format!(
            "depth bound {} reached: the set of folded queries may be infinite and was truncated",
            cfg.depth_bound
        ));
    }
    if engine.hit_budget {
        report.truncated = true;
        report
            .warnings
            .push("search budget exhausted before saturation".to_string());
    }

    // Collect eligible leaves.
    struct Candidate {
        node: usize,
        kind: OutcomeKind,
        raw: Clause,
        visible: Clause,
        ans: Vec<Term>,
        used_cwa: bool,
        roots: BTreeSet<usize>,
        body_len: usize,
    }
    let supported: Vec<&Clause> = engine
        .nodes
        .iter()
        .filter(|n| n.processed)
        .map(|n| &n.clause)
        .collect();
    let mut candidates: Vec<Candidate> = Vec::new();
    if std::env::var("QFOLD_DEBUG_ARENA").is_ok() {
        for node in engine.nodes.iter() {
            let vis = strip_ans(&node.clause);
            let rs = vis.body.iter().filter(|l| l.atom.pred.name() == "r").count();
            if rs >= 2 && !node.clause.has_skolem() {
                eprintln!(
                    "arena d{} processed={} {}",
                    node.res_depth,
                    node.processed,
                    crate::parser::format_clause(&vis)
                );
            }
        }
    }
    for (id, node) in engine.nodes.iter().enumerate() {
        if !node.processed {
            continue;
        }
        if node.clause.has_skolem() {
            continue;
        }
        let visible = strip_ans(&node.clause);
        let ans: Vec<Term> = ans_args(&node.clause).map(|a| a.to_vec()).unwrap_or_default();
        // Every distinguished variable must appear in the visible clause.
        let visible_vars = visible.vars();
        if !ans.iter().all(|t| match t {
            Term::Var(v) => visible_vars.contains(v),
            _ => false,
        }) {
            if std::env::var("QFOLD_DEBUG").is_ok() {
                eprintln!(
                    "candidate blocked (answer vars): {} ans {:?}",
                    crate::parser::format_clause(&visible),
                    ans.iter().map(|t| t.to_string()).collect::<Vec<_>>()
                );
            }
            continue;
        }
        let kind = classify_leaf(&visible, &prep.program.decls);
        match kind {
            OutcomeKind::Complete | OutcomeKind::Partial => {
                // Emit only where no step applies to an ordinary literal:
                // anything else is an intermediate with more folding to do.
                // Built-in literals are exempt, since equality constraints
                // can spin unboundedly without improving the folding.
                if has_applicable_step(&node.clause, &prep.inputs, &supported, prep.mode, true) {
                    if std::env::var("QFOLD_DEBUG").is_ok() {
                        eprintln!("candidate blocked (applicable step): {}", crate::parser::format_clause(&visible));
                    }
                    continue;
                }
                candidates.push(Candidate {
                    node: id,
                    kind,
                    raw: visible.clone(),
                    visible,
                    ans,
                    used_cwa: false,
                    roots: node.roots.clone(),
                    body_len: node.clause.body.len(),
                });
            }
            OutcomeKind::NonHornResidue | OutcomeKind::NoResource => {
                if prep.mode == Mode::Horn {
                    continue;
                }
                let terminal =
                    !has_applicable_step(&node.clause, &prep.inputs, &supported, prep.mode, false);
                if !terminal {
                    continue;
                }
                if kind == OutcomeKind::NonHornResidue {
                    if let Some(rewritten) = apply_cwa_rewrite(&node.clause, &prep.program.decls)
                    {
                        let vis = strip_ans(&rewritten);
                        let new_kind = classify_leaf(&vis, &prep.program.decls);
                        candidates.push(Candidate {
                            node: id,
                            kind: new_kind,
                            raw: vis.clone(),
                            visible: vis.clone(),
                            ans,
                            used_cwa: true,
                            roots: node.roots.clone(),
                            body_len: vis.body.len(),
                        });
                        continue;
                    }
                }
                candidates.push(Candidate {
                    node: id,
                    kind,
                    raw: visible.clone(),
                    visible,
                    ans,
                    used_cwa: false,
                    roots: node.roots.clone(),
                    body_len: node.clause.body.len(),
                });
            }
        }
    }

    // A folding is dominated when a strictly smaller, at least as complete,
    // more general folding exists for the same disjuncts: everything it
    // returns, the smaller one returns too.
    let dominated: Vec<bool> = candidates
        .iter()
        .map(|n| {
            matches!(n.kind, OutcomeKind::Complete | OutcomeKind::Partial)
                && candidates.iter().any(|m| {
                    matches!(m.kind, OutcomeKind::Complete | OutcomeKind::Partial)
                        && m.roots == n.roots
                        && m.kind.rank() <= n.kind.rank()
                        && m.body_len < n.body_len
                        && subsumes_with_ans(&m.visible, &m.ans, &n.visible, &n.ans)
                })
        })
        .collect();

    let mut emitted: Vec<(Clause, Vec<Term>)> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if std::env::var("QFOLD_DEBUG").is_ok() {
            eprintln!(
                "candidate {:?} dominated={} {}",
                c.kind,
                dominated[i],
                crate::parser::format_clause(&c.visible)
            );
        }
        if dominated[i] {
            continue;
        }
        let final_clause = match c.kind {
            OutcomeKind::Complete | OutcomeKind::Partial => {
                let protected: Vec<String> = c
                    .ans
                    .iter()
                    .filter_map(|t| match t {
                        Term::Var(v) => Some(v.clone()),
                        _ => None,
                    })
                    .collect();
                postprocess(&c.visible, &prep.renames, &protected)
            }
            _ => c.visible.clone(),
        };
        if emitted
            .iter()
            .any(|(cl, ans)| ans.len() == c.ans.len() && variant_with_ans(cl, ans, &final_clause, &c.ans))
        {
            continue;
        }
        if report.outcomes.len() >= cfg.max_foldings {
            report.truncated = true;
            report
                .warnings
                .push(format!("more than {} foldings; list truncated", cfg.max_foldings));
            break;
        }
        let folded_query = match c.kind {
            OutcomeKind::Complete | OutcomeKind::Partial => Some(Clause::rule(
                Atom {
                    pred: PredSym::Named(prep.query.name.clone()),
                    args: c.ans.clone(),
                },
                final_clause.body.clone(),
                Origin::Derived,
            )),
            _ => None,
        };
        let mut chain = extract_chain(&engine, c.node);
        if c.used_cwa {
            let parent = chain.last().unwrap().clause.clone();
            let rewritten = derivation::replay(&parent, &Step::CwaRewrite).unwrap();
            chain.push(DerivationNode {
                clause: rewritten,
                step: Step::CwaRewrite,
                depth: chain.last().unwrap().depth,
            });
        }
        emitted.push((final_clause.clone(), c.ans.clone()));
        report.outcomes.push(FoldOutcome {
            kind: c.kind,
            raw: c.raw.clone(),
            clause: final_clause,
            folded_query,
            used_cwa: c.used_cwa,
            roots: c.roots.clone(),
            chain,
        });
    }
    report
}

fn subsumes_with_ans(ca: &Clause, aa: &[Term], cb: &Clause, ab: &[Term]) -> bool {
    crate::kernel::subsumes(&with_ans(ca, aa), &with_ans(cb, ab))
}

fn variant_with_ans(ca: &Clause, aa: &[Term], cb: &Clause, ab: &[Term]) -> bool {
    crate::kernel::variant_eq(&with_ans(ca, aa), &with_ans(cb, ab))
}

fn with_ans(c: &Clause, ans: &[Term]) -> Clause {
    let mut out = c.clone();
    out.head.push(Atom {
        pred: ans_pred(),
        args: ans.to_vec(),
    });
    out
}

pub fn extract_chain(engine: &Engine, node: usize) -> Vec<DerivationNode> {
    let mut ids = vec![node];
    while let Some(p) = engine.nodes[*ids.last().unwrap()].parent {
        ids.push(p);
    }
    ids.reverse();
    ids.into_iter()
        .map(|id| DerivationNode {
            clause: engine.nodes[id].clause.clone(),
            step: engine.nodes[id].step.clone(),
            depth: engine.nodes[id].res_depth,
        })
        .collect()
}
