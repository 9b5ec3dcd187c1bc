//! Certain answers under disjunctive inverse rules. Each resource fact of a
//! multi-definition resource could have been produced by any non-empty
//! subset of the definitions; every global choice is one subcomputation, and
//! a tuple is a certain answer when it is an answer in all of them.

use super::invert::instantiate_def;
use super::{filter_answers, seminaive, AnswerSet, FactStore, Tuple};
use crate::completion::InverseRuleSet;
use crate::kernel::Clause;
use crate::program::QueryDef;
use thiserror::Error;

pub const DEFAULT_SUBCOMPUTATION_CAP: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertainError {
    #[error("{0} subcomputations exceed the cap of {1}")]
    SubcomputationBlowup(usize, usize),
    #[error(transparent)]
    Eval(#[from] super::EvalError),
}

/// Enumerates all subcomputations, evaluates the query in each, and returns
/// the intersection of the answer sets. Plain base facts in `extra_facts`
/// participate in every subcomputation.
pub fn certain_answers(
    inv: &InverseRuleSet,
    res_facts: &FactStore,
    extra_facts: &FactStore,
    rules: &[Clause],
    query: &QueryDef,
    cap: usize,
) -> Result<AnswerSet, CertainError> {
    // One choice point per (disjunctive resource, fact): a non-empty subset
    // of its definitions.
    struct Choice<'a> {
        resource: &'a str,
        fact: &'a Tuple,
        subsets: Vec<Vec<usize>>,
    }
    let mut choices: Vec<Choice> = Vec::new();
    let mut fixed = extra_facts.clone();
    let mut total: usize = 1;
    for pred in res_facts.preds() {
        let template = match inv.templates.get(pred) {
            Some(t) => t,
            None => continue,
        };
        for fact in res_facts.get(pred) {
            if !template.is_disjunctive() {
                for (p, tuple) in instantiate_def(template, 0, fact) {
                    fixed.insert(&p, tuple);
                }
                continue;
            }
            let n = template.defs.len();
            let subsets: Vec<Vec<usize>> = (1..(1usize << n))
                .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
                .collect();
            total = total.saturating_mul(subsets.len());
            if total > cap {
                return Err(CertainError::SubcomputationBlowup(total, cap));
            }
            choices.push(Choice {
                resource: pred,
                fact,
                subsets,
            });
        }
    }

    let mut answers: Option<AnswerSet> = None;
    let mut selector = vec![0usize; choices.len()];
    loop {
        let mut store = fixed.clone();
        for (c, &pick) in choices.iter().zip(&selector) {
            let template = &inv.templates[c.resource];
            for &def in &c.subsets[pick] {
                for (p, tuple) in instantiate_def(template, def, c.fact) {
                    store.insert(&p, tuple);
                }
            }
        }
        let mut rule_set = rules.to_vec();
        rule_set.extend(query.rules.iter().cloned());
        let derived = seminaive(&rule_set, &store)?;
        let found = filter_answers(&derived, query);
        answers = Some(match answers {
            None => found,
            Some(prev) => prev.intersection(&found).cloned().collect(),
        });
        // Advance the odometer over subset picks.
        let mut i = 0;
        loop {
            if i == selector.len() {
                return Ok(answers.unwrap_or_default());
            }
            selector[i] += 1;
            if selector[i] < choices[i].subsets.len() {
                break;
            }
            selector[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::clark_completion;
    use crate::eval::format_answers;
    use crate::parser::parse_program;

    fn fixture(query: &str) -> (InverseRuleSet, FactStore, QueryDef) {
        let text = format!(
            "#edb\np1/1. p2/1. p3/1.\n#res\nr(X) :- p1(X), p2(X).\nr(X) :- p3(X).\n#facts\nr(a).\n#query\n{}\n",
            query
        );
        let p = parse_program(&text).program.unwrap();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let facts = FactStore::from_facts(&p.facts);
        (inv, facts, p.query.unwrap())
    }

    #[test]
    fn test_certain_answer_across_three_subcomputations() {
        let (inv, facts, query) = fixture("q(X) :- p1(X).\nq(X) :- p3(X).");
        let answers = certain_answers(
            &inv,
            &facts,
            &FactStore::new(),
            &[],
            &query,
            DEFAULT_SUBCOMPUTATION_CAP,
        )
        .unwrap();
        assert_eq!(format_answers(&answers), "(a)");
    }

    #[test]
    fn test_no_certain_answer_when_one_branch_fails() {
        let (inv, facts, query) = fixture("q(X) :- p2(X).");
        let answers = certain_answers(
            &inv,
            &facts,
            &FactStore::new(),
            &[],
            &query,
            DEFAULT_SUBCOMPUTATION_CAP,
        )
        .unwrap();
        assert!(answers.is_empty());
    }

    #[test]
    fn test_degenerate_case_equals_plain_inversion() {
        let p = parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Z), edge(Z,Y).\n#facts\nr(a,b). r(b,c).\n#query\nq(X,Y) :- edge(X,Y).\nq(X,Y) :- edge(X,Z), q(Z,Y).\n",
        )
        .program
        .unwrap();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let facts = FactStore::from_facts(&p.facts);
        let query = p.query.unwrap();
        let certain = certain_answers(
            &inv,
            &facts,
            &FactStore::new(),
            &[],
            &query,
            DEFAULT_SUBCOMPUTATION_CAP,
        )
        .unwrap();
        let inverted = crate::eval::invert_facts(&facts, &inv).unwrap();
        let store = seminaive(&query.rules, &inverted).unwrap();
        let direct = filter_answers(&store, &query);
        assert_eq!(certain, direct);
        assert_eq!(format_answers(&certain), "(a,b) (a,c) (b,c)");
    }

    #[test]
    fn test_blowup_cap() {
        let text = "#edb\np1/1. p2/1.\n#res\nr(X) :- p1(X).\nr(X) :- p2(X).\n#facts\nr(a). r(b). r(c).\n#query\nq(X) :- p1(X).\n";
        let p = parse_program(text).program.unwrap();
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        let facts = FactStore::from_facts(&p.facts);
        let query = p.query.unwrap();
        let err = certain_answers(&inv, &facts, &FactStore::new(), &[], &query, 8).unwrap_err();
        assert_eq!(err, CertainError::SubcomputationBlowup(9, 8));
    }
}
