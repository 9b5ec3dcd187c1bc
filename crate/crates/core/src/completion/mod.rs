//! Inverting resource definitions. The only-if half of each definition's
//! completion yields inverse rules: one per body literal for a single
//! definition, with existential variables Skolemized on the resource head
//! tuple; for a resource with several definitions, the conjunctive-normal
//! form of the disjunction of Skolemized bodies, one disjunctive-head rule
//! per factor.

pub mod negation;
pub mod recursive;

pub use negation::{compile_negation, CompiledProgram, NegationError};
pub use recursive::{base_recovery, BaseRecoveryRule, RecursiveError};

use crate::kernel::{Atom, Clause, Literal, Origin, SkolemFn, Subst, Term};
use crate::program::Decls;
use std::collections::BTreeMap;
use thiserror::Error;

/// Hard cap on conjunctive-normal-form factors for one resource; the
/// expansion is exponential in the number of definitions.
pub const MAX_CNF_FACTORS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompletionError {
    #[error("resource `{0}` has definitions whose heads cannot be aligned")]
    NonRectifiable(String),
    #[error("resource rule for `{0}` has a negated body literal; compile negation first")]
    Negation(String),
    #[error("inverting `{0}` needs {1} clauses, more than the limit of {MAX_CNF_FACTORS}; split the resource into smaller views")]
    CnfOverflow(String, usize),
}

/// One resource's inverted form: the canonical head variable tuple and the
/// Skolemized body of each definition. The evaluator generates facts from
/// these; the folding search uses the clausal `rules`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionTemplate {
    pub resource: String,
    pub head_vars: Vec<String>,
    pub defs: Vec<Vec<Literal>>,
}

impl InversionTemplate {
    pub fn is_disjunctive(&self) -> bool {
        self.defs.len() > 1
    }
}

#[derive(Clone, Debug, Default)]
pub struct InverseRuleSet {
    /// Inverse rules in clausal form, labeled `<res>_inv<k>`.
    pub rules: Vec<(String, Clause)>,
    /// Key-combined inverse rules, labeled `<pred>_key_inv<k>`.
    pub combined: Vec<(String, Clause)>,
    /// The original forward definitions, for the completeness test and for
    /// materializing resources.
    pub forward: Vec<Clause>,
    pub templates: BTreeMap<String, InversionTemplate>,
    pub skolems: Vec<SkolemFn>,
}

impl InverseRuleSet {
    pub fn all_rules(&self) -> impl Iterator<Item = &(String, Clause)> {
        self.combined.iter().chain(self.rules.iter())
    }

    pub fn has_disjunctive_heads(&self) -> bool {
        self.rules.iter().any(|(_, c)| c.head.len() > 1)
    }
}

/// Builds the inverse rules for every resource definition. Definitions must
/// be safe, function-free, and conjunctive; several definitions of one
/// resource must be rectifiable to a common head variable tuple.
pub fn clark_completion(
    res_rules: &[Clause],
    decls: &Decls,
) -> Result<InverseRuleSet, CompletionError> {
    let mut grouped: BTreeMap<String, Vec<Clause>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for r in res_rules {
        let name = r.head[0].pred.name();
        if !grouped.contains_key(&name) {
            order.push(name.clone());
        }
        grouped.entry(name).or_default().push(r.clone());
    }
    let mut out = InverseRuleSet {
        forward: res_rules.to_vec(),
        ..Default::default()
    };
    for name in order {
        let defs = &grouped[&name];
        let template = build_template(&name, defs)?;
        let rules = invert_template(&template)?;
        for (i, rule) in rules.into_iter().enumerate() {
            out.rules.push((format!("{}_inv{}", name, i + 1), rule));
        }
        for def in &template.defs {
            for lit in def {
                for arg in &lit.atom.args {
                    if let Term::Sk(f, _) = arg {
                        if !out.skolems.contains(f) {
                            out.skolems.push(f.clone());
                        }
                    }
                }
            }
        }
        out.templates.insert(name, template);
    }
    add_key_combinations(&mut out, decls);
    Ok(out)
}

/// Rectifies the definitions of one resource to a shared head tuple and
/// Skolemizes each definition's existential variables as functions of that
/// tuple.
fn build_template(name: &str, defs: &[Clause]) -> Result<InversionTemplate, CompletionError> {
    let first_head = &defs[0].head[0];
    let mut head_vars: Vec<String> = Vec::new();
    for t in &first_head.args {
        match t {
            Term::Var(v) if !head_vars.contains(v) => head_vars.push(v.clone()),
            _ => return Err(CompletionError::NonRectifiable(name.to_string())),
        }
    }
    let mut skolemized: Vec<Vec<Literal>> = Vec::new();
    for (def_index, def) in defs.iter().enumerate() {
        if def.body.iter().any(|l| !l.positive) {
            return Err(CompletionError::Negation(name.to_string()));
        }
        // Align this definition's head variables with the canonical tuple.
        let mut align = Subst::new();
        if def.head[0].args.len() != head_vars.len() {
            return Err(CompletionError::NonRectifiable(name.to_string()));
        }
        for (t, v) in def.head[0].args.iter().zip(&head_vars) {
            match t {
                Term::Var(x) => {
                    if !align.bind(x, &Term::var(v)) {
                        return Err(CompletionError::NonRectifiable(name.to_string()));
                    }
                }
                _ => return Err(CompletionError::NonRectifiable(name.to_string())),
            }
        }
        let body: Vec<Literal> = def.body.iter().map(|l| align.apply_literal(l)).collect();
        // Existential variables become Skolem terms over the head tuple.
        let mut subst = Subst::new();
        let head_terms: Vec<Term> = head_vars.iter().map(|v| Term::var(v)).collect();
        let mut body_vars: Vec<String> = Vec::new();
        for l in &body {
            for v in l.atom.vars() {
                if !head_vars.contains(&v) && !body_vars.contains(&v) {
                    body_vars.push(v.clone());
                }
            }
        }
        for v in body_vars {
            let f = SkolemFn {
                resource: name.to_string(),
                def_index,
                var: v.clone(),
            };
            subst.bind(&v, &Term::Sk(f, head_terms.clone()));
        }
        skolemized.push(body.iter().map(|l| subst.apply_literal(l)).collect());
    }
    Ok(InversionTemplate {
        resource: name.to_string(),
        head_vars,
        defs: skolemized,
    })
}

/// Turns a template into clausal inverse rules: the conjunctive-normal form
/// of the disjunction of the Skolemized definition bodies, each factor as a
/// head, with the resource atom as the body.
fn invert_template(t: &InversionTemplate) -> Result<Vec<Clause>, CompletionError> {
    let count: usize = t.defs.iter().map(Vec::len).product();
    if count > MAX_CNF_FACTORS {
        return Err(CompletionError::CnfOverflow(t.resource.clone(), count));
    }
    let body_atom = Atom::new(
        &t.resource,
        t.head_vars.iter().map(|v| Term::var(v)).collect(),
    );
    let mut factors: Vec<Vec<Atom>> = vec![vec![]];
    for def in &t.defs {
        let mut next = Vec::new();
        for factor in &factors {
            for lit in def {
                let mut f = factor.clone();
                if !f.contains(&lit.atom) {
                    f.push(lit.atom.clone());
                }
                next.push(f);
            }
        }
        factors = next;
    }
    // Absorption: drop any factor that is a superset of another.
    let mut kept: Vec<Vec<Atom>> = Vec::new();
    for f in &factors {
        if factors
            .iter()
            .any(|g| g.len() < f.len() && g.iter().all(|a| f.contains(a)))
        {
            continue;
        }
        if kept.iter().any(|g| atom_set_eq(g, f)) {
            continue;
        }
        kept.push(f.clone());
    }
    Ok(kept
        .into_iter()
        .map(|head| {
            Clause::new(head, vec![Literal::pos(body_atom.clone())], Origin::Inverse)
        })
        .collect())
}

fn atom_set_eq(a: &[Atom], b: &[Atom]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombineError {
    #[error("rules define different predicates")]
    DifferentPredicates,
    #[error("no key is declared for the predicate")]
    NoKey,
    #[error("a key-prefix position is not a variable")]
    NonVariableKey,
}

/// Combines two inverse rules for the same predicate under a key constraint
/// on its first `k` columns: identifying the key prefixes forces the
/// remaining columns to agree, so a Skolem entry in one head may be replaced
/// by the other head's variable. The result is a valid inverse rule whose
/// body joins both resources.
pub fn combine_pair(c1: &Clause, c2: &Clause, k: usize) -> Result<Clause, CombineError> {
    let (h1, h2) = (&c1.head[0], &c2.head[0]);
    if h1.pred != h2.pred || h1.args.len() != h2.args.len() {
        return Err(CombineError::DifferentPredicates);
    }
    let mut ident = Subst::new();
    for i in 0..k {
        match (&h1.args[i], &h2.args[i]) {
            (Term::Var(_), Term::Var(y)) => {
                if !ident.bind(y, &h1.args[i]) {
                    return Err(CombineError::NonVariableKey);
                }
            }
            _ => return Err(CombineError::NonVariableKey),
        }
    }
    let h2_args: Vec<Term> = h2.args.iter().map(|t| ident.apply_term(t)).collect();
    let mut head_args = Vec::with_capacity(h1.args.len());
    for i in 0..h1.args.len() {
        let first = &h1.args[i];
        let second = &h2_args[i];
        let pick = match (first, second) {
            (Term::Sk(_, _), Term::Var(_)) => second.clone(),
            _ => first.clone(),
        };
        head_args.push(pick);
    }
    let mut body = c1.body.clone();
    body.extend(c2.body.iter().map(|l| ident.apply_literal(l)));
    Ok(Clause::new(
        vec![Atom {
            pred: h1.pred.clone(),
            args: head_args,
        }],
        body,
        Origin::Inverse,
    ))
}

/// Adds the combined rule for every ordered pair of inverse rules whose head
/// predicate has a declared key prefix. The single rules are kept as well;
/// combination only shortens derivations.
fn add_key_combinations(set: &mut InverseRuleSet, decls: &Decls) {
    let mut combined = Vec::new();
    let mut counter: BTreeMap<String, usize> = BTreeMap::new();
    let rules = set.rules.clone();
    let mut ctr = crate::kernel::FreshCounter::above(
        rules.iter().flat_map(|(_, c)| c.vars().into_iter()),
    );
    for (i, (_, c1)) in rules.iter().enumerate() {
        for (j, (_, c2)) in rules.iter().enumerate() {
            if i == j || c1.head.len() != 1 || c2.head.len() != 1 {
                continue;
            }
            let pred = c1.head[0].pred.name();
            let k = match decls.get(&pred).and_then(|d| d.key_prefix_len) {
                Some(k) if k > 0 => k,
                _ => continue,
            };
            if c2.head[0].pred.name() != pred {
                continue;
            }
            let c2r = crate::kernel::rename_apart(c2, &mut ctr);
            if let Ok(rule) = combine_pair(c1, &c2r, k) {
                if combined
                    .iter()
                    .any(|(_, existing)| crate::kernel::variant_eq(existing, &rule))
                {
                    continue;
                }
                let n = counter.entry(pred.clone()).or_insert(0);
                *n += 1;
                combined.push((format!("{}_key_inv{}", pred, n), rule));
            }
        }
    }
    set.combined = combined;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{format_clause, parse_program};

    fn inverses(text: &str) -> (InverseRuleSet, crate::program::Program) {
        let p = parse_program(text).program.expect("fixture parses");
        let inv = clark_completion(&p.res, &p.decls).unwrap();
        (inv, p)
    }

    #[test]
    fn test_single_definition_join_view() {
        let (inv, _) = inverses(
            "#edb\np1/3. p2/2.\n#res\nr(X,Y,Z) :- p1(X,Y,Z), p2(X,U).\n",
        );
        assert_eq!(inv.rules.len(), 2);
        assert_eq!(format_clause(&inv.rules[0].1), "p1(X,Y,Z) :- r(X,Y,Z).");
        assert_eq!(
            format_clause(&inv.rules[1].1),
            "p2(X,$sk_r_0_U(X,Y,Z)) :- r(X,Y,Z)."
        );
    }

    #[test]
    fn test_skolem_arguments_are_head_tuple() {
        let (inv, _) = inverses(
            "#edb\nnotes/4. prescription/3. drugs/2.\n#res\nr2(Y1,Y2,Y3,Y4) :- notes(V1,Y1,Y2,V2), prescription(V1,Y3,V3), drugs(Y3,Y4).\n",
        );
        assert_eq!(inv.rules.len(), 3);
        assert_eq!(
            format_clause(&inv.rules[1].1),
            "prescription($sk_r2_0_V1(Y1,Y2,Y3,Y4),Y3,$sk_r2_0_V3(Y1,Y2,Y3,Y4)) :- r2(Y1,Y2,Y3,Y4)."
        );
        for (_, rule) in &inv.rules {
            for h in &rule.head {
                for t in &h.args {
                    if let Term::Sk(_, args) = t {
                        let expect: Vec<Term> = ["Y1", "Y2", "Y3", "Y4"]
                            .iter()
                            .map(|v| Term::var(v))
                            .collect();
                        assert_eq!(args, &expect);
                    }
                }
            }
        }
    }

    #[test]
    fn test_multi_definition_produces_disjunctive_rules() {
        let (inv, _) = inverses(
            "#edb\np1/1. p2/1. p3/1.\n#res\nr(X) :- p1(X), p2(X).\nr(X) :- p3(X).\n",
        );
        assert_eq!(inv.rules.len(), 2);
        assert_eq!(format_clause(&inv.rules[0].1), "p1(X) ; p3(X) :- r(X).");
        assert_eq!(format_clause(&inv.rules[1].1), "p2(X) ; p3(X) :- r(X).");
        assert!(inv.has_disjunctive_heads());
    }

    #[test]
    fn test_combined_rule_under_key() {
        let (inv, _) = inverses(
            "#edb\npatients/4. procedure/4. insurer/3.\n#key\npatients/4 key 1.\n#res\nr1(X1,X2,X3,X4) :- patients(X1,X2,U1,U2), procedure(X1,U3,X3,X4).\nr2(Y1,Y2,Y3) :- patients(Y1,V1,Y2,V2), insurer(V2,Y3,V3).\n",
        );
        assert_eq!(inv.combined.len(), 2);
        let expected = crate::parser::parse_clause(
            "patients(X1,X2,Y2,W) :- r1(X1,X2,X3,X4), r2(X1,Y2,Y3).",
        )
        .unwrap();
        // The Skolem entry in the last column keeps the first rule's term;
        // compare shape by replacing it with a variable.
        let got = &inv.combined[0].1;
        let mut shaped = got.clone();
        assert!(matches!(shaped.head[0].args[3], Term::Sk(_, _)));
        shaped.head[0].args[3] = Term::var("W");
        assert!(crate::kernel::variant_eq(&shaped, &expected));
    }

    #[test]
    fn test_combined_with_itself_refactors_to_original() {
        let (inv, _) = inverses(
            "#edb\np/2. q/2.\n#key\np/2 key 1.\n#res\nr(X,Y) :- p(X,Y), q(X,Y).\n",
        );
        // One single-definition resource: combining its p-rule with itself
        // and factoring gives back the rule.
        let rule = &inv.rules[0].1;
        let mut ctr = crate::kernel::FreshCounter::above(rule.vars().into_iter());
        let renamed = crate::kernel::rename_apart(rule, &mut ctr);
        let combined = combine_pair(rule, &renamed, 1).unwrap();
        let factored = crate::kernel::factor(&combined);
        assert!(crate::kernel::variant_eq(&factored, rule));
    }

    #[test]
    fn test_three_rule_chain_association_orders_agree() {
        let (inv, _) = inverses(
            "#edb\np/2. a/2. b/2. c/2.\n#key\np/2 key 1.\n#res\nr1(X,U) :- p(X,W), a(X,U).\nr2(Y,U) :- p(Y,W), b(Y,U).\nr3(Z,U) :- p(Z,W), c(Z,U).\n",
        );
        let find = |res: &str| {
            inv.rules
                .iter()
                .find(|(_, c)| c.body[0].atom.pred.name() == res && c.head[0].pred.name() == "p")
                .unwrap()
                .1
                .clone()
        };
        let (r1, r2, r3) = (find("r1"), find("r2"), find("r3"));
        let mut ctr = crate::kernel::FreshCounter::above(
            [&r1, &r2, &r3].iter().flat_map(|c| c.vars().into_iter()),
        );
        let left = combine_pair(
            &combine_pair(&r1, &crate::kernel::rename_apart(&r2, &mut ctr), 1).unwrap(),
            &crate::kernel::rename_apart(&r3, &mut ctr),
            1,
        )
        .unwrap();
        let right = combine_pair(
            &r1,
            &combine_pair(
                &crate::kernel::rename_apart(&r2, &mut ctr),
                &crate::kernel::rename_apart(&r3, &mut ctr),
                1,
            )
            .unwrap(),
            1,
        )
        .unwrap();
        assert!(crate::kernel::variant_eq(&left, &right));
    }

    #[test]
    fn test_builtin_in_resource_body_gets_builtin_head() {
        let (inv, _) = inverses(
            "#edb\np1/2. p2/2.\n#res\nr1(X) :- p1(X,Z), p2(X,Z), Z != a.\n",
        );
        assert_eq!(inv.rules.len(), 3);
        assert!(inv.rules[2].1.head[0].is_builtin());
    }
}
