//! Inverting a recursive resource of the base-plus-recursive shape:
//!
//! ```text
//! r(X...) :- e(X...).
//! r(X...) :- t(Y...)        where X... is a subset of Y...
//! ```
//!
//! A resource tuple with no witness for the second definition can only have
//! come from the first, so the base relation is recovered by
//! `e(X...) :- r(X...), not exists Z... t(Y...)` with `Z... = Y... - X...`.
//! The negated existential is a dedicated construct: it is only meaningful
//! under bottom-up evaluation with a closed world, never as a resolution
//! input.

use crate::kernel::{Atom, Clause, Literal, Term};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecursiveError {
    #[error("resource `{0}` does not match the base-plus-recursive shape")]
    PatternMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseRecoveryRule {
    pub resource: String,
    pub base: Atom,
    pub head_vars: Vec<String>,
    /// Variables of the recursive body that are not in the head; the
    /// residual conjunction is negated under an existential over these.
    pub exist_vars: Vec<String>,
    pub residual: Vec<Literal>,
}

impl fmt::Display for BaseRecoveryRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self
            .residual
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let quant = if self.exist_vars.is_empty() {
            String::new()
        } else {
            format!("exists {} ", self.exist_vars.join(","))
        };
        write!(
            f,
            "{} :- {}({}), not {}({}).",
            self.base,
            self.resource,
            self.head_vars.join(","),
            quant,
            body
        )
    }
}

/// Matches the definitions of one resource against the base-plus-recursive
/// shape and produces its base-recovery rule. `defs` are the forward rules
/// for a single resource predicate, in source order.
pub fn base_recovery(defs: &[Clause]) -> Result<BaseRecoveryRule, RecursiveError> {
    let name = defs
        .first()
        .map(|c| c.head[0].pred.name())
        .unwrap_or_default();
    if defs.len() != 2 {
        return Err(RecursiveError::PatternMismatch(name));
    }
    // The base definition is the one whose body is a single atom over
    // exactly the head tuple.
    let is_base = |c: &Clause| -> bool {
        c.body.len() == 1
            && c.body[0].positive
            && !c.body[0].atom.is_builtin()
            && c.body[0].atom.args == c.head[0].args
            && c.head[0].args.iter().all(|t| t.is_var())
    };
    let (base_def, rec_def) = if is_base(&defs[0]) {
        (&defs[0], &defs[1])
    } else if is_base(&defs[1]) {
        (&defs[1], &defs[0])
    } else {
        return Err(RecursiveError::PatternMismatch(name));
    };
    let head_vars: Vec<String> = base_def.head[0]
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => v.clone(),
            _ => unreachable!(),
        })
        .collect();
    // Align the recursive head with the base head variables.
    let mut align = crate::kernel::Subst::new();
    if rec_def.head[0].args.len() != head_vars.len() {
        return Err(RecursiveError::PatternMismatch(name));
    }
    for (t, v) in rec_def.head[0].args.iter().zip(&head_vars) {
        match t {
            Term::Var(x) => {
                if !align.bind(x, &Term::var(v)) {
                    return Err(RecursiveError::PatternMismatch(name));
                }
            }
            _ => return Err(RecursiveError::PatternMismatch(name)),
        }
    }
    let residual: Vec<Literal> = rec_def.body.iter().map(|l| align.apply_literal(l)).collect();
    if residual.iter().any(|l| !l.positive) {
        return Err(RecursiveError::PatternMismatch(name));
    }
    // The head tuple must be a subset of the recursive body's variables.
    let mut body_vars = std::collections::BTreeSet::new();
    for l in &residual {
        l.atom.collect_vars(&mut body_vars);
    }
    if !head_vars.iter().all(|v| body_vars.contains(v)) {
        return Err(RecursiveError::PatternMismatch(name));
    }
    let exist_vars: Vec<String> = body_vars
        .into_iter()
        .filter(|v| !head_vars.contains(v))
        .collect();
    Ok(BaseRecoveryRule {
        resource: name,
        base: base_def.body[0].atom.clone(),
        head_vars,
        exist_vars,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn test_all_paths_resource() {
        let p = parse_program(
            "#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Y).\nr(X,Y) :- edge(X,Z), r(Z,Y).\n",
        )
        .program
        .unwrap();
        let rule = base_recovery(&p.res).unwrap();
        assert_eq!(rule.base.to_string(), "edge(X,Y)");
        assert_eq!(rule.exist_vars, vec!["Z".to_string()]);
        assert_eq!(
            rule.to_string(),
            "edge(X,Y) :- r(X,Y), not exists Z (edge(X,Z), r(Z,Y))."
        );
    }

    #[test]
    fn test_base_only_resource_mismatch() {
        let p = parse_program("#edb\nedge/2.\n#res\nr(X,Y) :- edge(X,Y).\n")
            .program
            .unwrap();
        assert_eq!(
            base_recovery(&p.res),
            Err(RecursiveError::PatternMismatch("r".into()))
        );
    }

    #[test]
    fn test_bounded_variant() {
        // Even a non-recursive second definition fits the schema: a tuple
        // with no two-step witness must come from the base definition.
        let p = parse_program(
            "#edb\ne/2.\n#res\nr(X,Y) :- e(X,Y).\nr(X,Y) :- e(X,Z), e(Z,Y).\n",
        )
        .program
        .unwrap();
        let rule = base_recovery(&p.res).unwrap();
        assert_eq!(rule.base.to_string(), "e(X,Y)");
        assert_eq!(rule.exist_vars, vec!["Z".to_string()]);
        assert_eq!(rule.residual.len(), 2);
    }
}
