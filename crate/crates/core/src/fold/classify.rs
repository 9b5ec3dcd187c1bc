//! Leaf classification and the closed-world head rewrite.

use super::derivation::is_ans;
use crate::kernel::{Clause, Literal, PredSym};
use crate::program::{Decls, Role};
use serde::Serialize;

/// The four leaf cases. A leaf with an empty head is a complete folding
/// when its body holds resource and built-in literals only, a partial
/// folding when base or derived literals remain, and no folding at all
/// without a resource literal. A non-empty head is a residue that only the
/// closed-world rewrite can turn into a folding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    Complete,
    Partial,
    NoResource,
    NonHornResidue,
}

impl OutcomeKind {
    pub fn rank(self) -> usize {
        match self {
            OutcomeKind::Complete => 0,
            OutcomeKind::Partial => 1,
            OutcomeKind::NoResource => 2,
            OutcomeKind::NonHornResidue => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OutcomeKind::Complete => "complete folding",
            OutcomeKind::Partial => "partial folding",
            OutcomeKind::NoResource => "no resource",
            OutcomeKind::NonHornResidue => "non-horn residue",
        }
    }
}

/// Classifies a leaf clause (answer atom already stripped).
pub fn classify_leaf(c: &Clause, decls: &Decls) -> OutcomeKind {
    if !c.head.is_empty() {
        return OutcomeKind::NonHornResidue;
    }
    let mut has_res = false;
    let mut has_other = false;
    for l in &c.body {
        match &l.atom.pred {
            PredSym::Cmp(_) => {}
            PredSym::Named(_) => match decls.role_of(&l.atom.pred) {
                Some(Role::Res) => has_res = true,
                _ => has_other = true,
            },
        }
    }
    if !has_res {
        OutcomeKind::NoResource
    } else if has_other {
        OutcomeKind::Partial
    } else {
        OutcomeKind::Complete
    }
}

/// Moves the head atoms of a residue to the body under default negation.
/// Sound only when every head predicate is declared complete, so that a
/// closed-world axiom justifies reading absence as falsity. The answer atom
/// stays in place.
pub fn apply_cwa_rewrite(c: &Clause, decls: &Decls) -> Option<Clause> {
    let movable: Vec<_> = c.head.iter().filter(|a| !is_ans(a)).collect();
    if movable.is_empty() {
        return None;
    }
    let all_complete = movable.iter().all(|a| match &a.pred {
        PredSym::Named(n) => decls.get(n).map(|d| d.cwa_complete).unwrap_or(false),
        PredSym::Cmp(_) => false,
    });
    if !all_complete {
        return None;
    }
    let mut out = c.clone();
    let moved: Vec<_> = out.head.iter().filter(|a| !is_ans(a)).cloned().collect();
    out.head.retain(is_ans);
    for a in moved {
        out.body.push(Literal::neg(a));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn decls_for(text: &str) -> Decls {
        parse_program(text).program.unwrap().decls
    }

    #[test]
    fn test_classify_cases() {
        let decls = decls_for(
            "#edb\np3/2. e03/2. p4/2.\n#res\nr(X,Y,Z) :- p3(X,Y), p4(Y,Z).\n",
        );
        let complete = crate::parser::parse_clause(":- r(X,Y,Z), Z > 1.").unwrap();
        assert_eq!(classify_leaf(&complete, &decls), OutcomeKind::Complete);
        let partial = crate::parser::parse_clause(":- r(X,Y,Z), e03(X,Y).").unwrap();
        assert_eq!(classify_leaf(&partial, &decls), OutcomeKind::Partial);
        let nores = crate::parser::parse_clause(":- p3(X,Z), p4(X,Z).").unwrap();
        assert_eq!(classify_leaf(&nores, &decls), OutcomeKind::NoResource);
        let residue = crate::parser::parse_clause("p3(X,Y) :- r(X,Y,Z).").unwrap();
        assert_eq!(classify_leaf(&residue, &decls), OutcomeKind::NonHornResidue);
    }

    #[test]
    fn test_cwa_rewrite_applies_when_declared() {
        let decls = decls_for("#edb\np3/1.\n#res\nr(X) :- p3(X).\n#cwa\np3/1.\n");
        let residue = crate::parser::parse_clause("p3(X) :- r(X).").unwrap();
        let rewritten = apply_cwa_rewrite(&residue, &decls).unwrap();
        assert_eq!(
            crate::parser::format_clause(&rewritten),
            ":- r(X), not p3(X)."
        );
        assert_eq!(classify_leaf(&rewritten, &decls), OutcomeKind::Partial);
    }

    #[test]
    fn test_cwa_rewrite_requires_declaration() {
        let decls = decls_for("#edb\np3/1.\n#res\nr(X) :- p3(X).\n");
        let residue = crate::parser::parse_clause("p3(X) :- r(X).").unwrap();
        assert!(apply_cwa_rewrite(&residue, &decls).is_none());
    }
}
