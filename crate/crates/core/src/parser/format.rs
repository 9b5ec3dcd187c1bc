//! Canonical text rendering for clauses and programs. Parsing the output of
//! `format_clause` yields a variant-equal clause for anything Skolem-free;
//! Skolem terms render with a reserved `$sk` prefix the parser rejects, so
//! generated clauses are recognizable as such.

use crate::kernel::{Atom, Clause, Literal};
use crate::program::{Program, Role};

pub fn format_atom(a: &Atom) -> String {
    a.to_string()
}

pub fn format_literal(l: &Literal) -> String {
    l.to_string()
}

pub fn format_clause(c: &Clause) -> String {
    let head = c
        .head
        .iter()
        .map(format_atom)
        .collect::<Vec<_>>()
        .join(" ; ");
    let body = c
        .body
        .iter()
        .map(format_literal)
        .collect::<Vec<_>>()
        .join(", ");
    match (c.head.is_empty(), c.body.is_empty()) {
        (false, true) => format!("{}.", head),
        (false, false) => format!("{} :- {}.", head, body),
        (true, false) => format!(":- {}.", body),
        (true, true) => ":- .".to_string(),
    }
}

/// Renders a full program back into section form.
pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    let edb: Vec<_> = p.decls.iter().filter(|d| d.role == Role::Edb).collect();
    if !edb.is_empty() {
        out.push_str("#edb\n");
        for d in &edb {
            out.push_str(&format!("{}/{}.\n", d.name, d.arity));
        }
    }
    let sections: [(&str, &Vec<Clause>); 3] =
        [("#idb", &p.idb), ("#ic", &p.ics), ("#res", &p.res)];
    for (marker, clauses) in sections {
        if !clauses.is_empty() {
            out.push_str(marker);
            out.push('\n');
            for c in clauses {
                out.push_str(&format_clause(c));
                out.push('\n');
            }
        }
    }
    if let Some(q) = &p.query {
        out.push_str("#query\n");
        for r in &q.rules {
            out.push_str(&format_clause(r));
            out.push('\n');
        }
    }
    if !p.facts.is_empty() {
        out.push_str("#facts\n");
        for c in &p.facts {
            out.push_str(&format_clause(c));
            out.push('\n');
        }
    }
    let cwa: Vec<_> = p.decls.iter().filter(|d| d.cwa_complete).collect();
    if !cwa.is_empty() {
        out.push_str("#cwa\n");
        for d in cwa {
            out.push_str(&format!("{}/{}.\n", d.name, d.arity));
        }
    }
    let keys: Vec<_> = p
        .decls
        .iter()
        .filter(|d| d.key_prefix_len.is_some())
        .collect();
    if !keys.is_empty() {
        out.push_str("#key\n");
        for d in keys {
            out.push_str(&format!(
                "{}/{} key {}.\n",
                d.name,
                d.arity,
                d.key_prefix_len.unwrap()
            ));
        }
    }
    out
}
