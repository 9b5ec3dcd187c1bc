//! Parser for the sectioned program format and its validation layer.
//!
//! A program is a sequence of sections: `#edb` holds arity declarations like
//! `p1/3.`, `#idb`, `#ic`, `#res`, `#facts` hold clauses, `#query` holds the
//! query rules, `#cwa` lists predicates known to be complete, and `#key`
//! holds entries like `patients/4 key 1.` declaring a key prefix.

mod lexer;
pub mod format;

pub use format::{format_atom, format_clause, format_literal, format_program};

use crate::kernel::{Atom, Clause, CmpOp, Literal, Origin, PredSym, Term};
use crate::program::{analysis, PredicateDecl, Program, QueryDef, Role};
use lexer::{lex, Pos, Tok};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)
    }
}

#[derive(Debug)]
pub struct ParseOutcome {
    /// Present only when no error-severity diagnostics were produced.
    pub program: Option<Program>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn into_result(self) -> Result<(Program, Vec<Diagnostic>), Vec<Diagnostic>> {
        match self.program {
            Some(p) => Ok((p, self.diagnostics)),
            None => Err(self.diagnostics),
        }
    }
}

pub fn parse_program(text: &str) -> ParseOutcome {
    let toks = match lex(text) {
        Ok(t) => t,
        Err(e) => {
            return ParseOutcome {
                program: None,
                diagnostics: vec![Diagnostic {
                    severity: Severity::Error,
                    line: e.pos.line,
                    column: e.pos.column,
                    message: e.message,
                }],
            }
        }
    };
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
        anon: 0,
    };
    let program = p.program();
    let has_error = p.diags.iter().any(|d| d.severity == Severity::Error);
    ParseOutcome {
        program: if has_error { None } else { Some(program) },
        diagnostics: p.diags,
    }
}

/// Parses a single clause in isolation; used by tests and by tools that
/// compare expected clauses written as text.
pub fn parse_clause(text: &str) -> Result<Clause, String> {
    let toks = lex(text).map_err(|e| e.message)?;
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
        anon: 0,
    };
    let c = p.clause(Origin::Derived);
    match c {
        Some(c) if p.diags.iter().all(|d| d.severity != Severity::Error) => Ok(c),
        _ => Err(p
            .diags
            .first()
            .map(|d| d.message.clone())
            .unwrap_or_else(|| "parse error".into())),
    }
}

struct RawSection {
    name: String,
    pos: Pos,
    clauses: Vec<(Clause, Pos)>,
    decls: Vec<(String, usize, Option<usize>, Pos)>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    pos: usize,
    diags: Vec<Diagnostic>,
    anon: u64,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> Pos {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, p)| *p)
            .unwrap_or(Pos { line: 1, column: 1 })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, pos: Pos, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            severity: Severity::Error,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        });
    }

    fn warn(&mut self, pos: Pos, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            severity: Severity::Warning,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        });
    }

    fn skip_to_dot(&mut self) {
        while let Some(t) = self.next() {
            if t == Tok::Dot {
                break;
            }
        }
    }

    fn expect_dot(&mut self) {
        match self.peek() {
            Some(Tok::Dot) => {
                self.next();
            }
            _ => {
                let pos = self.here();
                self.error(pos, "expected `.` to end the clause");
                self.skip_to_dot();
            }
        }
    }

    fn program(&mut self) -> Program {
        let mut sections: Vec<RawSection> = Vec::new();
        if self.peek().is_none() {
            self.warn(Pos { line: 1, column: 1 }, "empty program");
        }
        while let Some(tok) = self.peek().cloned() {
            let pos = self.here();
            match tok {
                Tok::Section(name) => {
                    self.next();
                    let known = [
                        "edb", "idb", "ic", "res", "query", "facts", "cwa", "key",
                    ];
                    if !known.contains(&name.as_str()) {
                        self.error(pos, format!("unknown section `#{}`", name));
                    }
                    sections.push(RawSection {
                        name,
                        pos,
                        clauses: Vec::new(),
                        decls: Vec::new(),
                    });
                }
                _ => {
                    let section = match sections.last_mut() {
                        Some(s) => s,
                        None => {
                            self.error(pos, "expected a section marker such as `#edb`");
                            self.skip_to_dot();
                            continue;
                        }
                    };
                    match section.name.as_str() {
                        "edb" | "cwa" => {
                            if let Some(d) = self.decl_entry(false) {
                                section.decls.push(d);
                            }
                        }
                        "key" => {
                            if let Some(d) = self.decl_entry(true) {
                                section.decls.push(d);
                            }
                        }
                        _ => {
                            let origin = match section.name.as_str() {
                                "idb" => Origin::Idb,
                                "ic" => Origin::Ic,
                                "res" => Origin::Resource,
                                "query" => Origin::Query,
                                "facts" => Origin::Fact,
                                _ => Origin::Derived,
                            };
                            if let Some(c) = self.clause(origin) {
                                section.clauses.push((c, pos));
                            }
                        }
                    }
                }
            }
        }
        self.assemble(sections)
    }

    /// `p/3.` or, with `with_key`, `p/4 key 1.`
    fn decl_entry(&mut self, with_key: bool) -> Option<(String, usize, Option<usize>, Pos)> {
        let pos = self.here();
        let name = match self.next() {
            Some(Tok::Ident(s)) => s,
            other => {
                self.error(
                    pos,
                    format!(
                        "expected a predicate name, found {}",
                        other.map(|t| t.to_string()).unwrap_or_else(|| "end of input".into())
                    ),
                );
                self.skip_to_dot();
                return None;
            }
        };
        if self.next() != Some(Tok::Slash) {
            self.error(pos, "expected `/` and an arity");
            self.skip_to_dot();
            return None;
        }
        let arity = match self.next() {
            Some(Tok::Number(n)) => match n.parse::<usize>() {
                Ok(a) => a,
                Err(_) => {
                    self.error(pos, "arity must be a non-negative integer");
                    self.skip_to_dot();
                    return None;
                }
            },
            _ => {
                self.error(pos, "expected an arity after `/`");
                self.skip_to_dot();
                return None;
            }
        };
        let key = if with_key {
            if self.next() != Some(Tok::Key) {
                self.error(pos, "expected `key <n>` in a key declaration");
                self.skip_to_dot();
                return None;
            }
            match self.next() {
                Some(Tok::Number(n)) => match n.parse::<usize>() {
                    Ok(k) => Some(k),
                    Err(_) => {
                        self.error(pos, "key length must be a non-negative integer");
                        self.skip_to_dot();
                        return None;
                    }
                },
                _ => {
                    self.error(pos, "expected a key length");
                    self.skip_to_dot();
                    return None;
                }
            }
        } else {
            None
        };
        self.expect_dot();
        Some((name, arity, key, pos))
    }

    fn clause(&mut self, origin: Origin) -> Option<Clause> {
        let start = self.here();
        let before = self.diags.len();
        let head = if self.peek() == Some(&Tok::Implies) {
            Vec::new()
        } else {
            let mut atoms = vec![self.atom()?];
            while self.peek() == Some(&Tok::Semi) {
                self.next();
                atoms.push(self.atom()?);
            }
            atoms
        };
        let body = match self.peek() {
            Some(Tok::Implies) => {
                self.next();
                let mut lits = vec![self.literal()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    lits.push(self.literal()?);
                }
                lits
            }
            _ => Vec::new(),
        };
        self.expect_dot();
        if self.diags.len() > before {
            return None;
        }
        let _ = start;
        Some(Clause::new(head, body, origin))
    }

    fn literal(&mut self) -> Option<Literal> {
        if self.peek() == Some(&Tok::Not) {
            let pos = self.here();
            self.next();
            let atom = self.atom()?;
            if atom.is_builtin() {
                self.error(
                    pos,
                    "comparisons cannot be negated with `not`; flip the operator instead",
                );
                return None;
            }
            return Some(Literal::neg(atom));
        }
        Some(Literal::pos(self.atom()?))
    }

    /// An ordinary atom `p(t,...)`, a propositional atom `p`, or an infix
    /// comparison `t1 op t2`.
    fn atom(&mut self) -> Option<Atom> {
        let pos = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.next();
                if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    let mut args = vec![self.term()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.next();
                        args.push(self.term()?);
                    }
                    if self.next() != Some(Tok::RParen) {
                        self.error(pos, "expected `)` to close the argument list");
                        return None;
                    }
                    Some(Atom::new(&name, args))
                } else if let Some(Tok::Cmp(op)) = self.peek().cloned() {
                    // A lowercase constant on the left of a comparison.
                    self.next();
                    let rhs = self.term()?;
                    Some(Atom::cmp(cmp_op(op), Term::sym(&name), rhs))
                } else {
                    Some(Atom::new(&name, vec![]))
                }
            }
            Some(Tok::Variable(_)) | Some(Tok::Number(_)) | Some(Tok::Quoted(_)) => {
                let lhs = self.term()?;
                match self.peek().cloned() {
                    Some(Tok::Cmp(op)) => {
                        self.next();
                        let rhs = self.term()?;
                        Some(Atom::cmp(cmp_op(op), lhs, rhs))
                    }
                    _ => {
                        let pos = self.here();
                        self.error(pos, "expected a comparison operator");
                        None
                    }
                }
            }
            other => {
                self.error(
                    pos,
                    format!(
                        "expected an atom, found {}",
                        other.map(|t| t.to_string()).unwrap_or_else(|| "end of input".into())
                    ),
                );
                None
            }
        }
    }

    fn term(&mut self) -> Option<Term> {
        let pos = self.here();
        match self.next() {
            Some(Tok::Variable(v)) => {
                if v == "_" {
                    self.anon += 1;
                    Some(Term::var(&format!("_G{}", self.anon)))
                } else {
                    Some(Term::var(&v))
                }
            }
            Some(Tok::Ident(s)) => Some(Term::sym(&s)),
            Some(Tok::Quoted(s)) => Some(Term::sym(&s)),
            Some(Tok::Number(n)) => match parse_number(&n) {
                Some(r) => Some(Term::Cst(crate::kernel::Const::Num(r))),
                None => {
                    self.error(pos, format!("cannot represent number `{}` exactly", n));
                    None
                }
            },
            other => {
                self.error(
                    pos,
                    format!(
                        "expected a term, found {}",
                        other.map(|t| t.to_string()).unwrap_or_else(|| "end of input".into())
                    ),
                );
                None
            }
        }
    }

    fn assemble(&mut self, sections: Vec<RawSection>) -> Program {
        let mut program = Program::default();
        let mut arities: BTreeMap<String, (usize, Pos)> = BTreeMap::new();
        let mut query_sections = 0usize;

        // Declarations first so roles are known before clauses are checked.
        for s in &sections {
            if s.name == "edb" {
                for (name, arity, _, pos) in &s.decls {
                    if program.decls.get(name).is_some() {
                        self.error(*pos, format!("`{}` is declared twice", name));
                        continue;
                    }
                    program.decls.insert(PredicateDecl {
                        name: name.clone(),
                        arity: *arity,
                        role: Role::Edb,
                        cwa_complete: false,
                        key_prefix_len: None,
                    });
                    arities.insert(name.clone(), (*arity, *pos));
                }
            }
        }
        for s in &sections {
            match s.name.as_str() {
                "idb" | "res" => {
                    let role = if s.name == "idb" { Role::Idb } else { Role::Res };
                    for (c, pos) in &s.clauses {
                        let head = match c.head.as_slice() {
                            [h] if !h.is_builtin() => h,
                            _ => continue,
                        };
                        let name = head.pred.name();
                        match program.decls.get(&name) {
                            None => {
                                program.decls.insert(PredicateDecl {
                                    name: name.clone(),
                                    arity: head.args.len(),
                                    role,
                                    cwa_complete: false,
                                    key_prefix_len: None,
                                });
                                arities.insert(name.clone(), (head.args.len(), *pos));
                            }
                            Some(d) if d.role != role => {
                                self.error(
                                    *pos,
                                    format!(
                                        "`{}` is a {} predicate and cannot head a {} rule",
                                        name,
                                        d.role,
                                        if role == Role::Idb { "derived" } else { "resource" }
                                    ),
                                );
                            }
                            Some(_) => {}
                        }
                    }
                }
                _ => {}
            }
        }

        // Second pass: place clauses, checking arity and role constraints.
        let mut query_rules: Vec<(Clause, Pos)> = Vec::new();
        for s in sections {
            match s.name.as_str() {
                "edb" => {}
                "cwa" => {
                    for (name, arity, _, pos) in &s.decls {
                        match program.decls.get_mut(name) {
                            Some(d) if d.arity == *arity => d.cwa_complete = true,
                            Some(d) => {
                                let found = d.arity;
                                self.error(
                                    *pos,
                                    format!(
                                        "`{}` has arity {}, not {}",
                                        name, found, arity
                                    ),
                                );
                            }
                            None => {
                                self.error(*pos, format!("unknown predicate `{}`", name));
                            }
                        }
                    }
                }
                "key" => {
                    for (name, arity, key, pos) in &s.decls {
                        let key = key.unwrap_or(0);
                        match program.decls.get_mut(name) {
                            Some(d) if d.arity == *arity => {
                                if key > d.arity {
                                    self.error(
                                        *pos,
                                        format!(
                                            "key length {} exceeds the arity of `{}`",
                                            key, name
                                        ),
                                    );
                                } else {
                                    d.key_prefix_len = Some(key);
                                }
                            }
                            Some(d) => {
                                let found = d.arity;
                                self.error(
                                    *pos,
                                    format!("`{}` has arity {}, not {}", name, found, arity),
                                );
                            }
                            None => {
                                self.error(*pos, format!("unknown predicate `{}`", name));
                            }
                        }
                    }
                }
                "idb" | "ic" | "res" | "facts" => {
                    for (c, pos) in s.clauses {
                        self.check_clause(&c, &s.name, pos, &mut program, &mut arities);
                    }
                }
                "query" => {
                    query_sections += 1;
                    if query_sections > 1 {
                        self.error(s.pos, "at most one #query section is allowed");
                    }
                    for (c, pos) in s.clauses {
                        self.check_arities(&c, pos, &mut arities);
                        query_rules.push((c, pos));
                    }
                }
                _ => {}
            }
        }

        if !query_rules.is_empty() {
            if let Some(q) = self.build_query(query_rules, &mut program) {
                program.query = Some(q);
            }
        }

        // Safety of every rule.
        let rule_sets: Vec<(&str, Vec<Clause>)> = vec![
            ("derived rule", program.idb.clone()),
            ("integrity constraint", program.ics.clone()),
            ("resource rule", program.res.clone()),
            (
                "query rule",
                program
                    .query
                    .as_ref()
                    .map(|q| q.rules.clone())
                    .unwrap_or_default(),
            ),
        ];
        for (what, rules) in rule_sets {
            for r in rules {
                if let analysis::Safety::Unsafe(vars) = analysis::check_safety(&r) {
                    self.error(
                        Pos { line: 1, column: 1 },
                        format!(
                            "unsafe {} `{}`: unlimited variables {}",
                            what,
                            format::format_clause(&r),
                            vars.join(", ")
                        ),
                    );
                }
            }
        }
        program
    }

    fn check_arities(
        &mut self,
        c: &Clause,
        pos: Pos,
        arities: &mut BTreeMap<String, (usize, Pos)>,
    ) {
        let atoms = c.head.iter().chain(c.body.iter().map(|l| &l.atom));
        for a in atoms {
            if let PredSym::Named(name) = &a.pred {
                match arities.get(name) {
                    Some((arity, _)) if *arity != a.args.len() => {
                        let expected = *arity;
                        self.error(
                            pos,
                            format!(
                                "`{}` is used with {} arguments but has arity {}",
                                name,
                                a.args.len(),
                                expected
                            ),
                        );
                    }
                    Some(_) => {}
                    None => {
                        arities.insert(name.clone(), (a.args.len(), pos));
                    }
                }
            }
        }
    }

    fn check_clause(
        &mut self,
        c: &Clause,
        section: &str,
        pos: Pos,
        program: &mut Program,
        arities: &mut BTreeMap<String, (usize, Pos)>,
    ) {
        self.check_arities(c, pos, arities);
        // Unknown predicates in bodies.
        for l in &c.body {
            if let PredSym::Named(name) = &l.atom.pred {
                if program.decls.get(name).is_none() {
                    self.error(pos, format!("unknown predicate `{}`", name));
                    return;
                }
            }
        }
        match section {
            "idb" | "res" => {
                match c.head.as_slice() {
                    [h] if !h.is_builtin() => h,
                    _ => {
                        self.error(
                            pos,
                            format!(
                                "a {} rule needs exactly one ordinary head atom",
                                if section == "idb" { "derived" } else { "resource" }
                            ),
                        );
                        return;
                    }
                };
                if c.body.is_empty() {
                    self.error(pos, "expected a rule with a body");
                    return;
                }
                if section == "idb" {
                    for l in &c.body {
                        if program.decls.role_of(&l.atom.pred) == Some(Role::Res) {
                            self.error(
                                pos,
                                format!(
                                    "resource predicate `{}` cannot appear in a derived rule",
                                    l.atom.pred.name()
                                ),
                            );
                            return;
                        }
                    }
                    program.idb.push(c.clone());
                } else {
                    program.res.push(c.clone());
                }
            }
            "ic" => {
                for h in &c.head {
                    if !h.is_builtin()
                        && program.decls.role_of(&h.pred) != Some(Role::Edb)
                    {
                        self.error(
                            pos,
                            format!(
                                "constraint heads may contain only base predicates or comparisons, found `{}`",
                                h.pred.name()
                            ),
                        );
                        return;
                    }
                }
                program.ics.push(c.clone());
            }
            "facts" => {
                if c.head.len() != 1 || !c.body.is_empty() || !c.is_ground() {
                    self.error(pos, "facts must be single ground atoms");
                    return;
                }
                match program.decls.role_of(&c.head[0].pred) {
                    Some(Role::Edb) | Some(Role::Res) => program.facts.push(c.clone()),
                    Some(_) => {
                        self.error(
                            pos,
                            "facts are allowed only for base and resource predicates",
                        );
                    }
                    None => {
                        self.error(pos, format!("unknown predicate `{}`", c.head[0].pred.name()));
                    }
                }
            }
            _ => {}
        }
    }

    fn build_query(
        &mut self,
        rules: Vec<(Clause, Pos)>,
        program: &mut Program,
    ) -> Option<QueryDef> {
        let (first, first_pos) = &rules[0];
        let head = match first.head.as_slice() {
            [h] if !h.is_builtin() => h.clone(),
            _ => {
                self.error(*first_pos, "the query needs exactly one ordinary head atom");
                return None;
            }
        };
        let name = head.pred.name();
        if program.decls.get(&name).is_some() {
            self.error(
                *first_pos,
                format!("query name `{}` collides with a declared predicate", name),
            );
            return None;
        }
        let mut dvars: Vec<String> = Vec::new();
        for t in &head.args {
            match t {
                Term::Var(v) if !dvars.contains(v) => dvars.push(v.clone()),
                _ => {
                    self.error(
                        *first_pos,
                        "query head arguments must be distinct variables",
                    );
                    return None;
                }
            }
        }
        let mut out_rules = Vec::new();
        for (rule, pos) in &rules {
            let h = match rule.head.as_slice() {
                [h] if h.pred == head.pred && h.args.len() == head.args.len() => h,
                _ => {
                    self.error(*pos, "every query rule must share the same head");
                    return None;
                }
            };
            // Rectify: rename this rule's head variables to the first rule's.
            let mut subst = crate::kernel::Subst::new();
            let mut ok = true;
            for (t, v) in h.args.iter().zip(&dvars) {
                match t {
                    Term::Var(x) => {
                        if !subst.bind(x, &Term::var(v)) {
                            ok = false;
                        }
                    }
                    _ => ok = false,
                }
            }
            if !ok {
                self.error(*pos, "query head arguments must be distinct variables");
                return None;
            }
            let mut renamed = subst.apply_clause(rule);
            renamed.origin = Origin::Query;
            out_rules.push(renamed);
        }
        Some(QueryDef {
            name,
            dvars,
            rules: out_rules,
        })
    }
}

fn cmp_op(s: &str) -> CmpOp {
    match s {
        "=" => CmpOp::Eq,
        "!=" => CmpOp::Ne,
        "<" => CmpOp::Lt,
        "<=" => CmpOp::Le,
        ">" => CmpOp::Gt,
        ">=" => CmpOp::Ge,
        _ => unreachable!(),
    }
}

fn parse_number(s: &str) -> Option<num_rational::Rational64> {
    match s.split_once('.') {
        None => s.parse::<i64>().ok().map(num_rational::Rational64::from_integer),
        Some((int, frac)) => {
            let negative = int.starts_with('-');
            let int: i64 = int.parse().ok()?;
            let digits = frac.len() as u32;
            let den = 10i64.checked_pow(digits)?;
            let frac: i64 = frac.parse().ok()?;
            let numer = int.checked_mul(den)?;
            let frac = if negative { -frac } else { frac };
            Some(num_rational::Rational64::new(numer.checked_add(frac)?, den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_constraint_with_comparison() {
        let out = parse_program(
            "#edb\np1/3. p3/2.\n#ic\np3(X,Y) :- p1(X,Y,Z), Z > 0.\n",
        );
        let p = out.program.expect("should parse");
        assert_eq!(p.ics.len(), 1);
        assert_eq!(
            format_clause(&p.ics[0]),
            "p3(X,Y) :- p1(X,Y,Z), Z > 0."
        );
    }

    #[test]
    fn test_parse_disjunctive_constraint_head() {
        let out = parse_program("#edb\np1/1. p2/1. p3/1.\n#ic\np2(X) ; p3(X) :- p1(X).\n");
        let p = out.program.expect("should parse");
        assert_eq!(p.ics[0].head.len(), 2);
    }

    #[test]
    fn test_empty_input_warns() {
        let out = parse_program("");
        let p = out.program.expect("empty program is still a program");
        assert!(p.query.is_none());
        assert!(out
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning));
    }

    #[test]
    fn test_arity_clash() {
        let out = parse_program("#edb\np/2.\n#ic\n:- p(X).\n");
        assert!(out.program.is_none());
        assert!(out.diagnostics.iter().any(|d| d.message.contains("arity")));
    }

    #[test]
    fn test_role_clash() {
        let out = parse_program("#edb\np/1. q/1.\n#idb\np(X) :- q(X).\n");
        assert!(out.program.is_none());
    }

    #[test]
    fn test_reserved_skolem_token_rejected() {
        let out = parse_program("#edb\np/1.\n#facts\np($sk_r_0_U).\n");
        assert!(out.program.is_none());
        assert!(out.diagnostics.iter().any(|d| d.message.contains("reserved")));
    }

    #[test]
    fn test_unsafe_rule_rejected() {
        let out = parse_program("#edb\ns/2. h/2.\n#idb\nt(X,Y) :- s(X,Y), not h(X,Z).\n");
        assert!(out.program.is_none());
        assert!(out
            .diagnostics
            .iter()
            .any(|d| d.message.contains("unlimited variables Z")));
    }

    #[test]
    fn test_diagnostic_position_points_at_token() {
        let out = parse_program("#edb\np/1.\n#ic\n:- p(X), q(Y).\n");
        assert!(out.program.is_none());
        let d = &out.diagnostics[0];
        assert_eq!(d.line, 4);
        assert!(d.message.contains("unknown predicate `q`"));
    }

    #[test]
    fn test_query_rectified() {
        let out = parse_program(
            "#edb\nedge/2.\n#query\nq(X,Y) :- edge(X,Y).\nq(A,B) :- edge(A,C), q(C,B).\n",
        );
        let p = out.program.expect("should parse");
        let q = p.query.unwrap();
        assert_eq!(q.dvars, vec!["X".to_string(), "Y".to_string()]);
        assert!(q.is_recursive());
        assert_eq!(q.rules[1].head[0].to_string(), "q(X,Y)");
    }

    #[test]
    fn test_numbers_and_anonymous_vars() {
        let c = parse_clause(":- r1(X,_,_), X <= 1930.").unwrap();
        assert_eq!(format_clause(&c), ":- r1(X,_G1,_G2), X <= 1930.");
        let c2 = parse_clause(":- p(X), X > 0.5.").unwrap();
        assert_eq!(format_clause(&c2), ":- p(X), X > 0.5.");
    }
}
