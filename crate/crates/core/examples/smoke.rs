use qfold_core::fold::{fold, SearchConfig};
use qfold_core::parser::{format_clause, parse_program};
use std::time::Instant;

fn run(name: &str, text: &str, budget: usize) {
    println!("=== {}", name);
    let p = parse_program(text).program.expect("parses");
    let t = Instant::now();
    let cfg = SearchConfig { step_budget: budget, ..Default::default() };
    let (prep, report) = fold(&p, &cfg).expect("folds");
    println!("mode {:?} case {:?} elapsed {:?}", prep.mode, prep.ic_case, t.elapsed());
    for o in &report.outcomes {
        println!("  {:?} {}  raw: {}", o.kind, format_clause(o.folded_query.as_ref().unwrap_or(&o.clause)), format_clause(&o.raw));
    }
    println!("warnings: {:?}", report.warnings);
}

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_default();
    if arg == "fd" || arg.is_empty() {
        run("fd join", "\
#edb\np1/2. p2/2.\n\
#ic\nY = Y2 :- p2(X2,Y), p2(X2,Y2).\n\
#res\nr1(X,Z) :- p1(X,W), p2(Z,W).\nr2(X,Y) :- p2(X,Y).\n\
#query\nq(X) :- p1(X,c).\n", 200000);
    }
    if arg == "rec" || arg.is_empty() {
        run("fd recursion", "\
#edb\ns/5.\n\
#ic\nA1 = A2 :- s(A1,N1,D1,P1,C1), s(A2,N2,D2,P1,C2).\n\
A1 = A2 :- s(A1,N1,D1,P1,C1), s(A2,N2,D2,P2,C1).\n\
#res\nr(D,P,C) :- s(A,N,D,P,C).\n\
#query\nq(P) :- s(A,N,D,mike,C), s(A,N2,D2,P,C2).\n", 500000);
    }
}
