//! Interval reasoning over built-in comparison atoms.

use super::clause::{Atom, CmpOp};
use super::term::{Const, Term};
use num_rational::Rational64;

/// Evaluates `lhs op rhs` when both sides are ground constants of a
/// comparable kind. Numbers compare by value; symbols support only equality
/// and inequality. Anything involving a Skolem term is undecided except for
/// syntactic identity under `=` / `!=`.
pub fn eval_ground(op: CmpOp, lhs: &Term, rhs: &Term) -> Option<bool> {
    if lhs == rhs && !lhs.is_var() {
        return Some(matches!(op, CmpOp::Eq | CmpOp::Le | CmpOp::Ge));
    }
    match (lhs, rhs) {
        (Term::Cst(Const::Num(a)), Term::Cst(Const::Num(b))) => Some(match op {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }),
        (Term::Cst(Const::Sym(a)), Term::Cst(Const::Sym(b))) => match op {
            CmpOp::Eq => Some(a == b),
            CmpOp::Ne => Some(a != b),
            _ => None,
        },
        _ => None,
    }
}

/// Decides whether every assignment satisfying `stronger` also satisfies
/// `weaker`. Supports syntactically equal atoms and the single-variable
/// numeric shape `X op c`; anything else conservatively returns false.
pub fn builtin_implies(stronger: &Atom, weaker: &Atom) -> bool {
    if !stronger.is_builtin() || !weaker.is_builtin() {
        return false;
    }
    if stronger == weaker {
        return true;
    }
    let (sv, sop, sc) = match normalize(stronger) {
        Some(x) => x,
        None => return false,
    };
    let (wv, wop, wc) = match normalize(weaker) {
        Some(x) => x,
        None => return false,
    };
    if sv != wv {
        return false;
    }
    implies_interval(sop, sc, wop, wc)
}

/// Puts a builtin atom into the shape (variable, op, numeric constant),
/// flipping the operator when the constant is on the left.
fn normalize(a: &Atom) -> Option<(String, CmpOp, Rational64)> {
    let op = a.builtin_op()?;
    match (&a.args[0], &a.args[1]) {
        (Term::Var(v), Term::Cst(Const::Num(c))) => Some((v.clone(), op, *c)),
        (Term::Cst(Const::Num(c)), Term::Var(v)) => Some((v.clone(), flip(op), *c)),
        _ => None,
    }
}

fn flip(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Gt => CmpOp::Lt,
        CmpOp::Ge => CmpOp::Le,
        other => other,
    }
}

fn satisfies(v: Rational64, op: CmpOp, c: Rational64) -> bool {
    match op {
        CmpOp::Eq => v == c,
        CmpOp::Ne => v != c,
        CmpOp::Lt => v < c,
        CmpOp::Le => v <= c,
        CmpOp::Gt => v > c,
        CmpOp::Ge => v >= c,
    }
}

fn implies_interval(sop: CmpOp, sc: Rational64, wop: CmpOp, wc: Rational64) -> bool {
    match sop {
        // {sc} must satisfy the weaker constraint.
        CmpOp::Eq => satisfies(sc, wop, wc),
        // Everything but sc satisfies the weaker one only for != with the
        // same constant.
        CmpOp::Ne => wop == CmpOp::Ne && wc == sc,
        CmpOp::Gt => match wop {
            CmpOp::Gt => sc >= wc,
            CmpOp::Ge => sc >= wc,
            CmpOp::Ne => wc <= sc,
            _ => false,
        },
        CmpOp::Ge => match wop {
            CmpOp::Gt => sc > wc,
            CmpOp::Ge => sc >= wc,
            CmpOp::Ne => wc < sc,
            _ => false,
        },
        CmpOp::Lt => match wop {
            CmpOp::Lt => sc <= wc,
            CmpOp::Le => sc <= wc,
            CmpOp::Ne => wc >= sc,
            _ => false,
        },
        CmpOp::Le => match wop {
            CmpOp::Lt => sc < wc,
            CmpOp::Le => sc <= wc,
            CmpOp::Ne => wc > sc,
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(op: CmpOp, c: i64) -> Atom {
        Atom::cmp(op, Term::var("Z"), Term::int(c))
    }

    #[test]
    fn test_gt_implies_weaker_gt() {
        assert!(builtin_implies(&cmp(CmpOp::Gt, 1), &cmp(CmpOp::Gt, 0)));
        assert!(!builtin_implies(&cmp(CmpOp::Gt, 0), &cmp(CmpOp::Gt, 1)));
    }

    #[test]
    fn test_eq_implies_ge() {
        let eq3 = Atom::cmp(CmpOp::Eq, Term::var("X"), Term::int(3));
        let ge3 = Atom::cmp(CmpOp::Ge, Term::var("X"), Term::int(3));
        assert!(builtin_implies(&eq3, &ge3));
        assert!(!builtin_implies(&ge3, &eq3));
    }

    #[test]
    fn test_unsupported_shapes() {
        let two_vars = Atom::cmp(CmpOp::Gt, Term::var("X"), Term::var("Y"));
        assert!(builtin_implies(&two_vars, &two_vars));
        assert!(!builtin_implies(&two_vars, &cmp(CmpOp::Gt, 0)));
        let symbolic = Atom::cmp(CmpOp::Eq, Term::var("X"), Term::sym("a"));
        assert!(!builtin_implies(&symbolic, &cmp(CmpOp::Gt, 0)));
    }

    #[test]
    fn test_ground_eval() {
        assert_eq!(eval_ground(CmpOp::Gt, &Term::int(2), &Term::int(1)), Some(true));
        assert_eq!(eval_ground(CmpOp::Gt, &Term::int(0), &Term::int(1)), Some(false));
        assert_eq!(eval_ground(CmpOp::Eq, &Term::sym("a"), &Term::sym("b")), Some(false));
        assert_eq!(eval_ground(CmpOp::Lt, &Term::sym("a"), &Term::sym("b")), None);
        assert_eq!(eval_ground(CmpOp::Eq, &Term::var("X"), &Term::var("X")), None);
    }

    /// Exhaustive agreement with evaluation over a rational sweep. The sweep
    /// holds every constant, a half-point inside each gap between adjacent
    /// constants, and a value beyond each extreme, so any failure of a real
    /// implication between constraints over these constants has a witness in
    /// the sweep and the finite check is exact.
    #[test]
    fn test_agrees_with_rational_sweep() {
        let sweep: Vec<Rational64> = vec![
            Rational64::from_integer(-2),
            Rational64::from_integer(-1),
            Rational64::new(-1, 2),
            Rational64::from_integer(0),
            Rational64::new(1, 2),
            Rational64::from_integer(1),
            Rational64::new(3, 2),
            Rational64::from_integer(2),
            Rational64::from_integer(3),
        ];
        let consts: Vec<Rational64> = vec![
            Rational64::from_integer(-1),
            Rational64::from_integer(0),
            Rational64::from_integer(1),
            Rational64::from_integer(2),
        ];
        let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
        for &sop in &ops {
            for &wop in &ops {
                for &sc in &consts {
                    for &wc in &consts {
                        let strong = Atom::cmp(sop, Term::var("X"), Term::Cst(Const::Num(sc)));
                        let weak = Atom::cmp(wop, Term::var("X"), Term::Cst(Const::Num(wc)));
                        let brute = sweep
                            .iter()
                            .all(|&v| !satisfies(v, sop, sc) || satisfies(v, wop, wc));
                        assert_eq!(
                            builtin_implies(&strong, &weak),
                            brute,
                            "{} vs {}",
                            strong,
                            weak
                        );
                    }
                }
            }
        }
    }
}
