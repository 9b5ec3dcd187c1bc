//! Terms: variables, constants (symbols or exact rationals), and Skolem
//! applications introduced when resource definitions are inverted.

use num_rational::Rational64;
use num_traits::Signed;
use std::collections::BTreeSet;
use std::fmt;

/// A constant: either an uninterpreted symbol or an exact rational number.
/// Symbols compare by name only; numbers compare by value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Num(Rational64),
    Sym(String),
}

impl Const {
    pub fn sym(s: &str) -> Const {
        Const::Sym(s.to_string())
    }

    pub fn int(n: i64) -> Const {
        Const::Num(Rational64::from_integer(n))
    }

    pub fn as_num(&self) -> Option<Rational64> {
        match self {
            Const::Num(n) => Some(*n),
            Const::Sym(_) => None,
        }
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Sym(s) => {
                if needs_quoting(s) {
                    write!(f, "'{}'", s)
                } else {
                    write!(f, "{}", s)
                }
            }
            Const::Num(n) => write!(f, "{}", format_rational(*n)),
        }
    }
}

fn needs_quoting(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {
            !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => true,
    }
}

/// Renders a rational exactly: as an integer when possible, otherwise as a
/// terminating decimal. Rationals produced by the parser always terminate;
/// anything else falls back to `num/den` (which the parser will not accept).
pub fn format_rational(r: Rational64) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = *r.denom();
    let mut scale = 0u32;
    while den % 2 == 0 {
        den /= 2;
        scale += 1;
    }
    let mut fives = 0u32;
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = scale.max(fives);
    let scaled = r * Rational64::from_integer(10i64.pow(digits));
    let whole = scaled.to_integer().abs();
    let sign = if r.is_negative() { "-" } else { "" };
    let s = format!("{:0width$}", whole, width = digits as usize + 1);
    let (int_part, frac_part) = s.split_at(s.len() - digits as usize);
    format!("{}{}.{}", sign, int_part, frac_part)
}

/// Identifies a Skolem function: which resource definition introduced it and
/// which existential variable it replaced. Only the completion step creates
/// these; user input never contains them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkolemFn {
    pub resource: String,
    pub def_index: usize,
    pub var: String,
}

impl fmt::Display for SkolemFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "$sk_{}_{}_{}", self.resource, self.def_index, self.var)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Cst(Const),
    /// A Skolem function applied to the head variables of its resource rule.
    Sk(SkolemFn, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn sym(name: &str) -> Term {
        Term::Cst(Const::sym(name))
    }

    pub fn int(n: i64) -> Term {
        Term::Cst(Const::int(n))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Cst(_))
    }

    pub fn has_skolem(&self) -> bool {
        match self {
            Term::Var(_) | Term::Cst(_) => false,
            Term::Sk(_, _) => true,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Cst(_) => {}
            Term::Sk(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Cst(_) => false,
            Term::Sk(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::Cst(c) => write!(f, "{}", c),
            Term::Sk(sk, args) => {
                write!(f, "{}(", sk)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_rational_formatting() {
        assert_eq!(format_rational(Rational64::from_integer(1930)), "1930");
        assert_eq!(format_rational(Rational64::new(1, 2)), "0.5");
        assert_eq!(format_rational(Rational64::new(-1, 2)), "-0.5");
        assert_eq!(format_rational(Rational64::new(3, 20)), "0.15");
    }

    #[test]
    fn test_symbol_quoting() {
        assert_eq!(Const::sym("medicare").to_string(), "medicare");
        assert_eq!(Const::sym("New York").to_string(), "'New York'");
        assert_eq!(Const::sym("X12").to_string(), "'X12'");
    }

    #[test]
    fn test_skolem_display() {
        let sk = SkolemFn {
            resource: "r1".into(),
            def_index: 0,
            var: "U".into(),
        };
        let t = Term::Sk(sk, vec![Term::var("X"), Term::var("Y")]);
        assert_eq!(t.to_string(), "$sk_r1_0_U(X,Y)");
        assert!(t.has_skolem());
    }
}
