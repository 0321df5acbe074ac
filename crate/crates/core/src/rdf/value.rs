//! Value-space comparison and arithmetic for filter builtins. Shared by the
//! reference evaluator and the rule engine so both agree on edge cases.

use std::cmp::Ordering;
use std::fmt;

use super::{Literal, Term, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    /// The operator that holds exactly when `self` fails (on non-error
    /// operands).
    pub fn negate(self) -> CompareOp {
        match self {
            CompareOp::Eq => CompareOp::Ne,
            CompareOp::Ne => CompareOp::Eq,
            CompareOp::Lt => CompareOp::Ge,
            CompareOp::Le => CompareOp::Gt,
            CompareOp::Gt => CompareOp::Le,
            CompareOp::Ge => CompareOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A numeric literal's value. Integers stay exact; decimals and doubles are
/// approximated by `f64`, which is enough for the supported filter subset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Numeric {
    Integer(i64),
    Decimal(f64),
    Double(f64),
}

impl Numeric {
    fn as_f64(self) -> f64 {
        match self {
            Numeric::Integer(i) => i as f64,
            Numeric::Decimal(d) | Numeric::Double(d) => d,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Numeric::Integer(_) => 0,
            Numeric::Decimal(_) => 1,
            Numeric::Double(_) => 2,
        }
    }

    pub fn to_term(self) -> Term {
        match self {
            Numeric::Integer(i) => Term::integer(i),
            Numeric::Decimal(d) => Term::Literal(Literal::typed(format_decimal(d), XSD_DECIMAL)),
            Numeric::Double(d) => Term::Literal(Literal::typed(format!("{d:e}"), XSD_DOUBLE)),
        }
    }
}

fn format_decimal(d: f64) -> String {
    if d.fract() == 0.0 && d.abs() < 1e15 {
        format!("{d:.1}")
    } else {
        format!("{d}")
    }
}

pub fn numeric(term: &Term) -> Option<Numeric> {
    let Term::Literal(lit) = term else { return None };
    let s = lit.lexical.as_str();
    match lit.datatype.as_str() {
        XSD_INTEGER => s.parse::<i64>().ok().map(Numeric::Integer),
        XSD_DECIMAL if !s.contains(['e', 'E']) => s.parse::<f64>().ok().map(Numeric::Decimal),
        XSD_DOUBLE => s.parse::<f64>().ok().filter(|d| !d.is_nan()).map(Numeric::Double),
        _ => None,
    }
}

/// Ordering of two terms in value space, or `None` when the comparison is a
/// type error: non-literals, the unbound marker, or literals of unrelated
/// types.
pub fn compare_values(a: &Term, b: &Term) -> Option<Ordering> {
    if let (Some(x), Some(y)) = (numeric(a), numeric(b)) {
        return match (x, y) {
            (Numeric::Integer(i), Numeric::Integer(j)) => Some(i.cmp(&j)),
            _ => x.as_f64().partial_cmp(&y.as_f64()),
        };
    }
    match (a, b) {
        (Term::Literal(x), Term::Literal(y)) if x.datatype == y.datatype && x.lang == y.lang => {
            if x.datatype == XSD_BOOLEAN {
                Some(parse_bool(&x.lexical)?.cmp(&parse_bool(&y.lexical)?))
            } else if numeric_datatype(&x.datatype) {
                // Ill-formed numeric lexical form.
                None
            } else {
                Some(x.lexical.cmp(&y.lexical))
            }
        }
        _ => None,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

fn numeric_datatype(dt: &str) -> bool {
    matches!(dt, XSD_INTEGER | XSD_DECIMAL | XSD_DOUBLE)
}

/// Equality in value space. Non-literal terms compare by identity; two
/// literals that cannot be compared give `None`.
pub fn values_equal(a: &Term, b: &Term) -> Option<bool> {
    if a.is_unbound_marker() || b.is_unbound_marker() {
        return None;
    }
    match (a, b) {
        (Term::Literal(_), Term::Literal(_)) => {
            if a == b {
                return Some(true);
            }
            compare_values(a, b).map(|o| o == Ordering::Equal)
        }
        _ => Some(a == b),
    }
}

/// Evaluates `a op b`; `None` is a type error.
pub fn compare(op: CompareOp, a: &Term, b: &Term) -> Option<bool> {
    match op {
        CompareOp::Eq => values_equal(a, b),
        CompareOp::Ne => values_equal(a, b).map(|e| !e),
        _ => {
            if a.is_unbound_marker() || b.is_unbound_marker() {
                return None;
            }
            let ord = compare_values(a, b)?;
            Some(match op {
                CompareOp::Lt => ord == Ordering::Less,
                CompareOp::Le => ord != Ordering::Greater,
                CompareOp::Gt => ord == Ordering::Greater,
                CompareOp::Ge => ord != Ordering::Less,
                CompareOp::Eq | CompareOp::Ne => unreachable!(),
            })
        }
    }
}

/// Numeric arithmetic with integer ⊂ decimal ⊂ double promotion. Integer
/// division yields a decimal. Division by zero and overflow are errors.
pub fn arithmetic(op: ArithOp, a: &Term, b: &Term) -> Option<Term> {
    let (x, y) = (numeric(a)?, numeric(b)?);
    let result = match (x, y, op) {
        (Numeric::Integer(i), Numeric::Integer(j), ArithOp::Add) => Numeric::Integer(i.checked_add(j)?),
        (Numeric::Integer(i), Numeric::Integer(j), ArithOp::Sub) => Numeric::Integer(i.checked_sub(j)?),
        (Numeric::Integer(i), Numeric::Integer(j), ArithOp::Mul) => Numeric::Integer(i.checked_mul(j)?),
        _ => {
            let (p, q) = (x.as_f64(), y.as_f64());
            let v = match op {
                ArithOp::Add => p + q,
                ArithOp::Sub => p - q,
                ArithOp::Mul => p * q,
                ArithOp::Div => {
                    if q == 0.0 {
                        return None;
                    }
                    p / q
                }
            };
            if !v.is_finite() {
                return None;
            }
            if x.rank().max(y.rank()) == 2 {
                Numeric::Double(v)
            } else {
                Numeric::Decimal(v)
            }
        }
    };
    Some(result.to_term())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> Term {
        Term::Literal(Literal::typed(s, XSD_DECIMAL))
    }

    #[test]
    fn integers_compare_by_value() {
        assert_eq!(compare(CompareOp::Lt, &Term::integer(1), &Term::integer(2)), Some(true));
        let padded = Term::Literal(Literal::typed("01", XSD_INTEGER));
        assert_eq!(compare(CompareOp::Eq, &padded, &Term::integer(1)), Some(true));
    }

    #[test]
    fn integer_promotes_to_decimal() {
        assert_eq!(compare(CompareOp::Eq, &Term::integer(2), &dec("2.0")), Some(true));
        assert_eq!(compare(CompareOp::Gt, &dec("2.5"), &Term::integer(2)), Some(true));
    }

    #[test]
    fn mixed_types_are_errors_for_ordering() {
        assert_eq!(compare(CompareOp::Lt, &Term::string("a"), &Term::integer(2)), None);
        assert_eq!(compare(CompareOp::Lt, &Term::iri("urn:a"), &Term::iri("urn:b")), None);
        assert_eq!(compare(CompareOp::Eq, &Term::string("a"), &Term::integer(2)), None);
    }

    #[test]
    fn non_literals_compare_by_identity() {
        assert_eq!(compare(CompareOp::Eq, &Term::iri("urn:a"), &Term::iri("urn:a")), Some(true));
        assert_eq!(compare(CompareOp::Ne, &Term::iri("urn:a"), &Term::integer(1)), Some(true));
    }

    #[test]
    fn unbound_marker_is_an_error_operand() {
        assert_eq!(compare(CompareOp::Eq, &Term::unbound(), &Term::unbound()), None);
        assert_eq!(compare(CompareOp::Lt, &Term::unbound(), &Term::integer(1)), None);
    }

    #[test]
    fn arithmetic_promotion_and_division() {
        assert_eq!(arithmetic(ArithOp::Add, &Term::integer(2), &Term::integer(3)), Some(Term::integer(5)));
        assert_eq!(arithmetic(ArithOp::Div, &Term::integer(3), &Term::integer(2)), Some(dec("1.5")));
        assert_eq!(arithmetic(ArithOp::Div, &Term::integer(4), &Term::integer(2)), Some(dec("2.0")));
        assert_eq!(arithmetic(ArithOp::Div, &Term::integer(1), &Term::integer(0)), None);
        assert_eq!(arithmetic(ArithOp::Add, &Term::string("1"), &Term::integer(0)), None);
    }

    #[test]
    fn negation_is_an_involution() {
        for op in [CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge] {
            assert_eq!(op.negate().negate(), op);
        }
    }
}
