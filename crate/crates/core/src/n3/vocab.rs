//! Builtin and runtime vocabulary.

pub const LOG: &str = "http://www.w3.org/2000/10/swap/log#";
pub const MATH: &str = "http://www.w3.org/2000/10/swap/math#";
/// Namespace of the runtime vocabulary used by translated rules.
pub const SIN3: &str = "urn:sin3:";

pub const LOG_IMPLIES: &str = "http://www.w3.org/2000/10/swap/log#implies";
pub const LOG_INCLUDES: &str = "http://www.w3.org/2000/10/swap/log#includes";
pub const LOG_NOT_INCLUDES: &str = "http://www.w3.org/2000/10/swap/log#notIncludes";
pub const LOG_COPY: &str = "http://www.w3.org/2000/10/swap/log#copy";
pub const LOG_CONJUNCTION: &str = "http://www.w3.org/2000/10/swap/log#conjunction";
pub const LOG_EQUAL_TO: &str = "http://www.w3.org/2000/10/swap/log#equalTo";
pub const LOG_NOT_EQUAL_TO: &str = "http://www.w3.org/2000/10/swap/log#notEqualTo";

pub const MATH_LESS_THAN: &str = "http://www.w3.org/2000/10/swap/math#lessThan";
pub const MATH_NOT_GREATER_THAN: &str = "http://www.w3.org/2000/10/swap/math#notGreaterThan";
pub const MATH_GREATER_THAN: &str = "http://www.w3.org/2000/10/swap/math#greaterThan";
pub const MATH_NOT_LESS_THAN: &str = "http://www.w3.org/2000/10/swap/math#notLessThan";
pub const MATH_SUM: &str = "http://www.w3.org/2000/10/swap/math#sum";
pub const MATH_DIFFERENCE: &str = "http://www.w3.org/2000/10/swap/math#difference";
pub const MATH_PRODUCT: &str = "http://www.w3.org/2000/10/swap/math#product";
pub const MATH_QUOTIENT: &str = "http://www.w3.org/2000/10/swap/math#quotient";

pub const SIN3_UNION: &str = "urn:sin3:union";
pub const SIN3_OPTIONAL: &str = "urn:sin3:optional";
pub const SIN3_RESULT: &str = "urn:sin3:result";
pub const SIN3_UNBOUND: &str = "urn:sin3:unbound";
pub const SIN3_EVAL: &str = "urn:sin3:eval";
pub const SIN3_UNNEST: &str = "urn:sin3:unnest";
pub const SIN3_LEFTJOIN: &str = "urn:sin3:leftjoin";

use crate::rdf::value::{ArithOp, CompareOp};

pub fn comparison_iri(op: CompareOp) -> &'static str {
    match op {
        CompareOp::Lt => MATH_LESS_THAN,
        CompareOp::Le => MATH_NOT_GREATER_THAN,
        CompareOp::Gt => MATH_GREATER_THAN,
        CompareOp::Ge => MATH_NOT_LESS_THAN,
        CompareOp::Eq => LOG_EQUAL_TO,
        CompareOp::Ne => LOG_NOT_EQUAL_TO,
    }
}

pub fn comparison_op(iri: &str) -> Option<CompareOp> {
    Some(match iri {
        MATH_LESS_THAN => CompareOp::Lt,
        MATH_NOT_GREATER_THAN => CompareOp::Le,
        MATH_GREATER_THAN => CompareOp::Gt,
        MATH_NOT_LESS_THAN => CompareOp::Ge,
        LOG_EQUAL_TO => CompareOp::Eq,
        LOG_NOT_EQUAL_TO => CompareOp::Ne,
        _ => return None,
    })
}

pub fn arithmetic_iri(op: ArithOp) -> &'static str {
    match op {
        ArithOp::Add => MATH_SUM,
        ArithOp::Sub => MATH_DIFFERENCE,
        ArithOp::Mul => MATH_PRODUCT,
        ArithOp::Div => MATH_QUOTIENT,
    }
}

pub fn arithmetic_op(iri: &str) -> Option<ArithOp> {
    Some(match iri {
        MATH_SUM => ArithOp::Add,
        MATH_DIFFERENCE => ArithOp::Sub,
        MATH_PRODUCT => ArithOp::Mul,
        MATH_QUOTIENT => ArithOp::Div,
        _ => return None,
    })
}

/// Runtime predicates whose behaviour the engine provides natively; rules
/// concluding them are interchange-only.
pub fn is_runtime_predicate(iri: &str) -> bool {
    matches!(iri, SIN3_UNION | SIN3_OPTIONAL | SIN3_EVAL | SIN3_UNNEST | SIN3_LEFTJOIN)
}

/// Prefixes always declared when writing N3.
pub const STANDARD_PREFIXES: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ("log", LOG),
    ("math", MATH),
    ("sin3", SIN3),
];
