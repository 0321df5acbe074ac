//! Variable analysis over graph patterns: occurring variables, the scope
//! function, certainly-bound variables, and relabeling of N3 patterns.

use std::collections::{BTreeMap, BTreeSet};

use crate::n3::{N3Gp, N3Term, CLOSURE_VAR};
use crate::rdf::{Term, Triple, Variable};
use crate::sparql::GraphPattern;

pub fn triple_vars<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> BTreeSet<Variable> {
    triples.into_iter().flat_map(|t| t.terms()).filter_map(Term::as_variable).cloned().collect()
}

/// Every variable occurring in the pattern, filters included.
pub fn vars(p: &GraphPattern) -> BTreeSet<Variable> {
    match p {
        GraphPattern::Bgp(ts) => triple_vars(ts),
        GraphPattern::Filter(a, r) => {
            let mut out = vars(a);
            out.extend(r.vars());
            out
        }
        GraphPattern::Opt(a, b, r) => {
            let mut out = vars(a);
            out.extend(vars(b));
            out.extend(r.vars());
            out
        }
        GraphPattern::And(a, b)
        | GraphPattern::Union(a, b)
        | GraphPattern::Minus(a, b)
        | GraphPattern::Fe(a, b)
        | GraphPattern::Fne(a, b) => {
            let mut out = vars(a);
            out.extend(vars(b));
            out
        }
    }
}

/// The scope function: the variables a pattern's solutions can bind.
pub fn sv(p: &GraphPattern) -> BTreeSet<Variable> {
    match p {
        GraphPattern::Bgp(ts) => triple_vars(ts),
        GraphPattern::And(a, b) | GraphPattern::Union(a, b) | GraphPattern::Opt(a, b, _) => {
            let mut out = sv(a);
            out.extend(sv(b));
            out
        }
        GraphPattern::Minus(a, _) | GraphPattern::Fe(a, _) | GraphPattern::Fne(a, _) | GraphPattern::Filter(a, _) => {
            sv(a)
        }
    }
}

/// [`sv`] in order of first occurrence in the pattern text; the column
/// order of `SELECT *`.
pub fn sv_ordered(p: &GraphPattern) -> Vec<Variable> {
    fn walk(p: &GraphPattern, out: &mut Vec<Variable>) {
        match p {
            GraphPattern::Bgp(ts) => {
                for v in ts.iter().flat_map(|t| t.terms()).filter_map(Term::as_variable) {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
            GraphPattern::And(a, b) | GraphPattern::Union(a, b) | GraphPattern::Opt(a, b, _) => {
                walk(a, out);
                walk(b, out);
            }
            GraphPattern::Minus(a, _)
            | GraphPattern::Fe(a, _)
            | GraphPattern::Fne(a, _)
            | GraphPattern::Filter(a, _) => walk(a, out),
        }
    }
    let mut out = Vec::new();
    walk(p, &mut out);
    out
}

/// Variables bound in every solution of the pattern.
pub fn cv(p: &GraphPattern) -> BTreeSet<Variable> {
    match p {
        GraphPattern::Bgp(ts) => triple_vars(ts),
        GraphPattern::And(a, b) => {
            let mut out = cv(a);
            out.extend(cv(b));
            out
        }
        GraphPattern::Union(a, b) => cv(a).intersection(&cv(b)).cloned().collect(),
        GraphPattern::Opt(a, _, _)
        | GraphPattern::Minus(a, _)
        | GraphPattern::Fe(a, _)
        | GraphPattern::Fne(a, _)
        | GraphPattern::Filter(a, _) => cv(a),
    }
}

/// Renames every variable of `g` outside `keep` to `<name>_rl<k>`, with `k`
/// counting from 1 in order of first occurrence. Renaming reaches into graph
/// terms and lists; the closure placeholder is never renamed.
pub fn rl(g: &N3Gp, keep: &BTreeSet<Variable>) -> N3Gp {
    let mut taken: BTreeSet<String> = g.all_vars().iter().map(|v| v.name().to_owned()).collect();
    taken.extend(keep.iter().map(|v| v.name().to_owned()));
    let mut renamed: BTreeMap<Variable, Variable> = BTreeMap::new();
    let mut k = 0usize;
    g.map_atoms(&mut |t: &Term| {
        let Term::Variable(v) = t else {
            return N3Term::Atomic(t.clone());
        };
        if keep.contains(v) || v.name() == CLOSURE_VAR {
            return N3Term::Atomic(t.clone());
        }
        let fresh = renamed.entry(v.clone()).or_insert_with(|| loop {
            k += 1;
            let candidate = format!("{}_rl{k}", v.name());
            if taken.insert(candidate.clone()) {
                break Variable::new(candidate);
            }
        });
        N3Term::Atomic(Term::Variable(fresh.clone()))
    })
}
