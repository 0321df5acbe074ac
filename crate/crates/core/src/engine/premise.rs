//! Compiled rule premises and their evaluation against a fact store.
//!
//! A premise is split into a [`Level`]: plain triple patterns, optional
//! blocks, unions, arithmetic, comparisons and (not)includes checks. Plain
//! patterns are joined first; optional blocks are solved independently from
//! the incoming substitution and joined in; union sides are solved under
//! each partial solution; tests run last.

use std::collections::BTreeSet;
use std::ops::Range;

use super::store::{Candidates, FactStore};
use super::EngineError;
use crate::algebra::SolutionMapping;
use crate::n3::vocab::{self, LOG, MATH, SIN3_OPTIONAL, SIN3_UNBOUND, SIN3_UNION};
use crate::n3::{N3Gp, N3Term, N3Triple};
use crate::rdf::value::{self, ArithOp, CompareOp};
use crate::rdf::{Term, Triple, Variable};

#[derive(Debug, Default)]
pub(crate) struct Level {
    plain: Vec<Triple>,
    optionals: Vec<Optional>,
    unions: Vec<(Level, Level)>,
    arith: Vec<Arith>,
    compares: Vec<(CompareOp, Term, Term)>,
    checks: Vec<(Level, Level)>,
    includes: Vec<Includes>,
}

#[derive(Debug)]
struct Optional {
    main: Level,
    joint: Level,
}

#[derive(Debug)]
struct Arith {
    op: ArithOp,
    left: Term,
    right: Term,
    out: Term,
}

#[derive(Debug)]
struct Includes {
    positive: bool,
    subject: N3Term,
    body: Level,
}

fn graph_arg<'a>(t: &'a N3Term, triple: &N3Triple) -> Result<&'a N3Gp, EngineError> {
    match t {
        N3Term::Graph(g) => Ok(g),
        _ => Err(EngineError::UnsupportedPattern(format!("{triple}: expected a graph term"))),
    }
}

fn atom(t: &N3Term, triple: &N3Triple) -> Result<Term, EngineError> {
    t.as_atomic()
        .cloned()
        .ok_or_else(|| EngineError::UnsupportedPattern(format!("{triple}: expected an atomic operand")))
}

impl Level {
    pub(crate) fn compile(g: &N3Gp) -> Result<Level, EngineError> {
        let mut level = Level::default();
        for t in g {
            let pred = t.predicate_iri();
            if let Some(op) = pred.and_then(vocab::comparison_op) {
                level.compares.push((op, atom(&t.subject, t)?, atom(&t.object, t)?));
                continue;
            }
            if let Some(op) = pred.and_then(vocab::arithmetic_op) {
                let args = match &t.subject {
                    N3Term::List(items) if items.len() == 2 => items,
                    _ => return Err(EngineError::UnsupportedPattern(format!("{t}: expected a two-element list"))),
                };
                level.arith.push(Arith {
                    op,
                    left: atom(&args[0], t)?,
                    right: atom(&args[1], t)?,
                    out: atom(&t.object, t)?,
                });
                continue;
            }
            match pred {
                Some(vocab::LOG_INCLUDES) | Some(vocab::LOG_NOT_INCLUDES) => {
                    if !matches!(&t.subject, N3Term::Graph(_)) && t.subject.as_variable().is_none() {
                        return Err(EngineError::UnsupportedPattern(format!("{t}: bad includes subject")));
                    }
                    level.includes.push(Includes {
                        positive: pred == Some(vocab::LOG_INCLUDES),
                        subject: t.subject.clone(),
                        body: Level::compile(graph_arg(&t.object, t)?)?,
                    });
                }
                Some(SIN3_UNION) => {
                    let a = Level::compile(graph_arg(&t.subject, t)?)?;
                    let b = Level::compile(graph_arg(&t.object, t)?)?;
                    if a.produces() || b.produces() {
                        level.unions.push((a, b));
                    } else {
                        level.checks.push((a, b));
                    }
                }
                Some(SIN3_OPTIONAL) => {
                    let m = graph_arg(&t.subject, t)?;
                    let o = graph_arg(&t.object, t)?;
                    level.optionals.push(Optional {
                        main: Level::compile(m)?,
                        joint: Level::compile(&m.clone().union(o.clone()))?,
                    });
                }
                Some(p) if p.starts_with(LOG) || p.starts_with(MATH) || vocab::is_runtime_predicate(p) => {
                    return Err(EngineError::UnsupportedPattern(format!("builtin <{p}> is not supported in premises")));
                }
                _ => match t.as_plain() {
                    Some(p) => level.plain.push(p),
                    None => {
                        return Err(EngineError::UnsupportedPattern(format!("{t}: nested terms in a plain pattern")))
                    }
                },
            }
        }
        Ok(level)
    }

    /// True when the level can bind variables, as opposed to only testing.
    fn produces(&self) -> bool {
        !self.plain.is_empty() || !self.optionals.is_empty() || !self.unions.is_empty()
    }

    /// Plain-pattern-only levels admit semi-naive evaluation.
    pub(crate) fn is_semi_naive(&self) -> bool {
        self.optionals.is_empty() && self.unions.is_empty() && self.includes.is_empty()
    }

    /// Variables the level can bind through matching: plain patterns,
    /// optional blocks and union sides. Arithmetic temporaries and the
    /// existential variables of includes bodies are excluded.
    pub(crate) fn bindable(&self) -> BTreeSet<Variable> {
        let mut out = crate::scope::triple_vars(&self.plain);
        for o in &self.optionals {
            out.extend(o.joint.bindable());
        }
        for (a, b) in &self.unions {
            out.extend(a.bindable());
            out.extend(b.bindable());
        }
        out
    }
}

/// Read-only view of the facts a round may see.
#[derive(Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub(crate) store: &'a FactStore,
    pub(crate) end: usize,
}

pub(crate) fn resolve<'t>(t: &'t Term, row: &'t SolutionMapping) -> Option<&'t Term> {
    match t {
        Term::Variable(v) => row.get(v),
        _ => Some(t),
    }
}

fn unify(pattern: &Triple, fact: &Triple, row: &SolutionMapping) -> Option<SolutionMapping> {
    let mut out: Option<SolutionMapping> = None;
    for (p, f) in pattern.terms().into_iter().zip(fact.terms()) {
        match p {
            Term::Variable(v) => {
                let cur = out.as_ref().unwrap_or(row);
                match cur.get(v) {
                    Some(b) if b != f => return None,
                    Some(_) => {}
                    None => {
                        out.get_or_insert_with(|| row.clone()).insert(v.clone(), f.clone());
                    }
                }
            }
            _ if p != f => return None,
            _ => {}
        }
    }
    Some(out.unwrap_or_else(|| row.clone()))
}

fn bound_positions(p: &Triple, row: &SolutionMapping) -> usize {
    p.terms().iter().filter(|t| resolve(t, row).is_some()).count()
}

/// Joins plain patterns depth-first, picking the most-bound pattern at each
/// step. `windows[i]` limits the fact indexes pattern `i` may use.
fn match_plain(
    patterns: &[Triple],
    windows: &[Range<usize>],
    ctx: Ctx<'_>,
    row: SolutionMapping,
    out: &mut Vec<SolutionMapping>,
) {
    let mut remaining: Vec<usize> = (0..patterns.len()).collect();
    dfs(patterns, windows, ctx, &mut remaining, row, out);
}

fn dfs(
    patterns: &[Triple],
    windows: &[Range<usize>],
    ctx: Ctx<'_>,
    remaining: &mut Vec<usize>,
    row: SolutionMapping,
    out: &mut Vec<SolutionMapping>,
) {
    if remaining.is_empty() {
        out.push(row);
        return;
    }
    let full = 0..ctx.end;
    let pick = (0..remaining.len())
        .max_by_key(|&k| {
            let i = remaining[k];
            // Narrow windows (semi-naive deltas) go first.
            let narrow = windows[i] != full;
            (narrow, bound_positions(&patterns[i], &row), std::cmp::Reverse(k))
        })
        .expect("non-empty");
    let i = remaining.swap_remove(pick);
    let p = &patterns[i];
    let window = windows[i].clone();
    let key = |t: &Term| resolve(t, &row).cloned();
    let (s, pr, o) = (key(&p.subject), key(&p.predicate), key(&p.object));
    let mut visit = |idx: usize| {
        if window.contains(&idx) {
            if let Some(next) = unify(p, ctx.store.get(idx), &row) {
                dfs(patterns, windows, ctx, remaining, next, out);
            }
        }
    };
    match ctx.store.candidates(s.as_ref(), pr.as_ref(), o.as_ref()) {
        Candidates::All(range) => range.for_each(&mut visit),
        Candidates::Some(ids) => ids.iter().for_each(|&i| visit(i as usize)),
    }
    remaining.push(i);
    let last = remaining.len() - 1;
    remaining.swap(pick, last);
}

fn dedup(mut rows: Vec<SolutionMapping>) -> Vec<SolutionMapping> {
    rows.sort_unstable();
    rows.dedup();
    rows
}

/// Extends `row` with every arithmetic output, or rejects it.
fn apply_arith(arith: &[Arith], mut row: SolutionMapping) -> Option<SolutionMapping> {
    let mut pending: Vec<&Arith> = arith.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for a in pending {
            match (resolve(&a.left, &row), resolve(&a.right, &row)) {
                (Some(l), Some(r)) => {
                    let v = value::arithmetic(a.op, l, r)?;
                    match resolve(&a.out, &row) {
                        Some(existing) => {
                            if value::values_equal(existing, &v) != Some(true) {
                                return None;
                            }
                        }
                        None => {
                            let Term::Variable(var) = &a.out else { unreachable!() };
                            row.insert(var.clone(), v);
                        }
                    }
                }
                _ => rest.push(a),
            }
        }
        if rest.len() == before {
            // Unbound operand: the expression is an error.
            return None;
        }
        pending = rest;
    }
    Some(row)
}

fn is_unbound_const(t: &Term) -> bool {
    matches!(t, Term::Iri(i) if i == SIN3_UNBOUND)
}

/// Comparison under a row. An unbound operand makes the test false, except
/// that `?v log:equalTo sin3:unbound` holds exactly when `?v` is unbound and
/// `log:notEqualTo sin3:unbound` exactly when it is bound.
pub(crate) fn compare_ok(op: CompareOp, a: &Term, b: &Term, row: &SolutionMapping) -> bool {
    let value = |t: &Term| resolve(t, row).filter(|v| !v.is_unbound_marker() && !is_unbound_const(v)).cloned();
    if matches!(op, CompareOp::Eq | CompareOp::Ne) {
        let other = if is_unbound_const(b) {
            Some(a)
        } else if is_unbound_const(a) {
            Some(b)
        } else {
            None
        };
        if let Some(other) = other {
            let bound = value(other).is_some();
            return if op == CompareOp::Eq { !bound } else { bound };
        }
    }
    match (value(a), value(b)) {
        (Some(x), Some(y)) => value::compare(op, &x, &y) == Some(true),
        _ => false,
    }
}

fn substitute_graph(g: &N3Gp, row: &SolutionMapping) -> N3Gp {
    g.map_atoms(&mut |t| match t {
        Term::Variable(v) => N3Term::Atomic(row.get(v).cloned().unwrap_or_else(|| t.clone())),
        _ => N3Term::Atomic(t.clone()),
    })
}

fn includes_ok(inc: &Includes, ctx: Ctx<'_>, row: &SolutionMapping) -> bool {
    let found = match &inc.subject {
        N3Term::Graph(g) => {
            let g = substitute_graph(g, row);
            let facts: Option<Vec<Triple>> = g.iter().map(|t| t.as_plain().filter(Triple::is_ground)).collect();
            match facts {
                Some(facts) => {
                    let store = FactStore::from_triples(facts);
                    let sub = Ctx { store: &store, end: store.len() };
                    !inc.body.eval(sub, row).is_empty()
                }
                None => false,
            }
        }
        // The closure placeholder, or any variable, denotes the facts.
        _ => !inc.body.eval(ctx, row).is_empty(),
    };
    found == inc.positive
}

impl Level {
    /// Variables bound in every solution.
    fn certain(&self) -> BTreeSet<Variable> {
        let mut out: BTreeSet<Variable> = self
            .plain
            .iter()
            .flat_map(|t| t.terms())
            .filter_map(|t| match t {
                Term::Variable(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        for o in &self.optionals {
            out.extend(o.main.certain());
        }
        out
    }

    /// All solutions extending `subst`.
    pub(crate) fn eval(&self, ctx: Ctx<'_>, subst: &SolutionMapping) -> Vec<SolutionMapping> {
        self.eval_joined(ctx, subst, subst)
    }

    /// Solutions extending `row`, where only `fixed` acts as a substitution
    /// and the rest of `row` is joined in.
    fn eval_joined(&self, ctx: Ctx<'_>, fixed: &SolutionMapping, row: &SolutionMapping) -> Vec<SolutionMapping> {
        let windows = vec![0..ctx.end; self.plain.len()];
        self.eval_windows(ctx, fixed, row, &windows)
    }

    /// Semi-naive round: solutions that use at least one fact from `delta`.
    /// Only valid when [`Level::is_semi_naive`] holds.
    pub(crate) fn eval_delta(&self, ctx: Ctx<'_>, delta: Range<usize>) -> Vec<SolutionMapping> {
        let n = self.plain.len();
        let mut rows = Vec::new();
        for d in 0..n {
            let windows: Vec<Range<usize>> = (0..n)
                .map(|i| match i.cmp(&d) {
                    std::cmp::Ordering::Less => 0..delta.start,
                    std::cmp::Ordering::Equal => delta.clone(),
                    std::cmp::Ordering::Greater => 0..ctx.end,
                })
                .collect();
            let empty = SolutionMapping::new();
            rows.extend(self.eval_windows(ctx, &empty, &empty, &windows));
        }
        dedup(rows)
    }

    fn eval_windows(
        &self,
        ctx: Ctx<'_>,
        fixed: &SolutionMapping,
        subst: &SolutionMapping,
        windows: &[Range<usize>],
    ) -> Vec<SolutionMapping> {
        let mut rows = Vec::new();
        match_plain(&self.plain, windows, ctx, subst.clone(), &mut rows);

        for opt in &self.optionals {
            if rows.is_empty() {
                break;
            }
            let solved = opt.solve(ctx, fixed, subst);
            let mut next = Vec::new();
            for r in &rows {
                for s in &solved {
                    if crate::algebra::compatible(r, s) {
                        next.push(r.merge(s));
                    }
                }
            }
            rows = dedup(next);
        }

        for (a, b) in &self.unions {
            let mut next = Vec::new();
            for r in &rows {
                next.extend(a.eval_joined(ctx, fixed, r));
                next.extend(b.eval_joined(ctx, fixed, r));
            }
            rows = dedup(next);
        }

        if !self.arith.is_empty() {
            rows = rows.into_iter().filter_map(|r| apply_arith(&self.arith, r)).collect();
        }
        rows.retain(|r| self.compares.iter().all(|(op, a, b)| compare_ok(*op, a, b, r)));
        rows.retain(|r| self.checks.iter().all(|(a, b)| !a.eval(ctx, r).is_empty() || !b.eval(ctx, r).is_empty()));
        rows.retain(|r| self.includes.iter().all(|inc| includes_ok(inc, ctx, r)));
        rows
    }
}

impl Optional {
    /// Left-join solutions of the block: joint solutions, plus main-side
    /// solutions that no joint solution extends.
    ///
    ///
    /// Besides the `fixed` substitution, only row bindings of variables every
    /// main solution binds are pushed in; pushing others would change which
    /// rows count as extended. The caller joins the full row back in.
    fn solve(&self, ctx: Ctx<'_>, fixed: &SolutionMapping, row: &SolutionMapping) -> Vec<SolutionMapping> {
        let certain = self.main.certain();
        let pushed: SolutionMapping = row
            .iter()
            .filter(|(v, _)| certain.contains(*v) || fixed.get(v).is_some())
            .map(|(v, t)| (v.clone(), t.clone()))
            .collect();
        let joint = self.joint.eval_joined(ctx, fixed, &pushed);
        let mut out = joint.clone();
        for m in self.main.eval_joined(ctx, fixed, &pushed) {
            let extended = joint.iter().any(|j| m.iter().all(|(v, t)| j.get(v) == Some(t)));
            if !extended {
                out.push(m);
            }
        }
        dedup(out)
    }
}
