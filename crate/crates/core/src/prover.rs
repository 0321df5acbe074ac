//! Goal-directed proof search: SLD resolution over plain rules, with
//! optional answer tabling so that recursive rules terminate.
//!
//! Tables are keyed by call variant. A call that meets an in-progress table
//! consumes its current answers and records a dependency on that table's
//! stack position; the oldest table of a dependent group (its leader)
//! re-runs the group until no new answers appear, then marks every table
//! created since complete.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::algebra::{SolutionMapping, SolutionSet};
use crate::engine::is_runtime_rule;
use crate::engine::premise::{compare_ok, resolve};
use crate::engine::store::{Candidates, FactStore};
use crate::n3::vocab::{self, LOG, MATH};
use crate::n3::{N3Gp, N3Rule, N3Term};
use crate::rdf::value::{self, ArithOp, CompareOp};
use crate::rdf::{Graph, Term, Triple, Variable};

#[derive(Debug, Error)]
pub enum ProveError {
    #[error("rule {ordinal} is outside the backward fragment: {reason}")]
    UnsupportedRule { ordinal: usize, reason: String },
    #[error("proof search limit reached: {expansions} expansions, depth {depth}")]
    DepthLimit { expansions: usize, depth: usize },
}

#[derive(Clone, Debug)]
pub struct ProofConfig {
    /// Table answers per call variant. Without it, plain SLD may loop until
    /// a limit stops it.
    pub memoize: bool,
    pub max_expansions: usize,
    pub max_depth: usize,
}

impl Default for ProofConfig {
    fn default() -> Self {
        ProofConfig { memoize: true, max_expansions: 1_000_000, max_depth: 50_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Proof {
    /// Goal bindings, restricted to the goal's variables.
    pub answers: SolutionSet,
    /// Subgoal calls plus successful rule-head unifications.
    pub expansions: usize,
}

#[derive(Clone, Debug)]
enum Literal {
    Triple(Triple),
    Compare(CompareOp, Term, Term),
    Arith(ArithOp, Term, Term, Term),
}

#[derive(Debug)]
struct Clause {
    head: Triple,
    body: Vec<Literal>,
}

fn compile_body(g: &N3Gp, ordinal: usize) -> Result<Vec<Literal>, ProveError> {
    let unsupported = |reason: String| ProveError::UnsupportedRule { ordinal, reason };
    let mut out = Vec::new();
    for t in g {
        let pred = t.predicate_iri();
        let atom = |x: &N3Term| x.as_atomic().cloned().ok_or_else(|| unsupported(format!("nested term in {t}")));
        if let Some(op) = pred.and_then(vocab::comparison_op) {
            out.push(Literal::Compare(op, atom(&t.subject)?, atom(&t.object)?));
        } else if let Some(op) = pred.and_then(vocab::arithmetic_op) {
            let N3Term::List(args) = &t.subject else {
                return Err(unsupported(format!("arithmetic needs a list subject: {t}")));
            };
            if args.len() != 2 {
                return Err(unsupported(format!("arithmetic needs two operands: {t}")));
            }
            out.push(Literal::Arith(op, atom(&args[0])?, atom(&args[1])?, atom(&t.object)?));
        } else if let Some(p) = pred.filter(|p| p.starts_with(LOG) || p.starts_with(MATH) || p.starts_with(vocab::SIN3))
        {
            return Err(unsupported(format!("builtin <{p}>")));
        } else {
            out.push(Literal::Triple(t.as_plain().ok_or_else(|| unsupported(format!("nested term in {t}")))?));
        }
    }
    Ok(out)
}

fn compile_rules(rules: &[N3Rule]) -> Result<Vec<Clause>, ProveError> {
    let mut clauses = Vec::new();
    for (ordinal, rule) in rules.iter().enumerate() {
        if is_runtime_rule(rule) {
            continue;
        }
        let existential = rule.existential_vars();
        if !existential.is_empty() || rule.conclusion.iter().any(has_blank) {
            return Err(ProveError::UnsupportedRule {
                ordinal,
                reason: "conclusion has variables the premise does not bind".into(),
            });
        }
        let body = compile_body(&rule.premise, ordinal)?;
        for t in &rule.conclusion {
            let head = t.as_plain().ok_or_else(|| ProveError::UnsupportedRule {
                ordinal,
                reason: format!("nested term in conclusion {t}"),
            })?;
            clauses.push(Clause { head, body: body.clone() });
        }
    }
    Ok(clauses)
}

fn has_blank(t: &crate::n3::N3Triple) -> bool {
    let mut found = false;
    t.visit_atoms(&mut |a| found |= matches!(a, Term::BlankNode(_)));
    found
}

fn substitute(t: &Triple, row: &SolutionMapping) -> Triple {
    let s = |x: &Term| resolve(x, row).cloned().unwrap_or_else(|| x.clone());
    Triple::new(s(&t.subject), s(&t.predicate), s(&t.object))
}

/// Binds the variables of `pattern` so that it equals the ground `fact`.
fn unify(pattern: &Triple, fact: &Triple, row: &SolutionMapping) -> Option<SolutionMapping> {
    let mut out = row.clone();
    for (p, f) in pattern.terms().into_iter().zip(fact.terms()) {
        match p {
            Term::Variable(v) => match out.get(v) {
                Some(b) if b != f => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), f.clone());
                }
            },
            _ if p != f => return None,
            _ => {}
        }
    }
    Some(out)
}

/// Call variant: variables renamed by first occurrence.
fn variant(goal: &Triple) -> Triple {
    let mut names: BTreeMap<Variable, usize> = BTreeMap::new();
    let mut canon = |t: &Term| -> Term {
        match t {
            Term::Variable(v) => {
                let n = names.len();
                let i = *names.entry(v.clone()).or_insert(n);
                Term::var(format!("v{i}"))
            }
            _ => t.clone(),
        }
    };
    let s = canon(&goal.subject);
    let p = canon(&goal.predicate);
    let o = canon(&goal.object);
    Triple::new(s, p, o)
}

#[derive(Default)]
struct Table {
    answers: Vec<Triple>,
    seen: HashSet<Triple>,
    complete: bool,
    on_stack: Option<usize>,
}

struct Prover<'a> {
    facts: FactStore,
    clauses: &'a [Clause],
    by_pred: HashMap<Term, Vec<usize>>,
    var_pred: Vec<usize>,
    cfg: &'a ProofConfig,
    expansions: usize,
    depth: usize,
    tables: HashMap<Triple, Table>,
    stack: Vec<Triple>,
    /// Lowest stack position an in-progress call has consumed from.
    min_dep: usize,
    /// Tables evaluated but not yet complete, in creation order.
    pending: Vec<Triple>,
    added: usize,
}

impl<'a> Prover<'a> {
    fn new(facts: &Graph, clauses: &'a [Clause], cfg: &'a ProofConfig) -> Self {
        let mut by_pred: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut var_pred = Vec::new();
        for (i, c) in clauses.iter().enumerate() {
            if c.head.predicate.is_variable() {
                var_pred.push(i);
            } else {
                by_pred.entry(c.head.predicate.clone()).or_default().push(i);
            }
        }
        Prover {
            facts: FactStore::from_triples(facts.iter().cloned()),
            clauses,
            by_pred,
            var_pred,
            cfg,
            expansions: 0,
            depth: 0,
            tables: HashMap::new(),
            stack: Vec::new(),
            min_dep: usize::MAX,
            pending: Vec::new(),
            added: 0,
        }
    }

    fn tick(&mut self) -> Result<(), ProveError> {
        self.expansions += 1;
        if self.expansions > self.cfg.max_expansions || self.depth > self.cfg.max_depth {
            return Err(ProveError::DepthLimit { expansions: self.expansions, depth: self.depth });
        }
        Ok(())
    }

    fn candidate_clauses(&self, goal: &Triple) -> Vec<usize> {
        let mut out = self.var_pred.clone();
        match &goal.predicate {
            Term::Variable(_) => out.extend(self.by_pred.values().flatten()),
            p => out.extend(self.by_pred.get(p).into_iter().flatten()),
        }
        out.sort_unstable();
        out
    }

    /// Ground instances of `goal` derivable from facts and one clause step.
    fn resolve_once(&mut self, goal: &Triple) -> Result<Vec<Triple>, ProveError> {
        let mut out = Vec::new();
        let none = SolutionMapping::new();
        let key = |t: &Term| (!t.is_variable()).then(|| t.clone());
        let (s, p, o) = (key(&goal.subject), key(&goal.predicate), key(&goal.object));
        let ids: Vec<usize> = match self.facts.candidates(s.as_ref(), p.as_ref(), o.as_ref()) {
            Candidates::All(r) => r.collect(),
            Candidates::Some(ids) => ids.iter().map(|&i| i as usize).collect(),
        };
        for i in ids {
            let f = self.facts.get(i);
            if unify(goal, f, &none).is_some() {
                out.push(f.clone());
            }
        }
        for ci in self.candidate_clauses(goal) {
            let clause = &self.clauses[ci];
            // Head variables live in their own namespace; goal variables are
            // wildcards here and re-checked on each answer.
            let mut theta = SolutionMapping::new();
            let mut ok = true;
            for (h, g) in clause.head.terms().into_iter().zip(goal.terms()) {
                match (h, g) {
                    (_, Term::Variable(_)) => {}
                    (Term::Variable(v), c) => match theta.get(v) {
                        Some(b) if b != c => ok = false,
                        Some(_) => {}
                        None => {
                            theta.insert(v.clone(), c.clone());
                        }
                    },
                    (a, b) => ok &= a == b,
                }
            }
            if !ok {
                continue;
            }
            self.tick()?;
            let head = clause.head.clone();
            let body = clause.body.clone();
            for row in self.solve_body(&body, theta)? {
                let inst = substitute(&head, &row);
                if inst.is_ground() && unify(goal, &inst, &none).is_some() {
                    out.push(inst);
                }
            }
        }
        Ok(out)
    }

    fn call(&mut self, goal: &Triple) -> Result<Vec<Triple>, ProveError> {
        self.tick()?;
        if !self.cfg.memoize {
            self.depth += 1;
            let r = self.resolve_once(goal);
            self.depth -= 1;
            return r;
        }
        let key = variant(goal);
        if let Some(t) = self.tables.get(&key) {
            if t.complete {
                return Ok(t.answers.clone());
            }
            if let Some(pos) = t.on_stack {
                self.min_dep = self.min_dep.min(pos);
                return Ok(t.answers.clone());
            }
        }
        let my_pos = self.stack.len();
        let mark = self.pending.len();
        self.stack.push(key.clone());
        self.pending.push(key.clone());
        self.tables.entry(key.clone()).or_default().on_stack = Some(my_pos);
        let outer_dep = std::mem::replace(&mut self.min_dep, usize::MAX);
        self.depth += 1;
        let result = (|| -> Result<usize, ProveError> {
            let mut dep = usize::MAX;
            loop {
                let before = self.added;
                self.min_dep = usize::MAX;
                for a in self.resolve_once(goal)? {
                    let t = self.tables.get_mut(&key).expect("table");
                    if t.seen.insert(a.clone()) {
                        t.answers.push(a);
                        self.added += 1;
                    }
                }
                dep = dep.min(self.min_dep);
                // Only a leader iterates; members are re-run by it.
                if dep < my_pos || self.min_dep > my_pos || self.added == before {
                    break;
                }
            }
            Ok(dep)
        })();
        self.depth -= 1;
        self.stack.pop();
        self.tables.get_mut(&key).expect("table").on_stack = None;
        let dep = result?;
        if dep >= my_pos {
            for k in self.pending.drain(mark..) {
                if let Some(t) = self.tables.get_mut(&k) {
                    t.complete = true;
                }
            }
            self.min_dep = outer_dep;
        } else {
            self.min_dep = outer_dep.min(dep);
        }
        Ok(self.tables[&key].answers.clone())
    }

    fn solve_body(&mut self, body: &[Literal], row: SolutionMapping) -> Result<Vec<SolutionMapping>, ProveError> {
        if body.is_empty() {
            return Ok(vec![row]);
        }
        // Ready builtins first, then the most-bound triple.
        let bound = |t: &Term| resolve(t, &row).is_some();
        let pick = body
            .iter()
            .position(|l| match l {
                Literal::Compare(_, a, b) => bound(a) && bound(b),
                Literal::Arith(_, a, b, _) => bound(a) && bound(b),
                Literal::Triple(_) => false,
            })
            .or_else(|| {
                body.iter()
                    .enumerate()
                    .filter_map(|(i, l)| match l {
                        Literal::Triple(t) => Some((i, t.terms().iter().filter(|x| bound(x)).count())),
                        _ => None,
                    })
                    .max_by_key(|&(i, n)| (n, std::cmp::Reverse(i)))
                    .map(|(i, _)| i)
            });
        let Some(i) = pick else {
            // Only builtins with unbound operands remain; comparisons treat
            // an unbound operand as false and arithmetic as an error.
            let ok = body.iter().all(|l| match l {
                Literal::Compare(op, a, b) => compare_ok(*op, a, b, &row),
                _ => false,
            });
            return Ok(if ok { vec![row] } else { vec![] });
        };
        let mut rest: Vec<Literal> = body.to_vec();
        let lit = rest.remove(i);
        let mut out = Vec::new();
        match lit {
            Literal::Compare(op, a, b) => {
                if compare_ok(op, &a, &b, &row) {
                    out.extend(self.solve_body(&rest, row)?);
                }
            }
            Literal::Arith(op, a, b, r) => {
                let (x, y) = (resolve(&a, &row).cloned(), resolve(&b, &row).cloned());
                if let Some(v) = x.zip(y).and_then(|(x, y)| value::arithmetic(op, &x, &y)) {
                    let mut next = row.clone();
                    let ok = match resolve(&r, &row) {
                        Some(existing) => value::values_equal(existing, &v) == Some(true),
                        None => {
                            let Term::Variable(var) = &r else { unreachable!() };
                            next.insert(var.clone(), v);
                            true
                        }
                    };
                    if ok {
                        out.extend(self.solve_body(&rest, next)?);
                    }
                }
            }
            Literal::Triple(t) => {
                let goal = substitute(&t, &row);
                for answer in self.call(&goal)? {
                    if let Some(next) = unify(&t, &answer, &row) {
                        out.extend(self.solve_body(&rest, next)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn run(facts: &Graph, rules: &[N3Rule], goal: &N3Gp, cfg: &ProofConfig) -> Result<Proof, ProveError> {
    let clauses = compile_rules(rules)?;
    let body = compile_body(goal, usize::MAX).map_err(|e| match e {
        ProveError::UnsupportedRule { reason, .. } => {
            ProveError::UnsupportedRule { ordinal: usize::MAX, reason: format!("goal: {reason}") }
        }
        e => e,
    })?;
    let vars: BTreeSet<Variable> = goal.vars();
    let mut prover = Prover::new(facts, &clauses, cfg);
    let rows = prover.solve_body(&body, SolutionMapping::new())?;
    Ok(Proof { answers: rows.into_iter().map(|r| r.project(&vars)).collect(), expansions: prover.expansions })
}

/// Proves the conjunctive `goal` from `facts` and `rules`. Runs on a
/// dedicated thread with a large stack, since deep derivations recurse.
pub fn prove(facts: &Graph, rules: &[N3Rule], goal: &N3Gp, cfg: &ProofConfig) -> Result<Proof, ProveError> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(s, || run(facts, rules, goal, cfg))
            .expect("spawn prover thread")
            .join()
            .expect("prover thread panicked")
    })
}
