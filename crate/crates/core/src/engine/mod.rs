//! Forward-chaining N3 engine: stratified, semi-naive where the premise is
//! plain, with native union, optional, (not)includes, comparison and
//! arithmetic builtins.

pub(crate) mod premise;
pub(crate) mod store;
mod stratify;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

pub use stratify::{stratify, Stratification};

use crate::algebra::{SolutionMapping, SolutionSet};
use crate::n3::vocab::{self, SIN3_RESULT, SIN3_UNBOUND};
use crate::n3::{N3Gp, N3Rule, N3Term, N3Triple};
use crate::rdf::{Graph, Term, Variable};
use premise::{Ctx, Level};
use store::FactStore;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unstratifiable: negation cycle through {predicates}")]
    Unstratifiable { predicates: String },
    #[error("no fixpoint within {cap} iterations")]
    IterationCap { cap: usize },
    #[error("unsupported premise: {0}")]
    UnsupportedPattern(String),
    #[error("malformed result fact: {0}")]
    MalformedResult(String),
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub max_iterations: usize,
    /// Record one line per rule firing in [`FactBase::trace`].
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_iterations: 10_000, trace: false }
    }
}

/// Result of saturation.
#[derive(Clone, Debug, Default)]
pub struct FactBase {
    /// Input facts plus every derived plain triple.
    pub facts: Graph,
    /// Derived facts containing lists or graph terms, such as result rows.
    pub other: BTreeSet<N3Triple>,
    /// Rounds run, summed over strata, including each final quiet round.
    pub iterations: usize,
    pub strata: usize,
    pub firings: usize,
    pub trace: Vec<String>,
}

/// True for rules whose conclusion defines a runtime predicate; the engine
/// implements those natively.
pub fn is_runtime_rule(rule: &N3Rule) -> bool {
    rule.conclusion.iter().any(|t| t.predicate_iri().is_some_and(vocab::is_runtime_predicate))
}

struct Compiled<'r> {
    ordinal: usize,
    rule: &'r N3Rule,
    level: Level,
    premise_vars: BTreeSet<Variable>,
}

struct Skolem {
    used: BTreeSet<String>,
    next: usize,
}

impl Skolem {
    fn fresh(&mut self) -> Term {
        loop {
            let label = format!("sk_{}", self.next);
            self.next += 1;
            if !self.used.contains(&label) {
                return Term::blank(label);
            }
        }
    }
}

fn instantiate(c: &Compiled<'_>, row: &SolutionMapping, skolem: &mut Skolem) -> Vec<N3Triple> {
    let mut fresh: BTreeMap<Term, Term> = BTreeMap::new();
    let mut map = |t: &Term| -> N3Term {
        N3Term::Atomic(match t {
            Term::Variable(v) => match row.get(v) {
                Some(b) => b.clone(),
                None if c.premise_vars.contains(v) => Term::unbound(),
                None => fresh.entry(t.clone()).or_insert_with(|| skolem.fresh()).clone(),
            },
            Term::BlankNode(_) => fresh.entry(t.clone()).or_insert_with(|| skolem.fresh()).clone(),
            _ => t.clone(),
        })
    };
    c.rule.conclusion.iter().map(|t| t.map_atoms(&mut map)).collect()
}

/// Saturates `facts` under `rules`. Rules defining runtime predicates are
/// skipped. Rule mode is ignored: every rule is applied forward.
pub fn saturate(facts: &Graph, rules: &[N3Rule], cfg: &EngineConfig) -> Result<FactBase, EngineError> {
    let mut compiled = Vec::new();
    for (ordinal, rule) in rules.iter().enumerate() {
        if is_runtime_rule(rule) {
            log::debug!("skipping runtime rule {ordinal}");
            continue;
        }
        compiled.push(Compiled {
            ordinal,
            rule,
            level: Level::compile(&rule.premise)?,
            premise_vars: rule.premise.vars(),
        });
    }
    let active: Vec<N3Rule> = compiled.iter().map(|c| c.rule.clone()).collect();
    let strat = stratify(&active)?;

    let mut store = FactStore::from_triples(facts.iter().cloned());
    let mut other = BTreeSet::new();
    let mut fired: HashSet<(usize, SolutionMapping)> = HashSet::new();
    let mut skolem = Skolem { used: facts.blank_labels(), next: 0 };
    let mut fb = FactBase { strata: strat.strata.len(), ..FactBase::default() };

    for (s, members) in strat.strata.iter().enumerate() {
        let mut delta_start = 0;
        let mut first = true;
        loop {
            fb.iterations += 1;
            if fb.iterations > cfg.max_iterations {
                return Err(EngineError::IterationCap { cap: cfg.max_iterations });
            }
            let end = store.len();
            let ctx = Ctx { store: &store, end };
            let mut pending = Vec::new();
            for &i in members {
                let c = &compiled[i];
                let rows = if !first && c.level.is_semi_naive() {
                    c.level.eval_delta(ctx, delta_start..end)
                } else {
                    c.level.eval(ctx, &SolutionMapping::new())
                };
                for row in rows {
                    let key = (c.ordinal, row);
                    if fired.contains(&key) {
                        continue;
                    }
                    fb.firings += 1;
                    if cfg.trace {
                        fb.trace.push(format!("stratum={s} rule={} binding={}", c.ordinal, key.1));
                    }
                    pending.extend(instantiate(c, &key.1, &mut skolem));
                    fired.insert(key);
                }
            }
            let mut added = 0;
            for t in pending {
                match t.as_plain() {
                    Some(p) => added += store.insert(p) as usize,
                    None => added += other.insert(t) as usize,
                }
            }
            delta_start = end;
            first = false;
            if added == 0 {
                break;
            }
        }
    }
    fb.facts = store.iter().cloned().collect();
    fb.other = other;
    Ok(fb)
}

/// Solutions of a premise over `facts`. Variables the premise could bind but
/// a solution leaves unbound map to the unbound marker.
pub fn match_premise(premise: &N3Gp, facts: &Graph) -> Result<SolutionSet, EngineError> {
    let level = Level::compile(premise)?;
    let store = FactStore::from_triples(facts.iter().cloned());
    let bindable = level.bindable();
    let ctx = Ctx { store: &store, end: store.len() };
    Ok(level
        .eval(ctx, &SolutionMapping::new())
        .into_iter()
        .map(|row| fill(&row.project(&bindable), &bindable))
        .collect())
}

fn fill(row: &SolutionMapping, vars: &BTreeSet<Variable>) -> SolutionMapping {
    let mut out = row.clone();
    for v in vars {
        if !out.contains(v) {
            out.insert(v.clone(), Term::unbound());
        }
    }
    out
}

fn result_names(head: &N3Gp) -> Option<Vec<String>> {
    let t = head.iter().find(|t| t.predicate_iri() == Some(SIN3_RESULT))?;
    let N3Term::List(pairs) = &t.object else { return None };
    pairs
        .iter()
        .map(|p| match p {
            N3Term::List(kv) if kv.len() == 2 => match &kv[0] {
                N3Term::Atomic(Term::Literal(l)) => Some(l.lexical.clone()),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

/// Decodes the SELECT rows stored by a rule with result head `head`.
/// Variables without a value map to the unbound marker.
pub fn answer_select(fb: &FactBase, head: &N3Gp) -> Result<SolutionSet, EngineError> {
    let names = result_names(head).ok_or_else(|| EngineError::MalformedResult(format!("not a result head: {head}")))?;
    let mut rows = SolutionSet::new();
    for t in &fb.other {
        if t.predicate_iri() != Some(SIN3_RESULT) {
            continue;
        }
        let bad = || EngineError::MalformedResult(t.to_string());
        let N3Term::List(pairs) = &t.object else { return Err(bad()) };
        if pairs.len() != names.len() {
            continue;
        }
        let mut row = SolutionMapping::new();
        let mut matches = true;
        for (pair, name) in pairs.iter().zip(&names) {
            let (key, value) = match pair {
                N3Term::List(kv) if kv.len() == 2 => match (&kv[0], &kv[1]) {
                    (N3Term::Atomic(Term::Literal(k)), N3Term::Atomic(v)) if !v.is_variable() => (k, v),
                    _ => return Err(bad()),
                },
                _ => return Err(bad()),
            };
            if &key.lexical != name {
                matches = false;
                break;
            }
            let value = match value {
                Term::Iri(i) if i == SIN3_UNBOUND => Term::unbound(),
                v => v.clone(),
            };
            row.insert(Variable::new(name.clone()), value);
        }
        if matches {
            rows.insert(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::n3::parse_n3;
    use crate::rdf::Triple;

    fn doc(text: &str) -> Vec<N3Rule> {
        let src = format!(
            "@prefix : <urn:t:>. @prefix log: <{}>. @prefix math: <{}>. @prefix sin3: <urn:sin3:>. {text}",
            vocab::LOG,
            vocab::MATH
        );
        parse_n3(&src).unwrap().rules
    }

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(format!("urn:t:{s}")), Term::iri(format!("urn:t:{p}")), o)
    }

    fn iri(n: &str) -> Term {
        Term::iri(format!("urn:t:{n}"))
    }

    #[test]
    fn transitive_chain() {
        let facts: Graph = (0..10).map(|i| t(&format!("n{i}"), "link", iri(&format!("n{}", i + 1)))).collect();
        let rules = doc("{?x :link ?y. ?y :link ?z} => {?x :link ?z}.");
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        assert_eq!(fb.facts.len(), 55);
        assert!(fb.iterations <= 11);
    }

    #[test]
    fn optional_keeps_unextended_rows() {
        let facts: Graph =
            [t("x1", "p", Term::integer(1)), t("x2", "q", Term::integer(2)), t("x3", "p", Term::integer(3))]
                .into_iter()
                .collect();
        let rules = doc("{{:x1 :p ?v} sin3:optional {{:x2 :q ?w} sin3:optional {:x3 :p ?v}}} => {:r :v ?v. :r :w ?w}.");
        let rows = match_premise(&rules[0].premise, &facts).unwrap();
        let expect: SolutionMapping =
            [(Variable::new("v"), Term::integer(1)), (Variable::new("w"), Term::unbound())].into_iter().collect();
        assert_eq!(rows, [expect].into());
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        assert!(fb.facts.contains(&Triple::new(iri("r"), iri("w"), Term::unbound())));
    }

    #[test]
    fn not_includes_after_lower_stratum() {
        let facts: Graph = [t("a", "r", iri("b")), t("c", "r", iri("d")), t("a", "p", iri("b"))].into_iter().collect();
        let rules = doc("{?x :p ?y} => {?x :q ?y}. \
             {?x :r ?y. ?__closure log:notIncludes {?x :q ?y}} => {?x :s ?y}.");
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        assert!(fb.facts.contains(&t("c", "s", iri("d"))));
        assert!(!fb.facts.contains(&t("a", "s", iri("b"))));
        assert_eq!(fb.strata, 2);
    }

    #[test]
    fn arithmetic_and_comparison() {
        let facts: Graph = [t("a", "v", Term::integer(2)), t("b", "v", Term::integer(5))].into_iter().collect();
        let rules = doc("{?x :v ?n. (?n 1) math:sum ?tmp_1. ?tmp_1 math:greaterThan 4} => {?x :big true}.");
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        let big: Vec<_> = fb.facts.iter().filter(|t| t.predicate == iri("big")).collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].subject, iri("b"));
    }

    #[test]
    fn union_and_bound_checks() {
        let facts: Graph = [t("a", "p", iri("x")), t("b", "q", iri("y"))].into_iter().collect();
        let rules =
            doc("{{?s :p ?o} sin3:union {?s :q ?o}. ?o log:notEqualTo sin3:unbound. ?m log:equalTo sin3:unbound} \
             => {?s :hit ?o}.");
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        assert!(fb.facts.contains(&t("a", "hit", iri("x"))));
        assert!(fb.facts.contains(&t("b", "hit", iri("y"))));
    }

    #[test]
    fn existentials_are_fresh_per_firing() {
        let facts: Graph = [t("a", "p", iri("x")), t("b", "p", iri("x"))].into_iter().collect();
        let rules = doc("{?s :p ?o} => {?s :has _:n. _:n :val ?o}.");
        let fb = saturate(&facts, &rules, &EngineConfig::default()).unwrap();
        let blanks: BTreeSet<_> =
            fb.facts.iter().filter(|t| t.predicate == iri("has")).map(|t| t.object.clone()).collect();
        assert_eq!(blanks.len(), 2);
    }

    #[test]
    fn iteration_cap() {
        let facts: Graph = [t("a", "p", iri("x"))].into_iter().collect();
        let rules = doc("{?s :p ?o} => {?o :p _:n}.");
        let cfg = EngineConfig { max_iterations: 20, trace: false };
        assert!(matches!(saturate(&facts, &rules, &cfg), Err(EngineError::IterationCap { cap: 20 })));
    }

    #[test]
    fn runtime_rules_are_skipped() {
        let rules = crate::translate::runtime_rules().rules;
        let fb = saturate(&Graph::new(), &rules, &EngineConfig::default()).unwrap();
        assert_eq!(fb.firings, 0);
    }
}
