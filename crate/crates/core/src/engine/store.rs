use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::rdf::{Term, Triple};

/// Append-only triple store with per-position indexes. Facts keep their
/// insertion index, so a saturation round can address the facts added in
/// earlier rounds as a prefix of the store.
#[derive(Default)]
pub(crate) struct FactStore {
    triples: Vec<Triple>,
    set: HashSet<Triple>,
    by_s: HashMap<Term, Vec<u32>>,
    by_p: HashMap<Term, Vec<u32>>,
    by_o: HashMap<Term, Vec<u32>>,
}

pub(crate) enum Candidates<'a> {
    All(Range<usize>),
    Some(&'a [u32]),
}

impl FactStore {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut s = Self::new();
        for t in triples {
            s.insert(t);
        }
        s
    }

    pub(crate) fn insert(&mut self, t: Triple) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        let i = self.triples.len() as u32;
        self.by_s.entry(t.subject.clone()).or_default().push(i);
        self.by_p.entry(t.predicate.clone()).or_default().push(i);
        self.by_o.entry(t.object.clone()).or_default().push(i);
        self.set.insert(t.clone());
        self.triples.push(t);
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.triples.len()
    }

    pub(crate) fn get(&self, i: usize) -> &Triple {
        &self.triples[i]
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Indexes of facts that may match a pattern with the given bound
    /// positions. Callers still check each candidate.
    pub(crate) fn candidates(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Candidates<'_> {
        const EMPTY: &[u32] = &[];
        let mut best: Option<&[u32]> = None;
        for (key, map) in [(s, &self.by_s), (p, &self.by_p), (o, &self.by_o)] {
            if let Some(key) = key {
                match map.get(key) {
                    None => return Candidates::Some(EMPTY),
                    Some(v) if best.is_none_or(|b| v.len() < b.len()) => best = Some(v),
                    Some(_) => {}
                }
            }
        }
        match best {
            Some(v) => Candidates::Some(v),
            None => Candidates::All(0..self.triples.len()),
        }
    }
}
