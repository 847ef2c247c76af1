//! Smatch scoring of document graphs.
//!
//! Scores are computed from integer triple counts, so every result type is
//! generic over [`Scalar`]: floats for reporting, exact rationals for
//! checking equalities.

mod coref;
mod corpus;
mod exact;
mod problem;
mod search;
mod triples;

use std::time::{Duration, Instant};

pub use corpus::{score_corpus, CorpusResult};
pub use triples::{extract_triples, normalize_value, CorefItems, TripleSet};

use crate::scalar::{harmonic_mean, Scalar};
use crate::{Error, Result};
use problem::{build_problem, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Limit single-sentence variables to the same sentence.
    pub constrained: bool,
    /// Pairs whose graphs both have at most this many variables are aligned
    /// by exhaustive search instead of hill climbing.
    pub max_exact_nodes: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 4,
            seed: 0,
            constrained: false,
            max_exact_nodes: 10,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Usage("restarts must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Partial injective map from source variables to target variables, by
/// index into the respective [`TripleSet`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMapping {
    pub targets: Vec<Option<usize>>,
}

impl NodeMapping {
    fn from_raw(raw: &[u32]) -> Self {
        NodeMapping {
            targets: raw.iter().map(|&c| (c != NONE).then_some(c as usize)).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.targets.iter().enumerate().filter_map(|(v, c)| c.map(|c| (v, c)))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.pairs().all(|(_, c)| seen.insert(c))
    }

    pub fn named<'a>(&self, source: &'a TripleSet, target: &'a TripleSet) -> Vec<(&'a str, &'a str)> {
        self.pairs()
            .map(|(v, c)| (source.variables[v].as_str(), target.variables[c].as_str()))
            .collect()
    }
}

/// Raw counts behind a score; summed for corpus micro-averages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub matched: usize,
    pub source_triples: usize,
    pub target_triples: usize,
    pub coref_matched: usize,
    pub coref_source: usize,
    pub coref_target: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.matched += o.matched;
        self.source_triples += o.source_triples;
        self.target_triples += o.target_triples;
        self.coref_matched += o.coref_matched;
        self.coref_source += o.coref_source;
        self.coref_target += o.coref_target;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorefScore<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

/// Precision is measured against the source (predicted) graph, recall
/// against the target (gold) graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmatchResult<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub counts: Counts,
    pub coref: CorefScore<T>,
    pub restarts: usize,
    pub elapsed: Duration,
}

fn prf<T: Scalar>(matched: usize, source: usize, target: usize) -> (T, T, T) {
    let p = T::from_counts(matched, source);
    let r = T::from_counts(matched, target);
    (p, r, harmonic_mean(p, r))
}

impl<T: Scalar> SmatchResult<T> {
    pub fn from_counts(counts: Counts, restarts: usize) -> Self {
        let (precision, recall, f1) = prf(counts.matched, counts.source_triples, counts.target_triples);
        let (cp, cr, cf) = prf(counts.coref_matched, counts.coref_source, counts.coref_target);
        SmatchResult {
            precision,
            recall,
            f1,
            counts,
            coref: CorefScore {
                precision: cp,
                recall: cr,
                f1: cf,
            },
            restarts,
            elapsed: Duration::ZERO,
        }
    }
}

/// Candidate targets for each source variable.
pub fn candidate_pool(source: &TripleSet, target: &TripleSet, constrained: bool) -> Result<Vec<Vec<usize>>> {
    let p = build_problem(source, target, constrained)?;
    Ok(p.cands.into_iter().map(|cs| cs.into_iter().map(|c| c as usize).collect()).collect())
}

/// Matched triple count under an arbitrary mapping.
pub fn match_count(source: &TripleSet, target: &TripleSet, mapping: &NodeMapping) -> usize {
    coref::count_matches(source, target, mapping).0
}

pub fn counts_for(source: &TripleSet, target: &TripleSet, mapping: &NodeMapping) -> Counts {
    let (matched, coref_matched) = coref::count_matches(source, target, mapping);
    Counts {
        matched,
        source_triples: source.len(),
        target_triples: target.len(),
        coref_matched,
        coref_source: source.coref_items().count(),
        coref_target: target.coref_items().count(),
    }
}

pub fn coref_subscore<T: Scalar>(source: &TripleSet, target: &TripleSet, mapping: &NodeMapping) -> CorefScore<T> {
    let c = counts_for(source, target, mapping);
    let (precision, recall, f1) = prf(c.coref_matched, c.coref_source, c.coref_target);
    CorefScore { precision, recall, f1 }
}

fn finish<T: Scalar>(
    source: &TripleSet,
    target: &TripleSet,
    raw: &[u32],
    restarts: usize,
    start: Instant,
) -> (NodeMapping, SmatchResult<T>) {
    let mapping = NodeMapping::from_raw(raw);
    let mut result = SmatchResult::from_counts(counts_for(source, target, &mapping), restarts);
    result.elapsed = start.elapsed();
    (mapping, result)
}

pub fn hill_climb<T: Scalar>(
    source: &TripleSet,
    target: &TripleSet,
    config: &SearchConfig,
) -> Result<(NodeMapping, SmatchResult<T>)> {
    config.validate()?;
    let start = Instant::now();
    let p = build_problem(source, target, config.constrained)?;
    let (raw, score) = search::best_of_restarts(&p, source, target, config.restarts, config.seed);
    let out = finish(source, target, &raw, config.restarts, start);
    debug_assert_eq!(out.1.counts.matched as u64 * 2, score);
    Ok(out)
}

/// Globally optimal alignment. Fails when both graphs have more than
/// `config.max_exact_nodes` variables.
pub fn exact_match<T: Scalar>(
    source: &TripleSet,
    target: &TripleSet,
    config: &SearchConfig,
) -> Result<(NodeMapping, SmatchResult<T>)> {
    let smaller = source.variables.len().min(target.variables.len());
    if smaller > config.max_exact_nodes {
        return Err(Error::Usage(format!(
            "exact search limited to {} variables, graphs have {} and {}",
            config.max_exact_nodes,
            source.variables.len(),
            target.variables.len()
        )));
    }
    let start = Instant::now();
    let p = build_problem(source, target, config.constrained)?;
    let (seed_map, _) = search::climb(&p, search::smart_init(&p, source, target));
    let raw = if p.n_source <= p.n_target {
        exact::exact_search(&p, seed_map).0
    } else {
        let t = p.transposed();
        let mut init = vec![NONE; t.n_source];
        for (v, &c) in seed_map.iter().enumerate() {
            if c != NONE {
                init[c as usize] = v as u32;
            }
        }
        let (tmap, _) = exact::exact_search(&t, init);
        let mut raw = vec![NONE; p.n_source];
        for (c, &v) in tmap.iter().enumerate() {
            if v != NONE {
                raw[v as usize] = c as u32;
            }
        }
        raw
    };
    Ok(finish(source, target, &raw, 1, start))
}

/// Hill climbing, or exhaustive search when both graphs are small enough.
pub fn score_pair<T: Scalar>(
    source: &TripleSet,
    target: &TripleSet,
    config: &SearchConfig,
) -> Result<(NodeMapping, SmatchResult<T>)> {
    if source.variables.len().max(target.variables.len()) <= config.max_exact_nodes {
        let (m, mut r) = exact_match(source, target, config)?;
        r.restarts = config.restarts;
        Ok((m, r))
    } else {
        hill_climb(source, target, config)
    }
}

/// Number of candidate pairs; the quantity the sentence constraint shrinks.
pub fn pool_size(source: &TripleSet, target: &TripleSet, constrained: bool) -> Result<usize> {
    Ok(build_problem(source, target, constrained)?.pool_size())
}
