use std::collections::HashMap;

use super::triples::TripleSet;
use crate::{Error, Result};

pub(crate) const NONE: u32 = u32::MAX;

/// Candidate pool plus the triple gains each candidate pair can earn.
///
/// Gains between two pairs are stored on both slots, so a pair edge counts
/// twice when summed over every mapped variable; scores computed from this
/// structure are doubled counts.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub n_source: usize,
    pub n_target: usize,
    /// Sorted target candidates per source variable.
    pub cands: Vec<Vec<u32>>,
    /// Matches earned by the pair alone (instance, attributes, self-loops).
    pub node_gain: Vec<Vec<u32>>,
    /// Per slot: (other source var, its target, matched edges).
    pub pairs: Vec<Vec<Vec<(u32, u32, u32)>>>,
}

impl Problem {
    pub fn slot(&self, v: usize, c: u32) -> Option<usize> {
        self.cands[v].binary_search(&c).ok()
    }

    pub fn pool_size(&self) -> usize {
        self.cands.iter().map(Vec::len).sum()
    }

    /// The same problem with the roles of source and target exchanged.
    pub fn transposed(&self) -> Problem {
        let mut cands = vec![Vec::new(); self.n_target];
        for (v, cs) in self.cands.iter().enumerate() {
            for &c in cs {
                cands[c as usize].push(v as u32);
            }
        }
        let mut t = Problem {
            n_source: self.n_target,
            n_target: self.n_source,
            node_gain: cands.iter().map(|cs| vec![0; cs.len()]).collect(),
            pairs: cands.iter().map(|cs| vec![Vec::new(); cs.len()]).collect(),
            cands,
        };
        for (v, cs) in self.cands.iter().enumerate() {
            for (s, &c) in cs.iter().enumerate() {
                let ts = t.slot(c as usize, v as u32).unwrap();
                t.node_gain[c as usize][ts] = self.node_gain[v][s];
                t.pairs[c as usize][ts] = self.pairs[v][s].iter().map(|&(w, cw, n)| (cw, w, n)).collect();
            }
        }
        t
    }
}

/// Builds the pool: a source variable may map to any target variable with
/// which it could share a matched triple. When `constrained`, a variable
/// from exactly one sentence is further limited to target variables
/// covering that sentence.
pub(crate) fn build_problem(source: &TripleSet, target: &TripleSet, constrained: bool) -> Result<Problem> {
    if constrained && source.sentence_count != target.sentence_count {
        return Err(Error::Usage(format!(
            "constrained matching needs equal sentence counts, got {} and {}",
            source.sentence_count, target.sentence_count
        )));
    }
    let allowed = |v: usize, c: usize| -> bool {
        if !constrained || source.provenance[v].len() != 1 {
            return true;
        }
        let i = source.provenance[v].first().unwrap();
        target.provenance[c].contains(i)
    };

    let mut node: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pair: HashMap<(u32, u32), HashMap<(u32, u32), u32>> = HashMap::new();

    let mut by_concept: HashMap<&str, Vec<usize>> = HashMap::new();
    for (c, concept) in target.concepts.iter().enumerate() {
        by_concept.entry(concept).or_default().push(c);
    }
    for (v, concept) in source.concepts.iter().enumerate() {
        for &c in by_concept.get(concept.as_str()).into_iter().flatten() {
            if allowed(v, c) {
                *node.entry((v as u32, c as u32)).or_default() += 1;
            }
        }
    }

    let mut by_attr: HashMap<(&str, &str), Vec<usize>> = HashMap::new();
    for (c, role, value) in &target.attributes {
        by_attr.entry((role, value)).or_default().push(*c);
    }
    for (v, role, value) in &source.attributes {
        for &c in by_attr.get(&(role.as_str(), value.as_str())).into_iter().flatten() {
            if allowed(*v, c) {
                *node.entry((*v as u32, c as u32)).or_default() += 1;
            }
        }
    }

    let mut by_role: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
    for (t1, role, t2) in &target.relations {
        by_role.entry(role).or_default().push((*t1, *t2));
    }
    for (s1, role, s2) in &source.relations {
        let (s1, s2) = (*s1, *s2);
        for &(t1, t2) in by_role.get(role.as_str()).into_iter().flatten() {
            if (s1 == s2) != (t1 == t2) || !allowed(s1, t1) || !allowed(s2, t2) {
                continue;
            }
            let a = (s1 as u32, t1 as u32);
            let b = (s2 as u32, t2 as u32);
            if s1 == s2 {
                *node.entry(a).or_default() += 1;
            } else {
                node.entry(a).or_default();
                node.entry(b).or_default();
                *pair.entry(a).or_default().entry(b).or_default() += 1;
                *pair.entry(b).or_default().entry(a).or_default() += 1;
            }
        }
    }

    let mut cands = vec![Vec::new(); source.variables.len()];
    for &(v, c) in node.keys() {
        cands[v as usize].push(c);
    }
    for cs in &mut cands {
        cs.sort_unstable();
    }
    let mut p = Problem {
        n_source: source.variables.len(),
        n_target: target.variables.len(),
        node_gain: cands.iter().map(|cs| vec![0; cs.len()]).collect(),
        pairs: cands.iter().map(|cs| vec![Vec::new(); cs.len()]).collect(),
        cands,
    };
    for (&(v, c), &g) in &node {
        let s = p.slot(v as usize, c).unwrap();
        p.node_gain[v as usize][s] = g;
    }
    for ((v, c), others) in pair {
        let s = p.slot(v as usize, c).unwrap();
        let mut list: Vec<(u32, u32, u32)> = others.into_iter().map(|((w, cw), n)| (w, cw, n)).collect();
        list.sort_unstable();
        p.pairs[v as usize][s] = list;
    }
    Ok(p)
}

/// Doubled number of matched triples under `map` (source var -> target).
pub(crate) fn doubled_score(p: &Problem, map: &[u32]) -> u64 {
    let mut total = 0u64;
    for (v, &c) in map.iter().enumerate() {
        if c == NONE {
            continue;
        }
        let s = p.slot(v, c).expect("mapping stays inside the pool");
        total += 2 * p.node_gain[v][s] as u64;
        for &(w, cw, n) in &p.pairs[v][s] {
            if map[w as usize] == cw {
                total += n as u64;
            }
        }
    }
    total
}
