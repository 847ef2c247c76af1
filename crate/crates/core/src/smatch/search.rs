use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::problem::{doubled_score, Problem, NONE};
use super::triples::TripleSet;

/// Sorted incident role labels per variable, outgoing flagged `true`.
fn signature(set: &TripleSet) -> Vec<Vec<(bool, &str)>> {
    let mut sig = vec![Vec::new(); set.variables.len()];
    for (s, role, t) in &set.relations {
        sig[*s].push((true, role.as_str()));
        sig[*t].push((false, role.as_str()));
    }
    for (v, role, _) in &set.attributes {
        sig[*v].push((true, role.as_str()));
    }
    for s in &mut sig {
        s.sort_unstable();
    }
    sig
}

/// Initial mapping: each source variable takes an unused candidate with the
/// same concept, preferring the largest overlap of incident role labels,
/// then identical provenance, then the lowest target index.
pub(crate) fn smart_init(p: &Problem, source: &TripleSet, target: &TripleSet) -> Vec<u32> {
    let (ss, ts) = (signature(source), signature(target));
    let overlap = |a: &[(bool, &str)], b: &[(bool, &str)]| {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    };

    let mut used = vec![false; p.n_target];
    let mut map = vec![NONE; p.n_source];
    for v in 0..p.n_source {
        let mut best: Option<(usize, bool, u32)> = None;
        for &c in &p.cands[v] {
            let ci = c as usize;
            if used[ci] || source.concepts[v] != target.concepts[ci] {
                continue;
            }
            let key = (overlap(&ss[v], &ts[ci]), source.provenance[v] == target.provenance[ci], c);
            if best.is_none_or(|b| (key.0, key.1) > (b.0, b.1)) {
                best = Some(key);
            }
        }
        if let Some((_, _, c)) = best {
            map[v] = c;
            used[c as usize] = true;
        }
    }
    map
}

pub(crate) fn random_init(p: &Problem, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = vec![false; p.n_target];
    let mut map = vec![NONE; p.n_source];
    for (slot, cands) in map.iter_mut().zip(&p.cands) {
        let free: Vec<u32> = cands.iter().copied().filter(|&c| !used[c as usize]).collect();
        if let Some(&c) = free.choose(&mut rng) {
            *slot = c;
            used[c as usize] = true;
        }
    }
    map
}

struct Climb<'a> {
    p: &'a Problem,
    map: Vec<u32>,
    slot: Vec<u32>,
    owner: Vec<u32>,
}

impl Climb<'_> {
    /// Doubled gain of `v` at slot `s`, with the mapping of the variables in
    /// `ov` overridden. Edges to an overridden variable count once, since
    /// the other end is summed separately.
    fn local(&self, v: usize, s: u32, ov: &[(usize, u32)]) -> i64 {
        if s == NONE {
            return 0;
        }
        let s = s as usize;
        let mut g = 2 * self.p.node_gain[v][s] as i64;
        for &(w, cw, n) in &self.p.pairs[v][s] {
            let w = w as usize;
            match ov.iter().find(|(x, _)| *x == w) {
                Some(&(_, m)) => {
                    if m == cw {
                        g += n as i64;
                    }
                }
                None => {
                    if self.map[w] == cw {
                        g += 2 * n as i64;
                    }
                }
            }
        }
        g
    }

    fn assign(&mut self, v: usize, c: u32) {
        let old = self.map[v];
        if old != NONE && self.owner[old as usize] == v as u32 {
            self.owner[old as usize] = NONE;
        }
        self.map[v] = c;
        if c == NONE {
            self.slot[v] = NONE;
        } else {
            self.slot[v] = self.p.slot(v, c).map_or(NONE, |s| s as u32);
            self.owner[c as usize] = v as u32;
        }
    }

    /// Steepest ascent until no move strictly improves the score.
    fn run(&mut self) {
        let p = self.p;
        loop {
            let mut best: Option<(i64, usize, u32)> = None;
            for v in 0..p.n_source {
                let base = self.local(v, self.slot[v], &[]);
                for (s, &c) in p.cands[v].iter().enumerate() {
                    if self.map[v] == c {
                        continue;
                    }
                    let u = self.owner[c as usize];
                    let delta = if u == NONE {
                        self.local(v, s as u32, &[]) - base
                    } else {
                        let u = u as usize;
                        let back = self.map[v];
                        let u_slot = if back == NONE {
                            NONE
                        } else {
                            p.slot(u, back).map_or(NONE, |x| x as u32)
                        };
                        let u_target = if u_slot == NONE { NONE } else { back };
                        let before = [(v, self.map[v]), (u, self.map[u])];
                        let after = [(v, c), (u, u_target)];
                        self.local(v, s as u32, &after) + self.local(u, u_slot, &after)
                            - self.local(v, self.slot[v], &before)
                            - self.local(u, self.slot[u], &before)
                    };
                    if delta > 0 && best.is_none_or(|b| delta > b.0) {
                        best = Some((delta, v, c));
                    }
                }
            }
            let Some((_, v, c)) = best else { break };
            let u = self.owner[c as usize];
            if u != NONE {
                let u = u as usize;
                let back = self.map[v];
                let keep = back != NONE && p.slot(u, back).is_some();
                self.assign(u, NONE);
                self.assign(v, c);
                if keep {
                    self.assign(u, back);
                }
            } else {
                self.assign(v, c);
            }
        }
    }
}

/// Climbs from `init`; returns the local optimum and its doubled score.
pub(crate) fn climb(p: &Problem, init: Vec<u32>) -> (Vec<u32>, u64) {
    let mut owner = vec![NONE; p.n_target];
    let mut slot = vec![NONE; p.n_source];
    for (v, &c) in init.iter().enumerate() {
        if c != NONE {
            owner[c as usize] = v as u32;
            slot[v] = p.slot(v, c).expect("initial mapping inside the pool") as u32;
        }
    }
    let mut state = Climb { p, map: init, slot, owner };
    state.run();
    let score = doubled_score(p, &state.map);
    (state.map, score)
}

/// Best local optimum over `restarts` runs: the first from the smart
/// initialization, run `r` from a random start seeded with `seed + r`.
pub(crate) fn best_of_restarts(
    p: &Problem,
    source: &TripleSet,
    target: &TripleSet,
    restarts: usize,
    seed: u64,
) -> (Vec<u32>, u64) {
    let mut best = climb(p, smart_init(p, source, target));
    for r in 1..restarts {
        let candidate = climb(p, random_init(p, seed.wrapping_add(r as u64)));
        if candidate.1 > best.1 {
            best = candidate;
        }
    }
    best
}
