use super::problem::{doubled_score, Problem, NONE};

struct Search<'a> {
    p: &'a Problem,
    /// Per slot: doubled gain from the pair alone.
    own: Vec<Vec<u64>>,
    /// Per slot: edges to variables earlier in the order.
    back: Vec<Vec<Vec<(u32, u32, u32)>>>,
    /// Per slot index order, best static gain first.
    order: Vec<Vec<usize>>,
    /// Upper bound on what variables v.. can still add.
    suffix: Vec<u64>,
    map: Vec<u32>,
    used: Vec<bool>,
    best: u64,
    best_map: Vec<u32>,
}

impl Search<'_> {
    fn dfs(&mut self, v: usize, current: u64) {
        if v == self.p.n_source {
            if current > self.best {
                self.best = current;
                self.best_map = self.map.clone();
            }
            return;
        }
        if current + self.suffix[v] <= self.best {
            return;
        }
        for k in 0..self.order[v].len() {
            let s = self.order[v][k];
            let c = self.p.cands[v][s];
            if self.used[c as usize] {
                continue;
            }
            let mut gain = self.own[v][s];
            for &(w, cw, n) in &self.back[v][s] {
                if self.map[w as usize] == cw {
                    gain += 2 * n as u64;
                }
            }
            self.map[v] = c;
            self.used[c as usize] = true;
            self.dfs(v + 1, current + gain);
            self.used[c as usize] = false;
            self.map[v] = NONE;
        }
        self.dfs(v + 1, current);
    }
}

/// Globally optimal mapping by branch and bound, starting from the bound
/// set by `initial`.
pub(crate) fn exact_search(p: &Problem, initial: Vec<u32>) -> (Vec<u32>, u64) {
    let n = p.n_source;
    let own: Vec<Vec<u64>> = p.node_gain.iter().map(|g| g.iter().map(|&x| 2 * x as u64).collect()).collect();
    let back: Vec<Vec<Vec<(u32, u32, u32)>>> = (0..n)
        .map(|v| {
            p.pairs[v]
                .iter()
                .map(|list| list.iter().copied().filter(|&(w, _, _)| (w as usize) < v).collect())
                .collect()
        })
        .collect();
    let static_gain = |v: usize, s: usize| -> u64 { own[v][s] + back[v][s].iter().map(|&(_, _, n)| 2 * n as u64).sum::<u64>() };
    let order: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut idx: Vec<usize> = (0..p.cands[v].len()).collect();
            idx.sort_by_key(|&s| std::cmp::Reverse(static_gain(v, s)));
            idx
        })
        .collect();
    let mut suffix = vec![0u64; n + 1];
    for v in (0..n).rev() {
        let ub = (0..p.cands[v].len()).map(|s| static_gain(v, s)).max().unwrap_or(0);
        suffix[v] = suffix[v + 1] + ub;
    }
    let best = doubled_score(p, &initial);
    let mut search = Search {
        p,
        own,
        back,
        order,
        suffix,
        map: vec![NONE; n],
        used: vec![false; p.n_target],
        best,
        best_map: initial,
    };
    search.dfs(0, 0);
    (search.best_map, search.best)
}
