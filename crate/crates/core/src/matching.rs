//! Maximum cardinality matching in general graphs (Edmonds' blossom
//! algorithm, O(n^3)).

use std::collections::VecDeque;

use crate::instances::Graph;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        NONE
    }
}

/// Returns a maximum matching as a list of edges `(u, v)` with `u < v`.
pub fn maximum_matching(graph: &Graph) -> Vec<(usize, usize)> {
    let n = graph.n();
    let adj = graph.adjacency();
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    // greedy warm start
    for &(u, v) in graph.edges() {
        if b.mate[u] == NONE && b.mate[v] == NONE {
            b.mate[u] = v;
            b.mate[v] = u;
        }
    }
    for root in 0..n {
        if b.mate[root] != NONE {
            continue;
        }
        let mut v = b.find_path(root);
        while v != NONE {
            let pv = b.parent[v];
            let ppv = b.mate[pv];
            b.mate[v] = pv;
            b.mate[pv] = v;
            v = ppv;
        }
    }
    (0..n)
        .filter(|&u| b.mate[u] != NONE && u < b.mate[u])
        .map(|u| (u, b.mate[u]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate::gen_random_graph;
    use crate::rng::RngStream;

    fn brute_matching(graph: &Graph) -> usize {
        fn go(edges: &[(usize, usize)], used: u64) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(u, v), rest)) => {
                    let skip = go(rest, used);
                    if used & (1 << u) == 0 && used & (1 << v) == 0 {
                        skip.max(1 + go(rest, used | (1 << u) | (1 << v)))
                    } else {
                        skip
                    }
                }
            }
        }
        go(graph.edges(), 0)
    }

    fn is_matching(graph: &Graph, m: &[(usize, usize)]) -> bool {
        let mut seen = vec![false; graph.n()];
        m.iter().all(|&(u, v)| {
            let ok = graph.has_edge(u, v) && !seen[u] && !seen[v];
            seen[u] = true;
            seen[v] = true;
            ok
        })
    }

    #[test]
    fn small_cases() {
        let path5 = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(maximum_matching(&path5).len(), 2);
        let empty = Graph::new(4, vec![]).unwrap();
        assert!(maximum_matching(&empty).is_empty());
        // odd cycle with a pendant: needs blossom handling
        let c5 = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]).unwrap();
        assert_eq!(maximum_matching(&c5).len(), 3);
    }

    #[test]
    fn agrees_with_brute_force() {
        for seed in 0..300 {
            let mut rng = RngStream::new(seed, 0);
            let n = 2 + (seed as usize % 9);
            let g = gen_random_graph(n, 0.35, &mut rng).unwrap();
            let m = maximum_matching(&g);
            assert!(is_matching(&g, &m));
            assert_eq!(m.len(), brute_matching(&g), "seed {seed}");
        }
    }
}
