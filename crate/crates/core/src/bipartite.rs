//! Maximum bipartite matching and the critical set of the left side.
//!
//! The critical set is the unique smallest subset of left vertices with
//! maximum deficiency `|X| - |N(X)|`. Given any maximum matching it is the set
//! of left vertices that are unmatched or reachable from an unmatched one by
//! an alternating path.

use std::collections::VecDeque;

/// Bipartite graph with left vertices `0..n_left` and right `0..n_right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_right: usize,
    adj: Vec<Vec<usize>>,
}

/// The graph of active edges in the strong solver.
pub type ActiveGraph = BipartiteGraph;

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph { n_right, adj: vec![Vec::new(); n_left] }
    }

    pub fn from_edges(n_left: usize, n_right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = BipartiteGraph::new(n_left, n_right);
        for (u, w) in edges {
            g.add_edge(u, w);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, w: usize) {
        assert!(w < self.n_right, "right vertex {w} out of range");
        if !self.adj[u].contains(&w) {
            self.adj[u].push(w);
        }
    }

    pub fn n_left(&self) -> usize {
        self.adj.len()
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.adj[u].contains(&w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl BipartiteMatching {
    pub fn empty(n_left: usize, n_right: usize) -> Self {
        BipartiteMatching { left: vec![None; n_left], right: vec![None; n_right] }
    }

    pub fn size(&self) -> usize {
        self.left.iter().flatten().count()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left.iter().enumerate().filter_map(|(u, w)| w.map(|w| (u, w)))
    }

    /// Removes the pair of left vertex `u`, if any.
    pub fn unmatch_left(&mut self, u: usize) {
        if let Some(w) = self.left[u].take() {
            self.right[w] = None;
        }
    }
}

/// Hopcroft-Karp. With `warm`, augmentation starts from that matching, which
/// must use only edges of `g`.
pub fn max_matching(g: &BipartiteGraph, warm: Option<&BipartiteMatching>) -> BipartiteMatching {
    let mut m = match warm {
        Some(w) => {
            debug_assert!(w.pairs().all(|(u, v)| g.has_edge(u, v)), "warm start uses a non-edge");
            w.clone()
        }
        None => BipartiteMatching::empty(g.n_left(), g.n_right()),
    };
    let n = g.n_left();
    let mut dist = vec![usize::MAX; n];
    loop {
        // layer the free left vertices and everything alternating from them
        let mut queue = VecDeque::new();
        for u in 0..n {
            if m.left[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &w in &g.adj[u] {
                match m.right[w] {
                    None => found = true,
                    Some(v) if dist[v] == usize::MAX => {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; n];
        for u in 0..n {
            if m.left[u].is_none() {
                augment(g, &mut m, &mut dist, &mut cursor, u);
            }
        }
    }
    m
}

/// Iterative layered DFS from free left vertex `root`.
fn augment(
    g: &BipartiteGraph,
    m: &mut BipartiteMatching,
    dist: &mut [usize],
    cursor: &mut [usize],
    root: usize,
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if cursor[u] == g.adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let w = g.adj[u][cursor[u]];
        cursor[u] += 1;
        match m.right[w] {
            None => {
                // flip the path: every stacked left vertex takes the woman it
                // is currently scanning
                for &v in stack.iter().rev() {
                    let target = g.adj[v][cursor[v] - 1];
                    m.left[v] = Some(target);
                    m.right[target] = Some(v);
                }
                return true;
            }
            Some(v) if dist[v] == dist[u] + 1 => stack.push(v),
            Some(_) => {}
        }
    }
    false
}

/// Left vertices unmatched in `m` or reachable from an unmatched one by an
/// alternating path. `m` must be a maximum matching of `g`.
pub fn critical_set_from(g: &BipartiteGraph, m: &BipartiteMatching) -> Vec<usize> {
    let n = g.n_left();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| m.left[u].is_none()).collect();
    for &u in &queue {
        seen[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &w in &g.adj[u] {
            let v = m.right[w].expect("maximum matching leaves no augmenting path");
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    (0..n).filter(|&u| seen[u]).collect()
}

pub fn critical_set(g: &BipartiteGraph) -> Vec<usize> {
    critical_set_from(g, &max_matching(g, None))
}

/// Deficiency of a set of left vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub set: Vec<usize>,
    pub neighborhood_size: usize,
    pub deficiency: isize,
}

pub fn deficiency(g: &BipartiteGraph, set: &[usize]) -> DeficiencyReport {
    let mut hit = vec![false; g.n_right()];
    for &u in set {
        for &w in &g.adj[u] {
            hit[w] = true;
        }
    }
    let neighborhood_size = hit.iter().filter(|&&h| h).count();
    DeficiencyReport {
        set: set.to_vec(),
        neighborhood_size,
        deficiency: set.len() as isize - neighborhood_size as isize,
    }
}
