//! Network graphs and their global minimum cut.
//!
//! Graphs are simple, undirected, unit-weight and connected. The text format
//! is one `i j` edge per line with 0-indexed endpoints; blank lines and lines
//! starting with `#` are ignored, and the party count is the largest index
//! plus one.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{capacity, input, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkGraph {
    parties: usize,
    adjacency: Vec<Vec<bool>>,
    /// Sorted, each as `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
}

impl NetworkGraph {
    pub fn new(parties: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if parties < 2 {
            return input(format!("a network needs at least 2 parties, got {parties}"));
        }
        let mut adjacency = vec![vec![false; parties]; parties];
        for &(i, j) in edges {
            if i >= parties || j >= parties {
                return input(format!("edge ({i}, {j}) references a party outside 0..{parties}"));
            }
            if i == j {
                return input(format!("self-loop at party {i}"));
            }
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        Self::from_adjacency(adjacency)
    }

    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let n = adjacency.len();
        if n < 2 {
            return input(format!("a network needs at least 2 parties, got {n}"));
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return input(format!("adjacency row {i} has length {}, expected {n}", row.len()));
            }
            if row[i] {
                return input(format!("self-loop at party {i}"));
            }
            for j in 0..n {
                if row[j] != adjacency[j][i] {
                    return input(format!("adjacency is not symmetric at ({i}, {j})"));
                }
            }
        }
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| adjacency[i][j]).collect();
        let g = Self { parties: n, adjacency, edges };
        if !g.is_connected() {
            return input("network graph is disconnected");
        }
        Ok(g)
    }

    pub fn triangle() -> Self {
        Self::complete(3).expect("K3 is valid")
    }

    /// Center 0 joined to leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|j| (0, j)).collect();
        Self::new(leaves + 1, &edges)
    }

    pub fn complete(parties: usize) -> Result<Self> {
        let edges: Vec<_> = (0..parties).flat_map(|i| (i + 1..parties).map(move |j| (i, j))).collect();
        Self::new(parties, &edges)
    }

    pub fn path(parties: usize) -> Result<Self> {
        let edges: Vec<_> = (1..parties).map(|j| (j - 1, j)).collect();
        Self::new(parties, &edges)
    }

    pub fn cycle(parties: usize) -> Result<Self> {
        if parties < 3 {
            return input(format!("a cycle needs at least 3 parties, got {parties}"));
        }
        let mut edges: Vec<_> = (1..parties).map(|j| (j - 1, j)).collect();
        edges.push((0, parties - 1));
        Self::new(parties, &edges)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.parties && j < self.parties && self.adjacency[i][j]
    }

    /// Neighbors of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.parties).filter(|&j| self.adjacency[i][j]).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&b| b).count()
    }

    /// A copy with one more edge.
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push((i, j));
        Self::new(self.parties, &edges)
    }

    fn is_connected(&self) -> bool {
        connected_without(self, &[])
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(perr(format!("expected `i j`, got {line:?}"))),
            };
            let i: usize = a.parse().map_err(|_| perr(format!("bad vertex index {a:?}")))?;
            let j: usize = b.parse().map_err(|_| perr(format!("bad vertex index {b:?}")))?;
            max = max.max(i).max(j);
            edges.push((i, j));
        }
        if edges.is_empty() {
            return input("graph file contains no edges");
        }
        Self::new(max + 1, &edges)
    }

    pub fn to_text(&self) -> String {
        self.edges.iter().map(|(i, j)| format!("{i} {j}\n")).collect()
    }
}

impl fmt::Display for NetworkGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} E=[", self.parties)?;
        for (k, (i, j)) in self.edges.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}-{j}")?;
        }
        f.write_str("]")
    }
}

fn connected_without(g: &NetworkGraph, removed: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; g.parties];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..g.parties {
            if g.adjacency[u][v] && !seen[v] && !removed.contains(&(u.min(v), u.max(v))) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A bipartition `S | complement` with its crossing edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    /// Sorted members of `S`.
    pub subset: Vec<usize>,
    pub cut_set: Vec<(usize, usize)>,
    pub capacity: usize,
}

impl Cut {
    pub fn complement(&self, parties: usize) -> Vec<usize> {
        (0..parties).filter(|v| !self.subset.contains(v)).collect()
    }
}

/// Number of edges with exactly one endpoint in `subset`.
pub fn cut_capacity(g: &NetworkGraph, subset: &[usize]) -> Result<usize> {
    Ok(make_cut(g, subset)?.capacity)
}

fn make_cut(g: &NetworkGraph, subset: &[usize]) -> Result<Cut> {
    let mut inside = vec![false; g.parties];
    for &v in subset {
        if v >= g.parties {
            return input(format!("party {v} outside 0..{}", g.parties));
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == g.parties {
        return input("cut subset must be nonempty and proper");
    }
    let cut_set: Vec<_> = g.edges.iter().copied().filter(|&(i, j)| inside[i] != inside[j]).collect();
    Ok(Cut {
        subset: (0..g.parties).filter(|&v| inside[v]).collect(),
        capacity: cut_set.len(),
        cut_set,
    })
}

/// Global minimum cut by Stoer-Wagner contraction.
pub fn min_cut(g: &NetworkGraph) -> Result<Cut> {
    let n = g.parties;
    let mut w: Vec<Vec<u64>> = g.adjacency.iter().map(|r| r.iter().map(|&b| u64::from(b)).collect()).collect();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;

    while active.len() > 1 {
        // Maximum adjacency ordering over the active super-vertices.
        let mut added = vec![false; n];
        let mut conn = vec![0u64; n];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let next = if step == 0 {
                active[0]
            } else {
                *active.iter().filter(|&&v| !added[v]).max_by_key(|&&v| (conn[v], std::cmp::Reverse(v))).unwrap()
            };
            added[next] = true;
            prev = last;
            last = next;
            for &v in &active {
                if !added[v] {
                    conn[v] += w[next][v];
                }
            }
        }
        let cut_of_phase = active.iter().filter(|&&v| v != last).map(|&v| w[last][v]).sum::<u64>();
        if best.as_ref().is_none_or(|(c, _)| cut_of_phase < *c) {
            best = Some((cut_of_phase, groups[last].clone()));
        }
        // Merge `last` into `prev`.
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        active.retain(|&v| v != last);
    }

    let (_, subset) = best.expect("at least two parties");
    make_cut(g, &subset)
}

/// Largest party count accepted by [`min_cut_bruteforce`].
pub const BRUTEFORCE_MAX_PARTIES: usize = 20;

/// Exhaustive minimum over the `2^{N-1} - 1` bipartitions, scanning subsets
/// that contain party 0 in increasing bitmask order; the first minimum wins.
pub fn min_cut_bruteforce(g: &NetworkGraph) -> Result<Cut> {
    let n = g.parties;
    if n > BRUTEFORCE_MAX_PARTIES {
        return capacity(format!("brute-force min-cut limited to {BRUTEFORCE_MAX_PARTIES} parties, got {n}"));
    }
    let full = (1u32 << n) - 1;
    let mut best: Option<(usize, u32)> = None;
    for rest in 0..(1u32 << (n - 1)) {
        let mask = 1 | (rest << 1);
        if mask == full {
            continue;
        }
        let cap = g.edges.iter().filter(|&&(i, j)| ((mask >> i) & 1) != ((mask >> j) & 1)).count();
        if best.is_none_or(|(c, _)| cap < c) {
            best = Some((cap, mask));
        }
    }
    let (_, mask) = best.expect("n >= 2");
    let subset: Vec<usize> = (0..n).filter(|&v| (mask >> v) & 1 == 1).collect();
    make_cut(g, &subset)
}

/// True when removing `cut.cut_set` disconnects the graph.
pub fn cut_disconnects(g: &NetworkGraph, cut: &Cut) -> bool {
    !connected_without(g, &cut.cut_set)
}
