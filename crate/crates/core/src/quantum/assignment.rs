use crate::error::{input, Result};
use crate::netgraph::NetworkGraph;

/// Which two subsystems carry the link of every graph edge.
///
/// For edge `(i, j)` with `i < j`, the first subsystem is held by party `i`
/// and the second by party `j`. Every subsystem belongs to exactly one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeAssignment {
    graph: NetworkGraph,
    /// Indexed like `graph.edges()`.
    pairs: Vec<(usize, usize)>,
    dims: Vec<usize>,
}

impl EdgeAssignment {
    pub fn new(graph: NetworkGraph, pairs: Vec<(usize, usize)>, dims: &[usize]) -> Result<Self> {
        if pairs.len() != graph.edges().len() {
            return input(format!("{} subsystem pairs for {} edges", pairs.len(), graph.edges().len()));
        }
        let mut used = vec![false; dims.len()];
        for &(a, b) in &pairs {
            for s in [a, b] {
                if s >= dims.len() {
                    return input(format!("subsystem {s} out of range for {} subsystems", dims.len()));
                }
                if std::mem::replace(&mut used[s], true) {
                    return input(format!("subsystem {s} assigned to more than one edge end"));
                }
            }
            if dims[a] != dims[b] {
                return input(format!("edge subsystems {a} and {b} have dimensions {} and {}", dims[a], dims[b]));
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return input(format!("subsystem {s} is not assigned to any edge"));
        }
        Ok(Self { graph, pairs, dims: dims.to_vec() })
    }

    /// Edge `e` on subsystems `2e` (first endpoint) and `2e + 1`.
    pub fn edge_major(graph: NetworkGraph, d: usize) -> Result<Self> {
        let m = graph.edges().len();
        let pairs = (0..m).map(|e| (2 * e, 2 * e + 1)).collect();
        Self::new(graph, pairs, &vec![d; 2 * m])
    }

    /// Triangle with parties A, B, C each holding two subsystems, ordered
    /// `A1 A2 B1 B2 C1 C2`; links are `A2-B1`, `B2-C1` and `C2-A1`.
    pub fn triangle_party_major(d: usize) -> Result<Self> {
        // Edges of K3 in order (0,1), (0,2), (1,2); the first subsystem belongs to the smaller party.
        Self::new(NetworkGraph::triangle(), vec![(1, 2), (0, 5), (3, 4)], &[d; 6])
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Local dimension of edge `e`.
    pub fn edge_dim(&self, e: usize) -> usize {
        self.dims[self.pairs[e].0]
    }

    /// The common edge dimension, if all edges agree.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.edge_dim(0);
        (0..self.pairs.len()).all(|e| self.edge_dim(e) == d).then_some(d)
    }

    pub(crate) fn check(&self, dims: &[usize]) -> Result<()> {
        if dims != self.dims.as_slice() {
            return input(format!("state dims {dims:?} do not match the assignment's {:?}", self.dims));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        let t = EdgeAssignment::triangle_party_major(2).unwrap();
        assert_eq!(t.uniform_dim(), Some(2));
        let s = EdgeAssignment::edge_major(NetworkGraph::star(3).unwrap(), 3).unwrap();
        assert_eq!(s.pairs(), &[(0, 1), (2, 3), (4, 5)]);
        let mixed = EdgeAssignment::new(NetworkGraph::path(3).unwrap(), vec![(0, 1), (2, 3)], &[2, 2, 3, 3]).unwrap();
        assert_eq!(mixed.uniform_dim(), None);
    }

    #[test]
    fn inconsistent_assignments() {
        let g = NetworkGraph::path(3).unwrap();
        assert!(EdgeAssignment::new(g.clone(), vec![(0, 1)], &[2, 2]).is_err());
        assert!(EdgeAssignment::new(g.clone(), vec![(0, 1), (1, 2)], &[2, 2, 2]).is_err());
        assert!(EdgeAssignment::new(g.clone(), vec![(0, 1), (2, 3)], &[2, 2, 2, 3]).is_err());
        assert!(EdgeAssignment::new(g.clone(), vec![(0, 1), (2, 3)], &[2, 2, 2, 2, 2]).is_err());
        assert!(EdgeAssignment::new(g, vec![(0, 1), (2, 9)], &[2, 2, 2, 2]).is_err());
    }
}
