//! The directed graph G(I) on swept divisors.

use crate::catalog::Catalog;

/// Vertices are divisor ids N(I); an edge D -> D' exists when some curve of I sweeping D
/// pairs positively with D'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn build_graph(cat: &Catalog, ids: &[usize]) -> SweepGraph {
    let mut vertices: Vec<usize> = ids.iter().map(|&c| cat.curves[c].swept).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let mut edges = Vec::new();
    for &d in &vertices {
        for &d2 in &vertices {
            if ids
                .iter()
                .any(|&c| cat.curves[c].swept == d && cat.pair(d2, c) > 0)
            {
                edges.push((d, d2));
            }
        }
    }
    SweepGraph { vertices, edges }
}

impl SweepGraph {
    fn index(&self, d: usize) -> usize {
        self.vertices.binary_search(&d).expect("vertex")
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[self.index(a)].push(self.index(b));
        }
        adj
    }

    fn reach(&self, adj: &[Vec<usize>], from: usize) -> Vec<bool> {
        let mut seen = vec![false; adj.len()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Every vertex lies on some directed cycle.
    pub fn every_vertex_on_cycle(&self) -> bool {
        let adj = self.adjacency();
        (0..adj.len()).all(|v| self.reach(&adj, v)[v])
    }

    pub fn strongly_connected(&self) -> bool {
        let adj = self.adjacency();
        (0..adj.len()).all(|v| {
            let r = self.reach(&adj, v);
            (0..adj.len()).all(|w| w == v || r[w])
        })
    }

    /// The graph is a single Hamiltonian directed cycle and has no other directed cycle.
    pub fn is_single_hamiltonian_cycle(&self) -> bool {
        let n = self.vertices.len();
        if n < 2 || self.edges.len() != n {
            return false;
        }
        let adj = self.adjacency();
        let mut indeg = vec![0; n];
        for a in &adj {
            if a.len() != 1 {
                return false;
            }
            indeg[a[0]] += 1;
        }
        indeg.iter().all(|&d| d == 1) && self.strongly_connected()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_on_m06() {
        let cat = Catalog::standard(6).unwrap();
        let i = [
            cat.curve_id("e23").unwrap(),
            cat.curve_id("l-e1-e23").unwrap(),
        ];
        let g = build_graph(&cat, &i);
        let e23 = cat.divisor_id("E23").unwrap();
        let d123 = cat.divisor_id("Delta123").unwrap();
        let mut expect = vec![(e23, d123), (d123, e23)];
        expect.sort_unstable();
        let mut got = g.edges.clone();
        got.sort_unstable();
        assert_eq!(got, expect);
        assert!(g.is_single_hamiltonian_cycle());
    }

    #[test]
    fn single_vertex_has_no_edges() {
        let cat = Catalog::standard(6).unwrap();
        let g = build_graph(&cat, &[cat.curve_id("e12").unwrap()]);
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
        assert!(!g.every_vertex_on_cycle());
    }

    #[test]
    fn two_cycle_on_m05() {
        let cat = Catalog::standard(5).unwrap();
        let i = [
            cat.curve_id("e0").unwrap(),
            cat.curve_id("l-e0-e1").unwrap(),
        ];
        assert!(build_graph(&cat, &i).is_single_hamiltonian_cycle());
    }
}
