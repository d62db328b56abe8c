//! Simple graphs, exact arboricity, and forest decompositions.

use crate::{Error, Result};

/// Caps for the exact searches: backtracking over edge assignments and the
/// density-bound enumeration over vertex subsets.
pub const MAX_EDGES_EXACT: usize = 25;
pub const MAX_VERTICES_EXACT: usize = 20;

/// Undirected simple graph. Edges are normalized to `u < v` and kept in
/// canonical sorted order; that order also numbers the edges wherever a
/// deterministic edge sequence is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Structure(format!("loop edge at vertex {a}")));
            }
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::Structure(format!(
                    "edge ({a},{b}) references a vertex ≥ {num_vertices}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structure("duplicate edge".into()));
        }
        Ok(Graph { num_vertices, edges: normalized })
    }

    /// Parses an edge list: one `u v` pair per line, 0-indexed. Blank lines
    /// and lines starting with `#` are skipped. The vertex count is the
    /// largest endpoint plus one.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max_vertex = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or_else(|| {
                    Error::Structure(format!("line {}: expected 'u v'", lineno + 1))
                })?
                .parse()
                .map_err(|_| Error::Structure(format!("line {}: expected 'u v'", lineno + 1)))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Structure(format!(
                    "line {}: trailing tokens after 'u v'",
                    lineno + 1
                )));
            }
            max_vertex = max_vertex.max(u).max(v);
            edges.push((u, v));
        }
        if edges.is_empty() {
            return Err(Error::Structure("empty edge list".into()));
        }
        Graph::new(max_vertex + 1, edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph { num_vertices: n, edges }
    }

    pub fn complete_bipartite(m: usize, n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..m {
            for v in 0..n {
                edges.push((u, m + v));
            }
        }
        edges.sort_unstable();
        Graph { num_vertices: m + n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n - 1));
        edges.sort_unstable();
        Graph { num_vertices: n, edges }
    }

    /// Wheel on `n` vertices: vertex 0 is the hub of a cycle on `1..n`.
    pub fn wheel(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        for v in 1..n - 1 {
            edges.push((v, v + 1));
        }
        edges.push((1, n - 1));
        edges.sort_unstable();
        edges.dedup();
        Graph { num_vertices: n, edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Exact arboricity: the minimum number of edge-disjoint forests whose
    /// union is the edge set. Computed by incremental backtracking for
    /// growing targets and certified against the Nash–Williams density bound
    /// `max_H ⌈m_H/(n_H−1)⌉` over connected induced subgraphs. The edgeless
    /// graph has arboricity zero; any nonempty forest has arboricity one.
    pub fn arboricity(&self) -> Result<u32> {
        if self.edges.is_empty() {
            return Ok(0);
        }
        self.check_exact_caps()?;
        let bound = self.nash_williams_bound()?;
        for k in 1.. {
            if self.try_forest_partition(k as usize).is_some() {
                assert_eq!(k, bound, "backtracking and density bound must agree");
                return Ok(k);
            }
        }
        unreachable!()
    }

    fn check_exact_caps(&self) -> Result<()> {
        if self.edges.len() > MAX_EDGES_EXACT {
            return Err(Error::SizeCap(format!(
                "{} edges exceed the exact-search cap of {MAX_EDGES_EXACT}",
                self.edges.len()
            )));
        }
        if self.num_vertices > MAX_VERTICES_EXACT {
            return Err(Error::SizeCap(format!(
                "{} vertices exceed the exact-search cap of {MAX_VERTICES_EXACT}",
                self.num_vertices
            )));
        }
        Ok(())
    }

    /// Nash–Williams lower bound, exact for these graph sizes: the maximum
    /// of `⌈m_H/(n_H−1)⌉` over connected induced subgraphs `H` with at least
    /// one edge.
    pub fn nash_williams_bound(&self) -> Result<u32> {
        self.check_exact_caps()?;
        let n = self.num_vertices;
        let mut best = 0u32;
        for subset in 1u32..(1u32 << n) {
            if subset.count_ones() < 2 {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&v| subset >> v & 1 == 1).collect();
            let mut uf = UnionFind::new(members.len());
            let position = |v: usize| members.binary_search(&v).ok();
            let mut m_h = 0usize;
            for &(u, v) in &self.edges {
                if let (Some(pu), Some(pv)) = (position(u), position(v)) {
                    m_h += 1;
                    uf.union(pu, pv);
                }
            }
            if m_h == 0 || uf.num_components() != 1 {
                continue;
            }
            let density = m_h.div_ceil(members.len() - 1) as u32;
            best = best.max(density);
        }
        Ok(best)
    }

    /// Partitions the edges into exactly `k` forests (some possibly empty),
    /// deterministically: edges in canonical order, forests tried in index
    /// order, a new forest opened only after all earlier ones. Errors when
    /// `k` is below the arboricity.
    pub fn forest_decomposition(&self, k: usize) -> Result<Vec<Vec<(usize, usize)>>> {
        if self.edges.is_empty() {
            return Ok(vec![Vec::new(); k]);
        }
        self.check_exact_caps()?;
        if k == 0 {
            return Err(Error::Infeasible("cannot cover edges with zero forests".into()));
        }
        match self.try_forest_partition(k) {
            Some(assignment) => {
                let mut forests = vec![Vec::new(); k];
                for (e, &(u, v)) in self.edges.iter().enumerate() {
                    forests[assignment[e]].push((u, v));
                }
                Ok(forests)
            }
            None => Err(Error::Infeasible(format!(
                "no partition into {k} forests exists (arboricity exceeds {k})"
            ))),
        }
    }

    /// First edge→forest assignment found by deterministic backtracking, or
    /// `None` when no `k`-forest partition exists.
    fn try_forest_partition(&self, k: usize) -> Option<Vec<usize>> {
        let mut assignment = vec![usize::MAX; self.edges.len()];
        let mut forests: Vec<UnionFind> =
            (0..k).map(|_| UnionFind::new(self.num_vertices)).collect();
        if self.backtrack(0, k, &mut assignment, &mut forests) {
            Some(assignment)
        } else {
            None
        }
    }

    fn backtrack(
        &self,
        edge: usize,
        k: usize,
        assignment: &mut Vec<usize>,
        forests: &mut Vec<UnionFind>,
    ) -> bool {
        if edge == self.edges.len() {
            return true;
        }
        let (u, v) = self.edges[edge];
        // Symmetry breaking: an edge may only open the first unused forest.
        let used = assignment[..edge].iter().filter(|a| **a != usize::MAX).map(|a| *a + 1).max();
        let limit = used.unwrap_or(0).min(k - 1);
        for f in 0..=limit {
            if forests[f].find(u) == forests[f].find(v) {
                continue; // would close a cycle
            }
            let snapshot = forests[f].clone();
            forests[f].union(u, v);
            assignment[edge] = f;
            if self.backtrack(edge + 1, k, assignment, forests) {
                return true;
            }
            assignment[edge] = usize::MAX;
            forests[f] = snapshot;
        }
        false
    }

    /// Checks that an edge set is acyclic.
    pub fn is_forest(&self, edges: &[(usize, usize)]) -> bool {
        let mut uf = UnionFind::new(self.num_vertices);
        for &(u, v) in edges {
            if uf.find(u) == uf.find(v) {
                return false;
            }
            uf.union(u, v);
        }
        true
    }
}

/// Union-find with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when the two elements were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn num_components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_arboricities() {
        assert_eq!(Graph::complete(5).arboricity().unwrap(), 3);
        assert_eq!(Graph::complete_bipartite(3, 3).arboricity().unwrap(), 2);
        assert_eq!(Graph::wheel(5).arboricity().unwrap(), 2);
        assert_eq!(Graph::cycle(5).arboricity().unwrap(), 2);
        assert_eq!(Graph::complete(4).arboricity().unwrap(), 2);
        assert_eq!(Graph::cycle(3).arboricity().unwrap(), 2);
    }

    #[test]
    fn forests_and_the_empty_graph() {
        // A path is a single forest.
        let path = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.arboricity().unwrap(), 1);
        let empty = Graph::new(3, vec![]).unwrap();
        assert_eq!(empty.arboricity().unwrap(), 0);
    }

    #[test]
    fn wheel_structure() {
        let w5 = Graph::wheel(5);
        assert_eq!(w5.num_vertices(), 5);
        assert_eq!(w5.num_edges(), 8);
    }

    #[test]
    fn decomposition_of_the_five_cycle() {
        let c5 = Graph::cycle(5);
        let forests = c5.forest_decomposition(2).unwrap();
        assert_eq!(forests.len(), 2);
        assert_eq!(forests[0].len() + forests[1].len(), 5);
        assert!(c5.is_forest(&forests[0]));
        assert!(c5.is_forest(&forests[1]));
        assert_eq!(forests[1].len(), 1);
    }

    #[test]
    fn k5_needs_three_forests() {
        let k5 = Graph::complete(5);
        assert!(matches!(k5.forest_decomposition(2), Err(Error::Infeasible(_))));
        let forests = k5.forest_decomposition(3).unwrap();
        assert_eq!(forests.iter().map(Vec::len).sum::<usize>(), 10);
        for f in &forests {
            assert!(k5.is_forest(f));
        }
    }

    #[test]
    fn decomposition_is_deterministic() {
        let w5 = Graph::wheel(5);
        assert_eq!(w5.forest_decomposition(2).unwrap(), w5.forest_decomposition(2).unwrap());
    }

    #[test]
    fn nash_williams_matches_known_values() {
        assert_eq!(Graph::complete(5).nash_williams_bound().unwrap(), 3);
        assert_eq!(Graph::complete_bipartite(3, 3).nash_williams_bound().unwrap(), 2);
        assert_eq!(Graph::wheel(5).nash_williams_bound().unwrap(), 2);
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::parse_edge_list("0 1\n1 2\n\n# comment\n2 0\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!(Graph::parse_edge_list("0\n").is_err());
        assert!(Graph::parse_edge_list("0 0\n").is_err());
        assert!(Graph::parse_edge_list("").is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let big = Graph::complete(8); // 28 edges > 25
        assert!(matches!(big.arboricity(), Err(Error::SizeCap(_))));
    }
}
