//! Graphs on the vertex set `{1, ..., n}` indexing the graph complexes.

use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`enumerate`].
pub const MAX_VERTICES: usize = 6;

/// A simple graph on `{1, ..., n}`; each edge `(i, j)` has `i < j` and the
/// edges are kept in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Which graphs of `G(n)` to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphFamily {
    /// All graphs.
    Full,
    /// No two edges share a target (the larger endpoint).
    NoDupTarget,
    /// At least two edges share a target.
    JFamily,
    /// No repeated target and vertex 1 isolated.
    HFamily,
}

impl GraphFamily {
    pub fn contains(self, g: &Graph) -> bool {
        match self {
            GraphFamily::Full => true,
            GraphFamily::NoDupTarget => !g.has_repeated_target(),
            GraphFamily::JFamily => g.has_repeated_target(),
            GraphFamily::HFamily => !g.has_repeated_target() && g.edges.iter().all(|&(i, _)| i != 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Full => "full",
            GraphFamily::NoDupTarget => "nodup",
            GraphFamily::JFamily => "j",
            GraphFamily::HFamily => "h",
        }
    }
}

impl Graph {
    pub fn discrete(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    /// Builds a graph from edges in any order; each edge must have `1 <= i < j <= n`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut e = edges.to_vec();
        e.sort();
        e.dedup();
        if e.len() != edges.len() {
            return Err(Error::Precondition("duplicate edge".into()));
        }
        if let Some(&(i, j)) = e.iter().find(|&&(i, j)| !(1 <= i && i < j && j <= n)) {
            return Err(Error::Precondition(format!("edge ({i},{j}) invalid on {n} vertices")));
        }
        Ok(Graph { n, edges: e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn has_repeated_target(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        for &(_, j) in &self.edges {
            if std::mem::replace(&mut seen[j], true) {
                return true;
            }
        }
        false
    }

    /// Connected components as sorted vertex lists, ordered by their
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while p[r] != r {
                r = p[r];
            }
            p[v] = r;
            r
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n + 1];
        for v in 1..=self.n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v);
        }
        comps
    }

    /// Number of components `l(G)`.
    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// For each vertex `1..=n`, the index of its component (entry 0 unused).
    pub fn component_index(&self) -> Vec<usize> {
        let mut idx = vec![usize::MAX; self.n + 1];
        for (s, c) in self.components().iter().enumerate() {
            for &v in c {
                idx[v] = s;
            }
        }
        idx
    }

    /// Inserts edge `(i, j)` into the exterior monomial `e_G`: `None` if the
    /// edge is already present, otherwise the new graph and the sign
    /// `(-1)^t`, `t` the number of edges after `(i, j)` lexicographically.
    pub fn add_edge(&self, i: usize, j: usize) -> Option<(Graph, i8)> {
        assert!(1 <= i && i < j && j <= self.n, "edge ({i},{j}) invalid on {} vertices", self.n);
        match self.edges.binary_search(&(i, j)) {
            Ok(_) => None,
            Err(pos) => {
                let mut edges = self.edges.clone();
                edges.insert(pos, (i, j));
                let after = self.edges.len() - pos;
                let sign = if after.is_multiple_of(2) { 1 } else { -1 };
                Some((Graph { n: self.n, edges }, sign))
            }
        }
    }

    /// Compact name such as `e23e34`, or `1` for the empty graph.
    pub fn monomial(&self) -> String {
        if self.edges.is_empty() {
            return "1".into();
        }
        self.edges.iter().map(|(i, j)| format!("e{i}{j}")).collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; {})", self.n, self.monomial())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.monomial())
    }
}

/// All graphs of a family on `n` vertices, ordered by edge count and then
/// lexicographically by edge list.
pub fn enumerate(n: usize, family: GraphFamily) -> Result<Vec<Graph>> {
    if !(1..=MAX_VERTICES).contains(&n) {
        return Err(Error::OutOfRange {
            n,
            min: 1,
            max: MAX_VERTICES,
        });
    }
    let all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    if matches!(family, GraphFamily::NoDupTarget | GraphFamily::HFamily) {
        // one choice of source (or none) per target vertex
        let first = if family == GraphFamily::HFamily { 2 } else { 1 };
        let mut choice = vec![0usize; n + 1];
        loop {
            let edges: Vec<(usize, usize)> = (2..=n).filter(|&j| choice[j] != 0).map(|j| (choice[j], j)).collect();
            out.push(Graph::new(n, &edges)?);
            let mut j = n;
            loop {
                if j < 2 {
                    out.sort_by(|a, b| (a.edge_count(), &a.edges).cmp(&(b.edge_count(), &b.edges)));
                    return Ok(out);
                }
                choice[j] = if choice[j] == 0 { first } else { choice[j] + 1 };
                if choice[j] < j {
                    break;
                }
                choice[j] = 0;
                j -= 1;
            }
        }
    }
    for mask in 0u32..(1u32 << all.len()) {
        let edges: Vec<(usize, usize)> = (0..all.len()).filter(|b| mask >> b & 1 == 1).map(|b| all[b]).collect();
        let g = Graph { n, edges };
        if family.contains(&g) {
            out.push(g);
        }
    }
    out.sort_by(|a, b| (a.edge_count(), &a.edges).cmp(&(b.edge_count(), &b.edges)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn family_sizes() {
        assert_eq!(enumerate(3, GraphFamily::Full).unwrap().len(), 8);
        for n in 1..=6 {
            assert_eq!(enumerate(n, GraphFamily::NoDupTarget).unwrap().len(), factorial(n));
            assert_eq!(enumerate(n, GraphFamily::HFamily).unwrap().len(), factorial(n - 1));
        }
        assert_eq!(enumerate(3, GraphFamily::JFamily).unwrap().len(), 2);
        assert!(enumerate(0, GraphFamily::Full).is_err());
        assert!(enumerate(7, GraphFamily::Full).is_err());
    }

    #[test]
    fn h_family_on_four_vertices() {
        let names: Vec<String> = enumerate(4, GraphFamily::HFamily).unwrap().iter().map(|g| g.monomial()).collect();
        assert_eq!(names, ["1", "e23", "e24", "e34", "e23e24", "e23e34"]);
    }

    #[test]
    fn full_partitions_into_j_and_nodup() {
        for n in 1..=5 {
            let full = enumerate(n, GraphFamily::Full).unwrap();
            let nodup = enumerate(n, GraphFamily::NoDupTarget).unwrap();
            let j = enumerate(n, GraphFamily::JFamily).unwrap();
            assert_eq!(full.len(), nodup.len() + j.len());
            assert!(nodup.iter().all(|g| !j.contains(g)));
        }
    }

    #[test]
    fn components_examples() {
        assert_eq!(Graph::discrete(3).components(), vec![vec![1], vec![2], vec![3]]);
        let g = Graph::new(4, &[(2, 3)]).unwrap();
        assert_eq!(g.components(), vec![vec![1], vec![2, 3], vec![4]]);
        assert_eq!(g.component_count(), 3);
    }

    #[test]
    fn forests_without_repeated_targets() {
        for n in 1..=6 {
            for g in enumerate(n, GraphFamily::NoDupTarget).unwrap() {
                assert_eq!(g.edge_count(), n - g.component_count(), "{g:?}");
            }
        }
    }

    #[test]
    fn add_edge_examples() {
        let g23 = Graph::new(4, &[(2, 3)]).unwrap();
        assert!(g23.add_edge(2, 3).is_none());
        let (g, s) = g23.add_edge(2, 4).unwrap();
        assert_eq!((g.monomial().as_str(), s), ("e23e24", 1));
        let g34 = Graph::new(4, &[(3, 4)]).unwrap();
        let (g, s) = g34.add_edge(2, 3).unwrap();
        assert_eq!((g.monomial().as_str(), s), ("e23e34", -1));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..=6).prop_flat_map(|n| {
            let all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            proptest::sample::subsequence(all.clone(), 0..=all.len()).prop_map(move |e| Graph::new(n, &e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn edge_insertions_anticommute(g in arb_graph(), a in 0usize..15, b in 0usize..15) {
            let n = g.n();
            let all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            let (e, f) = (all[a % all.len()], all[b % all.len()]);
            prop_assume!(e != f && !g.has_edge(e.0, e.1) && !g.has_edge(f.0, f.1));
            let (g1, s1) = g.add_edge(e.0, e.1).unwrap();
            let (h1, t1) = g1.add_edge(f.0, f.1).unwrap();
            let (g2, s2) = g.add_edge(f.0, f.1).unwrap();
            let (h2, t2) = g2.add_edge(e.0, e.1).unwrap();
            prop_assert_eq!(h1, h2);
            prop_assert_eq!(s1 * t1, -(s2 * t2));
        }

        #[test]
        fn components_partition_vertices(g in arb_graph()) {
            let comps = g.components();
            let mut all: Vec<usize> = comps.concat();
            all.sort();
            prop_assert_eq!(all, (1..=g.n()).collect::<Vec<_>>());
            let mins: Vec<usize> = comps.iter().map(|c| c[0]).collect();
            let mut sorted = mins.clone();
            sorted.sort();
            prop_assert_eq!(mins, sorted);
        }
    }
}
