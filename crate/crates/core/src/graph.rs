//! Dense simple graphs with bit-packed adjacency rows, plus the standard
//! constructions (union, join, complete multipartite, Turán graphs) and the
//! extremal family `K_{k-1} ∨ T_{n-k+1,r}`.

use std::fmt;

use crate::bits;
use crate::error::{Error, Result};

/// Largest vertex count a [`Graph`] may hold.
pub const MAX_VERTICES: usize = 1024;

/// An undirected simple graph on vertices `0..n`.
///
/// Row `v` is the neighbor set of `v`, packed into `words` 64-bit words.
/// Adjacency is kept symmetric and loop-free by every mutator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: MAX_VERTICES,
            });
        }
        let words = bits::words_for(n);
        Ok(Graph {
            n,
            words,
            rows: vec![0; n * words],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::new(n)?;
        let full = bits::full(n);
        for v in 0..n {
            let row = g.row_mut(v);
            row.copy_from_slice(&full);
            bits::remove(row, v);
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    /// `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges)
    }

    /// `t` triangles sharing vertex 0.
    pub fn friendship(t: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(3 * t);
        for i in 0..t {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            edges.extend([(0, a), (0, b), (a, b)]);
        }
        Graph::from_edges(2 * t + 1, &edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).expect("petersen graph is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Words per adjacency row.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    /// Packed neighbor set of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    fn row_mut(&mut self, v: usize) -> &mut [u64] {
        &mut self.rows[v * self.words..(v + 1) * self.words]
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::test(self.row(u), v)
    }

    /// Adds `uv`.
    ///
    /// # Panics
    /// Panics if `u == v` or either endpoint is out of range.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        bits::insert(self.row_mut(u), v);
        bits::insert(self.row_mut(v), u);
    }

    /// Removes `uv` if present.
    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        bits::remove(self.row_mut(u), v);
        bits::remove(self.row_mut(v), u);
    }

    /// Replaces the neighborhood of `v` by `set` (minus `v` itself),
    /// keeping the adjacency symmetric.
    pub fn set_neighborhood(&mut self, v: usize, set: &[u64]) {
        assert_eq!(set.len(), self.words);
        for u in 0..self.n {
            if u == v {
                continue;
            }
            if bits::test(set, u) {
                self.add_edge(u, v);
            } else {
                self.remove_edge(u, v);
            }
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits::ones(self.row(v))
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        bits::count(&self.rows) / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Missing pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| ((u + 1)..self.n).filter(move |&v| !self.has_edge(u, v)).map(move |v| (u, v)))
    }

    /// Number of neighbors of `v` inside the vertex set `set`.
    #[inline]
    pub fn degree_into(&self, v: usize, set: &[u64]) -> usize {
        bits::count_and(self.row(v), set)
    }

    pub fn complement(&self) -> Graph {
        let mut g = self.clone();
        let full = bits::full(self.n);
        for v in 0..self.n {
            let row = g.row_mut(v);
            for (w, f) in row.iter_mut().zip(&full) {
                *w = !*w & f;
            }
            bits::remove(row, v);
        }
        g
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![0u64; self.words];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if bits::test(&seen, s) {
                continue;
            }
            let mut comp = vec![s];
            bits::insert(&mut seen, s);
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for u in self.neighbors(v) {
                    if !bits::test(&seen, u) {
                        bits::insert(&mut seen, u);
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Induced subgraph on `keep`, relabeled `keep[i] -> i`.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        for &v in keep {
            self.check_vertex(v)?;
        }
        let mut g = Graph::new(keep.len())?;
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// Applies a relabeling: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::new(self.n).expect("same size");
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().collect();
        f.debug_struct("Graph").field("n", &self.n).field("edges", &edges).finish()
    }
}

/// Assignment of every vertex to one of `r` classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLabeling {
    r: usize,
    labels: Vec<usize>,
    class_sizes: Vec<usize>,
}

impl PartitionLabeling {
    pub fn new(r: usize, labels: Vec<usize>) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("a partition needs at least one class"));
        }
        let mut class_sizes = vec![0; r];
        for &l in &labels {
            if l >= r {
                return Err(Error::LabelOutOfRange { label: l, r });
            }
            class_sizes[l] += 1;
        }
        Ok(PartitionLabeling { r, labels, class_sizes })
    }

    /// Classes given as consecutive blocks of the listed sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
        PartitionLabeling::new(sizes.len(), labels)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// Members of each class, as packed sets over `n` vertices.
    pub fn class_sets(&self) -> Vec<Vec<u64>> {
        let words = bits::words_for(self.labels.len());
        let mut sets = vec![vec![0u64; words]; self.r];
        for (v, &l) in self.labels.iter().enumerate() {
            bits::insert(&mut sets[l], v);
        }
        sets
    }

    pub fn class_members(&self, class: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == class).collect()
    }

    /// Moves `v` to `class`.
    pub fn relabel(&mut self, v: usize, class: usize) {
        assert!(class < self.r);
        self.class_sizes[self.labels[v]] -= 1;
        self.labels[v] = class;
        self.class_sizes[class] += 1;
    }
}

/// `K_r(parts)`: vertices split into consecutive blocks; `uv` is an edge iff
/// the endpoints lie in different blocks.
pub fn complete_multipartite(parts: &[usize]) -> Result<Graph> {
    if parts.contains(&0) {
        return Err(Error::invalid("complete multipartite classes must be non-empty"));
    }
    let n: usize = parts.iter().sum();
    let mut g = Graph::complete(n)?;
    let mut start = 0;
    for &size in parts {
        for u in start..start + size {
            for v in (u + 1)..start + size {
                g.remove_edge(u, v);
            }
        }
        start += size;
    }
    Ok(g)
}

/// Class sizes of `T_{n,r}`: `n mod r` classes of `⌈n/r⌉`, then `⌊n/r⌋`.
/// Classes may be empty when `n < r`.
pub fn turan_parts(n: usize, r: usize) -> Result<Vec<usize>> {
    if r == 0 {
        return Err(Error::invalid("Turán graph needs r >= 1"));
    }
    let (q, rem) = (n / r, n % r);
    Ok((0..r).map(|i| if i < rem { q + 1 } else { q }).collect())
}

/// The Turán graph `T_{n,r}`.
pub fn turan(n: usize, r: usize) -> Result<Graph> {
    let parts: Vec<usize> = turan_parts(n, r)?.into_iter().filter(|&s| s > 0).collect();
    complete_multipartite(&parts)
}

/// Disjoint union with `h` placed after `g`.
pub fn disjoint_union(g: &Graph, h: &Graph) -> Result<Graph> {
    let mut out = Graph::new(g.n() + h.n())?;
    for (u, v) in g.edges() {
        out.add_edge(u, v);
    }
    let off = g.n();
    for (u, v) in h.edges() {
        out.add_edge(u + off, v + off);
    }
    Ok(out)
}

/// `g ∨ h`: disjoint union plus every edge between the two sides.
pub fn join(g: &Graph, h: &Graph) -> Result<Graph> {
    let mut out = disjoint_union(g, h)?;
    for u in 0..g.n() {
        for v in 0..h.n() {
            out.add_edge(u, g.n() + v);
        }
    }
    Ok(out)
}

/// `kG`. `k = 0` gives the empty graph.
pub fn disjoint_copies(g: &Graph, k: usize) -> Result<Graph> {
    let total = g.n().saturating_mul(k);
    let mut out = Graph::new(total)?;
    for c in 0..k {
        let off = c * g.n();
        for (u, v) in g.edges() {
            out.add_edge(u + off, v + off);
        }
    }
    Ok(out)
}

/// `G ∖ S`, with the old-to-new index map (`None` for deleted vertices).
pub fn delete_vertices(g: &Graph, remove: &[usize]) -> Result<(Graph, Vec<Option<usize>>)> {
    let mut drop = vec![false; g.n()];
    for &v in remove {
        g.check_vertex(v)?;
        drop[v] = true;
    }
    let keep: Vec<usize> = (0..g.n()).filter(|&v| !drop[v]).collect();
    let mut map = vec![None; g.n()];
    for (i, &v) in keep.iter().enumerate() {
        map[v] = Some(i);
    }
    Ok((g.induced(&keep)?, map))
}

/// `G[S]`.
pub fn induced_subgraph(g: &Graph, keep: &[usize]) -> Result<(Graph, Vec<Option<usize>>)> {
    let mut in_s = vec![false; g.n()];
    for &v in keep {
        g.check_vertex(v)?;
        in_s[v] = true;
    }
    let complement: Vec<usize> = (0..g.n()).filter(|&v| !in_s[v]).collect();
    delete_vertices(g, &complement)
}

/// Number of edges whose endpoints carry different labels.
pub fn crossing_edges(g: &Graph, p: &PartitionLabeling) -> Result<usize> {
    if p.labels().len() != g.n() {
        return Err(Error::invalid(format!(
            "partition labels {} vertices, graph has {}",
            p.labels().len(),
            g.n()
        )));
    }
    Ok(g.edges().filter(|&(u, v)| p.label(u) != p.label(v)).count())
}

/// `Σ_i e(V_i)`.
pub fn intra_class_edges(g: &Graph, p: &PartitionLabeling) -> Result<usize> {
    Ok(g.edge_count() - crossing_edges(g, p)?)
}

/// Structural role of a vertex in `K_{k-1} ∨ K_r(parts)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Dominating,
    Part(usize),
}

/// `K_{k-1} ∨ K_r(n_1, …, n_r)` together with its vertex roles.
///
/// Vertices `0..k-1` form the dominating clique, followed by the parts in order.
#[derive(Clone, Debug)]
pub struct DominatedMultipartite {
    pub graph: Graph,
    pub k: usize,
    pub parts: Vec<usize>,
    pub roles: Vec<Role>,
}

impl DominatedMultipartite {
    pub fn new(k: usize, parts: &[usize]) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let nonempty: Vec<usize> = parts.iter().copied().filter(|&s| s > 0).collect();
        let graph = join(&Graph::complete(k - 1)?, &complete_multipartite(&nonempty)?)?;
        let mut roles = vec![Role::Dominating; k - 1];
        for (i, &s) in parts.iter().enumerate() {
            roles.extend(std::iter::repeat_n(Role::Part(i), s));
        }
        Ok(DominatedMultipartite {
            graph,
            k,
            parts: parts.to_vec(),
            roles,
        })
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }
}

/// The conjectured extremal graph `K_{k-1} ∨ T_{n-k+1,r}`.
pub fn extremal_graph(n: usize, k: usize, r: usize) -> Result<DominatedMultipartite> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    if n + 1 < k {
        return Err(Error::invalid(format!("n = {n} is too small for k = {k}")));
    }
    DominatedMultipartite::new(k, &turan_parts(n + 1 - k, r)?)
}
