//! Reference implementations used only by tests. Each one is written from
//! definitions and shares no code with the library beyond the `Graph` type.
#![allow(dead_code)]

use nalgebra::DMatrix;
use turan_core::Graph;

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    DMatrix::from_fn(n, n, |i, j| if i != j && g.has_edge(i, j) { 1.0 } else { 0.0 })
}

/// Largest adjacency eigenvalue from a dense symmetric eigensolver.
pub fn dense_rho(g: &Graph) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    adjacency(g).symmetric_eigen().eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Perron vector scaled to max entry 1, from the dense solver.
pub fn dense_perron(g: &Graph) -> (f64, Vec<f64>) {
    let e = adjacency(g).symmetric_eigen();
    let (i, &rho) = e
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let col: Vec<f64> = e.eigenvectors.column(i).iter().copied().collect();
    let m = col.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    (rho, col.iter().map(|x| x / m).collect())
}

/// Largest eigenvalue of a general square matrix given by rows.
pub fn dense_matrix_rho(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn combinations(n: usize, s: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == s {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        combinations(n, s, v + 1, cur, out);
        cur.pop();
    }
}

/// Every `s`-subset of vertices that induces a complete graph.
pub fn naive_cliques(g: &Graph, s: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    combinations(g.n(), s, 0, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|c| c.iter().enumerate().all(|(i, &a)| c[i + 1..].iter().all(|&b| g.has_edge(a, b))))
        .collect()
}

/// Whether some `k` of the `(r+1)`-cliques are pairwise disjoint, by trying
/// every `k`-subset of the clique list.
pub fn naive_has_packing(g: &Graph, k: usize, r: usize) -> bool {
    let cliques: Vec<u128> = naive_cliques(g, r + 1)
        .iter()
        .map(|c| c.iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    fn choose(cl: &[u128], from: usize, left: usize, used: u128) -> bool {
        if left == 0 {
            return true;
        }
        (from..cl.len()).any(|i| cl[i] & used == 0 && choose(cl, i + 1, left - 1, used | cl[i]))
    }
    choose(&cliques, 0, k, 0)
}

/// Maximum matching size by trying every edge subset recursively.
pub fn brute_matching(g: &Graph) -> usize {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    fn go(e: &[(usize, usize)], i: usize, used: u128) -> usize {
        if i == e.len() {
            return 0;
        }
        let skip = go(e, i + 1, used);
        let (u, v) = e[i];
        if used >> u & 1 == 0 && used >> v & 1 == 0 {
            skip.max(1 + go(e, i + 1, used | 1 << u | 1 << v))
        } else {
            skip
        }
    }
    go(&edges, 0, 0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap(n, &mut p, &mut out);
    out
}

fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, p, out);
        let j = if k % 2 == 0 { i } else { 0 };
        p.swap(j, k - 1);
    }
}

/// Adjacency as a bit string over pairs `(i, j)`, `i < j`, in a fixed order.
fn pair_bits(g: &Graph, relabel: &[usize]) -> u64 {
    let n = g.n();
    let mut pos = vec![0; n];
    for (v, &p) in relabel.iter().enumerate() {
        pos[v] = p;
    }
    let mut code = 0u64;
    for (u, v) in g.edges() {
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        code |= 1 << (b * (b - 1) / 2 + a);
    }
    code
}

/// Smallest pair-bit code over all `n!` relabelings; `n ≤ 8`.
pub fn brute_canonical_code_with(g: &Graph, perms: &[Vec<usize>]) -> u64 {
    perms.iter().map(|p| pair_bits(g, p)).min().unwrap_or(0)
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    assert!(n <= 8);
    permutations(n)
}

pub fn brute_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return false;
    }
    let target = pair_bits(h, &(0..h.n()).collect::<Vec<_>>());
    all_permutations(g.n()).iter().any(|p| pair_bits(g, p) == target)
}

/// Number of labeled-graph classes on `n` vertices found by listing all
/// `2^C(n,2)` labeled graphs and deduplicating by brute canonical code.
pub fn labeled_dedup_count(n: usize) -> usize {
    let pairs = n * n.saturating_sub(1) / 2;
    let perms = all_permutations(n);
    let mut seen = std::collections::HashSet::new();
    let pair_list: Vec<(usize, usize)> = (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
    for mask in 0u64..(1 << pairs) {
        let edges: Vec<(usize, usize)> = (0..pairs).filter(|&i| mask >> i & 1 == 1).map(|i| pair_list[i]).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        seen.insert(brute_canonical_code_with(&g, &perms));
    }
    seen.len()
}

/// Class count by Burnside: the mean over permutations of `2^(orbits on pairs)`.
pub fn burnside_class_count(n: usize) -> u128 {
    let perms = all_permutations(n);
    let mut total: u128 = 0;
    for p in &perms {
        let mut seen = vec![vec![false; n]; n];
        let mut orbits = 0;
        for a in 0..n {
            for b in a + 1..n {
                if seen[a][b] {
                    continue;
                }
                orbits += 1;
                let (mut x, mut y) = (a, b);
                while !seen[x.min(y)][x.max(y)] {
                    seen[x.min(y)][x.max(y)] = true;
                    x = p[x];
                    y = p[y];
                }
            }
        }
        total += 1u128 << orbits;
    }
    total / perms.len() as u128
}

/// Maximum over all labelings `V → [r]` of the number of crossing edges.
pub fn brute_max_crossing(g: &Graph, r: usize) -> usize {
    let n = g.n();
    let total = (r as u64).pow(n as u32);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut best = 0;
    let mut label = vec![0usize; n];
    for mut code in 0..total {
        for l in label.iter_mut() {
            *l = (code % r as u64) as usize;
            code /= r as u64;
        }
        best = best.max(edges.iter().filter(|(u, v)| label[*u] != label[*v]).count());
    }
    best
}

/// Decodes graph6 by reading the bit layout from the format definition.
pub fn hand_decode_graph6(s: &str) -> Graph {
    let bytes: Vec<u8> = s.bytes().collect();
    let n = (bytes[0] - 63) as usize;
    assert!(n < 63, "short header only");
    let mut bits = Vec::new();
    for &b in &bytes[1..] {
        let x = b - 63;
        for i in (0..6).rev() {
            bits.push(x >> i & 1 == 1);
        }
    }
    let mut edges = Vec::new();
    let mut i = 0;
    for v in 1..n {
        for u in 0..v {
            if bits[i] {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// `K_{k-1} ∨ K_r(parts)` assembled edge by edge from its description.
pub fn hand_built_dominated(k: usize, parts: &[usize]) -> Graph {
    let n = k - 1 + parts.iter().sum::<usize>();
    let mut label = vec![usize::MAX; k - 1];
    for (i, &s) in parts.iter().enumerate() {
        label.extend(std::iter::repeat_n(i, s));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if label[u] == usize::MAX || label[v] == usize::MAX || label[u] != label[v] {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
