//! Fixed-size clique enumeration and exact search for `k` vertex-disjoint
//! `(r+1)`-cliques.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_CLIQUE_CAP: usize = 10_000_000;

/// Dead `(need, available set)` states remembered per search.
const MEMO_CAP: usize = 1 << 18;

/// `k` vertex-disjoint cliques of order `r + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliquePacking {
    pub r: usize,
    pub cliques: Vec<Vec<usize>>,
}

impl CliquePacking {
    /// Checks every clique against `g` and pairwise disjointness.
    pub fn validate(&self, g: &Graph) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for (ci, c) in self.cliques.iter().enumerate() {
            if c.len() != self.r + 1 {
                return Err(format!("clique {ci} has {} vertices, expected {}", c.len(), self.r + 1));
            }
            for (a, &u) in c.iter().enumerate() {
                if u >= g.n() {
                    return Err(format!("clique {ci} names vertex {u} outside the graph"));
                }
                if !seen.insert(u) {
                    return Err(format!("vertex {u} appears twice"));
                }
                for &v in &c[a + 1..] {
                    if !g.has_edge(u, v) {
                        return Err(format!("clique {ci} misses edge {u}-{v}"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueList {
    pub cliques: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Verdict of [`is_free`]; `witness` is present exactly when `free` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeVerdict {
    pub free: bool,
    pub witness: Option<CliquePacking>,
}

fn grow(g: &Graph, clique: &mut Vec<usize>, cand: &[u64], s: usize, cap: usize, out: &mut Vec<Vec<usize>>) -> bool {
    if clique.len() == s {
        if out.len() == cap {
            return false;
        }
        out.push(clique.clone());
        return true;
    }
    let missing = s - clique.len();
    if bits::count(cand) < missing {
        return true;
    }
    for w in bits::ones(cand) {
        let mut next = cand.to_vec();
        for (i, x) in next.iter_mut().enumerate() {
            *x &= g.row(w)[i];
        }
        clear_through(&mut next, w);
        clique.push(w);
        let ok = grow(g, clique, &next, s, cap, out);
        clique.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Clears bits `0..=v`.
fn clear_through(set: &mut [u64], v: usize) {
    let w = v / 64;
    for x in set[..w].iter_mut() {
        *x = 0;
    }
    let b = v % 64;
    set[w] &= if b == 63 { 0 } else { !0u64 << (b + 1) };
}

/// All `s`-cliques in lexicographic order, or the first `cap` of them with
/// `truncated` set.
pub fn enumerate_cliques(g: &Graph, s: usize, cap: usize) -> Result<CliqueList> {
    if s == 0 || cap == 0 {
        return Err(Error::invalid("clique size and cap must be positive"));
    }
    let mut out = Vec::new();
    let mut clique = Vec::with_capacity(s);
    let all = bits::full(g.n());
    let complete = grow(g, &mut clique, &all, s, cap, &mut out);
    Ok(CliqueList {
        cliques: out,
        truncated: !complete,
    })
}

struct Packer {
    g: Graph,
    size: usize,
    stack: Vec<Vec<usize>>,
    dead: HashSet<(usize, Vec<u64>)>,
    /// Twins of `v` (equal open or closed neighborhoods), `v` included.
    twins: Vec<Vec<u64>>,
    lower_twins: Vec<Vec<u64>>,
}

/// Swapping two twins is an automorphism, which lets the search fix which
/// members of a twin class are used.
fn twin_masks(g: &Graph) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let n = g.n();
    let mut twins = vec![vec![0u64; bits::words_for(n)]; n];
    for (u, class) in twins.iter_mut().enumerate() {
        let mut open = g.row(u).to_vec();
        bits::remove(&mut open, u);
        let mut closed = open.clone();
        bits::insert(&mut closed, u);
        for w in 0..n {
            let mut row = g.row(w).to_vec();
            bits::remove(&mut row, w);
            let same_open = row == open;
            bits::insert(&mut row, w);
            if same_open || row == closed {
                bits::insert(class, w);
            }
        }
    }
    let lower = twins
        .iter()
        .enumerate()
        .map(|(v, t)| {
            let mut m = t.clone();
            let mut upto = vec![0u64; m.len()];
            for x in 0..v {
                bits::insert(&mut upto, x);
            }
            for (a, b) in m.iter_mut().zip(&upto) {
                *a &= b;
            }
            m
        })
        .collect();
    (twins, lower)
}

impl Packer {
    /// Removes vertices with fewer than `size − 1` neighbors inside `avail`.
    fn peel(&self, avail: &mut [u64]) {
        let need = self.size - 1;
        loop {
            let mut changed = false;
            let snapshot = avail.to_vec();
            for v in bits::ones(&snapshot) {
                if bits::count_and(self.g.row(v), avail) < need {
                    bits::remove(avail, v);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Greedy colouring bound: with colour classes of sizes `s_j`, `p` disjoint
    /// cliques need `p·size ≤ Σ min(s_j, p)`.
    fn colour_bound_ok(&self, avail: &[u64], need: usize) -> bool {
        let mut uncoloured = avail.to_vec();
        let mut total = 0;
        while !bits::is_empty(&uncoloured) {
            let mut class = 0;
            let mut allowed = uncoloured.clone();
            while let Some(v) = bits::first(&allowed) {
                class += 1;
                bits::remove(&mut uncoloured, v);
                bits::remove(&mut allowed, v);
                for (i, x) in allowed.iter_mut().enumerate() {
                    *x &= !self.g.row(v)[i];
                }
            }
            total += class.min(need);
            if total >= need * self.size {
                return true;
            }
        }
        false
    }

    fn pack(&mut self, mut avail: Vec<u64>, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        self.peel(&mut avail);
        if bits::count(&avail) < need * self.size || !self.colour_bound_ok(&avail, need) {
            return false;
        }
        let key = (need, avail);
        if self.dead.contains(&key) {
            return false;
        }
        let avail = key.1;
        let v = bits::first(&avail).expect("nonempty after count check");
        let mut cand = avail.clone();
        for (i, x) in cand.iter_mut().enumerate() {
            *x &= self.g.row(v)[i];
        }
        let mut clique = vec![v];
        if self.extend(&avail, need, &mut clique, &cand) {
            return true;
        }
        // A packing avoiding v can trade any twin of v for v.
        let without: Vec<u64> = avail.iter().zip(&self.twins[v]).map(|(a, t)| a & !t).collect();
        if self.pack(without, need) {
            return true;
        }
        if self.dead.len() < MEMO_CAP {
            self.dead.insert((need, avail));
        }
        false
    }

    fn extend(&mut self, avail: &[u64], need: usize, clique: &mut Vec<usize>, cand: &[u64]) -> bool {
        if clique.len() == self.size {
            let mut rest = avail.to_vec();
            for &u in clique.iter() {
                bits::remove(&mut rest, u);
            }
            self.stack.push(clique.clone());
            if self.pack(rest, need - 1) {
                return true;
            }
            self.stack.pop();
            return false;
        }
        if bits::count(cand) < self.size - clique.len() {
            return false;
        }
        for w in bits::ones(cand) {
            if self.lower_twins[w].iter().zip(cand).any(|(t, c)| t & c != 0) {
                continue;
            }
            let mut next = cand.to_vec();
            for (i, x) in next.iter_mut().enumerate() {
                *x &= self.g.row(w)[i];
            }
            clear_through(&mut next, w);
            clique.push(w);
            let found = self.extend(avail, need, clique, &next);
            clique.pop();
            if found {
                return true;
            }
        }
        false
    }
}

fn check_kr(k: usize, r: usize) -> Result<()> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    Ok(())
}

/// Exact search for `k` disjoint `(r+1)`-cliques.
///
/// Vertices are relabeled by degree (descending). The search branches on the
/// lowest available vertex: either it is covered by one of its cliques inside
/// the available set, or it is discarded. Each node first peels the available
/// set to its `r`-core and applies a colouring bound.
pub fn find_disjoint_packing(g: &Graph, k: usize, r: usize) -> Result<Option<CliquePacking>> {
    check_kr(k, r)?;
    let n = g.n();
    if n < k * (r + 1) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut label = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        label[old] = new;
    }
    let relabeled = g.permuted(&label);
    let (twins, lower_twins) = twin_masks(&relabeled);
    let mut packer = Packer {
        g: relabeled,
        size: r + 1,
        stack: Vec::with_capacity(k),
        dead: HashSet::new(),
        twins,
        lower_twins,
    };
    if !packer.pack(bits::full(n), k) {
        return Ok(None);
    }
    let mut cliques: Vec<Vec<usize>> = packer
        .stack
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| order[v]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    cliques.sort();
    Ok(Some(CliquePacking { r, cliques }))
}

/// Whether `g` contains no `k` disjoint `(r+1)`-cliques, with a witness
/// packing when it does.
pub fn is_free(g: &Graph, k: usize, r: usize) -> Result<FreeVerdict> {
    let witness = find_disjoint_packing(g, k, r)?;
    Ok(FreeVerdict {
        free: witness.is_none(),
        witness,
    })
}

/// First `s`-clique (lexicographic) inside `set`, if any.
fn first_clique_in(g: &Graph, set: &[u64], s: usize) -> Option<Vec<usize>> {
    if s == 0 {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut clique = Vec::with_capacity(s);
    grow(g, &mut clique, set, s, 1, &mut out);
    out.pop()
}

/// Greedy: repeatedly takes the first `size`-clique inside `pool` and removes
/// its vertices.
fn greedy_disjoint(g: &Graph, mut pool: Vec<u64>, size: usize, want: usize) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    while found.len() < want {
        let Some(c) = first_clique_in(g, &pool, size) else {
            break;
        };
        for &w in &c {
            bits::remove(&mut pool, w);
        }
        found.push(c);
    }
    found
}

/// Up to `want` `(r+1)`-cliques through the edge `uv` that pairwise share
/// only `{u, v}`.
pub fn cliques_through_edge(g: &Graph, u: usize, v: usize, r: usize, want: usize) -> Result<Vec<Vec<usize>>> {
    check_kr(1, r)?;
    for x in [u, v] {
        if x >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: x, n: g.n() });
        }
    }
    if u == v || !g.has_edge(u, v) {
        return Err(Error::NotAnEdge { u, v });
    }
    if want == 0 {
        return Ok(Vec::new());
    }
    if r == 1 {
        return Ok(vec![vec![u.min(v), u.max(v)]]);
    }
    let common: Vec<u64> = g.row(u).iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
    Ok(greedy_disjoint(g, common, r - 1, want)
        .into_iter()
        .map(|mut c| {
            c.extend([u, v]);
            c.sort_unstable();
            c
        })
        .collect())
}

/// Up to `want` `(r+1)`-cliques through `u` that pairwise share only `u`.
pub fn cliques_through_vertex(g: &Graph, u: usize, r: usize, want: usize) -> Result<Vec<Vec<usize>>> {
    check_kr(1, r)?;
    if u >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: u, n: g.n() });
    }
    Ok(greedy_disjoint(g, g.row(u).to_vec(), r, want)
        .into_iter()
        .map(|mut c| {
            c.push(u);
            c.sort_unstable();
            c
        })
        .collect())
}
