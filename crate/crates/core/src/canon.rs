//! Canonical labeling for graphs on at most 64 vertices: equitable refinement
//! plus individualization, with automorphism pruning.

use std::collections::VecDeque;
use std::fmt;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_CANON_N: usize = 64;

/// graph6 encoding of the canonically relabeled graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalLabeling {
    /// `order[i]` is the vertex placed at canonical position `i`.
    pub order: Vec<usize>,
    /// Generators of the automorphism group, as images `v ↦ gen[v]`.
    pub generators: Vec<Vec<usize>>,
    /// `g` relabeled so that `order[i]` becomes `i`.
    pub graph: Graph,
}

impl CanonicalLabeling {
    pub fn form(&self) -> CanonicalForm {
        CanonicalForm(crate::graph6::encode(&self.graph))
    }
}

type Cells = ArrayVec<u64, 64>;

struct Leaf {
    order: Vec<usize>,
    cert: Vec<u64>,
    path: Vec<usize>,
}

struct Search<'a> {
    n: usize,
    rows: &'a [u64],
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<usize>>,
}

fn cell_split(rows: &[u64], cell: u64, splitter: u64, out: &mut ArrayVec<(u32, u64), 64>) {
    out.clear();
    let mut c = cell;
    while c != 0 {
        let v = c.trailing_zeros() as usize;
        c &= c - 1;
        let d = (rows[v] & splitter).count_ones();
        match out.iter_mut().find(|(k, _)| *k == d) {
            Some((_, m)) => *m |= 1 << v,
            None => out.push((d, 1 << v)),
        }
    }
    out.sort_unstable_by_key(|&(k, _)| k);
}

fn refine(rows: &[u64], cells: &mut Cells, queue: &mut VecDeque<u64>, n: usize) {
    let mut groups = ArrayVec::new();
    while let Some(w) = queue.pop_front() {
        if cells.len() == n {
            return;
        }
        let mut next = Cells::new();
        for &c in cells.iter() {
            if c.count_ones() == 1 {
                next.push(c);
                continue;
            }
            cell_split(rows, c, w, &mut groups);
            if groups.len() == 1 {
                next.push(c);
            } else {
                for &(_, m) in groups.iter() {
                    next.push(m);
                    queue.push_back(m);
                }
            }
        }
        *cells = next;
    }
}

fn orbits(n: usize, gens: &[&Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in gens {
        for v in 0..n {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Orbit representative (smallest member) of each vertex.
pub fn automorphism_orbits(n: usize, generators: &[Vec<usize>]) -> Vec<usize> {
    orbits(n, &generators.iter().collect::<Vec<_>>())
}

impl Search<'_> {
    fn certificate(&self, cells: &Cells) -> (Vec<usize>, Vec<u64>) {
        let order: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let mut pos = [0usize; 64];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let cert = order
            .iter()
            .map(|&v| {
                let mut row = 0u64;
                let mut nb = self.rows[v];
                while nb != 0 {
                    row |= 1 << pos[nb.trailing_zeros() as usize];
                    nb &= nb - 1;
                }
                row
            })
            .collect();
        (order, cert)
    }

    fn record_automorphism(&mut self, from: &[usize], to: &[usize]) {
        let mut g = vec![0; self.n];
        for (a, b) in from.iter().zip(to) {
            g[*a] = *b;
        }
        if g.iter().enumerate().any(|(v, &w)| v != w) {
            self.gens.push(g);
        }
    }

    /// Returns the depth the search should resume at.
    fn leaf(&mut self, cells: &Cells, path: &[usize]) -> usize {
        let (order, cert) = self.certificate(cells);
        let depth = path.len();
        let Some(first) = &self.first else {
            let leaf = Leaf {
                order,
                cert,
                path: path.to_vec(),
            };
            self.best = Some(Leaf {
                order: leaf.order.clone(),
                cert: leaf.cert.clone(),
                path: leaf.path.clone(),
            });
            self.first = Some(leaf);
            return depth;
        };
        if first.cert == cert {
            let (fo, fp) = (first.order.clone(), common_prefix(&first.path, path));
            self.record_automorphism(&fo, &order);
            return fp;
        }
        let best = self.best.as_ref().expect("set with first");
        match cert.cmp(&best.cert) {
            std::cmp::Ordering::Equal => {
                let (bo, bp) = (best.order.clone(), common_prefix(&best.path, path));
                self.record_automorphism(&bo, &order);
                bp
            }
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf {
                    order,
                    cert,
                    path: path.to_vec(),
                });
                depth
            }
            std::cmp::Ordering::Less => depth,
        }
    }

    fn visit(&mut self, cells: Cells, path: &mut Vec<usize>) -> usize {
        let depth = path.len();
        let Some((ti, &target)) = cells.iter().enumerate().find(|(_, c)| c.count_ones() > 1) else {
            return self.leaf(&cells, path);
        };
        let mut explored: Vec<usize> = Vec::new();
        let mut c = target;
        while c != 0 {
            let w = c.trailing_zeros() as usize;
            c &= c - 1;
            if !explored.is_empty() {
                let fixing: Vec<&Vec<usize>> = self.gens.iter().filter(|g| path.iter().all(|&p| g[p] == p)).collect();
                if !fixing.is_empty() {
                    let orb = orbits(self.n, &fixing);
                    if explored.iter().any(|&u| orb[u] == orb[w]) {
                        continue;
                    }
                }
            }
            let mut child = Cells::new();
            child.try_extend_from_slice(&cells[..ti]).expect("fits");
            child.push(1 << w);
            child.push(target & !(1 << w));
            child.try_extend_from_slice(&cells[ti + 1..]).expect("fits");
            let mut queue = VecDeque::from([1u64 << w, target & !(1 << w)]);
            refine(self.rows, &mut child, &mut queue, self.n);
            path.push(w);
            let back = self.visit(child, path);
            path.pop();
            if back < depth {
                return back;
            }
            explored.push(w);
        }
        depth
    }
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Canonical labeling with automorphism generators.
pub fn canonical_labeling(g: &Graph) -> Result<CanonicalLabeling> {
    let n = g.n();
    if n > MAX_CANON_N {
        return Err(Error::CapacityExceeded {
            requested: n,
            limit: MAX_CANON_N,
        });
    }
    if n == 0 {
        return Ok(CanonicalLabeling {
            order: Vec::new(),
            generators: Vec::new(),
            graph: g.clone(),
        });
    }
    let rows: Vec<u64> = (0..n).map(|v| g.row(v)[0]).collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut cells = Cells::new();
    cells.push(all);
    let mut queue = VecDeque::from([all]);
    refine(&rows, &mut cells, &mut queue, n);
    let mut search = Search {
        n,
        rows: &rows,
        first: None,
        best: None,
        gens: Vec::new(),
    };
    search.visit(cells, &mut Vec::new());
    let best = search.best.expect("the search reaches at least one leaf");
    let mut graph = Graph::new(n)?;
    for (i, &row) in best.cert.iter().enumerate() {
        let mut r = if i == 63 { 0 } else { row >> (i + 1) << (i + 1) };
        while r != 0 {
            graph.add_edge(i, r.trailing_zeros() as usize);
            r &= r - 1;
        }
    }
    Ok(CanonicalLabeling {
        order: best.order,
        generators: search.gens,
        graph,
    })
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    Ok(canonical_labeling(g)?.form())
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return Ok(false);
    }
    Ok(canonical_labeling(g)?.graph == canonical_labeling(h)?.graph)
}
