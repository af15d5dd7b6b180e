//! Exact maximum matching by branch and bound.

use crate::bits;
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    pub edges: Vec<(usize, usize)>,
}

/// `ν(G)` with a witness matching.
///
/// Branches on the lowest uncovered vertex that still has an available
/// neighbor: either it is matched to one of them, or it stays uncovered.
/// A greedy matching seeds the incumbent and half the number of available
/// non-isolated vertices bounds each subtree.
pub fn max_matching(g: &Graph) -> Matching {
    let mut best = greedy_matching(g);
    let mut avail = bits::full(g.n());
    let ceiling = active_count(g, &avail) / 2;
    if best.len() < ceiling {
        let mut current = Vec::new();
        branch(g, &mut avail, &mut current, &mut best, ceiling);
    }
    Matching {
        size: best.len(),
        edges: best,
    }
}

fn greedy_matching(g: &Graph) -> Vec<(usize, usize)> {
    let mut avail = bits::full(g.n());
    let mut edges = Vec::new();
    for v in 0..g.n() {
        if !bits::test(&avail, v) {
            continue;
        }
        let partner = g.neighbors(v).find(|&u| bits::test(&avail, u));
        if let Some(u) = partner {
            bits::remove(&mut avail, v);
            bits::remove(&mut avail, u);
            edges.push((v, u));
        }
    }
    edges
}

fn active_count(g: &Graph, avail: &[u64]) -> usize {
    bits::ones(avail).filter(|&v| bits::count_and(g.row(v), avail) > 0).count()
}

fn branch(
    g: &Graph,
    avail: &mut Vec<u64>,
    current: &mut Vec<(usize, usize)>,
    best: &mut Vec<(usize, usize)>,
    ceiling: usize,
) -> bool {
    if current.len() + active_count(g, avail) / 2 <= best.len() {
        return false;
    }
    let pivot = bits::ones(avail).find(|&v| bits::count_and(g.row(v), avail) > 0);
    let Some(v) = pivot else {
        if current.len() > best.len() {
            best.clone_from(current);
        }
        return best.len() == ceiling;
    };
    bits::remove(avail, v);
    let partners: Vec<usize> = g.neighbors(v).filter(|&u| bits::test(avail, u)).collect();
    for u in partners {
        bits::remove(avail, u);
        current.push((v, u));
        let done = branch(g, avail, current, best, ceiling);
        current.pop();
        bits::insert(avail, u);
        if done {
            bits::insert(avail, v);
            return true;
        }
    }
    let done = branch(g, avail, current, best, ceiling);
    bits::insert(avail, v);
    done
}
