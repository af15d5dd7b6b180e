//! Orderly generation of graphs up to isomorphism by canonical vertex
//! augmentation.
//!
//! Each graph on `n` vertices is produced from exactly one parent on `n − 1`
//! vertices: the class of `G − w`, where `w` is the maximum-degree vertex with
//! the largest canonical position. Extensions from the accepted parent are
//! deduplicated by canonical form.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::canon::{automorphism_orbits, canonical_labeling};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ENUMERATION_N: usize = 10;

/// Known class counts for `n = 0..=10`, used as a sanity table.
pub const CLASS_COUNTS: [u64; 11] = [1, 1, 2, 4, 11, 34, 156, 1044, 12346, 274668, 12005168];

fn check_n(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

fn extend(parent: &Graph, subset: u32) -> Graph {
    let n = parent.n();
    let mut g = Graph::new(n + 1).expect("within capacity");
    for (u, v) in parent.edges() {
        g.add_edge(u, v);
    }
    for u in 0..n {
        if subset >> u & 1 == 1 {
            g.add_edge(u, n);
        }
    }
    g
}

/// Canonical children of a canonical `parent` that satisfy `filter`, sorted
/// by canonical form. Each child is returned in canonical labeling.
pub fn children<F>(parent: &Graph, filter: &F) -> Vec<Graph>
where
    F: Fn(&Graph) -> bool + ?Sized,
{
    let n = parent.n();
    let max_parent_degree = parent.max_degree();
    let degrees = parent.degrees();
    let mut accepted: BTreeMap<String, Graph> = BTreeMap::new();
    for subset in 0u32..(1 << n) {
        let d = subset.count_ones() as usize;
        // The new vertex must have maximum degree in the child.
        if d < max_parent_degree || (0..n).any(|u| degrees[u] + (subset >> u & 1) as usize > d) {
            continue;
        }
        let child = extend(parent, subset);
        if !filter(&child) {
            continue;
        }
        let lab = canonical_labeling(&child).expect("n ≤ 10");
        let max_deg = child.max_degree();
        let w = *lab.order.iter().rev().find(|&&v| child.degree(v) == max_deg).expect("nonempty");
        let ok = w == n || {
            let orb = automorphism_orbits(n + 1, &lab.generators);
            orb[w] == orb[n] || {
                let keep: Vec<usize> = (0..=n).filter(|&v| v != w).collect();
                let minus = child.induced(&keep).expect("in range");
                canonical_labeling(&minus).expect("n ≤ 10").graph == *parent
            }
        };
        if ok {
            let form = lab.form().0;
            accepted.entry(form).or_insert(lab.graph);
        }
    }
    accepted.into_values().collect()
}

/// One canonical representative per class on `n` vertices among graphs all
/// of whose induced subgraphs satisfy `filter`. `filter` must be hereditary
/// (closed under vertex deletion) for the result to be complete.
pub fn enumerate_filtered<F>(n: usize, filter: &F) -> Result<Vec<Graph>>
where
    F: Fn(&Graph) -> bool + Sync + ?Sized,
{
    check_n(n)?;
    let mut level = vec![Graph::new(0)?];
    for _ in 0..n {
        level = next_level(&level, filter);
    }
    Ok(level)
}

fn next_level<F>(level: &[Graph], filter: &F) -> Vec<Graph>
where
    F: Fn(&Graph) -> bool + Sync + ?Sized,
{
    level.par_iter().map(|p| children(p, filter)).collect::<Vec<_>>().into_iter().flatten().collect()
}

/// One representative per isomorphism class on `n ≤ 10` vertices, in a fixed
/// order.
pub fn enumerate_nonisomorphic(n: usize) -> Result<Vec<Graph>> {
    enumerate_filtered(n, &|_: &Graph| true)
}

/// Representatives on `n − 1` vertices whose children make up the classes on
/// `n` vertices; lets callers stream the last level without materializing it.
pub fn parents<F>(n: usize, filter: &F) -> Result<Vec<Graph>>
where
    F: Fn(&Graph) -> bool + Sync + ?Sized,
{
    check_n(n)?;
    if n == 0 {
        return Err(Error::invalid("the empty graph has no parent"));
    }
    enumerate_filtered(n - 1, filter)
}
