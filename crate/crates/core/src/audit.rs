//! Structural checks for the extremal argument: max-crossing partitions, the
//! high-intra-degree set `W`, the low-degree set `L`, the shape audit of
//! `K_{k-1} ∨ T_{n-k+1,r}`, and the balancing perturbation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::{crossing_edges, turan_parts, Graph, PartitionLabeling};
use crate::spectral::quotient_rho;

/// Labelings are enumerated exhaustively up to this many `r^n` assignments.
pub const EXHAUSTIVE_LABELINGS: f64 = 1e7;
pub const PARTITION_RESTARTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingPartition {
    pub labels: Vec<usize>,
    pub class_sizes: Vec<usize>,
    pub crossing: usize,
    /// Every labeling was examined, so `crossing` is the global maximum.
    pub exhaustive: bool,
    /// No single-vertex relabeling increases `crossing`.
    pub locally_optimal: bool,
}

impl CrossingPartition {
    pub fn labeling(&self, r: usize) -> PartitionLabeling {
        PartitionLabeling::new(r, self.labels.clone()).expect("labels were built for r classes")
    }
}

fn class_degree(g: &Graph, v: usize, class: &[u64]) -> usize {
    g.degree_into(v, class)
}

/// Best relabeling of `v`: the class holding the fewest of its neighbors.
fn best_move(g: &Graph, v: usize, labels: &[usize], sets: &[Vec<u64>]) -> Option<usize> {
    let here = class_degree(g, v, &sets[labels[v]]);
    let (to, there) = (0..sets.len())
        .map(|c| (c, class_degree(g, v, &sets[c])))
        .min_by_key(|&(c, d)| (d, c))
        .expect("r ≥ 1");
    (there < here).then_some(to)
}

fn class_sets(n: usize, r: usize, labels: &[usize]) -> Vec<Vec<u64>> {
    let mut sets = vec![vec![0u64; bits::words_for(n)]; r];
    for (v, &l) in labels.iter().enumerate() {
        bits::insert(&mut sets[l], v);
    }
    sets
}

fn is_locally_optimal(g: &Graph, r: usize, labels: &[usize]) -> bool {
    let sets = class_sets(g.n(), r, labels);
    (0..g.n()).all(|v| best_move(g, v, labels, &sets).is_none())
}

fn climb(g: &Graph, r: usize, labels: &mut [usize]) {
    let mut sets = class_sets(g.n(), r, labels);
    loop {
        let mut moved = false;
        for v in 0..g.n() {
            if let Some(to) = best_move(g, v, labels, &sets) {
                bits::remove(&mut sets[labels[v]], v);
                bits::insert(&mut sets[to], v);
                labels[v] = to;
                moved = true;
            }
        }
        if !moved {
            return;
        }
    }
}

struct Exhaust<'a> {
    g: &'a Graph,
    r: usize,
    labels: Vec<usize>,
    sets: Vec<Vec<u64>>,
    best: usize,
    best_labels: Vec<usize>,
}

impl Exhaust<'_> {
    /// Labels vertices in order; a new class may only be opened as the next
    /// unused index, which removes relabelings of the classes.
    fn go(&mut self, v: usize, used: usize, crossing: usize) {
        let n = self.g.n();
        if v == n {
            if crossing > self.best || self.best_labels.is_empty() {
                self.best = crossing;
                self.best_labels = self.labels.clone();
            }
            return;
        }
        // Remaining vertices can add at most their degree into placed ones
        // plus all edges among themselves.
        let remaining: usize = (v..n).map(|u| self.g.degree(u)).sum::<usize>();
        if !self.best_labels.is_empty() && crossing + remaining <= self.best {
            return;
        }
        let into_placed = (0..v).filter(|&u| self.g.has_edge(u, v)).count();
        for c in 0..self.r.min(used + 1) {
            let same = class_degree(self.g, v, &self.sets[c]);
            self.labels[v] = c;
            bits::insert(&mut self.sets[c], v);
            self.go(v + 1, used.max(c + 1), crossing + into_placed - same);
            bits::remove(&mut self.sets[c], v);
        }
    }
}

/// A crossing-maximal `r`-partition: exact when `r^n ≤ 10^7`, otherwise the
/// best local optimum over seeded restarts.
pub fn max_crossing_partition(g: &Graph, r: usize, seed: u64) -> Result<CrossingPartition> {
    if r < 2 {
        return Err(Error::invalid("r must be at least 2"));
    }
    let n = g.n();
    let exhaustive = (r as f64).powi(n as i32) <= EXHAUSTIVE_LABELINGS;
    let labels = if exhaustive {
        let mut e = Exhaust {
            g,
            r,
            labels: vec![0; n],
            sets: vec![vec![0u64; bits::words_for(n)]; r],
            best: 0,
            best_labels: Vec::new(),
        };
        e.go(0, 0, 0);
        e.best_labels
    } else {
        let runs: Vec<Vec<usize>> = (0..PARTITION_RESTARTS)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut labels: Vec<usize> = if i == 0 {
                    greedy_start(g, r)
                } else {
                    (0..n).map(|_| rng.random_range(0..r)).collect()
                };
                climb(g, r, &mut labels);
                labels
            })
            .collect();
        runs.into_iter()
            .enumerate()
            .max_by_key(|(i, l)| (count_crossing(g, l), std::cmp::Reverse(*i)))
            .map(|(_, l)| l)
            .expect("at least one restart")
    };
    let p = PartitionLabeling::new(r, labels.clone())?;
    let crossing = crossing_edges(g, &p)?;
    Ok(CrossingPartition {
        locally_optimal: is_locally_optimal(g, r, &labels),
        class_sizes: p.class_sizes().to_vec(),
        labels,
        crossing,
        exhaustive,
    })
}

fn count_crossing(g: &Graph, labels: &[usize]) -> usize {
    g.edges().filter(|&(u, v)| labels[u] != labels[v]).count()
}

/// Places vertices by descending degree into the class with the fewest
/// already-placed neighbors, ties to the smaller class.
fn greedy_start(g: &Graph, r: usize) -> Vec<usize> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut labels = vec![0; n];
    let mut sets = vec![vec![0u64; bits::words_for(n)]; r];
    let mut sizes = vec![0usize; r];
    for v in order {
        let c = (0..r)
            .min_by_key(|&c| (class_degree(g, v, &sets[c]), sizes[c], c))
            .expect("r ≥ 2");
        labels[v] = c;
        bits::insert(&mut sets[c], v);
        sizes[c] += 1;
    }
    labels
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    #[serde(with = "crate::serde_float")]
    pub epsilon: f64,
    #[serde(with = "crate::serde_float")]
    pub theta: f64,
    #[serde(with = "crate::serde_float")]
    pub epsilon1: f64,
    #[serde(with = "crate::serde_float")]
    pub epsilon2: f64,
}

impl AuditParams {
    /// `θ = 0.9·θ_max`, `ε₁ = 0.9·θ`, `ε = 0.9·((r+1)/2r)·ε₁²` (which keeps
    /// `√ε < ε₁` and makes `ε₂ < ε₁` feasible), and `ε₂ = 0.9·ε₁` unless that
    /// misses the admissible interval, in which case its midpoint.
    pub fn defaults(k: usize, r: usize) -> Result<Self> {
        if k == 0 || r == 0 {
            return Err(Error::invalid("k and r must be at least 1"));
        }
        let (kf, rf) = (k as f64, r as f64);
        let theta = 0.9 / (20.0 * kf * rf.powi(4) * (rf + 1.0));
        let epsilon1 = 0.9 * theta;
        let epsilon = 0.9 * (rf + 1.0) / (2.0 * rf) * epsilon1 * epsilon1;
        let (lo, hi) = l_interval(epsilon, epsilon1, r);
        let top = hi.min(epsilon1);
        let epsilon2 = if 0.9 * epsilon1 > lo && 0.9 * epsilon1 < top {
            0.9 * epsilon1
        } else {
            0.5 * (lo + top)
        };
        let p = AuditParams {
            epsilon,
            theta,
            epsilon1,
            epsilon2,
        };
        p.validate(k, r)?;
        Ok(p)
    }

    pub fn validate(&self, k: usize, r: usize) -> Result<()> {
        let (kf, rf) = (k as f64, r as f64);
        let theta_max = 1.0 / (20.0 * kf * rf.powi(4) * (rf + 1.0));
        let all_positive = [self.epsilon, self.theta, self.epsilon1, self.epsilon2].iter().all(|&x| x > 0.0);
        if !all_positive {
            return Err(Error::invalid("audit parameters must be positive"));
        }
        if self.theta >= theta_max {
            return Err(Error::invalid(format!("θ = {} must be below {theta_max}", self.theta)));
        }
        if self.epsilon > self.theta * self.theta {
            return Err(Error::invalid("ε must not exceed θ²"));
        }
        if self.epsilon2 >= self.epsilon1 {
            return Err(Error::invalid("ε₂ must be below ε₁"));
        }
        if l_quadratic(self.epsilon, self.epsilon1, self.epsilon2, r) >= 0.0 {
            return Err(Error::invalid("ε − ε₁ε₂ + ((r−1)/2r)ε₂² must be negative"));
        }
        Ok(())
    }
}

fn l_quadratic(eps: f64, eps1: f64, eps2: f64, r: usize) -> f64 {
    let rf = r as f64;
    eps - eps1 * eps2 + (rf - 1.0) / (2.0 * rf) * eps2 * eps2
}

/// Open interval of `ε₂` where the quadratic is negative.
fn l_interval(eps: f64, eps1: f64, r: usize) -> (f64, f64) {
    let rf = r as f64;
    if r == 1 {
        return (eps / eps1, f64::INFINITY);
    }
    let disc = (eps1 * eps1 - 2.0 * (rf - 1.0) * eps / rf).max(0.0).sqrt();
    (rf * (eps1 - disc) / (rf - 1.0), rf * (eps1 + disc) / (rf - 1.0))
}

/// `lhs ≤ rhs`, with both sides kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    #[serde(with = "crate::serde_float")]
    pub lhs: f64,
    #[serde(with = "crate::serde_float")]
    pub rhs: f64,
    pub holds: bool,
}

impl Margin {
    fn at_most(name: &str, lhs: f64, rhs: f64) -> Self {
        Margin {
            name: name.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WlClassification {
    pub w: Vec<usize>,
    pub l: Vec<usize>,
    /// `|W| ≤ θn`.
    pub w_bound: Margin,
    /// `|L| ≤ ε₂n`.
    pub l_bound: Margin,
    /// Vertices with `d_{V_i}(v) > d(v)/r` for their own class `V_i`.
    pub own_class_excess: Vec<usize>,
}

/// `W` and `L` for partition `p` with validated parameters.
pub fn classify_w_l(g: &Graph, p: &PartitionLabeling, params: &AuditParams, k: usize) -> Result<WlClassification> {
    params.validate(k, p.r())?;
    classify_w_l_unchecked(g, p, params)
}

/// As [`classify_w_l`] without the parameter invariants, for exploring
/// thresholds outside the admissible range.
pub fn classify_w_l_unchecked(g: &Graph, p: &PartitionLabeling, params: &AuditParams) -> Result<WlClassification> {
    let n = g.n();
    if p.labels().len() != n {
        return Err(Error::invalid("partition size differs from vertex count"));
    }
    let nf = n as f64;
    let r = p.r() as f64;
    let sets = p.class_sets();
    let mut w = Vec::new();
    let mut own_class_excess = Vec::new();
    for v in 0..n {
        let intra = g.degree_into(v, &sets[p.label(v)]);
        if intra as f64 >= 2.0 * params.theta * nf {
            w.push(v);
        }
        if intra as f64 * r > g.degree(v) as f64 {
            own_class_excess.push(v);
        }
    }
    let cutoff = (1.0 - 1.0 / r - params.epsilon1) * nf;
    let l: Vec<usize> = (0..n).filter(|&v| g.degree(v) as f64 <= cutoff).collect();
    Ok(WlClassification {
        w_bound: Margin::at_most("|W| <= theta*n", w.len() as f64, params.theta * nf),
        l_bound: Margin::at_most("|L| <= epsilon2*n", l.len() as f64, params.epsilon2 * nf),
        w,
        l,
        own_class_excess,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureAudit {
    pub dominating: Vec<usize>,
    /// Class sizes of the multipartite remainder, largest first, when it is
    /// complete multipartite.
    pub remainder_parts: Option<Vec<usize>>,
    pub clauses: Vec<Clause>,
    pub passed: bool,
    pub failing_clause: Option<String>,
}

pub const CLAUSE_DOMINATING: &str = "dominating_count";
pub const CLAUSE_MULTIPARTITE: &str = "remainder_complete_multipartite";
pub const CLAUSE_BALANCED: &str = "remainder_balanced";

/// Classes of a complete multipartite graph (non-adjacency must be an
/// equivalence relation), or `None`.
fn multipartite_classes(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let comps = g.complement().components();
    for c in &comps {
        for (i, &u) in c.iter().enumerate() {
            if c[i + 1..].iter().any(|&v| g.has_edge(u, v)) {
                return None;
            }
        }
    }
    let total: usize = comps.iter().map(|c| c.len()).sum::<usize>();
    let sq: usize = comps.iter().map(|c| c.len() * c.len()).sum();
    (g.edge_count() * 2 == total * total - sq).then_some(comps)
}

/// Decides whether `g` is `K_{k-1} ∨ T_{n-k+1,r}`, naming the first failing
/// clause otherwise.
///
/// Vertices of degree `n − 1` are the dominating clique plus any singleton
/// parts, so the expected count is `k − 1` plus the number of size-one parts
/// in the balanced split.
pub fn audit_extremal_structure(g: &Graph, k: usize, r: usize) -> Result<StructureAudit> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    let n = g.n();
    let full: Vec<usize> = (0..n).filter(|&v| g.degree(v) + 1 == n).collect();
    let mut clauses = Vec::new();
    let expected_parts: Vec<usize> = if n + 1 >= k {
        turan_parts(n + 1 - k, r)?.into_iter().filter(|&s| s > 0).collect()
    } else {
        Vec::new()
    };
    let singletons = expected_parts.iter().filter(|&&s| s == 1).count();
    let expected_full = k - 1 + singletons;
    clauses.push(Clause {
        name: CLAUSE_DOMINATING.into(),
        holds: n + 1 >= k && full.len() == expected_full,
        detail: format!("{} vertices of degree n-1, expected {expected_full}", full.len()),
    });
    let dominating: Vec<usize> = full.iter().copied().take(k - 1).collect();
    let rest: Vec<usize> = (0..n).filter(|v| !dominating.contains(v)).collect();
    let remainder = g.induced(&rest)?;
    let classes = multipartite_classes(&remainder);
    let mut remainder_parts = classes.as_ref().map(|c| {
        let mut s: Vec<usize> = c.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    });
    let class_count_ok = remainder_parts.as_ref().is_some_and(|s| s.len() == expected_parts.len());
    clauses.push(Clause {
        name: CLAUSE_MULTIPARTITE.into(),
        holds: class_count_ok,
        detail: match &remainder_parts {
            Some(s) => format!("complete {}-partite, expected {}", s.len(), expected_parts.len()),
            None => "not complete multipartite".into(),
        },
    });
    let balanced = remainder_parts
        .as_ref()
        .is_some_and(|s| s.first().zip(s.last()).is_none_or(|(a, b)| a - b <= 1));
    clauses.push(Clause {
        name: CLAUSE_BALANCED.into(),
        holds: balanced,
        detail: match &remainder_parts {
            Some(s) => format!("part sizes {s:?}"),
            None => "no parts".into(),
        },
    });
    if n + 1 < k {
        remainder_parts = None;
    }
    let failing_clause = clauses.iter().find(|c| !c.holds).map(|c| c.name.clone());
    Ok(StructureAudit {
        dominating,
        remainder_parts,
        passed: failing_clause.is_none(),
        failing_clause,
        clauses,
    })
}

/// `ρ` after moving one vertex from part `i` to part `j`, minus `ρ` before.
pub fn balancing_gain(k: usize, r: usize, parts: &[usize], i: usize, j: usize) -> Result<f64> {
    if i >= parts.len() || j >= parts.len() {
        return Err(Error::invalid("part index out of range"));
    }
    if parts[i] < parts[j] + 2 {
        return Err(Error::invalid(format!(
            "parts[{i}] = {} must exceed parts[{j}] = {} by at least 2",
            parts[i], parts[j]
        )));
    }
    let mut moved = parts.to_vec();
    moved[i] -= 1;
    moved[j] += 1;
    Ok(quotient_rho(k, r, &moved)? - quotient_rho(k, r, parts)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartIndependence {
    pub class: usize,
    /// `V_i` minus the core spans no edge.
    pub independent: bool,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominatingDegree {
    pub vertex: usize,
    pub degree: usize,
    /// `d(u) = n − 1`.
    pub full: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub params: AuditParams,
    pub partition: CrossingPartition,
    /// Threshold classes; at small `n` the cutoffs `2θn` and `ε₁n` are
    /// degenerate, so these are informational.
    pub classification: WlClassification,
    /// The `k − 1` vertices of largest intra-class degree (ties to the lower
    /// index). Once `2θn` separates the two degree scales this is `W`.
    pub core: Vec<usize>,
    /// Threshold `W` equals `core`.
    pub w_matches_core: bool,
    pub part_independence: Vec<PartIndependence>,
    pub dominating_degrees: Vec<DominatingDegree>,
    pub structure: StructureAudit,
    /// Hard clauses only: independence, full degrees of the core, and the
    /// structure audit.
    pub passed: bool,
}

/// Runs every check on `g` against a crossing-maximal `r`-partition.
pub fn audit(g: &Graph, k: usize, r: usize, params: Option<AuditParams>, seed: u64) -> Result<AuditReport> {
    let params = match params {
        Some(p) => {
            p.validate(k, r)?;
            p
        }
        None => AuditParams::defaults(k, r)?,
    };
    let partition = max_crossing_partition(g, r, seed)?;
    let labeling = partition.labeling(r);
    let classification = classify_w_l(g, &labeling, &params, k)?;
    let n = g.n();
    let sets = labeling.class_sets();
    let mut by_intra: Vec<usize> = (0..n).collect();
    by_intra.sort_by_key(|&v| (std::cmp::Reverse(g.degree_into(v, &sets[labeling.label(v)])), v));
    let mut core: Vec<usize> = by_intra.into_iter().take(k - 1).collect();
    core.sort_unstable();
    let part_independence = (0..r)
        .map(|c| {
            let members: Vec<usize> = labeling.class_members(c).into_iter().filter(|v| !core.contains(v)).collect();
            let edges = g.induced(&members).map(|h| h.edge_count()).unwrap_or(0);
            PartIndependence {
                class: c,
                independent: edges == 0,
                edges,
            }
        })
        .collect::<Vec<_>>();
    let dominating_degrees: Vec<DominatingDegree> = core
        .iter()
        .map(|&v| DominatingDegree {
            vertex: v,
            degree: g.degree(v),
            full: g.degree(v) + 1 == n,
        })
        .collect();
    let structure = audit_extremal_structure(g, k, r)?;
    let passed = structure.passed
        && part_independence.iter().all(|p| p.independent)
        && dominating_degrees.iter().all(|d| d.full);
    Ok(AuditReport {
        n,
        k,
        r,
        params,
        partition,
        w_matches_core: classification.w == core,
        classification,
        core,
        part_independence,
        dominating_degrees,
        structure,
        passed,
    })
}
