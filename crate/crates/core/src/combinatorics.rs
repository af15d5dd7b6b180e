//! Exact extremal quantities: Turán edge counts, the Turán number of
//! `kK_{r+1}`, the Chvátal–Hanson function, and a counting bound for set
//! intersections.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_filtered, MAX_ENUMERATION_N};
use crate::error::{Error, Result};
use crate::graph::turan_parts;
use crate::matching::max_matching;

pub type Rational = Ratio<i128>;

/// `e(T_{n,r})` from the class sizes.
pub fn turan_edges(n: usize, r: usize) -> Result<u64> {
    if r == 0 {
        return Err(Error::invalid("r must be at least 1"));
    }
    let parts = turan_parts(n, r)?;
    let sq: u64 = parts.iter().map(|&s| (s * s) as u64).sum();
    Ok(((n * n) as u64 - sq) / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExValue {
    pub value: u64,
    /// `n ≥ k(r+1)`; below this the value is the construction's edge count
    /// and not necessarily the Turán number.
    pub formula_regime: bool,
}

/// `e(T_{n-k+1,r}) + (k−1)(n−k+1) + C(k−1, 2)`.
pub fn ex_kkr1(n: usize, k: usize, r: usize) -> Result<ExValue> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    if n + 1 < k {
        return Err(Error::invalid(format!("n = {n} is smaller than k − 1 = {}", k - 1)));
    }
    let m = n + 1 - k;
    let d = (k - 1) as u64;
    let value = turan_edges(m, r)? + d * m as u64 + d * d.saturating_sub(1) / 2;
    Ok(ExValue {
        value,
        formula_regime: n >= k * (r + 1),
    })
}

/// `f(ν, Δ) = Δν + ⌊Δ/2⌋·⌊ν/⌈Δ/2⌉⌋`.
pub fn chvatal_hanson(nu: u64, delta: u64) -> Result<u64> {
    if nu == 0 || delta == 0 {
        return Err(Error::invalid("ν and Δ must be at least 1"));
    }
    let f = delta * nu + (delta / 2) * (nu / delta.div_ceil(2));
    assert!(f <= delta * nu + nu, "f({nu},{delta}) = {f} exceeds Δν + ν");
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleValue {
    /// Maximum edge count found.
    pub value: u64,
    /// `f(ν, Δ)`.
    pub formula: u64,
    /// `value == formula`; otherwise `value` is only a lower bound on the
    /// unrestricted maximum.
    pub attained: bool,
    /// graph6 of one maximizer.
    pub witness: String,
    pub classes_scanned: u64,
}

/// Maximum edges over all graphs on at most `n_max` vertices with matching
/// number `≤ ν` and maximum degree `≤ Δ`, by exhaustive enumeration up to
/// isomorphism. Both constraints are inherited by induced subgraphs, so the
/// generator prunes every branch that violates them.
pub fn chvatal_hanson_oracle(nu: u64, delta: u64, n_max: usize) -> Result<OracleValue> {
    let formula = chvatal_hanson(nu, delta)?;
    if n_max > MAX_ENUMERATION_N {
        return Err(Error::EnumerationTooLarge {
            n: n_max,
            limit: MAX_ENUMERATION_N,
        });
    }
    let (nu, delta) = (nu as usize, delta as usize);
    let filter = |g: &crate::graph::Graph| g.max_degree() <= delta && max_matching(g).size <= nu;
    let graphs = enumerate_filtered(n_max, &filter)?;
    let classes_scanned = graphs.len() as u64;
    // Isolated vertices can always be added, so the top level suffices.
    let best = graphs
        .iter()
        .max_by_key(|g| g.edge_count())
        .expect("the edgeless graph is always admissible");
    let value = best.edge_count() as u64;
    Ok(OracleValue {
        value,
        formula,
        attained: value == formula,
        witness: crate::graph6::encode(best),
        classes_scanned,
    })
}

/// `Σ|V_i| − (m−1)·|V_1 ∪ … ∪ V_m|`, a lower bound on `|V_1 ∩ … ∩ V_m|`.
pub fn intersection_bound(sizes: &[u64], union_size: u64) -> Result<i64> {
    let Some(&max) = sizes.iter().max() else {
        return Err(Error::invalid("at least one set is required"));
    };
    if union_size < max {
        return Err(Error::invalid("union is smaller than one of the sets"));
    }
    let m = sizes.len() as i64;
    Ok(sizes.iter().map(|&s| s as i64).sum::<i64>() - (m - 1) * union_size as i64)
}

/// One line of [`rho_bound_chain`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLine {
    pub label: String,
    /// Exact value as `numerator/denominator`.
    pub value: String,
    /// Whether this line is at least the next one.
    pub dominates_next: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub lines: Vec<ChainLine>,
    pub holds: bool,
}

fn q(a: i128) -> Rational {
    Rational::from_integer(a)
}

/// The explicit lower bound on the spectral radius as an exact rational.
pub fn rho_lower_bound_exact(n: usize, k: usize, r: usize) -> Result<Rational> {
    if n == 0 || k == 0 || r == 0 {
        return Err(Error::invalid("n, k and r must be positive"));
    }
    let (n, k, r) = (q(n as i128), q(k as i128), q(r as i128));
    let one = q(1);
    Ok((r - one) * n / r + q(2) * (k - one) / r - ((k - one) * (r + k - one) / r + r / q(2)) / n)
}

/// Exact check of
/// `2·ex/n ≥ (2/n)(e(T_{n,r}) + (k−1)n/r − (k−1)(r+k−1)/(2r) − r/8) ≥ bound`,
/// where `2·ex/n` is the average degree of the extremal construction, itself
/// a lower bound on its spectral radius.
pub fn rho_bound_chain(n: usize, k: usize, r: usize) -> Result<ChainReport> {
    let ex = ex_kkr1(n, k, r)?.value as i128;
    let (nn, kk, rr) = (q(n as i128), q(k as i128), q(r as i128));
    let one = q(1);
    let avg = q(2 * ex) / nn;
    let middle = q(2) / nn
        * (q(turan_edges(n, r)? as i128) + (kk - one) * nn / rr
            - (kk - one) * (rr + kk - one) / (q(2) * rr)
            - rr / q(8));
    let bound = rho_lower_bound_exact(n, k, r)?;
    let values = [("average degree", avg), ("expanded count", middle), ("bound", bound)];
    let lines: Vec<ChainLine> = values
        .iter()
        .enumerate()
        .map(|(i, (label, v))| ChainLine {
            label: label.to_string(),
            value: format!("{}/{}", v.numer(), v.denom()),
            dominates_next: values.get(i + 1).is_none_or(|(_, w)| v >= w),
        })
        .collect();
    let holds = lines.iter().all(|l| l.dominates_next);
    Ok(ChainReport { n, k, r, lines, holds })
}
