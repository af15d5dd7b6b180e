//! Spectral radius and Perron vector by shifted power iteration, the
//! equitable-quotient closed form for `K_{k-1} ∨ K_r(parts)`, and the
//! eigenvector structure check for that family.

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::{Graph, Role};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Spectral radii closer than this are treated as equal in comparisons.
pub const TIE_WINDOW: f64 = 1e-9;

pub fn iteration_cap(n: usize) -> usize {
    100 * n + 10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    #[serde(with = "crate::serde_float")]
    pub rho: f64,
    /// Eigenvector with maximum entry 1.
    #[serde(with = "crate::serde_float::vec")]
    pub vector: Vec<f64>,
    /// `‖A·x − ρ·x‖_∞` for the returned pair.
    #[serde(with = "crate::serde_float")]
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct ComponentRun {
    rho: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
}

#[inline]
fn neighbor_sum(row: &[u64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (wi, &w) in row.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            s += x[wi * 64 + w.trailing_zeros() as usize];
            w &= w - 1;
        }
    }
    s
}

/// Power iteration for `A + I` restricted to one component; `x` holds the
/// start vector on `comp` (zero elsewhere) and receives the eigenvector.
fn iterate_component(g: &Graph, comp: &[usize], x: &mut [f64], ax: &mut [f64], tol: f64, cap: usize) -> ComponentRun {
    let mut it = 0;
    loop {
        let mut num = 0.0;
        let mut den = 0.0;
        for &v in comp {
            let s = neighbor_sum(g.row(v), x);
            ax[v] = s;
            num += x[v] * s;
            den += x[v] * x[v];
        }
        let mu = num / den;
        let residual = comp.iter().map(|&v| (ax[v] - mu * x[v]).abs()).fold(0.0, f64::max);
        if residual <= tol || it >= cap {
            return ComponentRun {
                rho: mu,
                residual,
                iterations: it,
                converged: residual <= tol,
            };
        }
        let mut m = 0.0f64;
        for &v in comp {
            x[v] += ax[v];
            m = m.max(x[v]);
        }
        for &v in comp {
            x[v] /= m;
        }
        it += 1;
    }
}

fn seed_component(comp: &[usize], start: Option<&[f64]>, x: &mut [f64]) {
    let usable = start.is_some_and(|s| comp.iter().all(|&v| s[v].is_finite() && s[v] > 0.0));
    let m = match (usable, start) {
        (true, Some(s)) => comp.iter().map(|&v| s[v]).fold(0.0, f64::max),
        _ => 1.0,
    };
    for &v in comp {
        x[v] = match (usable, start) {
            (true, Some(s)) => s[v] / m,
            _ => 1.0,
        };
    }
}

/// Largest adjacency eigenvalue of `g`.
///
/// Each component is power-iterated with the unit-shifted operator
/// `x ↦ A·x + x` from the all-ones vector until the eigen-equation residual
/// drops to `tol` or the cap `100·n + 10000` is hit (then `converged` is
/// false and the best estimate is returned). `rho` is the Rayleigh quotient
/// of the returned vector. On a disconnected graph the vector is supported on
/// the component attaining the maximum.
pub fn spectral_radius(g: &Graph, tol: f64) -> Result<SpectralResult> {
    spectral_radius_from(g, tol, None)
}

/// As [`spectral_radius`], warm-started from `start` when it is positive on
/// every component.
pub fn spectral_radius_from(g: &Graph, tol: f64, start: Option<&[f64]>) -> Result<SpectralResult> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if let Some(s) = start {
        if s.len() != n {
            return Err(Error::invalid("start vector length differs from vertex count"));
        }
    }
    let cap = iteration_cap(n);
    let comps = g.components();
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let mut best: Option<(ComponentRun, usize)> = None;
    let mut best_vec = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = true;
    for (ci, comp) in comps.iter().enumerate() {
        // Components that cannot beat the incumbent are skipped: ρ ≤ Δ.
        if let Some((b, _)) = &best {
            let max_deg = comp.iter().map(|&v| g.degree(v)).max().unwrap_or(0) as f64;
            if max_deg < b.rho - tol {
                continue;
            }
        }
        seed_component(comp, start, &mut x);
        let run = iterate_component(g, comp, &mut x, &mut ax, tol, cap);
        iterations += run.iterations;
        converged &= run.converged;
        if best.as_ref().is_none_or(|(b, _)| run.rho > b.rho) {
            best_vec.iter_mut().for_each(|e| *e = 0.0);
            for &v in comp {
                best_vec[v] = x[v];
            }
            best = Some((run, ci));
        }
        for &v in comp {
            x[v] = 0.0;
        }
    }
    let (run, _) = best.expect("at least one component");
    Ok(SpectralResult {
        rho: run.rho,
        vector: best_vec,
        residual: run.residual,
        iterations,
        converged,
    })
}

/// Perron vector of a connected graph, entries positive, maximum 1.
pub fn perron_vector(g: &Graph, tol: f64) -> Result<SpectralResult> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    spectral_radius(g, tol)
}

/// `x^T A x / x^T x`.
pub fn rayleigh_quotient(g: &Graph, x: &[f64]) -> f64 {
    let num: f64 = (0..g.n()).map(|v| x[v] * neighbor_sum(g.row(v), x)).sum();
    let den: f64 = x.iter().map(|a| a * a).sum();
    num / den
}

/// `‖A·x − ρ·x‖_∞`.
pub fn eigen_residual(g: &Graph, rho: f64, x: &[f64]) -> f64 {
    (0..g.n())
        .map(|v| (neighbor_sum(g.row(v), x) - rho * x[v]).abs())
        .fold(0.0, f64::max)
}

/// Result of bracketing `ρ(G)` against a threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bracket {
    /// A Rayleigh quotient certifies `ρ > threshold`.
    Above(f64),
    /// A Collatz–Wielandt bound certifies `ρ ≤ threshold`.
    AtMost(f64),
    Undecided,
}

/// Decides `ρ(G) > threshold` with certified bounds, iterating `A + I` from
/// the positive vector `start` for at most `max_iter` steps.
///
/// The lower bound is the Rayleigh quotient of the iterate; the upper bound is
/// `max_v (A·y)_v / y_v`, valid for any positive `y`.
pub fn bracket_rho(g: &Graph, start: &[f64], threshold: f64, max_iter: usize) -> Bracket {
    let n = g.n();
    let mut y: Vec<f64> = start.iter().map(|&a| if a > 0.0 { a } else { 1e-6 }).collect();
    let mut ay = vec![0.0; n];
    for _ in 0..=max_iter {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut upper = 0.0f64;
        for v in 0..n {
            let s = neighbor_sum(g.row(v), &y);
            ay[v] = s;
            num += y[v] * s;
            den += y[v] * y[v];
            upper = upper.max(s / y[v]);
        }
        let lower = num / den;
        if lower > threshold {
            return Bracket::Above(lower);
        }
        if upper <= threshold {
            return Bracket::AtMost(upper);
        }
        let mut m = 0.0f64;
        for v in 0..n {
            y[v] += ay[v];
            m = m.max(y[v]);
        }
        for e in y.iter_mut() {
            *e /= m;
        }
    }
    Bracket::Undecided
}

fn check_quotient_args(k: usize, r: usize, parts: &[usize]) -> Result<()> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    if parts.len() != r {
        return Err(Error::invalid(format!("expected {r} part sizes, got {}", parts.len())));
    }
    if parts.iter().all(|&s| s == 0) {
        return Err(Error::invalid("all part sizes are zero"));
    }
    Ok(())
}

/// The equitable quotient matrix of `K_{k-1} ∨ K_r(parts)`.
///
/// Rows `0..r` are the parts, row `r` the dominating clique (omitted when
/// `k = 1`). Entry `(i, j)` counts the neighbors a vertex of class `i` has in
/// class `j`.
pub fn quotient_matrix(k: usize, r: usize, parts: &[usize]) -> Result<Vec<Vec<f64>>> {
    check_quotient_args(k, r, parts)?;
    let dim = if k == 1 { r } else { r + 1 };
    let mut b = vec![vec![0.0; dim]; dim];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                b[i][j] = parts[j] as f64;
            }
        }
        if k > 1 {
            b[i][r] = (k - 1) as f64;
        }
    }
    if k > 1 {
        for j in 0..r {
            b[r][j] = parts[j] as f64;
        }
        b[r][r] = (k - 2) as f64;
    }
    Ok(b)
}

/// `ρ(K_{k-1} ∨ K_r(parts))` as the largest eigenvalue of the quotient matrix.
///
/// The quotient `B = N⁻¹ C` (class sizes `N`, class adjacency counts `C`) is
/// similar to the symmetric `N^{1/2} B N^{-1/2}`, whose spectrum is computed
/// by cyclic Jacobi rotations.
pub fn quotient_rho(k: usize, r: usize, parts: &[usize]) -> Result<f64> {
    let b = quotient_matrix(k, r, parts)?;
    let dim = b.len();
    let mut sizes: Vec<f64> = parts.iter().map(|&s| s as f64).collect();
    if k > 1 {
        sizes.push((k - 1) as f64);
    }
    let mut s = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            s[i][j] = if i == j {
                b[i][i]
            } else {
                // b[i][j] = size_j · a_ij, with a_ij ∈ {0, 1}.
                let a = if sizes[j] > 0.0 { b[i][j] / sizes[j] } else { 0.0 };
                a * (sizes[i] * sizes[j]).sqrt()
            };
        }
    }
    Ok(symmetric_eigenvalues(s).into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// All eigenvalues of a small symmetric matrix (cyclic Jacobi).
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for row in a.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = c * xp - sn * xq;
                    row[q] = sn * xp + c * xq;
                }
                for j in 0..n {
                    let (xp, xq) = (a[p][j], a[q][j]);
                    a[p][j] = c * xp - sn * xq;
                    a[q][j] = sn * xp + c * xq;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// `(r−1)n/r + 2(k−1)/r − (1/n)((k−1)(r+k−1)/r + r/2)`, the lower bound on the
/// spectral radius of an extremal `kK_{r+1}`-free graph.
pub fn rho_lower_bound(n: usize, k: usize, r: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be at least 1"));
    }
    let (n, k, r) = (n as f64, k as f64, r as f64);
    Ok((r - 1.0) * n / r + 2.0 * (k - 1.0) / r - ((k - 1.0) * (r + k - 1.0) / r + r / 2.0) / n)
}

/// Outcome of [`eigenvector_profile_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    #[serde(with = "crate::serde_float")]
    pub rho: f64,
    #[serde(with = "crate::serde_float")]
    pub residual: f64,
    /// Spread of the dominating entries after join-normalization.
    #[serde(with = "crate::serde_float")]
    pub dominating_spread: f64,
    pub dominating_attains_max: bool,
    /// Predicted entry per part: `(ρ+1)/(ρ+n_i)` when `k ≥ 2`, otherwise
    /// `(ρ+n_min)/(ρ+n_i)`.
    #[serde(with = "crate::serde_float::vec")]
    pub expected_part_values: Vec<f64>,
    /// Largest `|x_v − expected|` over part vertices.
    #[serde(with = "crate::serde_float")]
    pub part_deviation: f64,
    /// Smallest entry of the max-normalized vector.
    #[serde(with = "crate::serde_float")]
    pub min_entry: f64,
    /// `1 − 1/(r−1)` for `r ≥ 2`.
    #[serde(with = "crate::serde_float::option")]
    pub lower_threshold: Option<f64>,
    pub lower_bound_holds: bool,
    pub passed: bool,
}

fn check_roles(g: &Graph, roles: &[Role], k: usize, parts: &[usize]) -> Result<()> {
    let n = g.n();
    if roles.len() != n {
        return Err(Error::RoleMismatch(format!("{} roles for {n} vertices", roles.len())));
    }
    let dominating = roles.iter().filter(|r| **r == Role::Dominating).count();
    if dominating + 1 != k {
        return Err(Error::RoleMismatch(format!("{dominating} dominating vertices, expected {}", k - 1)));
    }
    let mut counts = vec![0; parts.len()];
    for role in roles {
        if let Role::Part(i) = *role {
            if i >= parts.len() {
                return Err(Error::RoleMismatch(format!("part index {i} out of range")));
            }
            counts[i] += 1;
        }
    }
    if counts != parts {
        return Err(Error::RoleMismatch(format!("part sizes {counts:?}, expected {parts:?}")));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let same_part = matches!((roles[u], roles[v]), (Role::Part(a), Role::Part(b)) if a == b);
            if g.has_edge(u, v) == same_part {
                return Err(Error::RoleMismatch(format!("pair ({u},{v}) contradicts the roles")));
            }
        }
    }
    Ok(())
}

/// Verifies the Perron vector structure of `K_{k-1} ∨ K_r(parts)`:
/// dominating entries equal and maximal, part entries equal to the predicted
/// ratio, and every entry at least `1 − 1/(r−1)` (vacuous for `r = 2`).
pub fn eigenvector_profile_check(g: &Graph, roles: &[Role], k: usize, parts: &[usize], tol: f64) -> Result<ProfileReport> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    check_roles(g, roles, k, parts)?;
    let solve_tol = (tol * 1e-2).clamp(1e-13, DEFAULT_TOL);
    let res = perron_vector(g, solve_tol)?;
    let rho = res.rho;
    let x = &res.vector;
    let r = parts.len();

    let dom: Vec<f64> = (0..g.n()).filter(|&v| roles[v] == Role::Dominating).map(|v| x[v]).collect();
    let max_entry = x.iter().copied().fold(0.0, f64::max);
    let (scale, dominating_spread, dominating_attains_max) = if dom.is_empty() {
        (max_entry, 0.0, true)
    } else {
        let mean = dom.iter().sum::<f64>() / dom.len() as f64;
        let hi = dom.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = dom.iter().copied().fold(f64::INFINITY, f64::min);
        (mean, (hi - lo) / mean, hi >= max_entry - tol)
    };

    let n_min = parts.iter().copied().filter(|&s| s > 0).min().unwrap_or(0) as f64;
    let expected_part_values: Vec<f64> = parts
        .iter()
        .map(|&s| {
            let s = s as f64;
            if k >= 2 {
                (rho + 1.0) / (rho + s)
            } else {
                (rho + n_min) / (rho + s)
            }
        })
        .collect();
    let part_deviation = (0..g.n())
        .filter_map(|v| match roles[v] {
            Role::Part(i) => Some((x[v] / scale - expected_part_values[i]).abs()),
            Role::Dominating => None,
        })
        .fold(0.0, f64::max);

    let min_entry = x.iter().copied().fold(f64::INFINITY, f64::min) / max_entry;
    let lower_threshold = (r >= 2).then(|| 1.0 - 1.0 / (r as f64 - 1.0));
    let lower_bound_holds = lower_threshold.is_none_or(|t| min_entry >= t - tol);
    let passed = dominating_spread <= tol && dominating_attains_max && part_deviation <= tol && lower_bound_holds;
    Ok(ProfileReport {
        rho,
        residual: res.residual,
        dominating_spread,
        dominating_attains_max,
        expected_part_values,
        part_deviation,
        min_entry,
        lower_threshold,
        lower_bound_holds,
        passed,
    })
}

/// Degree-based certificate: `ρ ≤ min(Δ, √(2e))`.
pub fn rho_upper_bound(g: &Graph) -> f64 {
    (g.max_degree() as f64).min((2.0 * g.edge_count() as f64).sqrt())
}

#[allow(dead_code)]
pub(crate) fn support(x: &[f64]) -> Vec<u64> {
    let mut s = vec![0u64; bits::words_for(x.len())];
    for (v, &e) in x.iter().enumerate() {
        if e > 0.0 {
            bits::insert(&mut s, v);
        }
    }
    s
}
