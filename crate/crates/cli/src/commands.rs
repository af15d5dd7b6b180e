use std::path::Path;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use turan_core::audit::audit;
use turan_core::combinatorics::{chvatal_hanson, chvatal_hanson_oracle, ex_kkr1, ExValue, OracleValue};
use turan_core::graph::MAX_VERTICES;
use turan_core::search::{
    crossover_scan, exhaustive_extremal, local_search_extremal, CrossoverOptions, LocalOptions, Objective,
};
use turan_core::spectral::{eigenvector_profile_check, ProfileReport};
use turan_core::{extremal_graph, graph6, is_free, quotient_rho, serde_float, spectral_radius, CliquePacking};
use turan_core::{DominatedMultipartite, Graph, SearchReport, SpectralResult, Verdict};

use crate::args::{Cli, Command, GraphSource, Nkr, ObjectiveArg};
use crate::report::{payload_text, Table};

/// Errors that end the run with status 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
}

impl From<turan_core::Error> for Failure {
    fn from(e: turan_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<graph6::Graph6Error> for Failure {
    fn from(e: graph6::Graph6Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub struct Outcome {
    pub payload: Value,
    pub table: Table,
    /// A verification verdict failed; status 1.
    pub failed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn f(v: f64) -> String {
    serde_float::to_text(v)
}

const DEFAULT_TOL: f64 = 1e-10;

/// Fills in the tolerance from `TURAN_TOL` or the default, so the
/// normalized arguments always carry it.
pub fn prepare(command: &mut Command) -> Result<(), Failure> {
    let common = command.common_mut();
    if common.tol.is_none() {
        common.tol = Some(match std::env::var("TURAN_TOL") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("TURAN_TOL is not a number: {v:?}")))?,
            Err(_) => DEFAULT_TOL,
        });
    }
    Ok(())
}

pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    let common = command.common();
    let tol = common.tol.expect("tolerance resolved before dispatch");
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let assert = common.assert;
    match command {
        Command::Construct { nkr, .. } => construct(nkr),
        Command::Rho { source, k, r, .. } => rho(source, *k, *r, tol),
        Command::Free { source, k, r, .. } => free(source, *k, *r, assert),
        Command::Ex { n, k, r, .. } => {
            let mut rows = Vec::new();
            for n in n.iter() {
                for k in k.iter() {
                    for r in r.iter() {
                        rows.push(ex_row(n, k, r)?);
                    }
                }
            }
            let failed = assert && rows.iter().any(|row| !row.consistent);
            let table = Table::new(
                &["n", "k", "r", "value", "formula_regime", "construction_edges", "consistent"],
                rows.iter()
                    .map(|x| {
                        vec![
                            x.n.to_string(),
                            x.k.to_string(),
                            x.r.to_string(),
                            x.ex.value.to_string(),
                            x.ex.formula_regime.to_string(),
                            x.construction_edges.map(|e| e.to_string()).unwrap_or_default(),
                            x.consistent.to_string(),
                        ]
                    })
                    .collect(),
            );
            Ok(Outcome { payload: to_value(&rows), table, failed })
        }
        Command::F { nu, delta, oracle_n_max, .. } => {
            let mut rows = Vec::new();
            for nu in nu.iter() {
                for delta in delta.iter() {
                    rows.push(f_row(nu as u64, delta as u64, *oracle_n_max)?);
                }
            }
            let failed = assert && rows.iter().any(|row| !row.consistent);
            let table = Table::new(
                &["nu", "delta", "value", "oracle_value", "attained", "witness", "consistent"],
                rows.iter()
                    .map(|x| {
                        vec![
                            x.nu.to_string(),
                            x.delta.to_string(),
                            x.value.to_string(),
                            x.oracle.as_ref().map(|o| o.value.to_string()).unwrap_or_default(),
                            x.oracle.as_ref().map(|o| o.attained.to_string()).unwrap_or_default(),
                            x.oracle.as_ref().map(|o| o.witness.clone()).unwrap_or_default(),
                            x.consistent.to_string(),
                        ]
                    })
                    .collect(),
            );
            Ok(Outcome { payload: to_value(&rows), table, failed })
        }
        Command::SearchExhaustive { nkr, objective, .. } => {
            let objective = match objective {
                ObjectiveArg::Spectral => Objective::Spectral,
                ObjectiveArg::Edges => Objective::Edges,
            };
            Ok(search_outcome(exhaustive_extremal(nkr.n, nkr.k, nkr.r, objective)?, assert))
        }
        Command::SearchLocal { nkr, restarts, max_moves, common } => {
            let options = LocalOptions {
                restarts: *restarts,
                seed: common.seed,
                max_moves: *max_moves,
                ..LocalOptions::default()
            };
            Ok(search_outcome(local_search_extremal(nkr.n, nkr.k, nkr.r, &options)?, assert))
        }
        Command::Crossover { n, k, r, exhaustive_max, restarts, common } => {
            let options = CrossoverOptions {
                exhaustive_max: *exhaustive_max,
                local: LocalOptions {
                    restarts: *restarts,
                    seed: common.seed,
                    ..LocalOptions::default()
                },
            };
            let rep = crossover_scan(*k, *r, n.lo, n.hi, &options)?;
            // Asserting a crossover means the conjecture holds at the top of the range.
            let failed = assert && rep.rows.last().is_none_or(|row| row.matches_conjecture != Verdict::Yes);
            let table = Table::new(
                &["n", "mode", "winner", "best_rho", "conjecture_rho", "matches_conjecture"],
                rep.rows
                    .iter()
                    .map(|x| {
                        vec![
                            x.n.to_string(),
                            text(&x.mode),
                            x.winner.clone(),
                            f(x.best_rho),
                            f(x.conjecture_rho),
                            text(&x.matches_conjecture),
                        ]
                    })
                    .collect(),
            );
            Ok(Outcome { payload: to_value(&rep), table, failed })
        }
        Command::Audit { source, k, r, common } => {
            let (g, _) = load_graph(source, Some(*k), Some(*r))?;
            let rep = audit(&g, *k, *r, None, common.seed)?;
            let table = Table::new(
                &["clause", "holds", "detail"],
                rep.structure
                    .clauses
                    .iter()
                    .map(|c| vec![c.name.clone(), c.holds.to_string(), c.detail.clone()])
                    .collect(),
            );
            Ok(Outcome { payload: to_value(&rep), table, failed: assert && !rep.passed })
        }
        Command::Replay { report, .. } => replay(report),
    }
}

/// Plain string form of a unit enum serialized by serde.
fn text<T: Serialize>(v: &T) -> String {
    match to_value(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Usage(format!("stdin: {e}")))
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn load_graph(
    source: &GraphSource,
    k: Option<usize>,
    r: Option<usize>,
) -> Result<(Graph, Option<DominatedMultipartite>), Failure> {
    match (&source.graph6, source.n) {
        (Some(path), _) => {
            let mut graphs = graph6::decode_all(&read_input(path)?)?;
            if graphs.len() != 1 {
                return Err(Failure::Usage(format!(
                    "{}: expected one graph6 line, found {}",
                    path.display(),
                    graphs.len()
                )));
            }
            Ok((graphs.pop().expect("one graph"), None))
        }
        (None, Some(n)) => {
            let (Some(k), Some(r)) = (k, r) else {
                return Err(Failure::Usage("--n needs --k and --r".into()));
            };
            let d = extremal_graph(n, k, r)?;
            Ok((d.graph.clone(), Some(d)))
        }
        (None, None) => Err(Failure::Usage("give --graph6 <file> or --n --k --r".into())),
    }
}

#[derive(Serialize)]
struct Construction {
    n: usize,
    k: usize,
    r: usize,
    parts: Vec<usize>,
    edges: usize,
    graph6: String,
}

fn construct(nkr: &Nkr) -> Result<Outcome, Failure> {
    let d = extremal_graph(nkr.n, nkr.k, nkr.r)?;
    let c = Construction {
        n: nkr.n,
        k: nkr.k,
        r: nkr.r,
        parts: d.parts.clone(),
        edges: d.graph.edge_count(),
        graph6: graph6::encode(&d.graph),
    };
    let table = Table::new(
        &["n", "k", "r", "edges", "graph6"],
        vec![vec![c.n.to_string(), c.k.to_string(), c.r.to_string(), c.edges.to_string(), c.graph6.clone()]],
    );
    Ok(Outcome { payload: to_value(&c), table, failed: false })
}

#[derive(Serialize)]
struct RhoPayload {
    graph6: String,
    n: usize,
    edges: usize,
    #[serde(flatten)]
    result: SpectralResult,
    #[serde(with = "serde_float::option")]
    quotient_rho: Option<f64>,
    profile: Option<ProfileReport>,
}

fn rho(source: &GraphSource, k: Option<usize>, r: Option<usize>, tol: f64) -> Result<Outcome, Failure> {
    let (g, family) = load_graph(source, k, r)?;
    let result = spectral_radius(&g, tol)?;
    let (quotient, profile) = match &family {
        Some(d) => {
            let r = r.expect("family built from --r");
            (
                Some(quotient_rho(d.k, r, &d.parts)?),
                Some(eigenvector_profile_check(&d.graph, &d.roles, d.k, &d.parts, tol)?),
            )
        }
        None => (None, None),
    };
    let table = Table::new(
        &["n", "edges", "rho", "residual", "iterations", "converged"],
        vec![vec![
            g.n().to_string(),
            g.edge_count().to_string(),
            f(result.rho),
            f(result.residual),
            result.iterations.to_string(),
            result.converged.to_string(),
        ]],
    );
    // A non-converged eigensolve is always a failed verification.
    let failed = !result.converged;
    let payload = RhoPayload {
        graph6: graph6::encode(&g),
        n: g.n(),
        edges: g.edge_count(),
        result,
        quotient_rho: quotient,
        profile,
    };
    Ok(Outcome { payload: to_value(&payload), table, failed })
}

#[derive(Serialize)]
struct FreePayload {
    graph6: String,
    n: usize,
    k: usize,
    r: usize,
    free: bool,
    witness: Option<CliquePacking>,
}

fn free(source: &GraphSource, k: usize, r: usize, assert: bool) -> Result<Outcome, Failure> {
    let (g, _) = load_graph(source, Some(k), Some(r))?;
    let verdict = is_free(&g, k, r)?;
    let witness_text = verdict
        .witness
        .as_ref()
        .map(|w| {
            w.cliques
                .iter()
                .map(|c| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default();
    let table = Table::new(
        &["n", "k", "r", "free", "witness"],
        vec![vec![g.n().to_string(), k.to_string(), r.to_string(), verdict.free.to_string(), witness_text]],
    );
    let payload = FreePayload {
        graph6: graph6::encode(&g),
        n: g.n(),
        k,
        r,
        free: verdict.free,
        witness: verdict.witness,
    };
    Ok(Outcome { payload: to_value(&payload), table, failed: assert && !payload.free })
}

#[derive(Serialize)]
struct ExRow {
    n: usize,
    k: usize,
    r: usize,
    #[serde(flatten)]
    ex: ExValue,
    /// Edge count of the extremal construction, when it fits in memory.
    construction_edges: Option<u64>,
    /// Formula regime implies the construction attains the formula.
    consistent: bool,
}

fn ex_row(n: usize, k: usize, r: usize) -> Result<ExRow, Failure> {
    let ex = ex_kkr1(n, k, r)?;
    let construction_edges = if n <= MAX_VERTICES && n >= k.saturating_sub(1) + r {
        Some(extremal_graph(n, k, r)?.graph.edge_count() as u64)
    } else {
        None
    };
    let consistent = !ex.formula_regime || construction_edges.is_none_or(|e| e == ex.value);
    Ok(ExRow { n, k, r, ex, construction_edges, consistent })
}

#[derive(Serialize)]
struct FRow {
    nu: u64,
    delta: u64,
    value: u64,
    oracle: Option<OracleValue>,
    /// The oracle never exceeds the formula and equals it when attained.
    consistent: bool,
}

fn f_row(nu: u64, delta: u64, oracle_n_max: Option<usize>) -> Result<FRow, Failure> {
    let value = chvatal_hanson(nu, delta)?;
    let oracle = oracle_n_max.map(|m| chvatal_hanson_oracle(nu, delta, m)).transpose()?;
    let consistent = oracle.as_ref().is_none_or(|o| o.value <= value && (!o.attained || o.value == value));
    Ok(FRow { nu, delta, value, oracle, consistent })
}

fn search_outcome(rep: SearchReport, assert: bool) -> Outcome {
    let table = Table::new(
        &["graph6", "canonical", "rho", "edges", "free", "is_conjecture"],
        rep.winners
            .iter()
            .map(|w| {
                vec![
                    w.graph6.clone(),
                    w.canonical.to_string(),
                    f(w.rho),
                    w.edges.to_string(),
                    w.free.to_string(),
                    w.is_conjecture.to_string(),
                ]
            })
            .collect(),
    );
    let failed = assert && (rep.matches_conjecture != Verdict::Yes || rep.ex_consistent == Some(false));
    Outcome { payload: to_value(&rep), table, failed }
}

#[derive(Serialize)]
struct ReplayPayload {
    report: String,
    argv: Vec<String>,
    identical: bool,
    /// 1-based line of the first differing payload line.
    first_difference: Option<usize>,
}

fn replay(path: &Path) -> Result<Outcome, Failure> {
    let original: Value = serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::Usage(format!("{}: not a JSON report: {e}", path.display())))?;
    let argv: Vec<String> = original
        .get("argv")
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(|v| v.as_str().map(String::from)).collect())
        .ok_or_else(|| Failure::Usage(format!("{}: report has no argv", path.display())))?;
    let cli = Cli::try_parse_from(std::iter::once("turan".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| Failure::Usage(format!("report argv: {}", e.to_string().lines().next().unwrap_or(""))))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(Failure::Usage("a replay report cannot be replayed".into()));
    }
    let before = original
        .get("payload")
        .ok_or_else(|| Failure::Usage(format!("{}: report has no payload", path.display())))?;
    let mut command = cli.command;
    prepare(&mut command)?;
    let after = execute(&command)?.payload;
    let (a, b) = (payload_text(before), payload_text(&after));
    let first_difference = (a != b).then(|| {
        a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or(a.lines().count().min(b.lines().count())) + 1
    });
    let payload = ReplayPayload {
        report: path.display().to_string(),
        argv,
        identical: first_difference.is_none(),
        first_difference,
    };
    let table = Table::new(
        &["report", "identical"],
        vec![vec![payload.report.clone(), payload.identical.to_string()]],
    );
    Ok(Outcome { failed: !payload.identical, payload: to_value(&payload), table })
}
