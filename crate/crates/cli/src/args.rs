use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Inclusive integer range written `A` or `A..=B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: {t:?}"));
        if let Some((a, b)) = s.split_once("..=") {
            let (lo, hi) = (num(a)?, num(b)?);
            if lo > hi {
                return Err(format!("empty range {s:?}"));
            }
            Ok(Span { lo, hi })
        } else if s.contains("..") {
            Err(format!("ranges are inclusive and written A..=B, got {s:?}"))
        } else {
            let v = num(s)?;
            Ok(Span { lo: v, hi: v })
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..={}", self.lo, self.hi)
        }
    }
}

impl Serialize for Span {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveArg {
    Spectral,
    Edges,
}

/// Flags shared by every subcommand. Field names double as flag names when
/// an envelope is replayed.
#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Numeric tolerance; defaults to $TURAN_TOL, else 1e-10.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report path (written atomically); stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
    /// Worker threads for the parallel scans.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Exit with status 1 when the verdict fails (conjecture mismatch, not
    /// free, failed audit, inconsistent table).
    #[arg(long)]
    pub assert: bool,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Nkr {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: usize,
}

/// Either a graph6 file (one graph per line, `-` for stdin) or the extremal
/// graph for `--n --k --r`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct GraphSource {
    #[arg(long, conflicts_with = "n")]
    pub graph6: Option<PathBuf>,
    #[arg(long, requires_all = ["k", "r"])]
    pub n: Option<usize>,
}

#[derive(Parser, Debug)]
#[command(name = "turan", version, about = "Spectral extremal graphs without k disjoint (r+1)-cliques")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// graph6 of K_{k-1} ∨ T_{n-k+1,r}.
    Construct {
        #[command(flatten)]
        #[serde(flatten)]
        nkr: Nkr,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Spectral radius and Perron vector.
    Rho {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Exact kK_{r+1}-freeness with a packing certificate.
    Free {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Turán numbers of kK_{r+1} over ranges.
    Ex {
        #[arg(long)]
        n: Span,
        #[arg(long)]
        k: Span,
        #[arg(long)]
        r: Span,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Chvátal–Hanson values over ranges, optionally against exhaustive search.
    F {
        #[arg(long)]
        nu: Span,
        #[arg(long)]
        delta: Span,
        /// Run the enumeration oracle on graphs with at most this many vertices.
        #[arg(long)]
        oracle_n_max: Option<usize>,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Exhaustive extremal search over all classes on n ≤ 10 vertices.
    SearchExhaustive {
        #[command(flatten)]
        #[serde(flatten)]
        nkr: Nkr,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Spectral)]
        objective: ObjectiveArg,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Seeded hill climbing from perturbed and random starts.
    SearchLocal {
        #[command(flatten)]
        #[serde(flatten)]
        nkr: Nkr,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        max_moves: Option<usize>,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Per-n verdicts and the empirical threshold.
    Crossover {
        #[arg(long)]
        n: Span,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        /// Largest n scanned exhaustively; local search above it.
        #[arg(long, default_value_t = 9)]
        exhaustive_max: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Structural audit against a crossing-maximal partition.
    Audit {
        #[command(flatten)]
        #[serde(flatten)]
        source: GraphSource,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Re-run a report's command and compare payload bytes.
    Replay {
        report: PathBuf,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct { .. } => "construct",
            Command::Rho { .. } => "rho",
            Command::Free { .. } => "free",
            Command::Ex { .. } => "ex",
            Command::F { .. } => "f",
            Command::SearchExhaustive { .. } => "search-exhaustive",
            Command::SearchLocal { .. } => "search-local",
            Command::Crossover { .. } => "crossover",
            Command::Audit { .. } => "audit",
            Command::Replay { .. } => "replay",
        }
    }

    pub fn common_mut(&mut self) -> &mut Common {
        match self {
            Command::Construct { common, .. }
            | Command::Rho { common, .. }
            | Command::Free { common, .. }
            | Command::Ex { common, .. }
            | Command::F { common, .. }
            | Command::SearchExhaustive { common, .. }
            | Command::SearchLocal { common, .. }
            | Command::Crossover { common, .. }
            | Command::Audit { common, .. }
            | Command::Replay { common, .. } => common,
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Construct { common, .. }
            | Command::Rho { common, .. }
            | Command::Free { common, .. }
            | Command::Ex { common, .. }
            | Command::F { common, .. }
            | Command::SearchExhaustive { common, .. }
            | Command::SearchLocal { common, .. }
            | Command::Crossover { common, .. }
            | Command::Audit { common, .. }
            | Command::Replay { common, .. } => common,
        }
    }

    /// Normalized argument list that reproduces this command. Output
    /// location, format and thread count do not affect the payload and are
    /// left out.
    pub fn argv(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("arguments serialize");
        let mut argv = vec![self.name().to_string()];
        let serde_json::Value::Object(map) = value else {
            unreachable!("tagged enum serializes to an object")
        };
        for (key, v) in map {
            if key == "command" {
                continue;
            }
            if key == "report" {
                argv.push(v.as_str().unwrap_or_default().to_string());
                continue;
            }
            let flag = format!("--{}", key.replace('_', "-"));
            match v {
                serde_json::Value::Null | serde_json::Value::Bool(false) => {}
                serde_json::Value::Bool(true) => argv.push(flag),
                serde_json::Value::String(s) => argv.extend([flag, s]),
                other => argv.extend([flag, other.to_string()]),
            }
        }
        argv
    }
}
