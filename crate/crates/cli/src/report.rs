use std::io::Write;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, Common, Format};
use crate::commands::Failure;

/// Report wrapper. `argv` reproduces `payload` exactly; the timestamp follows
/// `SOURCE_DATE_EPOCH` when set.
#[derive(Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Value,
    pub argv: Vec<String>,
    pub seed: u64,
    pub timestamp: String,
    pub payload: Value,
}

impl Envelope {
    pub fn new(command: &Command, payload: Value) -> Envelope {
        let mut args = serde_json::to_value(command).expect("arguments serialize");
        if let Value::Object(map) = &mut args {
            map.remove("command");
        }
        Envelope {
            tool: "turan",
            version: env!("CARGO_PKG_VERSION"),
            command: command.name(),
            args,
            argv: command.argv(),
            seed: command.common().seed,
            timestamp: timestamp(),
            payload,
        }
    }
}

fn timestamp() -> String {
    let when = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    when.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Canonical text of a payload, the unit of the determinism comparison.
pub fn payload_text(payload: &Value) -> String {
    serde_json::to_string_pretty(payload).expect("JSON values serialize")
}

/// Flat per-row summary written by `--format csv`.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str], rows: Vec<Vec<String>>) -> Table {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        }
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

pub fn emit(envelope: &Envelope, table: &Table, common: &Common) -> Result<(), Failure> {
    let bytes = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(envelope).expect("envelope serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => table.to_bytes(),
    };
    match &common.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
