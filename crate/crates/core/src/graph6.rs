//! graph6 text encoding (upper triangle, column by column, six bits per byte).

use thiserror::Error;

use crate::graph::{Graph, MAX_VERTICES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("graph6: empty input")]
    Empty,
    #[error("graph6: byte {byte:#04x} at offset {offset} is outside [63, 126]")]
    BadByte { byte: u8, offset: usize },
    #[error("graph6: malformed size header")]
    BadHeader,
    #[error("graph6: payload has {got} bytes, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("graph6: nonzero padding bits")]
    Padding,
    #[error("graph6: {n} vertices exceeds capacity {MAX_VERTICES}")]
    Capacity { n: u64 },
}

fn encode_size(n: usize, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

/// Encodes with the shortest size header.
pub fn encode(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(8 + (n * n.saturating_sub(1) / 2).div_ceil(6));
    encode_size(n, &mut out);
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

fn sextet(bytes: &[u8], offset: usize) -> Result<u64, Graph6Error> {
    let b = bytes[offset];
    if !(63..=126).contains(&b) {
        return Err(Graph6Error::BadByte { byte: b, offset });
    }
    Ok((b - 63) as u64)
}

fn decode_size(bytes: &[u8]) -> Result<(u64, usize), Graph6Error> {
    if bytes.is_empty() {
        return Err(Graph6Error::Empty);
    }
    if bytes[0] != 126 {
        return Ok((sextet(bytes, 0)?, 1));
    }
    let (start, len) = if bytes.get(1) == Some(&126) { (2, 6) } else { (1, 3) };
    if bytes.len() < start + len {
        return Err(Graph6Error::BadHeader);
    }
    let mut n = 0u64;
    for i in start..start + len {
        n = (n << 6) | sextet(bytes, i)?;
    }
    Ok((n, start + len))
}

/// Decodes one graph6 line; trailing CR/LF is ignored.
pub fn decode(line: &str) -> Result<Graph, Graph6Error> {
    let bytes = line.trim_end_matches(['\n', '\r']).as_bytes();
    let (n, header) = decode_size(bytes)?;
    if n > MAX_VERTICES as u64 {
        return Err(Graph6Error::Capacity { n });
    }
    let n = n as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    let payload = &bytes[header..];
    if payload.len() != expected {
        return Err(Graph6Error::Length {
            got: payload.len(),
            expected,
        });
    }
    let mut g = Graph::new(n).map_err(|_| Graph6Error::Capacity { n: n as u64 })?;
    let mut bit = 0usize;
    let mut values = Vec::with_capacity(expected);
    for i in 0..payload.len() {
        values.push(sextet(payload, i)?);
    }
    for j in 1..n {
        for i in 0..j {
            if (values[bit / 6] >> (5 - bit % 6)) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    if nbits % 6 != 0 {
        let pad = 6 - nbits % 6;
        if values[expected - 1] & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::Padding);
        }
    }
    Ok(g)
}

/// Decodes every non-blank line of `text`.
pub fn decode_all(text: &str) -> Result<Vec<Graph>, Graph6Error> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(">>graph6<<"))
        .map(decode)
        .collect()
}
