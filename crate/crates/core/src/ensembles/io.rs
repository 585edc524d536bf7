//! Matrix container formats.
//!
//! Binary layout, all little-endian:
//!
//! | field   | type     |
//! |---------|----------|
//! | magic   | `b"LVSPMAT\0"` |
//! | version | u32 (= 1) |
//! | n       | u64 |
//! | flags   | u32: bit 0 `h_n` set, bit 1 `tau` set, bit 2 `epsilon` set |
//! | seed    | u64 |
//! | h_n     | f64 (NaN when unset) |
//! | tau     | f64 (NaN when unset) |
//! | epsilon | f64 (NaN when unset) |
//!
//! followed by the lower triangle (diagonal included) row by row as f64.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::{SampleMeta, SymmetricMatrixSample};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

const MAGIC: &[u8; 8] = b"LVSPMAT\0";
const VERSION: u32 = 1;

fn opt_to_f64(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn write_binary<W: Write>(m: &SymmetricMatrixSample, mut w: W) -> Result<()> {
    let flags = (m.meta.h_n.is_some() as u32) | ((m.meta.tau.is_some() as u32) << 1) | ((m.meta.epsilon.is_some() as u32) << 2);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&m.meta.seed.to_le_bytes())?;
    w.write_all(&opt_to_f64(m.meta.h_n).to_le_bytes())?;
    w.write_all(&opt_to_f64(m.meta.tau).to_le_bytes())?;
    w.write_all(&opt_to_f64(m.meta.epsilon).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * (m.n() + 1));
    for i in 0..m.n() {
        buf.clear();
        for j in 0..=i {
            buf.extend_from_slice(&m.get(i, j).to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated matrix header or body: {e}")))?;
    Ok(b)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<SymmetricMatrixSample> {
    let magic: [u8; 8] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic; not a levyspec matrix file".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    let n = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let flags = u32::from_le_bytes(read_array(&mut r)?);
    let seed = u64::from_le_bytes(read_array(&mut r)?);
    let h_n = f64::from_le_bytes(read_array(&mut r)?);
    let tau = f64::from_le_bytes(read_array(&mut r)?);
    let epsilon = f64::from_le_bytes(read_array(&mut r)?);
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v = f64::from_le_bytes(read_array(&mut r)?);
            if i == j {
                if v != 0.0 {
                    return Err(Error::Format(format!("nonzero diagonal at {i}")));
                }
            } else {
                m.set_sym(i, j, v);
            }
        }
    }
    let meta = SampleMeta {
        seed,
        h_n: (flags & 1 != 0).then_some(h_n),
        tau: (flags & 2 != 0).then_some(tau),
        epsilon: (flags & 4 != 0).then_some(epsilon),
    };
    SymmetricMatrixSample::new(m, meta)
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    n: usize,
    #[serde(flatten)]
    meta: SampleMeta,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    row: usize,
    lower: Vec<f64>,
}

/// First line: `{"n", "seed", "epsilon", "h_n", "tau"}`; then one
/// `{"row": i, "lower": [M(i,0), ..., M(i,i)]}` per row.
pub fn write_json_lines<W: Write>(m: &SymmetricMatrixSample, mut w: W) -> Result<()> {
    serde_json::to_writer(&mut w, &JsonHeader { n: m.n(), meta: m.meta })?;
    writeln!(w)?;
    for i in 0..m.n() {
        let lower = (0..=i).map(|j| m.get(i, j)).collect();
        serde_json::to_writer(&mut w, &JsonRow { row: i, lower })?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_json_lines<R: BufRead>(r: R) -> Result<SymmetricMatrixSample> {
    let mut lines = r.lines();
    let header: JsonHeader = serde_json::from_str(&lines.next().ok_or_else(|| Error::Format("empty input".into()))??)?;
    let mut m = SymMatrix::zeros(header.n);
    let mut seen = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(&line)?;
        if row.row >= header.n || row.lower.len() != row.row + 1 {
            return Err(Error::Format(format!("malformed row record {}", row.row)));
        }
        for (j, &v) in row.lower.iter().enumerate().take(row.row) {
            m.set_sym(row.row, j, v);
        }
        seen += 1;
    }
    if seen != header.n {
        return Err(Error::Format(format!("expected {} rows, found {seen}", header.n)));
    }
    SymmetricMatrixSample::new(m, header.meta)
}
