use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Fields, Form, State};
use crate::spectral::{make_grid, Dealias, SpectralScalar, SpectralVector};

/// One sample of a time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub h3: f64,
    pub hm: f64,
    pub hdot_minus_s: f64,
    /// `‖Λ^l (u, η)‖` for each configured `l`.
    pub hdot_l: Vec<f64>,
    pub ubar_l2: f64,
    pub hypo: f64,
    /// `‖Λ^l (u, η)‖ (1+t)^{(s+l)/2}` for each configured `l`.
    pub envelope: Vec<f64>,
    pub mean_eta: f64,
    #[serde(flatten)]
    pub ledger: BTreeMap<String, f64>,
}

/// Write a header line followed by one JSON object per record.
pub fn write_series(
    path: &Path,
    header: &serde_json::Value,
    records: &[TimeSeriesRecord],
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", serde_json::json!({ "header": header })).map_err(io)?;
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_series(path: &Path) -> Result<(serde_json::Value, Vec<TimeSeriesRecord>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut header = serde_json::Value::Null;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |e: serde_json::Error| Error::Checkpoint {
            path: path.into(),
            reason: format!("line {}: {e}", i + 1),
        };
        if i == 0 {
            let v: serde_json::Value = serde_json::from_str(&line).map_err(bad)?;
            if let Some(h) = v.get("header") {
                header = h.clone();
                continue;
            }
        }
        out.push(serde_json::from_str(&line).map_err(bad)?);
    }
    Ok((header, out))
}

const MAGIC: &[u8; 4] = b"TTLB";
const VERSION: u32 = 1;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Binary checkpoint: magic, version, `d, n, L, t`, coefficients of
/// `u_1..u_d, η` as little-endian `(re, im)` pairs, then an FNV-1a checksum of the payload.
pub fn write_checkpoint(path: &Path, state: &State) -> Result<()> {
    let g = state.grid();
    let mut payload = Vec::with_capacity(g.len() * (g.d() + 1) * 16);
    for c in state.fields.scalars() {
        for z in c.coeffs() {
            payload.extend_from_slice(&z.re.to_le_bytes());
            payload.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let mut buf = Vec::with_capacity(payload.len() + 48);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.d() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&g.box_length().to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    buf.extend_from_slice(&payload);
    buf.extend_from_slice(&fnv1a64(&payload).to_le_bytes());
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Read a checkpoint into a perturbation-form state on a one-half dealiased grid.
pub fn read_checkpoint(path: &Path) -> Result<State> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |reason: String| Error::Checkpoint {
        path: path.into(),
        reason,
    };
    const HEAD: usize = 4 + 4 + 8 * 4;
    if bytes.len() < HEAD + 8 {
        return Err(bad(format!("truncated: {} bytes", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let d = u64_at(8) as usize;
    let n = u64_at(16) as usize;
    let box_length = f64::from_bits(u64_at(24));
    let t = f64::from_bits(u64_at(32));
    let grid = make_grid(d, n, box_length, Dealias::OneHalf).map_err(|e| bad(e.to_string()))?;
    let want = grid.len() * (d + 1) * 16;
    if bytes.len() != HEAD + want + 8 {
        return Err(bad(format!(
            "expected {} bytes, found {}",
            HEAD + want + 8,
            bytes.len()
        )));
    }
    let payload = &bytes[HEAD..HEAD + want];
    if fnv1a64(payload) != u64_at(HEAD + want) {
        return Err(bad("checksum mismatch".into()));
    }
    let mut scalars = Vec::with_capacity(d + 1);
    for c in payload.chunks(grid.len() * 16) {
        let coeffs: Vec<Complex64> = c
            .chunks(16)
            .map(|z| {
                Complex64::new(
                    f64::from_le_bytes(z[..8].try_into().unwrap()),
                    f64::from_le_bytes(z[8..].try_into().unwrap()),
                )
            })
            .collect();
        scalars.push(SpectralScalar::from_coeffs(&grid, coeffs)?);
    }
    let eta = scalars.pop().unwrap();
    let fields = Fields::new(SpectralVector::from_components(scalars)?, eta)?;
    Ok(State::new(fields, t, Form::Perturbation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}
