//! Run persistence: binary snapshots, CSV time series, and JSON reports.
//!
//! Snapshots use a little-endian binary format ("BHF1"): a 4-byte magic,
//! the grid size as u64, the domain half-width and the time as f64, then
//! the raw sample array.  CSV columns are written with 17 significant
//! digits so that float64 values round-trip exactly; diagnostics downstream
//! involve differencing, where shortened decimals would inject noise.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read as _, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::error::{BhError, Result};
use crate::evolve::PhysState;
use crate::grid::{Field, SpectralGrid};

const MAGIC: &[u8; 4] = b"BHF1";

/// Format one f64 with full round-trip precision.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a snapshot in the BHF1 binary format.
pub fn write_snapshot(path: &Path, state: &PhysState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(state.u.grid().n() as u64).to_le_bytes())?;
    w.write_all(&state.u.grid().half_width().to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    for &v in state.u.samples() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a BHF1 snapshot back.
pub fn read_snapshot(path: &Path) -> Result<PhysState> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(BhError::Format(format!(
            "{}: bad magic {:?}, expected BHF1",
            path.display(),
            magic
        )));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let half_width = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let t = f64::from_le_bytes(b8);
    let grid = SpectralGrid::new(n, half_width)?;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8)?;
        samples.push(f64::from_le_bytes(b8));
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(BhError::Format(format!(
            "{}: trailing bytes after {} samples",
            path.display(),
            n
        )));
    }
    Ok(PhysState { t, u: Field::from_samples(grid, samples)? })
}

/// Write a CSV file with a header row and full-precision float columns.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(BhError::Format(format!(
                "CSV row width {} does not match header width {}",
                row.len(),
                header.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Serialize a report as pretty-printed JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| BhError::Format(format!("JSON serialization failed: {e}")))?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
