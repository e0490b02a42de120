use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::state::StateField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

impl SnapshotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SnapshotFormat::Csv => "csv",
            SnapshotFormat::Binary => "bin",
        }
    }
}

/// Contents of a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotData {
    pub t: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub eps: Vec<f64>,
    pub mom_x: Vec<f64>,
    pub mom_y: Vec<f64>,
}

impl SnapshotData {
    pub fn from_state(t: f64, state: &StateField) -> Self {
        let g = state.grid();
        Self {
            t,
            nx: g.nx,
            ny: g.ny,
            dx: g.dx,
            dy: g.dy,
            eps: state.eps().to_vec(),
            mom_x: state.mom_x().to_vec(),
            mom_y: state.mom_y().to_vec(),
        }
    }
}

/// Writes `state` at time `t`.
///
/// CSV: a `t,nx,ny,dx,dy` header line and its values, then an
/// `eps,rho_u,rho_v` header and one line per cell in row-major order.
/// Binary: the five header values and the three arrays as little-endian `f64`.
pub fn write_snapshot(
    path: &Path,
    t: f64,
    state: &StateField,
    format: SnapshotFormat,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let g = state.grid();
    match format {
        SnapshotFormat::Csv => {
            writeln!(w, "t,nx,ny,dx,dy")?;
            writeln!(w, "{},{},{},{},{}", t, g.nx, g.ny, g.dx, g.dy)?;
            writeln!(w, "eps,rho_u,rho_v")?;
            for k in 0..g.len() {
                writeln!(
                    w,
                    "{},{},{}",
                    state.eps()[k],
                    state.mom_x()[k],
                    state.mom_y()[k]
                )?;
            }
        }
        SnapshotFormat::Binary => {
            for v in [t, g.nx as f64, g.ny as f64, g.dx, g.dy] {
                w.write_all(&v.to_le_bytes())?;
            }
            for arr in [state.eps(), state.mom_x(), state.mom_y()] {
                for v in arr {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path, format: SnapshotFormat) -> Result<SnapshotData> {
    let bad = |reason: String| Error::MalformedSnapshot {
        path: path.to_path_buf(),
        reason,
    };
    let file = File::open(path)?;
    match format {
        SnapshotFormat::Csv => {
            let mut lines = BufReader::new(file).lines();
            let mut next = |what: &str| -> Result<String> {
                lines
                    .next()
                    .transpose()?
                    .ok_or_else(|| bad(format!("missing {what}")))
            };
            if next("header")?.trim() != "t,nx,ny,dx,dy" {
                return Err(bad("unexpected header".into()));
            }
            let head = next("header values")?;
            let f: Vec<&str> = head.trim().split(',').collect();
            if f.len() != 5 {
                return Err(bad(format!("header has {} fields", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
            let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
            let (t, nx, ny, dx, dy) = (num(f[0])?, int(f[1])?, int(f[2])?, num(f[3])?, num(f[4])?);
            if next("column header")?.trim() != "eps,rho_u,rho_v" {
                return Err(bad("unexpected column header".into()));
            }
            let n = nx * ny;
            let (mut eps, mut mx, mut my) = (
                Vec::with_capacity(n),
                Vec::with_capacity(n),
                Vec::with_capacity(n),
            );
            for k in 0..n {
                let line = next(&format!("cell {k}"))?;
                let f: Vec<&str> = line.trim().split(',').collect();
                if f.len() != 3 {
                    return Err(bad(format!("cell {k} has {} fields", f.len())));
                }
                eps.push(num(f[0])?);
                mx.push(num(f[1])?);
                my.push(num(f[2])?);
            }
            Ok(SnapshotData {
                t,
                nx,
                ny,
                dx,
                dy,
                eps,
                mom_x: mx,
                mom_y: my,
            })
        }
        SnapshotFormat::Binary => {
            let mut bytes = Vec::new();
            BufReader::new(file).read_to_end(&mut bytes)?;
            if bytes.len() % 8 != 0 || bytes.len() < 40 {
                return Err(bad(format!("{} bytes is not a snapshot", bytes.len())));
            }
            let vals: Vec<f64> = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            let (nx, ny) = (vals[1] as usize, vals[2] as usize);
            let n = nx * ny;
            if vals.len() != 5 + 3 * n {
                return Err(bad(format!(
                    "expected {} values, found {}",
                    5 + 3 * n,
                    vals.len()
                )));
            }
            Ok(SnapshotData {
                t: vals[0],
                nx,
                ny,
                dx: vals[3],
                dy: vals[4],
                eps: vals[5..5 + n].to_vec(),
                mom_x: vals[5 + n..5 + 2 * n].to_vec(),
                mom_y: vals[5 + 2 * n..].to_vec(),
            })
        }
    }
}
