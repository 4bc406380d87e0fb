//! Binary field snapshots for checkpoint/restart.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic "NEMF" | version u32 | dim u32 | resolution u32 | t f64
//! | nu λ γ α η (5×f64) | v components | d components
//! ```
//!
//! each component being resolution^dim real-space samples as f64. Storing
//! samples (not coefficients) makes a resolution change on restart an
//! explicit GridMismatch instead of a silent truncation.

use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{PhysParams, State};
use crate::spectral::{SpectralField, TorusGrid, VectorField};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"NEMF";
pub const SNAPSHOT_VERSION: u32 = 1;

/// A decoded snapshot: header plus raw sample payload.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub dim: usize,
    pub resolution: usize,
    pub t: f64,
    pub params: PhysParams,
    pub v_samples: Vec<Vec<f64>>,
    pub d_samples: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_state(state: &State, params: &PhysParams) -> Snapshot {
        Snapshot {
            dim: state.grid().dim(),
            resolution: state.grid().resolution(),
            t: state.t,
            params: *params,
            v_samples: state
                .v
                .components()
                .iter()
                .map(|c| c.real_samples().to_vec())
                .collect(),
            d_samples: state
                .d
                .components()
                .iter()
                .map(|c| c.real_samples().to_vec())
                .collect(),
        }
    }

    /// Rebuild the state on `grid`; the grid must match the stored shape.
    pub fn into_state(&self, grid: &Arc<TorusGrid>) -> Result<State> {
        if grid.dim() != self.dim || grid.resolution() != self.resolution {
            return Err(Error::GridMismatch(format!(
                "snapshot is {}d at {}, grid is {}d at {}",
                self.dim,
                self.resolution,
                grid.dim(),
                grid.resolution()
            )));
        }
        let mk = |samples: &[Vec<f64>]| {
            VectorField::new(
                samples
                    .iter()
                    .map(|s| SpectralField::from_real_samples(grid, s.clone()))
                    .collect(),
            )
        };
        Ok(State::new(mk(&self.v_samples), mk(&self.d_samples), self.t))
    }
}

pub fn write_snapshot(state: &State, params: &PhysParams, path: impl AsRef<Path>) -> Result<()> {
    let snap = Snapshot::from_state(state, params);
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(snap.dim as u32).to_le_bytes())?;
    w.write_all(&(snap.resolution as u32).to_le_bytes())?;
    w.write_all(&snap.t.to_le_bytes())?;
    for p in [
        snap.params.nu,
        snap.params.lambda,
        snap.params.gamma,
        snap.params.alpha,
        snap.params.eta,
    ] {
        w.write_all(&p.to_le_bytes())?;
    }
    for comp in snap.v_samples.iter().chain(snap.d_samples.iter()) {
        for &s in comp {
            w.write_all(&s.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };

    let magic = cur.take(4)?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad magic; not a snapshot file".into()));
    }
    let version = cur.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = cur.u32()? as usize;
    let resolution = cur.u32()? as usize;
    if dim != 2 && dim != 3 {
        return Err(Error::Format(format!("bad dimension {dim}")));
    }
    let t = cur.f64()?;
    let params = PhysParams {
        nu: cur.f64()?,
        lambda: cur.f64()?,
        gamma: cur.f64()?,
        alpha: cur.f64()?,
        eta: cur.f64()?,
    };
    let per_comp = resolution.pow(dim as u32);
    let mut fields = Vec::with_capacity(2 * dim);
    for _ in 0..2 * dim {
        let mut comp = Vec::with_capacity(per_comp);
        for _ in 0..per_comp {
            comp.push(cur.f64()?);
        }
        fields.push(comp);
    }
    if cur.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after payload",
            bytes.len() - cur.pos
        )));
    }
    let d_samples = fields.split_off(dim);
    Ok(Snapshot {
        dim,
        resolution,
        t,
        params,
        v_samples: fields,
        d_samples,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format(format!(
                "truncated snapshot: wanted {n} bytes at offset {}, file has {}",
                self.pos,
                self.bytes.len()
            )));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::random_smooth;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("nemf-snapshot-test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn snapshot_round_trip() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let params = PhysParams {
            nu: 0.05,
            alpha: 0.25,
            ..PhysParams::default()
        };
        let state = random_smooth(&grid, 12, 0.2, &[0.1, 0.0]);
        let path = tmp("roundtrip.snap");
        write_snapshot(&state, &params, &path).unwrap();
        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.params, params);
        assert_eq!(snap.resolution, 16);

        // file -> state -> file is byte-identical (the raw samples ride
        // along through the decoded state)
        let state2 = snap.into_state(&grid).unwrap();
        let path2 = tmp("roundtrip2.snap");
        write_snapshot(&state2, &params, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );

        // coefficients survive the sample round trip to FFT rounding
        for (a, b) in state.v.components().iter().zip(state2.v.components()) {
            let err: f64 = a
                .coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-12 * a.l2_norm_sq().sqrt().max(1e-30));
        }
    }

    #[test]
    fn truncated_snapshot_is_a_format_error() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = random_smooth(&grid, 3, 0.1, &[0.0, 0.0]);
        let path = tmp("truncated.snap");
        write_snapshot(&state, &PhysParams::default(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Format(_))));

        std::fs::write(&path, b"NOPE").unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Format(_))));
    }

    #[test]
    fn grid_mismatch_is_reported_on_restart() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = random_smooth(&grid, 3, 0.1, &[0.0, 0.0]);
        let path = tmp("mismatch.snap");
        write_snapshot(&state, &PhysParams::default(), &path).unwrap();
        let snap = read_snapshot(&path).unwrap();
        let other = TorusGrid::square(2, 32).unwrap();
        assert!(matches!(
            snap.into_state(&other),
            Err(Error::GridMismatch(_))
        ));
    }
}
