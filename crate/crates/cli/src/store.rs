//! Versioned binary trajectory store, so long evolutions can be re-rendered
//! without re-integrating.
//!
//! Layout (all little-endian):
//!
//! ```text
//!   bytes 0..8    magic  "OQTRAJ01"
//!   u32           version (currently 1)
//!   u32           dim
//!   u64           frame count
//!   f64           t0 (time of the first frame)
//!   f64           frame_dt (uniform frame spacing)
//!   then per frame, row-major, dim*dim entries of (re: f64, im: f64)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use openqs::dynamics::StateTrajectory;
use openqs::operators::{DensityMatrix, Operator};

use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"OQTRAJ01";
pub const VERSION: u32 = 1;

pub fn write_store(path: &Path, traj: &StateTrajectory, overwrite: bool) -> Result<(), CliError> {
    if path.exists() && !overwrite {
        return Err(CliError::Io(format!(
            "refusing to overwrite {} (pass --overwrite)",
            path.display()
        )));
    }
    let frame_dt = traj
        .uniform_spacing()
        .ok_or_else(|| CliError::Numerical("trajectory store requires uniform frame spacing".into()))?;
    let dim = traj.dim();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(dim as u32).to_le_bytes())?;
    out.write_all(&(traj.len() as u64).to_le_bytes())?;
    out.write_all(&traj.times()[0].to_le_bytes())?;
    out.write_all(&frame_dt.to_le_bytes())?;
    for frame in traj.frames() {
        let m = frame.op().matrix();
        for i in 0..dim {
            for j in 0..dim {
                let z = m[(i, j)];
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_store(path: &Path) -> Result<StateTrajectory, CliError> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CliError::Io(format!("{} is not a trajectory store", path.display())));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(CliError::Io(format!("unsupported trajectory store version {version}")));
    }
    let dim = read_u32(&mut input)? as usize;
    let frame_count = read_u64(&mut input)? as usize;
    let t0 = read_f64(&mut input)?;
    let frame_dt = read_f64(&mut input)?;
    if dim == 0 || frame_count == 0 {
        return Err(CliError::Io("trajectory store is empty".into()));
    }

    let mut times = Vec::with_capacity(frame_count);
    let mut frames = Vec::with_capacity(frame_count);
    let mut buf = vec![0u8; dim * dim * 16];
    for k in 0..frame_count {
        input.read_exact(&mut buf)?;
        let entries: Vec<Complex64> = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        let op = Operator::from_rows(dim, &entries).map_err(|e| CliError::Io(e.to_string()))?;
        let frame = DensityMatrix::new(op)
            .map_err(|e| CliError::Numerical(format!("stored frame {k} invalid: {e}")))?;
        times.push(t0 + k as f64 * frame_dt);
        frames.push(frame);
    }
    StateTrajectory::new(times, frames).map_err(|e| CliError::Numerical(e.to_string()))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, CliError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, CliError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, CliError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use openqs::operators::StateVector;
    use tempfile::tempdir;

    #[test]
    fn round_trip_preserves_frames_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.bin");
        let psi = StateVector::normalized(vec![
            Complex64::new(0.6, 0.1),
            Complex64::new(0.0, 0.79),
        ])
        .unwrap();
        let frames = vec![
            DensityMatrix::from_pure(&psi),
            DensityMatrix::maximally_mixed(2),
        ];
        let traj = StateTrajectory::new(vec![0.5, 1.0], frames).unwrap();
        write_store(&path, &traj, false).unwrap();
        let back = read_store(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.times(), traj.times());
        for (a, b) in back.frames().iter().zip(traj.frames()) {
            assert_eq!(a.op(), b.op());
        }
    }

    #[test]
    fn rejects_foreign_files_and_refuses_clobbering() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.bin");
        std::fs::write(&path, b"not a store at all").unwrap();
        assert!(matches!(read_store(&path), Err(CliError::Io(_))));
        let traj = StateTrajectory::new(
            vec![0.0],
            vec![DensityMatrix::maximally_mixed(2)],
        )
        .unwrap();
        assert!(matches!(write_store(&path, &traj, false), Err(CliError::Io(_))));
        write_store(&path, &traj, true).unwrap();
    }
}
