//! Binary checkpoint: `VDL1`, then little-endian `u32 n`, `f64 l`, `f64 nu`,
//! `f64 t`, and the three velocity components as `n³` `f64` each in
//! row-major `x, y, z` order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::solver::SimState;
use crate::spectral::Spectral;

pub const MAGIC: [u8; 4] = *b"VDL1";

/// Guards allocation when reading untrusted headers.
const MAX_N: u32 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub nu: f64,
    pub t: f64,
    pub velocity: VectorField,
}

impl Checkpoint {
    pub fn from_state(spectral: &Spectral, state: &SimState, nu: f64) -> Self {
        Self {
            nu,
            t: state.t,
            velocity: spectral.inverse(&state.uhat),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.velocity.grid()
    }

    pub fn to_state(&self, spectral: &Spectral) -> Result<SimState> {
        self.grid().ensure_same(spectral.grid())?;
        Ok(SimState::from_velocity(spectral, &self.velocity, self.t))
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let g = self.grid();
        w.write_all(&MAGIC)?;
        w.write_all(&(g.n() as u32).to_le_bytes())?;
        w.write_all(&g.l().to_le_bytes())?;
        w.write_all(&self.nu.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        for c in self.velocity.components() {
            for v in c.values() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, "magic")?;
        if magic != MAGIC {
            return Err(Error::Format(format!(
                "unknown checkpoint magic or version {:?}, expected {:?}",
                String::from_utf8_lossy(&magic),
                String::from_utf8_lossy(&MAGIC)
            )));
        }
        let mut b4 = [0u8; 4];
        read_exact(&mut r, &mut b4, "grid size")?;
        let n = u32::from_le_bytes(b4);
        if n > MAX_N {
            return Err(Error::Format(format!("grid size {n} exceeds {MAX_N}")));
        }
        let l = read_f64(&mut r, "box length")?;
        let nu = read_f64(&mut r, "viscosity")?;
        let t = read_f64(&mut r, "time")?;
        let grid = GridSpec::new(n as usize, l).map_err(|e| Error::Format(format!("bad header: {e}")))?;
        let mut comps = Vec::with_capacity(3);
        let mut buf = vec![0u8; grid.len() * 8];
        for c in 0..3 {
            read_exact(&mut r, &mut buf, &format!("component {c}"))?;
            let values = buf
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect();
            comps.push(ScalarField::from_values(grid, values)?);
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format("trailing bytes after checkpoint payload".into()));
        }
        let [a, b, c]: [ScalarField; 3] = comps.try_into().expect("three components");
        Ok(Self {
            nu,
            t,
            velocity: VectorField::new([a, b, c])?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("checkpoint truncated while reading {what}")),
        _ => Error::Io(e),
    })
}

fn read_f64(r: &mut impl Read, what: &str) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, what)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::taylor_green_velocity;

    fn sample() -> Checkpoint {
        let g = GridSpec::new(6, 3.5).unwrap();
        let mut v = taylor_green_velocity(g);
        // awkward bit patterns survive too
        v.component_mut(2)[3] = -0.0;
        v.component_mut(2)[4] = f64::MIN_POSITIVE / 3.0;
        v.component_mut(2)[5] = 1.0 / 3.0;
        Checkpoint { nu: 0.013, t: 0.1 + 0.2, velocity: v }
    }

    fn bits(c: &Checkpoint) -> Vec<u64> {
        let mut out = vec![c.nu.to_bits(), c.t.to_bits(), c.grid().l().to_bits()];
        for comp in c.velocity.components() {
            out.extend(comp.values().iter().map(|v| v.to_bits()));
        }
        out
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = sample();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 24 + 3 * 216 * 8);
        assert_eq!(&buf[..4], b"VDL1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 6);
        let back = Checkpoint::read_from(buf.as_slice()).unwrap();
        assert_eq!(bits(&back), bits(&c));
    }

    #[test]
    fn layout_is_row_major() {
        let g = GridSpec::periodic(4).unwrap();
        let v = VectorField::from_fn(g, |x, y, z| [x, y, z]);
        let c = Checkpoint { nu: 1.0, t: 0.0, velocity: v };
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let at = |k: usize| f64::from_le_bytes(buf[32 + 8 * k..40 + 8 * k].try_into().unwrap());
        // x component: value index 1 is (i,j,k) = (0,0,1), index 16 is (1,0,0)
        assert_eq!(at(1), 0.0);
        assert_eq!(at(16), g.spacing());
        // z component starts after 2·64 values
        assert_eq!(at(128 + 1), g.spacing());
    }

    #[test]
    fn rejects_bad_input() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        let mut wrong = buf.clone();
        wrong[3] = b'2';
        assert!(matches!(Checkpoint::read_from(wrong.as_slice()), Err(Error::Format(_))));
        let short = &buf[..buf.len() - 1];
        assert!(matches!(Checkpoint::read_from(short), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(Checkpoint::read_from(long.as_slice()), Err(Error::Format(_))));
        let mut tiny = buf.clone();
        tiny[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(Checkpoint::read_from(tiny.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.vdl");
        let c = sample();
        c.save(&p).unwrap();
        assert_eq!(bits(&Checkpoint::load(&p).unwrap()), bits(&c));
    }
}
