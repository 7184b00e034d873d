use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Grid3, PessGrid, PessSource};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"PESSGRD1";

#[derive(Serialize, Deserialize)]
struct Header {
    grid: Grid3,
    tau_used: f64,
    #[serde(flatten)]
    source: PessSource,
    riemann_sum: f64,
}

impl PessGrid {
    /// Binary layout: the magic `PESSGRD1`, a little-endian `u64` header
    /// length, a JSON header with the grid, then the values as little-endian
    /// `f64` in row-major order (`S_z` fastest).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&Header {
            grid: self.grid,
            tau_used: self.tau_used,
            source: self.source,
            riemann_sum: self.riemann_sum(),
        })?;
        w.write_all(MAGIC)?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::InvalidGrid("not a PessGrid file".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut header = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut header)?;
        let header: Header = serde_json::from_slice(&header)?;
        let mut values = Vec::with_capacity(header.grid.len());
        let mut buf = [0u8; 8];
        for _ in 0..header.grid.len() {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        PessGrid::new(header.grid, values, header.tau_used, header.source)
    }

    /// CSV with columns `S_x, S_y, S_z, value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "S_x,S_y,S_z,value")?;
        for (flat, v) in self.values.iter().enumerate() {
            let s = self.grid.point(self.grid.unravel(flat));
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", s[0], s[1], s[2], v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::Window;

    #[test]
    fn binary_round_trip() {
        let grid = Grid3::cube([0.5, 0.0, -1.0], 2.0, 8).unwrap();
        let values: Vec<f64> = (0..grid.len()).map(|i| (i as f64).sin()).collect();
        let p = PessGrid::new(
            grid,
            values,
            0.25,
            PessSource::Inversion {
                window: Window::Hann,
                band_limited: false,
            },
        )
        .unwrap();
        let mut bytes = Vec::new();
        p.write_binary(&mut bytes).unwrap();
        assert_eq!(&bytes[..8], b"PESSGRD1");
        let back = PessGrid::read_binary(bytes.as_slice()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.values(), p.values());
        assert!(PessGrid::read_binary(&b"NOTAGRID........"[..]).is_err());
    }

    #[test]
    fn csv_rows() {
        let grid = Grid3::cube([0.0; 3], 1.0, 8).unwrap();
        let p = PessGrid::new(grid, vec![1.0; grid.len()], 0.0, PessSource::Histogram {
            samples: 1,
            outside_fraction: 0.0,
        })
        .unwrap();
        let mut out = Vec::new();
        p.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("S_x,S_y,S_z,value"));
        assert_eq!(lines.count(), 512);
    }
}
