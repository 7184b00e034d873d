use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic axis: `n` points `min + i (max - min) / n`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        let a = Self { min, max, n };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::InvalidGrid(format!(
                "axis [{}, {}] must be finite with max > min",
                self.min, self.max
            )));
        }
        if self.n < 8 || self.n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "axis needs an even number of points >= 8, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    /// Spacing of the conjugate wave numbers, `2 pi / (n spacing)`.
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.max - self.min)
    }

    /// Wave number stored at index `j`; indices run over `-n/2 .. n/2`.
    pub fn wave_number(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dk()
    }

    /// Index of the grid point nearest to `x`, if it lies on the grid.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let i = ((x - self.min) / self.spacing() + 0.5).floor();
        (i >= 0.0 && i < self.n as f64).then_some(i as usize)
    }
}

/// Grid over the Stokes vector `(S_x, S_y, S_z)`; values are stored row-major
/// with `S_z` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub axes: [Axis; 3],
}

impl Grid3 {
    pub fn new(axes: [Axis; 3]) -> Result<Self> {
        let g = Self { axes };
        g.validate()?;
        Ok(g)
    }

    /// Cube `[c_i - half_width, c_i + half_width)` around `center` with `n`
    /// points per axis.
    pub fn cube(center: [f64; 3], half_width: f64, n: usize) -> Result<Self> {
        Self::new(center.map(|c| Axis {
            min: c - half_width,
            max: c + half_width,
            n,
        }))
    }

    pub fn validate(&self) -> Result<()> {
        self.axes.iter().try_for_each(Axis::validate)
    }

    pub fn shape(&self) -> [usize; 3] {
        self.axes.map(|a| a.n)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.axes[1].n + i[1]) * self.axes[2].n + i[2]
    }

    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let nz = self.axes[2].n;
        let ny = self.axes[1].n;
        [flat / (ny * nz), (flat / nz) % ny, flat % nz]
    }

    pub fn point(&self, i: [usize; 3]) -> [f64; 3] {
        [
            self.axes[0].point(i[0]),
            self.axes[1].point(i[1]),
            self.axes[2].point(i[2]),
        ]
    }

    pub fn wave_vector(&self, j: [usize; 3]) -> [f64; 3] {
        [
            self.axes[0].wave_number(j[0]),
            self.axes[1].wave_number(j[1]),
            self.axes[2].wave_number(j[2]),
        ]
    }

    pub fn nearest(&self, s: [f64; 3]) -> Option<[usize; 3]> {
        Some([
            self.axes[0].nearest(s[0])?,
            self.axes[1].nearest(s[1])?,
            self.axes[2].nearest(s[2])?,
        ])
    }

    /// Largest `|S|` over the corners of the grid box.
    pub fn max_radius(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.min.abs().max(a.max.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Converging factor `1 / (2 S_max)`, so that `exp(tau |S|) <= e^{1/2}`
    /// on the grid.
    pub fn default_tau(&self) -> f64 {
        0.5 / self.max_radius()
    }

    pub fn on_boundary(&self, i: [usize; 3]) -> bool {
        (0..3).any(|a| i[a] == 0 || i[a] + 1 == self.axes[a].n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_layout() {
        let a = Axis::new(-4.0, 4.0, 8).unwrap();
        assert_eq!(a.spacing(), 1.0);
        assert_eq!(a.point(4), 0.0);
        assert_eq!(a.wave_number(4), 0.0);
        assert!((a.wave_number(0) + std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(a.nearest(0.49), Some(4));
        assert_eq!(a.nearest(3.6), None);
        assert!(Axis::new(0.0, 1.0, 9).is_err());
        assert!(Axis::new(0.0, 1.0, 6).is_err());
        assert!(Axis::new(1.0, 1.0, 8).is_err());
    }

    #[test]
    fn indexing() {
        let g = Grid3::cube([0.0; 3], 2.0, 8).unwrap();
        let i = [3, 5, 7];
        assert_eq!(g.unravel(g.index(i)), i);
        assert!((g.max_radius() - 12f64.sqrt()).abs() < 1e-15);
        assert!(g.on_boundary([0, 3, 3]) && !g.on_boundary([1, 3, 6]));
    }
}
