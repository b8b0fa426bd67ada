//! Periodic torus geometry shared by the simulation backends.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Uniform grid on a d-dimensional torus [−L/2, L/2)^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: u32,
    /// Torus length per axis.
    pub length: f64,
    /// Cells per axis.
    pub cells: usize,
}

impl Grid {
    pub fn new(d: u32, length: f64, cells: usize) -> Result<Grid, SimError> {
        if !(1..=2).contains(&d) {
            return Err(SimError::Config(format!("simulation supports d in {{1,2}}, got {d}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(SimError::Config(format!("torus length must be positive, got {length}")));
        }
        if cells < 2 {
            return Err(SimError::Config(format!("need at least 2 cells per axis, got {cells}")));
        }
        Ok(Grid { d, length, cells })
    }

    /// Cell width.
    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Cell volume Δx^d.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    /// Torus volume L^d.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.d as i32)
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.cells.pow(self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of cell centers along one axis, in [−L/2, L/2).
    pub fn axis_coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx() - self.length / 2.0
    }

    /// Full coordinates of a flat cell index (row-major, axis 0 slowest).
    pub fn coord(&self, flat: usize) -> Vec<f64> {
        match self.d {
            1 => vec![self.axis_coord(flat)],
            _ => vec![self.axis_coord(flat / self.cells), self.axis_coord(flat % self.cells)],
        }
    }

    /// Flat index of the cell containing a point given by fractional
    /// offsets in [0,1)^d of the torus.
    pub fn cell_of_fractional(&self, fractional: &[f64]) -> usize {
        debug_assert_eq!(fractional.len(), self.d as usize);
        let idx = |f: f64| -> usize {
            let i = (f * self.cells as f64).floor() as isize;
            i.rem_euclid(self.cells as isize) as usize
        };
        match self.d {
            1 => idx(fractional[0]),
            _ => idx(fractional[0]) * self.cells + idx(fractional[1]),
        }
    }

    /// Minimal-image distance of a cell center from the torus origin.
    pub fn center_distance(&self, flat: usize) -> f64 {
        self.coord(flat).iter().map(|&c| c * c).sum::<f64>().sqrt()
    }

    /// Flat index of the cell nearest the origin.
    pub fn center_cell(&self) -> usize {
        let mid = self.cells / 2;
        match self.d {
            1 => mid,
            _ => mid * self.cells + mid,
        }
    }
}

/// Default torus length for a run up to `horizon`: large enough that
/// wrap-around sits below the heat-kernel tail (6√(κ·horizon) ≤ L/2).
pub fn default_length(kappa: f64, horizon: f64) -> f64 {
    (12.0 * (kappa * horizon).sqrt()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_round_trips() {
        let g = Grid::new(2, 8.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.cell_volume(), 0.25);
        // fractional offset 0 is the left-most cell, centered at −L/2 + Δx/2
        assert_eq!(g.cell_of_fractional(&[0.0, 0.0]), 0);
        assert_eq!(g.coord(0), vec![-3.75, -3.75]);
        // center cell sits at distance Δx/√2 from the origin
        let c = g.center_cell();
        assert!((g.center_distance(c) - 0.5f64.hypot(0.5) / 2.0).abs() < 1e-12);
        // wrap-around of out-of-range fractional offsets
        let g1 = Grid::new(1, 4.0, 8).unwrap();
        assert_eq!(g1.cell_of_fractional(&[0.999]), 7);
        assert_eq!(g1.cell_of_fractional(&[1.0]), 0);
    }

    #[test]
    fn default_length_clears_the_kernel_tail() {
        let kappa = 2.0;
        let horizon = 3.0;
        let l = default_length(kappa, horizon);
        assert!(6.0 * (kappa * horizon).sqrt() <= l / 2.0);
        assert!(default_length(1e-8, 1e-8) >= 1.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Grid::new(3, 1.0, 8).is_err());
        assert!(Grid::new(1, 0.0, 8).is_err());
        assert!(Grid::new(1, 1.0, 1).is_err());
    }
}
