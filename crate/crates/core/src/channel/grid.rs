use alloc::vec::Vec;

use crate::{Error, Result, C64};

pub const DEFAULT_GRID_SIZE: usize = 256;

/// Uniform grid `f_j = j/F` on `[0, 1)` with rectangle-rule weight `1/F`.
///
/// All integrands over `f` are 1-periodic, so the rectangle rule is the
/// natural quadrature and circular index arithmetic implements the periodic
/// convolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    size: usize,
}

impl FrequencyGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid("grid_size", "need at least 2 points"));
        }
        Ok(FrequencyGrid { size })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.size as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 / self.size as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.point(j)).collect()
    }

    /// Maps grid point `j` to its representative in `[-1/2, 1/2)`.
    pub fn centered_point(&self, j: usize) -> f64 {
        let f = self.point(j);
        if f >= 0.5 {
            f - 1.0
        } else {
            f
        }
    }

    /// Grid index of `-f_j` modulo 1.
    pub fn reflect(&self, j: usize) -> usize {
        (self.size - j % self.size) % self.size
    }

    pub fn quadrature(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.size);
        values.iter().sum::<f64>() / self.size as f64
    }

    pub fn quadrature_complex(&self, values: &[C64]) -> C64 {
        debug_assert_eq!(values.len(), self.size);
        values.iter().sum::<C64>() / self.size as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn four_points() {
        let g = FrequencyGrid::new(4).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75]);
        assert_eq!(g.weight(), 0.25);
    }

    #[test]
    fn two_points() {
        let g = FrequencyGrid::new(2).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5]);
    }

    #[test]
    fn unit_quadrature_is_exact() {
        for f in [2, 3, 7, 256, 1000] {
            let g = FrequencyGrid::new(f).unwrap();
            assert_eq!(g.quadrature(&vec![1.0; f]), 1.0);
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(FrequencyGrid::new(0).is_err());
        assert!(FrequencyGrid::new(1).is_err());
    }

    #[test]
    fn reflection_and_centering() {
        let g = FrequencyGrid::new(8).unwrap();
        assert_eq!(g.reflect(0), 0);
        assert_eq!(g.reflect(1), 7);
        assert_eq!(g.reflect(4), 4);
        assert_eq!(g.centered_point(6), -0.25);
        assert_eq!(g.centered_point(4), -0.5);
    }
}
