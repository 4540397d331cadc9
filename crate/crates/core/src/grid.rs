//! Uniform node grid on `(0, L)` with trapezoid quadrature weights.

use crate::error::{LslError, Result};

/// Default number of forward-grid nodes.
pub const DEFAULT_NODES: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    length: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(LslError::InvalidInput(format!(
                "domain length must be positive and finite, got {length}"
            )));
        }
        if n < 3 {
            return Err(LslError::InvalidInput(format!(
                "grid needs at least 3 nodes, got {n}"
            )));
        }
        let h = length / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|i| length * i as f64 / (n - 1) as f64)
            .collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Self {
            length,
            nodes,
            weights,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node spacing `h = L / (n - 1)`.
    pub fn spacing(&self) -> f64 {
        self.length / (self.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Trapezoid inner product `sum_i h_i f_i g_i`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_weights() {
        let grid = Grid::new(3.0, 7).unwrap();
        assert_eq!(grid.nodes()[0], 0.0);
        assert_eq!(grid.nodes()[6], 3.0);
        assert!(grid.nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(grid.weights()[0], 0.25);
        assert_eq!(grid.weights()[3], 0.5);
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Grid::new(1.0, 2).is_err());
        assert!(Grid::new(0.0, 10).is_err());
        assert!(Grid::new(-1.0, 10).is_err());
        assert!(Grid::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn weights_sum_to_length_for_odd_sizes() {
        for n in [3, 4, 101, 2001] {
            let grid = Grid::new(0.7, n).unwrap();
            let total: f64 = grid.weights().iter().sum();
            assert!((total - 0.7).abs() < 1e-13, "n = {n}: {total}");
        }
    }
}
