//! Finite-difference forward model for `-u'' + p u + lambda u = delta(x)` on
//! `(0, L)` with Neumann conditions, and the closed-form background transfer
//! function used as an analytic oracle.
//!
//! The second-order stencil eliminates the ghost points at both ends, giving
//! boundary rows `(2/h^2)(u_0 - u_1) + p_0 u_0` (mirrored at `x = L`). Halving
//! those two rows makes the matrix symmetric: `A = D^{-1} K` with `K`
//! symmetric tridiagonal and `D = diag(1/2, 1, ..., 1, 1/2)`, so `h D` is the
//! diagonal of trapezoid weights. The point source at `x = 0` is `e_0 (2/h)`,
//! and the shifted system `(A + lambda I) u = e_0 (2/h)` becomes
//! `(K + lambda D) u = e_0 / h`.

use std::f64::consts::PI;

use crate::error::{LslError, Result};
use crate::grid::Grid;
use crate::potential::Potential;
use crate::tridiag::SymTridiagonal;

/// Relative distance to a discrete eigenvalue below which a solve is refused.
pub const RESONANCE_TOLERANCE: f64 = 1e-10;

/// Solution `u(x_i, lambda)` of the forward problem on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub lambda: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    /// Boundary value `u(0, lambda)`.
    pub fn boundary_value(&self) -> f64 {
        self.values[0]
    }
}

/// Discretized `L = -d^2/dx^2 + p` on a grid, in symmetrized form.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    grid: Grid,
    potential: Vec<f64>,
    stiffness: SymTridiagonal,
    row_scale: Vec<f64>,
}

/// Assembles the finite-difference operator for `p` on `grid`.
pub fn assemble_operator(p: &Potential, grid: &Grid) -> Result<SchrodingerOperator> {
    SchrodingerOperator::new(p.evaluate(grid)?, grid.clone())
}

impl SchrodingerOperator {
    /// Builds the operator from potential values at the grid nodes.
    pub fn new(potential: Vec<f64>, grid: Grid) -> Result<Self> {
        let n = grid.len();
        if potential.len() != n {
            return Err(LslError::Dimension(format!(
                "potential has {} values, grid has {n} nodes",
                potential.len()
            )));
        }
        if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
            return Err(LslError::InvalidInput(format!(
                "potential is not finite at node {i}"
            )));
        }
        let h = grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let mut row_scale = vec![1.0; n];
        row_scale[0] = 0.5;
        row_scale[n - 1] = 0.5;
        let diag: Vec<f64> = (0..n)
            .map(|i| row_scale[i] * (2.0 * inv_h2 + potential[i]))
            .collect();
        let off = vec![-inv_h2; n - 1];
        Ok(Self {
            grid,
            potential,
            stiffness: SymTridiagonal::new(diag, off)?,
            row_scale,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Symmetric matrix `K` (boundary rows halved).
    pub fn symmetric(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    /// Row scaling `D` with `A = D^{-1} K`.
    pub fn row_scale(&self) -> &[f64] {
        &self.row_scale
    }

    /// The unsymmetrized stencil `A` as `(lower, diag, upper)`.
    pub fn stencil(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let k = &self.stiffness;
        let diag: Vec<f64> = (0..n).map(|i| k.diag()[i] / self.row_scale[i]).collect();
        let upper: Vec<f64> = (0..n - 1).map(|i| k.off()[i] / self.row_scale[i]).collect();
        let lower: Vec<f64> = (0..n - 1)
            .map(|i| k.off()[i] / self.row_scale[i + 1])
            .collect();
        (lower, diag, upper)
    }

    /// Applies `A`, the discrete `-u'' + p u`, at every node.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.stiffness
            .matvec(u)
            .into_iter()
            .zip(&self.row_scale)
            .map(|(v, d)| v / d)
            .collect()
    }

    /// Residual `(A + lambda I) u - e_0 (2/h)`.
    pub fn residual(&self, snapshot: &Snapshot) -> Vec<f64> {
        let mut r = self.apply(&snapshot.values);
        for (ri, ui) in r.iter_mut().zip(&snapshot.values) {
            *ri += snapshot.lambda * ui;
        }
        r[0] -= 2.0 / self.grid.spacing();
        r
    }

    /// Distance from `-lambda` to the nearest discrete eigenvalue if it lies
    /// inside the refusal window, `None` otherwise.
    pub fn resonance_distance(&self, lambda: f64) -> Option<f64> {
        let radius = RESONANCE_TOLERANCE * lambda.abs().max(1.0);
        self.stiffness
            .nearest_eigenvalue(-lambda, radius, Some(&self.row_scale))
            .map(|mu| (mu + lambda).abs())
    }

    /// Solves `(A + lambda I) u = e_0 (2/h)`.
    pub fn solve(&self, lambda: f64) -> Result<Snapshot> {
        if !lambda.is_finite() {
            return Err(LslError::InvalidInput(format!("lambda = {lambda} is not finite")));
        }
        if let Some(distance) = self.resonance_distance(lambda) {
            return Err(LslError::ResonanceProximity { lambda, distance });
        }
        let n = self.grid.len();
        let mut rhs = vec![0.0; n];
        rhs[0] = 1.0 / self.grid.spacing();
        let values = self
            .stiffness
            .solve_shifted(lambda, Some(&self.row_scale), &rhs)
            .ok_or(LslError::ResonanceProximity {
                lambda,
                distance: 0.0,
            })?;
        Ok(Snapshot { lambda, values })
    }
}

/// One-shot forward solve.
pub fn solve_forward(p: &Potential, lambda: f64, grid: &Grid) -> Result<Snapshot> {
    assemble_operator(p, grid)?.solve(lambda)
}

/// Closed-form transfer function of the background (`p = 0`) problem:
/// `coth(sqrt(lambda) L) / sqrt(lambda)` for `lambda > 0` and
/// `-cot(omega L) / omega`, `omega = sqrt(-lambda)`, for `lambda < 0`.
pub fn analytic_background_transfer(lambda: f64, length: f64) -> Result<f64> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(LslError::InvalidInput(format!(
            "domain length must be positive, got {length}"
        )));
    }
    if !lambda.is_finite() {
        return Err(LslError::InvalidInput(format!("lambda = {lambda} is not finite")));
    }
    let tol = RESONANCE_TOLERANCE * lambda.abs().max(1.0);
    if lambda.abs() < tol {
        return Err(LslError::Pole { lambda, k: 0 });
    }
    if lambda > 0.0 {
        let s = lambda.sqrt();
        return Ok(1.0 / (s * (s * length).tanh()));
    }
    let omega = (-lambda).sqrt();
    let k = (omega * length / PI).round();
    let resonance = -(k * PI / length).powi(2);
    if (lambda - resonance).abs() < tol {
        return Err(LslError::Pole {
            lambda,
            k: k as u64,
        });
    }
    let theta = omega * length;
    Ok(-theta.cos() / (theta.sin() * omega))
}
