//! Discretized Lippmann-Schwinger imaging.
//!
//! For each sample point the data mismatch is linear in the potential once
//! an internal field `w` is fixed:
//! `F_0(lambda_j) - F(lambda_j) = sum_i h_i u_0(x_i, lambda_j) p(x_i) w(x_i, lambda_j)`.
//! Born uses `w = u_0`; LSL uses the reduced-order estimate.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{LslError, Result};
use crate::grid::Grid;
use crate::par;
use crate::pde::Snapshot;
use crate::potential::Potential;
use crate::rom::{build_loewner, lanczos_with_rank, lsl_internal, retained_rank, same_points, LanczosFactors, SnapshotMatrix};
use crate::transfer::DataSet;

/// Default relative singular-value cutoff for noiseless data.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Born,
    Lsl,
    /// True internal fields; only available when the medium is known.
    Exact,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Born => "born",
            Method::Lsl => "lsl",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = LslError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "born" => Ok(Method::Born),
            "lsl" => Ok(Method::Lsl),
            "exact" => Ok(Method::Exact),
            other => Err(LslError::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Supplies the internal field used in place of the unknown `u(x, lambda_j)`.
pub trait InternalField: Sync {
    fn method(&self) -> Method;

    /// Field values on the grid at sample `index`, `lambda = lambda_index`.
    fn field(&self, index: usize, lambda: f64) -> Result<Vec<f64>>;
}

/// Born approximation: the background field itself.
pub struct BornField<'a> {
    pub background: &'a SnapshotMatrix,
}

impl InternalField for BornField<'_> {
    fn method(&self) -> Method {
        Method::Born
    }

    fn field(&self, index: usize, _lambda: f64) -> Result<Vec<f64>> {
        Ok(self.background.snapshot(index).values)
    }
}

/// True-medium snapshots (test oracle).
pub struct ExactField<'a> {
    pub snapshots: &'a SnapshotMatrix,
}

impl InternalField for ExactField<'_> {
    fn method(&self) -> Method {
        Method::Exact
    }

    fn field(&self, index: usize, _lambda: f64) -> Result<Vec<f64>> {
        Ok(self.snapshots.snapshot(index).values)
    }
}

/// Everything the LSL estimate needs: background snapshots and the Lanczos
/// factors of both the background and the measured data.
#[derive(Debug, Clone)]
pub struct LslModel {
    pub background: SnapshotMatrix,
    pub factors0: LanczosFactors,
    pub factors: LanczosFactors,
}

impl LslModel {
    pub fn build(data: &DataSet, data0: &DataSet, grid: &Grid, truncation_tol: f64) -> Result<Self> {
        check_alignment(data, data0)?;
        let pencil = build_loewner(data)?;
        let pencil0 = build_loewner(data0)?;
        let rank = retained_rank(&pencil, truncation_tol)?.min(retained_rank(&pencil0, truncation_tol)?);
        let factors = lanczos_with_rank(&pencil, truncation_tol, rank)?;
        let factors0 = lanczos_with_rank(&pencil0, truncation_tol, rank)?;
        let background = SnapshotMatrix::compute(&Potential::Zero, &data0.lambdas(), grid)?;
        Ok(Self {
            background,
            factors0,
            factors,
        })
    }

    pub fn internal(&self, lambda: f64) -> Result<Snapshot> {
        lsl_internal(&self.background, &self.factors0, &self.factors, lambda)
    }
}

impl InternalField for LslModel {
    fn method(&self) -> Method {
        Method::Lsl
    }

    fn field(&self, _index: usize, lambda: f64) -> Result<Vec<f64>> {
        self.internal(lambda).map(|s| s.values)
    }
}

/// `A p = d` with `A_ji = h_i u_0(x_i, lambda_j) w(x_i, lambda_j)` and
/// `d_j = F_0(lambda_j) - F(lambda_j)`.
#[derive(Debug, Clone)]
pub struct ImagingSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub grid: Grid,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub estimate: Vec<f64>,
    pub method: Method,
    pub threshold: f64,
    pub residual_norm: f64,
    /// Singular values of `A`, descending.
    pub singular_values: Vec<f64>,
    /// Number of singular values kept.
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub grid_nodes: usize,
    pub rel_threshold: f64,
    pub truncation_tol: f64,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            grid_nodes: crate::grid::DEFAULT_NODES,
            rel_threshold: DEFAULT_THRESHOLD,
            truncation_tol: crate::rom::DEFAULT_TRUNCATION,
        }
    }
}

fn check_alignment(data: &DataSet, data0: &DataSet) -> Result<()> {
    if !same_points(&data.lambdas(), &data0.lambdas()) {
        return Err(LslError::Alignment(format!(
            "measured data has {} samples, background {}, or their sample points differ",
            data.len(),
            data0.len()
        )));
    }
    if (data.length - data0.length).abs() > 1e-12 * data.length {
        return Err(LslError::Alignment(format!(
            "domain lengths differ: {} vs {}",
            data.length, data0.length
        )));
    }
    Ok(())
}

pub fn assemble_system(
    data: &DataSet,
    data0: &DataSet,
    internal: &dyn InternalField,
    grid: &Grid,
) -> Result<ImagingSystem> {
    check_alignment(data, data0)?;
    if (data.length - grid.length()).abs() > 1e-12 * grid.length() {
        return Err(LslError::InvalidInput(format!(
            "data domain length {} differs from grid length {}",
            data.length,
            grid.length()
        )));
    }
    let lambdas = data.lambdas();
    let background = SnapshotMatrix::compute(&Potential::Zero, &lambdas, grid)?;
    let n = grid.len();
    let weights = grid.weights();
    let rows = par::try_map_indexed(lambdas.len(), |j| {
        let w = internal.field(j, lambdas[j])?;
        if w.len() != n {
            return Err(LslError::Dimension(format!(
                "internal field at lambda = {} has {} values, grid has {n} nodes",
                lambdas[j],
                w.len()
            )));
        }
        let u0 = background.matrix().column(j);
        Ok((0..n).map(|i| weights[i] * u0[i] * w[i]).collect::<Vec<f64>>())
    })?;
    let m = lambdas.len();
    let mut matrix = DMatrix::zeros(m, n);
    for (j, row) in rows.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            matrix[(j, i)] = *v;
        }
    }
    let rhs = DVector::from_iterator(
        m,
        data.samples()
            .iter()
            .zip(data0.samples())
            .map(|(s, s0)| s0.value - s.value),
    );
    Ok(ImagingSystem {
        matrix,
        rhs,
        grid: grid.clone(),
        method: internal.method(),
    })
}

/// Minimum-norm truncated-SVD solution, discarding singular values below
/// `rel_threshold * sigma_max`.
pub fn solve_regularized(system: &ImagingSystem, rel_threshold: f64) -> Result<ReconstructionResult> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(LslError::InvalidInput(format!(
            "relative threshold must lie in (0, 1), got {rel_threshold}"
        )));
    }
    let a = &system.matrix;
    if a.nrows() != system.rhs.len() || a.ncols() != system.grid.len() {
        return Err(LslError::Dimension(format!(
            "system matrix is {}x{}, rhs has {} entries, grid {} nodes",
            a.nrows(),
            a.ncols(),
            system.rhs.len(),
            system.grid.len()
        )));
    }
    if a.iter().chain(system.rhs.iter()).any(|v| !v.is_finite()) {
        return Err(LslError::DegenerateSystem("non-finite entries".into()));
    }
    if a.iter().all(|v| *v == 0.0) {
        return Err(LslError::DegenerateSystem("matrix is identically zero".into()));
    }
    let svd = a.clone().svd(true, true);
    let (u, v_t) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(LslError::DegenerateSystem("SVD did not converge".into())),
    };
    let sigma = &svd.singular_values;
    let sigma_max = sigma.max();
    let cutoff = rel_threshold * sigma_max;

    let mut estimate = DVector::zeros(a.ncols());
    let mut rank = 0;
    for (idx, &s) in sigma.iter().enumerate() {
        if s >= cutoff && s > 0.0 {
            let coeff = u.column(idx).dot(&system.rhs) / s;
            estimate += v_t.row(idx).transpose() * coeff;
            rank += 1;
        }
    }
    let residual_norm = (a * &estimate - &system.rhs).norm();
    let mut singular_values: Vec<f64> = sigma.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(ReconstructionResult {
        estimate: estimate.iter().copied().collect(),
        method: system.method,
        threshold: rel_threshold,
        residual_norm,
        singular_values,
        rank,
    })
}

/// Full imaging pipeline from measured and background boundary data.
pub fn reconstruct(
    data: &DataSet,
    data0: &DataSet,
    method: Method,
    config: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    let grid = Grid::new(data.length, config.grid_nodes)?;
    check_alignment(data, data0)?;
    match method {
        Method::Born => {
            let background = SnapshotMatrix::compute(&Potential::Zero, &data0.lambdas(), &grid)?;
            let system = assemble_system(data, data0, &BornField { background: &background }, &grid)?;
            solve_regularized(&system, config.rel_threshold)
        }
        Method::Lsl => {
            let model = LslModel::build(data, data0, &grid, config.truncation_tol)?;
            let system = assemble_system(data, data0, &model, &grid)?;
            solve_regularized(&system, config.rel_threshold)
        }
        Method::Exact => Err(LslError::InvalidInput(
            "exact internal fields need the true medium; assemble with ExactField instead".into(),
        )),
    }
}

/// Weighted relative error `||p_est - p_true|| / ||p_true||`; the absolute
/// weighted norm of `p_est` when `p_true` vanishes.
pub fn relative_l2_error(p_est: &[f64], p_true: &[f64], grid: &Grid) -> Result<f64> {
    if p_est.len() != p_true.len() || p_est.len() != grid.len() {
        return Err(LslError::Dimension(format!(
            "estimate has {} values, truth {}, grid {}",
            p_est.len(),
            p_true.len(),
            grid.len()
        )));
    }
    let diff: Vec<f64> = p_est.iter().zip(p_true).map(|(a, b)| a - b).collect();
    let denom = grid.norm(p_true);
    let num = grid.norm(&diff);
    Ok(if denom == 0.0 { num } else { num / denom })
}
