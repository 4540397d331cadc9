//! Internal-solution estimates from the reduced-order model.

use nalgebra::{DMatrix, DVector};

use crate::error::{LslError, Result};
use crate::grid::Grid;
use crate::par;
use crate::pde::{assemble_operator, SchrodingerOperator, Snapshot, RESONANCE_TOLERANCE};
use crate::potential::Potential;
use crate::rom::LanczosFactors;
use crate::transfer::validated_lambdas;

/// Snapshots `u(., lambda_j)` stacked as the columns of an `n x m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    grid: Grid,
    lambdas: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl SnapshotMatrix {
    /// Forward-solves `p` at every sample point (sorted increasing).
    pub fn compute(p: &Potential, lambdas: &[f64], grid: &Grid) -> Result<Self> {
        let op = assemble_operator(p, grid)?;
        Self::from_operator(&op, lambdas)
    }

    pub fn from_operator(op: &SchrodingerOperator, lambdas: &[f64]) -> Result<Self> {
        let lambdas = validated_lambdas(lambdas)?;
        let columns = par::try_map(&lambdas, |&lambda| op.solve(lambda).map(|s| s.values))?;
        let n = op.grid().len();
        let mut matrix = DMatrix::zeros(n, lambdas.len());
        for (j, col) in columns.into_iter().enumerate() {
            matrix.set_column(j, &DVector::from_vec(col));
        }
        Ok(Self {
            grid: op.grid().clone(),
            lambdas,
            matrix,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn snapshot(&self, j: usize) -> Snapshot {
        Snapshot {
            lambda: self.lambdas[j],
            values: self.matrix.column(j).iter().copied().collect(),
        }
    }

    /// Largest forward residual over all columns, relative to the source
    /// magnitude `2/h`.
    pub fn max_relative_residual(&self, op: &SchrodingerOperator) -> f64 {
        let scale = 2.0 / self.grid.spacing();
        (0..self.lambdas.len())
            .map(|j| {
                op.residual(&self.snapshot(j))
                    .iter()
                    .fold(0.0f64, |acc, r| acc.max(r.abs()))
                    / scale
            })
            .fold(0.0, f64::max)
    }
}

/// `(T + lambda I)^{-1} e_1`, refusing shifts near an eigenvalue of `-T`.
fn shifted_first_column(factors: &LanczosFactors, k: usize, lambda: f64) -> Result<Vec<f64>> {
    let t = factors.tridiagonal.leading(k);
    let radius = RESONANCE_TOLERANCE * lambda.abs().max(1.0);
    if t.nearest_eigenvalue(-lambda, radius, None).is_some() {
        return Err(LslError::RomResonance { lambda });
    }
    let mut e1 = vec![0.0; k];
    e1[0] = 1.0;
    t.solve_shifted(lambda, None, &e1)
        .ok_or(LslError::RomResonance { lambda })
}

fn check_basis(v: &SnapshotMatrix, factors: &LanczosFactors, what: &str) -> Result<()> {
    if v.matrix.ncols() != factors.basis.nrows() {
        return Err(LslError::Dimension(format!(
            "{what}: {} snapshots but Lanczos basis has {} rows",
            v.matrix.ncols(),
            factors.basis.nrows()
        )));
    }
    if !same_points(v.lambdas(), &factors.lambdas) {
        return Err(LslError::Alignment(format!(
            "{what}: snapshot and Lanczos sample points differ"
        )));
    }
    Ok(())
}

pub(crate) fn same_points(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0))
}

/// Galerkin solution `sqrt(b^T M^{-1} b) V Q (T + lambda I)^{-1} e_1`.
pub fn galerkin_internal(v: &SnapshotMatrix, factors: &LanczosFactors, lambda: f64) -> Result<Snapshot> {
    check_basis(v, factors, "galerkin")?;
    let k = factors.rank();
    let y = DVector::from_vec(shifted_first_column(factors, k, lambda)?);
    let coefficients = &factors.basis * y * factors.normfactor;
    let values = &v.matrix * coefficients;
    Ok(Snapshot {
        lambda,
        values: values.iter().copied().collect(),
    })
}

/// LSL estimate `sqrt(b^T M^{-1} b) V_0 Q_0 (T + lambda I)^{-1} e_1`: the
/// orthogonalized background basis carrying the spectral content of the
/// measured data. Uses the leading `min(k, k_0)` Lanczos vectors.
pub fn lsl_internal(
    v0: &SnapshotMatrix,
    factors0: &LanczosFactors,
    factors: &LanczosFactors,
    lambda: f64,
) -> Result<Snapshot> {
    check_basis(v0, factors0, "background")?;
    if factors.basis.nrows() != factors0.basis.nrows() {
        return Err(LslError::Dimension(format!(
            "true data has {} samples, background has {}",
            factors.basis.nrows(),
            factors0.basis.nrows()
        )));
    }
    if !same_points(&factors.lambdas, &factors0.lambdas) {
        return Err(LslError::Alignment(
            "true and background Lanczos factors use different sample points".into(),
        ));
    }
    let k = factors.rank().min(factors0.rank());
    let y = DVector::from_vec(shifted_first_column(factors, k, lambda)?);
    let coefficients = factors0.basis.columns(0, k) * y * factors.normfactor;
    let values = &v0.matrix * coefficients;
    Ok(Snapshot {
        lambda,
        values: values.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rom::{build_loewner, lanczos, DEFAULT_TRUNCATION};
    use crate::sampling::weyl_sample;
    use crate::transfer::generate_dataset;

    fn rel_l2(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        grid.norm(&diff) / grid.norm(b)
    }

    #[test]
    fn single_sample_is_interpolatory() {
        let grid = Grid::new(1.0, 401).unwrap();
        let p = Potential::gaussian_preset(1.0);
        let data = generate_dataset(&p, &[-7.0], &grid).unwrap();
        let factors = lanczos(&build_loewner(&data).unwrap(), DEFAULT_TRUNCATION).unwrap();
        let v = SnapshotMatrix::compute(&p, &[-7.0], &grid).unwrap();
        let u = galerkin_internal(&v, &factors, -7.0).unwrap();
        assert!(rel_l2(&grid, &u.values, v.matrix().as_slice()) < 1e-12);
    }

    #[test]
    fn background_data_makes_lsl_and_galerkin_agree() {
        let grid = Grid::new(1.0, 801).unwrap();
        let plan = weyl_sample(4, 3, 1.0).unwrap();
        let data0 = generate_dataset(&Potential::Zero, &plan.lambdas, &grid).unwrap();
        let f0 = lanczos(&build_loewner(&data0).unwrap(), DEFAULT_TRUNCATION).unwrap();
        let v0 = SnapshotMatrix::compute(&Potential::Zero, &plan.lambdas, &grid).unwrap();
        for (j, &lambda) in plan.lambdas.iter().enumerate() {
            let a = lsl_internal(&v0, &f0, &f0, lambda).unwrap();
            let b = galerkin_internal(&v0, &f0, lambda).unwrap();
            assert_eq!(a.values, b.values);
            assert!(rel_l2(&grid, &a.values, v0.snapshot(j).values.as_slice()) < 1e-6);
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let grid = Grid::new(1.0, 201).unwrap();
        let data = generate_dataset(&Potential::Zero, &[-3.0, -1.0], &grid).unwrap();
        let f = lanczos(&build_loewner(&data).unwrap(), DEFAULT_TRUNCATION).unwrap();
        let v_short = SnapshotMatrix::compute(&Potential::Zero, &[-3.0], &grid).unwrap();
        assert!(matches!(galerkin_internal(&v_short, &f, -2.0), Err(LslError::Dimension(_))));
        let v_other = SnapshotMatrix::compute(&Potential::Zero, &[-3.0, -2.0], &grid).unwrap();
        assert!(matches!(galerkin_internal(&v_other, &f, -2.0), Err(LslError::Alignment(_))));
    }

    #[test]
    fn rom_resonance_is_refused() {
        let grid = Grid::new(1.0, 201).unwrap();
        let data = generate_dataset(&Potential::Zero, &[-3.0], &grid).unwrap();
        let f = lanczos(&build_loewner(&data).unwrap(), DEFAULT_TRUNCATION).unwrap();
        let v = SnapshotMatrix::compute(&Potential::Zero, &[-3.0], &grid).unwrap();
        let pole = -f.tridiagonal.diag()[0];
        assert!(matches!(galerkin_internal(&v, &f, pole), Err(LslError::RomResonance { .. })));
    }
}
