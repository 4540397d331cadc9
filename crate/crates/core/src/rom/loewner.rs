//! Data-driven projected pencil `(S, M, b)` and its quadrature oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{LslError, Result};
use crate::pde::assemble_operator;
use crate::potential::Potential;
use crate::rom::SnapshotMatrix;
use crate::transfer::DataSet;

/// Galerkin pencil of the snapshot basis: `S_ij = <u_i, L u_j>`,
/// `M_ij = <u_i, u_j>`, `b_i = <u_i, delta> = F(lambda_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerPencil {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub source: DVector<f64>,
    pub lambdas: Vec<f64>,
}

impl LoewnerPencil {
    pub fn dim(&self) -> usize {
        self.source.len()
    }
}

/// Builds the pencil from boundary data alone via divided differences.
pub fn build_loewner(data: &DataSet) -> Result<LoewnerPencil> {
    let samples = data.samples();
    let m = samples.len();
    if m == 0 {
        return Err(LslError::InvalidInput("empty dataset".into()));
    }
    let mut stiffness = DMatrix::zeros(m, m);
    let mut mass = DMatrix::zeros(m, m);
    for i in 0..m {
        let si = samples[i];
        mass[(i, i)] = -si.derivative;
        stiffness[(i, i)] = si.value + si.lambda * si.derivative;
        for j in i + 1..m {
            let sj = samples[j];
            let dl = si.lambda - sj.lambda;
            if dl == 0.0 {
                return Err(LslError::InvalidInput(format!(
                    "coincident sample points at lambda = {}",
                    si.lambda
                )));
            }
            let mij = (sj.value - si.value) / dl;
            let sij = (si.lambda * si.value - sj.lambda * sj.value) / dl;
            mass[(i, j)] = mij;
            mass[(j, i)] = mij;
            stiffness[(i, j)] = sij;
            stiffness[(j, i)] = sij;
        }
    }
    Ok(LoewnerPencil {
        stiffness,
        mass,
        source: DVector::from_iterator(m, samples.iter().map(|s| s.value)),
        lambdas: data.lambdas(),
    })
}

/// The same pencil computed from internal snapshots by trapezoid quadrature.
/// Test oracle only: the inversion path never sees true-medium snapshots.
pub fn gram_oracle(snapshots: &SnapshotMatrix, p: &Potential) -> Result<LoewnerPencil> {
    let grid = snapshots.grid();
    let op = assemble_operator(p, grid)?;
    let v = snapshots.matrix();
    let m = v.ncols();
    let weights = DVector::from_column_slice(grid.weights());

    let mut weighted = v.clone();
    for mut col in weighted.column_iter_mut() {
        col.component_mul_assign(&weights);
    }
    let mut applied = DMatrix::zeros(v.nrows(), m);
    for (j, col) in v.column_iter().enumerate() {
        let lu = op.apply(col.as_slice());
        applied.set_column(j, &DVector::from_vec(lu));
    }
    let mass = weighted.transpose() * v;
    let stiffness = weighted.transpose() * applied;
    // symmetrize the quadrature roundoff
    let mass = (&mass + mass.transpose()) * 0.5;
    let stiffness = (&stiffness + stiffness.transpose()) * 0.5;
    let source = DVector::from_iterator(m, v.row(0).iter().copied());
    Ok(LoewnerPencil {
        stiffness,
        mass,
        source,
        lambdas: snapshots.lambdas().to_vec(),
    })
}
