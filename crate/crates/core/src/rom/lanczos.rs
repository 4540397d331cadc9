//! Generalized Lanczos tridiagonalization of the pencil `(S, M)`.
//!
//! The recursion runs on `M^{-1} S` in the `M`-inner product. `M` is applied
//! through the eigendecomposition of its Jacobi-scaled form `D M D`,
//! `D = diag(M)^{-1/2}`, with small eigenvalues floored away. That is the same
//! as running a plain symmetric Lanczos on the whitened matrix `Z^T S Z`,
//! `Z = D U_r diag(mu_r)^{-1/2}`, and mapping the basis back with
//! `Q = Z Q_hat`. Every new vector is re-orthogonalized twice against all
//! previous ones. Off-diagonals are norms, so they come out positive, and
//! `q_1` is a positive multiple of `M^+ b`; together these fix the basis
//! uniquely, which the `V Q ~ V_0 Q_0` substitution relies on.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{LslError, Result};
use crate::rom::LoewnerPencil;
use crate::tridiag::SymTridiagonal;

/// Default relative threshold for mass eigenvalue flooring and for the
/// Lanczos breakdown test.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosFactors {
    /// `T`, `k x k`.
    pub tridiagonal: SymTridiagonal,
    /// `Q`, `m x k`, columns `M`-orthonormal.
    pub basis: DMatrix<f64>,
    /// `sqrt(b^T M^{-1} b)`.
    pub normfactor: f64,
    pub lambdas: Vec<f64>,
}

impl LanczosFactors {
    pub fn rank(&self) -> usize {
        self.tridiagonal.len()
    }

    /// `max |Q^T M Q - I|`.
    pub fn orthonormality_defect(&self, mass: &DMatrix<f64>) -> f64 {
        let gram = self.basis.transpose() * mass * &self.basis;
        let k = gram.nrows();
        (gram - DMatrix::<f64>::identity(k, k)).amax()
    }

    /// `max |Q^T S Q - T|`.
    pub fn projection_defect(&self, stiffness: &DMatrix<f64>) -> f64 {
        let projected = self.basis.transpose() * stiffness * &self.basis;
        (projected - self.tridiagonal.to_dense()).amax()
    }
}

pub fn lanczos(pencil: &LoewnerPencil, truncation_tol: f64) -> Result<LanczosFactors> {
    lanczos_with_rank(pencil, truncation_tol, usize::MAX)
}

/// Number of mass eigenvalues kept after flooring.
pub fn retained_rank(pencil: &LoewnerPencil, truncation_tol: f64) -> Result<usize> {
    check_pencil(pencil, truncation_tol)?;
    Ok(Whitening::new(&pencil.mass, truncation_tol, usize::MAX)?.transform.ncols())
}

/// [`lanczos`] keeping at most `max_rank` mass eigenpairs (the largest).
///
/// Two pencils whose bases are later swapped for one another must be
/// whitened to the same rank: a single extra near-floor direction changes
/// the whole Lanczos sequence.
pub fn lanczos_with_rank(
    pencil: &LoewnerPencil,
    truncation_tol: f64,
    max_rank: usize,
) -> Result<LanczosFactors> {
    check_pencil(pencil, truncation_tol)?;
    let whitening = Whitening::new(&pencil.mass, truncation_tol, max_rank.max(1))?;
    let z = &whitening.transform;
    let r = z.ncols();

    let projected = z.transpose() * &pencil.stiffness * z;
    let projected = (&projected + projected.transpose()) * 0.5;

    let start = z.transpose() * &pencil.source;
    let normfactor = start.norm();
    if !(normfactor > 0.0 && normfactor.is_finite()) {
        return Err(LslError::DegenerateSource {
            value: normfactor * normfactor,
        });
    }

    let mut vectors: Vec<DVector<f64>> = vec![start / normfactor];
    let mut alphas: Vec<f64> = Vec::with_capacity(r);
    let mut betas: Vec<f64> = Vec::with_capacity(r);
    let mut t_norm = 0.0f64;
    loop {
        let j = vectors.len() - 1;
        let q = &vectors[j];
        let mut w = &projected * q;
        let alpha = q.dot(&w);
        w.axpy(-alpha, q, 1.0);
        if j > 0 {
            w.axpy(-betas[j - 1], &vectors[j - 1], 1.0);
        }
        for _ in 0..2 {
            for v in &vectors {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        alphas.push(alpha);
        let beta = w.norm();
        let prev = betas.last().copied().unwrap_or(0.0);
        t_norm = t_norm.max(alpha.abs() + beta + prev);
        if vectors.len() == r || beta <= truncation_tol * t_norm {
            break;
        }
        betas.push(beta);
        vectors.push(w / beta);
    }

    let k = vectors.len();
    let q_hat = DMatrix::from_columns(&vectors);
    let basis = z * q_hat;
    debug_assert_eq!(basis.ncols(), k);
    Ok(LanczosFactors {
        tridiagonal: SymTridiagonal::new(alphas, betas)?,
        basis,
        normfactor,
        lambdas: pencil.lambdas.clone(),
    })
}

fn check_pencil(pencil: &LoewnerPencil, truncation_tol: f64) -> Result<()> {
    if !(truncation_tol > 0.0 && truncation_tol < 1.0) {
        return Err(LslError::InvalidInput(format!(
            "truncation tolerance must lie in (0, 1), got {truncation_tol}"
        )));
    }
    let m = pencil.dim();
    if m == 0
        || pencil.mass.shape() != (m, m)
        || pencil.stiffness.shape() != (m, m)
        || pencil.lambdas.len() != m
    {
        return Err(LslError::Dimension(format!(
            "inconsistent pencil: S {:?}, M {:?}, b {m}, {} sample points",
            pencil.stiffness.shape(),
            pencil.mass.shape(),
            pencil.lambdas.len()
        )));
    }
    if pencil.mass.iter().chain(pencil.stiffness.iter()).chain(pencil.source.iter()).any(|v| !v.is_finite()) {
        return Err(LslError::InvalidInput("pencil has non-finite entries".into()));
    }
    Ok(())
}

/// `Z = D U_r diag(mu_r)^{-1/2}` over the eigenpairs of `D M D` kept after flooring.
struct Whitening {
    transform: DMatrix<f64>,
}

impl Whitening {
    fn new(mass: &DMatrix<f64>, truncation_tol: f64, max_rank: usize) -> Result<Self> {
        // Jacobi scaling: the floor then acts relative to each snapshot's own
        // norm instead of the largest one
        let scale: Vec<f64> = (0..mass.nrows())
            .map(|i| {
                let d = mass[(i, i)];
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let equilibrated = DMatrix::from_fn(mass.nrows(), mass.ncols(), |i, j| {
            0.5 * (mass[(i, j)] + mass[(j, i)]) * scale[i] * scale[j]
        });
        let eig = SymmetricEigen::new(equilibrated);
        let largest = eig.eigenvalues.max();
        if !(largest > 0.0) {
            return Err(LslError::DegenerateMass {
                eigenvalue: largest,
                tolerance: 0.0,
            });
        }
        let floor = truncation_tol * largest;
        // divided differences carry roundoff well above eps * |M|; negative
        // eigenvalues are only fatal beyond the square root of the floor
        let indefinite = truncation_tol.sqrt() * largest;
        let smallest = eig.eigenvalues.min();
        if smallest < -indefinite {
            return Err(LslError::DegenerateMass {
                eigenvalue: smallest,
                tolerance: indefinite,
            });
        }
        let mut kept: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > floor)
            .collect();
        // deterministic order: descending eigenvalue
        kept.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        kept.truncate(max_rank);
        let columns: Vec<DVector<f64>> = kept
            .iter()
            .map(|&i| {
                let mut c = eig.eigenvectors.column(i) / eig.eigenvalues[i].sqrt();
                for (v, s) in c.iter_mut().zip(&scale) {
                    *v *= s;
                }
                c
            })
            .collect();
        Ok(Self {
            transform: DMatrix::from_columns(&columns),
        })
    }
}
