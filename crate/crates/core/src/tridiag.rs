//! Symmetric tridiagonal matrices: shifted solves and Sturm inertia counts.
//!
//! Both the finite-difference operator and the Lanczos matrix `T` are
//! symmetric tridiagonal, and both are only ever used through shifted
//! systems `(K + s D) x = r` with a positive diagonal `D`. Solves use
//! Gaussian elimination with partial pivoting (the shifted systems are
//! indefinite in the resonance regime); eigenvalue proximity is decided
//! by Sylvester inertia of the `LDL^T` pivots rather than by pivot size.

use crate::error::{LslError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(LslError::Dimension("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(LslError::Dimension(format!(
                "tridiagonal with {} diagonal entries needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        let k = k.clamp(1, self.len());
        Self {
            diag: self.diag[..k].to_vec(),
            off: self.off[..k - 1].to_vec(),
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut out = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = self.diag[i];
        }
        for (i, b) in self.off.iter().enumerate() {
            out[(i, i + 1)] = *b;
            out[(i + 1, i)] = *b;
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].abs();
                if i > 0 {
                    acc += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    acc += self.off[i].abs();
                }
                acc
            })
            .fold(0.0, f64::max)
    }

    /// Solves `(self + shift * mass) x = rhs`; `mass = None` means the identity.
    ///
    /// Returns `None` if elimination meets an exactly zero pivot.
    pub fn solve_shifted(&self, shift: f64, mass: Option<&[f64]>, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let shifted: Vec<f64> = match mass {
            Some(d) => self.diag.iter().zip(d).map(|(a, m)| a + shift * m).collect(),
            None => self.diag.iter().map(|a| a + shift).collect(),
        };
        solve_general(&self.off, &shifted, &self.off, rhs)
    }

    /// Number of eigenvalues of the pencil `(self, mass)` strictly below `sigma`.
    ///
    /// `mass` must be a positive diagonal; `None` means the identity.
    pub fn count_below(&self, sigma: f64, mass: Option<&[f64]>) -> usize {
        let n = self.len();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        let mut count = 0;
        let mut pivot = 0.0;
        for i in 0..n {
            let m = mass.map_or(1.0, |d| d[i]);
            let mut d = self.diag[i] - sigma * m;
            if i > 0 {
                let b = self.off[i - 1];
                d -= b * b / pivot;
            }
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
            pivot = d;
        }
        count
    }

    /// Locates the eigenvalue of the pencil `(self, mass)` nearest to `target`
    /// among those inside `[target - radius, target + radius]`, by bisection on
    /// Sturm counts. Returns `None` if the window holds no eigenvalue.
    pub fn nearest_eigenvalue(&self, target: f64, radius: f64, mass: Option<&[f64]>) -> Option<f64> {
        let lo = target - radius;
        let hi = target + radius;
        let below_lo = self.count_below(lo, mass);
        let below_hi = self.count_below(hi, mass);
        if below_hi == below_lo {
            return None;
        }
        let below_target = self.count_below(target, mass);
        let mut best: Option<f64> = None;
        // closest eigenvalue at or above the target, then closest below it
        if below_hi > below_target {
            best = Some(self.bisect_kth(below_target, target, hi, mass));
        }
        if below_target > below_lo {
            let candidate = self.bisect_kth(below_target - 1, lo, target, mass);
            best = match best {
                Some(b) if (b - target).abs() <= (candidate - target).abs() => Some(b),
                _ => Some(candidate),
            };
        }
        best
    }

    /// The `k`-th (0-based) eigenvalue, known to lie in `[lo, hi]`.
    fn bisect_kth(&self, k: usize, mut lo: f64, mut hi: f64, mass: Option<&[f64]>) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid, mass) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Gaussian elimination with partial pivoting for a general tridiagonal
/// system with sub-diagonal `lower`, diagonal `diag`, super-diagonal `upper`.
pub fn solve_general(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if n == 1 {
        return (diag[0] != 0.0).then(|| vec![rhs[0] / diag[0]]);
    }
    // row i of the working system: d[i] x_i + du[i] x_{i+1} + du2[i] x_{i+2}
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut dl = lower.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
            }
            let factor = dl[i] / d[i];
            d[i + 1] -= factor * du[i];
            b[i + 1] -= factor * b[i];
        } else {
            // swap rows i and i+1
            let factor = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - factor * tmp;
            du[i] = tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -factor * du2[i];
            }
            b.swap(i, i + 1);
            b[i + 1] -= factor * b[i];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        return None;
    }

    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Some(x)
}
