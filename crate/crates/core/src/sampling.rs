//! Sample points in the resonance frequency domain.
//!
//! In 1D with Neumann conditions the background resonances sit at
//! `r_k = -(k pi / L)^2`. Each of the first `N` intervals `(r_{k+1}, r_k)`
//! receives `f` equally spaced interior points; the endpoints are excluded.

use std::f64::consts::PI;

use crate::error::{LslError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// Number of resonance intervals `N`.
    pub intervals: usize,
    /// Points per interval `f`.
    pub per_interval: usize,
    pub length: f64,
    /// `N * f` sample points, strictly increasing.
    pub lambdas: Vec<f64>,
}

/// Approximate (background) resonance `-(k pi / L)^2`.
pub fn approximate_resonance(k: usize, length: f64) -> f64 {
    -(k as f64 * PI / length).powi(2)
}

pub fn weyl_sample(intervals: usize, per_interval: usize, length: f64) -> Result<SamplingPlan> {
    if intervals == 0 || per_interval == 0 {
        return Err(LslError::InvalidInput(format!(
            "need at least one interval and one point per interval, got N = {intervals}, f = {per_interval}"
        )));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(LslError::InvalidInput(format!(
            "domain length must be positive, got {length}"
        )));
    }
    let divisor = (per_interval + 1) as f64;
    let mut lambdas = Vec::with_capacity(intervals * per_interval);
    for k in (0..intervals).rev() {
        let upper = approximate_resonance(k, length);
        let lower = approximate_resonance(k + 1, length);
        // increasing order inside the interval
        for i in (1..=per_interval).rev() {
            lambdas.push(upper + (i as f64 / divisor) * (lower - upper));
        }
    }
    Ok(SamplingPlan {
        intervals,
        per_interval,
        length,
        lambdas,
    })
}
