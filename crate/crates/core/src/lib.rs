//! Lippmann-Schwinger-Lanczos imaging for the 1D Schrödinger equation
//! `-u'' + p u + lambda u = delta(x)` on `(0, L)` with Neumann conditions,
//! using single-input single-output boundary data sampled in the resonance
//! frequency domain.
//!
//! Pipeline: [`sampling::weyl_sample`] picks the sample points,
//! [`transfer::generate_dataset`] simulates `F` and `dF/dlambda`,
//! [`rom::build_loewner`] and [`rom::lanczos`] turn the data into a
//! reduced-order model, and [`imaging::reconstruct`] solves the linearized
//! Lippmann-Schwinger system with either the Born field or the LSL field.
//!
//! With the default `parallel` feature the per-sample work (forward solves,
//! system rows) runs on rayon; without it everything is sequential and the
//! results are bit-identical.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod grid;
pub mod imaging;
mod par;
pub mod pde;
pub mod potential;
pub mod rom;
pub mod sampling;
pub mod transfer;
pub mod tridiag;

pub use error::{LslError, Result};
pub use grid::Grid;
pub use imaging::{
    assemble_system, reconstruct, relative_l2_error, solve_regularized, ImagingSystem, Method,
    ReconstructionConfig, ReconstructionResult,
};
pub use pde::{analytic_background_transfer, assemble_operator, solve_forward, Snapshot};
pub use potential::Potential;
pub use rom::{build_loewner, galerkin_internal, gram_oracle, lanczos, lsl_internal, LanczosFactors, LoewnerPencil, SnapshotMatrix};
pub use sampling::{weyl_sample, SamplingPlan};
pub use transfer::{generate_dataset, measure_transfer, transfer_derivative, DataSet, SpectralSample};
