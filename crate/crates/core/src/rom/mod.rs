//! Data-driven reduced-order model: Loewner pencil, Lanczos factors and
//! internal-solution estimates.

mod internal;
mod lanczos;
mod loewner;

pub use internal::{galerkin_internal, lsl_internal, SnapshotMatrix};
pub(crate) use internal::same_points;
pub use lanczos::{lanczos, lanczos_with_rank, retained_rank, LanczosFactors, DEFAULT_TRUNCATION};
pub use loewner::{build_loewner, gram_oracle, LoewnerPencil};
