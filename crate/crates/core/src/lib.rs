//! # qjd-core
//!
//! Joint outcome distributions for finite tuples of Hermitian observables,
//! commuting or not, evaluated against a density state.
//!
//! - [`matrix`]: dense complex matrices, validated observable/state/unitary
//!   types and seeded samplers.
//! - [`spectral`]: spectral projectors with degeneracy clustering.
//! - [`jointdist`]: the symmetrized joint distribution ([`jointdist::qjd_joint`]),
//!   the commuting-case reference, two baselines, marginals and distances.
//! - [`verify`]: seeded property suites and their reports.

#![forbid(unsafe_code)]

pub mod error;
pub mod jointdist;
pub mod json;
pub mod matrix;
pub mod spectral;
pub mod verify;

pub use error::{QjdError, Result};
pub use jointdist::{JointDistribution, OutcomeGrid, QjdConfig, WeightKind};
pub use matrix::{ComplexMatrix, DensityState, HermitianObservable, Tolerances, UnitaryMatrix};
pub use spectral::{eigendecompose, SpectralMeasure};
