//! Seeded inputs shared by the benchmarks.

use qjd_core::verify::{generate_trial, Family, TrialSpec};
use qjd_core::{DensityState, HermitianObservable};

/// A generic tuple of `n` observables on `C^dim` and a random state.
pub fn generic_tuple(dim: usize, n: usize, seed: u64) -> (Vec<HermitianObservable>, DensityState) {
    let spec = TrialSpec::new(dim, n, seed, Family::Generic).expect("benchmark shapes are valid");
    let t = generate_trial(&spec).expect("seeded generation does not fail");
    (t.observables, t.state)
}
