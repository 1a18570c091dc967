//! Order-averaged projector-chain distribution for arbitrary tuples.
//!
//! The state enters as a Hilbert-Schmidt vector: its positive square root
//! `R`, so that `||R||_F^2 = tr(rho) = 1`. Spectral projectors act on such
//! vectors from the left. For an ordering `s` of the observables and an
//! outcome tuple `j`, the branch vector is
//!
//! ```text
//! v_s(j) = P^{s(n)}_{j_s(n)} ... P^{s(1)}_{j_s(1)} R
//! ```
//!
//! and its squared norm is that branch's weight. Because each resolution of
//! the identity is orthogonal, the branch weights of one ordering add up to
//! `||R||_F^2 = 1`. The distribution is the uniform average over all `n!`
//! orderings:
//!
//! ```text
//! p(j) = (1/n!) sum_s ||v_s(j)||_F^2
//! ```
//!
//! * Every weight is a sum of squared norms, so it is nonnegative.
//! * When the observables commute, every chain collapses to the single
//!   projector `P^1_{j1} ... P^n_{jn}` and `p(j) = tr(rho P^1 ... P^n)`.
//! * Conjugating every observable and the state by a unitary `U` maps each
//!   branch vector to `U v U^H`, which has the same norm.
//! * The result does not depend on the order of the observable list.
//! * Weights are polynomial in the projectors, so they move continuously
//!   with the observables wherever the eigenvalue multiplicities are
//!   locally constant.

use super::constructions::decompose_all;
use super::{JointDistribution, OutcomeGrid, QjdConfig, WeightKind};
use crate::error::{QjdError, Result};
use crate::matrix::{ComplexMatrix, DensityState, HermitianObservable};
use crate::spectral::SpectralMeasure;

/// Positive square root of the state, viewed as a Hilbert-Schmidt vector.
struct StateVector(ComplexMatrix);

impl StateVector {
    fn of(rho: &DensityState) -> Result<Self> {
        Ok(Self(rho.sqrt()?))
    }

    fn norm_sqr(m: &ComplexMatrix) -> f64 {
        m.as_dmatrix().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Left action of the spectral projectors of a fixed ordering of the tuple
/// on Hilbert-Schmidt vectors, accumulating branch weights into a grid.
struct ChainAction<'a> {
    measures: &'a [SpectralMeasure],
    grid: &'a OutcomeGrid,
    order: &'a [usize],
}

impl ChainAction<'_> {
    fn accumulate(&self, vector: &ComplexMatrix, level: usize, offset: usize, weights: &mut [f64]) {
        if level == self.order.len() {
            weights[offset] += StateVector::norm_sqr(vector);
            return;
        }
        let axis = self.order[level];
        let stride = self.grid.strides()[axis];
        for (j, p) in self.measures[axis].projectors().iter().enumerate() {
            let branch = p * vector;
            // An annihilated branch stays zero under further projections.
            if StateVector::norm_sqr(&branch) == 0.0 {
                continue;
            }
            self.accumulate(&branch, level + 1, offset + j * stride, weights);
        }
    }
}

/// Advances `perm` to the next lexicographic permutation; false after the last.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..perm.len())
        .rev()
        .find(|&j| perm[j] > perm[pivot])
        .expect("successor exists");
    perm.swap(pivot, j);
    perm[i..].reverse();
    true
}

/// Joint distribution of an arbitrary tuple of observables in `rho`.
///
/// Outcome axes are the ascending distinct eigenvalues of each observable, in
/// list order. See the module documentation for the construction and its
/// properties.
pub fn qjd_joint(
    obs: &[HermitianObservable],
    rho: &DensityState,
    config: &QjdConfig,
) -> Result<JointDistribution> {
    if obs.len() > config.max_observables {
        return Err(QjdError::TooManyObservables {
            got: obs.len(),
            max: config.max_observables,
        });
    }
    let measures = decompose_all(obs, rho, config.cluster_tol)?;
    let grid = OutcomeGrid::from_measures(&measures)?;
    let root = StateVector::of(rho)?;

    let mut weights = vec![0.0; grid.len()];
    let mut order: Vec<usize> = (0..obs.len()).collect();
    let mut orderings = 0usize;
    loop {
        let action = ChainAction {
            measures: &measures,
            grid: &grid,
            order: &order,
        };
        action.accumulate(&root.0, 0, 0, &mut weights);
        orderings += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    let scale = 1.0 / orderings as f64;
    weights.iter_mut().for_each(|w| *w *= scale);

    JointDistribution::new(grid, weights, WeightKind::Probability, config.clamp_tol)
}
