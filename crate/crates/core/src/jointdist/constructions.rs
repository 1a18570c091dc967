//! The commuting-case reference distribution and two standard baselines.

use super::{JointDistribution, OutcomeGrid, QjdConfig, WeightKind};
use crate::error::{QjdError, Result};
use crate::matrix::{commutator_norm, ComplexMatrix, DensityState, HermitianObservable};
use crate::spectral::{eigendecompose, SpectralMeasure};

/// Checks dimensions and decomposes every observable.
pub(super) fn decompose_all(
    obs: &[HermitianObservable],
    rho: &DensityState,
    cluster_tol: f64,
) -> Result<Vec<SpectralMeasure>> {
    if obs.is_empty() {
        return Err(QjdError::NoObservables);
    }
    for a in obs {
        if a.dim() != rho.dim() {
            return Err(QjdError::DimensionMismatch(rho.dim(), a.dim()));
        }
    }
    obs.iter().map(|a| eigendecompose(a, cluster_tol)).collect()
}

/// Fails with [`QjdError::NotCommuting`] on the first pair whose commutator
/// exceeds `tol * max(1, ||A_i||_F ||A_j||_F)`.
pub(crate) fn require_commuting(obs: &[HermitianObservable], tol: f64) -> Result<()> {
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            let norm = commutator_norm(&obs[i], &obs[j])?;
            let bound = tol
                * (obs[i].matrix().frobenius_norm() * obs[j].matrix().frobenius_norm()).max(1.0);
            if norm > bound {
                return Err(QjdError::NotCommuting {
                    first: i,
                    second: j,
                    norm,
                    bound,
                });
            }
        }
    }
    Ok(())
}

/// Visits every index tuple with the running left-to-right product of the
/// chosen projectors, `P^1_{j1} P^2_{j2} ... P^l_{jl}`.
fn for_each_product(
    measures: &[SpectralMeasure],
    grid: &OutcomeGrid,
    prefix: &ComplexMatrix,
    level: usize,
    offset: usize,
    visit: &mut dyn FnMut(usize, &ComplexMatrix),
) {
    if level == measures.len() {
        visit(offset, prefix);
        return;
    }
    let stride = grid.strides()[level];
    for (j, p) in measures[level].projectors().iter().enumerate() {
        let next = prefix * p;
        for_each_product(measures, grid, &next, level + 1, offset + j * stride, visit);
    }
}

/// The textbook joint distribution of a commuting family:
/// `p(j1..jn) = Re tr(rho P^1_{j1} ... P^n_{jn})`.
pub fn standard_commuting_joint(
    obs: &[HermitianObservable],
    rho: &DensityState,
    config: &QjdConfig,
) -> Result<JointDistribution> {
    let measures = decompose_all(obs, rho, config.cluster_tol)?;
    require_commuting(obs, config.commute_tol)?;
    let grid = OutcomeGrid::from_measures(&measures)?;
    let mut weights = vec![0.0; grid.len()];
    let id = ComplexMatrix::identity(rho.dim());
    for_each_product(&measures, &grid, &id, 0, 0, &mut |flat, product| {
        weights[flat] = rho.matrix().re_trace_product(product);
    });
    JointDistribution::new(grid, weights, WeightKind::Probability, config.clamp_tol)
}

/// Born distribution of a single observable.
pub fn born_distribution(
    a: &HermitianObservable,
    rho: &DensityState,
    config: &QjdConfig,
) -> Result<JointDistribution> {
    standard_commuting_joint(std::slice::from_ref(a), rho, config)
}

/// Repeated projective measurement in list order:
/// `p(j1..jn) = Re tr(P^n ... P^1 rho P^1 ... P^n)`. Order-dependent.
pub fn sequential_joint(
    obs: &[HermitianObservable],
    rho: &DensityState,
    config: &QjdConfig,
) -> Result<JointDistribution> {
    let measures = decompose_all(obs, rho, config.cluster_tol)?;
    let grid = OutcomeGrid::from_measures(&measures)?;
    let mut weights = vec![0.0; grid.len()];
    collapse(&measures, &grid, rho.matrix(), 0, 0, &mut weights);
    JointDistribution::new(grid, weights, WeightKind::Probability, config.clamp_tol)
}

fn collapse(
    measures: &[SpectralMeasure],
    grid: &OutcomeGrid,
    state: &ComplexMatrix,
    level: usize,
    offset: usize,
    weights: &mut [f64],
) {
    if level == measures.len() {
        weights[offset] = state.trace().re;
        return;
    }
    let stride = grid.strides()[level];
    for (j, p) in measures[level].projectors().iter().enumerate() {
        let post = &(p * state) * p;
        collapse(
            measures,
            grid,
            &post,
            level + 1,
            offset + j * stride,
            weights,
        );
    }
}

/// Symmetrized product quasi-distribution of two observables:
/// `p(i, j) = Re tr(rho (P_i Q_j + Q_j P_i) / 2)`. Weights may be negative.
pub fn margenau_hill_joint(
    obs: &[HermitianObservable],
    rho: &DensityState,
    config: &QjdConfig,
) -> Result<JointDistribution> {
    if obs.len() != 2 {
        return Err(QjdError::WrongArity {
            expected: 2,
            got: obs.len(),
        });
    }
    let measures = decompose_all(obs, rho, config.cluster_tol)?;
    let grid = OutcomeGrid::from_measures(&measures)?;
    let mut weights = vec![0.0; grid.len()];
    for (i, p) in measures[0].projectors().iter().enumerate() {
        for (j, q) in measures[1].projectors().iter().enumerate() {
            let pq = rho.matrix().re_trace_product(&(p * q));
            let qp = rho.matrix().re_trace_product(&(q * p));
            weights[grid.flat_index(&[i, j])] = 0.5 * (pq + qp);
        }
    }
    JointDistribution::new(grid, weights, WeightKind::Quasi, config.clamp_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::fixtures::*;
    use crate::matrix::{haar_unitary, random_density, random_hermitian};

    fn obs(m: ComplexMatrix) -> HermitianObservable {
        HermitianObservable::new(m, "").unwrap()
    }

    fn cfg() -> QjdConfig {
        QjdConfig::default()
    }

    #[test]
    fn born_rule_on_eigenstate() {
        let rho = DensityState::basis(2, 0).unwrap();
        let d = standard_commuting_joint(&[obs(pauli_z())], &rho, &cfg()).unwrap();
        assert_eq!(d.axes(), &[vec![-1.0, 1.0]]);
        assert_eq!(d.weights(), &[0.0, 1.0]);
    }

    #[test]
    fn simultaneous_diagonal_case() {
        let q = 0.35;
        let rho = DensityState::new(ComplexMatrix::from_real_diagonal(&[q, 1.0 - q])).unwrap();
        let a = obs(ComplexMatrix::from_real_diagonal(&[1.0, 2.0]));
        let b = obs(ComplexMatrix::from_real_diagonal(&[3.0, 4.0]));
        let d = standard_commuting_joint(&[a, b], &rho, &cfg()).unwrap();
        assert!((d.weight_at(&[0, 0]) - q).abs() < 1e-15);
        assert!((d.weight_at(&[1, 1]) - (1.0 - q)).abs() < 1e-15);
        assert_eq!(d.weight_at(&[0, 1]), 0.0);
        assert_eq!(d.weight_at(&[1, 0]), 0.0);
    }

    #[test]
    fn rotated_commuting_pair_delta() {
        // A = U diag(0,1,2) U^H, B = U diag(5,5,7) U^H, rho = U e1 e1^H U^H.
        let u = haar_unitary(3, 11).unwrap();
        let a = obs(ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 2.0]))
            .conjugated(&u)
            .unwrap();
        let b = obs(ComplexMatrix::from_real_diagonal(&[5.0, 5.0, 7.0]))
            .conjugated(&u)
            .unwrap();
        let rho = DensityState::basis(3, 0).unwrap().conjugated(&u).unwrap();
        let d = standard_commuting_joint(&[a, b], &rho, &cfg()).unwrap();
        assert_eq!(d.grid().axes()[1].len(), 2);
        assert!((d.weight_at(&[0, 0]) - 1.0).abs() < 1e-12);
        for (flat, w) in d.weights().iter().enumerate().skip(1) {
            assert!(w.abs() < 1e-12, "{flat}: {w}");
        }
    }

    #[test]
    fn not_commuting_reports_pair() {
        let rho = DensityState::basis(2, 0).unwrap();
        let err = standard_commuting_joint(
            &[obs(pauli_z()), obs(pauli_z()), obs(pauli_x())],
            &rho,
            &cfg(),
        )
        .unwrap_err();
        match err {
            QjdError::NotCommuting {
                first,
                second,
                norm,
                ..
            } => {
                assert_eq!((first, second), (0, 2));
                assert!((norm - 2.0 * 2f64.sqrt()).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityState::basis(3, 0).unwrap();
        assert_eq!(
            sequential_joint(&[obs(pauli_z())], &rho, &cfg()).unwrap_err(),
            QjdError::DimensionMismatch(3, 2)
        );
        assert_eq!(
            sequential_joint(&[], &rho, &cfg()).unwrap_err(),
            QjdError::NoObservables
        );
    }

    #[test]
    fn sequential_x_then_z_is_uniform() {
        let rho = DensityState::basis(2, 0).unwrap();
        let d = sequential_joint(&[obs(pauli_x()), obs(pauli_z())], &rho, &cfg()).unwrap();
        for w in d.weights() {
            assert!((w - 0.25).abs() < 1e-15, "{w}");
        }
    }

    #[test]
    fn sequential_z_then_x() {
        // axes ascending: z index 1 is +1, x index 0/1 is -1/+1
        let rho = DensityState::basis(2, 0).unwrap();
        let d = sequential_joint(&[obs(pauli_z()), obs(pauli_x())], &rho, &cfg()).unwrap();
        assert!((d.weight_at(&[1, 0]) - 0.5).abs() < 1e-15);
        assert!((d.weight_at(&[1, 1]) - 0.5).abs() < 1e-15);
        assert!(d.weight_at(&[0, 0]).abs() < 1e-15);
        assert!(d.weight_at(&[0, 1]).abs() < 1e-15);
    }

    #[test]
    fn sequential_single_observable_is_born() {
        let a = random_hermitian(4, 3).unwrap();
        let rho = random_density(4, 4).unwrap();
        let s = sequential_joint(std::slice::from_ref(&a), &rho, &cfg()).unwrap();
        let b = born_distribution(&a, &rho, &cfg()).unwrap();
        assert!(s.max_weight_difference(&b).unwrap() < 1e-14);
    }

    #[test]
    fn margenau_hill_examples() {
        let rho = DensityState::basis(2, 0).unwrap();
        let d = margenau_hill_joint(&[obs(pauli_x()), obs(pauli_z())], &rho, &cfg()).unwrap();
        assert_eq!(d.kind(), WeightKind::Quasi);
        for x in 0..2 {
            assert!((d.weight_at(&[x, 1]) - 0.5).abs() < 1e-15);
            assert!(d.weight_at(&[x, 0]).abs() < 1e-15);
        }
        assert_eq!(
            margenau_hill_joint(&[obs(pauli_x())], &rho, &cfg()).unwrap_err(),
            QjdError::WrongArity {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn margenau_hill_goes_negative() {
        // p = (1 + s1 r_x + s2 r_z) / 4 in Bloch coordinates, negative near r_x = r_z = -1/sqrt2
        let mut found = false;
        for seed in 0..50 {
            let rho = random_density(2, seed).unwrap();
            let d = margenau_hill_joint(&[obs(pauli_x()), obs(pauli_z())], &rho, &cfg()).unwrap();
            assert!((d.sum() - 1.0).abs() < 1e-12);
            found |= d.min_weight() < -1e-3;
        }
        assert!(found, "no negative quasi-probability on 50 random states");
    }

    #[test]
    fn margenau_hill_commuting_pair_matches_standard() {
        let u = haar_unitary(3, 5).unwrap();
        let a = obs(ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]))
            .conjugated(&u)
            .unwrap();
        let b = obs(ComplexMatrix::from_real_diagonal(&[2.0, 3.0, 4.0]))
            .conjugated(&u)
            .unwrap();
        let rho = random_density(3, 6).unwrap();
        let mh = margenau_hill_joint(&[a.clone(), b.clone()], &rho, &cfg()).unwrap();
        let st = standard_commuting_joint(&[a, b], &rho, &cfg()).unwrap();
        assert!(mh.max_weight_difference(&st).unwrap() < 1e-12);
    }
}
