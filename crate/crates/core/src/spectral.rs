//! Spectral resolution of Hermitian observables.
//!
//! An observable `A` is split into its distinct eigenvalues `l_1 < ... < l_k`
//! and the orthogonal projectors `P_j` onto the corresponding eigenspaces, so
//! that `A = sum_j l_j P_j` and `sum_j P_j = I`. Floating-point eigensolvers
//! never return exactly repeated eigenvalues, so numerically coincident
//! eigenvalues are clustered and their eigenvectors summed into one projector.
//! Only projectors leave this module; raw eigenvectors inside a degenerate
//! cluster are basis-dependent and never exposed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QjdError, Result};
use crate::matrix::{ComplexMatrix, HermitianObservable, UnitaryMatrix};

/// Default relative gap under which neighbouring eigenvalues are merged.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Bound used for the projector invariants (idempotence, orthogonality,
/// resolution of identity).
pub const PROJECTOR_TOL: f64 = 1e-8;

/// Relative bound on `||sum_j l_j P_j - A||_F`.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Distinct eigenvalues of an observable with their spectral projectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl SpectralMeasure {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Projector of the `index`-th smallest eigenvalue.
    pub fn projector_for(&self, index: usize) -> Result<&ComplexMatrix> {
        self.projectors.get(index).ok_or(QjdError::IndexOutOfRange {
            index,
            len: self.projectors.len(),
        })
    }

    /// `round(tr P_j)` for each projector.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| p.trace().re.round().max(0.0) as usize)
            .collect()
    }

    /// `sum_j l_j P_j`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim());
        for (l, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = &acc + &p.scale(Complex64::new(*l, 0.0));
        }
        acc
    }

    /// Same eigenvalues, projectors `U P_j U^H`.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Result<SpectralMeasure> {
        if u.dim() != self.dim() {
            return Err(QjdError::DimensionMismatch(self.dim(), u.dim()));
        }
        let projectors = self
            .projectors
            .iter()
            .map(|p| p.conjugate_by(u.matrix()).hermitian_part())
            .collect();
        let sm = SpectralMeasure {
            eigenvalues: self.eigenvalues.clone(),
            projectors,
        };
        sm.check_projectors()?;
        Ok(sm)
    }

    /// Largest violation of the projector invariants, as
    /// `(idempotence/hermiticity, orthogonality, resolution of identity)`.
    pub fn projector_residuals(&self) -> (f64, f64, f64) {
        let d = self.dim();
        let mut idem: f64 = 0.0;
        let mut orth: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(d);
        for (i, p) in self.projectors.iter().enumerate() {
            idem = idem.max((&(p * p) - p).frobenius_norm());
            idem = idem.max(p.hermiticity_residual());
            for q in &self.projectors[i + 1..] {
                orth = orth.max((p * q).frobenius_norm());
            }
            sum = &sum + p;
        }
        let resolution = (&sum - &ComplexMatrix::identity(d)).frobenius_norm();
        (idem, orth, resolution)
    }

    fn check_projectors(&self) -> Result<()> {
        let (idem, orth, resolution) = self.projector_residuals();
        if idem > PROJECTOR_TOL {
            return Err(QjdError::InvariantViolation(format!(
                "projector not an orthogonal projection: residual {idem:e}"
            )));
        }
        if orth > PROJECTOR_TOL {
            return Err(QjdError::InvariantViolation(format!(
                "projectors not mutually orthogonal: residual {orth:e}"
            )));
        }
        if resolution > PROJECTOR_TOL {
            return Err(QjdError::InvariantViolation(format!(
                "projectors do not sum to the identity: residual {resolution:e}"
            )));
        }
        let rank_sum: usize = self.ranks().iter().sum();
        if rank_sum != self.dim() {
            return Err(QjdError::InvariantViolation(format!(
                "projector ranks sum to {rank_sum}, not {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Checks every invariant, including reconstruction of `source`.
    pub fn validate(&self, source: &ComplexMatrix) -> Result<()> {
        if self.eigenvalues.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QjdError::InvariantViolation(
                "eigenvalues not strictly increasing".into(),
            ));
        }
        self.check_projectors()?;
        let residual = (&self.reconstruct() - source).frobenius_norm();
        let bound = RECONSTRUCTION_TOL * source.frobenius_norm().max(1.0);
        if residual > bound {
            return Err(QjdError::InvariantViolation(format!(
                "reconstruction residual {residual:e} exceeds {bound:e}"
            )));
        }
        Ok(())
    }
}

/// Spectral resolution of `a`.
///
/// Eigenvalues are sorted ascending; neighbours closer than
/// `cluster_tol * max(1, max |l|)` are merged into one cluster whose value is
/// the member mean and whose projector is the sum of member projectors.
pub fn eigendecompose(a: &HermitianObservable, cluster_tol: f64) -> Result<SpectralMeasure> {
    let source = a.matrix();
    // Observable construction already guarantees this at the default
    // tolerance; recheck so that hand-built inputs fail cleanly.
    let residual = source.hermiticity_residual();
    let bound = 1e-10 * source.frobenius_norm().max(1.0);
    if residual > bound {
        return Err(QjdError::NotHermitian { residual, bound });
    }
    if cluster_tol.is_nan() || cluster_tol < 0.0 {
        return Err(QjdError::InvalidArgument(format!(
            "cluster_tol must be nonnegative, got {cluster_tol}"
        )));
    }

    let eig = crate::matrix::hermitian_eigen(source)?;
    let d = source.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let gap = cluster_tol * scale;

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= gap {
            end += 1;
        }
        let members = &order[start..end];
        let mean = members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / members.len() as f64;
        let mut p = ComplexMatrix::zeros(d);
        for &i in members {
            let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            p = &p + &ComplexMatrix::outer(&v);
        }
        eigenvalues.push(mean);
        projectors.push(p.hermitian_part());
        start = end;
    }

    let sm = SpectralMeasure {
        eigenvalues,
        projectors,
    };
    sm.validate(source)?;
    Ok(sm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::fixtures::*;
    use crate::matrix::{haar_unitary, random_hermitian};

    fn obs(m: ComplexMatrix) -> HermitianObservable {
        HermitianObservable::new(m, "").unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    fn half(re: [[f64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_parts(&[re[0].to_vec(), re[1].to_vec()], None).unwrap()
    }

    #[test]
    fn pauli_z_is_diagonal_case() {
        let sm = eigendecompose(&obs(pauli_z()), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sm.eigenvalues(), &[-1.0, 1.0]);
        assert!(close(
            sm.projector_for(0).unwrap(),
            &ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            1e-15
        ));
        assert!(close(
            sm.projector_for(1).unwrap(),
            &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            1e-15
        ));
    }

    #[test]
    fn identity_collapses_to_one_cluster() {
        let sm = eigendecompose(&obs(ComplexMatrix::identity(3)), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sm.len(), 1);
        assert!((sm.eigenvalues()[0] - 1.0).abs() < 1e-15);
        assert!(close(
            sm.projector_for(0).unwrap(),
            &ComplexMatrix::identity(3),
            1e-14
        ));
        assert_eq!(sm.ranks(), vec![3]);
    }

    #[test]
    fn pauli_x_analytic_projectors() {
        // eigenvectors (1, -1)/sqrt2 for -1 and (1, 1)/sqrt2 for +1
        let sm = eigendecompose(&obs(pauli_x()), DEFAULT_CLUSTER_TOL).unwrap();
        assert!((sm.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((sm.eigenvalues()[1] - 1.0).abs() < 1e-15);
        assert!(close(
            sm.projector_for(0).unwrap(),
            &half([[0.5, -0.5], [-0.5, 0.5]]),
            1e-14
        ));
        assert!(close(
            sm.projector_for(1).unwrap(),
            &half([[0.5, 0.5], [0.5, 0.5]]),
            1e-14
        ));
    }

    #[test]
    fn projector_index_out_of_range() {
        let sm = eigendecompose(&obs(pauli_z()), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(
            sm.projector_for(2).unwrap_err(),
            QjdError::IndexOutOfRange { index: 2, len: 2 }
        );
    }

    #[test]
    fn near_degenerate_pair_is_merged() {
        let a = obs(ComplexMatrix::from_real_diagonal(&[2.0, 2.0 + 1e-12, 5.0]));
        let sm = eigendecompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sm.len(), 2);
        assert_eq!(sm.ranks(), vec![2, 1]);
        assert!((sm.eigenvalues()[0] - (2.0 + 0.5e-12)).abs() < 1e-15);
        // and kept apart when the tolerance is tighter than the gap
        let fine = eigendecompose(&a, 1e-14).unwrap();
        assert_eq!(fine.len(), 3);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let loose = crate::matrix::Tolerances {
            hermitian: 10.0,
            ..Default::default()
        };
        let skew = ComplexMatrix::from_parts(&[vec![0.0, 1.0], vec![0.0, 0.0]], None).unwrap();
        let bad = HermitianObservable::with_tolerances(skew, "", &loose).unwrap();
        assert!(matches!(
            eigendecompose(&bad, DEFAULT_CLUSTER_TOL),
            Err(QjdError::NotHermitian { .. })
        ));
        assert!(eigendecompose(&obs(pauli_z()), -1.0).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let sz = eigendecompose(&obs(pauli_z()), DEFAULT_CLUSTER_TOL).unwrap();
        let same = sz.conjugate(&UnitaryMatrix::identity(2)).unwrap();
        assert_eq!(same.eigenvalues(), sz.eigenvalues());
        for (p, q) in same.projectors().iter().zip(sz.projectors()) {
            assert!(close(p, q, 1e-15));
        }

        let h = UnitaryMatrix::new(hadamard()).unwrap();
        let rotated = sz.conjugate(&h).unwrap();
        let sx = eigendecompose(&obs(pauli_x()), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rotated.eigenvalues(), sz.eigenvalues());
        for (p, q) in rotated.projectors().iter().zip(sx.projectors()) {
            assert!(close(p, q, 1e-14));
        }

        assert!(matches!(
            sz.conjugate(&UnitaryMatrix::identity(3)),
            Err(QjdError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn conjugated_random_observable_matches() {
        let a = random_hermitian(5, 17).unwrap();
        let u = haar_unitary(5, 18).unwrap();
        let sm = eigendecompose(&a, DEFAULT_CLUSTER_TOL).unwrap();
        let direct = eigendecompose(&a.conjugated(&u).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
        let moved = sm.conjugate(&u).unwrap();
        assert_eq!(direct.ranks(), moved.ranks());
        for (x, y) in direct.eigenvalues().iter().zip(moved.eigenvalues()) {
            assert!((x - y).abs() < 1e-8);
        }
        for (p, q) in direct.projectors().iter().zip(moved.projectors()) {
            assert!(close(p, q, 1e-6));
        }
    }

    #[test]
    fn json_layout() {
        let sm = eigendecompose(&obs(pauli_z()), DEFAULT_CLUSTER_TOL).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&crate::json::to_string(&sm).unwrap()).unwrap();
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 2);
        assert_eq!(v["projectors"][0]["dim"], 2);
        let back: SpectralMeasure = serde_json::from_value(v).unwrap();
        assert_eq!(back, sm);
    }
}
