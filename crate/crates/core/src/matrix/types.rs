use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{QjdError, Result};

/// Validation tolerances for the operator types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative bound on `||A - A^H||_F / max(1, ||A||_F)`.
    pub hermitian: f64,
    /// Absolute bound on `|tr rho - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a state is `-psd`.
    pub psd: f64,
    /// Bound on `||U^H U - I||_F / d`.
    pub unitary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-10,
            unitary: 1e-8,
        }
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let residual = m.hermiticity_residual();
    let bound = tol * m.frobenius_norm().max(1.0);
    if residual > bound {
        return Err(QjdError::NotHermitian { residual, bound });
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues unsorted.
pub(crate) fn hermitian_eigen(
    m: &ComplexMatrix,
) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    let h = m.hermitian_part().into_dmatrix();
    SymmetricEigen::try_new(h, f64::EPSILON, 10_000).ok_or_else(|| {
        QjdError::DecompositionFailure("Hermitian eigensolver did not converge".into())
    })
}

/// A Hermitian matrix with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
    label: String,
}

impl HermitianObservable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Self::with_tolerances(matrix, label, &Tolerances::default())
    }

    pub fn with_tolerances(
        matrix: ComplexMatrix,
        label: impl Into<String>,
        tol: &Tolerances,
    ) -> Result<Self> {
        check_hermitian(&matrix, tol.hermitian)?;
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `U A U^H`, re-symmetrized against roundoff.
    pub fn conjugated(&self, u: &UnitaryMatrix) -> Result<Self> {
        self.matrix.check_same_dim(u.matrix())?;
        Ok(Self {
            matrix: self.matrix.conjugate_by(u.matrix()).hermitian_part(),
            label: self.label.clone(),
        })
    }

    /// `A + t H`.
    pub fn perturbed(&self, direction: &HermitianObservable, t: f64) -> Result<Self> {
        self.matrix.check_same_dim(direction.matrix())?;
        Ok(Self {
            matrix: &self.matrix + &direction.matrix.scale(Complex64::new(t, 0.0)),
            label: self.label.clone(),
        })
    }

    /// Rescales to unit Frobenius norm. Fails on the zero matrix.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.matrix.frobenius_norm();
        if n == 0.0 {
            return Err(QjdError::InvalidArgument(
                "cannot normalize the zero observable".into(),
            ));
        }
        Ok(Self {
            matrix: self.matrix.scale(Complex64::new(1.0 / n, 0.0)),
            label: self.label.clone(),
        })
    }
}

/// `||AB - BA||_F`.
pub fn commutator_norm(a: &HermitianObservable, b: &HermitianObservable) -> Result<f64> {
    a.matrix.check_same_dim(&b.matrix)?;
    let ab = &a.matrix * &b.matrix;
    let ba = &b.matrix * &a.matrix;
    Ok((&ab - &ba).frobenius_norm())
}

/// A positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_hermitian(&matrix, tol.hermitian).map_err(|e| QjdError::NotDensity(e.to_string()))?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QjdError::NotDensity(format!("trace is {tr}, not 1")));
        }
        let eig = hermitian_eigen(&matrix)?;
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -tol.psd {
            return Err(QjdError::NotDensity(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { matrix })
    }

    /// The pure state |v><v| for a nonzero vector, normalized.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v.is_empty() || norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(QjdError::NotDensity(
                "pure state needs a nonzero finite vector".into(),
            ));
        }
        let m = ComplexMatrix::outer(v).scale(Complex64::new(1.0 / norm_sqr, 0.0));
        Self::new(m)
    }

    /// |k><k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(QjdError::IndexOutOfRange { index: k, len: dim });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self::pure(&v)
    }

    /// I / d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(QjdError::MalformedMatrix(
                "dimension must be at least 1".into(),
            ));
        }
        Self::new(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `U rho U^H`, re-symmetrized against roundoff.
    pub fn conjugated(&self, u: &UnitaryMatrix) -> Result<Self> {
        self.matrix.check_same_dim(u.matrix())?;
        Ok(Self {
            matrix: self.matrix.conjugate_by(u.matrix()).hermitian_part(),
        })
    }

    /// The positive square root, with roundoff-negative eigenvalues set to zero.
    pub fn sqrt(&self) -> Result<ComplexMatrix> {
        let eig = hermitian_eigen(&self.matrix)?;
        let v = &eig.eigenvectors;
        let roots = eig
            .eigenvalues
            .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
        let scaled = v * nalgebra::DMatrix::from_diagonal(&roots);
        Ok(ComplexMatrix::wrap(&scaled * v.adjoint()).hermitian_part())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = hermitian_eigen(&self.matrix)?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }
}

/// A unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        let bound = tol.unitary * matrix.dim() as f64;
        if residual > bound {
            return Err(QjdError::NotUnitary { residual, bound });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `e^{i theta} I`.
    pub fn global_phase(dim: usize, theta: f64) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(Complex64::from_polar(1.0, theta)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.as_dmatrix().clone().determinant()
    }
}

fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    let gram = &m.adjoint() * m;
    (&gram - &ComplexMatrix::identity(m.dim())).frobenius_norm()
}
