//! Dense complex matrices and the validated operator types built on them.

mod random;
mod types;

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QjdError, Result};

pub use random::{
    derive_seed, haar_unitary, random_density, random_hermitian, standard_complex_gaussian, Sampler,
};
pub(crate) use types::hermitian_eigen;
pub use types::{commutator_norm, DensityState, HermitianObservable, Tolerances, UnitaryMatrix};

/// A square, finite, double-precision complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps a backend matrix, checking squareness and finiteness.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(QjdError::MalformedMatrix(format!(
                "not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(QjdError::MalformedMatrix(
                "dimension must be at least 1".into(),
            ));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QjdError::MalformedMatrix("non-finite entry".into()));
        }
        Ok(Self(m))
    }

    /// Internal constructor for results of arithmetic on valid matrices.
    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// Builds a matrix from row-major real and (optional) imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let dim = re.len();
        if dim == 0 {
            return Err(QjdError::MalformedMatrix(
                "dimension must be at least 1".into(),
            ));
        }
        if re.iter().any(|row| row.len() != dim) {
            return Err(QjdError::MalformedMatrix(
                "ragged or non-square `re`".into(),
            ));
        }
        if let Some(im) = im {
            if im.len() != dim || im.iter().any(|row| row.len() != dim) {
                return Err(QjdError::MalformedMatrix(
                    "`im` shape differs from `re`".into(),
                ));
            }
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(re[i][j], im.map_or(0.0, |im| im[i][j]))
        });
        Self::from_dmatrix(m)
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Rank-one projector |v><v| for a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self(DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    /// `self * other * self^H`.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Self {
        Self(&unitary.0 * &self.0 * unitary.0.adjoint())
    }

    /// `(self + self^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `||self - self^H||_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.0[(i, j)] - self.0[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `Re tr(self * other)` without forming the product.
    pub fn re_trace_product(&self, other: &ComplexMatrix) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                acc += (self.0[(i, k)] * other.0[(k, i)]).re;
            }
        }
        acc
    }

    pub(crate) fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(QjdError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Row-major real parts.
    pub fn re_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.0[(i, j)].re).collect())
            .collect()
    }

    /// Row-major imaginary parts.
    pub fn im_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.0[(i, j)].im).collect())
            .collect()
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// On-disk layout: `{"dim": d, "re": [[..]], "im": [[..]]}`, `im` optional.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            dim: self.dim(),
            re: self.re_rows(),
            im: Some(self.im_rows()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.re.len() != wire.dim {
            return Err(serde::de::Error::custom(format!(
                "`dim` is {} but `re` has {} rows",
                wire.dim,
                wire.re.len()
            )));
        }
        ComplexMatrix::from_parts(&wire.re, wire.im.as_deref()).map_err(serde::de::Error::custom)
    }
}

/// Pauli matrices and a few other fixtures used across tests and examples.
pub mod fixtures {
    use super::*;

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_parts(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap()
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_parts(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            Some(&[vec![0.0, -1.0], vec![1.0, 0.0]]),
        )
        .unwrap()
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_parts(&[vec![s, s], vec![s, -s]], None).unwrap()
    }

    /// |k><k| in dimension `dim`.
    pub fn basis_projector(dim: usize, k: usize) -> ComplexMatrix {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        ComplexMatrix::from_real_diagonal(&diag)
    }
}
