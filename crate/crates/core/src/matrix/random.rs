//! Seeded sampling of test matrices.
//!
//! Every sampler is a pure function of `(dim, seed)`. The stream is fixed so
//! that other implementations can reproduce it bit for bit:
//!
//! * generator: ChaCha with 8 rounds, keyed by `seed_from_u64(seed)` (the
//!   key is expanded from the seed with PCG32, as `rand_core` documents),
//!   stream number 0 unless a retry bumps it;
//! * uniform: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`;
//! * complex Gaussian: Box-Muller on two consecutive uniforms `u1, u2`,
//!   `r = sqrt(-ln(1 - u1))`, entry `= r cos(2 pi u2) + i r sin(2 pi u2)`,
//!   so real and imaginary parts each have variance 1/2 and `E|z|^2 = 1`;
//! * matrices are filled row-major.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComplexMatrix, DensityState, HermitianObservable, UnitaryMatrix};
use crate::error::{QjdError, Result};

const MAX_DENSITY_ATTEMPTS: u32 = 8;
const MIN_DENSITY_TRACE: f64 = 1e-14;

/// Deterministic sample source.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-(1.0 - u1).ln()).sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * u2)
    }

    /// Real standard normal (variance 1), from the real part of a complex draw.
    pub fn real_gaussian(&mut self) -> f64 {
        self.complex_gaussian().re * std::f64::consts::SQRT_2
    }

    pub fn ginibre(&mut self, dim: usize) -> DMatrix<Complex64> {
        // from_fn is column-major; fill row-major explicitly.
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.complex_gaussian();
            }
        }
        m
    }
}

/// `dim x dim` matrix of i.i.d. standard complex Gaussians.
pub fn standard_complex_gaussian(dim: usize, seed: u64) -> ComplexMatrix {
    ComplexMatrix::wrap(Sampler::new(seed).ginibre(dim))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(QjdError::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `G + G^H` for a seeded Ginibre matrix `G`.
pub fn random_hermitian(dim: usize, seed: u64) -> Result<HermitianObservable> {
    check_dim(dim)?;
    let g = Sampler::new(seed).ginibre(dim);
    let h = &g + g.adjoint();
    HermitianObservable::new(
        ComplexMatrix::wrap(h),
        format!("hermitian(d={dim}, seed={seed})"),
    )
}

/// `G G^H / tr(G G^H)` for a seeded Ginibre matrix `G`.
///
/// A sample whose trace falls under `1e-14` is redrawn on the next ChaCha
/// stream, up to eight attempts in total.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityState> {
    check_dim(dim)?;
    for attempt in 0..MAX_DENSITY_ATTEMPTS {
        let g = Sampler::with_stream(seed, attempt as u64).ginibre(dim);
        let ggh = &g * g.adjoint();
        let tr = ggh.trace().re;
        if tr < MIN_DENSITY_TRACE {
            continue;
        }
        let rho = ComplexMatrix::wrap(ggh * Complex64::new(1.0 / tr, 0.0)).hermitian_part();
        return DensityState::new(rho);
    }
    Err(QjdError::DegenerateSample {
        attempts: MAX_DENSITY_ATTEMPTS,
    })
}

/// Haar-distributed unitary: `Q diag(r_ii / |r_ii|)` from the QR
/// factorization of a seeded Ginibre matrix.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    check_dim(dim)?;
    let g = Sampler::new(seed).ginibre(dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q.column_mut(j).scale_mut_complex(phase);
    }
    UnitaryMatrix::new(ComplexMatrix::wrap(q))
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, factor: Complex64);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, factor: Complex64) {
        for z in self.iter_mut() {
            *z *= factor;
        }
    }
}

/// Mixes a seed with a tag (SplitMix64 finalizer), for deriving independent
/// sub-seeds from one trial seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
