use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QjdError, Result};
use crate::matrix::{
    derive_seed, haar_unitary, random_density, random_hermitian, ComplexMatrix, DensityState,
    HermitianObservable, Sampler, UnitaryMatrix,
};

const TAG_DIM: u64 = 0xD1;
const TAG_NOBS: u64 = 0xD2;
const TAG_OBS: u64 = 0x100;
const TAG_STATE: u64 = 0x200;
const TAG_UNITARY: u64 = 0x300;
const TAG_BASIS: u64 = 0x400;
const TAG_DIAG: u64 = 0x500;
const TAG_NOISE: u64 = 0x600;

/// Inclusive integer range, written `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
}

impl IntRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(QjdError::InvalidArgument(format!("empty range {lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(v: usize) -> Self {
        Self { lo: v, hi: v }
    }

    fn pick(&self, seed: u64, tag: u64) -> usize {
        let span = (self.hi - self.lo + 1) as u64;
        self.lo + (derive_seed(seed, tag) % span) as usize
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for IntRange {
    type Err = QjdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            QjdError::InvalidArgument(format!("expected `lo..hi` or a single integer, got `{s}`"))
        };
        match s.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                IntRange::new(
                    lo.trim().parse().map_err(|_| bad())?,
                    hi.trim().parse().map_err(|_| bad())?,
                )
            }
            None => Ok(IntRange::single(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// How a trial's observables are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Independent random Hermitian matrices.
    Generic,
    /// Random real diagonals conjugated by one shared Haar unitary. About
    /// half of the diagonals are drawn from {-2, ..., 2}, which exercises
    /// degenerate eigenspaces.
    Commuting,
    /// A commuting family plus `epsilon` times a unit-norm random Hermitian
    /// matrix per observable.
    NearCommuting { epsilon: f64 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Generic => write!(f, "generic"),
            Family::Commuting => write!(f, "commuting"),
            Family::NearCommuting { epsilon } => write!(f, "near({epsilon:e})"),
        }
    }
}

/// Shape and seed of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub dim: usize,
    pub n_obs: usize,
    pub seed: u64,
    pub family: Family,
}

impl TrialSpec {
    pub fn new(dim: usize, n_obs: usize, seed: u64, family: Family) -> Result<Self> {
        if dim < 2 {
            return Err(QjdError::InvalidArgument(format!(
                "trial dimension must be at least 2, got {dim}"
            )));
        }
        if n_obs < 1 {
            return Err(QjdError::InvalidArgument(
                "a trial needs at least one observable".into(),
            ));
        }
        if let Family::NearCommuting { epsilon } = family {
            if epsilon.is_nan() || epsilon <= 0.0 {
                return Err(QjdError::InvalidArgument(format!(
                    "epsilon must be positive, got {epsilon}"
                )));
            }
        }
        Ok(Self {
            dim,
            n_obs,
            seed,
            family,
        })
    }

    /// Trial `index` of a suite: seed `base_seed + index`, dimension and
    /// tuple size drawn from the ranges by that seed.
    pub fn for_trial(
        base_seed: u64,
        index: usize,
        dims: IntRange,
        n_obs: IntRange,
        family: Family,
    ) -> Result<Self> {
        let seed = base_seed.wrapping_add(index as u64);
        Self::new(
            dims.pick(seed, TAG_DIM),
            n_obs.pick(seed, TAG_NOBS),
            seed,
            family,
        )
    }
}

/// Everything a trial needs, regenerated from its [`TrialSpec`].
#[derive(Debug, Clone)]
pub struct TrialInputs {
    pub observables: Vec<HermitianObservable>,
    pub state: DensityState,
    /// An independent Haar unitary for covariance checks.
    pub unitary: UnitaryMatrix,
    /// For (near-)commuting families: the shared eigenbasis and the
    /// diagonal of each observable in it.
    pub common_basis: Option<(UnitaryMatrix, Vec<Vec<f64>>)>,
}

fn random_diagonal(dim: usize, seed: u64) -> Vec<f64> {
    let mut s = Sampler::new(seed);
    if s.uniform() < 0.5 {
        (0..dim)
            .map(|_| (s.uniform() * 5.0).floor() - 2.0)
            .collect()
    } else {
        (0..dim).map(|_| s.real_gaussian()).collect()
    }
}

/// Builds the observables, state and unitary of a trial.
pub fn generate_trial(spec: &TrialSpec) -> Result<TrialInputs> {
    let seed = spec.seed;
    let state = random_density(spec.dim, derive_seed(seed, TAG_STATE))?;
    let unitary = haar_unitary(spec.dim, derive_seed(seed, TAG_UNITARY))?;
    let (observables, common_basis) = match spec.family {
        Family::Generic => {
            let obs = (0..spec.n_obs)
                .map(|i| random_hermitian(spec.dim, derive_seed(seed, TAG_OBS + i as u64)))
                .collect::<Result<Vec<_>>>()?;
            (obs, None)
        }
        Family::Commuting | Family::NearCommuting { .. } => {
            let basis = haar_unitary(spec.dim, derive_seed(seed, TAG_BASIS))?;
            let diagonals: Vec<Vec<f64>> = (0..spec.n_obs)
                .map(|i| random_diagonal(spec.dim, derive_seed(seed, TAG_DIAG + i as u64)))
                .collect();
            let mut obs = Vec::with_capacity(spec.n_obs);
            for (i, diag) in diagonals.iter().enumerate() {
                let d = HermitianObservable::new(
                    ComplexMatrix::from_real_diagonal(diag),
                    format!("A{i}"),
                )?;
                let mut a = d.conjugated(&basis)?;
                if let Family::NearCommuting { epsilon } = spec.family {
                    let noise =
                        random_hermitian(spec.dim, derive_seed(seed, TAG_NOISE + i as u64))?
                            .normalized()?;
                    a = a.perturbed(&noise, epsilon)?;
                }
                obs.push(a);
            }
            (obs, Some((basis, diagonals)))
        }
    };
    Ok(TrialInputs {
        observables,
        state,
        unitary,
        common_basis,
    })
}
