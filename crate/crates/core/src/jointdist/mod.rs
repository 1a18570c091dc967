//! Joint outcome distributions over the product of observable spectra.

mod constructions;
mod symmetrized;
pub mod transport;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QjdError, Result};
use crate::spectral::{SpectralMeasure, DEFAULT_CLUSTER_TOL};

pub use constructions::{
    born_distribution, margenau_hill_joint, sequential_joint, standard_commuting_joint,
};
pub use symmetrized::qjd_joint;
pub use transport::{wasserstein1, MAX_TRANSPORT_SUPPORT};

/// Negative weights above `-VIOLATION_TOL` and sums within `VIOLATION_TOL` of
/// one are treated as roundoff; anything beyond is reported as an error.
pub const VIOLATION_TOL: f64 = 1e-6;

/// Clamped mass above which a distribution is renormalized.
const RENORMALIZE_ABOVE: f64 = 1e-12;

/// Axis eigenvalues may differ by this much on grids considered identical.
pub const GRID_MATCH_TOL: f64 = 1e-8;

/// Numerical knobs for the joint constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QjdConfig {
    /// Relative commutator bound: `||[A, B]||_F <= commute_tol * max(1, ||A||_F ||B||_F)`.
    pub commute_tol: f64,
    /// Relative eigenvalue gap under which eigenvalues are merged.
    pub cluster_tol: f64,
    /// Weights in `[-clamp_tol, 0)` are set to zero.
    pub clamp_tol: f64,
    /// Largest tuple accepted by [`qjd_joint`]; the construction averages
    /// over all orderings, so cost grows as `n!`.
    pub max_observables: usize,
}

impl Default for QjdConfig {
    fn default() -> Self {
        Self {
            commute_tol: 1e-10,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            clamp_tol: 1e-10,
            max_observables: 8,
        }
    }
}

/// Product grid of observable spectra, enumerated lexicographically in the
/// index tuple (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeGrid {
    axes: Vec<Vec<f64>>,
    strides: Vec<usize>,
    len: usize,
}

impl OutcomeGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(QjdError::EmptyAxisSet);
        }
        if axes.iter().any(|a| a.is_empty()) {
            return Err(QjdError::InvalidArgument(
                "outcome axis with no eigenvalues".into(),
            ));
        }
        if axes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(QjdError::InvalidArgument(
                "non-finite eigenvalue on an axis".into(),
            ));
        }
        let mut strides = vec![1; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].len();
        }
        let len = strides[0] * axes[0].len();
        Ok(Self { axes, strides, len })
    }

    pub fn from_measures(measures: &[SpectralMeasure]) -> Result<Self> {
        Self::new(measures.iter().map(|m| m.eigenvalues().to_vec()).collect())
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn flat_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn index_tuple(&self, flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.axes)
            .map(|(s, a)| (flat / s) % a.len())
            .collect()
    }

    /// Eigenvalue coordinates of a grid point.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        self.index_tuple(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a[i])
            .collect()
    }

    /// Largest per-entry axis discrepancy, or `None` if shapes differ.
    pub fn axis_discrepancy(&self, other: &OutcomeGrid) -> Option<f64> {
        if self.axes.len() != other.axes.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.axes.iter().zip(&other.axes) {
            if a.len() != b.len() {
                return None;
            }
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        Some(worst)
    }
}

/// Whether weights are probabilities or a signed quasi-distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Probability,
    Quasi,
}

/// Weights over an [`OutcomeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    grid: OutcomeGrid,
    weights: Vec<f64>,
    kind: WeightKind,
}

impl JointDistribution {
    /// Validates raw weights and clamps roundoff negatives.
    ///
    /// Fails with [`QjdError::NonnegativityViolation`] on a probability weight
    /// below `-1e-6` and with [`QjdError::NormalizationViolation`] when the sum
    /// is off by more than `1e-6`. Probability weights in `[-clamp_tol, 0)`
    /// become zero; the vector is renormalized if that removed more than
    /// `1e-12` of mass.
    pub fn new(
        grid: OutcomeGrid,
        mut weights: Vec<f64>,
        kind: WeightKind,
        clamp_tol: f64,
    ) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(QjdError::InvalidArgument(format!(
                "{} weights for a grid of {} points",
                weights.len(),
                grid.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(QjdError::InvalidArgument("non-finite weight".into()));
        }
        if kind == WeightKind::Probability {
            if let Some((index, &weight)) = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w < -VIOLATION_TOL)
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                return Err(QjdError::NonnegativityViolation { index, weight });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > VIOLATION_TOL {
            return Err(QjdError::NormalizationViolation { sum });
        }
        if kind == WeightKind::Probability {
            let mut clamped = 0.0;
            for w in weights.iter_mut() {
                if *w < 0.0 && *w >= -clamp_tol {
                    clamped -= *w;
                    *w = 0.0;
                }
            }
            if clamped > RENORMALIZE_ABOVE {
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
            }
        }
        Ok(Self {
            grid,
            weights,
            kind,
        })
    }

    /// Wraps weights without any validation. Intended for diagnostics and
    /// negative controls; [`check_axioms`](Self::check_axioms) reports what
    /// is wrong with the result.
    pub fn from_weights_unchecked(grid: OutcomeGrid, weights: Vec<f64>, kind: WeightKind) -> Self {
        Self {
            grid,
            weights,
            kind,
        }
    }

    pub fn grid(&self) -> &OutcomeGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        self.grid.axes()
    }

    pub fn weight_at(&self, tuple: &[usize]) -> f64 {
        self.weights[self.grid.flat_index(tuple)]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max(|sum - 1|, -min weight)`, the latter only for probabilities.
    pub fn axiom_residual(&self) -> f64 {
        let norm = (self.sum() - 1.0).abs();
        match self.kind {
            WeightKind::Probability => norm.max(-self.min_weight()).max(0.0),
            WeightKind::Quasi => norm,
        }
    }

    /// Normalization within `tol`, and nonnegativity within `tol` for
    /// probability distributions.
    pub fn check_axioms(&self, tol: f64) -> Result<()> {
        let sum = self.sum();
        if sum.is_nan() || (sum - 1.0).abs() > tol {
            return Err(QjdError::NormalizationViolation { sum });
        }
        if self.kind == WeightKind::Probability {
            if let Some((index, &weight)) = self
                .weights
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                if weight < -tol {
                    return Err(QjdError::NonnegativityViolation { index, weight });
                }
            }
        }
        Ok(())
    }

    /// Sums out every axis not in `keep`. Axes are kept in ascending order.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDistribution> {
        if keep.is_empty() {
            return Err(QjdError::EmptyAxisSet);
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.grid.n_axes()) {
            return Err(QjdError::IndexOutOfRange {
                index: bad,
                len: self.grid.n_axes(),
            });
        }
        let grid = OutcomeGrid::new(keep.iter().map(|&k| self.grid.axes[k].clone()).collect())?;
        let mut weights = vec![0.0; grid.len()];
        for (flat, w) in self.weights.iter().enumerate() {
            let tuple = self.grid.index_tuple(flat);
            let kept: Vec<usize> = keep.iter().map(|&k| tuple[k]).collect();
            weights[grid.flat_index(&kept)] += w;
        }
        Ok(JointDistribution {
            grid,
            weights,
            kind: self.kind,
        })
    }

    /// Largest per-weight difference on identical grids.
    pub fn max_weight_difference(&self, other: &JointDistribution) -> Result<f64> {
        self.require_same_grid(other)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn require_same_grid(&self, other: &JointDistribution) -> Result<()> {
        match self.grid.axis_discrepancy(&other.grid) {
            None => Err(QjdError::GridMismatch(
                "axis counts or lengths differ".into(),
            )),
            Some(d) if d > GRID_MATCH_TOL => Err(QjdError::GridMismatch(format!(
                "axis eigenvalues differ by {d:e}"
            ))),
            Some(_) => Ok(()),
        }
    }
}

/// `1/2 sum |w1 - w2|` on identical grids.
pub fn total_variation(d1: &JointDistribution, d2: &JointDistribution) -> Result<f64> {
    d1.require_same_grid(d2)?;
    Ok(0.5
        * d1.weights
            .iter()
            .zip(&d2.weights)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

#[derive(Serialize, Deserialize)]
struct DistributionWire {
    axes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    kind: WeightKind,
}

impl Serialize for JointDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionWire {
            axes: self.grid.axes.clone(),
            weights: self.weights.clone(),
            kind: self.kind,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DistributionWire::deserialize(deserializer)?;
        let grid = OutcomeGrid::new(wire.axes).map_err(serde::de::Error::custom)?;
        JointDistribution::new(grid, wire.weights, wire.kind, 0.0).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(axes: &[&[f64]]) -> OutcomeGrid {
        OutcomeGrid::new(axes.iter().map(|a| a.to_vec()).collect()).unwrap()
    }

    fn delta(g: &OutcomeGrid, at: usize) -> JointDistribution {
        let mut w = vec![0.0; g.len()];
        w[at] = 1.0;
        JointDistribution::new(g.clone(), w, WeightKind::Probability, 1e-10).unwrap()
    }

    #[test]
    fn grid_enumeration_is_lexicographic() {
        let g = grid(&[&[1.0, 2.0], &[3.0, 4.0, 5.0]]);
        assert_eq!(g.len(), 6);
        assert_eq!(g.index_tuple(0), vec![0, 0]);
        assert_eq!(g.index_tuple(1), vec![0, 1]);
        assert_eq!(g.index_tuple(3), vec![1, 0]);
        assert_eq!(g.coordinates(5), vec![2.0, 5.0]);
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(&g.index_tuple(flat)), flat);
        }
    }

    #[test]
    fn clamps_roundoff_and_rejects_real_negatives() {
        let g = grid(&[&[0.0, 1.0]]);
        let d = JointDistribution::new(
            g.clone(),
            vec![1.0 + 5e-11, -5e-11],
            WeightKind::Probability,
            1e-10,
        )
        .unwrap();
        assert_eq!(d.weights()[1], 0.0);
        assert!(matches!(
            JointDistribution::new(g.clone(), vec![1.2, -0.2], WeightKind::Probability, 1e-10),
            Err(QjdError::NonnegativityViolation { index: 1, weight }) if weight == -0.2
        ));
        // quasi distributions keep their sign
        let q = JointDistribution::new(g, vec![1.2, -0.2], WeightKind::Quasi, 1e-10).unwrap();
        assert_eq!(q.weights()[1], -0.2);
    }

    #[test]
    fn clamped_mass_is_renormalized() {
        let g = grid(&[&[0.0, 1.0, 2.0]]);
        let d = JointDistribution::new(
            g,
            vec![0.5 + 5e-11, 0.5, -5e-11],
            WeightKind::Probability,
            1e-10,
        )
        .unwrap();
        assert!((d.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corrupted_weights_trip_normalization() {
        let g = grid(&[&[0.0, 1.0]]);
        let w = vec![0.3 * 1.1, 0.7 * 1.1];
        assert!(matches!(
            JointDistribution::new(g.clone(), w.clone(), WeightKind::Probability, 1e-10),
            Err(QjdError::NormalizationViolation { .. })
        ));
        let raw = JointDistribution::from_weights_unchecked(g, w, WeightKind::Probability);
        assert!(matches!(
            raw.check_axioms(1e-10),
            Err(QjdError::NormalizationViolation { .. })
        ));
    }

    #[test]
    fn marginal_examples() {
        let q = 0.3;
        let g = grid(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let d = JointDistribution::new(
            g,
            vec![q, 0.0, 0.0, 1.0 - q],
            WeightKind::Probability,
            1e-10,
        )
        .unwrap();
        let all = d.marginal(&[1, 0]).unwrap();
        assert_eq!(all, d);
        let first = d.marginal(&[0]).unwrap();
        assert_eq!(first.axes(), &[vec![1.0, 2.0]]);
        assert!((first.weights()[0] - q).abs() < 1e-15);
        assert!((first.weights()[1] - (1.0 - q)).abs() < 1e-15);
        assert_eq!(d.marginal(&[]).unwrap_err(), QjdError::EmptyAxisSet);
        assert_eq!(
            d.marginal(&[2]).unwrap_err(),
            QjdError::IndexOutOfRange { index: 2, len: 2 }
        );
    }

    #[test]
    fn total_variation_examples() {
        let g = grid(&[&[0.0, 1.0], &[0.0, 1.0]]);
        let d0 = delta(&g, 0);
        assert_eq!(total_variation(&d0, &d0).unwrap(), 0.0);
        assert_eq!(total_variation(&d0, &delta(&g, 1)).unwrap(), 1.0);
        let uniform =
            JointDistribution::new(g.clone(), vec![0.25; 4], WeightKind::Probability, 0.0).unwrap();
        assert!((total_variation(&uniform, &d0).unwrap() - 0.75).abs() < 1e-15);

        let other = grid(&[&[0.0, 1.5], &[0.0, 1.0]]);
        assert!(matches!(
            total_variation(&d0, &delta(&other, 0)),
            Err(QjdError::GridMismatch(_))
        ));
    }

    #[test]
    fn json_layout() {
        let g = grid(&[&[-1.0, 1.0]]);
        let d = delta(&g, 1);
        let text = crate::json::to_string(&d).unwrap();
        assert!(text.contains(r#""kind":"probability""#));
        let back: JointDistribution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"axes":[[0,1]],"weights":[0.6,0.6],"kind":"quasi"}"#;
        assert!(serde_json::from_str::<JointDistribution>(bad).is_err());
    }
}
