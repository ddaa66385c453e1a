//! Degree distributions over discrete supports, their moments, and the
//! link-weighted aggregates that couple degree classes: theta (probability a
//! random link points at a strategy), the k^2-weighted Psi, and the second
//! moment V.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::SimplexState;
use crate::math;

const PROB_SUM_TOL: f64 = 1e-12;

/// Discrete degree distribution with cached moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    support: Vec<u32>,
    probs: Vec<f64>,
    k_max: u32,
    mean_k: f64,
    second_moment: f64,
}

impl DegreeDistribution {
    /// Wrap an already-normalized distribution. The support must be strictly
    /// ascending positive degrees and the probabilities must sum to one
    /// within 1e-12; use [`DegreeDistribution::from_weights`] to normalize
    /// raw weights explicitly.
    pub fn new(support: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if support.len() != probs.len() {
            return Err(Error::BadDistribution {
                what: "support and probs lengths differ",
            });
        }
        if support[0] == 0 {
            return Err(Error::BadDistribution {
                what: "degrees must be positive",
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadDistribution {
                what: "support must be strictly ascending",
            });
        }
        if !math::all_finite(&probs) || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::BadDistribution {
                what: "probabilities must be finite and non-negative",
            });
        }
        let sum: f64 = probs.iter().sum();
        if math::abs(sum - 1.0) > PROB_SUM_TOL {
            return Err(Error::BadDistribution {
                what: "probabilities must sum to one",
            });
        }
        let k_max = *support.last().unwrap();
        let mut mean_k = 0.0;
        let mut second_moment = 0.0;
        for (&k, &p) in support.iter().zip(&probs) {
            let kf = k as f64;
            mean_k += kf * p;
            second_moment += kf * kf * p;
        }
        if mean_k <= 0.0 {
            return Err(Error::BadDistribution {
                what: "mean degree must be positive",
            });
        }
        Ok(Self {
            support,
            probs,
            k_max,
            mean_k,
            second_moment,
        })
    }

    /// Normalize raw non-negative weights into a distribution.
    pub fn from_weights(support: Vec<u32>, weights: Vec<f64>) -> Result<Self> {
        if !math::all_finite(&weights) || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::BadDistribution {
                what: "weights must be finite and non-negative",
            });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::BadDistribution {
                what: "weights must have positive mass",
            });
        }
        let probs = weights.iter().map(|w| w / total).collect();
        Self::new(support, probs)
    }

    /// Distribution concentrated on a single degree.
    pub fn single(k: u32) -> Result<Self> {
        Self::new(alloc::vec![k], alloc::vec![1.0])
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn mean_k(&self) -> f64 {
        self.mean_k
    }

    /// Second moment of the degree, sum of k^2 P(k).
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    /// Normalized connectivity k / k_max of a class.
    pub fn psi(&self, k: u32) -> f64 {
        k as f64 / self.k_max as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn index_of(&self, k: u32) -> Option<usize> {
        self.support.binary_search(&k).ok()
    }
}

/// Raw power-law weights 2 m^2 / k^3 on the support ceil(m)..=k_max with
/// m = mean_k_target / 2. Exposed separately because the printed law is not
/// normalized over a finite discrete support.
pub fn power_law_weights(mean_k_target: f64, k_max: u32) -> Result<(Vec<u32>, Vec<f64>)> {
    if !mean_k_target.is_finite() {
        return Err(Error::NonFinite {
            what: "mean_k_target",
        });
    }
    let m = mean_k_target / 2.0;
    if m < 1.0 {
        return Err(Error::OutOfRange {
            what: "mean_k_target / 2",
            value: m,
        });
    }
    let k_min = libm::ceil(m) as u32;
    if k_min > k_max {
        return Err(Error::EmptySupport);
    }
    let support: Vec<u32> = (k_min..=k_max).collect();
    let weights = support
        .iter()
        .map(|&k| {
            let kf = k as f64;
            2.0 * m * m / (kf * kf * kf)
        })
        .collect();
    Ok((support, weights))
}

/// Discretized truncated power law with explicit normalization.
pub fn power_law(mean_k_target: f64, k_max: u32) -> Result<DegreeDistribution> {
    let (support, weights) = power_law_weights(mean_k_target, k_max)?;
    DegreeDistribution::from_weights(support, weights)
}

/// Per-degree-class simplex states over a distribution's support.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassState {
    dist: DegreeDistribution,
    states: Vec<SimplexState>,
}

impl ClassState {
    /// States are keyed positionally by the distribution support.
    pub fn new(dist: DegreeDistribution, states: Vec<SimplexState>) -> Result<Self> {
        if states.len() != dist.len() {
            return Err(Error::ClassMismatch {
                expected: dist.len(),
                got: states.len(),
            });
        }
        Ok(Self { dist, states })
    }

    /// Every class starts from the same state.
    pub fn uniform(dist: DegreeDistribution, state: SimplexState) -> Self {
        let states = alloc::vec![state; dist.len()];
        Self { dist, states }
    }

    pub fn dist(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn states(&self) -> &[SimplexState] {
        &self.states
    }

    pub fn state_of(&self, k: u32) -> Option<&SimplexState> {
        self.dist.index_of(k).map(|i| &self.states[i])
    }
}

/// Link-weighted average of per-class scalars: (1/<k>) sum_k k P(k) v_k.
pub fn link_weighted_mean(dist: &DegreeDistribution, values: &[f64]) -> Result<f64> {
    if values.len() != dist.len() {
        return Err(Error::ClassMismatch {
            expected: dist.len(),
            got: values.len(),
        });
    }
    let mut acc = 0.0;
    for ((k, p), &v) in dist.iter().zip(values) {
        acc += k as f64 * p * v;
    }
    Ok(acc / dist.mean_k())
}

/// k^2-weighted average of per-class scalars: (1/<k>) sum_k k^2 P(k) v_k.
pub fn sq_weighted_mean(dist: &DegreeDistribution, values: &[f64]) -> Result<f64> {
    if values.len() != dist.len() {
        return Err(Error::ClassMismatch {
            expected: dist.len(),
            got: values.len(),
        });
    }
    let mut acc = 0.0;
    for ((k, p), &v) in dist.iter().zip(values) {
        let kf = k as f64;
        acc += kf * kf * p * v;
    }
    Ok(acc / dist.mean_k())
}

/// Probability that a randomly chosen link points at a player using
/// `strategy`. The three values sum to one.
pub fn theta(cs: &ClassState, strategy: usize) -> Result<f64> {
    let values: Vec<f64> = cs
        .states
        .iter()
        .map(|s| s.get(strategy))
        .collect::<Result<_>>()?;
    link_weighted_mean(&cs.dist, &values)
}

/// k^2-weighted strategy aggregate Psi_i; the three values sum to <k^2>/<k>.
pub fn psi_weighted(cs: &ClassState, strategy: usize) -> Result<f64> {
    let values: Vec<f64> = cs
        .states
        .iter()
        .map(|s| s.get(strategy))
        .collect::<Result<_>>()?;
    sq_weighted_mean(&cs.dist, &values)
}

/// The second moment V = sum_k k^2 P(k), the state-free uncommitted-mass
/// weight of the macroscopic dynamics.
pub fn v_moment(dist: &DegreeDistribution) -> f64 {
    dist.second_moment()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_class() -> DegreeDistribution {
        DegreeDistribution::new(alloc::vec![2, 8], alloc::vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn moments_of_two_class_distribution() {
        let d = two_class();
        assert_eq!(d.mean_k(), 5.0);
        assert_eq!(d.second_moment(), 34.0);
        assert_eq!(d.k_max(), 8);
        assert_eq!(v_moment(&d), 34.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            DegreeDistribution::new(alloc::vec![], alloc::vec![]),
            Err(Error::EmptySupport)
        ));
        assert!(DegreeDistribution::new(alloc::vec![2, 2], alloc::vec![0.5, 0.5]).is_err());
        assert!(DegreeDistribution::new(alloc::vec![2, 8], alloc::vec![0.6, 0.5]).is_err());
        assert!(DegreeDistribution::new(alloc::vec![0], alloc::vec![1.0]).is_err());
    }

    #[test]
    fn power_law_weight_ratio_is_exact() {
        // weights 8/k^3 over 2..=8; the normalization cancels in ratios
        let d = power_law(4.0, 8).unwrap();
        assert_eq!(d.support(), &[2, 3, 4, 5, 6, 7, 8]);
        let p2 = d.probs()[0];
        let p4 = d.probs()[2];
        assert_eq!(p2 / p4, 8.0);
        let sum: f64 = d.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_law_single_point_support() {
        let d = power_law(4.0, 2).unwrap();
        assert_eq!(d.support(), &[2]);
        assert_eq!(d.probs(), &[1.0]);
        assert_eq!(d.mean_k(), 2.0);
    }

    #[test]
    fn power_law_rejects_empty_support() {
        assert!(matches!(power_law(10.0, 3), Err(Error::EmptySupport)));
        assert!(power_law(1.0, 8).is_err());
    }

    #[test]
    fn power_law_probs_strictly_decreasing() {
        let d = power_law(4.0, 50).unwrap();
        assert!(d.probs().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn power_law_discrete_mean_vs_continuum() {
        // The continuum law ~2m^2/k^3 has mean 2m = 4; the discrete sum over
        // 2..=200 sits well below it because the low-degree classes dominate.
        // Frozen from the direct-summation oracle; the discrepancy against
        // the continuum value is what the discretization costs.
        let d = power_law(4.0, 200).unwrap();
        let (support, weights) = power_law_weights(4.0, 200).unwrap();
        let wsum: f64 = weights.iter().sum();
        let mean_oracle: f64 = support
            .iter()
            .zip(&weights)
            .map(|(&k, &w)| k as f64 * w / wsum)
            .sum();
        assert!((d.mean_k() - mean_oracle).abs() < 1e-12);
        assert!((d.mean_k() - 3.1675).abs() < 1e-3, "mean {}", d.mean_k());
        let continuum_gap = (d.mean_k() - 4.0).abs() / 4.0;
        assert!(
            continuum_gap > 0.15 && continuum_gap < 0.25,
            "discretization gap {continuum_gap}"
        );
    }

    #[test]
    fn theta_factors_out_identical_classes() {
        let s = SimplexState::new(0.3, 0.5, 0.2).unwrap();
        let cs = ClassState::uniform(two_class(), s);
        for (i, want) in [0.3, 0.5, 0.2].iter().enumerate() {
            assert!((theta(&cs, i).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_two_class_hand_sum() {
        let cs = ClassState::new(
            two_class(),
            alloc::vec![
                SimplexState::new(1.0, 0.0, 0.0).unwrap(),
                SimplexState::new(0.0, 1.0, 0.0).unwrap(),
            ],
        )
        .unwrap();
        assert!((theta(&cs, 0).unwrap() - 0.2).abs() < 1e-15);
        assert!((theta(&cs, 1).unwrap() - 0.8).abs() < 1e-15);
        let total: f64 = (0..3).map(|i| theta(&cs, i).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_single_class_is_identity() {
        let d = DegreeDistribution::single(7).unwrap();
        let s = SimplexState::new(0.6, 0.1, 0.3).unwrap();
        let cs = ClassState::uniform(d, s);
        assert_eq!(theta(&cs, 0).unwrap(), 0.6);
        assert_eq!(theta(&cs, 1).unwrap(), 0.1);
    }

    #[test]
    fn psi_uniform_classes_scale_by_moment_ratio() {
        let d = two_class();
        let ratio = d.second_moment() / d.mean_k();
        let s = SimplexState::new(0.3, 0.5, 0.2).unwrap();
        let cs = ClassState::uniform(d, s);
        for (i, c) in [0.3, 0.5, 0.2].iter().enumerate() {
            assert!((psi_weighted(&cs, i).unwrap() - c * ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_two_class_hand_sum() {
        let cs = ClassState::new(
            two_class(),
            alloc::vec![
                SimplexState::new(1.0, 0.0, 0.0).unwrap(),
                SimplexState::new(0.0, 0.0, 1.0).unwrap(),
            ],
        )
        .unwrap();
        assert!((psi_weighted(&cs, 0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn psi_single_class_scales_by_degree() {
        let d = DegreeDistribution::single(5).unwrap();
        let s = SimplexState::new(0.6, 0.1, 0.3).unwrap();
        let cs = ClassState::uniform(d, s);
        assert!((psi_weighted(&cs, 0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn aggregates_linear_in_raw_values() {
        let d = two_class();
        let vals = [0.7, 0.3];
        let scaled: Vec<f64> = vals.iter().map(|v| 2.5 * v).collect();
        assert!(
            (link_weighted_mean(&d, &scaled).unwrap()
                - 2.5 * link_weighted_mean(&d, &vals).unwrap())
            .abs()
                < 1e-15
        );
        assert!(
            (sq_weighted_mean(&d, &scaled).unwrap() - 2.5 * sq_weighted_mean(&d, &vals).unwrap())
                .abs()
                < 1e-14
        );
    }

    #[test]
    fn degenerate_distribution_identities() {
        // concentrated at k_max: theta = x, Psi = k_max x, V = k_max^2
        let d = DegreeDistribution::single(8).unwrap();
        let s = SimplexState::new(0.25, 0.35, 0.4).unwrap();
        let cs = ClassState::uniform(d.clone(), s);
        assert_eq!(theta(&cs, 0).unwrap(), 0.25);
        assert!((psi_weighted(&cs, 0).unwrap() - 8.0 * 0.25).abs() < 1e-15);
        assert_eq!(v_moment(&d), 64.0);
    }

    #[test]
    fn class_state_mismatch_rejected() {
        let d = two_class();
        let s = SimplexState::new(0.3, 0.5, 0.2).unwrap();
        assert!(matches!(
            ClassState::new(d, alloc::vec![s]),
            Err(Error::ClassMismatch {
                expected: 2,
                got: 1
            })
        ));
    }
}
