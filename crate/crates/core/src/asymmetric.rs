//! One-directional cross-inhibition: committed-1 players push committed-2
//! players back to the uncommitted state, never the reverse. The flow
//! structure matches a susceptible/infected/recovered compartment model,
//! with x1 absorbing. Includes the degree-class variant, the second-order
//! mass-spring-damper form of the class dynamics, and equilibrium
//! classification of the planar reduction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::SimplexState;
use crate::linalg::Mat2;
use crate::math;
use crate::network::{theta, ClassState};
use crate::unstructured::{classify_planar, Classification};

/// Rates of the asymmetric model: spontaneous commitment gamma1/gamma2 and
/// the one-directional cross-inhibition strength sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma: f64,
}

impl AsymParams {
    pub fn new(gamma1: f64, gamma2: f64, sigma: f64) -> Result<Self> {
        let p = Self {
            gamma1,
            gamma2,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("sigma", self.sigma),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
            if v < 0.0 {
                return Err(Error::NegativeParam { what, value: v });
            }
        }
        Ok(())
    }
}

/// Unchecked variant of [`rhs_asym`] for integrator inner loops.
#[inline]
pub fn rhs_asym_unchecked(p: &AsymParams, x1: f64, x2: f64, x3: f64) -> [f64; 3] {
    rhs_asym_raw(p, x1, x2, x3)
}

/// Unchecked variant of [`rhs_asym_class`] for integrator inner loops.
#[inline]
pub fn rhs_asym_class_unchecked(p: &AsymParams, psi: f64, theta1: f64, x2: f64, x3: f64) -> [f64; 3] {
    rhs_asym_class_raw(p, psi, theta1, x2, x3)
}

#[inline]
pub(crate) fn rhs_asym_raw(p: &AsymParams, x1: f64, x2: f64, x3: f64) -> [f64; 3] {
    let d1 = p.gamma1 * x3;
    let d2 = -p.sigma * x2 * x1 + p.gamma2 * x3;
    // mass conservation holds exactly by construction
    [d1, d2, -(d1 + d2)]
}

/// Unstructured asymmetric dynamics. Components sum to zero exactly.
pub fn rhs_asym(p: &AsymParams, x: &SimplexState) -> Result<[f64; 3]> {
    p.validate()?;
    Ok(rhs_asym_raw(p, x.x1(), x.x2(), x.x3()))
}

/// Per-class kernel of the degree-structured variant: the inhibition term
/// is scaled by the class connectivity and driven by the link probability
/// of strategy 1.
#[inline]
pub(crate) fn rhs_asym_class_raw(
    p: &AsymParams,
    psi: f64,
    theta1: f64,
    x2: f64,
    x3: f64,
) -> [f64; 3] {
    let d1 = p.gamma1 * x3;
    let d2 = -p.sigma * psi * x2 * theta1 + p.gamma2 * x3;
    [d1, d2, -(d1 + d2)]
}

/// A single degree class driven by an externally supplied link probability.
pub fn rhs_asym_class(
    p: &AsymParams,
    psi: f64,
    theta1: f64,
    x: &SimplexState,
) -> Result<[f64; 3]> {
    p.validate()?;
    if !(0.0..=1.0).contains(&psi) {
        return Err(Error::OutOfRange {
            what: "psi",
            value: psi,
        });
    }
    if !theta1.is_finite() {
        return Err(Error::NonFinite { what: "theta1" });
    }
    Ok(rhs_asym_class_raw(p, psi, theta1, x.x2(), x.x3()))
}

/// Degree-structured asymmetric dynamics: every class keeps its own
/// uncommitted share, the infection pressure aggregates over the network.
pub fn rhs_asym_structured(p: &AsymParams, cs: &ClassState) -> Result<Vec<[f64; 3]>> {
    p.validate()?;
    let th1 = theta(cs, 0)?;
    let dist = cs.dist();
    Ok(cs
        .states()
        .iter()
        .zip(dist.support())
        .map(|(s, &k)| rhs_asym_class_raw(p, dist.psi(k), th1, s.x2(), s.x3()))
        .collect())
}

/// Second-order form of a class's committed-2 share: state (x2, dx2) with
/// the network-scaled stiffness sigma Psi psi_k and damping sigma Theta1
/// psi_k, forced by the uncommitted inflow. `psi_dot` is the time derivative
/// of the link probability Theta1.
pub fn second_order_form(
    p: &AsymParams,
    psi_k: f64,
    theta1: f64,
    psi_dot: f64,
    x3: f64,
    x3_dot: f64,
) -> Result<(Mat2, [f64; 2])> {
    p.validate()?;
    if !(0.0..=1.0).contains(&psi_k) {
        return Err(Error::OutOfRange {
            what: "psi_k",
            value: psi_k,
        });
    }
    if !math::all_finite(&[theta1, psi_dot, x3, x3_dot]) {
        return Err(Error::NonFinite {
            what: "second-order input",
        });
    }
    let state = [
        [0.0, 1.0],
        [-p.sigma * psi_dot * psi_k, -p.sigma * theta1 * psi_k],
    ];
    let forcing = [p.gamma2 * x3, p.gamma2 * x3_dot];
    Ok((state, forcing))
}

/// An equilibrium of the planar reduction with its Jacobian data.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymEquilibrium {
    pub point: [f64; 3],
    pub jacobian: Mat2,
    pub trace: f64,
    pub determinant: f64,
    pub classification: Classification,
}

/// The two absorbing-corner equilibria of the asymmetric model: consensus
/// on option 1 is stable, consensus on option 2 is a saddle. Both
/// classifications degenerate when gamma1 or sigma vanishes.
pub fn asym_equilibria(p: &AsymParams) -> Result<Vec<AsymEquilibrium>> {
    p.validate()?;
    let g1 = p.gamma1;
    let g2 = p.gamma2;
    let s = p.sigma;
    let j_consensus1 = [[-g1, -g1], [-g2, -g2 - s]];
    let j_consensus2 = [[-g1, -g1], [-g2 - s, -g2]];
    let mut out = Vec::with_capacity(2);
    for (point, j) in [
        ([1.0, 0.0, 0.0], j_consensus1),
        ([0.0, 1.0, 0.0], j_consensus2),
    ] {
        let trace = j[0][0] + j[1][1];
        let determinant = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        out.push(AsymEquilibrium {
            point,
            jacobian: j,
            trace,
            determinant,
            classification: classify_planar(trace, determinant),
        });
    }
    Ok(out)
}
