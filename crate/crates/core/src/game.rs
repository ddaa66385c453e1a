//! The three-strategy coordination game: payoff matrix, the expected-gain
//! revision protocol, the induced transition rates, and the full mean
//! dynamics from which the reduced planar systems are derived.
//!
//! Strategies are indexed 0, 1, 2: committed to option 1, committed to
//! option 2, and uncommitted. All traffic between the two committed states
//! passes through the uncommitted state; direct 0 <-> 1 transitions are
//! structurally zero.

use crate::error::{Error, Result};
use crate::math;

/// Slack allowed below zero on individual simplex coordinates.
pub const SIMPLEX_COORD_SLACK: f64 = 1e-12;
/// Tolerance on the sum-to-one constraint.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// All rate constants of the game.
///
/// `r*` reward matching an option, `sigma*` are the cross-inhibitory
/// strengths, `alpha*` the spontaneous abandonment rates and `gamma*` the
/// spontaneous commitment rates. Everything is a per-unit-time rate and must
/// be finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r1: f64,
    pub r2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r1: f64,
        r2: f64,
        sigma1: f64,
        sigma2: f64,
        alpha1: f64,
        alpha2: f64,
        gamma1: f64,
        gamma2: f64,
    ) -> Result<Self> {
        let p = Self {
            r1,
            r2,
            sigma1,
            sigma2,
            alpha1,
            alpha2,
            gamma1,
            gamma2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Construct the symmetric game: both options share r, sigma, alpha, gamma.
    pub fn symmetric(r: f64, sigma: f64, alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(r, r, sigma, sigma, alpha, alpha, gamma, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r1", self.r1),
            ("r2", self.r2),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (what, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
            if v < 0.0 {
                return Err(Error::NegativeParam { what, value: v });
            }
        }
        Ok(())
    }

    /// True when both options carry identical rates.
    pub fn is_symmetric(&self) -> bool {
        self.r1 == self.r2
            && self.sigma1 == self.sigma2
            && self.alpha1 == self.alpha2
            && self.gamma1 == self.gamma2
    }

    /// The common rates (r, sigma, alpha, gamma) of a symmetric game.
    pub fn symmetric_rates(&self) -> Result<(f64, f64, f64, f64)> {
        if !self.is_symmetric() {
            return Err(Error::AsymmetricParams);
        }
        Ok((self.r1, self.sigma1, self.alpha1, self.gamma1))
    }
}

/// 3x3 payoff matrix of the coordination game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffMatrix {
    entries: [[f64; 3]; 3],
}

impl PayoffMatrix {
    /// Wrap an arbitrary (finite) 3x3 payoff matrix.
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        for row in &entries {
            if !math::all_finite(row) {
                return Err(Error::NonFinite {
                    what: "payoff entry",
                });
            }
        }
        Ok(Self { entries })
    }

    /// The game's payoff matrix: matching option 1 or 2 pays r1 / r2,
    /// being cross-inhibited costs sigma, the uncommitted row and column
    /// are zero.
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        Self::new([
            [p.r1, -p.sigma2, 0.0],
            [-p.sigma1, p.r2, 0.0],
            [0.0, 0.0, 0.0],
        ])
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }
}

/// A point on the 2-simplex: population shares of the three strategies.
///
/// Coordinates may dip to -1e-12 (numerical slack) and the sum must be one
/// within 1e-9. Construction validates; drift beyond tolerance must be fixed
/// explicitly through [`project_to_simplex`], never silently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexState {
    x1: f64,
    x2: f64,
    x3: f64,
}

impl SimplexState {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        if !math::all_finite(&[x1, x2, x3]) {
            return Err(Error::NonFinite {
                what: "simplex coordinate",
            });
        }
        let sum = x1 + x2 + x3;
        let min_coord = math::fmin(x1, math::fmin(x2, x3));
        if min_coord < -SIMPLEX_COORD_SLACK || math::abs(sum - 1.0) > SIMPLEX_SUM_TOL {
            return Err(Error::OffSimplex { sum, min_coord });
        }
        Ok(Self { x1, x2, x3 })
    }

    /// Build from the two committed shares, with x3 = 1 - x1 - x2.
    pub fn from_committed(x1: f64, x2: f64) -> Result<Self> {
        Self::new(x1, x2, 1.0 - x1 - x2)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn x3(&self) -> f64 {
        self.x3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn get(&self, strategy: usize) -> Result<f64> {
        match strategy {
            0 => Ok(self.x1),
            1 => Ok(self.x2),
            2 => Ok(self.x3),
            _ => Err(Error::StrategyOutOfRange { index: strategy }),
        }
    }
}

/// Explicit repair of simplex drift: clamp negative coordinates to zero,
/// then rescale to unit mass.
pub fn project_to_simplex(raw: [f64; 3]) -> Result<SimplexState> {
    if !math::all_finite(&raw) {
        return Err(Error::NonFinite {
            what: "simplex coordinate",
        });
    }
    let clamped = [
        math::fmax(raw[0], 0.0),
        math::fmax(raw[1], 0.0),
        math::fmax(raw[2], 0.0),
    ];
    let sum = clamped[0] + clamped[1] + clamped[2];
    if sum <= 0.0 {
        return Err(Error::ZeroMass);
    }
    SimplexState::new(clamped[0] / sum, clamped[1] / sum, clamped[2] / sum)
}

/// Non-negative transition rates of the induced Markov chain.
///
/// Only four entries can be non-zero: 2->0, 0->2, 2->1, 1->2. The committed
/// states never exchange mass directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMatrix {
    rho: [[f64; 3]; 3],
}

impl RateMatrix {
    pub fn new(rho: [[f64; 3]; 3]) -> Result<Self> {
        for (i, row) in rho.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        what: "transition rate",
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeParam {
                        what: "transition rate",
                        value: v,
                    });
                }
                let structural_zero = i == j || (i == 0 && j == 1) || (i == 1 && j == 0);
                if structural_zero && v != 0.0 {
                    return Err(Error::OutOfRange {
                        what: "structurally zero transition rate",
                        value: v,
                    });
                }
            }
        }
        Ok(Self { rho })
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.rho
    }

    /// Rate from strategy `from` to strategy `to`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rho[from][to]
    }
}

/// Expected gain of switching from strategy `from` to strategy `to`:
/// the state-weighted sum of positive payoff differences plus an offset.
///
/// Always at least `offset`.
pub fn expected_gain(
    a: &PayoffMatrix,
    from: usize,
    to: usize,
    x: &SimplexState,
    offset: f64,
) -> Result<f64> {
    if from > 2 {
        return Err(Error::StrategyOutOfRange { index: from });
    }
    if to > 2 {
        return Err(Error::StrategyOutOfRange { index: to });
    }
    if from == to {
        return Err(Error::SameStrategy { index: from });
    }
    if !offset.is_finite() {
        return Err(Error::NonFinite { what: "offset" });
    }
    if offset < 0.0 {
        return Err(Error::NegativeParam {
            what: "offset",
            value: offset,
        });
    }
    let xs = x.as_array();
    let mut acc = 0.0;
    for (k, &share) in xs.iter().enumerate() {
        let diff = a.entry(to, k) - a.entry(from, k);
        if diff > 0.0 {
            acc += diff * share;
        }
    }
    Ok(acc + offset)
}

/// Transition rates induced by the expected-gain protocol on the game's
/// payoff matrix: recruitment 2->i at rate r_i x_i + gamma_i, abandonment
/// i->2 at rate sigma_j x_j + alpha_i driven by the opposing option j.
pub fn transition_rates(p: &ModelParams, x: &SimplexState) -> Result<RateMatrix> {
    p.validate()?;
    let mut rho = [[0.0; 3]; 3];
    rho[2][0] = p.r1 * x.x1() + p.gamma1;
    rho[0][2] = p.sigma2 * x.x2() + p.alpha1;
    rho[2][1] = p.r2 * x.x2() + p.gamma2;
    rho[1][2] = p.sigma1 * x.x1() + p.alpha2;
    RateMatrix::new(rho)
}

/// Mean dynamics over the full simplex: inflow minus outflow for every
/// strategy. Components sum to zero (mass conservation).
pub fn mean_dynamics_rhs(p: &ModelParams, x: &SimplexState) -> Result<[f64; 3]> {
    let rho = transition_rates(p, x)?;
    let xs = x.as_array();
    let mut dx = [0.0; 3];
    for i in 0..3 {
        let mut inflow = 0.0;
        let mut outflow = 0.0;
        for (j, &share) in xs.iter().enumerate() {
            inflow += share * rho.rate(j, i);
            outflow += rho.rate(i, j);
        }
        dx[i] = inflow - xs[i] * outflow;
    }
    Ok(dx)
}
