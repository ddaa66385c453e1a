//! The reduced planar system for the symmetric game on an unstructured
//! population: closed-form equilibrium families, the consensus threshold for
//! the cross-inhibition strength, and Jacobian classification of symmetric
//! equilibria.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{ModelParams, SimplexState, SIMPLEX_COORD_SLACK};
use crate::linalg::{self, Mat2};
use crate::math;

/// Planar reduced dynamics for the symmetric game on (x1, x2) with
/// x3 = 1 - x1 - x2: recruitment scaled by option popularity, spontaneous
/// abandonment, and cross-inhibition from the opposing option.
pub fn rhs(p: &ModelParams, x1: f64, x2: f64) -> Result<(f64, f64)> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    if !math::all_finite(&[x1, x2]) {
        return Err(Error::NonFinite {
            what: "state coordinate",
        });
    }
    let sum = x1 + x2;
    if !(-1e-9..=1.0 + 1e-9).contains(&sum) {
        return Err(Error::OffSimplex {
            sum,
            min_coord: math::fmin(x1, x2),
        });
    }
    Ok(rhs_sym_raw(r, sigma, alpha, gamma, x1, x2))
}

/// Unchecked variant of [`rhs`] for integrator inner loops: no domain or
/// symmetry validation, the common rates are read from the option-1 fields.
#[inline]
pub fn rhs_unchecked(p: &ModelParams, x1: f64, x2: f64) -> (f64, f64) {
    rhs_sym_raw(p.r1, p.sigma1, p.alpha1, p.gamma1, x1, x2)
}

/// Unchecked kernel shared with the integrators and residual evaluation.
#[inline]
pub(crate) fn rhs_sym_raw(
    r: f64,
    sigma: f64,
    alpha: f64,
    gamma: f64,
    x1: f64,
    x2: f64,
) -> (f64, f64) {
    let x3 = 1.0 - x1 - x2;
    (
        x3 * (r * x1 + gamma) - x1 * (alpha + sigma * x2),
        x3 * (r * x2 + gamma) - x2 * (alpha + sigma * x1),
    )
}

/// Max-norm of the planar vector field at an arbitrary point (no domain
/// checks, so residuals of infeasible closed-form roots can be evaluated).
pub fn equilibrium_residual(p: &ModelParams, point: &[f64; 3]) -> Result<f64> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    let (d1, d2) = rhs_sym_raw(r, sigma, alpha, gamma, point[0], point[1]);
    Ok(math::fmax(math::abs(d1), math::abs(d2)))
}

/// Which closed-form family an equilibrium candidate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumCase {
    /// Symmetric branch, principal (plus) root of the quadratic.
    Case1,
    /// Symmetric branch, auxiliary minus root; typically outside the simplex.
    Case1Aux,
    Case2Plus,
    Case2Minus,
    /// The intersection point of both constraints. It solves the
    /// stationarity equation exactly at the critical cross-inhibition
    /// strength; away from it the residual is reported, not asserted.
    Case3,
}

impl EquilibriumCase {
    pub fn constraint(&self) -> &'static str {
        match self {
            EquilibriumCase::Case1 | EquilibriumCase::Case1Aux => "x1 = x2",
            EquilibriumCase::Case2Plus | EquilibriumCase::Case2Minus => "x3 = alpha/r",
            EquilibriumCase::Case3 => "x1 = x2 and x3 = alpha/r",
        }
    }
}

/// A closed-form equilibrium candidate. Candidates outside the closed
/// simplex are flagged infeasible rather than dropped, so the algebra stays
/// testable independently of feasibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub case: EquilibriumCase,
    pub point: [f64; 3],
    pub feasible: bool,
    /// Max-norm of the planar vector field at the candidate.
    pub residual: f64,
}

impl Equilibrium {
    pub fn simplex_state(&self) -> Result<SimplexState> {
        SimplexState::new(self.point[0], self.point[1], self.point[2])
    }
}

/// Output of [`equilibria`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub points: Vec<Equilibrium>,
    /// Set when r = 0 or sigma = 0: families 2 and 3 divide by those rates
    /// and are omitted, leaving only the direct quadratic of family 1.
    pub domain_error: Option<Error>,
}

fn candidate(p: &ModelParams, case: EquilibriumCase, point: [f64; 3]) -> Result<Equilibrium> {
    let feasible = point
        .iter()
        .all(|&c| (-SIMPLEX_COORD_SLACK..=1.0 + SIMPLEX_COORD_SLACK).contains(&c));
    Ok(Equilibrium {
        case,
        point,
        feasible,
        residual: equilibrium_residual(p, &point)?,
    })
}

/// Closed-form equilibria of the symmetric planar system.
///
/// Family 1 lives on the diagonal x1 = x2 (both quadratic roots are
/// returned, the minus root tagged auxiliary); family 2 fixes x3 = alpha/r;
/// family 3 is their intersection, stationary exactly at the critical
/// cross-inhibition strength.
pub fn equilibria(p: &ModelParams) -> Result<EquilibriumSet> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    let mut points = Vec::new();

    // Family 1: on the diagonal, x solves (2r + sigma) x^2 - (r - 2gamma - alpha) x - gamma = 0.
    let a = 2.0 * r + sigma;
    let q = r - 2.0 * gamma - alpha;
    if a > 0.0 {
        if let Some((lo, hi)) = linalg::quadratic_roots_monic(-q / a, -gamma / a) {
            points.push(candidate(p, EquilibriumCase::Case1, sym_point(hi))?);
            points.push(candidate(p, EquilibriumCase::Case1Aux, sym_point(lo))?);
        }
    } else if q != 0.0 {
        // r = sigma = 0 degenerates to a linear equation.
        let x = -gamma / -q;
        points.push(candidate(p, EquilibriumCase::Case1, sym_point(x))?);
    }

    if r == 0.0 || sigma == 0.0 {
        let what = if r == 0.0 { "r" } else { "sigma" };
        return Ok(EquilibriumSet {
            points,
            domain_error: Some(Error::ZeroRate { what }),
        });
    }

    // Family 2: x3 = alpha/r, so stationarity forces x1 x2 = alpha gamma / (sigma r)
    // and x1 solves x^2 - (1 - alpha/r) x + alpha gamma / (sigma r) = 0. The
    // discriminant turns non-negative exactly at the critical cross-inhibition
    // strength: below it the family is complex and omitted.
    let x3 = alpha / r;
    let w = 1.0 - x3;
    let c = alpha * gamma / (sigma * r);
    if let Some((lo, hi)) = linalg::quadratic_roots_monic(-w, c) {
        for (case, x1) in [
            (EquilibriumCase::Case2Plus, hi),
            (EquilibriumCase::Case2Minus, lo),
        ] {
            let x2 = 1.0 - x1 - x3;
            points.push(candidate(p, case, [x1, x2, x3])?);
        }
    }

    // Family 3: both constraints at once forces x1 = x2 = (r - alpha) / 2r.
    let x = (r - alpha) / (2.0 * r);
    points.push(candidate(p, EquilibriumCase::Case3, [x, x, x3])?);

    Ok(EquilibriumSet {
        points,
        domain_error: None,
    })
}

fn sym_point(x: f64) -> [f64; 3] {
    [x, x, 1.0 - 2.0 * x]
}

/// Diagonal coordinate of the principal family-1 equilibrium.
pub fn case1_coordinate(p: &ModelParams) -> Result<f64> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    let a = 2.0 * r + sigma;
    let q = r - 2.0 * gamma - alpha;
    if a > 0.0 {
        let (_, hi) = linalg::quadratic_roots_monic(-q / a, -gamma / a)
            .expect("family-1 discriminant is non-negative for non-negative rates");
        Ok(hi)
    } else if q != 0.0 {
        Ok(gamma / -q)
    } else {
        Err(Error::ZeroRate { what: "r" })
    }
}

/// Critical cross-inhibition strength: the symmetric family-1 equilibrium is
/// locally asymptotically stable below it and a saddle above it.
pub fn consensus_threshold(p: &ModelParams) -> Result<f64> {
    let (r, _, alpha, gamma) = p.symmetric_rates()?;
    if r <= 0.0 {
        return Err(Error::ZeroRate { what: "r" });
    }
    let d = r - alpha;
    if d == 0.0 {
        return Err(Error::SingularThreshold);
    }
    Ok(4.0 * r * alpha * gamma / (d * d))
}

/// Planar equilibrium taxonomy by trace and determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StableNode,
    StableFocus,
    Saddle,
    Unstable,
    /// Within the 1e-9 band of a vanishing determinant (or vanishing trace
    /// with positive determinant): too close to a bifurcation to call.
    Degenerate,
}

const DEGENERATE_BAND: f64 = 1e-9;

/// Classify from trace and determinant, with a degenerate band instead of a
/// guess at the bifurcation boundary.
pub fn classify_planar(trace: f64, determinant: f64) -> Classification {
    if math::abs(determinant) < DEGENERATE_BAND {
        Classification::Degenerate
    } else if determinant < 0.0 {
        Classification::Saddle
    } else if math::abs(trace) < DEGENERATE_BAND {
        Classification::Degenerate
    } else if trace < 0.0 {
        if trace * trace - 4.0 * determinant >= 0.0 {
            Classification::StableNode
        } else {
            Classification::StableFocus
        }
    } else {
        Classification::Unstable
    }
}

/// Jacobian data and classification of a symmetric equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub equilibrium: SimplexState,
    pub jacobian: Mat2,
    pub trace: f64,
    pub determinant: f64,
    pub eigenvalues: (Complex64, Complex64),
    pub classification: Classification,
}

/// Classify a symmetric point x1 = x2 = x through the planar Jacobian.
///
/// The Jacobian is the one derived on the diagonal; points off the diagonal
/// are rejected.
pub fn classify(p: &ModelParams, eq: &SimplexState) -> Result<StabilityReport> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    if math::abs(eq.x1() - eq.x2()) > 1e-9 {
        return Err(Error::NotSymmetricPoint {
            x1: eq.x1(),
            x2: eq.x2(),
        });
    }
    let x = eq.x1();
    let j11 = r - 3.0 * r * x - gamma - alpha - sigma * x;
    let j12 = -x * (r + sigma) - gamma;
    let jacobian = [[j11, j12], [j12, j11]];
    let trace = 2.0 * j11;
    let determinant = j11 * j11 - j12 * j12;
    // symmetric matrix: eigenvalues j11 +/- j12, both real
    let (lo, hi) = if j12 >= 0.0 {
        (j11 - j12, j11 + j12)
    } else {
        (j11 + j12, j11 - j12)
    };
    Ok(StabilityReport {
        equilibrium: *eq,
        jacobian,
        trace,
        determinant,
        eigenvalues: (Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)),
        classification: classify_planar(trace, determinant),
    })
}
