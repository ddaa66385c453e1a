//! Degree-structured dynamics: per-class evolution driven by link-weighted
//! aggregates, the frozen-theta mean-field response (an affine 2x2 system
//! per class), the macroscopic theta dynamics obtained by link-weighted
//! averaging, the structured consensus threshold, and the coupled
//! micro-macro simulation.

use alloc::vec::Vec;

use crate::engine;
use crate::error::{Error, Result};
use crate::game::{ModelParams, SimplexState};
use crate::linalg::Mat2;
use crate::math;
use crate::network::{
    sq_weighted_mean, theta, v_moment, ClassState, DegreeDistribution,
};

/// Frozen-theta response of one degree class: an affine system
/// dx = A_k x + c_k on the committed shares.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSystem {
    pub a_matrix: Mat2,
    pub c_vector: [f64; 2],
    /// Normalized connectivity k / k_max of the class.
    pub psi_k: f64,
    /// Link probability the class was frozen at.
    pub theta: f64,
}

/// Link-weighted strategy probabilities of the macroscopic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    theta1: f64,
    theta2: f64,
}

impl MacroState {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !math::all_finite(&[theta1, theta2]) {
            return Err(Error::NonFinite { what: "theta" });
        }
        if theta1 < 0.0 || theta2 < 0.0 || theta1 + theta2 > 1.0 + 1e-9 {
            return Err(Error::OutOfRange {
                what: "macro state",
                value: theta1 + theta2,
            });
        }
        Ok(Self { theta1, theta2 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }
}

/// Unchecked per-class kernel for integrator inner loops (frozen aggregates).
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn rhs_class_unchecked(
    p: &ModelParams,
    psi: f64,
    th1: f64,
    th2: f64,
    x1: f64,
    x2: f64,
) -> (f64, f64) {
    rhs_class_raw(p.r1, p.sigma1, p.alpha1, p.gamma1, psi, th1, th2, x1, x2)
}

#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn rhs_class_raw(
    r: f64,
    sigma: f64,
    alpha: f64,
    gamma: f64,
    psi: f64,
    th1: f64,
    th2: f64,
    x1: f64,
    x2: f64,
) -> (f64, f64) {
    let x3 = 1.0 - x1 - x2;
    (
        x3 * (psi * r * th1 + gamma) - x1 * (alpha + psi * sigma * th2),
        x3 * (psi * r * th2 + gamma) - x2 * (alpha + psi * sigma * th1),
    )
}

/// Per-class dynamics with the aggregates theta computed from the current
/// class states. Returns the committed-share derivatives (dx1, dx2) per
/// class, ordered by the distribution support.
pub fn rhs_structured(p: &ModelParams, cs: &ClassState) -> Result<Vec<(f64, f64)>> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    let th1 = theta(cs, 0)?;
    let th2 = theta(cs, 1)?;
    let dist = cs.dist();
    Ok(cs
        .states()
        .iter()
        .zip(dist.support())
        .map(|(s, &k)| {
            rhs_class_raw(
                r,
                sigma,
                alpha,
                gamma,
                dist.psi(k),
                th1,
                th2,
                s.x1(),
                s.x2(),
            )
        })
        .collect())
}

/// The affine frozen-theta system of a class with connectivity `psi_k`.
pub fn mean_field_system(p: &ModelParams, psi_k: f64, theta: f64) -> Result<MeanFieldSystem> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    check_unit("psi_k", psi_k)?;
    check_unit("theta", theta)?;
    let pt = psi_k * theta;
    let diag = -(r + sigma) * pt - alpha - gamma;
    let off = -r * pt - gamma;
    let c = r * pt + gamma;
    Ok(MeanFieldSystem {
        a_matrix: [[diag, off], [off, diag]],
        c_vector: [c, c],
        psi_k,
        theta,
    })
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange { what, value: v });
    }
    Ok(())
}

/// Closed-form eigenvalues of the frozen-theta response:
/// -(2r + sigma) psi theta - alpha - 2 gamma and -sigma psi theta - alpha.
/// Both real; the second is the slow one.
pub fn mean_field_eigenvalues(p: &ModelParams, psi_k: f64, theta: f64) -> Result<(f64, f64)> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    check_unit("psi_k", psi_k)?;
    check_unit("theta", theta)?;
    let pt = psi_k * theta;
    let fast = -(2.0 * r + sigma) * pt - alpha - 2.0 * gamma;
    let slow = -sigma * pt - alpha;
    Ok((fast, slow))
}

/// Equilibrium of the frozen-theta response: the committed shares equal
/// (psi r theta + gamma) / ((2r + sigma) psi theta + alpha + 2 gamma).
///
/// The uncommitted share is strictly increasing in connectivity whenever the
/// cross-inhibition pressure dominates spontaneous abandonment, sigma gamma >
/// r alpha (with theta > 0); the derivative in psi_k is proportional to
/// theta (sigma gamma - r alpha).
pub fn mean_field_equilibrium(p: &ModelParams, psi_k: f64, theta: f64) -> Result<SimplexState> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    check_unit("psi_k", psi_k)?;
    check_unit("theta", theta)?;
    let pt = psi_k * theta;
    let denom = (2.0 * r + sigma) * pt + alpha + 2.0 * gamma;
    if !(denom.is_finite() && denom > 0.0) {
        return Err(Error::NonInvertible);
    }
    let x = (r * pt + gamma) / denom;
    SimplexState::new(x, x, 1.0 - 2.0 * x)
}

/// Macroscopic dynamics of the link-weighted strategy probabilities, given
/// the k^2-weighted aggregates of the current micro states.
///
/// This is the closure-free kernel: Psi_1, Psi_2 and V are caller-supplied
/// so the coupling to a micro model stays explicit.
pub fn rhs_macro(
    p: &ModelParams,
    dist: &DegreeDistribution,
    m: &MacroState,
    psi1: f64,
    psi2: f64,
    v: f64,
) -> Result<(f64, f64)> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    if !math::all_finite(&[psi1, psi2, v]) {
        return Err(Error::NonFinite { what: "aggregate" });
    }
    Ok(rhs_macro_raw(
        r,
        sigma,
        alpha,
        gamma,
        dist.k_max() as f64,
        dist.mean_k(),
        m.theta1(),
        m.theta2(),
        psi1,
        psi2,
        v,
    ))
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn rhs_macro_raw(
    r: f64,
    sigma: f64,
    alpha: f64,
    gamma: f64,
    k_max: f64,
    mean_k: f64,
    th1: f64,
    th2: f64,
    psi1: f64,
    psi2: f64,
    v: f64,
) -> (f64, f64) {
    let excess = v / mean_k - psi1 - psi2;
    (
        r * th1 / k_max * excess - sigma * th2 / k_max * psi1 - th1 * alpha + gamma
            - th1 * gamma
            - th2 * gamma,
        r * th2 / k_max * excess - sigma * th1 / k_max * psi2 - th2 * alpha + gamma
            - th1 * gamma
            - th2 * gamma,
    )
}

/// Consensus threshold in the structured environment, taking the symmetric
/// aggregate Psi = Psi_1 = Psi_2 as input: 2r - r V / (<k> Psi) + alpha k_max / Psi.
pub fn structured_threshold(
    p: &ModelParams,
    dist: &DegreeDistribution,
    psi_agg: f64,
) -> Result<f64> {
    let (r, _, alpha, _) = p.symmetric_rates()?;
    if !psi_agg.is_finite() {
        return Err(Error::NonFinite { what: "Psi" });
    }
    if psi_agg <= 0.0 {
        return Err(Error::ZeroPsi);
    }
    let v = v_moment(dist);
    Ok(2.0 * r - r * v / (dist.mean_k() * psi_agg) + alpha * dist.k_max() as f64 / psi_agg)
}

/// Coupled micro-macro trajectory on a degree-structured population.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroMacroTrajectory {
    dist: DegreeDistribution,
    times: Vec<f64>,
    /// Per record: committed shares (x1, x2) per class, support order.
    class_states: Vec<Vec<(f64, f64)>>,
    /// Per record: the macro link probabilities (theta1, theta2).
    macro_states: Vec<(f64, f64)>,
}

impl MicroMacroTrajectory {
    pub fn dist(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn class_states(&self, record: usize) -> &[(f64, f64)] {
        &self.class_states[record]
    }

    pub fn macro_state(&self, record: usize) -> (f64, f64) {
        self.macro_states[record]
    }

    pub fn last_class_states(&self) -> &[(f64, f64)] {
        self.class_states.last().unwrap()
    }

    pub fn last_macro_state(&self) -> (f64, f64) {
        *self.macro_states.last().unwrap()
    }

    /// Link probabilities recomputed from the recorded micro states, for
    /// consistency checks against the evolved macro pair.
    pub fn theta_from_micro(&self, record: usize) -> (f64, f64) {
        let dist = &self.dist;
        let mut t1 = 0.0;
        let mut t2 = 0.0;
        for ((k, p), &(x1, x2)) in dist.iter().zip(&self.class_states[record]) {
            t1 += k as f64 * p * x1;
            t2 += k as f64 * p * x2;
        }
        (t1 / dist.mean_k(), t2 / dist.mean_k())
    }
}

/// Simulate the coupled model: per step the k^2-weighted aggregates are
/// recomputed from the micro states, the macro pair advances one RK4 step
/// with them frozen, then every class advances one RK4 step seeing the new
/// macro pair. Order fixed for determinism.
pub fn simulate_micro_macro(
    p: &ModelParams,
    cs0: &ClassState,
    horizon: f64,
    step: f64,
    record_every: usize,
) -> Result<MicroMacroTrajectory> {
    let (r, sigma, alpha, gamma) = p.symmetric_rates()?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::OutOfRange {
            what: "step",
            value: step,
        });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::OutOfRange {
            what: "horizon",
            value: horizon,
        });
    }
    let record_every = record_every.max(1);
    let dist = cs0.dist().clone();
    let k_max = dist.k_max() as f64;
    let mean_k = dist.mean_k();
    let v = v_moment(&dist);
    let psis: Vec<f64> = dist.support().iter().map(|&k| dist.psi(k)).collect();
    let n_steps = math::fmax(math::ceil(horizon / step - 1e-9), 1.0) as u64;
    let h = horizon / n_steps as f64;

    let mut classes: Vec<(f64, f64)> = cs0.states().iter().map(|s| (s.x1(), s.x2())).collect();
    let mut th = (theta(cs0, 0)?, theta(cs0, 1)?);

    let mut traj = MicroMacroTrajectory {
        dist: dist.clone(),
        times: alloc::vec![0.0],
        class_states: alloc::vec![classes.clone()],
        macro_states: alloc::vec![th],
    };

    for n in 0..n_steps {
        // (1) aggregates from the current micro states
        let x1s: Vec<f64> = classes.iter().map(|c| c.0).collect();
        let x2s: Vec<f64> = classes.iter().map(|c| c.1).collect();
        let psi1 = sq_weighted_mean(&dist, &x1s)?;
        let psi2 = sq_weighted_mean(&dist, &x2s)?;

        // (2) macro step with frozen aggregates
        let macro_rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            let (d1, d2) = rhs_macro_raw(
                r, sigma, alpha, gamma, k_max, mean_k, y[0], y[1], psi1, psi2, v,
            );
            dy[0] = d1;
            dy[1] = d2;
        };
        let mut m_closure = macro_rhs;
        let mut th_next = [0.0; 2];
        engine::rk4_step(&mut m_closure, 0.0, &[th.0, th.1], h, &mut th_next);
        th = (th_next[0], th_next[1]);

        // (3) every class steps with the new macro pair
        for (ci, class) in classes.iter_mut().enumerate() {
            let psi = psis[ci];
            let mut class_rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
                let (d1, d2) =
                    rhs_class_raw(r, sigma, alpha, gamma, psi, th.0, th.1, y[0], y[1]);
                dy[0] = d1;
                dy[1] = d2;
            };
            let mut next = [0.0; 2];
            engine::rk4_step(&mut class_rhs, 0.0, &[class.0, class.1], h, &mut next);
            *class = (next[0], next[1]);
        }

        let t_next = (n + 1) as f64 * h;
        for &(x1, x2) in &classes {
            let x3 = 1.0 - x1 - x2;
            if x1 < -1e-6 || x2 < -1e-6 || x3 < -1e-6 {
                return Err(Error::StepRejected { t: t_next });
            }
        }
        if !(th.0.is_finite() && th.1.is_finite()) {
            return Err(Error::NonFiniteState { t: t_next });
        }

        if (n + 1) % record_every as u64 == 0 || n + 1 == n_steps {
            traj.times.push(t_next);
            traj.class_states.push(classes.clone());
            traj.macro_states.push(th);
        }
    }
    Ok(traj)
}
