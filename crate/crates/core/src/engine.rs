//! Shared numerical substrate: fixed-step RK4, embedded Dormand-Prince RK45
//! with PI step control, steady-state and settling-time detection, and
//! bisection for empirical bifurcation thresholds.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta at fixed step. The step is rounded
    /// down so that an integer number of steps lands exactly on the horizon.
    Rk4Fixed { step: f64 },
    /// Dormand-Prince 5(4) with PI step-size control.
    Rk45Adaptive { rel_tol: f64, abs_tol: f64 },
}

/// How to drive [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Final time T.
    pub horizon: f64,
    /// Record every n-th accepted step (the initial and final states are
    /// always recorded).
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    /// Fixed-step RK4 at 1e-3 over 50 time units.
    fn default() -> Self {
        Self {
            method: Method::Rk4Fixed { step: 1e-3 },
            horizon: 50.0,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64, horizon: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::OutOfRange {
                what: "step",
                value: step,
            });
        }
        Self::checked(Method::Rk4Fixed { step }, horizon)
    }

    pub fn rk45(rel_tol: f64, abs_tol: f64, horizon: f64) -> Result<Self> {
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(Error::OutOfRange {
                what: "rel_tol",
                value: rel_tol,
            });
        }
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::OutOfRange {
                what: "abs_tol",
                value: abs_tol,
            });
        }
        Self::checked(Method::Rk45Adaptive { rel_tol, abs_tol }, horizon)
    }

    fn checked(method: Method, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::OutOfRange {
                what: "horizon",
                value: horizon,
            });
        }
        Ok(Self {
            method,
            horizon,
            record_every: 1,
        })
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    fn method_name(&self) -> &'static str {
        match self.method {
            Method::Rk4Fixed { .. } => "rk4_fixed",
            Method::Rk45Adaptive { .. } => "rk45_adaptive",
        }
    }
}

/// Integrator provenance attached to a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub method: String,
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// A recorded solution: strictly increasing times, one fixed-dimension state
/// per time, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    data: Vec<f64>,
    dim: usize,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    fn new(dim: usize, meta: TrajectoryMeta) -> Self {
        Self {
            times: Vec::new(),
            data: Vec::new(),
            dim,
            meta,
        }
    }

    fn push(&mut self, t: f64, state: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.data.extend_from_slice(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times
            .iter()
            .copied()
            .zip(self.data.chunks_exact(self.dim))
    }
}

/// Outcome of an integration run that may stop early.
#[derive(Debug, Clone, PartialEq)]
pub struct HaltedRun {
    pub trajectory: Trajectory,
    /// Time at which the halt condition first fired, if it did.
    pub halted_at: Option<f64>,
}

fn meta_for(cfg: &IntegratorConfig) -> TrajectoryMeta {
    let (step, rel, abs) = match cfg.method {
        Method::Rk4Fixed { step } => (step, 0.0, 0.0),
        Method::Rk45Adaptive { rel_tol, abs_tol } => (0.0, rel_tol, abs_tol),
    };
    TrajectoryMeta {
        method: String::from(cfg.method_name()),
        step,
        rel_tol: rel,
        abs_tol: abs,
    }
}

/// One classical RK4 step of size `h` from (t, y) into `out`.
pub(crate) fn rk4_step<F>(rhs: &mut F, t: f64, y: &[f64], h: f64, out: &mut [f64])
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut k1 = alloc::vec![0.0; n];
    let mut k2 = alloc::vec![0.0; n];
    let mut k3 = alloc::vec![0.0; n];
    let mut k4 = alloc::vec![0.0; n];
    let mut tmp = alloc::vec![0.0; n];

    rhs(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    rhs(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    rhs(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    rhs(t + h, &tmp, &mut k4);
    for i in 0..n {
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Integrate `rhs` from `x0` over the configured horizon.
///
/// Deterministic: identical inputs and configuration produce identical
/// trajectories.
pub fn integrate<F>(rhs: F, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let run = integrate_with_halt(rhs, x0, cfg, |_, _| false)?;
    Ok(run.trajectory)
}

/// Integrate, stopping early as soon as `halt(t, state)` returns true at an
/// accepted step.
pub fn integrate_with_halt<F, H>(
    mut rhs: F,
    x0: &[f64],
    cfg: &IntegratorConfig,
    mut halt: H,
) -> Result<HaltedRun>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    H: FnMut(f64, &[f64]) -> bool,
{
    if !math::all_finite(x0) {
        return Err(Error::NonFiniteState { t: 0.0 });
    }
    match cfg.method {
        Method::Rk4Fixed { step } => rk4_fixed(&mut rhs, x0, cfg, step, &mut halt),
        Method::Rk45Adaptive { rel_tol, abs_tol } => {
            rk45_adaptive(&mut rhs, x0, cfg, rel_tol, abs_tol, &mut halt)
        }
    }
}

fn rk4_fixed<F, H>(
    rhs: &mut F,
    x0: &[f64],
    cfg: &IntegratorConfig,
    step: f64,
    halt: &mut H,
) -> Result<HaltedRun>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    H: FnMut(f64, &[f64]) -> bool,
{
    let horizon = cfg.horizon;
    let n_steps = math::fmax(math::ceil(horizon / step - 1e-9), 1.0) as u64;
    let h = horizon / n_steps as f64;

    let mut traj = Trajectory::new(x0.len(), meta_for(cfg));
    let mut y = x0.to_vec();
    let mut y_next = alloc::vec![0.0; x0.len()];
    traj.push(0.0, &y);

    let mut halted_at = None;
    for k in 0..n_steps {
        let t = k as f64 * h;
        rk4_step(rhs, t, &y, h, &mut y_next);
        let t_next = (k + 1) as f64 * h;
        if !math::all_finite(&y_next) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        core::mem::swap(&mut y, &mut y_next);
        let stop = halt(t_next, &y);
        let last = k + 1 == n_steps;
        if stop || last || (k + 1) % cfg.record_every as u64 == 0 {
            traj.push(t_next, &y);
        }
        if stop {
            halted_at = Some(t_next);
            break;
        }
    }
    Ok(HaltedRun {
        trajectory: traj,
        halted_at,
    })
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order solution weights (same as the last A row); 4th-order embedded weights.
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk45_adaptive<F, H>(
    rhs: &mut F,
    x0: &[f64],
    cfg: &IntegratorConfig,
    rel_tol: f64,
    abs_tol: f64,
    halt: &mut H,
) -> Result<HaltedRun>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    H: FnMut(f64, &[f64]) -> bool,
{
    let horizon = cfg.horizon;
    let n = x0.len();
    let mut traj = Trajectory::new(n, meta_for(cfg));
    let mut y = x0.to_vec();
    traj.push(0.0, &y);

    let mut t = 0.0;
    let mut h = math::fmin(1e-2 * horizon, 1e-2);
    let h_min = 1e-14 * math::fmax(horizon, 1.0);
    let mut err_prev: f64 = 1.0;
    let mut k = alloc::vec![alloc::vec![0.0; n]; 7];
    let mut y_stage = alloc::vec![0.0; n];
    let mut y5 = alloc::vec![0.0; n];
    let mut accepted: usize = 0;
    let mut halted_at = None;

    while t < horizon {
        if h < h_min {
            return Err(Error::StepUnderflow { t });
        }
        if t + h > horizon {
            h = horizon - t;
        }
        for stage in 0..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    acc += DP_A[stage][j] * kj[i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            let (t_stage, input) = if stage == 0 {
                (t, &y)
            } else {
                (t + DP_C[stage] * h, &y_stage)
            };
            let dest = &mut k[stage];
            rhs(t_stage, input, dest);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for stage in 0..7 {
                acc5 += DP_B5[stage] * k[stage][i];
                acc4 += DP_B4[stage] * k[stage][i];
            }
            y5[i] = y[i] + h * acc5;
            let scale = abs_tol + rel_tol * math::fmax(math::abs(y[i]), math::abs(y5[i]));
            err = math::fmax(err, math::abs(h * (acc5 - acc4)) / scale);
        }
        if !err.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            if !math::all_finite(&y) {
                return Err(Error::NonFiniteState { t });
            }
            accepted += 1;
            let stop = halt(t, &y);
            let done = t >= horizon;
            if stop || done || accepted.is_multiple_of(cfg.record_every) {
                traj.push(t, &y);
            }
            if stop {
                halted_at = Some(t);
                break;
            }
            // PI controller (Gustafsson): grow on small error, remember history.
            let e = math::fmax(err, 1e-10);
            let factor = 0.9 * math::powf(e, -0.7 / 5.0) * math::powf(err_prev, 0.4 / 5.0);
            h *= math::fmin(5.0, math::fmax(0.2, factor));
            err_prev = e;
        } else {
            h *= math::fmax(0.1, 0.9 * math::powf(err, -0.2));
        }
    }
    Ok(HaltedRun {
        trajectory: traj,
        halted_at,
    })
}

/// First time after which the trajectory stays within `tol` (max-norm) of
/// `target` for the rest of the recording. `None` if it never settles.
pub fn settle_time(traj: &Trajectory, target: &[f64], tol: f64) -> Option<f64> {
    if traj.is_empty() || target.len() != traj.dim() {
        return None;
    }
    let within = |state: &[f64]| {
        state
            .iter()
            .zip(target)
            .all(|(a, b)| math::abs(a - b) < tol)
    };
    // scan backwards for the last violation
    let mut settled_from = None;
    for i in (0..traj.len()).rev() {
        if within(traj.state(i)) {
            settled_from = Some(i);
        } else {
            break;
        }
    }
    settled_from.map(|i| traj.time(i))
}

/// Result of [`run_to_steady_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: Vec<f64>,
    pub time: f64,
    /// Whether the stop rule fired before the horizon.
    pub converged: bool,
}

/// Integrate until the right-hand side stays below `rhs_tol` (max-norm) for
/// `consecutive` accepted steps, or until the horizon runs out.
pub fn run_to_steady_state<F>(
    rhs: F,
    x0: &[f64],
    cfg: &IntegratorConfig,
    rhs_tol: f64,
    consecutive: usize,
) -> Result<SteadyState>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let rhs = &rhs;
    let mut quiet = 0usize;
    let mut scratch = alloc::vec![0.0; x0.len()];
    let run = integrate_with_halt(
        |t: f64, y: &[f64], dy: &mut [f64]| rhs(t, y, dy),
        x0,
        cfg,
        move |t, y| {
            rhs(t, y, &mut scratch);
            if math::inf_norm(&scratch) < rhs_tol {
                quiet += 1;
            } else {
                quiet = 0;
            }
            quiet >= consecutive
        },
    )?;
    Ok(SteadyState {
        state: run.trajectory.last_state().to_vec(),
        time: *run.trajectory.times().last().unwrap(),
        converged: run.halted_at.is_some(),
    })
}

/// Bisection on a boolean predicate: shrink [lo, hi] until `hi - lo < tol`
/// and return the midpoint. The endpoints must disagree.
pub fn bifurcation_bisect<P>(
    param_low: f64,
    param_high: f64,
    mut predicate: P,
    tol: f64,
) -> Result<f64>
where
    P: FnMut(f64) -> bool,
{
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::OutOfRange {
            what: "tolerance",
            value: tol,
        });
    }
    let (mut lo, mut hi) = (param_low, param_high);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::OutOfRange {
            what: "bisection interval",
            value: hi - lo,
        });
    }
    let at_lo = predicate(lo);
    if predicate(hi) == at_lo {
        return Err(Error::SameSignPredicate);
    }
    let mut guard = 0;
    while hi - lo > tol && guard < 200 {
        let mid = 0.5 * (lo + hi);
        if predicate(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        guard += 1;
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn default_config_is_fixed_step() {
        let cfg = IntegratorConfig::default();
        assert_eq!(cfg.method, Method::Rk4Fixed { step: 1e-3 });
        assert_eq!(cfg.horizon, 50.0);
    }

    #[test]
    fn rk4_hits_analytic_exponential() {
        let cfg = IntegratorConfig::rk4(1e-3, 1.0).unwrap();
        let traj = integrate(decay, &[1.0], &cfg).unwrap();
        let expected = (-1.0_f64).exp();
        assert!((traj.last_state()[0] - expected).abs() < 1e-9);
        assert_eq!(*traj.times().last().unwrap(), 1.0);
    }

    #[test]
    fn zero_rhs_is_constant() {
        let cfg = IntegratorConfig::rk4(0.1, 5.0).unwrap();
        let traj = integrate(|_, _, dy| dy[0] = 0.0, &[0.7], &cfg).unwrap();
        assert!(traj.iter().all(|(_, s)| s[0] == 0.7));
    }

    #[test]
    fn rk4_order_at_least_3_8() {
        let expected = (-1.0_f64).exp();
        let err_at = |h: f64| {
            let cfg = IntegratorConfig::rk4(h, 1.0).unwrap();
            let traj = integrate(decay, &[1.0], &cfg).unwrap();
            (traj.last_state()[0] - expected).abs()
        };
        let errs = [err_at(1e-1), err_at(1e-2), err_at(1e-3)];
        // least-squares slope of log err vs log h across the three steps
        let xs = [-1.0_f64, -2.0, -3.0];
        let ys = [errs[0].log10(), errs[1].log10(), errs[2].log10()];
        let xm = -2.0;
        let ym = (ys[0] + ys[1] + ys[2]) / 3.0;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xm) * (y - ym))
            .sum::<f64>()
            / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
        assert!(slope >= 3.8, "observed order {slope}, errors {errs:?}");
    }

    #[test]
    fn rk45_matches_exponential() {
        let cfg = IntegratorConfig::rk45(1e-10, 1e-12, 1.0).unwrap();
        let traj = integrate(decay, &[1.0], &cfg).unwrap();
        assert!((traj.last_state()[0] - (-1.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn deterministic_reruns_bit_identical() {
        let cfg = IntegratorConfig::rk45(1e-8, 1e-10, 3.0).unwrap();
        let a = integrate(decay, &[1.0], &cfg).unwrap();
        let b = integrate(decay, &[1.0], &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_finite_rhs_reported() {
        let cfg = IntegratorConfig::rk4(0.1, 1.0).unwrap();
        let res = integrate(|_, y, dy| dy[0] = 1.0 / (y[0] - y[0]), &[1.0], &cfg);
        assert!(matches!(res, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn rk45_breaks_on_non_integrable_singularity() {
        let cfg = IntegratorConfig::rk45(1e-10, 1e-12, 1.0).unwrap();
        let res = integrate(|t, _y, dy| dy[0] = 1.0 / (t - 0.5), &[0.0], &cfg);
        assert!(res.is_err(), "expected step underflow or blow-up");
    }

    #[test]
    fn settle_time_constant_trajectory_is_zero() {
        let cfg = IntegratorConfig::rk4(0.1, 1.0).unwrap();
        let traj = integrate(|_, _, dy| dy[0] = 0.0, &[0.5], &cfg).unwrap();
        assert_eq!(settle_time(&traj, &[0.5], 1e-12), Some(0.0));
    }

    #[test]
    fn settle_time_exponential_decay() {
        // |x(t)| < 1e-3 from t = ln(1000) on
        let cfg = IntegratorConfig::rk4(1e-3, 10.0).unwrap();
        let traj = integrate(decay, &[1.0], &cfg).unwrap();
        let t = settle_time(&traj, &[0.0], 1e-3).unwrap();
        assert!((t - 1000.0_f64.ln()).abs() < 2e-3, "settle at {t}");
    }

    #[test]
    fn settle_time_divergent_is_none() {
        let cfg = IntegratorConfig::rk4(1e-2, 5.0).unwrap();
        let traj = integrate(|_, y, dy| dy[0] = y[0], &[1.0], &cfg).unwrap();
        assert_eq!(settle_time(&traj, &[0.0], 1e-3), None);
    }

    #[test]
    fn bisect_synthetic_step_predicate() {
        let c = bifurcation_bisect(0.0, 1.0, |s| s < 0.375, 1e-4).unwrap();
        assert!((c - 0.375).abs() <= 1e-4);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(matches!(
            bifurcation_bisect(0.0, 1.0, |_| true, 1e-4),
            Err(Error::SameSignPredicate)
        ));
    }

    #[test]
    fn steady_state_detects_equilibrium() {
        let cfg = IntegratorConfig::rk4(1e-2, 100.0).unwrap();
        let ss = run_to_steady_state(decay, &[1.0], &cfg, 1e-9, 10).unwrap();
        assert!(ss.converged);
        assert!(ss.state[0].abs() < 1e-8);
        assert!(ss.time < 100.0);
    }
}
