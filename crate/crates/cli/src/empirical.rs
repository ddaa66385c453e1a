//! Empirical consensus thresholds: bifurcation bisection on simulated
//! dynamics, independent of the closed-form expressions it is compared
//! against. The predicate is always "a slightly asymmetric perturbation of
//! the symmetric steady state decays back".

use swarm_core::engine::{
    bifurcation_bisect, integrate_with_halt, run_to_steady_state, IntegratorConfig,
};
use swarm_core::game::{ModelParams, SimplexState};
use swarm_core::network::{ClassState, DegreeDistribution};
use swarm_core::structured::simulate_micro_macro;
use swarm_core::unstructured;

use crate::error::{CliError, CliResult};

const PERTURBATION: f64 = 1e-3;

/// Does the perturbed symmetric start of the planar system return to the
/// diagonal at this sigma?
fn planar_returns(r: f64, alpha: f64, gamma: f64, sigma: f64) -> CliResult<bool> {
    let p = ModelParams::symmetric(r, sigma, alpha, gamma)
        .map_err(|e| CliError::validation(format!("params: {e}")))?;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (d1, d2) = unstructured::rhs_unchecked(&p, y[0], y[1]);
        dy[0] = d1;
        dy[1] = d2;
    };
    let settle_cfg = IntegratorConfig::rk4(1e-2, 500.0)?.with_record_every(25);
    let sym = run_to_steady_state(rhs, &[0.45, 0.45], &settle_cfg, 1e-11, 10)?.state;
    let x0 = [sym[0] + PERTURBATION, sym[1] - PERTURBATION];
    let cfg = IntegratorConfig::rk4(1e-2, 4000.0)?.with_record_every(100);
    let run = integrate_with_halt(rhs, &x0, &cfg, |_t, y| {
        let d = (y[0] - y[1]).abs();
        !(1e-7..=0.05).contains(&d)
    })?;
    let last = run.trajectory.last_state();
    // the perturbation starts with gap 2e-3; decay vs growth splits exactly
    // at the bifurcation
    Ok((last[0] - last[1]).abs() < 2.0 * PERTURBATION)
}

/// Locate the consensus threshold of the planar system by bisection on the
/// simulated return predicate.
pub fn empirical_consensus_threshold(p: &ModelParams, tol_rel: f64) -> CliResult<f64> {
    let (r, _, alpha, gamma) = p
        .symmetric_rates()
        .map_err(|e| CliError::validation(e.to_string()))?;
    let star = unstructured::consensus_threshold(p)?;
    let hi = 2.0 * star + 0.5;
    let tol = tol_rel * star.max(1e-3);
    Ok(bifurcation_bisect(
        0.0,
        hi,
        |sigma| planar_returns(r, alpha, gamma, sigma).unwrap_or(false),
        tol,
    )?)
}

fn micro_macro_returns(
    base: &ModelParams,
    dist: &DegreeDistribution,
    sigma: f64,
) -> CliResult<bool> {
    let p = ModelParams::symmetric(base.r1, sigma, base.alpha1, base.gamma1)
        .map_err(|e| CliError::validation(format!("params: {e}")))?;
    // settle onto the symmetric steady state, then kick each class off the
    // diagonal
    let sym_init = SimplexState::new(0.45, 0.45, 0.1)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let cs = ClassState::uniform(dist.clone(), sym_init);
    let settled = simulate_micro_macro(&p, &cs, 400.0, 1e-2, 1000)?;
    let perturbed: Vec<SimplexState> = settled
        .last_class_states()
        .iter()
        .map(|&(x1, x2)| {
            SimplexState::from_committed(x1 + PERTURBATION, x2 - PERTURBATION)
                .map_err(|e| CliError::numerical(format!("perturbed state invalid: {e}")))
        })
        .collect::<CliResult<_>>()?;
    let cs = ClassState::new(dist.clone(), perturbed)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let run = simulate_micro_macro(&p, &cs, 1500.0, 1e-2, 2000)?;
    let (t1, t2) = run.last_macro_state();
    Ok((t1 - t2).abs() < 2.0 * PERTURBATION)
}

/// Bracket the structured consensus threshold on the coupled micro-macro
/// simulation. Returns (last stable, first unstable) sigma.
pub fn empirical_structured_bracket(
    p: &ModelParams,
    dist: &DegreeDistribution,
    tol_rel: f64,
) -> CliResult<[f64; 2]> {
    let star = unstructured::consensus_threshold(p)?;
    let mut hi = 2.0 * star + 0.5;
    let mut attempts = 0;
    while micro_macro_returns(p, dist, hi)? {
        hi *= 2.0;
        attempts += 1;
        if attempts > 5 {
            return Err(CliError::numerical(format!(
                "no symmetry breaking found below sigma = {hi}"
            )));
        }
    }
    let mut lo = 0.0;
    let tol = tol_rel * hi.max(1e-3);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if micro_macro_returns(p, dist, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok([lo, hi])
}
