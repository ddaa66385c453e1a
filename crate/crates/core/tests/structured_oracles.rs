//! Integration oracles for the structured module: the frozen-theta response
//! against its affine closed form, steady states against the matrix inverse,
//! and the spectral formulas against a generic eigensolver on random draws.

use swarm_core::engine::{integrate, run_to_steady_state, IntegratorConfig};
use swarm_core::game::{ModelParams, SimplexState};
use swarm_core::network::{power_law, ClassState};
use swarm_core::structured::{
    mean_field_eigenvalues, mean_field_equilibrium, mean_field_system, simulate_micro_macro,
};

fn affine_rhs<'a>(
    a: &'a [[f64; 2]; 2],
    c: &'a [f64; 2],
) -> impl Fn(f64, &[f64], &mut [f64]) + 'a {
    move |_t, y, dy| {
        dy[0] = a[0][0] * y[0] + a[0][1] * y[1] + c[0];
        dy[1] = a[1][0] * y[0] + a[1][1] * y[1] + c[1];
    }
}

#[test]
fn mean_field_ode_settles_on_closed_form_equilibrium() {
    let p = ModelParams::symmetric(1.0, 2.0, 0.1, 0.2).unwrap();
    for (psi, theta) in [(0.0, 0.9), (0.3, 0.4), (1.0, 0.4), (0.7, 0.05)] {
        let sys = mean_field_system(&p, psi, theta).unwrap();
        let eq = mean_field_equilibrium(&p, psi, theta).unwrap();
        let cfg = IntegratorConfig::rk4(1e-3, 400.0).unwrap().with_record_every(100);
        let ss = run_to_steady_state(
            affine_rhs(&sys.a_matrix, &sys.c_vector),
            &[0.6, 0.2],
            &cfg,
            1e-12,
            10,
        )
        .unwrap();
        assert!(ss.converged);
        assert!(
            (ss.state[0] - eq.x1()).abs() < 1e-6,
            "psi={psi} theta={theta}: {} vs {}",
            ss.state[0],
            eq.x1()
        );
        assert!((ss.state[1] - eq.x2()).abs() < 1e-6);
    }
}

#[test]
fn frozen_theta_response_matches_exponential_closed_form() {
    // the symmetric affine system decouples along (1,1) and (1,-1); each
    // component decays exponentially with the closed-form eigenvalues
    let p = ModelParams::symmetric(1.3, 2.2, 0.15, 0.35).unwrap();
    let (psi, theta) = (0.6, 0.45);
    let sys = mean_field_system(&p, psi, theta).unwrap();
    let eq = mean_field_equilibrium(&p, psi, theta).unwrap();
    let (lambda_fast, lambda_slow) = mean_field_eigenvalues(&p, psi, theta).unwrap();

    let x0 = [0.55, 0.15];
    let cfg = IntegratorConfig::rk4(1e-3, 12.0).unwrap().with_record_every(500);
    let traj = integrate(affine_rhs(&sys.a_matrix, &sys.c_vector), &x0, &cfg).unwrap();

    let z0 = [x0[0] - eq.x1(), x0[1] - eq.x2()];
    let sum0 = z0[0] + z0[1];
    let diff0 = z0[0] - z0[1];
    for (t, s) in traj.iter() {
        let sum = sum0 * (lambda_fast * t).exp();
        let diff = diff0 * (lambda_slow * t).exp();
        let want = [
            eq.x1() + 0.5 * (sum + diff),
            eq.x2() + 0.5 * (sum - diff),
        ];
        assert!(
            (s[0] - want[0]).abs() < 1e-8 && (s[1] - want[1]).abs() < 1e-8,
            "t={t}: {s:?} vs {want:?}"
        );
    }
}

#[test]
fn spectral_formulas_match_generic_eigensolver_on_random_draws() {
    let mut seed = 0x5deece66d_u64;
    let mut unit = || {
        seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..1000 {
        let p = ModelParams::symmetric(
            3.0 * unit(),
            5.0 * unit(),
            2.0 * unit(),
            2.0 * unit(),
        )
        .unwrap();
        let psi = unit();
        let theta = unit();
        let sys = mean_field_system(&p, psi, theta).unwrap();
        // generic route: roots of the characteristic polynomial
        let tr = sys.a_matrix[0][0] + sys.a_matrix[1][1];
        let det = sys.a_matrix[0][0] * sys.a_matrix[1][1]
            - sys.a_matrix[0][1] * sys.a_matrix[1][0];
        let disc = tr * tr - 4.0 * det;
        assert!(disc >= -1e-12);
        let sq = disc.max(0.0).sqrt();
        let (lo, hi) = ((tr - sq) / 2.0, (tr + sq) / 2.0);
        let (fast, slow) = mean_field_eigenvalues(&p, psi, theta).unwrap();
        assert!((lo - fast).abs() < 1e-12, "{lo} vs {fast}");
        assert!((hi - slow).abs() < 1e-12, "{hi} vs {slow}");
    }
}

#[test]
fn micro_macro_large_network_keeps_simplex_and_orders_classes() {
    // power-law classes driven by sigma above threshold: every class stays
    // on the simplex and the uncommitted share ends ordered by connectivity
    let p = ModelParams::symmetric(1.0, 5.0, 0.2, 0.3).unwrap();
    let dist = power_law(4.0, 20).unwrap();
    let cs = ClassState::uniform(dist, SimplexState::new(0.7, 0.3, 0.0).unwrap());
    let traj = simulate_micro_macro(&p, &cs, 120.0, 1e-3, 200).unwrap();
    for i in 0..traj.len() {
        for &(x1, x2) in traj.class_states(i) {
            let x3 = 1.0 - x1 - x2;
            assert!(x1 > -1e-9 && x2 > -1e-9 && x3 > -1e-9);
        }
    }
    let mut prev = -1.0;
    for &(x1, x2) in traj.last_class_states() {
        let x3 = 1.0 - x1 - x2;
        assert!(x3 > prev);
        prev = x3;
    }
}
