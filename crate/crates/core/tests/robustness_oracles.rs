//! Independent oracles for the robustness module: the transfer matrix
//! against the state-space form at random complex points, the Lyapunov
//! certificate against trajectory decay of the sector loop, and the
//! positive-real condition of the asymmetric loop over a parameter grid.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use swarm_core::engine::{integrate, IntegratorConfig};
use swarm_core::game::ModelParams;
use swarm_core::linalg::{mat2_vec, Mat2};
use swarm_core::robustness::{
    asym_transfer, default_omega_grid, kyp_solve, kyp_solve_auto, linearized_a,
    max_envelope_increase, positive_real_check, simulate_sector,
    symmetric_equilibrium_coordinate, z_of_s, LyapunovSpec, SectorBound, SectorParams,
};
use swarm_core::asymmetric::AsymParams;

fn inv2c(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

/// State-space evaluation I + K (sI - A)^-1, the independent route.
fn z_state_space(a: &Mat2, k_tilde: f64, s: Complex64) -> [[Complex64; 2]; 2] {
    let si_a = [
        [s - a[0][0], Complex64::new(-a[0][1], 0.0)],
        [Complex64::new(-a[1][0], 0.0), s - a[1][1]],
    ];
    let inv = inv2c(si_a);
    let mut z = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in z.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            // K = k_tilde * ones: row i of K*inv sums both rows of inv
            *entry = k_tilde * (inv[0][j] + inv[1][j]);
            if i == j {
                *entry += 1.0;
            }
        }
    }
    z
}

#[test]
fn transfer_matrix_matches_state_space_at_random_points() {
    let mut rng = StdRng::seed_from_u64(41);
    let p = ModelParams::symmetric(1.0, 1.0, 0.2, 0.3).unwrap();
    let x = 0.45;
    let sector = SectorBound::new(0.8).unwrap();
    let z = z_of_s(&p, x, &sector).unwrap();
    let a = linearized_a(&p, x).unwrap();
    for _ in 0..20 {
        let s = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        // keep clear of the pole
        let zeta = 4.0 * x + 0.6 + 0.2 - 1.0;
        if (s + zeta).norm() < 0.05 {
            continue;
        }
        let direct = z.eval2(s).unwrap();
        let oracle = z_state_space(&a, sector.k_tilde(), s);
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (direct[i][j] - oracle[i][j]).norm() < 1e-10,
                    "mismatch at {s}: {:?} vs {:?}",
                    direct[i][j],
                    oracle[i][j]
                );
            }
        }
    }
}

#[test]
fn certificate_bounds_lyapunov_derivative_on_sector_loop() {
    // linear loop dx = A x - psi(t, x) with psi = g(t) K x, g in [0, 1]:
    // along every trajectory 2 x' P (A x - psi) <= -eps x' P x + slack
    let a = [[-1.0, 0.0], [0.0, -1.0]];
    let eps = 1e-3;
    let kt = 0.1;
    let sector = SectorBound::new(kt).unwrap();
    let cert = kyp_solve(&a, &sector, eps).unwrap();
    let p = cert.p_matrix;

    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let x0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let dwell = 0.25;
        let levels: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..1.0)).collect();
        let gain = move |t: f64| levels[((t / dwell) as usize).min(levels.len() - 1)];
        let cfg = IntegratorConfig::rk4(1e-3, 10.0).unwrap().with_record_every(10);
        let traj = integrate(
            |t, y, dy| {
                let g = gain(t);
                // K x = kt (x1 + x2) in both components
                let kx = kt * (y[0] + y[1]);
                dy[0] = a[0][0] * y[0] + a[0][1] * y[1] - g * kx;
                dy[1] = a[1][0] * y[0] + a[1][1] * y[1] - g * kx;
            },
            &x0,
            &cfg,
        )
        .unwrap();
        for (t, s) in traj.iter() {
            let g = gain(t);
            let kx = kt * (s[0] + s[1]);
            let xdot = [
                a[0][0] * s[0] + a[0][1] * s[1] - g * kx,
                a[1][0] * s[0] + a[1][1] * s[1] - g * kx,
            ];
            let px = mat2_vec(&p, &[s[0], s[1]]);
            let v = s[0] * px[0] + s[1] * px[1];
            let vdot = 2.0 * (xdot[0] * px[0] + xdot[1] * px[1]);
            assert!(
                vdot <= -eps * v + 1e-9 + 1e-9 * v.abs(),
                "t={t}: vdot {vdot} > -eps V {}",
                -eps * v
            );
        }
    }
}

#[test]
fn sector_simulation_bounded_with_decaying_envelope() {
    // nominal rates with the sector below the consensus threshold
    let sp = SectorParams::new(1.0, 0.2, 0.3).unwrap();
    let kt = 0.3;
    let sector = SectorBound::new(kt).unwrap();
    let x_lin = symmetric_equilibrium_coordinate(&sp, kt / 2.0).unwrap();
    let model = sp.to_model_params(kt / 2.0).unwrap();
    let a = linearized_a(&model, x_lin).unwrap();
    let cert = kyp_solve_auto(&a, &sector).unwrap();
    let spec = LyapunovSpec {
        p_matrix: cert.p_matrix,
        center: (x_lin, x_lin),
    };

    // residual ball: the symmetric equilibria swept by sigma in [0, kt]
    let mut ball: f64 = 0.0;
    for i in 0..=20 {
        let sigma = kt * i as f64 / 20.0;
        let xs = symmetric_equilibrium_coordinate(&sp, sigma).unwrap();
        let z = [xs - x_lin, xs - x_lin];
        let pz = mat2_vec(&cert.p_matrix, &z);
        ball = ball.max(z[0] * pz[0] + z[1] * pz[1]);
    }
    ball = 9.0 * ball + 1e-9;

    // the off-diagonal direction of this flow obeys d' = (r x3 + alpha) d and
    // repels; the analysis lives on the symmetric manifold, which the flow
    // leaves exactly invariant, so the start sits on the diagonal
    let cfg = IntegratorConfig::rk4(1e-3, 60.0).unwrap().with_record_every(10);
    let sim = simulate_sector(
        &sp,
        &sector,
        |t| kt * (1.0 + t.sin()) / 2.0,
        (0.3, 0.3),
        &cfg,
        Some(&spec),
    )
    .unwrap();
    assert!(sim.sup_norm <= 1.0 + 1e-9);
    assert!(sim.min_simplex_coord > -1e-9);
    assert!(sim.final_rhs_inf < 0.05, "still moving: {}", sim.final_rhs_inf);
    let values = sim.lyapunov.unwrap();
    let worst = max_envelope_increase(&values, ball);
    assert!(
        worst <= 1e-9,
        "Lyapunov envelope rose by {worst} outside the residual ball {ball}"
    );
}

#[test]
fn sector_inequality_holds_along_trajectories() {
    // the isolated nonlinearity psi = sigma(t) x1 x2 (1,1) satisfies
    // -2 psi' (psi - K y) >= 0 with y the state, for sigma inside [0, kt]
    let sp = SectorParams::new(1.0, 0.2, 0.3).unwrap();
    let kt = 0.35;
    let sector = SectorBound::new(kt).unwrap();
    let cfg = IntegratorConfig::rk4(1e-2, 40.0).unwrap();
    let signal = |t: f64| kt * (1.0 + (1.3 * t).cos()) / 2.0;
    let sim = simulate_sector(&sp, &sector, signal, (0.2, 0.2), &cfg, None).unwrap();
    for (t, s) in sim.trajectory.iter() {
        let sigma = signal(t);
        let psi = sigma * s[0] * s[1];
        let ky = kt * (s[0] + s[1]);
        let lhs = -2.0 * (psi * (psi - ky) + psi * (psi - ky));
        assert!(lhs >= -1e-12, "sector inequality violated at t={t}: {lhs}");
    }
}

#[test]
fn switching_signals_stay_bounded_over_many_seeds() {
    let sp = SectorParams::new(1.0, 0.2, 0.3).unwrap();
    let kt = 0.3;
    let sector = SectorBound::new(kt).unwrap();
    let cfg = IntegratorConfig::rk4(5e-3, 40.0).unwrap().with_record_every(20);
    for seed in 0..100u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let levels: Vec<f64> = (0..100).map(|_| rng.gen_range(0.0..kt)).collect();
        let signal = move |t: f64| levels[((t / 0.5) as usize).min(levels.len() - 1)];
        let x0 = rng.gen_range(0.05..0.48);
        let sim = simulate_sector(&sp, &sector, signal, (x0, x0), &cfg, None).unwrap();
        assert!(sim.sup_norm <= 1.0 + 1e-9, "seed {seed}: {}", sim.sup_norm);
        assert!(sim.min_simplex_coord > -1e-9, "seed {seed}");
    }
}

#[test]
fn asym_loop_positive_real_over_parameter_grid() {
    let grid = default_omega_grid();
    for i in 1..=5 {
        for j in 1..=5 {
            for k in 1..=5 {
                let p = AsymParams::new(i as f64, j as f64, k as f64).unwrap();
                let g = asym_transfer(&p).unwrap();
                let report = positive_real_check(&g, &grid).unwrap();
                assert!(
                    report.positive_real && report.worst_re >= -1e-12,
                    "({i}, {j}, {k}): worst Re {}",
                    report.worst_re
                );
            }
        }
    }
}
