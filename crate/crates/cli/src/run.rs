//! Scenario execution: per-model dispatch, trajectory and barycentric CSV
//! assembly, report construction, artifact writing.

use std::fs;
use std::path::{Path, PathBuf};

use swarm_core::asymmetric::{
    asym_equilibria, rhs_asym_class_unchecked, rhs_asym_unchecked,
};
use swarm_core::engine::{integrate, settle_time, Trajectory};
use swarm_core::game::{ModelParams, SimplexState};
use swarm_core::network::{sq_weighted_mean, ClassState, DegreeDistribution};
use swarm_core::robustness::{
    hurwitz_check, kyp_solve, kyp_solve_auto, linearized_a, max_envelope_increase,
    simulate_sector, spr_check, symmetric_equilibrium_coordinate, z_of_s, KypCertificate,
    LyapunovSpec, SectorBound, SectorParams, SprVerdict,
};
use swarm_core::structured::{
    mean_field_eigenvalues, mean_field_equilibrium, rhs_class_unchecked, simulate_micro_macro,
    structured_threshold,
};
use swarm_core::unstructured::{
    classify, consensus_threshold, equilibria, rhs_unchecked, EquilibriumCase,
};

use crate::bary::to_barycentric_raw;
use crate::csvout::{barycentric_csv, trajectory_csv, BarycentricRow, TrajectoryRow};
use crate::empirical::{empirical_consensus_threshold, empirical_structured_bracket};
use crate::error::{CliError, CliResult};
use crate::report::{
    classification_str, ClassFinal, EquilibriumReport, InvariantReport, KypJson,
    MeanFieldClassReport, MicroMacroReport, Report, SectorRunReport, SettleReport, SprJson,
    Thresholds,
};
use crate::scenario::{load_scenario, ModelKind, Scenario};
use crate::signals::build_signal;

pub struct RunOutcome {
    pub report: Report,
    pub written: Vec<PathBuf>,
}

struct Artifacts {
    rows: Vec<TrajectoryRow>,
    bary: Vec<BarycentricRow>,
    report: Report,
}

/// Execute a scenario file and write its declared artifacts into `out_dir`.
/// A report.json is always written, under its declared name if one is given.
pub fn run(scenario_path: &Path, out_dir: &Path) -> CliResult<RunOutcome> {
    let scenario = load_scenario(scenario_path)?;
    run_scenario(&scenario, out_dir)
}

pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> CliResult<RunOutcome> {
    fs::create_dir_all(out_dir)?;
    let mut artifacts = match scenario.model {
        ModelKind::Unstructured => run_unstructured(scenario)?,
        ModelKind::Structured => run_structured(scenario)?,
        ModelKind::Asymmetric => run_asymmetric(scenario)?,
        ModelKind::MicroMacro => run_micro_macro(scenario)?,
        ModelKind::Sector => run_sector(scenario)?,
    };
    finish_invariants(&mut artifacts);
    write_artifacts(scenario, artifacts, out_dir)
}

fn finish_invariants(artifacts: &mut Artifacts) {
    let mut min_coord = f64::INFINITY;
    let mut max_mass = 0.0f64;
    for row in &artifacts.rows {
        if let Some(s) = row.state {
            for c in s {
                min_coord = min_coord.min(c);
            }
            max_mass = max_mass.max((s[0] + s[1] + s[2] - 1.0).abs());
        }
    }
    if min_coord.is_infinite() {
        min_coord = 0.0;
    }
    artifacts.report.invariants = InvariantReport {
        min_coordinate: min_coord,
        max_mass_error: max_mass,
    };
}

fn write_artifacts(
    scenario: &Scenario,
    artifacts: Artifacts,
    out_dir: &Path,
) -> CliResult<RunOutcome> {
    use crate::scenario::OutputSpec;

    let mut report = artifacts.report;
    let mut traj_names = Vec::new();
    let mut bary_names = Vec::new();
    let mut report_name: Option<String> = None;
    for out in &scenario.outputs {
        match out {
            OutputSpec::Trajectory(t) => traj_names.push(t.trajectory_csv.clone()),
            OutputSpec::Barycentric(b) => bary_names.push(b.barycentric_csv.clone()),
            OutputSpec::Report(r) => report_name = Some(r.report_json.clone()),
        }
    }
    let report_name = report_name.unwrap_or_else(|| "report.json".to_string());

    let mut names: Vec<String> = Vec::new();
    names.extend(traj_names.iter().cloned());
    names.extend(bary_names.iter().cloned());
    names.push(report_name.clone());
    report.outputs = names;

    let mut written = Vec::new();
    let traj_csv = trajectory_csv(&artifacts.rows);
    for name in &traj_names {
        let path = out_dir.join(name);
        fs::write(&path, &traj_csv)?;
        written.push(path);
    }
    let bary_csv = barycentric_csv(&artifacts.bary);
    for name in &bary_names {
        let path = out_dir.join(name);
        fs::write(&path, &bary_csv)?;
        written.push(path);
    }
    let path = out_dir.join(&report_name);
    fs::write(&path, report.to_json())?;
    written.push(path);
    Ok(RunOutcome { report, written })
}

fn equilibrium_case_str(case: EquilibriumCase) -> &'static str {
    match case {
        EquilibriumCase::Case1 => "case1",
        EquilibriumCase::Case1Aux => "case1_aux",
        EquilibriumCase::Case2Plus => "case2_plus",
        EquilibriumCase::Case2Minus => "case2_minus",
        EquilibriumCase::Case3 => "case3",
    }
}

fn equilibria_report(p: &ModelParams) -> CliResult<Vec<EquilibriumReport>> {
    let set = equilibria(p)?;
    let mut out = Vec::with_capacity(set.points.len());
    for e in &set.points {
        // the diagonal Jacobian applies to the symmetric, feasible candidates
        let classified = if e.feasible && (e.point[0] - e.point[1]).abs() <= 1e-9 {
            SimplexState::new(e.point[0], e.point[1], e.point[2])
                .ok()
                .and_then(|s| classify(p, &s).ok())
        } else {
            None
        };
        out.push(EquilibriumReport {
            case: equilibrium_case_str(e.case).to_string(),
            point: e.point,
            feasible: e.feasible,
            residual: e.residual,
            classification: classified
                .as_ref()
                .map(|r| classification_str(r.classification).to_string()),
            trace: classified.as_ref().map(|r| r.trace),
            determinant: classified.as_ref().map(|r| r.determinant),
            eigenvalues: classified
                .as_ref()
                .map(|r| [r.eigenvalues.0.re, r.eigenvalues.1.re]),
        });
    }
    Ok(out)
}

fn run_unstructured(scenario: &Scenario) -> CliResult<Artifacts> {
    let p = scenario.params_symmetric()?;
    reject_structure_fields(scenario)?;
    let x0 = scenario.init.global_state()?;
    let cfg = scenario
        .integrator
        .to_config()?
        .with_record_every(scenario.csv_every());
    let traj = integrate(
        |_t, y, dy| {
            let (d1, d2) = rhs_unchecked(&p, y[0], y[1]);
            dy[0] = d1;
            dy[1] = d2;
        },
        &[x0.x1(), x0.x2()],
        &cfg,
    )?;

    let mut rows = Vec::with_capacity(traj.len());
    let mut bary = Vec::with_capacity(traj.len());
    for (t, s) in traj.iter() {
        let state = [s[0], s[1], 1.0 - s[0] - s[1]];
        rows.push(TrajectoryRow {
            t,
            class: None,
            state: Some(state),
            theta: None,
        });
        let (u, v) = to_barycentric_raw(s[0], s[1]);
        bary.push(BarycentricRow {
            t,
            class: None,
            u,
            v,
        });
    }

    let mut report = Report::new(scenario.model.as_str());
    report.equilibria = Some(equilibria_report(&p)?);
    let formula = consensus_threshold(&p).ok();
    let mut thresholds = Thresholds {
        formula,
        structured: None,
        ratio: None,
        psi_aggregate: None,
        empirical: None,
        empirical_bracket: None,
        relative_gap: None,
    };
    if scenario.empirical_threshold {
        let empirical = empirical_consensus_threshold(&p, 1e-3)?;
        thresholds.empirical = Some(empirical);
        if let Some(f) = formula {
            if f > 0.0 {
                thresholds.relative_gap = Some((empirical - f).abs() / f);
            }
        }
    }
    report.thresholds = Some(thresholds);
    report.settle = Some(settle_report_from(&traj, None));
    Ok(Artifacts { rows, bary, report })
}

fn settle_report_from(traj: &Trajectory, consensus_target: Option<&[f64]>) -> SettleReport {
    let final_state = traj.last_state().to_vec();
    let settle_to_final = settle_time(traj, &final_state, 1e-6);
    let settle_99 = consensus_target.and_then(|target| settle_time(traj, target, 0.01));
    SettleReport {
        final_state,
        settle_time_to_final: settle_to_final,
        settle_99,
        peak_x3: None,
    }
}

fn reject_structure_fields(scenario: &Scenario) -> CliResult<()> {
    if scenario.network.is_some() {
        return Err(CliError::validation(format!(
            "/network: not used by model '{}'",
            scenario.model.as_str()
        )));
    }
    if scenario.classes.is_some() {
        return Err(CliError::validation(format!(
            "/classes: not used by model '{}'",
            scenario.model.as_str()
        )));
    }
    Ok(())
}

fn run_structured(scenario: &Scenario) -> CliResult<Artifacts> {
    let p = scenario.params_symmetric()?;
    if scenario.classes.is_some() {
        return Err(CliError::validation(
            "/classes: the structured model takes a network, not psi classes",
        ));
    }
    let theta = scenario
        .theta
        .ok_or_else(|| CliError::validation("/theta: required for model 'structured'"))?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(CliError::validation(format!(
            "/theta: {theta} outside [0, 1]"
        )));
    }
    let dist = scenario
        .network
        .as_ref()
        .ok_or_else(|| CliError::validation("/network: required for model 'structured'"))?
        .build()?;
    let inits = scenario.init.per_class_states(&dist)?;
    let cfg = scenario
        .integrator
        .to_config()?
        .with_record_every(scenario.csv_every());

    let mut per_class_traj = Vec::with_capacity(dist.len());
    for (idx, &k) in dist.support().iter().enumerate() {
        let psi = dist.psi(k);
        let x0 = &inits[idx];
        let traj = integrate(
            |_t, y, dy| {
                let (d1, d2) = rhs_class_unchecked(&p, psi, theta, theta, y[0], y[1]);
                dy[0] = d1;
                dy[1] = d2;
            },
            &[x0.x1(), x0.x2()],
            &cfg,
        )?;
        per_class_traj.push((k, psi, traj));
    }

    // time-major rows: all trajectories share the fixed-step grid
    let mut rows = Vec::new();
    let mut bary = Vec::new();
    let n_records = per_class_traj[0].2.len();
    for i in 0..n_records {
        for (k, _, traj) in &per_class_traj {
            let t = traj.time(i);
            let s = traj.state(i);
            rows.push(TrajectoryRow {
                t,
                class: Some(*k),
                state: Some([s[0], s[1], 1.0 - s[0] - s[1]]),
                theta: None,
            });
            let (u, v) = to_barycentric_raw(s[0], s[1]);
            bary.push(BarycentricRow {
                t,
                class: Some(*k),
                u,
                v,
            });
        }
    }

    let mut report = Report::new(scenario.model.as_str());
    let mut mf = Vec::with_capacity(per_class_traj.len());
    for (k, psi, traj) in &per_class_traj {
        let eig = mean_field_eigenvalues(&p, *psi, theta)?;
        let eq = mean_field_equilibrium(&p, *psi, theta)?;
        let last = traj.last_state();
        mf.push(MeanFieldClassReport {
            k: *k,
            psi: *psi,
            eigenvalues: [eig.0, eig.1],
            equilibrium: eq.as_array(),
            final_state: [last[0], last[1], 1.0 - last[0] - last[1]],
            settle_time: settle_time(traj, last, 1e-6),
        });
    }
    report.mean_field = Some(mf);
    report.thresholds = Some(Thresholds {
        formula: consensus_threshold(&p).ok(),
        structured: None,
        ratio: None,
        psi_aggregate: None,
        empirical: None,
        empirical_bracket: None,
        relative_gap: None,
    });
    Ok(Artifacts { rows, bary, report })
}

enum AsymMode {
    Unstructured,
    IsolatedPsi(f64),
    Network(DegreeDistribution),
}

fn run_asymmetric(scenario: &Scenario) -> CliResult<Artifacts> {
    let p = scenario.params_asym()?;
    let mode = match (&scenario.network, &scenario.classes) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "/classes: give either a network or psi classes, not both",
            ))
        }
        (None, None) => AsymMode::Unstructured,
        (None, Some(c)) => {
            if c.psi.len() != 1 {
                return Err(CliError::validation(
                    "/classes/psi: exactly one isolated class is supported (the link \
                     probability of a multi-class population needs degree weights)",
                ));
            }
            let psi = c.psi[0];
            if !(0.0..=1.0).contains(&psi) {
                return Err(CliError::validation(format!(
                    "/classes/psi/0: {psi} outside [0, 1]"
                )));
            }
            AsymMode::IsolatedPsi(psi)
        }
        (Some(n), None) => AsymMode::Network(n.build()?),
    };
    let cfg = scenario
        .integrator
        .to_config()?
        .with_record_every(scenario.csv_every());

    let mut rows = Vec::new();
    let mut bary = Vec::new();
    let mut report = Report::new(scenario.model.as_str());

    let eqs = asym_equilibria(&p)?;
    report.equilibria = Some(
        eqs.iter()
            .map(|e| EquilibriumReport {
                case: if e.point[0] == 1.0 {
                    "consensus_1".to_string()
                } else {
                    "consensus_2".to_string()
                },
                point: e.point,
                feasible: true,
                residual: 0.0,
                classification: Some(classification_str(e.classification).to_string()),
                trace: Some(e.trace),
                determinant: Some(e.determinant),
                eigenvalues: None,
            })
            .collect(),
    );

    match mode {
        AsymMode::Unstructured | AsymMode::IsolatedPsi(_) => {
            let x0 = scenario.init.global_state()?;
            let traj = match mode {
                AsymMode::Unstructured => integrate(
                    |_t, y, dy| {
                        let d = rhs_asym_unchecked(&p, y[0], y[1], y[2]);
                        dy.copy_from_slice(&d);
                    },
                    &[x0.x1(), x0.x2(), x0.x3()],
                    &cfg,
                )?,
                AsymMode::IsolatedPsi(psi) => integrate(
                    // a single isolated class sees only itself: Theta_1 = x1
                    |_t, y, dy| {
                        let d = rhs_asym_class_unchecked(&p, psi, y[0], y[1], y[2]);
                        dy.copy_from_slice(&d);
                    },
                    &[x0.x1(), x0.x2(), x0.x3()],
                    &cfg,
                )?,
                AsymMode::Network(_) => unreachable!(),
            };
            let mut peak_x3 = f64::NEG_INFINITY;
            for (t, s) in traj.iter() {
                peak_x3 = peak_x3.max(s[2]);
                rows.push(TrajectoryRow {
                    t,
                    class: None,
                    state: Some([s[0], s[1], s[2]]),
                    theta: None,
                });
                let (u, v) = to_barycentric_raw(s[0], s[1]);
                bary.push(BarycentricRow {
                    t,
                    class: None,
                    u,
                    v,
                });
            }
            let mut settle = settle_report_from(&traj, Some(&[1.0, 0.0, 0.0]));
            settle.peak_x3 = Some(peak_x3);
            report.settle = Some(settle);
        }
        AsymMode::Network(dist) => {
            let inits = scenario.init.per_class_states(&dist)?;
            let n = dist.len();
            let psis: Vec<f64> = dist.support().iter().map(|&k| dist.psi(k)).collect();
            let link_w: Vec<f64> = dist
                .iter()
                .map(|(k, prob)| k as f64 * prob / dist.mean_k())
                .collect();
            let probs = dist.probs().to_vec();
            let mut x0 = Vec::with_capacity(3 * n);
            for s in &inits {
                x0.extend_from_slice(&s.as_array());
            }
            let traj = integrate(
                |_t, y, dy| {
                    let th1: f64 = link_w
                        .iter()
                        .enumerate()
                        .map(|(i, w)| w * y[3 * i])
                        .sum();
                    for i in 0..n {
                        let d =
                            rhs_asym_class_unchecked(&p, psis[i], th1, y[3 * i + 1], y[3 * i + 2]);
                        dy[3 * i] = d[0];
                        dy[3 * i + 1] = d[1];
                        dy[3 * i + 2] = d[2];
                    }
                },
                &x0,
                &cfg,
            )?;
            let mut peak_x3 = f64::NEG_INFINITY;
            for (t, s) in traj.iter() {
                let mut avg_x3 = 0.0;
                for (i, &k) in dist.support().iter().enumerate() {
                    let state = [s[3 * i], s[3 * i + 1], s[3 * i + 2]];
                    avg_x3 += probs[i] * state[2];
                    rows.push(TrajectoryRow {
                        t,
                        class: Some(k),
                        state: Some(state),
                        theta: None,
                    });
                    let (u, v) = to_barycentric_raw(state[0], state[1]);
                    bary.push(BarycentricRow {
                        t,
                        class: Some(k),
                        u,
                        v,
                    });
                }
                peak_x3 = peak_x3.max(avg_x3);
            }
            report.settle = Some(SettleReport {
                final_state: traj.last_state().to_vec(),
                settle_time_to_final: settle_time(&traj, traj.last_state(), 1e-6),
                settle_99: None,
                peak_x3: Some(peak_x3),
            });
        }
    }
    Ok(Artifacts { rows, bary, report })
}

fn run_micro_macro(scenario: &Scenario) -> CliResult<Artifacts> {
    let p = scenario.params_symmetric()?;
    if scenario.classes.is_some() {
        return Err(CliError::validation(
            "/classes: the micro_macro model takes a network, not psi classes",
        ));
    }
    let dist = scenario
        .network
        .as_ref()
        .ok_or_else(|| CliError::validation("/network: required for model 'micro_macro'"))?
        .build()?;
    let step = match scenario.integrator.method {
        crate::scenario::MethodKind::Rk4Fixed => scenario.integrator.step.ok_or_else(|| {
            CliError::validation("/integrator/step: required for rk4_fixed")
        })?,
        crate::scenario::MethodKind::Rk45Adaptive => {
            return Err(CliError::validation(
                "/integrator/method: the coupled micro-macro scheme is fixed-step (rk4_fixed)",
            ))
        }
    };
    let inits = scenario.init.per_class_states(&dist)?;
    let cs0 = ClassState::new(dist.clone(), inits)
        .map_err(|e| CliError::validation(format!("/init: {e}")))?;
    let traj = simulate_micro_macro(
        &p,
        &cs0,
        scenario.integrator.horizon,
        step,
        scenario.csv_every(),
    )?;

    let mut rows = Vec::new();
    let mut bary = Vec::new();
    let mut theta_gap = 0.0f64;
    for i in 0..traj.len() {
        let t = traj.times()[i];
        for ((k, _), &(x1, x2)) in dist.iter().zip(traj.class_states(i)) {
            rows.push(TrajectoryRow {
                t,
                class: Some(k),
                state: Some([x1, x2, 1.0 - x1 - x2]),
                theta: None,
            });
            let (u, v) = to_barycentric_raw(x1, x2);
            bary.push(BarycentricRow {
                t,
                class: Some(k),
                u,
                v,
            });
        }
        let (m1, m2) = traj.macro_state(i);
        rows.push(TrajectoryRow {
            t,
            class: None,
            state: None,
            theta: Some((m1, m2)),
        });
        let (u1, u2) = traj.theta_from_micro(i);
        theta_gap = theta_gap.max((m1 - u1).abs()).max((m2 - u2).abs());
    }

    let finals = traj.last_class_states();
    let x1s: Vec<f64> = finals.iter().map(|c| c.0).collect();
    let x2s: Vec<f64> = finals.iter().map(|c| c.1).collect();
    let psi1 = sq_weighted_mean(&dist, &x1s).map_err(CliError::from)?;
    let psi2 = sq_weighted_mean(&dist, &x2s).map_err(CliError::from)?;
    let psi_agg = 0.5 * (psi1 + psi2);
    let formula = consensus_threshold(&p).ok();
    let structured = structured_threshold(&p, &dist, psi_agg).ok();
    let ratio = match (structured, formula) {
        (Some(s), Some(f)) if f != 0.0 => Some(s / f),
        _ => None,
    };
    let empirical_bracket = if scenario.empirical_threshold {
        Some(empirical_structured_bracket(&p, &dist, 0.05)?)
    } else {
        None
    };

    let mut final_classes = Vec::with_capacity(finals.len());
    let mut monotone = true;
    let mut prev_x3 = f64::NEG_INFINITY;
    for ((k, _), &(x1, x2)) in dist.iter().zip(finals) {
        let x3 = 1.0 - x1 - x2;
        if x3 <= prev_x3 {
            monotone = false;
        }
        prev_x3 = x3;
        final_classes.push(ClassFinal {
            k,
            psi: dist.psi(k),
            x1,
            x2,
            x3,
        });
    }

    let mut report = Report::new(scenario.model.as_str());
    report.thresholds = Some(Thresholds {
        formula,
        structured,
        ratio,
        psi_aggregate: Some(psi_agg),
        empirical: None,
        empirical_bracket,
        relative_gap: None,
    });
    let (t1, t2) = traj.last_macro_state();
    report.micro_macro = Some(MicroMacroReport {
        theta_consistency_gap: theta_gap,
        final_theta: [t1, t2],
        final_classes,
        x3_monotone_in_k: monotone,
    });
    Ok(Artifacts { rows, bary, report })
}

/// The spr-check verdict block, shared by the subcommand and sector runs.
pub fn spr_block(
    p: &ModelParams,
    x: f64,
    sector: &SectorBound,
    epsilon: Option<f64>,
) -> CliResult<(SprJson, Option<KypCertificate>)> {
    let a = linearized_a(p, x)?;
    let hw = hurwitz_check(&a);
    if !hw.is_hurwitz {
        return Ok((
            SprJson {
                hurwitz: false,
                trace: hw.trace,
                determinant: hw.determinant,
                pole_list: Vec::new(),
                min_eig_margin: f64::NAN,
                worst_omega: f64::NAN,
                z_inf_positive: false,
                verdict: "not_hurwitz".to_string(),
                kyp: KypJson {
                    found: false,
                    epsilon: None,
                    p: None,
                    l: None,
                    residuals: None,
                    error: Some("linearization is not Hurwitz".to_string()),
                },
            },
            None,
        ));
    }
    let z = z_of_s(p, x, sector)?;
    let grid = swarm_core::robustness::default_omega_grid();
    let spr = spr_check(&z, &grid)?;
    let verdict = match spr.verdict {
        SprVerdict::StrictlyPositiveReal => "strictly_positive_real",
        SprVerdict::NotHurwitz => "not_hurwitz",
        SprVerdict::IndefiniteOnAxis => "indefinite_on_axis",
        SprVerdict::LimitNotPositive => "limit_not_positive",
        SprVerdict::Inconclusive => "inconclusive",
    };
    let cert = match epsilon {
        Some(eps) => kyp_solve(&a, sector, eps),
        None => kyp_solve_auto(&a, sector),
    };
    let kyp = match &cert {
        Ok(c) => KypJson {
            found: true,
            epsilon: Some(c.epsilon),
            p: Some(c.p_matrix),
            l: Some(c.l_matrix),
            residuals: Some(c.residuals),
            error: None,
        },
        Err(e) => KypJson {
            found: false,
            epsilon,
            p: None,
            l: None,
            residuals: None,
            error: Some(e.to_string()),
        },
    };
    Ok((
        SprJson {
            hurwitz: true,
            trace: hw.trace,
            determinant: hw.determinant,
            pole_list: spr.poles.iter().map(|c| [c.re, c.im]).collect(),
            min_eig_margin: spr.min_eig_margin,
            worst_omega: spr.worst_omega,
            z_inf_positive: spr.z_inf_positive,
            verdict: verdict.to_string(),
            kyp,
        },
        cert.ok(),
    ))
}

fn run_sector(scenario: &Scenario) -> CliResult<Artifacts> {
    let p = scenario.params_symmetric()?;
    reject_structure_fields(scenario)?;
    let spec = scenario
        .sector
        .as_ref()
        .ok_or_else(|| CliError::validation("/sector: required for model 'sector'"))?;
    let sector = SectorBound::new(spec.k_tilde)
        .map_err(|e| CliError::validation(format!("/sector/k_tilde: {e}")))?;
    let (r, _, alpha, gamma) = p.symmetric_rates().map_err(CliError::from)?;
    let sp = SectorParams::new(r, alpha, gamma).map_err(CliError::from)?;
    let x_lin = match spec.x {
        Some(x) => {
            if !(0.0..=0.5).contains(&x) {
                return Err(CliError::validation(format!(
                    "/sector/x: {x} outside [0, 0.5]"
                )));
            }
            x
        }
        None => symmetric_equilibrium_coordinate(&sp, sector.k_tilde() / 2.0)?,
    };

    let (spr, cert) = spr_block(&p, x_lin, &sector, None)?;

    let signal = build_signal(
        &spec.signal,
        sector.k_tilde(),
        scenario.integrator.horizon,
        scenario.seed.unwrap_or(0),
    )?;
    let x0 = scenario.init.global_state()?;
    let cfg = scenario
        .integrator
        .to_config()?
        .with_record_every(scenario.csv_every());
    let lyap_spec = cert.as_ref().map(|c| LyapunovSpec {
        p_matrix: c.p_matrix,
        center: (x_lin, x_lin),
    });
    let sim = simulate_sector(
        &sp,
        &sector,
        &signal,
        (x0.x1(), x0.x2()),
        &cfg,
        lyap_spec.as_ref(),
    )?;

    // residual ball: the symmetric equilibria swept by the sector
    let (ball, worst_rise) = if let (Some(values), Some(c)) = (&sim.lyapunov, &cert) {
        let mut ball = 0.0f64;
        for i in 0..=20 {
            let sigma = sector.k_tilde() * i as f64 / 20.0;
            let xs = symmetric_equilibrium_coordinate(&sp, sigma)?;
            let z = [xs - x_lin, xs - x_lin];
            let pz = [
                c.p_matrix[0][0] * z[0] + c.p_matrix[0][1] * z[1],
                c.p_matrix[1][0] * z[0] + c.p_matrix[1][1] * z[1],
            ];
            ball = ball.max(z[0] * pz[0] + z[1] * pz[1]);
        }
        let ball = 9.0 * ball + 1e-9;
        (Some(ball), Some(max_envelope_increase(values, ball)))
    } else {
        (None, None)
    };

    let mut rows = Vec::with_capacity(sim.trajectory.len());
    let mut bary = Vec::with_capacity(sim.trajectory.len());
    for (t, s) in sim.trajectory.iter() {
        rows.push(TrajectoryRow {
            t,
            class: None,
            state: Some([s[0], s[1], 1.0 - s[0] - s[1]]),
            theta: None,
        });
        let (u, v) = to_barycentric_raw(s[0], s[1]);
        bary.push(BarycentricRow {
            t,
            class: None,
            u,
            v,
        });
    }

    let mut report = Report::new(scenario.model.as_str());
    report.spr = Some(spr);
    report.sector = Some(SectorRunReport {
        k_tilde: sector.k_tilde(),
        x_lin,
        sup_norm: sim.sup_norm,
        final_state: [sim.final_state.0, sim.final_state.1],
        final_rhs_inf: sim.final_rhs_inf,
        lyapunov_residual_ball: ball,
        lyapunov_worst_increase: worst_rise,
    });
    report.settle = Some(settle_report_from(&sim.trajectory, None));
    Ok(Artifacts { rows, bary, report })
}
