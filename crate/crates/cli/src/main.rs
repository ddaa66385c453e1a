//! The `swarm` command line: scenario simulation, closed-form equilibria,
//! consensus thresholds, strict positive-realness checks, and directory
//! sweeps. The output directory resolves as SWARM_OUT > --out-dir > ./swarm_out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarm_cli::error::{CliError, CliResult};
use swarm_cli::report::{classification_str, EquilibriumReport};
use swarm_cli::run::{run, spr_block};
use swarm_cli::scenario::{AsymParamsDto, FullParamsDto};
use swarm_core::asymmetric::asym_equilibria;
use swarm_core::game::{ModelParams, SimplexState};
use swarm_core::robustness::{symmetric_equilibrium_coordinate, SectorBound, SectorParams};
use swarm_core::unstructured::{classify, consensus_threshold, equilibria, EquilibriumCase};

#[derive(Parser)]
#[command(
    name = "swarm",
    version,
    about = "Three-strategy collective-decision dynamics: simulation and stability analysis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write its artifacts
    Simulate {
        /// Path to the scenario JSON
        scenario: PathBuf,
        /// Output directory (overridden by SWARM_OUT)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Closed-form equilibria with classifications for given parameters
    Equilibria {
        /// Inline JSON, or @file, with either the eight-field or the
        /// asymmetric {gamma1, gamma2, sigma} parameter object
        #[arg(long)]
        params: String,
    },
    /// Consensus threshold of the symmetric game
    Threshold {
        #[arg(long)]
        params: String,
        /// Also locate the threshold empirically by bifurcation bisection
        #[arg(long)]
        empirical: bool,
    },
    /// Strict positive-realness and Lyapunov certificate of the sector loop
    SprCheck {
        /// Eight-field symmetric parameter JSON (inline or @file)
        #[arg(long)]
        params: String,
        /// Sector upper bound k_tilde
        #[arg(long)]
        sector: f64,
        /// Linearization coordinate; defaults to the symmetric equilibrium
        /// at the sigma carried by the parameters
        #[arg(long)]
        x: Option<f64>,
        /// Fixed epsilon for the certificate solve (default: 1e-3 with
        /// geometric back-off)
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run every scenario JSON in a directory
    Sweep {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    if let Ok(env) = std::env::var("SWARM_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    flag.unwrap_or_else(|| PathBuf::from("swarm_out"))
}

/// `--params` accepts inline JSON or `@path/to/file.json`.
fn read_params_arg(arg: &str) -> CliResult<String> {
    if let Some(path) = arg.strip_prefix('@') {
        return std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {path}: {e}")));
    }
    Ok(arg.to_string())
}

fn parse_full(text: &str) -> CliResult<ModelParams> {
    let dto: FullParamsDto = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("params: {e}")))?;
    dto.to_model_params()
}

fn equilibria_json(text: &str) -> CliResult<String> {
    // eight-field symmetric first, asymmetric shape second
    if let Ok(p) = parse_full(text) {
        if !p.is_symmetric() {
            return Err(CliError::validation(
                "params: closed-form equilibria need symmetric parameters \
                 (or the asymmetric {gamma1, gamma2, sigma} form)",
            ));
        }
        let set = equilibria(&p)?;
        let reports: Vec<EquilibriumReport> = set
            .points
            .iter()
            .map(|e| {
                let classified = if e.feasible && (e.point[0] - e.point[1]).abs() <= 1e-9 {
                    SimplexState::new(e.point[0], e.point[1], e.point[2])
                        .ok()
                        .and_then(|s| classify(&p, &s).ok())
                } else {
                    None
                };
                EquilibriumReport {
                    case: match e.case {
                        EquilibriumCase::Case1 => "case1",
                        EquilibriumCase::Case1Aux => "case1_aux",
                        EquilibriumCase::Case2Plus => "case2_plus",
                        EquilibriumCase::Case2Minus => "case2_minus",
                        EquilibriumCase::Case3 => "case3",
                    }
                    .to_string(),
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
                }
            })
            .collect();
        return Ok(serde_json::to_string_pretty(&reports).unwrap());
    }
    let dto: AsymParamsDto = serde_json::from_str(text).map_err(|e| {
        CliError::validation(format!(
            "params: neither the eight-field nor the asymmetric form parsed: {e}"
        ))
    })?;
    let p = dto.to_asym_params()?;
    let eqs = asym_equilibria(&p)?;
    let reports: Vec<EquilibriumReport> = eqs
        .iter()
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
        .collect();
    Ok(serde_json::to_string_pretty(&reports).unwrap())
}

fn threshold_json(text: &str, empirical: bool) -> CliResult<String> {
    let p = parse_full(text)?;
    if !p.is_symmetric() {
        return Err(CliError::validation(
            "params: the threshold is defined for symmetric parameters",
        ));
    }
    let formula = consensus_threshold(&p)?;
    let mut out = serde_json::json!({ "formula": formula });
    if empirical {
        let emp = swarm_cli::empirical::empirical_consensus_threshold(&p, 1e-3)?;
        out["empirical"] = serde_json::json!(emp);
        if formula > 0.0 {
            out["relative_gap"] = serde_json::json!((emp - formula).abs() / formula);
        }
    }
    Ok(serde_json::to_string_pretty(&out).unwrap())
}

fn spr_check_json(text: &str, sector: f64, x: Option<f64>, epsilon: Option<f64>) -> CliResult<String> {
    let p = parse_full(text)?;
    if !p.is_symmetric() {
        return Err(CliError::validation(
            "params: the sector analysis needs symmetric parameters",
        ));
    }
    let bound =
        SectorBound::new(sector).map_err(|e| CliError::validation(format!("sector: {e}")))?;
    let x_lin = match x {
        Some(x) => x,
        None => {
            let (r, sigma, alpha, gamma) = p.symmetric_rates().map_err(CliError::from)?;
            let sp = SectorParams::new(r, alpha, gamma).map_err(CliError::from)?;
            symmetric_equilibrium_coordinate(&sp, sigma)?
        }
    };
    let (block, _) = spr_block(&p, x_lin, &bound, epsilon)?;
    Ok(serde_json::to_string_pretty(&block).unwrap())
}

fn sweep(dir: &Path, out_root: &Path) -> CliResult<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(CliError::validation(format!(
            "no scenario files in {}",
            dir.display()
        )));
    }
    let mut first_failure: Option<CliError> = None;
    for path in entries {
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        let out_dir = out_root.join(&stem);
        match run(&path, &out_dir) {
            Ok(outcome) => {
                println!(
                    "{}: ok ({} files into {})",
                    stem,
                    outcome.written.len(),
                    out_dir.display()
                );
            }
            Err(e) => {
                eprintln!("{stem}: FAILED: {e}");
                if first_failure.is_none() {
                    first_failure = Some(e);
                }
            }
        }
    }
    match first_failure {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn dispatch(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Simulate { scenario, out_dir } => {
            let out = resolve_out_dir(out_dir);
            let outcome = run(&scenario, &out)?;
            for path in &outcome.written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Cmd::Equilibria { params } => {
            let text = read_params_arg(&params)?;
            println!("{}", equilibria_json(&text)?);
            Ok(())
        }
        Cmd::Threshold { params, empirical } => {
            let text = read_params_arg(&params)?;
            println!("{}", threshold_json(&text, empirical)?);
            Ok(())
        }
        Cmd::SprCheck {
            params,
            sector,
            x,
            epsilon,
        } => {
            let text = read_params_arg(&params)?;
            println!("{}", spr_check_json(&text, sector, x, epsilon)?);
            Ok(())
        }
        Cmd::Sweep { dir, out_dir } => sweep(&dir, &resolve_out_dir(out_dir)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("swarm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
