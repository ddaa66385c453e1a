//! Scenario-driven front end for the swarm collective-decision toolkit:
//! parse a JSON scenario, run the requested analysis or simulation, and emit
//! deterministic CSV/JSON artifacts including barycentric plot coordinates.

pub mod bary;
pub mod csvout;
pub mod empirical;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod signals;

pub use error::{CliError, CliResult};
pub use run::{run, run_scenario, RunOutcome};
