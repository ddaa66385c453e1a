//! Construction of sector signals from their scenario description. All
//! randomness flows through the scenario seed, so a scenario plus seed is
//! fully reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::scenario::SignalSpec;

/// Materialize a signal over the given horizon.
pub fn build_signal(
    spec: &SignalSpec,
    k_tilde: f64,
    horizon: f64,
    seed: u64,
) -> CliResult<Box<dyn Fn(f64) -> f64>> {
    match spec {
        SignalSpec::Constant { value } => {
            let v = *value;
            if !(0.0..=k_tilde).contains(&v) {
                return Err(CliError::validation(format!(
                    "/sector/signal/value: {v} outside [0, {k_tilde}]"
                )));
            }
            Ok(Box::new(move |_| v))
        }
        SignalSpec::Sine => Ok(Box::new(move |t: f64| k_tilde * (1.0 + t.sin()) / 2.0)),
        SignalSpec::Switching { period } => {
            let period = *period;
            if !(period.is_finite() && period > 0.0) {
                return Err(CliError::validation(format!(
                    "/sector/signal/period: must be positive, got {period}"
                )));
            }
            let n = (horizon / period).ceil() as usize + 2;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let levels: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * k_tilde).collect();
            Ok(Box::new(move |t: f64| {
                let idx = ((t / period) as usize).min(levels.len() - 1);
                levels[idx]
            }))
        }
    }
}
