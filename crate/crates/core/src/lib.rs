//! Deterministic simulation and stability analysis for a three-strategy
//! collective-decision game: two equally favorable options plus an
//! uncommitted state, recruitment proportional to popularity, and
//! cross-inhibitory signals between the committed camps.
//!
//! The crate covers the unstructured (well-mixed) population, degree-
//! heterogeneous networks at the mean-field level, the one-directional
//! (SIR-like) variant, and absolute stability of the loop under an
//! uncertain, time-varying cross-inhibition strength. Everything is pure
//! and deterministic; `std` is optional and only gates `std::error::Error`.
//!
//! Module map:
//! - [`game`]: payoff matrix, revision protocol, transition rates, full
//!   mean dynamics on the simplex.
//! - [`unstructured`]: the reduced planar system, closed-form equilibria,
//!   the consensus threshold, Jacobian classification.
//! - [`network`]: degree distributions, moments, link-weighted aggregates.
//! - [`structured`]: per-class dynamics, frozen-theta mean-field response,
//!   macroscopic model, structured threshold, micro-macro simulation.
//! - [`asymmetric`]: one-directional cross-inhibition and its second-order
//!   mass-spring-damper form.
//! - [`robustness`]: transfer matrices, strict positive-realness, Lyapunov
//!   certificates, sector-bounded simulation.
//! - [`engine`]: integrators, settling detection, bifurcation bisection.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod asymmetric;
pub mod engine;
pub mod error;
pub mod game;
pub mod linalg;
mod math;
pub mod network;
pub mod robustness;
pub mod structured;
pub mod unstructured;

pub use error::{Error, Result};
pub use game::{ModelParams, PayoffMatrix, RateMatrix, SimplexState};
pub use network::{ClassState, DegreeDistribution};
pub use unstructured::{Classification, StabilityReport};
