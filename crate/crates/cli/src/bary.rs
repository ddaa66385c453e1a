//! Planar embedding of the simplex for ternary trajectory plots.

use swarm_core::SimplexState;

/// Barycentric plot coordinates: strategy 1 at the origin, strategy 2 at
/// (1, 0), the uncommitted state at (1/2, sqrt(3)/2).
pub fn to_barycentric(x: &SimplexState) -> (f64, f64) {
    let u = x.x2() + x.x3() / 2.0;
    let v = 3f64.sqrt() / 2.0 * x.x3();
    (u, v)
}

/// Same map on raw committed shares with x3 = 1 - x1 - x2.
pub fn to_barycentric_raw(x1: f64, x2: f64) -> (f64, f64) {
    let x3 = 1.0 - x1 - x2;
    (x2 + x3 / 2.0, 3f64.sqrt() / 2.0 * x3)
}
