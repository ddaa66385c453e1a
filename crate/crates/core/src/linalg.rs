//! Small fixed-size linear algebra: 2x2 matrices, stable quadratics, and a
//! pivoted 3x3 solve for the Newton step in the certificate search.

use crate::math;

/// Row-major 2x2 real matrix.
pub type Mat2 = [[f64; 2]; 2];

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mat2_scale(a: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat2_vec(a: &Mat2, v: &[f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn trace2(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_inf_norm(a: &Mat2) -> f64 {
    math::fmax(
        math::fmax(math::abs(a[0][0]), math::abs(a[0][1])),
        math::fmax(math::abs(a[1][0]), math::abs(a[1][1])),
    )
}

pub fn mat2_frobenius(a: &Mat2) -> f64 {
    math::sqrt(
        a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1],
    )
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending. Always real.
///
/// The off-diagonal entries are averaged, so a slightly asymmetric input is
/// treated as its symmetric part.
pub fn sym_eigenvalues(a: &Mat2) -> (f64, f64) {
    let mean = 0.5 * (a[0][0] + a[1][1]);
    let d = 0.5 * (a[0][0] - a[1][1]);
    let off = 0.5 * (a[0][1] + a[1][0]);
    let r = math::sqrt(d * d + off * off);
    (mean - r, mean + r)
}

/// Roots of x^2 + b x + c, computed without cancellation.
///
/// Returns `None` when the discriminant is negative. Ordered ascending.
pub fn quadratic_roots_monic(b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return None;
    }
    let sq = math::sqrt(disc);
    // r1 has the larger magnitude; r2 = c / r1 avoids subtracting nearby values.
    let r1 = if b >= 0.0 {
        (-b - sq) / 2.0
    } else {
        (-b + sq) / 2.0
    };
    if r1 == 0.0 {
        // b = c = 0
        return Some((0.0, 0.0));
    }
    let r2 = c / r1;
    if r1 <= r2 {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

/// Solve a 3x3 linear system with partial pivoting. `None` when singular.
#[allow(clippy::needless_range_loop)]
pub fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let mut pivot = col;
        for row in (col + 1)..3 {
            if math::abs(m[row][col]) > math::abs(m[pivot][col]) {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut s = rhs[col];
        for k in (col + 1)..3 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}
