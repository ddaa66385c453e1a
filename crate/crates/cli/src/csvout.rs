//! Deterministic CSV emission: fixed 12-significant-digit decimal
//! formatting, comma separator, `\n` line endings.

use std::fmt::Write as _;

/// Render with exactly 12 significant digits in plain decimal notation.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// One trajectory row: `t,k,x1,x2,x3,theta1,theta2`, with empty cells for
/// the fields a row does not carry (k for global and macro rows, the theta
/// pair for micro rows).
pub struct TrajectoryRow {
    pub t: f64,
    pub class: Option<u32>,
    pub state: Option<[f64; 3]>,
    pub theta: Option<(f64, f64)>,
}

pub const TRAJECTORY_HEADER: &str = "t,k,x1,x2,x3,theta1,theta2";

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_sig12(row.t));
        out.push(',');
        if let Some(k) = row.class {
            let _ = write!(out, "{k}");
        }
        for i in 0..3 {
            out.push(',');
            if let Some(s) = row.state {
                out.push_str(&fmt_sig12(s[i]));
            }
        }
        for i in 0..2 {
            out.push(',');
            if let Some((t1, t2)) = row.theta {
                out.push_str(&fmt_sig12(if i == 0 { t1 } else { t2 }));
            }
        }
        out.push('\n');
    }
    out
}

pub const BARYCENTRIC_HEADER: &str = "t,k,u,v";

pub struct BarycentricRow {
    pub t: f64,
    pub class: Option<u32>,
    pub u: f64,
    pub v: f64,
}

pub fn barycentric_csv(rows: &[BarycentricRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(BARYCENTRIC_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_sig12(row.t));
        out.push(',');
        if let Some(k) = row.class {
            let _ = write!(out, "{k}");
        }
        out.push(',');
        out.push_str(&fmt_sig12(row.u));
        out.push(',');
        out.push_str(&fmt_sig12(row.v));
        out.push('\n');
    }
    out
}
