//! Absolute stability under an uncertain, time-varying cross-inhibition
//! strength confined to a sector [0, k_tilde]: linearization of the
//! sigma-free part, Hurwitz tests, the loop transfer matrix Z(s), strict
//! positive-realness checks on a frequency grid, the scalar positive-real
//! check for the asymmetric loop, a quadratic Lyapunov certificate obtained
//! by a damped Newton solve of the coupling equations, and simulation of the
//! nonlinear system with sector-bounded sigma(t).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::asymmetric::AsymParams;
use crate::engine::{self, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::game::ModelParams;
use crate::linalg::{self, Mat2};
use crate::math;
use crate::unstructured;

/// Sector bound for the time-varying cross-inhibition strength: sigma(t)
/// must stay in [0, k_tilde].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBound {
    k_tilde: f64,
}

impl SectorBound {
    pub fn new(k_tilde: f64) -> Result<Self> {
        if !k_tilde.is_finite() {
            return Err(Error::NonFinite { what: "k_tilde" });
        }
        if k_tilde <= 0.0 {
            return Err(Error::OutOfRange {
                what: "k_tilde",
                value: k_tilde,
            });
        }
        Ok(Self { k_tilde })
    }

    pub fn k_tilde(&self) -> f64 {
        self.k_tilde
    }
}

/// Real polynomial, ascending coefficients, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if !math::all_finite(coeffs) {
            return Err(Error::NonFinite {
                what: "polynomial coefficient",
            });
        }
        let mut c = coeffs.to_vec();
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Ok(Self { coeffs: c })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the trimmed polynomial; zero for constants and the zero
    /// polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Roots for degrees zero through two.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        match self.coeffs.len() {
            0 | 1 => Ok(Vec::new()),
            2 => Ok(alloc::vec![Complex64::new(
                -self.coeffs[0] / self.coeffs[1],
                0.0
            )]),
            3 => {
                let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
                let disc = b * b - 4.0 * a * c;
                if disc >= 0.0 {
                    let (lo, hi) = linalg::quadratic_roots_monic(b / a, c / a)
                        .expect("non-negative discriminant");
                    Ok(alloc::vec![
                        Complex64::new(lo, 0.0),
                        Complex64::new(hi, 0.0)
                    ])
                } else {
                    let re = -b / (2.0 * a);
                    let im = math::sqrt(-disc) / (2.0 * a);
                    Ok(alloc::vec![
                        Complex64::new(re, -math::abs(im)),
                        Complex64::new(re, math::abs(im))
                    ])
                }
            }
            n => Err(Error::PolynomialDegree { degree: n - 1 }),
        }
    }
}

/// Ratio of two real polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Poly::new(num)?, Poly::new(den)?)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        self.den.roots()
    }

    /// Limit for |s| -> infinity; `None` when the function is improper.
    pub fn limit_at_infinity(&self) -> Option<f64> {
        if self.num.is_zero() {
            return Some(0.0);
        }
        match self.num.degree().cmp(&self.den.degree()) {
            core::cmp::Ordering::Less => Some(0.0),
            core::cmp::Ordering::Equal => Some(self.num.leading() / self.den.leading()),
            core::cmp::Ordering::Greater => None,
        }
    }
}

/// A 1x1 or 2x2 rational matrix in the Laplace variable.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalTransfer {
    Scalar(RationalFn),
    TwoByTwo([[RationalFn; 2]; 2]),
}

impl RationalTransfer {
    pub fn dim(&self) -> usize {
        match self {
            RationalTransfer::Scalar(_) => 1,
            RationalTransfer::TwoByTwo(_) => 2,
        }
    }

    pub fn entries(&self) -> Vec<&RationalFn> {
        match self {
            RationalTransfer::Scalar(f) => alloc::vec![f],
            RationalTransfer::TwoByTwo(m) => {
                alloc::vec![&m[0][0], &m[0][1], &m[1][0], &m[1][1]]
            }
        }
    }

    /// Poles of all entries, concatenated.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::new();
        for f in self.entries() {
            out.extend(f.poles()?);
        }
        Ok(out)
    }

    pub fn eval_scalar(&self, s: Complex64) -> Result<Complex64> {
        match self {
            RationalTransfer::Scalar(f) => Ok(f.eval(s)),
            RationalTransfer::TwoByTwo(_) => Err(Error::NotScalar),
        }
    }

    pub fn eval2(&self, s: Complex64) -> Result<[[Complex64; 2]; 2]> {
        match self {
            RationalTransfer::TwoByTwo(m) => Ok([
                [m[0][0].eval(s), m[0][1].eval(s)],
                [m[1][0].eval(s), m[1][1].eval(s)],
            ]),
            RationalTransfer::Scalar(_) => Err(Error::NotScalar),
        }
    }
}

/// Linearization of the sigma-free recruitment/abandonment flow around a
/// symmetric point x1 = x2 = x. The cross-inhibition term is deliberately
/// excluded: it is the feedback nonlinearity the sector analysis isolates.
pub fn linearized_a(p: &ModelParams, x: f64) -> Result<Mat2> {
    let (r, _, alpha, gamma) = p.symmetric_rates()?;
    if !(0.0..=0.5).contains(&x) {
        return Err(Error::OutOfRange { what: "x", value: x });
    }
    let diag = r - 3.0 * r * x - gamma - alpha;
    let off = -r * x - gamma;
    Ok([[diag, off], [off, diag]])
}

/// Trace/determinant Hurwitz test for a 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzReport {
    pub trace: f64,
    pub determinant: f64,
    pub is_hurwitz: bool,
}

pub fn hurwitz_check(m: &Mat2) -> HurwitzReport {
    let trace = linalg::trace2(m);
    let determinant = linalg::det2(m);
    HurwitzReport {
        trace,
        determinant,
        is_hurwitz: trace < 0.0 && determinant > 0.0,
    }
}

/// Margin of the linearized Hurwitz condition, 2 r x + alpha - r: the
/// linearization is Hurwitz exactly when this is positive.
pub fn linearized_hurwitz_margin(p: &ModelParams, x: f64) -> Result<f64> {
    let (r, _, alpha, _) = p.symmetric_rates()?;
    if !(0.0..=0.5).contains(&x) {
        return Err(Error::OutOfRange { what: "x", value: x });
    }
    Ok(2.0 * r * x + alpha - r)
}

/// Loop transfer matrix Z(s) = I + K (sI - A)^-1 with K = k_tilde * ones:
/// diagonal (s + zeta + k_tilde)/(s + zeta), off-diagonal k_tilde/(s + zeta),
/// zeta = 4 r x + 2 gamma + alpha - r. Requires the linearization Hurwitz.
pub fn z_of_s(p: &ModelParams, x: f64, sector: &SectorBound) -> Result<RationalTransfer> {
    let a = linearized_a(p, x)?;
    let report = hurwitz_check(&a);
    if !report.is_hurwitz {
        return Err(Error::NotHurwitz {
            trace: report.trace,
            determinant: report.determinant,
        });
    }
    let (r, _, alpha, gamma) = p.symmetric_rates()?;
    let zeta = 4.0 * r * x + 2.0 * gamma + alpha - r;
    let k = sector.k_tilde();
    let diag = || RationalFn::from_coeffs(&[zeta + k, 1.0], &[zeta, 1.0]);
    let off = || RationalFn::from_coeffs(&[k], &[zeta, 1.0]);
    Ok(RationalTransfer::TwoByTwo([
        [diag()?, off()?],
        [off()?, diag()?],
    ]))
}

/// Default frequency grid: 400 log-spaced points in [1e-3, 1e3].
pub fn default_omega_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 400)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (libm::log10(lo), libm::log10(hi));
    (0..n)
        .map(|i| math::powf(10.0, llo + (lhi - llo) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Smallest eigenvalue of Z(jw) + Z(jw)^H.
fn hermitian_part_min_eig(z: &RationalTransfer, omega: f64) -> Result<f64> {
    let s = Complex64::new(0.0, omega);
    match z {
        RationalTransfer::Scalar(f) => Ok(2.0 * f.eval(s).re),
        RationalTransfer::TwoByTwo(_) => {
            let m = z.eval2(s)?;
            let h11 = 2.0 * m[0][0].re;
            let h22 = 2.0 * m[1][1].re;
            let h12 = m[0][1] + m[1][0].conj();
            let mean = 0.5 * (h11 + h22);
            let d = 0.5 * (h11 - h22);
            Ok(mean - math::sqrt(d * d + h12.norm_sqr()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SprVerdict {
    StrictlyPositiveReal,
    /// A pole with non-negative real part.
    NotHurwitz,
    /// The hermitian part loses definiteness on the imaginary axis.
    IndefiniteOnAxis,
    /// Z at infinity is not positive definite.
    LimitNotPositive,
    /// Margin within 1e-9 of zero: too close to call.
    Inconclusive,
}

/// Outcome of [`spr_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SprReport {
    pub poles: Vec<Complex64>,
    pub poles_hurwitz: bool,
    /// Smallest eigenvalue of the hermitian part over the (refined) grid.
    pub min_eig_margin: f64,
    /// Frequency attaining the margin.
    pub worst_omega: f64,
    pub z_inf_positive: bool,
    pub verdict: SprVerdict,
}

const SPR_BAND: f64 = 1e-9;

/// Strict positive-realness on a frequency grid: Hurwitz poles, positive
/// definite hermitian part along the axis (grid minimum plus a golden-section
/// refinement around the worst point), and a positive definite limit at
/// infinity.
pub fn spr_check(z: &RationalTransfer, omega_grid: &[f64]) -> Result<SprReport> {
    if omega_grid.is_empty() || omega_grid.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::BadFrequencyGrid);
    }
    let mut grid = omega_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let poles = z.poles()?;
    let poles_hurwitz = poles.iter().all(|p| p.re < 0.0);

    let mut min_eig = f64::INFINITY;
    let mut worst_idx = 0;
    for (i, &w) in grid.iter().enumerate() {
        let e = hermitian_part_min_eig(z, w)?;
        if e < min_eig {
            min_eig = e;
            worst_idx = i;
        }
    }
    let mut worst_omega = grid[worst_idx];
    // local refinement around the worst grid point
    let lo = if worst_idx == 0 {
        grid[0] * 0.5
    } else {
        grid[worst_idx - 1]
    };
    let hi = if worst_idx + 1 == grid.len() {
        grid[worst_idx] * 2.0
    } else {
        grid[worst_idx + 1]
    };
    let (w_ref, e_ref) = golden_min(|w| hermitian_part_min_eig(z, w).unwrap_or(f64::INFINITY), lo, hi);
    if e_ref < min_eig {
        min_eig = e_ref;
        worst_omega = w_ref;
    }

    let z_inf_positive = limit_positive_definite(z)?;

    let verdict = if !poles_hurwitz {
        SprVerdict::NotHurwitz
    } else if !z_inf_positive {
        SprVerdict::LimitNotPositive
    } else if min_eig > SPR_BAND {
        SprVerdict::StrictlyPositiveReal
    } else if min_eig < -SPR_BAND {
        SprVerdict::IndefiniteOnAxis
    } else {
        SprVerdict::Inconclusive
    };
    Ok(SprReport {
        poles,
        poles_hurwitz,
        min_eig_margin: min_eig,
        worst_omega,
        z_inf_positive,
        verdict,
    })
}

fn limit_positive_definite(z: &RationalTransfer) -> Result<bool> {
    match z {
        RationalTransfer::Scalar(f) => Ok(f.limit_at_infinity().is_some_and(|v| v > 0.0)),
        RationalTransfer::TwoByTwo(m) => {
            let mut lim = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    match m[i][j].limit_at_infinity() {
                        Some(v) => lim[i][j] = v,
                        None => return Ok(false),
                    }
                }
            }
            let h = linalg::mat2_add(&lim, &linalg::mat2_transpose(&lim));
            Ok(h[0][0] > 0.0 && linalg::det2(&h) > 0.0)
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Scalar loop transfer function of the asymmetric model with the constant
/// input dropped: (s + gamma1) sigma / (s (s + gamma1 + gamma2)).
pub fn asym_transfer(p: &AsymParams) -> Result<RationalTransfer> {
    p.validate()?;
    let g = p.gamma1 + p.gamma2;
    if g <= 0.0 {
        return Err(Error::ZeroRate {
            what: "gamma1 + gamma2",
        });
    }
    let f = RationalFn::from_coeffs(&[p.sigma * p.gamma1, p.sigma], &[0.0, g, 1.0])?;
    Ok(RationalTransfer::Scalar(f))
}

/// Outcome of [`positive_real_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveRealReport {
    pub poles: Vec<Complex64>,
    /// Condition (1): no poles in the open right half-plane.
    pub no_rhp_poles: bool,
    /// Poles sitting on the imaginary axis (allowed, reported).
    pub axis_poles: Vec<Complex64>,
    /// Condition (2): worst real part of G(jw) over the grid.
    pub worst_re: f64,
    pub worst_omega: f64,
    /// Grid points skipped because they collide with a pole.
    pub skipped_omegas: Vec<f64>,
    pub positive_real: bool,
}

const AXIS_TOL: f64 = 1e-12;
const POLE_COLLISION_TOL: f64 = 1e-9;
const PR_RE_TOL: f64 = -1e-12;

/// Positive-realness of a scalar transfer function: no open-right-half-plane
/// poles and Re G(jw) >= -1e-12 over the grid, pole collisions skipped.
pub fn positive_real_check(
    g: &RationalTransfer,
    omega_grid: &[f64],
) -> Result<PositiveRealReport> {
    let f = match g {
        RationalTransfer::Scalar(f) => f,
        RationalTransfer::TwoByTwo(_) => return Err(Error::NotScalar),
    };
    if omega_grid.is_empty() || omega_grid.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::BadFrequencyGrid);
    }
    let poles = f.poles()?;
    let no_rhp_poles = poles.iter().all(|p| p.re <= AXIS_TOL);
    let axis_poles: Vec<Complex64> = poles
        .iter()
        .copied()
        .filter(|p| math::abs(p.re) <= AXIS_TOL)
        .collect();

    let mut worst_re = f64::INFINITY;
    let mut worst_omega = 0.0;
    let mut skipped = Vec::new();
    for &w in omega_grid {
        let s = Complex64::new(0.0, w);
        if poles.iter().any(|p| (s - p).norm() < POLE_COLLISION_TOL) {
            skipped.push(w);
            continue;
        }
        let re = f.eval(s).re;
        if re < worst_re {
            worst_re = re;
            worst_omega = w;
        }
    }
    let positive_real = no_rhp_poles && worst_re >= PR_RE_TOL;
    Ok(PositiveRealReport {
        poles,
        no_rhp_poles,
        axis_poles,
        worst_re,
        worst_omega,
        skipped_omegas: skipped,
        positive_real,
    })
}

/// Quadratic Lyapunov certificate for the sector-bounded loop: a positive
/// definite P and the coupling matrix L satisfying
/// 2AP + eps P + L^T L = 0 and K - P = sqrt(2) L^T with K = k_tilde * ones.
#[derive(Debug, Clone, PartialEq)]
pub struct KypCertificate {
    pub p_matrix: Mat2,
    pub l_matrix: Mat2,
    pub epsilon: f64,
    /// Max-norm residuals of the two defining equations, re-evaluated
    /// independently of the solver.
    pub residuals: [f64; 2],
}

const KYP_RESIDUAL_TOL: f64 = 1e-8;

fn kyp_f(a: &Mat2, k: &Mat2, eps: f64, p: &Mat2) -> Mat2 {
    // symmetrized form A P + P A + eps P + (K - P)^2 / 2
    let ap = linalg::mat2_mul(a, p);
    let pa = linalg::mat2_mul(p, a);
    let kp = linalg::mat2_sub(k, p);
    let quad = linalg::mat2_scale(&linalg::mat2_mul(&kp, &kp), 0.5);
    let mut f = linalg::mat2_add(&linalg::mat2_add(&ap, &pa), &quad);
    f[0][0] += eps * p[0][0];
    f[0][1] += eps * p[0][1];
    f[1][0] += eps * p[1][0];
    f[1][1] += eps * p[1][1];
    // exact symmetry for the Newton system
    let off = 0.5 * (f[0][1] + f[1][0]);
    f[0][1] = off;
    f[1][0] = off;
    f
}

fn kyp_jacobian_apply(a: &Mat2, k: &Mat2, eps: f64, p: &Mat2, h: &Mat2) -> Mat2 {
    // directional derivative: A H + H A + eps H - ((K-P) H + H (K-P)) / 2
    let ah = linalg::mat2_mul(a, h);
    let ha = linalg::mat2_mul(h, a);
    let kp = linalg::mat2_sub(k, p);
    let mix = linalg::mat2_scale(
        &linalg::mat2_add(&linalg::mat2_mul(&kp, h), &linalg::mat2_mul(h, &kp)),
        0.5,
    );
    let mut j = linalg::mat2_sub(&linalg::mat2_add(&ah, &ha), &mix);
    j[0][0] += eps * h[0][0];
    j[0][1] += eps * h[0][1];
    j[1][0] += eps * h[1][0];
    j[1][1] += eps * h[1][1];
    j
}

fn newton_kyp(a: &Mat2, k: &Mat2, eps: f64, p0: &Mat2) -> (Mat2, f64, usize) {
    const BASIS: [Mat2; 3] = [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, 0.0], [0.0, 1.0]],
    ];
    let mut p = *p0;
    let mut res = linalg::mat2_inf_norm(&kyp_f(a, k, eps, &p));
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        if res <= 1e-13 {
            break;
        }
        let f = kyp_f(a, k, eps, &p);
        let rhs = [-f[0][0], -f[0][1], -f[1][1]];
        let mut jt = [[0.0; 3]; 3];
        for (col, h) in BASIS.iter().enumerate() {
            let jh = kyp_jacobian_apply(a, k, eps, &p, h);
            jt[0][col] = jh[0][0];
            jt[1][col] = 0.5 * (jh[0][1] + jh[1][0]);
            jt[2][col] = jh[1][1];
        }
        let Some(step) = linalg::solve3(&jt, &rhs) else {
            break;
        };
        let delta = [[step[0], step[1]], [step[1], step[2]]];
        // backtracking on the residual norm
        let mut t = 1.0;
        let mut advanced = false;
        while t > 1e-12 {
            let trial = linalg::mat2_add(&p, &linalg::mat2_scale(&delta, t));
            let r_trial = linalg::mat2_inf_norm(&kyp_f(a, k, eps, &trial));
            if r_trial < res * (1.0 - 1e-4 * t) {
                p = trial;
                res = r_trial;
                advanced = true;
                break;
            }
            t *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    (p, res, iterations)
}

/// Solve the certificate equations for symmetric Hurwitz `a` by damped
/// Newton iteration. Starts from the identity; if that basin yields a
/// singular or indefinite P, retries once from a scaled identity seeded
/// above both quadratic branches.
pub fn kyp_solve(a: &Mat2, sector: &SectorBound, epsilon: f64) -> Result<KypCertificate> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::OutOfRange {
            what: "epsilon",
            value: epsilon,
        });
    }
    let scale = linalg::mat2_inf_norm(a);
    if math::abs(a[0][1] - a[1][0]) > 1e-12 * math::fmax(scale, 1.0) {
        return Err(Error::OutOfRange {
            what: "a (must be symmetric)",
            value: a[0][1] - a[1][0],
        });
    }
    let hw = hurwitz_check(a);
    if !hw.is_hurwitz {
        return Err(Error::NotHurwitz {
            trace: hw.trace,
            determinant: hw.determinant,
        });
    }
    let kt = sector.k_tilde();
    let k = [[kt, kt], [kt, kt]];

    let high_seed = 1.0 + 2.0 * (2.0 * kt + 2.0 * linalg::mat2_frobenius(a) + epsilon);
    let seeds = [
        [[1.0, 0.0], [0.0, 1.0]],
        [[high_seed, 0.0], [0.0, high_seed]],
    ];
    let mut last_res = f64::INFINITY;
    let mut last_iters = 0;
    for seed in seeds {
        let (p, res, iters) = newton_kyp(a, &k, epsilon, &seed);
        last_res = res;
        last_iters = iters;
        if !(p[0][0] > 0.0 && linalg::det2(&p) > 0.0) {
            continue;
        }
        let l = linalg::mat2_scale(&linalg::mat2_sub(&k, &p), 1.0 / math::sqrt(2.0));
        // independent residuals of the literal defining equations
        let two_ap = linalg::mat2_scale(&linalg::mat2_mul(a, &p), 2.0);
        let ltl = linalg::mat2_mul(&linalg::mat2_transpose(&l), &l);
        let mut eq1 = linalg::mat2_add(&two_ap, &ltl);
        eq1[0][0] += epsilon * p[0][0];
        eq1[0][1] += epsilon * p[0][1];
        eq1[1][0] += epsilon * p[1][0];
        eq1[1][1] += epsilon * p[1][1];
        let eq2 = linalg::mat2_sub(
            &linalg::mat2_sub(&k, &p),
            &linalg::mat2_scale(&linalg::mat2_transpose(&l), math::sqrt(2.0)),
        );
        let residuals = [linalg::mat2_inf_norm(&eq1), linalg::mat2_inf_norm(&eq2)];
        if residuals[0] < KYP_RESIDUAL_TOL && residuals[1] < KYP_RESIDUAL_TOL {
            return Ok(KypCertificate {
                p_matrix: p,
                l_matrix: l,
                epsilon,
                residuals,
            });
        }
    }
    Err(Error::NoCertificate {
        iterations: last_iters,
        residual: last_res,
    })
}

/// [`kyp_solve`] with the default epsilon 1e-3 and a geometric back-off
/// (three retries at a tenth each) when no certificate is found.
pub fn kyp_solve_auto(a: &Mat2, sector: &SectorBound) -> Result<KypCertificate> {
    let mut eps = 1e-3;
    let mut last = None;
    for _ in 0..4 {
        match kyp_solve(a, sector, eps) {
            Ok(cert) => return Ok(cert),
            Err(e) => last = Some(e),
        }
        eps /= 10.0;
    }
    Err(last.unwrap())
}

/// Rates of the sector-simulated system: the symmetric game without its
/// cross-inhibition strength, which the signal supplies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorParams {
    pub r: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl SectorParams {
    pub fn new(r: f64, alpha: f64, gamma: f64) -> Result<Self> {
        for (what, v) in [("r", r), ("alpha", alpha), ("gamma", gamma)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
            if v < 0.0 {
                return Err(Error::NegativeParam { what, value: v });
            }
        }
        Ok(Self { r, alpha, gamma })
    }

    pub fn to_model_params(&self, sigma: f64) -> Result<ModelParams> {
        ModelParams::symmetric(self.r, sigma, self.alpha, self.gamma)
    }
}

/// The analyzed planar flow with the abandonment rate on the cross terms,
/// sigma supplied externally. On the diagonal it coincides with the
/// standard reduced system.
#[inline]
pub fn sector_rhs_raw(p: &SectorParams, sigma: f64, x1: f64, x2: f64) -> (f64, f64) {
    let x3 = 1.0 - x1 - x2;
    (
        x3 * (p.r * x1 + p.gamma) - x2 * (sigma * x1 + p.alpha),
        x3 * (p.r * x2 + p.gamma) - x1 * (sigma * x2 + p.alpha),
    )
}

/// Diagonal coordinate of the symmetric equilibrium of the sector system at
/// a frozen sigma (identical to the principal family-1 coordinate).
pub fn symmetric_equilibrium_coordinate(p: &SectorParams, sigma: f64) -> Result<f64> {
    unstructured::case1_coordinate(&p.to_model_params(sigma)?)
}

/// Quadratic form used to track the Lyapunov envelope along a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSpec {
    pub p_matrix: Mat2,
    /// Deviations are measured from this point (the linearization point).
    pub center: (f64, f64),
}

/// Outcome of [`simulate_sector`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSimulation {
    pub trajectory: Trajectory,
    /// Max-norm of (x1, x2, x3) over the recorded states.
    pub sup_norm: f64,
    /// Smallest simplex coordinate seen along the recording.
    pub min_simplex_coord: f64,
    pub final_state: (f64, f64),
    /// Max-norm of the vector field at the final state.
    pub final_rhs_inf: f64,
    /// x^T P x at every recorded state, when a quadratic form was supplied.
    pub lyapunov: Option<Vec<f64>>,
}

/// Integrate the sector system with a time-varying sigma(t).
///
/// The signal is sampled over the horizon first and rejected if it leaves
/// [0, k_tilde]. Statistics and the Lyapunov series are computed over the
/// recorded states.
pub fn simulate_sector<F>(
    p: &SectorParams,
    sector: &SectorBound,
    sigma: F,
    x0: (f64, f64),
    cfg: &IntegratorConfig,
    lyapunov: Option<&LyapunovSpec>,
) -> Result<SectorSimulation>
where
    F: Fn(f64) -> f64,
{
    p.validate_for_simulation()?;
    let kt = sector.k_tilde();
    let samples = 1000usize;
    for i in 0..=samples {
        let t = cfg.horizon * i as f64 / samples as f64;
        let v = sigma(t);
        if !v.is_finite() || v < -1e-12 || v > kt + 1e-12 {
            return Err(Error::SignalOutOfSector { t, value: v });
        }
    }
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (d1, d2) = sector_rhs_raw(p, sigma(t), y[0], y[1]);
        dy[0] = d1;
        dy[1] = d2;
    };
    let trajectory = engine::integrate(rhs, &[x0.0, x0.1], cfg)?;

    let mut sup_norm: f64 = 0.0;
    let mut min_coord = f64::INFINITY;
    let mut lyap_series = lyapunov.map(|_| Vec::with_capacity(trajectory.len()));
    for (_, s) in trajectory.iter() {
        let x3 = 1.0 - s[0] - s[1];
        sup_norm = math::fmax(
            sup_norm,
            math::fmax(math::abs(s[0]), math::fmax(math::abs(s[1]), math::abs(x3))),
        );
        min_coord = math::fmin(min_coord, math::fmin(s[0], math::fmin(s[1], x3)));
        if let (Some(series), Some(spec)) = (lyap_series.as_mut(), lyapunov) {
            let z = [s[0] - spec.center.0, s[1] - spec.center.1];
            let pz = linalg::mat2_vec(&spec.p_matrix, &z);
            series.push(z[0] * pz[0] + z[1] * pz[1]);
        }
    }
    let last = trajectory.last_state();
    let final_state = (last[0], last[1]);
    let t_end = *trajectory.times().last().unwrap();
    let (d1, d2) = sector_rhs_raw(p, sigma(t_end), final_state.0, final_state.1);
    Ok(SectorSimulation {
        trajectory,
        sup_norm,
        min_simplex_coord: min_coord,
        final_state,
        final_rhs_inf: math::fmax(math::abs(d1), math::abs(d2)),
        lyapunov: lyap_series,
    })
}

impl SectorParams {
    fn validate_for_simulation(&self) -> Result<()> {
        Self::new(self.r, self.alpha, self.gamma).map(|_| ())
    }
}

/// Largest single-step increase of the series among steps that start above
/// `floor`; zero when the envelope only decays there.
pub fn max_envelope_increase(values: &[f64], floor: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for w in values.windows(2) {
        if w[0] > floor {
            worst = math::fmax(worst, w[1] - w[0]);
        }
    }
    worst
}
