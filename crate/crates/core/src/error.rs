//! Crate-wide error type.

use core::fmt;

/// Everything that can go wrong across the library.
///
/// Pure-math kernels are infallible; errors come from violated preconditions,
/// invalid inputs, and numerical procedures that can legitimately fail
/// (Newton solves, adaptive stepping, bisection bracketing).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or state component is NaN or infinite.
    NonFinite { what: &'static str },
    /// A rate constant that must be non-negative is negative.
    NegativeParam { what: &'static str, value: f64 },
    /// A point failed the simplex invariants (sum-to-one / coordinate slack).
    OffSimplex { sum: f64, min_coord: f64 },
    /// Projection onto the simplex received a vector with no positive mass.
    ZeroMass,
    /// Expected-gain comparison requires two distinct strategies.
    SameStrategy { index: usize },
    /// Strategy index outside 0..3.
    StrategyOutOfRange { index: usize },
    /// Operation is defined for symmetric parameters only.
    AsymmetricParams,
    /// Threshold formula denominator vanishes (r equals alpha).
    SingularThreshold,
    /// Closed-form equilibria need strictly positive rates to divide by.
    ZeroRate { what: &'static str },
    /// Jacobian classification is derived for points with x1 = x2 only.
    NotSymmetricPoint { x1: f64, x2: f64 },
    /// A scalar input left its documented domain.
    OutOfRange { what: &'static str, value: f64 },
    /// Degree distribution construction failed.
    BadDistribution { what: &'static str },
    /// Power-law support is empty (lower cutoff above k_max).
    EmptySupport,
    /// Class states do not match the distribution support.
    ClassMismatch { expected: usize, got: usize },
    /// Aggregate weight required to be positive was zero.
    ZeroPsi,
    /// Mean-field response matrix is not invertible.
    NonInvertible,
    /// Transfer-function construction requires a Hurwitz state matrix.
    NotHurwitz { trace: f64, determinant: f64 },
    /// Polynomial root extraction is implemented up to degree two.
    PolynomialDegree { degree: usize },
    /// Denominator polynomial is identically zero.
    ZeroDenominator,
    /// Frequency grid was empty or contained non-positive entries.
    BadFrequencyGrid,
    /// Operation expects a scalar (1 x 1) transfer function.
    NotScalar,
    /// Sector signal left the interval [0, k_tilde].
    SignalOutOfSector { t: f64, value: f64 },
    /// Newton iteration did not produce a valid Lyapunov certificate.
    NoCertificate { iterations: usize, residual: f64 },
    /// Adaptive integrator step size underflowed.
    StepUnderflow { t: f64 },
    /// Integrated state became non-finite.
    NonFiniteState { t: f64 },
    /// A state left the simplex beyond tolerance; halve the step and retry.
    StepRejected { t: f64 },
    /// Bisection endpoints evaluate to the same predicate value.
    SameSignPredicate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { what } => write!(f, "{what} is not finite"),
            Error::NegativeParam { what, value } => {
                write!(f, "{what} must be non-negative, got {value}")
            }
            Error::OffSimplex { sum, min_coord } => write!(
                f,
                "point off the simplex (sum {sum}, smallest coordinate {min_coord})"
            ),
            Error::ZeroMass => write!(f, "cannot project a vector with no positive mass"),
            Error::SameStrategy { index } => {
                write!(f, "expected gain needs distinct strategies, both were {index}")
            }
            Error::StrategyOutOfRange { index } => {
                write!(f, "strategy index {index} outside 0..3")
            }
            Error::AsymmetricParams => {
                write!(f, "operation requires symmetric parameters")
            }
            Error::SingularThreshold => {
                write!(f, "threshold undefined: r equals alpha")
            }
            Error::ZeroRate { what } => write!(f, "{what} must be positive here"),
            Error::NotSymmetricPoint { x1, x2 } => {
                write!(f, "classification needs x1 = x2, got ({x1}, {x2})")
            }
            Error::OutOfRange { what, value } => {
                write!(f, "{what} out of range: {value}")
            }
            Error::BadDistribution { what } => write!(f, "invalid degree distribution: {what}"),
            Error::EmptySupport => write!(f, "degree support is empty"),
            Error::ClassMismatch { expected, got } => {
                write!(f, "expected {expected} class states, got {got}")
            }
            Error::ZeroPsi => write!(f, "aggregate weight Psi is zero"),
            Error::NonInvertible => write!(f, "mean-field matrix is singular"),
            Error::NotHurwitz { trace, determinant } => write!(
                f,
                "matrix is not Hurwitz (trace {trace}, determinant {determinant})"
            ),
            Error::PolynomialDegree { degree } => {
                write!(f, "root extraction not implemented for degree {degree}")
            }
            Error::ZeroDenominator => write!(f, "denominator polynomial is zero"),
            Error::BadFrequencyGrid => {
                write!(f, "frequency grid must be non-empty with positive entries")
            }
            Error::NotScalar => write!(f, "expected a scalar transfer function"),
            Error::SignalOutOfSector { t, value } => {
                write!(f, "sigma signal leaves the sector at t = {t} (value {value})")
            }
            Error::NoCertificate { iterations, residual } => write!(
                f,
                "no Lyapunov certificate after {iterations} iterations (residual {residual})"
            ),
            Error::StepUnderflow { t } => write!(f, "adaptive step underflow at t = {t}"),
            Error::NonFiniteState { t } => write!(f, "state became non-finite at t = {t}"),
            Error::StepRejected { t } => write!(
                f,
                "state left the simplex at t = {t}; halve the step and retry"
            ),
            Error::SameSignPredicate => {
                write!(f, "bisection endpoints have the same predicate value")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
