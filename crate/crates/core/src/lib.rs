//! Multifractal zeta functions on symbolic shift spaces.
//!
//! This crate computes Dirichlet-type series of the form
//!
//! ```text
//!     zeta(s) = sum over finite words i passing a filter of s_i^s
//! ```
//!
//! where `s_i` is a contraction weight attached to the word `i` (for a
//! self-similar system, the product of per-symbol ratios) and the filter keeps
//! the words whose empirical statistic lands in a target set. The abscissa of
//! convergence of such a series is a dimension-like quantity; for self-similar
//! measures it coincides with the Legendre transform of the `L^q`-spectrum and
//! with a constrained variational maximum of entropy over Lyapunov exponent.
//!
//! The crate provides:
//!
//! * [`symbolic`]: words over a finite alphabet, composition (symbol-count)
//!   enumeration, primitive-word tests, cyclic window averages;
//! * [`weights`]: contraction weight systems and their axioms;
//! * [`measures`]: self-similar models, the pressure function `beta(q)`, its
//!   gradient `alpha(q)`, and Legendre transforms;
//! * [`statistics`]: the per-word statistics used as filters (coordinatewise
//!   log-ratio averages and Birkhoff window averages);
//! * [`targets`]: point / box / ball target sets under the max norm;
//! * [`zeta`]: level sums, truncated zeta values, abscissa estimation, and
//!   shrinking-target sweeps;
//! * [`coarse`]: stopping sets and box-counting style coarse spectra;
//! * [`euler`]: prime decomposition of words and the Euler-product form of the
//!   zeta function's logarithmic derivative;
//! * [`numeric`]: compensated summation, log-sum-exp, factorial tables, and
//!   the bracketing / golden-section / simplex searches the solvers share;
//! * [`variational`]: entropy-over-Lyapunov maximization over Bernoulli and
//!   one-step Markov measures, the independent oracle for the zeta estimates.
//!
//! All heavy sums are carried in log space; empty sums are represented by an
//! explicit negative-infinity state rather than a float sentinel.

pub mod coarse;
pub mod euler;
pub mod measures;
pub mod numeric;
pub mod statistics;
pub mod symbolic;
pub mod targets;
pub mod variational;
pub mod weights;
pub mod zeta;

use thiserror::Error;

/// Errors reported by the library.
///
/// Validation failures (bad alphabet, malformed model, inconsistent
/// dimensions) are distinguished from resource guards (enumeration budgets)
/// and from numeric failures (bracketing) so callers can map them to exit
/// codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("word must be non-empty")]
    EmptyWord,
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u8, alphabet: u8 },
    #[error("alphabet must have at least two symbols, got {0}")]
    AlphabetTooSmall(u8),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid statistic: {0}")]
    InvalidStatistic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("statistic has {stat} coordinates but target has {target}")]
    DimensionMismatch { stat: usize, target: usize },
    #[error("alphabet mismatch: {left} symbols vs {right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("enumeration budget exceeded at level {level} over alphabet of size {alphabet}")]
    EnumerationBudget { level: usize, alphabet: u8 },
    #[error("stopping set budget exceeded: {0}")]
    StoppingBudget(String),
    #[error("weight system is not multiplicative; Euler factorization does not apply")]
    NotMultiplicative,
    #[error("statistic is not determined by symbol counts")]
    NotCompositionMeasurable,
    #[error("root bracketing failed: {0}")]
    BracketFailure(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// An extended-real value: finite, or negative infinity.
///
/// Empty zeta series, unattainable Legendre arguments, and all-empty coarse
/// ladders all produce negative infinity. Keeping the state explicit (instead
/// of `f64::NEG_INFINITY`) forces call sites to decide how to report it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    NegInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::NegInf => None,
        }
    }

    /// Collapse to `f64`, mapping the empty state to `f64::NEG_INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }
}

impl From<f64> for ExtReal {
    /// Classifies a float: `NEG_INFINITY` maps to the empty state, everything
    /// else (including NaN, which callers are expected to avoid) is `Finite`.
    fn from(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::NegInf => write!(f, "-inf"),
        }
    }
}
