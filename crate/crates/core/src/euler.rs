//! Euler products over prime words and their zeta cross-check.
//!
//! A word is prime when it is not a proper power of a shorter word. Every
//! word factors uniquely as `u^k` with `u` prime, so for multiplicative
//! weights (`s_ij = s_i * s_j`) and a filter that is invariant under
//! powers, the zeta series regroups along prime roots:
//!
//! ```text
//!     sum over filtered words of s_i^s
//!         = sum over filtered primes u of sum_(k >= 1) s_u^(k s)
//!         = sum over filtered primes u of s_u^s / (1 - s_u^s).
//! ```
//!
//! Each geometric factor is expanded in closed form; nothing is
//! differentiated numerically. Ratio statistics make the filter
//! power-invariant automatically (`ratio(u^k) = ratio(u)` because counts
//! scale linearly), which is what turns the regrouping into an exact
//! identity at matched truncations, up to tails of words whose prime root
//! is longer than the cut.

use crate::numeric::KahanSum;
use crate::statistics::WordStatistic;
use crate::symbolic::enumerate_words;
use crate::targets::Target;
use crate::weights::WeightSystem;
use crate::zeta::{partial_zeta, validate_inputs};
use crate::{Error, ExtReal, Result};

/// Largest per-level word count the prime enumeration will scan.
pub const PRIME_LEVEL_BUDGET: usize = 1 << 21;

/// Relative size of the final zeta level above which the truncation is
/// flagged as converging too slowly for the comparison to be sharp. One
/// percent of the total in the last level means the geometric decay rate
/// is too close to one for a 16-level cut to say anything precise.
pub const SLOW_TAIL_TOL: f64 = 1e-2;

/// Both sides of the truncated Euler identity at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerCheck {
    pub s: f64,
    /// Truncated zeta sum over all filtered words of length at most the cut.
    pub zeta_trunc: f64,
    /// Sum of closed-form geometric factors over filtered primes up to the
    /// same cut.
    pub prime_form: f64,
    /// Relative gap between the two sides; zero when both vanish.
    pub discrepancy: f64,
    /// Whether the last zeta level still carried more than [`SLOW_TAIL_TOL`]
    /// of the total: the evaluation point sits too close to the abscissa for
    /// the truncated comparison to be conclusive.
    pub slow_tail: bool,
}

fn check_admissible(ws: &dyn WeightSystem, s: f64) -> Result<()> {
    if !ws.is_multiplicative() {
        return Err(Error::NotMultiplicative);
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Euler factors need a finite positive exponent, got {s}"
        )));
    }
    Ok(())
}

/// Applies `visit(len, log_weight)` to every filtered prime word of length
/// at most `max_prime_len`, in ascending length.
fn for_each_filtered_prime(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    max_prime_len: usize,
    mut visit: impl FnMut(usize, f64) -> Result<()>,
) -> Result<()> {
    let alphabet = ws.alphabet();
    for n in 1..=max_prime_len {
        let total = (alphabet as usize)
            .checked_pow(n as u32)
            .filter(|&t| t <= PRIME_LEVEL_BUDGET);
        if total.is_none() {
            return Err(Error::EnumerationBudget { level: n, alphabet });
        }
        let slack = radius + stat.slack(n);
        for w in enumerate_words(n, alphabet)? {
            if !w.is_prime() {
                continue;
            }
            let value = stat.value(&w)?;
            if target.contains(&value, slack) {
                visit(n, ws.log_weight(&w)?)?;
            }
        }
    }
    Ok(())
}

/// The prime-side sum `sum s_u^s / (1 - s_u^s)` over filtered primes of
/// length at most `max_prime_len`.
///
/// Meaningful above the abscissa of convergence; that is not enforced, but
/// evaluation points at it or below simply produce a truncation-dominated
/// number (flagged by [`euler_check`]).
pub fn euler_log_derivative(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    s: f64,
    target: &Target,
    radius: f64,
    max_prime_len: usize,
) -> Result<f64> {
    check_admissible(ws, s)?;
    validate_inputs(ws, stat, target, radius)?;
    if max_prime_len == 0 {
        return Err(Error::ZeroLevel);
    }
    let mut sum = KahanSum::new();
    for_each_filtered_prime(ws, stat, target, radius, max_prime_len, |_, lw| {
        // 0 < e < 1 because lw < 0 and s > 0.
        let e = (s * lw).exp();
        sum.add(e / (1.0 - e));
        Ok(())
    })?;
    Ok(sum.value())
}

/// Evaluates both sides of the Euler identity at matched truncation and
/// reports their relative gap.
pub fn euler_check(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    s: f64,
    target: &Target,
    radius: f64,
    max_len: usize,
) -> Result<EulerCheck> {
    check_admissible(ws, s)?;
    let prime_form = euler_log_derivative(ws, stat, s, target, radius, max_len)?;
    let pz = partial_zeta(ws, stat, s, max_len, target, radius)?;
    let zeta_trunc = match pz.log_value {
        ExtReal::Finite(v) => v.exp(),
        ExtReal::NegInf => 0.0,
    };
    let scale = zeta_trunc.abs().max(prime_form.abs());
    let discrepancy = if scale == 0.0 {
        0.0
    } else {
        (zeta_trunc - prime_form).abs() / scale
    };
    let slow_tail = match (pz.last_term_log, pz.log_value) {
        (ExtReal::Finite(last), ExtReal::Finite(total)) => (last - total).exp() > SLOW_TAIL_TOL,
        _ => false,
    };
    Ok(EulerCheck {
        s,
        zeta_trunc,
        prime_form,
        discrepancy,
        slow_tail,
    })
}
