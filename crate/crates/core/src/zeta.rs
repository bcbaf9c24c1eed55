//! Level sums and abscissa estimation for multifractal zeta functions.
//!
//! The series under study is
//!
//! ```text
//!     zeta(s) = sum_n A_n(s),    A_n(s) = sum over filtered words of length n of s_i^s,
//! ```
//!
//! where the filter keeps words whose statistic lies within `radius` (plus
//! the statistic's own slack) of a target set. The abscissa of convergence
//! is estimated per level as the root `t_n` of `(1/n) ln A_n(t) = 0`: since
//! every `ln s_i < 0`, the level sum is strictly decreasing in `t` and the
//! root is unique. The estimator carries an upward bias of order
//! `log n / n`, which is why estimates are reported along a ladder of levels
//! rather than at a single depth.
//!
//! Level sums run in one of two modes, chosen automatically:
//!
//! * grouped: when both the statistic and the weight depend on a word only
//!   through its symbol counts, the `N^n` terms collapse to the
//!   `C(n + N - 1, N - 1)` compositions, each weighted by its
//!   log-multinomial. This carries ladders to `n = 4000` and beyond.
//! * brute force: full word enumeration, capped by a budget; the fallback
//!   for genuinely sequence-dependent statistics (Birkhoff windows of size
//!   at least 2) and the oracle the grouped path is tested against.
//!
//! Filters are evaluated once per level and cached as `(log multiplicity,
//! log weight)` pairs, so root bisection costs one log-sum-exp pass per
//! probe.

use crate::measures::IfsModel;
use crate::numeric::{bisect_decreasing, log_sum_exp_map, golden_section_max};
use crate::statistics::WordStatistic;
use crate::symbolic::{compositions, enumerate_words};
use crate::targets::Target;
use crate::weights::WeightSystem;
use crate::{Error, ExtReal, Result};

/// Largest word count the brute-force path will enumerate per level.
pub const ENUMERATION_BUDGET: usize = 1 << 20;

/// Slack allowed when checking that shrinking-radius estimates are
/// non-increasing; covers root solver tolerance and log-sum rounding.
pub const SWEEP_MONOTONE_TOL: f64 = 1e-8;

/// Bisection width for per-level abscissa roots.
const ROOT_XTOL: f64 = 1e-11;

/// One filtered level sum `A_n(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSumReport {
    pub level: usize,
    pub exponent: f64,
    /// `ln A_n(t)`; negative infinity when no word passes the filter.
    pub log_sum: ExtReal,
}

/// A truncated zeta value `sum_(n <= max_level) A_n(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialZeta {
    pub s: f64,
    pub max_level: usize,
    /// `ln` of the truncated sum; negative infinity if every level is empty.
    pub log_value: ExtReal,
    /// The truncated sum itself (may overflow to `+inf` for `s` far below
    /// the abscissa; `log_value` never does).
    pub value: f64,
    /// `ln A_(max_level)(s)`: the tail indicator.
    pub last_term_log: ExtReal,
    /// Whether the level sums were still growing at the truncation point, a
    /// sign that `s` sits at or below the abscissa of convergence.
    pub divergent_hint: bool,
}

/// Per-level abscissa roots along a ladder of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct AbscissaEstimate {
    /// The root at the deepest non-empty level; negative infinity when every
    /// inspected level had an empty filter.
    pub value: ExtReal,
    pub levels: Vec<usize>,
    /// Root `t_n` per ladder level; negative infinity where the filter was
    /// empty.
    pub roots: Vec<ExtReal>,
    /// `|1/n ln A_n(t_n)|` at each returned root (zero for empty levels).
    pub residuals: Vec<f64>,
}

impl AbscissaEstimate {
    /// Largest upward jump between consecutive finite ladder roots; a rough
    /// ladder-stability diagnostic (the estimator bias shrinks with `n`, so
    /// large increases deserve suspicion).
    pub fn max_root_increase(&self) -> f64 {
        self.roots
            .windows(2)
            .filter_map(|w| match (w[0], w[1]) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => Some((b - a).max(0.0)),
                _ => None,
            })
            .fold(0.0, f64::max)
    }
}

/// One radius step of a shrinking-target sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkStep {
    pub radius: f64,
    pub estimate: AbscissaEstimate,
}

/// Abscissa estimates along a strictly decreasing radius ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkSweep {
    pub steps: Vec<ShrinkStep>,
    /// Whether the estimates are non-increasing in shrinking radius, within
    /// [`SWEEP_MONOTONE_TOL`]. Smaller radii filter fewer words, so a genuine
    /// increase signals a solver problem rather than a property of the data.
    pub monotone_within_tolerance: bool,
}

/// The Legendre companion value for a fixed-target estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreOracle {
    /// `sup` of the Legendre spectrum over the enlarged target; negative
    /// infinity when the target misses the attainable range entirely.
    pub value: ExtReal,
    /// Where the supremum was located.
    pub argmax: Option<Vec<f64>>,
}

/// A fixed-target abscissa estimate with its independent oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedTargetReport {
    pub estimate: AbscissaEstimate,
    /// Present when a model was supplied for cross-checking.
    pub oracle: Option<LegendreOracle>,
    /// Set when the interior-intersection condition backing the limit
    /// theory could not be verified: the target has empty interior or its
    /// interior misses the open attainable range. The estimate itself is
    /// still computed.
    pub interior_warning: bool,
}

pub(crate) fn validate_inputs(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
) -> Result<()> {
    if ws.alphabet() != stat.alphabet() {
        return Err(Error::AlphabetMismatch {
            left: ws.alphabet(),
            right: stat.alphabet(),
        });
    }
    if stat.dims() != target.dim() {
        return Err(Error::DimensionMismatch {
            stat: stat.dims(),
            target: target.dim(),
        });
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "filter radius must be finite and non-negative, got {radius}"
        )));
    }
    Ok(())
}

/// Cached filter outcome of one level: `(ln multiplicity, ln weight)` per
/// surviving term group.
fn level_terms(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    validate_inputs(ws, stat, target, radius)?;
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let alphabet = ws.alphabet();
    let slack = radius + stat.slack(n);
    let mut probe = vec![0u32; alphabet as usize];
    probe[0] = 1;
    let grouped = stat.is_composition_measurable() && ws.log_weight_from_counts(&probe).is_some();

    let mut terms = Vec::new();
    if grouped {
        for c in compositions(n, alphabet)? {
            let value = stat.value_from_composition(&c)?;
            if target.contains(&value, slack) {
                let lw = ws
                    .log_weight_from_counts(c.counts())
                    .expect("probed count-measurable weight");
                terms.push((c.log_multinomial(), lw));
            }
        }
    } else {
        let total = (alphabet as usize)
            .checked_pow(n as u32)
            .filter(|&t| t <= ENUMERATION_BUDGET);
        if total.is_none() {
            return Err(Error::EnumerationBudget { level: n, alphabet });
        }
        for w in enumerate_words(n, alphabet)? {
            let value = stat.value(&w)?;
            if target.contains(&value, slack) {
                terms.push((0.0, ws.log_weight(&w)?));
            }
        }
    }
    Ok(terms)
}

fn log_sum_at(terms: &[(f64, f64)], t: f64) -> ExtReal {
    match log_sum_exp_map(terms, |&(lm, lw)| lm + t * lw) {
        Some(v) => ExtReal::Finite(v),
        None => ExtReal::NegInf,
    }
}

/// The filtered level sum `ln A_n(t)` at one level and exponent.
pub fn level_sum(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    t: f64,
    n: usize,
    target: &Target,
    radius: f64,
) -> Result<LevelSumReport> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be finite, got {t}")));
    }
    let terms = level_terms(ws, stat, target, radius, n)?;
    Ok(LevelSumReport {
        level: n,
        exponent: t,
        log_sum: log_sum_at(&terms, t),
    })
}

/// Truncated zeta value `sum_(n = 1..=max_level) A_n(s)`, accumulated in log
/// space with a tail indicator.
pub fn partial_zeta(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    s: f64,
    max_level: usize,
    target: &Target,
    radius: f64,
) -> Result<PartialZeta> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be finite, got {s}")));
    }
    if max_level == 0 {
        return Err(Error::ZeroLevel);
    }
    let mut level_logs = Vec::with_capacity(max_level);
    let mut last_term_log = ExtReal::NegInf;
    for n in 1..=max_level {
        let terms = level_terms(ws, stat, target, radius, n)?;
        let log_a = log_sum_at(&terms, s);
        if n == max_level {
            last_term_log = log_a;
        }
        if let ExtReal::Finite(v) = log_a {
            level_logs.push(v);
        }
    }
    let log_value = match log_sum_exp_map(&level_logs, |&x| x) {
        Some(v) => ExtReal::Finite(v),
        None => ExtReal::NegInf,
    };
    // Growth over the final non-empty levels marks likely divergence.
    let tail = &level_logs[level_logs.len().saturating_sub(3)..];
    let divergent_hint = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);
    Ok(PartialZeta {
        s,
        max_level,
        log_value,
        value: log_value.to_f64().exp(),
        last_term_log,
        divergent_hint,
    })
}

/// The ladder of levels inspected for a top level `n`: roughly
/// `{n/16, n/8, n/4, n/2, n}`, deduplicated.
pub fn level_ladder(top_level: usize) -> Vec<usize> {
    let mut ladder: Vec<usize> = [16usize, 8, 4, 2, 1]
        .iter()
        .map(|d| (top_level / d).max(1))
        .collect();
    ladder.dedup();
    ladder
}

fn root_at_level(terms: &[(f64, f64)], n: usize) -> Result<(ExtReal, f64)> {
    if terms.is_empty() {
        return Ok((ExtReal::NegInf, 0.0));
    }
    let phi = |t: f64| -> f64 {
        log_sum_at(terms, t).to_f64() / n as f64
    };
    // phi(0) = ln(word count)/n >= 0 and phi decreases without bound.
    let mut hi = 1.0;
    while phi(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::BracketFailure(
                "level-sum root exceeds 1e6; weights are barely contracting".into(),
            ));
        }
    }
    let root = bisect_decreasing(phi, 0.0, hi, ROOT_XTOL)?;
    Ok((ExtReal::Finite(root), phi(root).abs()))
}

/// Per-level abscissa roots along the ladder up to `top_level`.
///
/// The headline value is the root at the deepest non-empty level; the whole
/// ladder is reported so callers can see the `log n / n` bias decay.
pub fn abscissa_estimate(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    top_level: usize,
) -> Result<AbscissaEstimate> {
    if top_level == 0 {
        return Err(Error::ZeroLevel);
    }
    validate_inputs(ws, stat, target, radius)?;
    let levels = level_ladder(top_level);
    let mut roots = Vec::with_capacity(levels.len());
    let mut residuals = Vec::with_capacity(levels.len());
    let mut value = ExtReal::NegInf;
    for &n in &levels {
        let terms = level_terms(ws, stat, target, radius, n)?;
        let (root, residual) = root_at_level(&terms, n)?;
        if root.is_finite() {
            value = root;
        }
        roots.push(root);
        residuals.push(residual);
    }
    Ok(AbscissaEstimate { value, levels, roots, residuals })
}

/// Abscissa estimates along a strictly decreasing ladder of filter radii.
pub fn shrinking_sweep(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radii: &[f64],
    top_level: usize,
) -> Result<ShrinkSweep> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("radius ladder is empty".into()));
    }
    for pair in radii.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidArgument(format!(
                "radius ladder must be strictly decreasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(&bad) = radii.iter().find(|&&r| !(r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "radii must be finite and non-negative, got {bad}"
        )));
    }
    let mut steps = Vec::with_capacity(radii.len());
    for &r in radii {
        steps.push(ShrinkStep {
            radius: r,
            estimate: abscissa_estimate(ws, stat, target, r, top_level)?,
        });
    }
    let monotone_within_tolerance = steps.windows(2).all(|w| {
        match (w[0].estimate.value, w[1].estimate.value) {
            (_, ExtReal::NegInf) => true,
            (ExtReal::NegInf, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => b <= a + SWEEP_MONOTONE_TOL,
        }
    });
    Ok(ShrinkSweep { steps, monotone_within_tolerance })
}

/// Supremum of the model's Legendre spectrum over the `radius`-enlargement
/// of the target, by concavity-aware line searches per coordinate. This is
/// the limit the fixed-target abscissa roots approach for ratio statistics
/// of the model.
pub fn legendre_supremum(model: &IfsModel, target: &Target, radius: f64) -> Result<LegendreOracle> {
    let m_dim = model.num_measures();
    let ranges = model.ratio_range();
    // Per-coordinate search domain: target extent inflated by the radius,
    // clipped to the attainable range.
    let mut domains = Vec::with_capacity(m_dim);
    for (m, &(rlo, rhi)) in ranges.iter().enumerate() {
        let Some((tlo, thi)) = target.bounding_interval(m) else {
            return Ok(LegendreOracle { value: ExtReal::NegInf, argmax: None });
        };
        let lo = (tlo - radius).max(rlo);
        let hi = (thi + radius).min(rhi);
        if lo > hi {
            return Ok(LegendreOracle { value: ExtReal::NegInf, argmax: None });
        }
        domains.push((lo, hi));
    }

    let eval = |alpha: &[f64]| -> Result<f64> {
        // Clip handles box corners that the enlarged ball misses.
        if target.dist(alpha) > radius + 1e-15 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(model.legendre(alpha)?.value.to_f64())
    };

    // Grid seed.
    const GRID: usize = 33;
    let mut best_alpha: Option<Vec<f64>> = None;
    let mut best_v = f64::NEG_INFINITY;
    let mut idx = vec![0usize; m_dim];
    loop {
        let alpha: Vec<f64> = idx
            .iter()
            .zip(&domains)
            .map(|(&i, &(lo, hi))| lo + (hi - lo) * i as f64 / (GRID - 1) as f64)
            .collect();
        let v = eval(&alpha)?;
        if v > best_v {
            best_v = v;
            best_alpha = Some(alpha);
        }
        let mut done = true;
        for d in 0..m_dim {
            idx[d] += 1;
            if idx[d] < GRID {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    let Some(mut alpha) = best_alpha else {
        return Ok(LegendreOracle { value: ExtReal::NegInf, argmax: None });
    };
    if best_v == f64::NEG_INFINITY {
        return Ok(LegendreOracle { value: ExtReal::NegInf, argmax: None });
    }

    // Coordinate-wise golden-section refinement; the spectrum is concave, so
    // each line profile is unimodal.
    for _sweep in 0..4 {
        for m in 0..m_dim {
            let (lo, hi) = domains[m];
            let mut failure = None;
            let mut probe = alpha.clone();
            let (x, v) = golden_section_max(
                |x| {
                    probe[m] = x;
                    match eval(&probe) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            f64::NEG_INFINITY
                        }
                    }
                },
                lo,
                hi,
                80,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            if v > best_v {
                best_v = v;
                alpha[m] = x;
            }
        }
    }
    Ok(LegendreOracle {
        value: ExtReal::Finite(best_v),
        argmax: Some(alpha),
    })
}

/// Fixed-target abscissa estimate with the Legendre supremum as companion
/// oracle.
///
/// The oracle is computed when `model` is supplied and describes
/// `sup f(alpha)` over the enlarged target; it is the quantity the per-level
/// roots approach for ratio statistics of that model. `interior_warning`
/// flags targets whose interior cannot meet the open attainable range, where
/// that convergence is no longer backed by the limit theory (point targets
/// at radius zero being the canonical example).
pub fn fixed_target_estimate(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    top_level: usize,
    model: Option<&IfsModel>,
) -> Result<FixedTargetReport> {
    let estimate = abscissa_estimate(ws, stat, target, radius, top_level)?;
    let mut interior_warning = !target.has_interior() && radius == 0.0;
    let oracle = match model {
        None => None,
        Some(m) => {
            if m.num_measures() != stat.dims() {
                return Err(Error::InvalidArgument(format!(
                    "oracle model has {} probability rows, statistic has {} coordinates",
                    m.num_measures(),
                    stat.dims()
                )));
            }
            // The open attainable range must meet the enlarged target's
            // interior for the limit theory to apply.
            for (coord, &(rlo, rhi)) in m.ratio_range().iter().enumerate() {
                match target.bounding_interval(coord) {
                    None => interior_warning = true,
                    Some((tlo, thi)) => {
                        if thi + radius <= rlo || tlo - radius >= rhi {
                            interior_warning = true;
                        }
                    }
                }
            }
            Some(legendre_supremum(m, target, radius)?)
        }
    };
    Ok(FixedTargetReport { estimate, oracle, interior_warning })
}
