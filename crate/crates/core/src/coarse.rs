//! Coarse (box-counting) spectrum estimates via stopping sets.
//!
//! A stopping set at scale `delta` collects, along every branch of the
//! word tree, the first word whose weight drops to `delta` or below. The
//! resulting family is prefix-free and complete: every infinite symbol
//! sequence has exactly one prefix in the set, so the corresponding
//! cylinders partition the shift space into pieces of comparable size
//! (each weight lies in `(delta * s_min, delta]` by parent monotonicity).
//!
//! Counting the stopping words whose statistic falls near a target and
//! regressing `ln count` against `ln(1/delta)` over a ladder of scales
//! gives an independent, geometry-flavoured estimate of the spectrum
//! value that the zeta-function abscissa and the variational bound
//! approach from either side.

use crate::numeric::ols_fit;
use crate::statistics::WordStatistic;
use crate::symbolic::Word;
use crate::targets::Target;
use crate::weights::WeightSystem;
use crate::zeta::validate_inputs;
use crate::{Error, ExtReal, Result};

/// Largest stopping set the tree walk will emit.
pub const STOPPING_BUDGET: usize = 1 << 22;

/// Scales below `s_min^DELTA_FLOOR_POWER` are refused: the stopping set
/// would outgrow any reasonable budget.
pub const DELTA_FLOOR_POWER: f64 = 40.0;

/// A complete prefix-free family of words with weights just below `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingSet {
    delta: f64,
    words: Vec<Word>,
}

impl StoppingSet {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A coarse counting sweep and the dimension-like slope fitted to it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseEstimate {
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
    /// Fitted growth exponent of `count` against `1/delta`; negative
    /// infinity when no scale saw a single passing word.
    pub value: ExtReal,
}

/// Walks the word tree in lexicographic order, emitting the first word on
/// each branch whose weight is at most `delta`.
pub fn stopping_words(ws: &dyn WeightSystem, delta: f64) -> Result<StoppingSet> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "stopping scale must lie in (0, 1), got {delta}"
        )));
    }
    let (log_min, _) = ws.log_weight_bounds();
    if delta.ln() < DELTA_FLOOR_POWER * log_min {
        return Err(Error::StoppingBudget(format!(
            "scale {delta:e} is below the supported floor s_min^{DELTA_FLOOR_POWER}"
        )));
    }
    let alphabet = ws.alphabet();
    let mut words = Vec::new();
    let ln_delta = delta.ln();
    // Depth-first with children pushed in reverse, so branches pop in
    // ascending symbol order and the emitted leaves come out sorted.
    let mut stack: Vec<Word> = (0..alphabet)
        .rev()
        .map(|c| Word::new(vec![c], alphabet))
        .collect::<Result<_>>()?;
    while let Some(w) = stack.pop() {
        if ws.log_weight(&w)? <= ln_delta {
            words.push(w);
            if words.len() > STOPPING_BUDGET {
                return Err(Error::StoppingBudget(format!(
                    "stopping set at scale {delta:e} exceeds {STOPPING_BUDGET} words"
                )));
            }
        } else {
            for c in (0..alphabet).rev() {
                let mut symbols = Vec::with_capacity(w.len() + 1);
                symbols.extend_from_slice(w.symbols());
                symbols.push(c);
                stack.push(Word::new(symbols, alphabet)?);
            }
        }
    }
    Ok(StoppingSet { delta, words })
}

/// Number of stopping words at scale `delta` whose statistic lies within
/// `radius` (plus window slack) of the target.
pub fn coarse_count(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    delta: f64,
) -> Result<usize> {
    validate_inputs(ws, stat, target, radius)?;
    let set = stopping_words(ws, delta)?;
    let mut count = 0;
    for w in set.words() {
        let value = stat.value(w)?;
        if target.contains(&value, radius + stat.slack(w.len())) {
            count += 1;
        }
    }
    Ok(count)
}

/// Coarse spectrum estimate over a ladder of at least three strictly
/// decreasing scales.
///
/// The value is the least-squares slope of `ln count` against
/// `ln(1/delta)` over the scales with a nonzero count; with a single such
/// scale the slope degenerates to the one-point ratio, and with none the
/// estimate is negative infinity.
pub fn coarse_spectrum_estimate(
    ws: &dyn WeightSystem,
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    deltas: &[f64],
) -> Result<CoarseEstimate> {
    if deltas.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "coarse sweep needs at least 3 scales, got {}",
            deltas.len()
        )));
    }
    for pair in deltas.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidArgument(format!(
                "scales must be strictly decreasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let mut counts = Vec::with_capacity(deltas.len());
    for &d in deltas {
        counts.push(coarse_count(ws, stat, target, radius, d)?);
    }
    let points: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&counts)
        .filter(|&(_, &c)| c > 0)
        .map(|(&d, &c)| (-d.ln(), (c as f64).ln()))
        .collect();
    let value = match points.len() {
        0 => ExtReal::NegInf,
        1 => ExtReal::Finite(points[0].1 / points[0].0),
        _ => {
            let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
            let (slope, _) = ols_fit(&xs, &ys)?;
            ExtReal::Finite(slope)
        }
    };
    Ok(CoarseEstimate {
        deltas: deltas.to_vec(),
        counts,
        value,
    })
}
