//! Per-word statistics: the quantities the zeta filter compares against a
//! target set.
//!
//! Two kinds are provided. The [`RatioStatistic`] of a model sends a word
//! `i` to the vector of averaged local dimensions
//!
//! ```text
//!     value_m(i) = sum_j ln p_(m, i_j) / sum_j ln r_(i_j),
//! ```
//!
//! which depends on the word only through its symbol counts, so level sums
//! over it collapse to compositions. The [`BirkhoffStatistic`] averages a
//! `k`-gram table over the word's periodic extension. For `k = 1` that is
//! again a symbol-frequency average; for `k >= 2` the cyclic average stands
//! in for the true orbit average, and the difference is absorbed into the
//! filter radius via [`WordStatistic::slack`]: at most `2 max|f| (k - 1) / n`
//! at level `n`, since only the `k - 1` wrap-around windows differ and each
//! window value is bounded by `max|f|`.

use crate::measures::IfsModel;
use crate::symbolic::{cyclic_birkhoff_average, Composition, GramTable, Word};
use crate::{Error, Result};

/// Coordinatewise averaged local dimensions of a self-similar model.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioStatistic {
    log_probs: Vec<Vec<f64>>,
    log_ratios: Vec<f64>,
}

impl RatioStatistic {
    pub fn new(model: &IfsModel) -> Self {
        Self {
            log_probs: model.log_probs().to_vec(),
            log_ratios: model.log_ratios().to_vec(),
        }
    }

    pub fn log_probs(&self) -> &[Vec<f64>] {
        &self.log_probs
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }

    fn value_from_counts(&self, counts: &[u32]) -> Vec<f64> {
        let denom: f64 = counts
            .iter()
            .zip(&self.log_ratios)
            .map(|(&k, lr)| k as f64 * lr)
            .sum();
        self.log_probs
            .iter()
            .map(|row| {
                let numer: f64 = counts
                    .iter()
                    .zip(row)
                    .map(|(&k, lp)| k as f64 * lp)
                    .sum();
                numer / denom
            })
            .collect()
    }
}

/// Cyclic Birkhoff average of a `k`-gram table.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffStatistic {
    table: GramTable,
}

impl BirkhoffStatistic {
    pub fn new(table: GramTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &GramTable {
        &self.table
    }
}

/// A word statistic: what the zeta filter evaluates on each word.
#[derive(Debug, Clone, PartialEq)]
pub enum WordStatistic {
    Ratio(RatioStatistic),
    Birkhoff(BirkhoffStatistic),
}

impl WordStatistic {
    pub fn ratio(model: &IfsModel) -> Self {
        WordStatistic::Ratio(RatioStatistic::new(model))
    }

    pub fn birkhoff(table: GramTable) -> Self {
        WordStatistic::Birkhoff(BirkhoffStatistic::new(table))
    }

    /// Number of coordinates of the statistic's value (the target dimension).
    pub fn dims(&self) -> usize {
        match self {
            WordStatistic::Ratio(r) => r.log_probs.len(),
            WordStatistic::Birkhoff(_) => 1,
        }
    }

    /// Alphabet the statistic is defined over.
    pub fn alphabet(&self) -> u8 {
        match self {
            WordStatistic::Ratio(r) => r.log_ratios.len() as u8,
            WordStatistic::Birkhoff(b) => b.table.alphabet(),
        }
    }

    /// The statistic of a single word.
    pub fn value(&self, w: &Word) -> Result<Vec<f64>> {
        if w.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet(),
                right: w.alphabet(),
            });
        }
        match self {
            WordStatistic::Ratio(r) => Ok(r.value_from_counts(&w.counts())),
            WordStatistic::Birkhoff(b) => Ok(vec![cyclic_birkhoff_average(w, &b.table)?]),
        }
    }

    /// Whether the statistic depends on a word only through its symbol
    /// counts, enabling composition-grouped level sums.
    pub fn is_composition_measurable(&self) -> bool {
        match self {
            WordStatistic::Ratio(_) => true,
            WordStatistic::Birkhoff(b) => b.table.window() == 1,
        }
    }

    /// The statistic of every word sharing a composition. Errors for window
    /// sizes of 2 and above, where symbol counts no longer determine it.
    pub fn value_from_composition(&self, c: &Composition) -> Result<Vec<f64>> {
        if c.counts().len() != self.alphabet() as usize {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet(),
                right: c.counts().len() as u8,
            });
        }
        match self {
            WordStatistic::Ratio(r) => Ok(r.value_from_counts(c.counts())),
            WordStatistic::Birkhoff(b) => {
                if b.table.window() != 1 {
                    return Err(Error::NotCompositionMeasurable);
                }
                let n: u32 = c.counts().iter().sum();
                let mean: f64 = c
                    .counts()
                    .iter()
                    .zip(b.table.values())
                    .map(|(&k, v)| k as f64 * v)
                    .sum::<f64>()
                    / n as f64;
                Ok(vec![mean])
            }
        }
    }

    /// Filter slack at level `n`: how far the computed statistic can sit
    /// from the quantity the filter is really about. Zero except for
    /// Birkhoff windows of size 2 and above, where cyclic wrap-around
    /// contributes `2 max|f| (k - 1) / n`.
    pub fn slack(&self, n: usize) -> f64 {
        match self {
            WordStatistic::Ratio(_) => 0.0,
            WordStatistic::Birkhoff(b) => {
                let k = b.table.window();
                if k <= 1 {
                    0.0
                } else {
                    2.0 * b.table.max_abs() * (k - 1) as f64 / n as f64
                }
            }
        }
    }
}
