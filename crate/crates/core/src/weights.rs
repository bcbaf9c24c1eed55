//! Contraction weight systems: the per-word weights `s_i` the zeta series is
//! built from.
//!
//! A weight system assigns every finite word `i` a weight `s_i` in `(0, 1)`,
//! held here in log space, subject to three axioms:
//!
//! 1. bounds: `s_min^n <= s_i <= s_max^n < 1` for words of length `n`;
//! 2. quasi-multiplicativity: `s_ij <= s_i s_j <= c * s_ij` for a fixed
//!    distortion constant `c >= 1`;
//! 3. monotonicity in extension: `s_i < s_(parent of i)`.
//!
//! [`SimilarityWeights`] is the exactly multiplicative model (`c = 1`): each
//! symbol carries a contraction ratio and a word's weight is the product of
//! its symbols' ratios. [`check_weight_axioms`] verifies the axioms
//! exhaustively over all short words, which is how implementations of the
//! trait get validated in tests.

use crate::symbolic::{enumerate_words, Word};
use crate::{Error, Result};

/// Words examined per axiom sweep before [`check_weight_axioms`] gives up.
const AXIOM_WORD_BUDGET: usize = 1 << 21;

/// A system of contraction weights on words, in log space.
pub trait WeightSystem {
    /// Number of symbols the system is defined over.
    fn alphabet(&self) -> u8;

    /// `ln s_i`, always negative. Errors if the word's alphabet differs.
    fn log_weight(&self, w: &Word) -> Result<f64>;

    /// `ln s_i` from the word's symbol counts alone, when the weight is
    /// determined by them; `None` otherwise. Enables the composition-grouped
    /// level sums.
    fn log_weight_from_counts(&self, counts: &[u32]) -> Option<f64>;

    /// `(ln s_min, ln s_max)`: per-symbol log-weight bounds, both negative.
    fn log_weight_bounds(&self) -> (f64, f64);

    /// Distortion constant `c >= 1` in `s_i s_j <= c * s_ij`.
    fn distortion(&self) -> f64;

    /// Whether `s_ij = s_i s_j` holds exactly; required by the Euler
    /// factorization.
    fn is_multiplicative(&self) -> bool {
        self.distortion() == 1.0
    }
}

/// Multiplicative weights from per-symbol contraction ratios: the weight of a
/// word is the product of the ratios of its symbols, as for the cylinder
/// diameters of a self-similar iterated function system.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityWeights {
    ratios: Vec<f64>,
    log_ratios: Vec<f64>,
}

impl SimilarityWeights {
    /// Requires at least two ratios, each strictly inside `(0, 1)`.
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.len() < 2 {
            return Err(Error::AlphabetTooSmall(ratios.len() as u8));
        }
        if ratios.len() > u8::MAX as usize {
            return Err(Error::InvalidModel("alphabet larger than 255 symbols".into()));
        }
        if let Some(&bad) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidModel(format!(
                "contraction ratios must lie strictly in (0, 1), got {bad}"
            )));
        }
        let log_ratios = ratios.iter().map(|r| r.ln()).collect();
        Ok(Self { ratios, log_ratios })
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }
}

impl WeightSystem for SimilarityWeights {
    fn alphabet(&self) -> u8 {
        self.ratios.len() as u8
    }

    fn log_weight(&self, w: &Word) -> Result<f64> {
        if w.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet(),
                right: w.alphabet(),
            });
        }
        Ok(w.symbols()
            .iter()
            .map(|&s| self.log_ratios[s as usize])
            .sum())
    }

    fn log_weight_from_counts(&self, counts: &[u32]) -> Option<f64> {
        if counts.len() != self.ratios.len() {
            return None;
        }
        Some(
            counts
                .iter()
                .zip(&self.log_ratios)
                .map(|(&k, &lr)| k as f64 * lr)
                .sum(),
        )
    }

    fn log_weight_bounds(&self) -> (f64, f64) {
        let lo = self.log_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.log_ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn distortion(&self) -> f64 {
        1.0
    }
}

/// Which weight axiom a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightAxiom {
    /// `s_min^n <= s_i <= s_max^n`.
    Bounds,
    /// `s_ij <= s_i s_j <= c * s_ij`.
    QuasiMultiplicative,
    /// `s_i < s_(parent of i)`.
    ParentMonotone,
}

/// One witnessed axiom failure.
#[derive(Debug, Clone)]
pub struct AxiomViolation {
    pub axiom: WeightAxiom,
    pub word: Word,
    /// For quasi-multiplicativity, the split position of the witnessing pair.
    pub split: Option<usize>,
    pub detail: String,
}

/// Outcome of an exhaustive axiom sweep.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub words_checked: usize,
    pub splits_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three weight axioms over every word of length `1..=max_len`,
/// and quasi-multiplicativity over every split of every such word.
///
/// Comparisons run in log space with absolute slack `tol` (strict
/// inequalities are demanded outright; they hold with margin for any genuine
/// contraction system). Errors if the word count exceeds the sweep budget.
pub fn check_weight_axioms(
    ws: &dyn WeightSystem,
    max_len: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if max_len == 0 {
        return Err(Error::ZeroLevel);
    }
    let alphabet = ws.alphabet();
    let mut total: usize = 0;
    let mut pow: usize = 1;
    for _ in 1..=max_len {
        pow = pow.saturating_mul(alphabet as usize);
        total = total.saturating_add(pow);
    }
    if total > AXIOM_WORD_BUDGET {
        return Err(Error::EnumerationBudget { level: max_len, alphabet });
    }

    let (c_min, c_max) = ws.log_weight_bounds();
    let log_distortion = ws.distortion().ln();
    let mut report = AxiomReport {
        words_checked: 0,
        splits_checked: 0,
        violations: Vec::new(),
    };

    for n in 1..=max_len {
        for w in enumerate_words(n, alphabet)? {
            let lw = ws.log_weight(&w)?;
            report.words_checked += 1;

            let (lo, hi) = (n as f64 * c_min, n as f64 * c_max);
            if lw < lo - tol || lw > hi + tol {
                report.violations.push(AxiomViolation {
                    axiom: WeightAxiom::Bounds,
                    word: w.clone(),
                    split: None,
                    detail: format!("log weight {lw} outside [{lo}, {hi}]"),
                });
            }

            if let Some(parent) = w.parent() {
                let lp = ws.log_weight(&parent)?;
                if !(lw < lp) {
                    report.violations.push(AxiomViolation {
                        axiom: WeightAxiom::ParentMonotone,
                        word: w.clone(),
                        split: None,
                        detail: format!("log weight {lw} not below parent's {lp}"),
                    });
                }
            }

            for split in 1..n {
                let u = Word::new(w.symbols()[..split].to_vec(), alphabet)?;
                let v = Word::new(w.symbols()[split..].to_vec(), alphabet)?;
                let sum = ws.log_weight(&u)? + ws.log_weight(&v)?;
                report.splits_checked += 1;
                // ln s_ij <= ln s_i + ln s_j <= ln c + ln s_ij.
                if lw > sum + tol || sum > lw + log_distortion + tol {
                    report.violations.push(AxiomViolation {
                        axiom: WeightAxiom::QuasiMultiplicative,
                        word: w.clone(),
                        split: Some(split),
                        detail: format!(
                            "log weight {lw}, split sum {sum}, log distortion {log_distortion}"
                        ),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word(digits: &str, alphabet: u8) -> Word {
        Word::parse(digits, alphabet).unwrap()
    }

    #[test]
    fn similarity_validation() {
        assert!(SimilarityWeights::new(vec![0.5]).is_err());
        assert!(SimilarityWeights::new(vec![0.5, 1.0]).is_err());
        assert!(SimilarityWeights::new(vec![0.5, 0.0]).is_err());
        assert!(SimilarityWeights::new(vec![0.5, -0.2]).is_err());
        let ws = SimilarityWeights::new(vec![0.5, 0.25]).unwrap();
        assert_eq!(ws.alphabet(), 2);
        assert!(ws.is_multiplicative());
    }

    #[test]
    fn similarity_log_weight_is_ratio_product() {
        let ws = SimilarityWeights::new(vec![0.5, 0.25]).unwrap();
        // s_0110 = 0.5 * 0.25 * 0.25 * 0.5 = 2^-6.
        let lw = ws.log_weight(&word("0110", 2)).unwrap();
        assert!((lw - (-6.0 * 2.0f64.ln())).abs() < 1e-13);
        let from_counts = ws.log_weight_from_counts(&[2, 2]).unwrap();
        assert!((lw - from_counts).abs() < 1e-13);
        assert_eq!(ws.log_weight_from_counts(&[1, 1, 1]), None);
        assert!(ws.log_weight(&word("012", 3)).is_err());
    }

    #[test]
    fn similarity_bounds() {
        let ws = SimilarityWeights::new(vec![0.5, 0.25, 0.9]).unwrap();
        let (lo, hi) = ws.log_weight_bounds();
        assert!((lo - 0.25f64.ln()).abs() < 1e-15);
        assert!((hi - 0.9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn axiom_sweep_passes_for_similarity() {
        let ws = SimilarityWeights::new(vec![0.3, 0.6]).unwrap();
        let report = check_weight_axioms(&ws, 6, 1e-12).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert_eq!(report.words_checked, 2 + 4 + 8 + 16 + 32 + 64);
        // Splits: sum over n of (n - 1) * 2^n.
        assert_eq!(report.splits_checked, 4 + 2 * 8 + 3 * 16 + 4 * 32 + 5 * 64);
    }

    #[test]
    fn axiom_sweep_budget() {
        let ws = SimilarityWeights::new(vec![0.3, 0.6]).unwrap();
        assert!(matches!(
            check_weight_axioms(&ws, 40, 1e-12),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    /// Deliberately broken system: the weight of words starting with symbol 1
    /// is inflated, violating quasi-multiplicativity and the upper bound.
    struct Lopsided;

    impl WeightSystem for Lopsided {
        fn alphabet(&self) -> u8 {
            2
        }
        fn log_weight(&self, w: &Word) -> Result<f64> {
            let base: f64 = w.len() as f64 * 0.5f64.ln();
            Ok(if w.symbols()[0] == 1 { base + 0.3 } else { base })
        }
        fn log_weight_from_counts(&self, _counts: &[u32]) -> Option<f64> {
            None
        }
        fn log_weight_bounds(&self) -> (f64, f64) {
            (0.5f64.ln(), 0.5f64.ln())
        }
        fn distortion(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn axiom_sweep_catches_violations() {
        let report = check_weight_axioms(&Lopsided, 4, 1e-12).unwrap();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == WeightAxiom::Bounds));
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == WeightAxiom::QuasiMultiplicative));
    }

    proptest! {
        #[test]
        fn log_weight_is_additive_under_concat(
            r0 in 0.05f64..0.95,
            r1 in 0.05f64..0.95,
            u in proptest::collection::vec(0u8..2, 1..8),
            v in proptest::collection::vec(0u8..2, 1..8),
        ) {
            let ws = SimilarityWeights::new(vec![r0, r1]).unwrap();
            let u = Word::new(u, 2).unwrap();
            let v = Word::new(v, 2).unwrap();
            let uv = u.concat(&v).unwrap();
            let lhs = ws.log_weight(&uv).unwrap();
            let rhs = ws.log_weight(&u).unwrap() + ws.log_weight(&v).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn counts_and_sequential_weights_agree(
            r0 in 0.05f64..0.95,
            r1 in 0.05f64..0.95,
            symbols in proptest::collection::vec(0u8..2, 1..50),
        ) {
            let ws = SimilarityWeights::new(vec![r0, r1]).unwrap();
            let w = Word::new(symbols, 2).unwrap();
            let seq = ws.log_weight(&w).unwrap();
            let grouped = ws.log_weight_from_counts(&w.counts()).unwrap();
            prop_assert!((seq - grouped).abs() < 1e-10);
        }
    }
}
