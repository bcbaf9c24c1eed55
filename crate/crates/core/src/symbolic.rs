//! Finite words over a fixed alphabet and the two enumeration schemes the
//! zeta sums run on.
//!
//! A level-`n` sum ranges over the `N^n` words of length `n`. When every
//! quantity in the summand depends only on how often each symbol occurs, the
//! sum collapses to the `C(n + N - 1, N - 1)` symbol-count vectors
//! ([`compositions`]), each carrying a log-multinomial weight. That collapse
//! is what makes level ladders up to `n = 4000` affordable; the raw
//! enumeration ([`enumerate_words`]) stays available as the exact fallback
//! and as the brute-force oracle in tests.
//!
//! The module also provides the primitive-word ("prime") test used by the
//! Euler factorization, and cyclic window averages for Birkhoff statistics:
//! the average of a `k`-gram table over the periodic extension of a word.

use crate::{Error, Result};
use crate::numeric::LogFactorials;

/// Upper bound on `C(n + N - 1, N - 1)` before [`compositions`] refuses to
/// enumerate. Protects against ladders that would silently allocate for
/// hours; the default level caps stay far below it.
pub const COMPOSITION_BUDGET: f64 = (1u64 << 24) as f64;

/// A non-empty word over the alphabet `{0, .., alphabet - 1}`.
///
/// Words are ordered lexicographically (symbol by symbol), which matches the
/// order [`enumerate_words`] produces them in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    symbols: Vec<u8>,
    alphabet: u8,
}

impl Word {
    /// Validates that the word is non-empty and every symbol is in range.
    pub fn new(symbols: Vec<u8>, alphabet: u8) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall(alphabet));
        }
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::SymbolOutOfRange { symbol: bad, alphabet });
        }
        Ok(Self { symbols, alphabet })
    }

    /// Parses a digit string like `"0110"`. Only alphabets up to 10 symbols.
    pub fn parse(digits: &str, alphabet: u8) -> Result<Self> {
        if alphabet > 10 {
            return Err(Error::InvalidArgument(
                "digit parsing only covers alphabets up to 10 symbols".into(),
            ));
        }
        let symbols = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad digit {c:?} in word")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(symbols, alphabet)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    /// The word with the last symbol removed; `None` for single symbols.
    pub fn parent(&self) -> Option<Word> {
        if self.symbols.len() == 1 {
            return None;
        }
        Some(Word {
            symbols: self.symbols[..self.symbols.len() - 1].to_vec(),
            alphabet: self.alphabet,
        })
    }

    /// Concatenation `self * other`. Both words must share the alphabet.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet,
                right: other.alphabet,
            });
        }
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Ok(Word { symbols, alphabet: self.alphabet })
    }

    /// `k`-fold repetition of the word, `k >= 1`.
    pub fn power(&self, k: usize) -> Result<Word> {
        if k == 0 {
            return Err(Error::ZeroLevel);
        }
        let mut symbols = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            symbols.extend_from_slice(&self.symbols);
        }
        Ok(Word { symbols, alphabet: self.alphabet })
    }

    /// How often each symbol occurs, indexed by symbol.
    pub fn counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.alphabet as usize];
        for &s in &self.symbols {
            counts[s as usize] += 1;
        }
        counts
    }

    /// Smallest `p >= 1` with `w[i] = w[i + p]` for all valid `i`, via the
    /// border array (the KMP failure function of the whole word).
    pub fn minimal_period(&self) -> usize {
        let w = &self.symbols;
        let n = w.len();
        // border[i] = length of the longest proper border of w[..=i].
        let mut border = vec![0usize; n];
        let mut k = 0;
        for i in 1..n {
            while k > 0 && w[i] != w[k] {
                k = border[k - 1];
            }
            if w[i] == w[k] {
                k += 1;
            }
            border[i] = k;
        }
        n - border[n - 1]
    }

    /// Whether the word is prime, i.e. not a proper power `u^k` with
    /// `k >= 2`. A word is a proper power exactly when its minimal period is
    /// a proper divisor of its length.
    pub fn is_prime(&self) -> bool {
        let p = self.minimal_period();
        p == self.len() || self.len() % p != 0
    }

    /// The prime word `u` and exponent `k` with `self = u^k`.
    pub fn prime_root(&self) -> (Word, usize) {
        let p = self.minimal_period();
        if self.len() % p != 0 {
            return (self.clone(), 1);
        }
        let root = Word {
            symbols: self.symbols[..p].to_vec(),
            alphabet: self.alphabet,
        };
        (root, self.len() / p)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.alphabet <= 10 {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Lexicographic enumeration of all words of length `n` over `alphabet`
/// symbols. Rejects `n = 0` and alphabets smaller than 2.
pub fn enumerate_words(n: usize, alphabet: u8) -> Result<WordIter> {
    if alphabet < 2 {
        return Err(Error::AlphabetTooSmall(alphabet));
    }
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    Ok(WordIter {
        next: Some(vec![0u8; n]),
        alphabet,
    })
}

/// Iterator produced by [`enumerate_words`]; an odometer over symbol vectors.
#[derive(Debug, Clone)]
pub struct WordIter {
    next: Option<Vec<u8>>,
    alphabet: u8,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut advanced = false;
        for pos in (0..succ.len()).rev() {
            if succ[pos] + 1 < self.alphabet {
                succ[pos] += 1;
                for s in &mut succ[pos + 1..] {
                    *s = 0;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(Word { symbols: current, alphabet: self.alphabet })
    }
}

/// A symbol-count vector of a level, with the log of how many words share it.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    counts: Vec<u32>,
    log_multinomial: f64,
}

impl Composition {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// The level `n = sum of counts`.
    pub fn level(&self) -> usize {
        self.counts.iter().map(|&k| k as usize).sum()
    }

    /// `ln` of the multinomial coefficient counting the words with these
    /// symbol counts.
    pub fn log_multinomial(&self) -> f64 {
        self.log_multinomial
    }
}

/// Enumerates the symbol-count vectors of level `n` over `alphabet` symbols,
/// each with its log-multinomial weight. `C(n + N - 1, N - 1)` items.
pub fn compositions(n: usize, alphabet: u8) -> Result<CompositionIter> {
    if alphabet < 2 {
        return Err(Error::AlphabetTooSmall(alphabet));
    }
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    // C(n + N - 1, N - 1) in floating point is plenty for a budget check.
    let mut count = 1.0f64;
    for j in 1..alphabet as u64 {
        count *= (n as f64 + j as f64) / j as f64;
    }
    if count > COMPOSITION_BUDGET {
        return Err(Error::EnumerationBudget { level: n, alphabet });
    }
    let mut counts = vec![0u32; alphabet as usize];
    counts[0] = n as u32;
    Ok(CompositionIter {
        next: Some(counts),
        factorials: LogFactorials::up_to(n),
    })
}

/// Iterator produced by [`compositions`]. Colexicographic order: all mass on
/// the first symbol first, all mass on the last symbol last.
#[derive(Debug, Clone)]
pub struct CompositionIter {
    next: Option<Vec<u32>>,
    factorials: LogFactorials,
}

impl Iterator for CompositionIter {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        let item = Composition {
            log_multinomial: self.factorials.ln_multinomial(&current),
            counts: current.clone(),
        };
        let mut succ = current;
        let last = succ.len() - 1;
        if succ[0] > 0 {
            succ[0] -= 1;
            succ[1] += 1;
            self.next = Some(succ);
        } else if let Some(j) = (1..last).find(|&j| succ[j] > 0) {
            let v = succ[j];
            succ[j] = 0;
            succ[0] = v - 1;
            succ[j + 1] += 1;
            self.next = Some(succ);
        }
        Some(item)
    }
}

/// A function table on `k`-grams: `values[idx]` where `idx` reads the gram as
/// a base-`alphabet` number, most significant symbol first.
#[derive(Debug, Clone, PartialEq)]
pub struct GramTable {
    values: Vec<f64>,
    window: usize,
    alphabet: u8,
}

impl GramTable {
    /// Requires `values.len() == alphabet^window`, `window >= 1`, and finite
    /// entries.
    pub fn new(values: Vec<f64>, window: usize, alphabet: u8) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall(alphabet));
        }
        if window == 0 {
            return Err(Error::InvalidStatistic("window must be at least 1".into()));
        }
        let expected = (alphabet as usize)
            .checked_pow(window as u32)
            .ok_or_else(|| Error::InvalidStatistic("window overflows the table index".into()))?;
        if values.len() != expected {
            return Err(Error::InvalidStatistic(format!(
                "table has {} entries, expected alphabet^window = {expected}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidStatistic(format!(
                "table entries must be finite, found {bad}"
            )));
        }
        Ok(Self { values, window, alphabet })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute table entry; the Lipschitz-style constant behind the
    /// cyclic-window slack bound.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Table value of the cyclic `k`-gram of `w` starting at `start`.
    pub fn value_at(&self, w: &Word, start: usize) -> f64 {
        let symbols = w.symbols();
        let n = symbols.len();
        let mut idx = 0usize;
        for j in 0..self.window {
            idx = idx * self.alphabet as usize + symbols[(start + j) % n] as usize;
        }
        self.values[idx]
    }
}

/// Mean of the `k`-gram table over all `n` cyclic windows of `w`; the
/// Birkhoff average of the table along the periodic extension of `w`.
///
/// For `k = 1` this is exactly the symbol-frequency average, so it depends
/// only on the word's composition; for `k >= 2` it differs from the genuine
/// (non-cyclic) average by at most `2 max|f| (k - 1) / n`.
pub fn cyclic_birkhoff_average(w: &Word, table: &GramTable) -> Result<f64> {
    if w.alphabet() != table.alphabet() {
        return Err(Error::AlphabetMismatch {
            left: w.alphabet(),
            right: table.alphabet(),
        });
    }
    let n = w.len();
    let mut sum = 0.0;
    for start in 0..n {
        sum += table.value_at(w, start);
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_sum_exp;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn word(digits: &str, alphabet: u8) -> Word {
        Word::parse(digits, alphabet).unwrap()
    }

    #[test]
    fn word_validation() {
        assert!(matches!(Word::new(vec![], 2), Err(Error::EmptyWord)));
        assert!(matches!(Word::new(vec![0], 1), Err(Error::AlphabetTooSmall(1))));
        assert!(matches!(
            Word::new(vec![0, 2], 2),
            Err(Error::SymbolOutOfRange { symbol: 2, alphabet: 2 })
        ));
        assert_eq!(word("0110", 2).to_string(), "0110");
    }

    #[test]
    fn parent_concat_power() {
        let w = word("011", 2);
        assert_eq!(w.parent().unwrap(), word("01", 2));
        assert_eq!(word("0", 2).parent(), None);
        let uv = word("01", 2).concat(&word("10", 2)).unwrap();
        assert_eq!(uv, word("0110", 2));
        assert_eq!(word("01", 2).power(3).unwrap(), word("010101", 2));
        assert!(word("01", 2).power(0).is_err());
        assert!(word("0", 2).concat(&word("0", 3)).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let words: Vec<Word> = enumerate_words(3, 2).unwrap().collect();
        assert_eq!(words.len(), 8);
        assert_eq!(words[0], word("000", 2));
        assert_eq!(words[1], word("001", 2));
        assert_eq!(words[7], word("111", 2));
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(sorted, words);

        assert!(enumerate_words(0, 2).is_err());
        assert!(enumerate_words(3, 1).is_err());
        assert_eq!(enumerate_words(4, 3).unwrap().count(), 81);
    }

    #[test]
    fn prime_words_match_known_cases() {
        assert!(word("01", 2).is_prime());
        assert!(word("011", 2).is_prime());
        assert!(word("0110", 2).is_prime());
        assert!(!word("0101", 2).is_prime());
        assert!(!word("000", 2).is_prime());
        assert!(word("0", 2).is_prime());
        // Minimal period 2 does not divide 3: still prime.
        assert!(word("010", 2).is_prime());
        assert_eq!(word("0101", 2).minimal_period(), 2);
        assert_eq!(word("0110", 2).minimal_period(), 3);
        assert_eq!(word("000", 2).minimal_period(), 1);
        assert_eq!(word("010", 2).minimal_period(), 2);
    }

    #[test]
    fn prime_root_reconstructs_word() {
        let (root, k) = word("010101", 2).prime_root();
        assert_eq!(root, word("01", 2));
        assert_eq!(k, 3);
        let (root, k) = word("0110", 2).prime_root();
        assert_eq!(root, word("0110", 2));
        assert_eq!(k, 1);
    }

    /// Count of prime words of length `n` by Moebius inversion over the
    /// divisors of `n`: `sum_{d | n} mu(d) N^{n/d}`.
    fn aperiodic_count(n: u64, alphabet: u64) -> i64 {
        fn moebius(mut d: u64) -> i64 {
            let mut mu = 1i64;
            let mut p = 2;
            while p * p <= d {
                if d % p == 0 {
                    d /= p;
                    if d % p == 0 {
                        return 0;
                    }
                    mu = -mu;
                }
                p += 1;
            }
            if d > 1 {
                mu = -mu;
            }
            mu
        }
        (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| moebius(d) * (alphabet as i64).pow((n / d) as u32))
            .sum()
    }

    #[test]
    fn prime_counts_match_moebius_formula() {
        for alphabet in [2u8, 3] {
            for n in 1..=10usize {
                let brute = enumerate_words(n, alphabet)
                    .unwrap()
                    .filter(Word::is_prime)
                    .count() as i64;
                assert_eq!(
                    brute,
                    aperiodic_count(n as u64, alphabet as u64),
                    "n = {n}, alphabet = {alphabet}"
                );
            }
        }
    }

    #[test]
    fn composition_count_and_mass() {
        // C(n + N - 1, N - 1) items, total multinomial mass N^n.
        for (n, alphabet, expect) in [(5usize, 2u8, 6usize), (4, 3, 15), (3, 4, 20)] {
            let comps: Vec<Composition> = compositions(n, alphabet).unwrap().collect();
            assert_eq!(comps.len(), expect, "n = {n}, N = {alphabet}");
            for c in &comps {
                assert_eq!(c.level(), n);
            }
            let logs: Vec<f64> = comps.iter().map(Composition::log_multinomial).collect();
            let total = log_sum_exp(&logs).unwrap();
            let expect_mass = n as f64 * (alphabet as f64).ln();
            assert!((total - expect_mass).abs() < 1e-10);
        }
    }

    #[test]
    fn compositions_match_brute_force_grouping() {
        for (n, alphabet) in [(6usize, 2u8), (5, 3)] {
            let mut by_counts: HashMap<Vec<u32>, u64> = HashMap::new();
            for w in enumerate_words(n, alphabet).unwrap() {
                *by_counts.entry(w.counts()).or_insert(0) += 1;
            }
            let comps: Vec<Composition> = compositions(n, alphabet).unwrap().collect();
            assert_eq!(comps.len(), by_counts.len());
            for c in &comps {
                let brute = by_counts[c.counts()] as f64;
                assert!((c.log_multinomial() - brute.ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn composition_budget_guard() {
        // N = 4 at level 4000 would need ~1.1e10 compositions.
        assert!(matches!(
            compositions(4000, 4),
            Err(Error::EnumerationBudget { level: 4000, alphabet: 4 })
        ));
        assert!(compositions(4000, 2).is_ok());
    }

    #[test]
    fn gram_table_validation_and_lookup() {
        assert!(GramTable::new(vec![0.0; 3], 1, 2).is_err());
        assert!(GramTable::new(vec![0.0, f64::NAN], 1, 2).is_err());
        let t = GramTable::new(vec![0.0, 1.0, 2.0, 3.0], 2, 2).unwrap();
        let w = word("01", 2);
        // Windows: "01" -> 1, "10" -> 2 (cyclic).
        assert_eq!(t.value_at(&w, 0), 1.0);
        assert_eq!(t.value_at(&w, 1), 2.0);
        assert_eq!(cyclic_birkhoff_average(&w, &t).unwrap(), 1.5);
        assert_eq!(t.max_abs(), 3.0);
    }

    #[test]
    fn cyclic_average_on_single_symbol_wraps() {
        let t = GramTable::new(vec![0.0, 1.0, 2.0, 3.0], 2, 2).unwrap();
        // "1" extends to "111..", every window is "11" -> 3.
        assert_eq!(cyclic_birkhoff_average(&word("1", 2), &t).unwrap(), 3.0);
        let t3 = GramTable::new(vec![5.0; 9], 2, 3).unwrap();
        assert!(cyclic_birkhoff_average(&word("1", 2), &t3).is_err());
    }

    #[test]
    fn window_one_average_is_symbol_frequency() {
        let t = GramTable::new(vec![0.0, 1.0], 1, 2).unwrap();
        let w = word("01101", 2);
        let freq = w.counts()[1] as f64 / w.len() as f64;
        assert!((cyclic_birkhoff_average(&w, &t).unwrap() - freq).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn prime_root_is_prime_and_reconstructs(
            symbols in proptest::collection::vec(0u8..2, 1..24),
        ) {
            let w = Word::new(symbols, 2).unwrap();
            let (root, k) = w.prime_root();
            prop_assert!(root.is_prime());
            prop_assert_eq!(root.power(k).unwrap(), w);
        }

        #[test]
        fn proper_powers_are_composite(
            symbols in proptest::collection::vec(0u8..3, 1..8),
            k in 2usize..5,
        ) {
            let w = Word::new(symbols, 3).unwrap();
            prop_assert!(!w.power(k).unwrap().is_prime());
        }

        #[test]
        fn cyclic_average_bounded_by_table_range(
            symbols in proptest::collection::vec(0u8..2, 1..16),
            values in proptest::collection::vec(-10.0f64..10.0, 4),
        ) {
            let w = Word::new(symbols, 2).unwrap();
            let t = GramTable::new(values.clone(), 2, 2).unwrap();
            let avg = cyclic_birkhoff_average(&w, &t).unwrap();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(avg >= lo - 1e-12 && avg <= hi + 1e-12);
        }
    }
}
