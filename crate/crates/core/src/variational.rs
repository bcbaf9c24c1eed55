//! Variational oracle: maximize a dimension functional over measure
//! families subject to a constraint on the limiting statistic.
//!
//! For a shift-invariant measure `mu` with entropy `h` and Lyapunov
//! integral `lambda = sum_a pi_a ln r_a < 0`, the dimension functional is
//! `-h / lambda`. The variational principle says the supremum of this
//! functional over measures whose limiting statistic `U mu` lies in the
//! target equals the spectrum value (and the zeta abscissa) for that
//! target. Restricted to product (Bernoulli) measures the supremum is
//! already exact for ratio statistics and window-1 Birkhoff averages;
//! memory-1 Markov measures extend the family far enough to capture
//! window-2 statistics. That family-exactness is treated here as a tested
//! hypothesis, cross-checked numerically against the Legendre transform,
//! not as something this crate proves.
//!
//! The search runs a dense parameter grid followed by local refinement.
//! On a two-symbol alphabet the Bernoulli family is one-dimensional and
//! the feasible set is resolved exactly: sign changes of
//! `dist(U(pi), target) - radius` are bisected to the feasible intervals,
//! including slivers thinner than the grid step, and the functional is
//! maximized on each interval by golden-section search (the functional is
//! quasi-concave along the simplex). Higher-dimensional families use
//! Nelder-Mead refinement with infeasible points rejected, restarted with
//! seeded jitter; very thin feasible sets reached through a
//! distance-minimization phase first. Those paths are best-effort: a
//! sliver the grid, the distance phase, and the restarts all miss can be
//! reported infeasible.

use crate::numeric::{golden_section_max, nelder_mead_max, KahanSum};
use crate::statistics::WordStatistic;
use crate::targets::Target;
use crate::{Error, ExtReal, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Residual allowed on the stationarity identity of a Markov measure.
pub const STATIONARY_TOL: f64 = 1e-12;

/// Grid resolution along the Bernoulli simplex for a two-symbol alphabet.
const FINE_STEPS: usize = 1000;

/// Nelder-Mead jitter restarts for the multi-dimensional families.
const RESTARTS: usize = 8;

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn validate_distribution(pi: &[f64], what: &str) -> Result<()> {
    if pi.len() < 2 {
        return Err(Error::InvalidModel(format!("{what} needs at least 2 entries")));
    }
    if pi.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "{what} entries must be finite and non-negative"
        )));
    }
    let mut sum = KahanSum::new();
    for &p in pi {
        sum.add(p);
    }
    if (sum.value() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidModel(format!(
            "{what} must sum to 1, got {}",
            sum.value()
        )));
    }
    Ok(())
}

/// An infinite product of one probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliMeasure {
    pi: Vec<f64>,
}

impl BernoulliMeasure {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        validate_distribution(&pi, "probability vector")?;
        Ok(BernoulliMeasure { pi })
    }

    pub fn probs(&self) -> &[f64] {
        &self.pi
    }

    /// Shannon entropy in nats, with the `0 ln 0 = 0` convention.
    pub fn entropy(&self) -> f64 {
        let mut h = KahanSum::new();
        for &p in &self.pi {
            h.add(entropy_term(p));
        }
        h.value()
    }
}

/// A stationary memory-1 Markov measure: a stochastic transition matrix
/// together with a stationary marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self> {
        let n = transition.len();
        if n < 2 {
            return Err(Error::InvalidModel("transition matrix needs at least 2 states".into()));
        }
        for row in &transition {
            if row.len() != n {
                return Err(Error::InvalidModel("transition matrix must be square".into()));
            }
            validate_distribution(row, "transition row")?;
        }
        let stationary = stationary_vector(&transition)?;
        Ok(MarkovMeasure { transition, stationary })
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Entropy rate `-sum_a pi_a sum_b P_ab ln P_ab` in nats.
    pub fn entropy(&self) -> f64 {
        let mut h = KahanSum::new();
        for (a, row) in self.transition.iter().enumerate() {
            for &p in row {
                h.add(self.stationary[a] * entropy_term(p));
            }
        }
        h.value()
    }
}

/// Solves `pi P = pi` on the simplex. Two states get the closed form; more
/// states run a lazy power iteration (averaging with the identity keeps
/// periodic chains convergent).
fn stationary_vector(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let pi = if n == 2 {
        // Balance equation: pi_0 P_01 = pi_1 P_10.
        let leave0 = p[0][1];
        let leave1 = p[1][0];
        let total = leave0 + leave1;
        if total == 0.0 {
            // Identity chain: every distribution is stationary.
            vec![0.5, 0.5]
        } else {
            vec![leave1 / total, leave0 / total]
        }
    } else {
        let mut pi = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        for _ in 0..20_000 {
            for x in next.iter_mut() {
                *x = 0.0;
            }
            for a in 0..n {
                for b in 0..n {
                    next[b] += pi[a] * p[a][b];
                }
            }
            let mut moved: f64 = 0.0;
            for a in 0..n {
                let lazy = 0.5 * (pi[a] + next[a]);
                moved = moved.max((lazy - pi[a]).abs());
                pi[a] = lazy;
            }
            if moved < 1e-16 {
                break;
            }
        }
        pi
    };
    // Verify the fixed point regardless of how it was produced.
    let mut residual: f64 = 0.0;
    for b in 0..n {
        let mut acc = KahanSum::new();
        for a in 0..n {
            acc.add(pi[a] * p[a][b]);
        }
        residual = residual.max((acc.value() - pi[b]).abs());
    }
    if residual > STATIONARY_TOL {
        return Err(Error::InvalidModel(format!(
            "stationary vector did not converge (residual {residual:.2e})"
        )));
    }
    Ok(pi)
}

/// A measure from one of the supported families.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Bernoulli(BernoulliMeasure),
    Markov(MarkovMeasure),
}

impl Measure {
    pub fn alphabet_size(&self) -> usize {
        match self {
            Measure::Bernoulli(b) => b.probs().len(),
            Measure::Markov(m) => m.stationary().len(),
        }
    }

    pub fn stationary(&self) -> &[f64] {
        match self {
            Measure::Bernoulli(b) => b.probs(),
            Measure::Markov(m) => m.stationary(),
        }
    }

    pub fn entropy(&self) -> f64 {
        match self {
            Measure::Bernoulli(b) => b.entropy(),
            Measure::Markov(m) => m.entropy(),
        }
    }

    /// Mass of the cylinder of a symbol window (most significant first).
    fn window_mass(&self, digits: &[u8]) -> f64 {
        match self {
            Measure::Bernoulli(b) => digits.iter().map(|&d| b.probs()[d as usize]).product(),
            Measure::Markov(m) => {
                let mut mass = m.stationary()[digits[0] as usize];
                for pair in digits.windows(2) {
                    mass *= m.transition()[pair[0] as usize][pair[1] as usize];
                }
                mass
            }
        }
    }
}

/// The family over which [`constrained_sup`] optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureFamily {
    Bernoulli,
    Markov1,
}

/// Outcome of a constrained variational maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalResult {
    /// The supremum found; negative infinity when no feasible measure was
    /// located.
    pub value: ExtReal,
    pub argmax: Option<Measure>,
    pub feasible: bool,
}

fn validate_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.len() < 2 {
        return Err(Error::InvalidModel("need at least 2 contraction ratios".into()));
    }
    if ratios.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidModel("contraction ratios must lie in (0, 1)".into()));
    }
    Ok(())
}

/// `-h(mu) / sum_a pi_a ln r_a`: entropy over expansion, the quantity the
/// variational principle maximizes. Always non-negative.
pub fn dimension_functional(measure: &Measure, ratios: &[f64]) -> Result<f64> {
    validate_ratios(ratios)?;
    if ratios.len() != measure.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: ratios.len() as u8,
            right: measure.alphabet_size() as u8,
        });
    }
    let mut lambda = KahanSum::new();
    for (a, &r) in ratios.iter().enumerate() {
        lambda.add(measure.stationary()[a] * r.ln());
    }
    Ok(-measure.entropy() / lambda.value())
}

/// The limiting statistic `U mu` of a measure: the value word statistics
/// converge to along typical words of the measure.
pub fn u_value(measure: &Measure, stat: &WordStatistic) -> Result<Vec<f64>> {
    if measure.alphabet_size() != stat.alphabet() as usize {
        return Err(Error::AlphabetMismatch {
            left: measure.alphabet_size() as u8,
            right: stat.alphabet(),
        });
    }
    match stat {
        WordStatistic::Ratio(rs) => {
            let pi = measure.stationary();
            let mut den = KahanSum::new();
            for (a, &lr) in rs.log_ratios().iter().enumerate() {
                den.add(pi[a] * lr);
            }
            let den = den.value();
            let mut out = Vec::with_capacity(rs.log_probs().len());
            for row in rs.log_probs() {
                let mut num = KahanSum::new();
                for (a, &lp) in row.iter().enumerate() {
                    num.add(pi[a] * lp);
                }
                out.push(num.value() / den);
            }
            Ok(out)
        }
        WordStatistic::Birkhoff(bs) => {
            let table = bs.table();
            let n = table.alphabet() as usize;
            let k = table.window();
            let mut digits = vec![0u8; k];
            let mut acc = KahanSum::new();
            for (idx, &f) in table.values().iter().enumerate() {
                let mut rest = idx;
                for pos in (0..k).rev() {
                    digits[pos] = (rest % n) as u8;
                    rest /= n;
                }
                acc.add(measure.window_mass(&digits) * f);
            }
            Ok(vec![acc.value()])
        }
    }
}

/// Shared search state: tracks the best feasible measure seen.
struct Search<'a> {
    ratios: &'a [f64],
    stat: &'a WordStatistic,
    target: &'a Target,
    radius: f64,
    best: Option<(f64, Measure)>,
}

impl<'a> Search<'a> {
    fn constraint_gap(&self, m: &Measure) -> Result<f64> {
        Ok(self.target.dist(&u_value(m, self.stat)?) - self.radius)
    }

    /// Returns the functional when feasible, `-inf` otherwise, recording
    /// new records.
    fn score(&mut self, m: &Measure) -> Result<f64> {
        if self.constraint_gap(m)? > 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let v = dimension_functional(m, self.ratios)?;
        if self.best.as_ref().map_or(true, |(b, _)| v > *b) {
            self.best = Some((v, m.clone()));
        }
        Ok(v)
    }
}

/// Maximizes the dimension functional over the family, subject to
/// `dist(U mu, target) <= radius`.
///
/// `seed` drives the jitter restarts of the multi-dimensional refinement;
/// the whole search is deterministic in its inputs. Infeasible problems
/// (including empty targets) yield a negative-infinity result rather than
/// an error.
pub fn constrained_sup(
    ratios: &[f64],
    stat: &WordStatistic,
    target: &Target,
    radius: f64,
    family: MeasureFamily,
    seed: u64,
) -> Result<VariationalResult> {
    validate_ratios(ratios)?;
    if ratios.len() != stat.alphabet() as usize {
        return Err(Error::AlphabetMismatch {
            left: ratios.len() as u8,
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
            "constraint radius must be finite and non-negative, got {radius}"
        )));
    }
    let mut search = Search {
        ratios,
        stat,
        target,
        radius,
        best: None,
    };
    if target.is_empty() {
        return Ok(finish(search));
    }
    match (family, ratios.len()) {
        (MeasureFamily::Bernoulli, 2) => bernoulli_line_search(&mut search)?,
        (MeasureFamily::Bernoulli, _) => simplex_search(&mut search, seed)?,
        (MeasureFamily::Markov1, _) => markov_search(&mut search, seed)?,
    }
    Ok(finish(search))
}

fn finish(search: Search<'_>) -> VariationalResult {
    match search.best {
        Some((v, m)) => VariationalResult {
            value: ExtReal::Finite(v),
            argmax: Some(m),
            feasible: true,
        },
        None => VariationalResult {
            value: ExtReal::NegInf,
            argmax: None,
            feasible: false,
        },
    }
}

fn bernoulli_at(x: f64) -> Option<Measure> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    Some(Measure::Bernoulli(BernoulliMeasure {
        pi: vec![x, 1.0 - x],
    }))
}

/// Exact treatment of the one-dimensional Bernoulli family: locate every
/// feasible interval of `pi_0`, then maximize on each.
fn bernoulli_line_search(search: &mut Search<'_>) -> Result<()> {
    let gap_at = |s: &Search<'_>, x: f64| -> Result<f64> {
        s.constraint_gap(&bernoulli_at(x).expect("clamped parameter"))
    };
    let step = 1.0 / FINE_STEPS as f64;
    let mut gaps = Vec::with_capacity(FINE_STEPS + 1);
    for i in 0..=FINE_STEPS {
        gaps.push(gap_at(search, i as f64 * step)?);
    }

    // Anchor one point inside each feasible region, including slivers
    // strictly inside a grid cell whose endpoints are both infeasible.
    let mut anchors: Vec<f64> = Vec::new();
    for (i, &g) in gaps.iter().enumerate() {
        if g <= 0.0 {
            anchors.push(i as f64 * step);
        }
    }
    for i in 0..FINE_STEPS {
        if gaps[i] > 0.0 && gaps[i + 1] > 0.0 {
            let (lo, hi) = (i as f64 * step, (i + 1) as f64 * step);
            let mut failure = None;
            let (xm, neg_gap) = golden_section_max(
                |x| match gap_at(search, x) {
                    Ok(g) => -g,
                    Err(e) => {
                        failure = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                hi,
                48,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            if -neg_gap <= 0.0 {
                anchors.push(xm);
            }
        }
    }
    if anchors.is_empty() {
        return Ok(());
    }
    anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Expand each anchor to its maximal feasible interval by bisecting the
    // boundary crossings against the nearest infeasible grid points.
    let refine = |s: &Search<'_>, mut inside: f64, mut outside: f64| -> Result<f64> {
        for _ in 0..80 {
            let mid = 0.5 * (inside + outside);
            if gap_at(s, mid)? <= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    };
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &a in &anchors {
        let cell = ((a / step) as usize).min(FINE_STEPS);
        let mut lo = 0.0;
        let mut idx = cell;
        loop {
            if (idx as f64 * step) <= a && gaps[idx] > 0.0 {
                lo = refine(search, a, idx as f64 * step)?;
                break;
            }
            if idx == 0 {
                break;
            }
            idx -= 1;
        }
        let mut hi = 1.0;
        let mut idx = cell;
        loop {
            if (idx as f64 * step) >= a && gaps[idx] > 0.0 {
                hi = refine(search, a, idx as f64 * step)?;
                break;
            }
            if idx == FINE_STEPS {
                break;
            }
            idx += 1;
        }
        if intervals
            .last()
            .map_or(true, |&(_, prev_hi)| lo > prev_hi + 1e-12)
        {
            intervals.push((lo, hi));
        } else if let Some(last) = intervals.last_mut() {
            last.1 = last.1.max(hi);
        }
    }

    // Maximize on each interval: the functional is quasi-concave along the
    // simplex, so golden section suffices; endpoints and anchors are also
    // scored directly as insurance.
    for &(lo, hi) in &intervals {
        for x in [lo, hi] {
            search.score(&bernoulli_at(x).expect("interval endpoint in range"))?;
        }
        if hi > lo {
            let mut failure = None;
            golden_section_max(
                |x| {
                    let m = bernoulli_at(x.clamp(0.0, 1.0)).expect("clamped");
                    match search.score(&m) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            f64::NEG_INFINITY
                        }
                    }
                },
                lo,
                hi,
                96,
            );
            if let Some(e) = failure {
                return Err(e);
            }
        }
    }
    for &a in &anchors {
        search.score(&bernoulli_at(a).expect("anchor in range"))?;
    }
    Ok(())
}

/// Builds a probability vector from its first `n - 1` entries.
fn simplex_point(theta: &[f64]) -> Option<Vec<f64>> {
    let mut tail = 1.0;
    for &t in theta {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        tail -= t;
    }
    if tail < -1e-12 {
        return None;
    }
    let mut pi: Vec<f64> = theta.to_vec();
    pi.push(tail.max(0.0));
    Some(pi)
}

fn grid_steps_for(dim: usize) -> usize {
    match dim {
        1 => 1000,
        2 => 100,
        3 => 25,
        _ => 8,
    }
}

/// Grid plus Nelder-Mead refinement over a box parametrization, shared by
/// the multi-dimensional families. `build` maps a parameter point to a
/// measure, returning `None` off the family's domain.
fn refine_over_box(
    search: &mut Search<'_>,
    dim: usize,
    build: &dyn Fn(&[f64]) -> Result<Option<Measure>>,
    seed: u64,
) -> Result<()> {
    let steps = grid_steps_for(dim);
    let mut best_gap: Option<(f64, Vec<f64>)> = None;
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;
    let mut idx = vec![0usize; dim];
    loop {
        let theta: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
        if let Some(m) = build(&theta)? {
            let gap = search.constraint_gap(&m)?;
            if best_gap.as_ref().map_or(true, |(g, _)| gap < *g) {
                best_gap = Some((gap, theta.clone()));
            }
            if gap <= 0.0 {
                let v = search.score(&m)?;
                if best_feasible.as_ref().map_or(true, |(b, _)| v > *b) {
                    best_feasible = Some((v, theta.clone()));
                }
            }
        }
        let mut done = true;
        for d in 0..dim {
            idx[d] += 1;
            if idx[d] <= steps {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }

    // No feasible grid point: chase the constraint first, in case the
    // feasible set is a sliver between grid lines.
    let seed_theta = match (&best_feasible, &best_gap) {
        (Some((_, t)), _) => Some(t.clone()),
        (None, Some((gap, t))) if gap.is_finite() => {
            let mut failure = None;
            let (t2, neg_gap) = nelder_mead_max(
                |th| match build(th) {
                    Ok(Some(m)) => match search.constraint_gap(&m) {
                        Ok(g) => -g,
                        Err(e) => {
                            failure = Some(e);
                            f64::NEG_INFINITY
                        }
                    },
                    Ok(None) => f64::NEG_INFINITY,
                    Err(e) => {
                        failure = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                t,
                0.5 / steps as f64,
                400,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            (-neg_gap <= 0.0).then_some(t2)
        }
        _ => None,
    };
    let Some(seed_theta) = seed_theta else {
        return Ok(());
    };

    // Constrained refinement with jitter restarts.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1.0 / steps as f64;
    for restart in 0..=RESTARTS {
        let start: Vec<f64> = if restart == 0 {
            seed_theta.clone()
        } else {
            seed_theta
                .iter()
                .map(|&t| (t + rng.gen_range(-1.5 * step..1.5 * step)).clamp(0.0, 1.0))
                .collect()
        };
        let mut failure = None;
        nelder_mead_max(
            |th| match build(th) {
                Ok(Some(m)) => match search.score(&m) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                Ok(None) => f64::NEG_INFINITY,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            },
            &start,
            step,
            400,
        );
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(())
}

fn simplex_search(search: &mut Search<'_>, seed: u64) -> Result<()> {
    let n = search.ratios.len();
    let build = move |theta: &[f64]| -> Result<Option<Measure>> {
        Ok(simplex_point(theta)
            .map(|pi| Measure::Bernoulli(BernoulliMeasure { pi })))
    };
    refine_over_box(search, n - 1, &build, seed)
}

fn markov_search(search: &mut Search<'_>, seed: u64) -> Result<()> {
    let n = search.ratios.len();
    let build = move |theta: &[f64]| -> Result<Option<Measure>> {
        let mut rows = Vec::with_capacity(n);
        for chunk in theta.chunks(n - 1) {
            match simplex_point(chunk) {
                Some(row) => rows.push(row),
                None => return Ok(None),
            }
        }
        match MarkovMeasure::new(rows) {
            Ok(m) => Ok(Some(Measure::Markov(m))),
            // Chains whose stationary vector is numerically out of reach
            // are rejected as points, not surfaced as failures.
            Err(Error::InvalidModel(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    refine_over_box(search, n * (n - 1), &build, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::IfsModel;
    use crate::symbolic::GramTable;
    use proptest::prelude::*;

    fn binomial() -> IfsModel {
        IfsModel::new(vec![0.5, 0.5], vec![vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn functional_closed_forms() {
        let r = vec![0.5, 0.5];
        let even = Measure::Bernoulli(BernoulliMeasure::new(vec![0.5, 0.5]).unwrap());
        assert_eq!(dimension_functional(&even, &r).unwrap(), 1.0);
        let point_mass = Measure::Bernoulli(BernoulliMeasure::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(dimension_functional(&point_mass, &vec![0.3, 0.6]).unwrap(), 0.0);
        let skew = Measure::Bernoulli(BernoulliMeasure::new(vec![0.3, 0.7]).unwrap());
        let expect = 0.8812908992306927;
        assert!((dimension_functional(&skew, &r).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn measure_validation() {
        assert!(BernoulliMeasure::new(vec![0.5]).is_err());
        assert!(BernoulliMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(BernoulliMeasure::new(vec![-0.1, 1.1]).is_err());
        assert!(MarkovMeasure::new(vec![vec![0.5, 0.5]]).is_err());
        assert!(MarkovMeasure::new(vec![vec![0.5, 0.5], vec![0.7, 0.2]]).is_err());
        let m = Measure::Bernoulli(BernoulliMeasure::new(vec![0.5, 0.5]).unwrap());
        assert!(dimension_functional(&m, &vec![0.5, 1.0]).is_err());
        assert!(dimension_functional(&m, &vec![0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn markov_entropy_and_stationarity() {
        // Equal rows reduce to an independent process.
        let iid = MarkovMeasure::new(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        assert!((iid.stationary()[0] - 0.3).abs() < 1e-12);
        let bern = BernoulliMeasure::new(vec![0.3, 0.7]).unwrap();
        assert!((iid.entropy() - bern.entropy()).abs() < 1e-12);
        // The deterministic period-2 chain has zero entropy rate.
        let flip = MarkovMeasure::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(flip.stationary(), &[0.5, 0.5]);
        assert_eq!(flip.entropy(), 0.0);
        // The identity chain is valid and degenerate.
        let frozen = MarkovMeasure::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(frozen.entropy(), 0.0);
    }

    #[test]
    fn ratio_u_value_matches_model_alpha() {
        let m = binomial();
        let stat = WordStatistic::ratio(&m);
        // At the Bernoulli measure built from the model's own exponent
        // weights at q = 1, U equals alpha(1).
        let mu = Measure::Bernoulli(BernoulliMeasure::new(vec![0.2, 0.8]).unwrap());
        let u = u_value(&mu, &stat).unwrap();
        let alpha1 = m.alpha(&[1.0]).unwrap()[0];
        assert!((u[0] - alpha1).abs() < 1e-12);
    }

    #[test]
    fn point_constraint_matches_legendre() {
        let m = binomial();
        let stat = WordStatistic::ratio(&m);
        let alpha1 = m.alpha(&[1.0]).unwrap()[0];
        let target = Target::point(vec![alpha1]).unwrap();
        let res = constrained_sup(m.ratios(), &stat, &target, 1e-3, MeasureFamily::Bernoulli, 1)
            .unwrap();
        assert!(res.feasible);
        let expect = m.legendre(&[alpha1]).unwrap().value.finite().unwrap();
        let got = res.value.finite().unwrap();
        assert!((got - expect).abs() < 5e-3, "{got} vs {expect}");
        // The maximizer's own statistic must satisfy the constraint.
        let mu = res.argmax.unwrap();
        assert!(target.dist(&u_value(&mu, &stat).unwrap()) <= 1e-3 + 1e-12);
    }

    #[test]
    fn frequency_constraint_hits_binary_entropy() {
        // Window-1 indicator of symbol 0 on the uniform-ratio model: the
        // constraint pins pi_0, and the value is the binary entropy in bits.
        let table = GramTable::new(vec![1.0, 0.0], 1, 2).unwrap();
        let stat = WordStatistic::birkhoff(table);
        let target = Target::point(vec![0.3]).unwrap();
        let res = constrained_sup(
            &[0.5, 0.5],
            &stat,
            &target,
            1e-6,
            MeasureFamily::Bernoulli,
            7,
        )
        .unwrap();
        let expect = 0.8812908992306927;
        let got = res.value.finite().unwrap();
        assert!((got - expect).abs() < 1e-3, "{got} vs {expect}");
    }

    #[test]
    fn unattainable_target_is_infeasible() {
        let m = binomial();
        let stat = WordStatistic::ratio(&m);
        let target = Target::point(vec![9.0]).unwrap();
        let res = constrained_sup(m.ratios(), &stat, &target, 0.05, MeasureFamily::Bernoulli, 1)
            .unwrap();
        assert!(res.value.is_neg_inf());
        assert!(!res.feasible);
        assert!(res.argmax.is_none());
        let empty = Target::Empty { dim: 1 };
        let res = constrained_sup(m.ratios(), &stat, &empty, 0.05, MeasureFamily::Bernoulli, 1)
            .unwrap();
        assert!(res.value.is_neg_inf());
    }

    #[test]
    fn forbidden_word_chain_reaches_golden_mean_dimension() {
        // Constraining the frequency of window "11" to zero restricts to
        // chains supported on the golden-mean shift; the maximal dimension
        // over ratios (1/2, 1/2) is log2 of the golden ratio.
        let table = GramTable::new(vec![0.0, 0.0, 0.0, 1.0], 2, 2).unwrap();
        let stat = WordStatistic::birkhoff(table);
        let target = Target::point(vec![0.0]).unwrap();
        let res = constrained_sup(
            &[0.5, 0.5],
            &stat,
            &target,
            0.0,
            MeasureFamily::Markov1,
            3,
        )
        .unwrap();
        let expect = 0.6942419136306174;
        let got = res.value.finite().unwrap();
        assert!((got - expect).abs() < 1e-3, "{got} vs {expect}");
        match res.argmax.unwrap() {
            Measure::Markov(chain) => {
                assert!(chain.transition()[1][1].abs() < 1e-9);
            }
            other => panic!("expected a Markov maximizer, got {other:?}"),
        }
    }

    #[test]
    fn markov_family_dominates_bernoulli_on_window_two() {
        let table = GramTable::new(vec![0.0, 1.0, 0.0, 0.0], 2, 2).unwrap();
        let stat = WordStatistic::birkhoff(table);
        let target = Target::point(vec![0.15]).unwrap();
        let r = [0.5, 0.5];
        let bern =
            constrained_sup(&r, &stat, &target, 1e-3, MeasureFamily::Bernoulli, 5).unwrap();
        let markov =
            constrained_sup(&r, &stat, &target, 1e-3, MeasureFamily::Markov1, 5).unwrap();
        let b = bern.value.finite().unwrap();
        let m = markov.value.finite().unwrap();
        assert!(m >= b - 1e-6, "markov {m} below bernoulli {b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Replacing r by r^c divides the functional by c exactly.
        #[test]
        fn functional_scales_with_ratio_powers(
            p in 0.05f64..0.95,
            r0 in 0.2f64..0.9,
            r1 in 0.2f64..0.9,
            c in 0.4f64..2.5,
        ) {
            let m = Measure::Bernoulli(BernoulliMeasure::new(vec![p, 1.0 - p]).unwrap());
            let base = dimension_functional(&m, &vec![r0, r1]).unwrap();
            let powed = dimension_functional(&m, &vec![r0.powf(c), r1.powf(c)]).unwrap();
            prop_assert!((powed - base / c).abs() < 1e-12 * (1.0 + base));
        }

        /// Random stochastic matrices produce verified stationary vectors.
        #[test]
        fn stationary_residual_is_tiny(
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
            c in 0.0f64..1.0,
            d in 0.0f64..1.0,
            e in 0.0f64..1.0,
            f in 0.0f64..1.0,
        ) {
            let rows = vec![
                vec![a / 2.0, (1.0 - a / 2.0) / 2.0, 1.0 - a / 2.0 - (1.0 - a / 2.0) / 2.0],
                vec![b / 3.0, c / 3.0, 1.0 - b / 3.0 - c / 3.0],
                vec![d / 3.0, e / 3.0 + f / 6.0, 1.0 - d / 3.0 - e / 3.0 - f / 6.0],
            ];
            let chain = MarkovMeasure::new(rows.clone()).unwrap();
            let pi = chain.stationary();
            for col in 0..3 {
                let mut acc = 0.0;
                for row in 0..3 {
                    acc += pi[row] * rows[row][col];
                }
                prop_assert!((acc - pi[col]).abs() <= 2e-12);
            }
            prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
