//! Self-similar measure models and their multifractal spectra.
//!
//! A model couples `N` contraction ratios `r_i` with `M` fully supported
//! probability rows `p_m`. Its pressure function `beta(q)` is defined by
//!
//! ```text
//!     sum_i  p_(1,i)^q_1 * .. * p_(M,i)^q_M * r_i^beta(q)  =  1,
//! ```
//!
//! solved here by bisection in log space: the left side is strictly
//! decreasing in `beta` because every `r_i < 1`. The gradient
//! `alpha(q) = -grad beta(q)` has the closed weighted form
//!
//! ```text
//!     alpha_m(q) = sum_i w_i ln p_(m,i) / sum_i w_i ln r_i,
//! ```
//!
//! with weights `w_i` proportional to the summand at the solution, and the
//! multifractal spectrum is the Legendre transform
//!
//! ```text
//!     f(alpha) = inf_q ( <alpha, q> + beta(q) ),
//! ```
//!
//! computed for `M = 1` by direct bisection on `alpha(q) = alpha` and for
//! `M >= 2` by a grid seed plus coordinate descent. Arguments outside the
//! attainable range of local dimensions produce negative infinity (for
//! `M = 1`) or a capped boundary solution (for `M >= 2`).

use crate::numeric::{bisect_decreasing, log_sum_exp, KahanSum};
use crate::weights::SimilarityWeights;
use crate::{Error, ExtReal, Result};

/// Search cap for Legendre exponents: endpoint spectra are evaluated at
/// `q = +-Q_CAP` and reported with the boundary flag set.
pub const Q_CAP: f64 = 200.0;

/// Half-width of the seeding grid for the `M >= 2` Legendre search.
const GRID_HALF: f64 = 30.0;
/// Points per axis in the seeding grid.
const GRID_POINTS: usize = 21;

/// Row-sum tolerance for probability vectors.
const ROW_SUM_TOL: f64 = 1e-12;

/// A self-similar system: contraction ratios plus `M` probability rows.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsModel {
    ratios: Vec<f64>,
    probs: Vec<Vec<f64>>,
    log_ratios: Vec<f64>,
    log_probs: Vec<Vec<f64>>,
}

impl IfsModel {
    /// Validates: at least two maps, ratios strictly in `(0, 1)`, at least
    /// one probability row, every row fully supported (entries in `(0, 1)`)
    /// and summing to 1 within `1e-12`.
    pub fn new(ratios: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if ratios.len() < 2 {
            return Err(Error::InvalidModel("need at least two contraction maps".into()));
        }
        if let Some(&bad) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidModel(format!(
                "contraction ratios must lie strictly in (0, 1), got {bad}"
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidModel("need at least one probability row".into()));
        }
        for (m, row) in probs.iter().enumerate() {
            if row.len() != ratios.len() {
                return Err(Error::InvalidModel(format!(
                    "probability row {m} has {} entries, expected {}",
                    row.len(),
                    ratios.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
                return Err(Error::InvalidModel(format!(
                    "probability row {m} must be fully supported with entries in (0, 1), got {bad}"
                )));
            }
            let mut sum = KahanSum::new();
            for &p in row {
                sum.add(p);
            }
            if (sum.value() - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidModel(format!(
                    "probability row {m} sums to {}, expected 1",
                    sum.value()
                )));
            }
        }
        let log_ratios = ratios.iter().map(|r| r.ln()).collect();
        let log_probs = probs
            .iter()
            .map(|row| row.iter().map(|p| p.ln()).collect())
            .collect();
        Ok(Self { ratios, probs, log_ratios, log_probs })
    }

    /// Number of contraction maps `N`.
    pub fn num_maps(&self) -> usize {
        self.ratios.len()
    }

    /// Number of probability rows `M` (the dimension of `q` and `alpha`).
    pub fn num_measures(&self) -> usize {
        self.probs.len()
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }

    pub fn log_probs(&self) -> &[Vec<f64>] {
        &self.log_probs
    }

    /// The contraction weight system of this model.
    pub fn weights(&self) -> SimilarityWeights {
        SimilarityWeights::new(self.ratios.clone()).expect("ratios validated at construction")
    }

    /// Log-space summand exponents `t_i = <q, ln p_i> + beta ln r_i`.
    fn exponents(&self, q: &[f64], beta: f64, out: &mut Vec<f64>) {
        out.clear();
        for i in 0..self.num_maps() {
            let mut t = beta * self.log_ratios[i];
            for (qm, row) in q.iter().zip(&self.log_probs) {
                t += qm * row[i];
            }
            out.push(t);
        }
    }

    fn check_q(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.num_measures() {
            return Err(Error::InvalidArgument(format!(
                "exponent vector has {} coordinates, model has {} probability rows",
                q.len(),
                self.num_measures()
            )));
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("exponent vector must be finite".into()));
        }
        Ok(())
    }

    /// The pressure exponent `beta(q)` solving the defining equation.
    ///
    /// Bisection on the log of the sum, which is strictly decreasing in
    /// `beta`; the returned root leaves `|sum - 1|` below about `1e-12`.
    pub fn beta(&self, q: &[f64]) -> Result<f64> {
        self.check_q(q)?;
        let mut t = Vec::with_capacity(self.num_maps());
        let mut g = |beta: f64| -> f64 {
            self.exponents(q, beta, &mut t);
            log_sum_exp(&t).expect("model has at least two maps")
        };
        let (mut lo, mut hi);
        if g(0.0) >= 0.0 {
            lo = 0.0;
            hi = 1.0;
            while g(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
                if hi > 1e7 {
                    return Err(Error::BracketFailure("pressure root exceeds 1e7".into()));
                }
            }
        } else {
            hi = 0.0;
            lo = -1.0;
            while g(lo) < 0.0 {
                hi = lo;
                lo *= 2.0;
                if lo < -1e7 {
                    return Err(Error::BracketFailure("pressure root below -1e7".into()));
                }
            }
        }
        bisect_decreasing(g, lo, hi, 1e-14)
    }

    /// `|sum_i prod_m p_(m,i)^q_m r_i^beta - 1|`: how far `beta` is from
    /// satisfying the pressure equation.
    pub fn pressure_residual(&self, q: &[f64], beta: f64) -> Result<f64> {
        self.check_q(q)?;
        let mut t = Vec::with_capacity(self.num_maps());
        self.exponents(q, beta, &mut t);
        let lse = log_sum_exp(&t).expect("model has at least two maps");
        Ok((lse.exp() - 1.0).abs())
    }

    /// The local-dimension vector `alpha(q) = -grad beta(q)`.
    pub fn alpha(&self, q: &[f64]) -> Result<Vec<f64>> {
        let beta = self.beta(q)?;
        let mut t = Vec::with_capacity(self.num_maps());
        self.exponents(q, beta, &mut t);
        let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = t.iter().map(|&x| (x - max).exp()).collect();
        let denom: f64 = w.iter().zip(&self.log_ratios).map(|(wi, lr)| wi * lr).sum();
        Ok((0..self.num_measures())
            .map(|m| {
                let numer: f64 = w
                    .iter()
                    .zip(&self.log_probs[m])
                    .map(|(wi, lp)| wi * lp)
                    .sum();
                numer / denom
            })
            .collect())
    }

    /// Per-row range of attainable local dimensions: the min and max over
    /// symbols of `ln p_(m,i) / ln r_i`. `alpha(q)` lives in this box for
    /// every `q`, and for `M = 1` the Legendre spectrum is finite exactly on
    /// the closed interval.
    pub fn ratio_range(&self) -> Vec<(f64, f64)> {
        (0..self.num_measures())
            .map(|m| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..self.num_maps() {
                    let v = self.log_probs[m][i] / self.log_ratios[i];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            })
            .collect()
    }

    /// Legendre transform `f(alpha) = inf_q (<alpha, q> + beta(q))`.
    pub fn legendre(&self, alpha: &[f64]) -> Result<LegendreResult> {
        if alpha.len() != self.num_measures() {
            return Err(Error::InvalidArgument(format!(
                "alpha has {} coordinates, model has {} probability rows",
                alpha.len(),
                self.num_measures()
            )));
        }
        if alpha.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        if self.num_measures() == 1 {
            self.legendre_1d(alpha[0])
        } else {
            self.legendre_nd(alpha)
        }
    }

    fn value_at(&self, alpha: &[f64], q: &[f64]) -> Result<f64> {
        let beta = self.beta(q)?;
        let dot: f64 = alpha.iter().zip(q).map(|(a, qi)| a * qi).sum();
        Ok(dot + beta)
    }

    fn legendre_1d(&self, a: f64) -> Result<LegendreResult> {
        let (lo, hi) = self.ratio_range()[0];
        if a < lo || a > hi {
            return Ok(LegendreResult { value: ExtReal::NegInf, q: None, boundary: false });
        }
        // At the endpoints the infimum is only approached as q runs off to
        // +-infinity; alpha(q) - a underflows there long before the cap, so
        // catch exact endpoint queries up front instead of bisecting into
        // rounding noise. Near-endpoint arguments still bracket fine and get
        // the more accurate interior solve.
        if a == lo || a == hi {
            let q_cap = if a == lo { Q_CAP } else { -Q_CAP };
            let value = self.value_at(&[a], &[q_cap])?;
            return Ok(LegendreResult {
                value: ExtReal::Finite(value),
                q: Some(vec![q_cap]),
                boundary: true,
            });
        }
        // alpha(q) decreases from `hi` (q -> -inf) to `lo` (q -> +inf); the
        // residual alpha(q) - a inherits that monotonicity.
        let g = |q: f64| -> Result<f64> { Ok(self.alpha(&[q])?[0] - a) };
        let mut q_lo = -1.0;
        while g(q_lo)? < 0.0 && q_lo > -Q_CAP {
            q_lo = (q_lo * 2.0).max(-Q_CAP);
        }
        let mut q_hi = 1.0;
        while g(q_hi)? > 0.0 && q_hi < Q_CAP {
            q_hi = (q_hi * 2.0).min(Q_CAP);
        }
        if g(q_lo)? < 0.0 {
            // Even q = -Q_CAP gives alpha(q) < a: endpoint at the upper edge.
            let value = self.value_at(&[a], &[-Q_CAP])?;
            return Ok(LegendreResult {
                value: ExtReal::Finite(value),
                q: Some(vec![-Q_CAP]),
                boundary: true,
            });
        }
        if g(q_hi)? > 0.0 {
            let value = self.value_at(&[a], &[Q_CAP])?;
            return Ok(LegendreResult {
                value: ExtReal::Finite(value),
                q: Some(vec![Q_CAP]),
                boundary: true,
            });
        }
        let mut failure = None;
        let q_star = bisect_decreasing(
            |q| match g(q) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            q_lo,
            q_hi,
            1e-12,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let value = self.value_at(&[a], &[q_star])?;
        Ok(LegendreResult { value: ExtReal::Finite(value), q: Some(vec![q_star]), boundary: false })
    }

    fn legendre_nd(&self, alpha: &[f64]) -> Result<LegendreResult> {
        let m_dim = self.num_measures();
        // Grid seed over [-GRID_HALF, GRID_HALF]^M.
        let axis: Vec<f64> = (0..GRID_POINTS)
            .map(|i| -GRID_HALF + 2.0 * GRID_HALF * i as f64 / (GRID_POINTS - 1) as f64)
            .collect();
        let mut best_q = vec![0.0; m_dim];
        let mut best_v = self.value_at(alpha, &best_q)?;
        let mut idx = vec![0usize; m_dim];
        'grid: loop {
            let q: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let v = self.value_at(alpha, &q)?;
            if v < best_v {
                best_v = v;
                best_q = q;
            }
            for d in 0..m_dim {
                idx[d] += 1;
                if idx[d] < GRID_POINTS {
                    continue 'grid;
                }
                idx[d] = 0;
            }
            break;
        }

        // Coordinate descent: each axis solves alpha_m(q) = alpha_m, the
        // stationarity condition of the convex objective in that coordinate.
        let mut q = best_q;
        for _sweep in 0..200 {
            let mut moved = 0.0f64;
            for m in 0..m_dim {
                let mut probe = q.clone();
                let mut g = |x: f64| -> Result<f64> {
                    probe[m] = x;
                    Ok(self.alpha(&probe)?[m] - alpha[m])
                };
                let g_lo = g(-Q_CAP)?;
                let g_hi = g(Q_CAP)?;
                let old = q[m];
                let new = if g_lo.abs() <= 1e-12 && g_hi.abs() <= 1e-12 {
                    // Flat direction (degenerate row): any value is optimal.
                    old
                } else if g_lo < 0.0 {
                    // Derivative of the objective is positive throughout.
                    -Q_CAP
                } else if g_hi > 0.0 {
                    Q_CAP
                } else {
                    let mut failure = None;
                    let root = bisect_decreasing(
                        |x| match g(x) {
                            Ok(v) => v,
                            Err(e) => {
                                failure = Some(e);
                                0.0
                            }
                        },
                        -Q_CAP,
                        Q_CAP,
                        1e-12,
                    )?;
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    root
                };
                moved = moved.max((new - old).abs());
                q[m] = new;
            }
            if moved < 1e-10 {
                break;
            }
        }
        let boundary = q.iter().any(|&x| x == Q_CAP || x == -Q_CAP);
        let value = self.value_at(alpha, &q)?;
        Ok(LegendreResult { value: ExtReal::Finite(value), q: Some(q), boundary })
    }

    /// Samples `(q, beta, alpha, f)` over the cartesian product of
    /// `axis_grid` across the `M` exponent coordinates. The spectrum value
    /// uses duality: `f(alpha(q)) = <alpha(q), q> + beta(q)`.
    pub fn spectrum_samples(&self, axis_grid: &[f64]) -> Result<Vec<SpectrumSample>> {
        if axis_grid.is_empty() {
            return Err(Error::InvalidArgument("empty exponent grid".into()));
        }
        let m_dim = self.num_measures();
        let total = axis_grid.len().checked_pow(m_dim as u32).filter(|&t| t <= 1 << 20);
        let Some(total) = total else {
            return Err(Error::InvalidArgument(format!(
                "exponent grid of {}^{m_dim} points is too large",
                axis_grid.len()
            )));
        };
        let mut samples = Vec::with_capacity(total);
        let mut idx = vec![0usize; m_dim];
        loop {
            let q: Vec<f64> = idx.iter().map(|&i| axis_grid[i]).collect();
            let beta = self.beta(&q)?;
            let alpha = self.alpha(&q)?;
            let dot: f64 = alpha.iter().zip(&q).map(|(a, qi)| a * qi).sum();
            samples.push(SpectrumSample { beta, spectrum: dot + beta, q, alpha });
            let mut done = true;
            for d in 0..m_dim {
                idx[d] += 1;
                if idx[d] < axis_grid.len() {
                    done = false;
                    break;
                }
                idx[d] = 0;
            }
            if done {
                return Ok(samples);
            }
        }
    }
}

/// One point of the multifractal spectrum curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub q: Vec<f64>,
    pub beta: f64,
    pub alpha: Vec<f64>,
    /// `f(alpha(q))` by Legendre duality.
    pub spectrum: f64,
}

/// Result of a Legendre transform query.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreResult {
    /// The infimum, or negative infinity when `alpha` is unattainable.
    pub value: ExtReal,
    /// A minimizing exponent vector, when one was found.
    pub q: Option<Vec<f64>>,
    /// Whether the minimizer sits on the `+-Q_CAP` search boundary
    /// (endpoint spectra and, for `M >= 2`, unattainable directions).
    pub boundary: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binomial() -> IfsModel {
        IfsModel::new(vec![0.5, 0.5], vec![vec![0.2, 0.8]]).unwrap()
    }

    fn uniform() -> IfsModel {
        IfsModel::new(vec![0.5, 0.5], vec![vec![0.5, 0.5]]).unwrap()
    }

    fn mixed_two_row() -> IfsModel {
        IfsModel::new(vec![0.5, 0.5], vec![vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(IfsModel::new(vec![0.5], vec![vec![1.0]]).is_err());
        assert!(IfsModel::new(vec![0.5, 1.0], vec![vec![0.5, 0.5]]).is_err());
        assert!(IfsModel::new(vec![0.5, 0.5], vec![]).is_err());
        assert!(IfsModel::new(vec![0.5, 0.5], vec![vec![0.3, 0.3]]).is_err());
        assert!(IfsModel::new(vec![0.5, 0.5], vec![vec![0.0, 1.0]]).is_err());
        assert!(IfsModel::new(vec![0.5, 0.5], vec![vec![0.2, 0.8, 0.0]]).is_err());
        let m = mixed_two_row();
        assert_eq!(m.num_maps(), 2);
        assert_eq!(m.num_measures(), 2);
    }

    #[test]
    fn uniform_pressure_is_linear() {
        let m = uniform();
        for q in [-3.0, 0.0, 1.0, 2.5] {
            // 2 * (1/2)^q (1/2)^beta = 1 forces beta = 1 - q.
            assert!((m.beta(&[q]).unwrap() - (1.0 - q)).abs() < 1e-12, "q = {q}");
            assert!((m.alpha(&[q]).unwrap()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_pressure_matches_closed_form() {
        let m = binomial();
        let mut q = -10.0;
        while q <= 10.0 {
            let expect = (0.2f64.powf(q) + 0.8f64.powf(q)).log2();
            let got = m.beta(&[q]).unwrap();
            assert!((got - expect).abs() < 1e-12, "q = {q}: {got} vs {expect}");
            assert!(m.pressure_residual(&[q], got).unwrap() < 1e-12);
            q += 0.5;
        }
    }

    #[test]
    fn beta_at_one_vanishes() {
        // q = 1 makes the summand a probability vector, so beta(1) = 0.
        for m in [binomial(), uniform()] {
            assert!(m.beta(&[1.0]).unwrap().abs() < 1e-12);
        }
        assert!(mixed_two_row().beta(&[1.0, 0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn binomial_alpha_and_range_match_frozen_values() {
        let m = binomial();
        // alpha(1) = (0.2 ln 0.2 + 0.8 ln 0.8) / ln(1/2).
        let a1 = m.alpha(&[1.0]).unwrap()[0];
        assert!((a1 - 0.7219280948873623).abs() < 1e-12);
        let (lo, hi) = m.ratio_range()[0];
        assert!((lo - 0.3219280948873623).abs() < 1e-12);
        assert!((hi - 2.3219280948873622).abs() < 1e-12);
        // alpha(0): the information dimension of the uniform branch weights
        // sits at (ln 2) / (ln 2) scaled by the symmetric weights; here the
        // uniform weighting of both symbols gives the arithmetic midpoint of
        // log 0.2 and log 0.8 over log(1/2).
        let a0 = m.alpha(&[0.0]).unwrap()[0];
        let expect = (0.5 * 0.2f64.ln() + 0.5 * 0.8f64.ln()) / 0.5f64.ln();
        assert!((a0 - expect).abs() < 1e-12);
    }

    #[test]
    fn alpha_stays_in_ratio_range() {
        let m = binomial();
        let (lo, hi) = m.ratio_range()[0];
        for q in [-40.0, -7.0, 0.0, 3.0, 40.0] {
            let a = m.alpha(&[q]).unwrap()[0];
            assert!(a >= lo - 1e-12 && a <= hi + 1e-12, "alpha({q}) = {a}");
        }
    }

    #[test]
    fn legendre_interior_duality() {
        let m = binomial();
        for q in [-4.0, -1.0, 0.0, 0.7, 2.0, 5.0] {
            let alpha = m.alpha(&[q]).unwrap();
            let direct = m.legendre(&alpha).unwrap();
            let dual = q * alpha[0] + m.beta(&[q]).unwrap();
            let v = direct.value.finite().expect("interior alpha is attainable");
            assert!((v - dual).abs() < 1e-8, "q = {q}: {v} vs {dual}");
            assert!(!direct.boundary);
        }
    }

    #[test]
    fn legendre_at_information_dimension_touches_identity() {
        // f(alpha(1)) = alpha(1): the spectrum touches the diagonal at q = 1.
        let m = binomial();
        let a = m.alpha(&[1.0]).unwrap();
        let v = m.legendre(&a).unwrap().value.finite().unwrap();
        assert!((v - a[0]).abs() < 1e-9);
    }

    #[test]
    fn legendre_outside_range_is_neg_inf() {
        let m = binomial();
        for a in [0.1, 0.3, 2.4, 3.0] {
            let res = m.legendre(&[a]).unwrap();
            assert!(res.value.is_neg_inf(), "alpha = {a}");
        }
        // Just inside stays finite.
        assert!(m.legendre(&[0.33]).unwrap().value.is_finite());
    }

    #[test]
    fn legendre_endpoints_flag_boundary() {
        let m = binomial();
        let (lo, hi) = m.ratio_range()[0];
        for a in [lo, hi] {
            let res = m.legendre(&[a]).unwrap();
            assert!(res.boundary, "alpha = {a} should hit the exponent cap");
            // Endpoint spectrum values vanish for a two-map system.
            assert!(res.value.finite().unwrap().abs() < 1e-10, "alpha = {a}");
        }
    }

    #[test]
    fn mixed_two_row_closed_form_and_flat_direction() {
        let m = mixed_two_row();
        // Second row equals the ratios, so it contributes -q_2 exactly:
        // beta(q1, q2) = -q2 + log2(0.2^q1 + 0.8^q1).
        for q1 in [-3.0, 0.0, 1.5] {
            for q2 in [-2.0, 0.0, 4.0] {
                let expect = -q2 + (0.2f64.powf(q1) + 0.8f64.powf(q1)).log2();
                let got = m.beta(&[q1, q2]).unwrap();
                assert!((got - expect).abs() < 1e-12, "q = ({q1}, {q2})");
                let alpha = m.alpha(&[q1, q2]).unwrap();
                assert!((alpha[1] - 1.0).abs() < 1e-12, "flat coordinate");
            }
        }
    }

    #[test]
    fn legendre_two_rows_duality_on_attainable_vectors() {
        let m = mixed_two_row();
        for q in [[-2.0, 0.5], [0.0, 0.0], [1.0, -1.0], [3.0, 2.0]] {
            let alpha = m.alpha(&q).unwrap();
            let dual: f64 =
                q.iter().zip(&alpha).map(|(qi, ai)| qi * ai).sum::<f64>() + m.beta(&q).unwrap();
            let res = m.legendre(&alpha).unwrap();
            let v = res.value.finite().expect("attainable vector");
            assert!((v - dual).abs() < 1e-6, "q = {q:?}: {v} vs {dual}");
        }
    }

    #[test]
    fn spectrum_samples_cover_grid() {
        let m = binomial();
        let axis = [-2.0, 0.0, 2.0];
        let samples = m.spectrum_samples(&axis).unwrap();
        assert_eq!(samples.len(), 3);
        for s in &samples {
            let dual = s.q[0] * s.alpha[0] + s.beta;
            assert!((s.spectrum - dual).abs() < 1e-14);
        }
        let m2 = mixed_two_row();
        assert_eq!(m2.spectrum_samples(&axis).unwrap().len(), 9);
    }

    fn arb_model() -> impl Strategy<Value = IfsModel> {
        (
            proptest::collection::vec(0.05f64..0.95, 2..4),
            proptest::collection::vec(0.05f64..1.0, 2..4),
        )
            .prop_map(|(ratios, raw)| {
                let n = ratios.len();
                let mut row: Vec<f64> = raw.into_iter().cycle().take(n).collect();
                let total: f64 = row.iter().sum();
                for p in &mut row {
                    *p /= total;
                }
                IfsModel::new(ratios, vec![row]).unwrap()
            })
    }

    proptest! {
        #[test]
        fn pressure_residual_is_tiny_everywhere(m in arb_model(), q in -8.0f64..8.0) {
            let beta = m.beta(&[q]).unwrap();
            prop_assert!(m.pressure_residual(&[q], beta).unwrap() < 1e-11);
        }

        #[test]
        fn central_difference_recovers_alpha(m in arb_model(), q in -5.0f64..5.0) {
            let h = 1e-5;
            let slope = (m.beta(&[q + h]).unwrap() - m.beta(&[q - h]).unwrap()) / (2.0 * h);
            let alpha = m.alpha(&[q]).unwrap()[0];
            prop_assert!((slope + alpha).abs() < 1e-6, "slope {slope}, alpha {alpha}");
        }

        #[test]
        fn duality_holds_for_random_models(m in arb_model(), q in -5.0f64..5.0) {
            let alpha = m.alpha(&[q]).unwrap();
            let dual = q * alpha[0] + m.beta(&[q]).unwrap();
            match m.legendre(&alpha).unwrap().value {
                ExtReal::Finite(v) => prop_assert!((v - dual).abs() < 1e-7, "{v} vs {dual}"),
                ExtReal::NegInf => {
                    // alpha(q) is attainable by construction; landing outside
                    // the closed range can only be a terminal rounding step.
                    let (lo, hi) = m.ratio_range()[0];
                    let overshoot = (lo - alpha[0]).max(alpha[0] - hi);
                    prop_assert!(overshoot > 0.0 && overshoot < 1e-9);
                }
            }
        }
    }
}
