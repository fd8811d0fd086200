//! Bernoulli selectors and random coordinate subsets.
//!
//! `n` independent `{0,1}` selectors with mean `δ` pick the random set
//! `σ = {i : δ_i = 1}` of average size `δn`. This module provides the
//! exact moment generating function of `Σ (δ_i − δ) a_i`, the Chernoff
//! bound optimized over the exponential parameter, exact tail oracles for
//! small or two-valued weight vectors, and the Monte-Carlo experiments
//! comparing them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::orlicz::psi_norm;
use crate::rng::RngStream;
use crate::space::CoordinateSubset;

/// Relative slack used when deciding `S > threshold`, so that lattice ties
/// are resolved the same way by the Monte-Carlo and exact routes.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Largest dimension for which the tail is computed by full enumeration.
pub const ENUMERATION_MAX_N: usize = 20;

/// One realization of `n` selectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorDraw {
    pub delta: f64,
    pub outcomes: Vec<bool>,
    pub subset: CoordinateSubset,
}

impl SelectorDraw {
    pub fn from_outcomes(delta: f64, outcomes: Vec<bool>) -> Self {
        let subset = CoordinateSubset::from_mask(&outcomes);
        SelectorDraw {
            delta,
            outcomes,
            subset,
        }
    }

    /// `Σ (δ_i − δ) a_i`.
    pub fn centered_sum(&self, a: &[f64]) -> f64 {
        centered_sum(&self.outcomes, self.delta, a)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::BadDelta(delta))
    }
}

/// Draws `n` independent Bernoulli(`delta`) selectors.
pub fn draw_selectors(n: usize, delta: f64, rng: &mut RngStream) -> Result<SelectorDraw> {
    if n == 0 {
        return Err(Error::bad_input("n must be at least 1"));
    }
    check_delta(delta)?;
    let outcomes = (0..n).map(|_| rng.bernoulli(delta)).collect();
    Ok(SelectorDraw::from_outcomes(delta, outcomes))
}

fn centered_sum(outcomes: &[bool], delta: f64, a: &[f64]) -> f64 {
    let mut picked = 0.0;
    let mut total = 0.0;
    for (&o, &x) in outcomes.iter().zip(a) {
        if o {
            picked += x;
        }
        total += x;
    }
    picked - delta * total
}

/// `ln E exp(λ Σ (δ_i − δ) a_i)`, evaluated factor by factor in log space.
pub fn log_exact_mgf(a: &[f64], delta: f64, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || a.iter().any(|x| x.is_nan()) {
        return Err(Error::bad_input("NaN input to the moment generating function"));
    }
    check_delta(delta)?;
    let mut acc = 0.0;
    for &x in a {
        // (1−δ) e^{−λδx} + δ e^{λ(1−δ)x}
        let u = -lambda * delta * x;
        let v = lambda * (1.0 - delta) * x;
        acc += if delta == 1.0 {
            v
        } else {
            let lu = libm::log(1.0 - delta) + u;
            let lv = libm::log(delta) + v;
            let m = lu.max(lv);
            m + libm::log(libm::exp(lu - m) + libm::exp(lv - m))
        };
    }
    Ok(acc)
}

/// `E exp(λ Σ (δ_i − δ) a_i) = Π [(1−δ) e^{−λδa_i} + δ e^{λ(1−δ)a_i}]`.
pub fn exact_mgf(a: &[f64], delta: f64, lambda: f64) -> Result<f64> {
    Ok(libm::exp(log_exact_mgf(a, delta, lambda)?))
}

/// Log of `Π (1 + 2δ(1−δ)(cosh(λ a_i) − 1))`, the moment generating function
/// of the symmetrized sum `Σ (δ_i − δ'_i) a_i`, which dominates the exact one.
pub fn log_symmetrized_mgf(a: &[f64], delta: f64, lambda: f64) -> f64 {
    let d = delta * (1.0 - delta);
    a.iter()
        .map(|&x| {
            let y = (lambda * x).abs();
            // cosh(y) − 1 = 2 sinh²(y/2); switch to logs once it is huge
            if y < 600.0 {
                let sh = libm::sinh(0.5 * y);
                libm::log1p(4.0 * d * sh * sh)
            } else {
                libm::log(d) + y
            }
        })
        .sum()
}

const LAMBDA_MIN_LOG: f64 = -9.210_340_371_976_182; // ln 1e-4
const LAMBDA_MAX_LOG: f64 = 9.210_340_371_976_182; // ln 1e4
const GRID_POINTS: usize = 161;

/// `inf_{λ>0} e^{−λ t δ n} E exp(λ Σ (δ_i − δ) a_i)`, an upper bound on
/// `P{Σ (δ_i − δ) a_i > t δ n}`.
///
/// The exponent is convex in `λ`; it is scanned on a logarithmic grid over
/// `[1e-4, 1e4]` and refined by golden-section search around the best node.
pub fn chernoff_tail_bound(a: &[f64], delta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::bad_input("t must be positive"));
    }
    check_delta(delta)?;
    let threshold = t * delta * a.len() as f64;
    let objective = |u: f64| -> f64 {
        let lambda = libm::exp(u);
        log_exact_mgf(a, delta, lambda).unwrap_or(f64::INFINITY) - lambda * threshold
    };
    let step = (LAMBDA_MAX_LOG - LAMBDA_MIN_LOG) / (GRID_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let v = objective(LAMBDA_MIN_LOG + step * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = LAMBDA_MIN_LOG + step * best_i.saturating_sub(1) as f64;
    let hi = LAMBDA_MIN_LOG + step * (best_i + 1).min(GRID_POINTS - 1) as f64;
    best = best.min(golden_section_min(objective, lo, hi, 80));
    // λ → 0 gives the trivial bound 1
    Ok(libm::exp(best.min(0.0)))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> f64 {
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

fn tie_scale(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum::<f64>().max(1.0)
}

fn exceeds(s: f64, threshold: f64, scale: f64) -> bool {
    s > threshold + TIE_TOLERANCE * scale
}

/// Which exact route produced a tail probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// All nonzero weights share one value: binomial summation.
    Binomial,
    /// `n ≤ 20`: all `2^n` selector patterns.
    Enumeration,
}

/// Exact one- and two-sided tails `P{S > tδn}`, `P{|S| > tδn}` for
/// `S = Σ (δ_i − δ) a_i`, when a cheap exact route exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactTail {
    pub one_sided: f64,
    pub two_sided: f64,
    pub method: ExactMethod,
}

pub fn exact_tail(a: &[f64], delta: f64, t: f64) -> Result<Option<ExactTail>> {
    check_delta(delta)?;
    let n = a.len();
    let threshold = t * delta * n as f64;
    let scale = tie_scale(a);
    let nonzero: Vec<f64> = a.iter().copied().filter(|&x| x != 0.0).collect();
    let common = nonzero.first().copied();
    if nonzero.iter().all(|&x| Some(x) == common) {
        let c = common.unwrap_or(0.0);
        let count = nonzero.len();
        let mut one = 0.0;
        let mut two = 0.0;
        for k in 0..=count {
            let s = c * (k as f64 - delta * count as f64);
            let pk = binomial_pmf(count, k, delta);
            if exceeds(s, threshold, scale) {
                one += pk;
            }
            if exceeds(s.abs(), threshold, scale) {
                two += pk;
            }
        }
        return Ok(Some(ExactTail {
            one_sided: one,
            two_sided: two,
            method: ExactMethod::Binomial,
        }));
    }
    if n > ENUMERATION_MAX_N {
        return Ok(None);
    }
    exact_tail_by_enumeration(a, delta, t).map(Some)
}

/// Exact tails by summing over all `2^n` selector patterns (`n ≤ 20`).
pub fn exact_tail_by_enumeration(a: &[f64], delta: f64, t: f64) -> Result<ExactTail> {
    check_delta(delta)?;
    let n = a.len();
    if n > ENUMERATION_MAX_N {
        return Err(Error::SizeCap {
            what: "selector enumeration",
            requested: n,
            limit: ENUMERATION_MAX_N,
            cost: libm::pow(2.0, n as f64),
        });
    }
    let threshold = t * delta * n as f64;
    let scale = tie_scale(a);
    let mut outcomes = alloc::vec![false; n];
    let mut one = 0.0;
    let mut two = 0.0;
    for mask in 0u32..(1u32 << n) {
        let mut k = 0;
        for (i, o) in outcomes.iter_mut().enumerate() {
            *o = mask >> i & 1 == 1;
            k += *o as usize;
        }
        let s = centered_sum(&outcomes, delta, a);
        let pk = libm::pow(delta, k as f64) * libm::pow(1.0 - delta, (n - k) as f64);
        if exceeds(s, threshold, scale) {
            one += pk;
        }
        if exceeds(s.abs(), threshold, scale) {
            two += pk;
        }
    }
    Ok(ExactTail {
        one_sided: one,
        two_sided: two,
        method: ExactMethod::Enumeration,
    })
}

/// `P{Bin(n, p) = k}`.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let (n_f, k_f) = (n as f64, k as f64);
    let log_choose = libm::lgamma(n_f + 1.0) - libm::lgamma(k_f + 1.0) - libm::lgamma(n_f - k_f + 1.0);
    libm::exp(log_choose + k_f * libm::log(p) + (n_f - k_f) * libm::log1p(-p))
}

/// Conditions attached to a tail experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailFlag {
    /// No trial exceeded the threshold; the empirical tail is unresolved.
    UnresolvedTail,
    /// `t ≥ M/2`, outside the range where the exponential bound is claimed.
    LargeDeviation,
    /// `δ > 1/2`.
    DeltaAboveHalf,
}

impl TailFlag {
    pub fn code(&self) -> &'static str {
        match self {
            TailFlag::UnresolvedTail => "UNRESOLVED_TAIL",
            TailFlag::LargeDeviation => "LARGE_DEVIATION",
            TailFlag::DeltaAboveHalf => "DELTA_ABOVE_HALF",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailExperimentReport {
    pub t: f64,
    pub delta: f64,
    pub n: usize,
    pub trials: usize,
    /// `‖a‖_{ψ_1}`.
    pub psi1: f64,
    /// Frequency of `S > tδn`.
    pub empirical_prob: f64,
    /// Frequency of `|S| > tδn`.
    pub empirical_two_sided: f64,
    pub chernoff_bound: f64,
    pub exact: Option<ExactTail>,
    /// `−ln(p̂) M² / (t² δ n)` from the empirical one-sided frequency.
    pub fitted_c: Option<f64>,
    /// Same quantity from the exact tail, when available and positive.
    pub fitted_c_exact: Option<f64>,
    pub flags: Vec<TailFlag>,
}

impl TailExperimentReport {
    pub fn exact_prob(&self) -> Option<f64> {
        self.exact.map(|e| e.one_sided)
    }
}

/// Binomial standard error `sqrt(p(1−p)/trials)`.
pub fn binomial_std_error(p: f64, trials: usize) -> f64 {
    libm::sqrt(p * (1.0 - p) / trials as f64)
}

/// Monte-Carlo tail of `Σ (δ_i − δ) a_i` against the Chernoff bound, the
/// exact tail (when available), and the constant `c` implied by
/// `P{S > tδn} = exp(−c t² δn / M²)` with `M = ‖a‖_{ψ_1}`.
pub fn tail_experiment(
    a: &[f64],
    delta: f64,
    t: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<TailExperimentReport> {
    if trials == 0 {
        return Err(Error::bad_input("trials must be at least 1"));
    }
    if !(t > 0.0) {
        return Err(Error::bad_input("t must be positive"));
    }
    check_delta(delta)?;
    let n = a.len();
    let psi1 = psi_norm(a, 1.0, 1e-12)?.value;
    if psi1 == 0.0 {
        return Err(Error::bad_input("weight vector is identically zero"));
    }
    let threshold = t * delta * n as f64;
    let scale = tie_scale(a);
    let mut outcomes = alloc::vec![false; n];
    let mut one = 0usize;
    let mut two = 0usize;
    for _ in 0..trials {
        for o in outcomes.iter_mut() {
            *o = rng.bernoulli(delta);
        }
        let s = centered_sum(&outcomes, delta, a);
        one += exceeds(s, threshold, scale) as usize;
        two += exceeds(s.abs(), threshold, scale) as usize;
    }
    let empirical_prob = one as f64 / trials as f64;
    let empirical_two_sided = two as f64 / trials as f64;
    let exact = exact_tail(a, delta, t)?;
    let fit = |p: f64| (p > 0.0 && p < 1.0).then(|| -libm::log(p) * psi1 * psi1 / (t * t * delta * n as f64));

    let mut flags = Vec::new();
    if one == 0 {
        flags.push(TailFlag::UnresolvedTail);
    }
    if t >= psi1 / 2.0 {
        flags.push(TailFlag::LargeDeviation);
    }
    if delta > 0.5 {
        flags.push(TailFlag::DeltaAboveHalf);
    }
    Ok(TailExperimentReport {
        t,
        delta,
        n,
        trials,
        psi1,
        empirical_prob,
        empirical_two_sided,
        chernoff_bound: chernoff_tail_bound(a, delta, t)?,
        exact,
        fitted_c: fit(empirical_prob),
        fitted_c_exact: exact.and_then(|e| fit(e.one_sided)),
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryEstimate {
    /// Fraction of draws with `(1−ε)‖f‖ ≤ ‖P_σ f‖ ≤ (1+ε)‖f‖`.
    pub probability: f64,
    pub successes: usize,
    pub trials: usize,
    /// Draws with `σ = ∅` (counted as failures).
    pub empty_draws: usize,
}

/// Frequency with which a random selector set is an `ε`-almost isometry for
/// `f` in normalized `L_2`. Empty `σ` counts as a failure.
pub fn almost_isometry_experiment(
    f: &[f64],
    delta: f64,
    epsilon: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<IsometryEstimate> {
    check_delta(delta)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadEpsilon(epsilon));
    }
    if trials == 0 {
        return Err(Error::bad_input("trials must be at least 1"));
    }
    let norm = crate::space::normalized_lp(f, 2.0)?;
    if norm == 0.0 {
        return Err(Error::bad_input("f has zero norm"));
    }
    let (lo, hi) = ((1.0 - epsilon) * norm, (1.0 + epsilon) * norm);
    let mut successes = 0;
    let mut empty_draws = 0;
    for _ in 0..trials {
        let mut count = 0usize;
        let mut energy = 0.0;
        for &x in f {
            if rng.bernoulli(delta) {
                count += 1;
                energy += x * x;
            }
        }
        if count == 0 {
            empty_draws += 1;
            continue;
        }
        let projected = libm::sqrt(energy / count as f64);
        if projected >= lo && projected <= hi {
            successes += 1;
        }
    }
    Ok(IsometryEstimate {
        probability: successes as f64 / trials as f64,
        successes,
        trials,
        empty_draws,
    })
}

/// Frequency of `| |σ| − δn | ≥ ε δn`, i.e. of the selector count deviating
/// from its mean by a relative `ε`.
pub fn cardinality_deviation_frequency(
    n: usize,
    delta: f64,
    epsilon: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    check_delta(delta)?;
    if trials == 0 || n == 0 {
        return Err(Error::bad_input("n and trials must be positive"));
    }
    let mean = delta * n as f64;
    let mut hits = 0usize;
    for _ in 0..trials {
        let k = (0..n).filter(|_| rng.bernoulli(delta)).count() as f64;
        if (k - mean).abs() >= epsilon * mean {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn full_selection_when_delta_is_one() {
        let mut rng = RngStream::new(1, 0);
        let d = draw_selectors(17, 1.0, &mut rng).unwrap();
        assert_eq!(d.subset, CoordinateSubset::full(17));
        assert_eq!(d.centered_sum(&[2.5; 17]), 0.0);
        assert_eq!(draw_selectors(3, 0.0, &mut rng), Err(Error::BadDelta(0.0)));
        assert_eq!(draw_selectors(3, 1.5, &mut rng), Err(Error::BadDelta(1.5)));
    }

    #[test]
    fn draws_are_reproducible() {
        let a = draw_selectors(200, 0.3, &mut RngStream::new(42, 1)).unwrap();
        let b = draw_selectors(200, 0.3, &mut RngStream::new(42, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mgf_special_values() {
        let a = [0.3, -1.0, 2.0];
        assert!((exact_mgf(&a, 0.3, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for lambda in [0.1, 1.0, 3.0] {
            let v = exact_mgf(&[1.0], 0.5, lambda).unwrap();
            assert!((v - libm::cosh(lambda / 2.0)).abs() < 1e-12);
        }
        assert!(exact_mgf(&[f64::NAN], 0.5, 1.0).is_err());
        // log-space evaluation survives huge exponents
        assert!(log_exact_mgf(&[1e4; 10], 0.5, 10.0).unwrap().is_finite());
    }

    #[test]
    fn mgf_dominated_by_symmetrized() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..50 {
            let n = 1 + rng.below(20);
            let a: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let delta = 0.05 + 0.9 * rng.uniform();
            for k in -6..6 {
                let lambda = libm::pow(2.0, k as f64);
                let exact = log_exact_mgf(&a, delta, lambda).unwrap();
                assert!(exact >= -1e-12, "Jensen: MGF ≥ 1");
                assert!(exact <= log_symmetrized_mgf(&a, delta, lambda) + 1e-9);
                assert!(2.0 * exact <= log_symmetrized_mgf(&a, delta, 2.0 * lambda) + 1e-9);
            }
        }
    }

    #[test]
    fn chernoff_matches_binomial_closed_form() {
        // a ≡ 1: bound = exp(−n KL(δ(1+t) ‖ δ)) when δ(1+t) < 1
        for (n, delta, t) in [(100, 0.3, 0.5), (50, 0.1, 1.0), (400, 0.5, 0.2)] {
            let q = delta * (1.0 + t);
            let kl = q * libm::log(q / delta) + (1.0 - q) * libm::log((1.0 - q) / (1.0 - delta));
            let expect = libm::exp(-(n as f64) * kl);
            let got = chernoff_tail_bound(&vec![1.0; n], delta, t).unwrap();
            assert!((got - expect).abs() <= 1e-6 * expect, "{n} {delta} {t}: {got} vs {expect}");
        }
    }

    #[test]
    fn chernoff_nonincreasing_and_finite() {
        let a: Vec<f64> = (0..30).map(|i| (i % 7) as f64 - 3.0).collect();
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let b = chernoff_tail_bound(&a, 0.2, 0.1 * k as f64).unwrap();
            assert!(b >= 0.0 && b <= 1.0);
            assert!(b <= prev * (1.0 + 1e-9) + 1e-300);
            prev = b;
        }
        // impossible deviation: exact tail 0, bound finite
        let huge = chernoff_tail_bound(&[1.0; 10], 0.3, 100.0).unwrap();
        assert!(huge.is_finite() && huge >= 0.0);
        let ex = exact_tail(&[1.0; 10], 0.3, 100.0).unwrap().unwrap();
        assert_eq!(ex.one_sided, 0.0);
    }

    #[test]
    fn exact_routes_agree_on_constant_weights() {
        let a = [1.0; 12];
        for (delta, t) in [(0.3, 0.5), (0.1, 1.5), (0.5, 0.25)] {
            let bin = exact_tail(&a, delta, t).unwrap().unwrap();
            assert_eq!(bin.method, ExactMethod::Binomial);
            let e = exact_tail_by_enumeration(&a, delta, t).unwrap();
            assert!((bin.one_sided - e.one_sided).abs() < 1e-12);
            assert!((bin.two_sided - e.two_sided).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_route_is_used_for_mixed_weights() {
        let a = [1.0, -0.5, 2.0, 0.25];
        let e = exact_tail(&a, 0.4, 0.3).unwrap().unwrap();
        assert_eq!(e.method, ExactMethod::Enumeration);
        assert!(e.one_sided <= e.two_sided);
        assert!(exact_tail(&[1.0, 2.0].repeat(11), 0.4, 0.3).unwrap().is_none());
    }

    #[test]
    fn degenerate_delta_one_tail_is_zero() {
        let mut rng = RngStream::new(2, 0);
        let r = tail_experiment(&[1.0, -2.0, 0.5], 1.0, 0.1, 500, &mut rng).unwrap();
        assert_eq!(r.empirical_prob, 0.0);
        assert_eq!(r.exact_prob(), Some(0.0));
        assert!(r.flags.contains(&TailFlag::UnresolvedTail));
        assert!(r.flags.contains(&TailFlag::DeltaAboveHalf));
    }

    #[test]
    fn support_bound_gives_zero() {
        // tδn > n(1−δ) cannot happen
        let mut rng = RngStream::new(2, 1);
        let r = tail_experiment(&[1.0; 20], 0.3, 3.0, 2000, &mut rng).unwrap();
        assert_eq!(r.empirical_prob, 0.0);
        assert_eq!(r.exact_prob(), Some(0.0));
    }

    #[test]
    fn constant_function_is_isometric_unless_empty() {
        let mut rng = RngStream::new(8, 0);
        let est = almost_isometry_experiment(&[1.0; 10], 0.2, 0.01, 2000, &mut rng).unwrap();
        assert_eq!(est.successes + est.empty_draws, est.trials);
        let full = almost_isometry_experiment(&[0.3, -1.0, 2.0], 1.0, 0.1, 50, &mut rng).unwrap();
        assert_eq!(full.probability, 1.0);
        assert!(almost_isometry_experiment(&[1.0], 0.5, 1.0, 10, &mut rng).is_err());
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        for (n, p) in [(10, 0.3), (100, 0.01), (7, 1.0)] {
            let s: f64 = (0..=n).map(|k| binomial_pmf(n, k, p)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
