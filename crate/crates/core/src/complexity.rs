//! Gaussian and Rademacher complexities of finite classes, the parameters
//! `ℓ_k(F)` and `t(F, ε)`, sign-balancing minima, and two audits that put
//! fitted constants on the comparison inequalities.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::entropy::{ConstantName, FittedConstant};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::shatter::{vc_dimension, ShatterConfig};
use crate::space::{CoordinateSubset, FunctionClass, Norm, RealVector};

/// Fewest Monte-Carlo trials accepted by the complexity estimators.
pub const MIN_TRIALS: usize = 100;
/// Largest point count for exact Rademacher enumeration.
pub const RADEMACHER_EXACT_MAX: usize = 20;
/// Multiset count below which `ℓ_k` is computed exhaustively.
pub const ELL_EXHAUSTIVE_MAX: f64 = 1e5;
/// Largest component size for exact sign minimization.
pub const SIGN_EXACT_MAX: usize = 24;
const HEURISTIC_RESTARTS: usize = 16;
const ELL_RESTARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexityKind {
    Gaussian,
    Rademacher,
}

impl ComplexityKind {
    pub fn name(&self) -> &'static str {
        match self {
            ComplexityKind::Gaussian => "gaussian",
            ComplexityKind::Rademacher => "rademacher",
        }
    }
}

/// Mean of `sup_f |Σ w_i f(x_i)|` over random weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√trials`; 0 for exact enumeration.
    pub std_error: f64,
    /// Number of weight vectors averaged (`2^k` for exact enumeration).
    pub trials: usize,
    pub kind: ComplexityKind,
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::bad_input(format!("at least {MIN_TRIALS} trials are required")));
    }
    Ok(())
}

/// `sup_f |Σ_j w_j f(points[j])|`.
fn sup_abs(class: &FunctionClass, points: &[usize], w: &[f64]) -> f64 {
    class
        .iter_rows()
        .map(|row| points.iter().zip(w).map(|(&p, wj)| wj * row[p]).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

fn mean_and_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

fn domain_points(class: &FunctionClass, sigma: Option<&CoordinateSubset>) -> Result<Vec<usize>> {
    match sigma {
        None => Ok((0..class.cols()).collect()),
        Some(s) if s.ambient_n() != class.cols() => Err(Error::Dimension {
            expected: class.cols(),
            found: s.ambient_n(),
        }),
        Some(s) if s.is_empty() => Err(Error::EmptySubset),
        Some(s) => Ok(s.indices().to_vec()),
    }
}

fn monte_carlo(
    class: &FunctionClass,
    points: &[usize],
    trials: usize,
    kind: ComplexityKind,
    rng: &mut RngStream,
) -> ComplexityEstimate {
    let mut w = vec![0.0; points.len()];
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            for v in w.iter_mut() {
                *v = match kind {
                    ComplexityKind::Gaussian => rng.standard_normal(),
                    ComplexityKind::Rademacher => rng.sign(),
                };
            }
            sup_abs(class, points, &w)
        })
        .collect();
    let (mean, std_error) = mean_and_error(&samples);
    ComplexityEstimate {
        mean,
        std_error,
        trials,
        kind,
    }
}

/// `E sup_f |Σ_{i∈σ} g_i f(i)|` by Monte Carlo (`σ` defaults to all points).
pub fn gaussian_complexity(
    class: &FunctionClass,
    sigma: Option<&CoordinateSubset>,
    trials: usize,
    rng: &mut RngStream,
) -> Result<ComplexityEstimate> {
    check_trials(trials)?;
    let points = domain_points(class, sigma)?;
    Ok(monte_carlo(class, &points, trials, ComplexityKind::Gaussian, rng))
}

/// `E sup_f |Σ_{i∈σ} ε_i f(i)|` by Monte Carlo.
pub fn rademacher_complexity(
    class: &FunctionClass,
    sigma: Option<&CoordinateSubset>,
    trials: usize,
    rng: &mut RngStream,
) -> Result<ComplexityEstimate> {
    check_trials(trials)?;
    let points = domain_points(class, sigma)?;
    Ok(monte_carlo(class, &points, trials, ComplexityKind::Rademacher, rng))
}

/// Exact Rademacher average by enumerating every sign vector.
pub fn rademacher_exact(class: &FunctionClass, sigma: Option<&CoordinateSubset>) -> Result<ComplexityEstimate> {
    let points = domain_points(class, sigma)?;
    rademacher_exact_points(class, &points)
}

fn rademacher_exact_points(class: &FunctionClass, points: &[usize]) -> Result<ComplexityEstimate> {
    let k = points.len();
    if k > RADEMACHER_EXACT_MAX {
        return Err(Error::SizeCap {
            what: "exact Rademacher enumeration",
            requested: k,
            limit: RADEMACHER_EXACT_MAX,
            cost: libm::pow(2.0, k as f64) * class.rows() as f64,
        });
    }
    // Gray-code walk starting from all +1; the sums move by ±2 f(x_j)
    let mut sums: Vec<f64> = class.iter_rows().map(|r| points.iter().map(|&p| r[p]).sum()).collect();
    let mut signs = vec![1.0; k];
    let mut total = sums.iter().fold(0.0, |a: f64, s| a.max(s.abs()));
    let patterns = 1u64 << k;
    for step in 1..patterns {
        let j = step.trailing_zeros() as usize;
        signs[j] = -signs[j];
        for (s, row) in sums.iter_mut().zip(class.iter_rows()) {
            *s += 2.0 * signs[j] * row[points[j]];
        }
        total += sums.iter().fold(0.0, |a: f64, s| a.max(s.abs()));
    }
    Ok(ComplexityEstimate {
        mean: total / patterns as f64,
        std_error: 0.0,
        trials: patterns as usize,
        kind: ComplexityKind::Rademacher,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllMethod {
    /// Every multiset of `k` points, common random weights.
    Exhaustive,
    /// Coordinate ascent over tuples with restarts.
    Greedy,
}

/// `ℓ_k(F)` with the maximizing tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct EllEstimate {
    pub k: usize,
    pub estimate: ComplexityEstimate,
    pub points: Vec<usize>,
    pub method: EllMethod,
}

/// `C(n + k − 1, k)`: number of multisets of size `k` from `n` points.
pub fn multiset_count(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n + i) as f64 / (i + 1) as f64;
    }
    libm::round(c)
}

struct TupleScorer<'a> {
    class: &'a FunctionClass,
    kind: ComplexityKind,
    /// `trials x k` common weights; `None` for exact Rademacher.
    weights: Option<Vec<f64>>,
    trials: usize,
    k: usize,
}

impl TupleScorer<'_> {
    fn score(&self, points: &[usize]) -> Result<ComplexityEstimate> {
        match &self.weights {
            None => rademacher_exact_points(self.class, points),
            Some(w) => {
                let samples: Vec<f64> = w.chunks(self.k).map(|row| sup_abs(self.class, points, row)).collect();
                let (mean, std_error) = mean_and_error(&samples);
                Ok(ComplexityEstimate {
                    mean,
                    std_error,
                    trials: self.trials,
                    kind: self.kind,
                })
            }
        }
    }
}

/// `ℓ_k(F) = sup` over `k`-tuples of domain points (repetition allowed) of
/// the complexity of the projected class.
///
/// Rademacher weights are enumerated exactly when `k ≤ 20`; otherwise all
/// tuples share one table of `trials` random weight vectors.
pub fn ell_parameter(
    class: &FunctionClass,
    k: usize,
    trials: usize,
    kind: ComplexityKind,
    rng: &mut RngStream,
) -> Result<EllEstimate> {
    if k == 0 {
        return Err(Error::bad_input("k must be positive"));
    }
    let exact_signs = kind == ComplexityKind::Rademacher && k <= RADEMACHER_EXACT_MAX;
    if !exact_signs {
        check_trials(trials)?;
    }
    let weights = (!exact_signs).then(|| {
        (0..trials * k)
            .map(|_| match kind {
                ComplexityKind::Gaussian => rng.standard_normal(),
                ComplexityKind::Rademacher => rng.sign(),
            })
            .collect()
    });
    let scorer = TupleScorer {
        class,
        kind,
        weights,
        trials,
        k,
    };
    let n = class.cols();
    if multiset_count(n, k) <= ELL_EXHAUSTIVE_MAX {
        let mut tuple = vec![0usize; k];
        let mut best: Option<(ComplexityEstimate, Vec<usize>)> = None;
        loop {
            let est = scorer.score(&tuple)?;
            if best.as_ref().is_none_or(|(b, _)| est.mean > b.mean) {
                best = Some((est, tuple.clone()));
            }
            // next nondecreasing tuple
            let Some(pos) = (0..k).rev().find(|&i| tuple[i] + 1 < n) else {
                break;
            };
            let v = tuple[pos] + 1;
            for t in tuple[pos..].iter_mut() {
                *t = v;
            }
        }
        let (estimate, points) = best.expect("at least one tuple");
        return Ok(EllEstimate {
            k,
            estimate,
            points,
            method: EllMethod::Exhaustive,
        });
    }

    let peak = (0..n)
        .max_by(|&a, &b| {
            let fa = class.iter_rows().map(|r| r[a].abs()).fold(0.0, f64::max);
            let fb = class.iter_rows().map(|r| r[b].abs()).fold(0.0, f64::max);
            fa.total_cmp(&fb).then(b.cmp(&a))
        })
        .unwrap_or(0);
    let mut best: Option<(ComplexityEstimate, Vec<usize>)> = None;
    for restart in 0..ELL_RESTARTS {
        let mut tuple: Vec<usize> = if restart == 0 {
            vec![peak; k]
        } else {
            (0..k).map(|_| rng.below(n)).collect()
        };
        let mut current = scorer.score(&tuple)?;
        loop {
            let mut improved = false;
            for pos in 0..k {
                let keep = tuple[pos];
                for p in 0..n {
                    if p == keep {
                        continue;
                    }
                    tuple[pos] = p;
                    let est = scorer.score(&tuple)?;
                    if est.mean > current.mean + 1e-12 {
                        current = est;
                        improved = true;
                    } else {
                        tuple[pos] = keep;
                        continue;
                    }
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| current.mean > b.mean) {
            best = Some((current, tuple));
        }
    }
    let (estimate, mut points) = best.expect("restarts ran");
    points.sort_unstable();
    Ok(EllEstimate {
        k,
        estimate,
        points,
        method: EllMethod::Greedy,
    })
}

/// `t(F, ε)`: the largest `k ≤ k_max` with `ℓ_k(F) ≥ εk`, read with one
/// standard error of slack on Monte-Carlo estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct TParameter {
    pub value: usize,
    /// The largest tested `k` qualified, so the true value may be larger.
    pub capped: bool,
    pub per_k: Vec<EllEstimate>,
}

pub fn t_parameter(
    class: &FunctionClass,
    eps: f64,
    k_max: usize,
    trials: usize,
    kind: ComplexityKind,
    rng: &mut RngStream,
) -> Result<TParameter> {
    if !(eps > 0.0) {
        return Err(Error::BadEpsilon(eps));
    }
    if k_max == 0 {
        return Err(Error::bad_input("k_max must be positive"));
    }
    let mut value = 0;
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut sub = rng.substream(k as u64);
        let ell = ell_parameter(class, k, trials, kind, &mut sub)?;
        if ell.estimate.mean + ell.estimate.std_error >= eps * k as f64 {
            value = k;
        }
        per_k.push(ell);
    }
    Ok(TParameter {
        value,
        capped: value == k_max,
        per_k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMethod {
    Exact,
    /// Greedy signing plus flip descent; the value is an upper bound.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    Exact,
    Heuristic,
}

/// `min_{η ∈ {±1}^k} ‖Σ η_i x_i‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignMinimumResult {
    pub value: f64,
    pub signs: Vec<f64>,
    pub method: SignMethod,
}

fn check_vectors(vectors: &[RealVector]) -> Result<usize> {
    let d = vectors.first().map(|v| v.len()).ok_or_else(|| Error::bad_input("no vectors"))?;
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::bad_input("vectors have different dimensions"));
    }
    Ok(d)
}

/// Groups vectors whose supports overlap (union-find over shared nonzero
/// coordinates). The norm of a sum splits over such groups.
fn support_components(vectors: &[RealVector]) -> Vec<Vec<usize>> {
    let k = vectors.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let d = vectors[0].len();
    for coord in 0..d {
        let mut first: Option<usize> = None;
        for (i, v) in vectors.iter().enumerate() {
            if v[coord] != 0.0 {
                match first {
                    None => first = Some(i),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, i));
                        if a != b {
                            parent[b] = a;
                        }
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }
    groups
}

fn signed_sum(vectors: &[RealVector], signs: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; vectors[0].len()];
    for (v, e) in vectors.iter().zip(signs) {
        for (a, b) in s.iter_mut().zip(v.iter()) {
            *a += e * b;
        }
    }
    s
}

/// Minimizes over `2^{k−1}` sign patterns (the first sign is fixed by the
/// global symmetry) with a Gray-code walk, one support component at a time.
fn exact_sign_minimum(vectors: &[RealVector], norm: Norm) -> Result<SignMinimumResult> {
    let mut signs = vec![1.0; vectors.len()];
    for group in support_components(vectors) {
        if group.len() > SIGN_EXACT_MAX {
            return Err(Error::SizeCap {
                what: "exact sign minimization",
                requested: group.len(),
                limit: SIGN_EXACT_MAX,
                cost: libm::pow(2.0, (group.len() - 1) as f64),
            });
        }
        let members: Vec<&RealVector> = group.iter().map(|&i| &vectors[i]).collect();
        let mut local = vec![1.0; group.len()];
        let mut sum = vec![0.0; vectors[0].len()];
        for v in &members {
            for (a, b) in sum.iter_mut().zip(v.iter()) {
                *a += b;
            }
        }
        let mut best = norm.eval(&sum);
        let mut best_signs = local.clone();
        let free = group.len() - 1;
        for step in 1u64..(1u64 << free) {
            let j = 1 + step.trailing_zeros() as usize;
            local[j] = -local[j];
            for (a, b) in sum.iter_mut().zip(members[j].iter()) {
                *a += 2.0 * local[j] * b;
            }
            let v = norm.eval(&sum);
            if v < best {
                best = v;
                best_signs.copy_from_slice(&local);
            }
        }
        for (&i, s) in group.iter().zip(best_signs) {
            signs[i] = s;
        }
    }
    // evaluate the assembled sum directly
    let value = norm.eval(&signed_sum(vectors, &signs));
    Ok(SignMinimumResult {
        value,
        signs,
        method: SignMethod::Exact,
    })
}

fn flip_descent(vectors: &[RealVector], norm: Norm, signs: &mut [f64]) -> f64 {
    let mut sum = signed_sum(vectors, signs);
    let mut value = norm.eval(&sum);
    loop {
        let mut improved = false;
        for i in 0..vectors.len() {
            let trial: Vec<f64> = sum.iter().zip(vectors[i].iter()).map(|(a, b)| a - 2.0 * signs[i] * b).collect();
            let v = norm.eval(&trial);
            if v < value - 1e-15 {
                value = v;
                sum = trial;
                signs[i] = -signs[i];
                improved = true;
            }
        }
        if !improved {
            return value;
        }
    }
}

fn heuristic_sign_minimum(vectors: &[RealVector], norm: Norm, rng: &mut RngStream) -> SignMinimumResult {
    let k = vectors.len();
    let d = vectors[0].len();
    let mut best_value = f64::INFINITY;
    let mut best_signs = vec![1.0; k];
    for restart in 0..HEURISTIC_RESTARTS {
        let mut order: Vec<usize> = (0..k).collect();
        if restart == 0 {
            order.sort_by(|&a, &b| norm.eval(&vectors[b]).total_cmp(&norm.eval(&vectors[a])).then(a.cmp(&b)));
        } else {
            for i in (1..k).rev() {
                order.swap(i, rng.below(i + 1));
            }
        }
        let mut signs = vec![1.0; k];
        let mut sum = vec![0.0; d];
        for &i in &order {
            let plus: Vec<f64> = sum.iter().zip(vectors[i].iter()).map(|(a, b)| a + b).collect();
            let minus: Vec<f64> = sum.iter().zip(vectors[i].iter()).map(|(a, b)| a - b).collect();
            if norm.eval(&minus) < norm.eval(&plus) {
                signs[i] = -1.0;
                sum = minus;
            } else {
                sum = plus;
            }
        }
        let value = flip_descent(vectors, norm, &mut signs);
        if value < best_value {
            best_value = value;
            best_signs = signs;
        }
    }
    if best_signs[0] < 0.0 {
        for s in best_signs.iter_mut() {
            *s = -*s;
        }
    }
    SignMinimumResult {
        value: best_value,
        signs: best_signs,
        method: SignMethod::Heuristic,
    }
}

pub fn min_sign_norm(
    vectors: &[RealVector],
    norm: Norm,
    mode: SignMode,
    rng: &mut RngStream,
) -> Result<SignMinimumResult> {
    norm.validate()?;
    check_vectors(vectors)?;
    match mode {
        SignMode::Exact => exact_sign_minimum(vectors, norm),
        SignMode::Heuristic => Ok(heuristic_sign_minimum(vectors, norm, rng)),
    }
}

/// One row of [`type_infratype_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRow {
    /// Subset fraction `λ`.
    pub lambda: f64,
    pub subset_size: usize,
    /// Max of `min_η ‖Σ_{i∈σ} η_i x_i‖ / |σ|^{1/2}` over sampled subsets of
    /// size at most `λn`.
    pub m_emp: f64,
    /// Set when some subset's minimum came from the heuristic (an upper
    /// bound, so `m_emp` may be overstated).
    pub heuristic_used: bool,
    /// `E ‖Σ g_i x_i‖ / (m_emp (n/λ)^{1/2})`.
    pub c_emp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeReport {
    pub n: usize,
    pub gaussian_average: ComplexityEstimate,
    pub rows: Vec<TypeRow>,
}

/// `E ‖Σ g_i x_i‖` by Monte Carlo.
pub fn gaussian_average(
    vectors: &[RealVector],
    norm: Norm,
    trials: usize,
    rng: &mut RngStream,
) -> Result<ComplexityEstimate> {
    check_trials(trials)?;
    norm.validate()?;
    let d = check_vectors(vectors)?;
    let mut sum = vec![0.0; d];
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            sum.iter_mut().for_each(|v| *v = 0.0);
            for x in vectors {
                let g = rng.standard_normal();
                for (a, b) in sum.iter_mut().zip(x.iter()) {
                    *a += g * b;
                }
            }
            norm.eval(&sum)
        })
        .collect();
    let (mean, std_error) = mean_and_error(&samples);
    Ok(ComplexityEstimate {
        mean,
        std_error,
        trials,
        kind: ComplexityKind::Gaussian,
    })
}

/// Compares sign minima on random subsets with the Gaussian average.
///
/// For each `λ` (ascending) `subsets` random subsets of size
/// `max(1, round(λn))` are drawn; each minimum is exact when every support
/// component has at most 24 vectors, heuristic otherwise.
pub fn type_infratype_report(
    vectors: &[RealVector],
    norm: Norm,
    lambda_grid: &[f64],
    subsets: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<TypeReport> {
    norm.validate()?;
    check_vectors(vectors)?;
    if vectors.iter().any(|v| norm.eval(v) > 1.0 + 1e-12) {
        return Err(Error::bad_input("vectors must lie in the unit ball"));
    }
    if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::bad_input("lambda values must lie in (0, 1]"));
    }
    if subsets == 0 {
        return Err(Error::bad_input("at least one subset per lambda is required"));
    }
    let n = vectors.len();
    let mut gauss_rng = rng.substream(0);
    let gaussian = gaussian_average(vectors, norm, trials, &mut gauss_rng)?;
    let mut grid = lambda_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut running: f64 = 0.0;
    let mut any_heuristic = false;
    let mut rows = Vec::with_capacity(grid.len());
    for (g, &lambda) in grid.iter().enumerate() {
        let size = (libm::round(lambda * n as f64) as usize).clamp(1, n);
        let mut sub = rng.substream(1 + g as u64);
        for _ in 0..subsets {
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = i + sub.below(n - i);
                idx.swap(i, j);
            }
            let chosen: Vec<RealVector> = idx[..size].iter().map(|&i| vectors[i].clone()).collect();
            let minimum = match exact_sign_minimum(&chosen, norm) {
                Ok(r) => r.value,
                Err(Error::SizeCap { .. }) => {
                    any_heuristic = true;
                    heuristic_sign_minimum(&chosen, norm, &mut sub).value
                }
                Err(e) => return Err(e),
            };
            running = running.max(minimum / libm::sqrt(size as f64));
        }
        let c_emp = if running > 0.0 {
            gaussian.mean / (running * libm::sqrt(n as f64 / lambda))
        } else {
            f64::INFINITY
        };
        rows.push(TypeRow {
            lambda,
            subset_size: size,
            m_emp: running,
            heuristic_used: any_heuristic,
            c_emp,
        });
    }
    Ok(TypeReport {
        n,
        gaussian_average: gaussian,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditFlag {
    /// The integrand vanished on the whole grid.
    IntegralZero,
}

impl AuditFlag {
    pub fn code(&self) -> &'static str {
        match self {
            AuditFlag::IntegralZero => "INTEGRAL_ZERO",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem13Audit {
    pub constant: FittedConstant,
    pub expectation: ComplexityEstimate,
    /// Lower integration limit `cE/n`.
    pub lower_limit: f64,
    pub integral: f64,
    pub grid: Vec<f64>,
    pub vc: Vec<usize>,
    pub flags: Vec<AuditFlag>,
}

/// `∫_{lower}^1 √(vc(t) ln(2/t)) dt` by the trapezoid rule on `points`
/// equally spaced nodes, with `vc` evaluated at each node.
pub fn entropy_integral<F>(lower: f64, points: usize, mut vc: F) -> Result<(f64, Vec<f64>, Vec<usize>)>
where
    F: FnMut(f64) -> Result<usize>,
{
    if points < 2 {
        return Err(Error::bad_input("need at least two quadrature nodes"));
    }
    let lower = lower.max(1e-12);
    if lower >= 1.0 {
        return Ok((0.0, Vec::new(), Vec::new()));
    }
    let h = (1.0 - lower) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|j| if j + 1 == points { 1.0 } else { lower + h * j as f64 }).collect();
    let mut dims = Vec::with_capacity(points);
    let mut values = Vec::with_capacity(points);
    for &t in &grid {
        let v = vc(t)?;
        dims.push(v);
        values.push(libm::sqrt(v as f64 * libm::log(2.0 / t)));
    }
    let integral = h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[points - 1]));
    Ok((integral, grid, dims))
}

/// Quadrature nodes used by [`theorem13_audit`].
pub const THEOREM13_NODES: usize = 41;

/// Fits `K = E / (√n ∫_{cE/n}^1 √(vc(F, t) ln(2/t)) dt)` with `c = 1`, where
/// `E` is the Gaussian complexity of `F` on all points.
pub fn theorem13_audit(
    class: &FunctionClass,
    trials: usize,
    config: &ShatterConfig,
    rng: &mut RngStream,
) -> Result<Theorem13Audit> {
    if !class.bounded_by_one() && class.max_abs() > 1.0 {
        return Err(Error::bad_input("class must be bounded by 1"));
    }
    let n = class.cols() as f64;
    let expectation = gaussian_complexity(class, None, trials, rng)?;
    let lower = expectation.mean / n;
    let (integral, grid, vc) = entropy_integral(lower, THEOREM13_NODES, |t| {
        Ok(vc_dimension(class, t, config)?.dimension)
    })?;
    let mut flags = Vec::new();
    let value = if integral > 0.0 {
        expectation.mean / (libm::sqrt(n) * integral)
    } else {
        flags.push(AuditFlag::IntegralZero);
        0.0
    };
    let mut inputs: Vec<f64> = class.iter_rows().flatten().copied().collect();
    inputs.push(trials as f64);
    inputs.push(rng.seed() as f64);
    let protocol = format!(
        "K = E / (sqrt(n) * integral from E/n to 1 of sqrt(vc(F,t) ln(2/t)) dt); E by {trials} Gaussian trials, trapezoid rule on {THEOREM13_NODES} nodes, {}x{} class",
        class.rows(),
        class.cols()
    );
    Ok(Theorem13Audit {
        constant: FittedConstant::new(ConstantName::K, value, protocol, &inputs)?,
        expectation,
        lower_limit: lower,
        integral,
        grid,
        vc,
        flags,
    })
}
