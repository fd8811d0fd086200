//! Shattering dimension of finite classes and of their convex hulls.
//!
//! A set `σ` is `t`-shattered by `F` if some level function `h` on `σ`
//! admits, for every sign pattern `ε ∈ {±1}^σ`, a function `f ∈ F` with
//! `f(x) ≥ h(x) + t` where `ε_x = +1` and `f(x) ≤ h(x) − t` where
//! `ε_x = −1`.
//!
//! The finite search never enumerates `h`. Given an assignment of one
//! function per pattern, a valid `h` exists iff for every `x` the smallest
//! value assigned on the high side exceeds the largest value assigned on
//! the low side by at least `2t`; the midpoint of the two then serves as
//! `h(x)`. Backtracking over assignments with these running bounds (plus
//! forward checking) decides shattering exactly.
//!
//! For `conv(F)` the same question becomes a linear feasibility problem in
//! `h` and one convex-weight vector per pattern. It is solved either as one
//! joint LP or by a cutting-plane decomposition that only couples patterns
//! through `h`, which scales to larger point sets.
//!
//! Pattern masks: bit `k` set means the `k`-th point of `σ` is on the high
//! side.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rng::RngStream;
use crate::space::{CoordinateSubset, FunctionClass, Norm, RealVector};

/// Tolerance for LP-based feasibility decisions and witness checks.
pub const LP_FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HullMethod {
    /// One LP over `h` and every pattern's weights.
    JointLp,
    /// Master LP over `h` with cuts generated from per-pattern matrix games.
    CuttingPlane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShatterConfig {
    /// Largest `|σ|` for the finite backtracking search.
    pub max_points: usize,
    /// Largest number of functions for the finite search.
    pub max_functions: usize,
    /// Largest domain size for `vc_dimension`.
    pub max_domain: usize,
    /// Largest `|σ|` for convex-hull shattering.
    pub hull_max_points: usize,
    pub hull_method: HullMethod,
    /// Slack allowed in the `≥ 2t` separation test of the finite search.
    pub tolerance: f64,
}

impl Default for ShatterConfig {
    fn default() -> Self {
        ShatterConfig {
            max_points: 5,
            max_functions: 64,
            max_domain: 20,
            hull_max_points: 4,
            hull_method: HullMethod::JointLp,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternAssignment {
    /// Row index of the class.
    Function(usize),
    /// Convex weights over the class's rows.
    Weights(Vec<f64>),
}

/// Certificate that `sigma` is `scale`-shattered.
#[derive(Debug, Clone, PartialEq)]
pub struct ShatterWitness {
    pub sigma: CoordinateSubset,
    /// `h(x)` for each point of `sigma`, in order.
    pub level: Vec<f64>,
    /// One entry per pattern mask `0 .. 2^{|σ|}`.
    pub assignment: Vec<PatternAssignment>,
    pub scale: f64,
}

impl ShatterWitness {
    /// Re-checks every margin by direct substitution.
    pub fn verify(&self, class: &FunctionClass, tol: f64) -> bool {
        let s = self.sigma.len();
        if self.assignment.len() != 1 << s || self.level.len() != s {
            return false;
        }
        for (mask, assigned) in self.assignment.iter().enumerate() {
            let values: Vec<f64> = match assigned {
                PatternAssignment::Function(j) => {
                    if *j >= class.rows() {
                        return false;
                    }
                    self.sigma.indices().iter().map(|&x| class.value(*j, x)).collect()
                }
                PatternAssignment::Weights(w) => {
                    if w.len() != class.rows()
                        || w.iter().any(|&v| v < -tol)
                        || (w.iter().sum::<f64>() - 1.0).abs() > tol
                    {
                        return false;
                    }
                    self.sigma
                        .indices()
                        .iter()
                        .map(|&x| w.iter().enumerate().map(|(j, &wj)| wj * class.value(j, x)).sum())
                        .collect()
                }
            };
            for (k, v) in values.iter().enumerate() {
                let high = mask >> k & 1 == 1;
                let ok = if high {
                    *v >= self.level[k] + self.scale - tol
                } else {
                    *v <= self.level[k] - self.scale + tol
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

fn check_scale(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::bad_input("scale t must be positive"))
    }
}

/// Decides whether `sigma` is `t`-shattered by the finite class, returning
/// a verified witness when it is.
pub fn is_shattered(
    class: &FunctionClass,
    sigma: &CoordinateSubset,
    t: f64,
    config: &ShatterConfig,
) -> Result<Option<ShatterWitness>> {
    check_scale(t)?;
    if sigma.ambient_n() != class.cols() {
        return Err(Error::Dimension {
            expected: class.cols(),
            found: sigma.ambient_n(),
        });
    }
    let s = sigma.len();
    let m = class.rows();
    if s > config.max_points || m > config.max_functions {
        return Err(Error::SizeCap {
            what: "finite shattering search",
            requested: if s > config.max_points { s } else { m },
            limit: if s > config.max_points {
                config.max_points
            } else {
                config.max_functions
            },
            cost: libm::pow(m as f64, libm::pow(2.0, s as f64)),
        });
    }
    if s == 0 {
        return Ok(Some(ShatterWitness {
            sigma: sigma.clone(),
            level: Vec::new(),
            assignment: vec![PatternAssignment::Function(0)],
            scale: t,
        }));
    }

    // distinct restrictions to σ, remembering one source row each
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for j in 0..m {
        let r: Vec<f64> = sigma.indices().iter().map(|&x| class.value(j, x)).collect();
        if !rows.iter().any(|(_, q)| *q == r) {
            rows.push((j, r));
        }
    }
    let patterns = 1usize << s;
    if rows.len() < patterns {
        return Ok(None);
    }

    let mut search = Search {
        rows: &rows,
        s,
        gap: 2.0 * t - config.tolerance,
        hi_min: vec![f64::INFINITY; s],
        lo_max: vec![f64::NEG_INFINITY; s],
        assigned: vec![usize::MAX; patterns],
    };
    if !search.solve(patterns) {
        return Ok(None);
    }
    let level = (0..s).map(|k| 0.5 * (search.hi_min[k] + search.lo_max[k])).collect();
    let witness = ShatterWitness {
        sigma: sigma.clone(),
        level,
        assignment: search
            .assigned
            .iter()
            .map(|&r| PatternAssignment::Function(rows[r].0))
            .collect(),
        scale: t,
    };
    debug_assert!(witness.verify(class, config.tolerance + 1e-12));
    Ok(Some(witness))
}

struct Search<'a> {
    rows: &'a [(usize, Vec<f64>)],
    s: usize,
    gap: f64,
    hi_min: Vec<f64>,
    lo_max: Vec<f64>,
    assigned: Vec<usize>,
}

impl Search<'_> {
    fn compatible(&self, mask: usize, row: &[f64]) -> bool {
        (0..self.s).all(|k| {
            if mask >> k & 1 == 1 {
                row[k] - self.lo_max[k] >= self.gap
            } else {
                self.hi_min[k] - row[k] >= self.gap
            }
        })
    }

    fn solve(&mut self, remaining: usize) -> bool {
        if remaining == 0 {
            return true;
        }
        // most constrained open pattern; ties go to more high entries
        let mut pick: Option<(usize, usize)> = None;
        for mask in 0..self.assigned.len() {
            if self.assigned[mask] != usize::MAX {
                continue;
            }
            let count = self.rows.iter().filter(|(_, r)| self.compatible(mask, r)).count();
            if count == 0 {
                return false;
            }
            let better = match pick {
                None => true,
                Some((best_mask, best_count)) => {
                    count < best_count
                        || (count == best_count && mask.count_ones() > best_mask.count_ones())
                }
            };
            if better {
                pick = Some((mask, count));
            }
        }
        let (mask, _) = pick.expect("an open pattern exists");
        for r in 0..self.rows.len() {
            if !self.compatible(mask, &self.rows[r].1) {
                continue;
            }
            let saved_hi = self.hi_min.clone();
            let saved_lo = self.lo_max.clone();
            for k in 0..self.s {
                let v = self.rows[r].1[k];
                if mask >> k & 1 == 1 {
                    self.hi_min[k] = self.hi_min[k].min(v);
                } else {
                    self.lo_max[k] = self.lo_max[k].max(v);
                }
            }
            self.assigned[mask] = r;
            if self.solve(remaining - 1) {
                return true;
            }
            self.assigned[mask] = usize::MAX;
            self.hi_min = saved_hi;
            self.lo_max = saved_lo;
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VcResult {
    pub dimension: usize,
    /// A witness for a shattered set of maximal size (absent when 0).
    pub witness: Option<ShatterWitness>,
    pub subsets_checked: usize,
}

/// `vc(F, t)`: the largest `t`-shattered subset of the domain.
///
/// Sizes are explored upward; a `k`-set is only tested when all of its
/// `(k−1)`-subsets were shattered, since shattering passes to subsets.
pub fn vc_dimension(class: &FunctionClass, t: f64, config: &ShatterConfig) -> Result<VcResult> {
    check_scale(t)?;
    let n = class.cols();
    if n > config.max_domain || n > 63 {
        return Err(Error::SizeCap {
            what: "shattering dimension domain",
            requested: n,
            limit: config.max_domain.min(63),
            cost: libm::pow(2.0, n as f64),
        });
    }
    let distinct = {
        let mut seen: Vec<&[f64]> = Vec::new();
        for r in class.iter_rows() {
            if !seen.contains(&r) {
                seen.push(r);
            }
        }
        seen.len()
    };
    let log2_m = usize::BITS as usize - 1 - class.rows().leading_zeros() as usize;
    let size_bound = (usize::BITS as usize - 1 - distinct.leading_zeros() as usize).min(n);

    let mut shattered: Vec<u64> = vec![0]; // masks of shattered sets of the current size
    let mut best: Option<ShatterWitness> = None;
    let mut checked = 0;
    for k in 1..=size_bound {
        let candidates = extend_candidates(&shattered, n, k);
        if candidates.is_empty() {
            break;
        }
        if k > config.max_points {
            return Err(Error::SizeCap {
                what: "finite shattering search",
                requested: k,
                limit: config.max_points,
                cost: candidates.len() as f64 * libm::pow(class.rows() as f64, libm::pow(2.0, k as f64)),
            });
        }
        let mut next = Vec::new();
        for mask in candidates {
            checked += 1;
            let sigma = mask_to_subset(mask, n);
            if let Some(w) = is_shattered(class, &sigma, t, config)? {
                if next.is_empty() {
                    best = Some(w);
                }
                next.push(mask);
            }
        }
        if next.is_empty() {
            break;
        }
        shattered = next;
    }
    let dimension = best.as_ref().map_or(0, |w| w.sigma.len());
    assert!(dimension <= log2_m, "vc(F, t) exceeded log2 |F|");
    Ok(VcResult {
        dimension,
        witness: best,
        subsets_checked: checked,
    })
}

fn mask_to_subset(mask: u64, n: usize) -> CoordinateSubset {
    CoordinateSubset::new((0..n).filter(|&i| mask >> i & 1 == 1).collect(), n).expect("mask within range")
}

/// `k`-subsets whose every `(k−1)`-subset appears in `prev`.
fn extend_candidates(prev: &[u64], n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sorted = prev.to_vec();
    sorted.sort_unstable();
    for &base in prev {
        // only extend by indices above the highest element to avoid repeats
        let start = if base == 0 { 0 } else { 64 - base.leading_zeros() as usize };
        for i in start..n {
            let cand = base | 1 << i;
            let all_subsets_present = (0..n)
                .filter(|&j| cand >> j & 1 == 1)
                .all(|j| sorted.binary_search(&(cand & !(1 << j))).is_ok());
            if all_subsets_present {
                out.push(cand);
            }
        }
    }
    debug_assert!(out.iter().all(|m| m.count_ones() as usize == k));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominationMethod {
    ExactLp,
    /// Minimum over sampled directions: an upper bound on the true value.
    SampledUpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominationMode {
    Exact,
    Sampled { directions: usize },
}

/// Largest `ε` with `ε Σ|a_i| ≤ ‖Σ a_i x_i‖` for all coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationResult {
    pub epsilon_star: f64,
    /// A coefficient vector with `‖a‖_1 = 1` attaining `epsilon_star`.
    pub minimizer: RealVector,
    pub method: DominationMethod,
}

/// Largest point count accepted by the exact orthant enumeration.
pub const DOMINATION_EXACT_MAX: usize = 15;

/// `min_{‖a‖_1 = 1} ‖Σ a_i x_i‖`.
///
/// Exact mode (sup-norm only) solves one LP per sign orthant of `a`; the
/// global sign symmetry fixes the first sign. Sampled mode scans unit
/// vectors, sign patterns and Gaussian directions.
pub fn l1_domination(
    points: &[RealVector],
    norm: Norm,
    mode: DominationMode,
    rng: &mut RngStream,
) -> Result<DominationResult> {
    norm.validate()?;
    let c = points.len();
    if c == 0 {
        return Err(Error::bad_input("no points"));
    }
    let k = points[0].len();
    if points.iter().any(|p| p.len() != k) {
        return Err(Error::bad_input("points have different dimensions"));
    }
    let combine = |a: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; k];
        for (p, &ai) in points.iter().zip(a) {
            for (vj, pj) in v.iter_mut().zip(p.iter()) {
                *vj += ai * pj;
            }
        }
        v
    };
    match mode {
        DominationMode::Exact => {
            if norm != Norm::Sup {
                return Err(Error::UnsupportedNorm);
            }
            if c > DOMINATION_EXACT_MAX {
                return Err(Error::SizeCap {
                    what: "exact l1-domination",
                    requested: c,
                    limit: DOMINATION_EXACT_MAX,
                    cost: libm::pow(2.0, (c - 1) as f64),
                });
            }
            let mut best = f64::INFINITY;
            let mut best_a = vec![0.0; c];
            for orthant in 0u32..(1 << (c - 1)) {
                let signs: Vec<f64> = (0..c)
                    .map(|i| if i > 0 && orthant >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                let mut lp = LinearProgram::new(c + 1);
                lp.set_objective(c, 1.0);
                for j in 0..k {
                    let row: Vec<(usize, f64)> = (0..c).map(|i| (i, signs[i] * points[i][j])).collect();
                    let mut up = row.clone();
                    up.push((c, -1.0));
                    lp.add_row(up, Relation::Le, 0.0);
                    let mut down: Vec<(usize, f64)> = row.into_iter().map(|(i, v)| (i, -v)).collect();
                    down.push((c, -1.0));
                    lp.add_row(down, Relation::Le, 0.0);
                }
                lp.add_row((0..c).map(|i| (i, 1.0)).collect(), Relation::Eq, 1.0);
                match lp.solve()? {
                    LpOutcome::Optimal(sol) => {
                        if sol.objective < best {
                            best = sol.objective;
                            best_a = (0..c).map(|i| signs[i] * sol.x[i]).collect();
                        }
                    }
                    _ => return Err(Error::Solver("orthant LP not optimal")),
                }
            }
            // report the norm of the minimizer itself
            let value = Norm::Sup.eval(&combine(&best_a));
            Ok(DominationResult {
                epsilon_star: value.max(0.0),
                minimizer: RealVector::new(best_a)?,
                method: DominationMethod::ExactLp,
            })
        }
        DominationMode::Sampled { directions } => {
            let mut best = f64::INFINITY;
            let mut best_a = vec![0.0; c];
            let consider = |a: Vec<f64>, best: &mut f64, best_a: &mut Vec<f64>| {
                let l1: f64 = a.iter().map(|v| v.abs()).sum();
                if l1 == 0.0 {
                    return;
                }
                let a: Vec<f64> = a.iter().map(|v| v / l1).collect();
                let value = norm.eval(&combine(&a));
                if value < *best {
                    *best = value;
                    *best_a = a;
                }
            };
            for i in 0..c {
                let mut a = vec![0.0; c];
                a[i] = 1.0;
                consider(a, &mut best, &mut best_a);
            }
            if c <= 12 {
                for mask in 0u32..(1 << (c - 1)) {
                    let a = (0..c)
                        .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    consider(a, &mut best, &mut best_a);
                }
            } else {
                for _ in 0..4096 {
                    let a = (0..c).map(|_| rng.sign()).collect();
                    consider(a, &mut best, &mut best_a);
                }
            }
            for _ in 0..directions {
                let a = (0..c).map(|_| rng.standard_normal()).collect();
                consider(a, &mut best, &mut best_a);
            }
            Ok(DominationResult {
                epsilon_star: best,
                minimizer: RealVector::new(best_a)?,
                method: DominationMethod::SampledUpperBound,
            })
        }
    }
}

/// Best margin achievable by `conv(F)` on `sigma`, capped at `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullMargin {
    /// Margin certified by `level` and `weights`.
    pub margin: f64,
    /// Upper bound on the optimal margin (equal to `margin` for the joint LP).
    pub upper: f64,
    pub level: Vec<f64>,
    /// Convex weights over the rows, one vector per pattern mask.
    pub weights: Vec<Vec<f64>>,
}

const CUTTING_PLANE_MAX_ROUNDS: usize = 2_000;

/// Maximizes `τ ≤ cap` such that some `h` and per-pattern convex weights
/// satisfy every shattering constraint at margin `τ`.
pub fn max_hull_margin(
    class: &FunctionClass,
    sigma: &CoordinateSubset,
    cap: f64,
    method: HullMethod,
) -> Result<HullMargin> {
    if sigma.ambient_n() != class.cols() {
        return Err(Error::Dimension {
            expected: class.cols(),
            found: sigma.ambient_n(),
        });
    }
    if sigma.is_empty() {
        return Err(Error::EmptySubset);
    }
    let s = sigma.len();
    let m = class.rows();
    // shift each point so values are ≥ 0: G_j(x) = F_j(x) − min_j F_j(x)
    let lows: Vec<f64> = sigma
        .indices()
        .iter()
        .map(|&x| (0..m).map(|j| class.value(j, x)).fold(f64::INFINITY, f64::min))
        .collect();
    let g: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..s).map(|k| class.value(j, sigma.indices()[k]) - lows[k]).collect())
        .collect();
    let ranges: Vec<f64> = (0..s).map(|k| g.iter().map(|r| r[k]).fold(0.0, f64::max)).collect();
    let cap = cap.min(0.5 * ranges.iter().fold(0.0, |a: f64, &b| a.max(b)) + 1.0);
    let mut out = match method {
        HullMethod::JointLp => joint_lp_margin(&g, s, cap)?,
        HullMethod::CuttingPlane => cutting_plane_margin(&g, &ranges, s, cap)?,
    };
    for (h, lo) in out.level.iter_mut().zip(&lows) {
        *h += lo;
    }
    Ok(out)
}

fn joint_lp_margin(g: &[Vec<f64>], s: usize, cap: f64) -> Result<HullMargin> {
    let m = g.len();
    let patterns = 1usize << s;
    // variables: h'_0..h'_{s-1}, τ, then w[ε][j]
    let tau = s;
    let w = |mask: usize, j: usize| s + 1 + mask * m + j;
    let mut lp = LinearProgram::new(s + 1 + patterns * m);
    lp.set_objective(tau, -1.0);
    lp.add_row(vec![(tau, 1.0)], Relation::Le, cap);
    for mask in 0..patterns {
        lp.add_row((0..m).map(|j| (w(mask, j), 1.0)).collect(), Relation::Eq, 1.0);
        for k in 0..s {
            let mut row: Vec<(usize, f64)> = (0..m).map(|j| (w(mask, j), g[j][k])).collect();
            row.push((k, -1.0));
            if mask >> k & 1 == 1 {
                row.push((tau, -1.0));
                lp.add_row(row, Relation::Ge, 0.0);
            } else {
                row.push((tau, 1.0));
                lp.add_row(row, Relation::Le, 0.0);
            }
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal(sol) => {
            let weights: Vec<Vec<f64>> = (0..patterns)
                .map(|mask| normalize_weights((0..m).map(|j| sol.x[w(mask, j)]).collect()))
                .collect();
            let level = sol.x[..s].to_vec();
            let margin = certified_margin(g, &level, &weights);
            Ok(HullMargin {
                margin,
                upper: sol.x[tau],
                level,
                weights,
            })
        }
        _ => Err(Error::Solver("joint hull LP not optimal")),
    }
}

fn normalize_weights(mut w: Vec<f64>) -> Vec<f64> {
    for v in w.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        for v in w.iter_mut() {
            *v /= total;
        }
    }
    w
}

/// `min_ε min_x ε_x (Σ_j w_εj g_j(x) − h(x))`.
fn certified_margin(g: &[Vec<f64>], level: &[f64], weights: &[Vec<f64>]) -> f64 {
    let s = level.len();
    let mut margin = f64::INFINITY;
    for (mask, w) in weights.iter().enumerate() {
        for k in 0..s {
            let p: f64 = w.iter().zip(g).map(|(wj, row)| wj * row[k]).sum();
            let signed = if mask >> k & 1 == 1 { p - level[k] } else { level[k] - p };
            margin = margin.min(signed);
        }
    }
    margin
}

/// Value of the game `max_{w ∈ Δ_m} min_{x} ε_x (Σ_j w_j g_j(x) − h(x))`,
/// with the maximizing `w`, and (optionally) the minimizing mixed strategy
/// `y` over points from the dual program.
fn pattern_game(g: &[Vec<f64>], level: &[f64], mask: usize, want_dual: bool) -> Result<(f64, Vec<f64>, Option<Vec<f64>>)> {
    let m = g.len();
    let s = level.len();
    let payoff = |j: usize, k: usize| {
        let d = g[j][k] - level[k];
        if mask >> k & 1 == 1 {
            d
        } else {
            -d
        }
    };
    // primal: max v  s.t. Σ_j w_j A_jk ≥ v ∀k ; v = v⁺ − v⁻
    let mut lp = LinearProgram::new(m + 2);
    lp.set_objective(m, -1.0);
    lp.set_objective(m + 1, 1.0);
    for k in 0..s {
        let mut row: Vec<(usize, f64)> = (0..m).map(|j| (j, payoff(j, k))).collect();
        row.push((m, -1.0));
        row.push((m + 1, 1.0));
        lp.add_row(row, Relation::Ge, 0.0);
    }
    lp.add_row((0..m).map(|j| (j, 1.0)).collect(), Relation::Eq, 1.0);
    let (value, w) = match lp.solve()? {
        LpOutcome::Optimal(sol) => (sol.x[m] - sol.x[m + 1], normalize_weights(sol.x[..m].to_vec())),
        _ => return Err(Error::Solver("pattern game not optimal")),
    };
    if !want_dual {
        return Ok((value, w, None));
    }
    // dual: min u  s.t. Σ_k y_k A_jk ≤ u ∀j
    let mut dual = LinearProgram::new(s + 2);
    dual.set_objective(s, 1.0);
    dual.set_objective(s + 1, -1.0);
    for j in 0..m {
        let mut row: Vec<(usize, f64)> = (0..s).map(|k| (k, payoff(j, k))).collect();
        row.push((s, -1.0));
        row.push((s + 1, 1.0));
        dual.add_row(row, Relation::Le, 0.0);
    }
    dual.add_row((0..s).map(|k| (k, 1.0)).collect(), Relation::Eq, 1.0);
    let y = match dual.solve()? {
        LpOutcome::Optimal(sol) => normalize_weights(sol.x[..s].to_vec()),
        _ => return Err(Error::Solver("dual pattern game not optimal")),
    };
    Ok((value, w, Some(y)))
}

fn cutting_plane_margin(g: &[Vec<f64>], ranges: &[f64], s: usize, cap: f64) -> Result<HullMargin> {
    let patterns = 1usize << s;
    let tol = 1e-9;
    // master variables: h'_0..h'_{s-1}, τ
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    for _ in 0..CUTTING_PLANE_MAX_ROUNDS {
        let mut master = LinearProgram::new(s + 1);
        master.set_objective(s, -1.0);
        master.add_row(vec![(s, 1.0)], Relation::Le, cap);
        for (k, &r) in ranges.iter().enumerate() {
            master.add_row(vec![(k, 1.0)], Relation::Le, r);
        }
        for (z, c) in &cuts {
            let mut row: Vec<(usize, f64)> = z.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, &v)| (k, v)).collect();
            row.push((s, 1.0));
            master.add_row(row, Relation::Le, *c);
        }
        let (level, upper) = match master.solve()? {
            LpOutcome::Optimal(sol) => (sol.x[..s].to_vec(), sol.x[s]),
            _ => return Err(Error::Solver("cutting-plane master not optimal")),
        };
        let mut weights = Vec::with_capacity(patterns);
        let mut violated = Vec::new();
        for mask in 0..patterns {
            let (value, w, _) = pattern_game(g, &level, mask, false)?;
            if value < upper - tol {
                violated.push(mask);
            }
            weights.push(w);
        }
        if violated.is_empty() {
            let margin = certified_margin(g, &level, &weights);
            return Ok(HullMargin {
                margin,
                upper,
                level,
                weights,
            });
        }
        for mask in violated {
            let (_, _, y) = pattern_game(g, &level, mask, true)?;
            let y = y.expect("dual requested");
            let z: Vec<f64> = (0..s).map(|k| if mask >> k & 1 == 1 { y[k] } else { -y[k] }).collect();
            let c = g
                .iter()
                .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            cuts.push((z, c));
        }
    }
    Err(Error::Solver("cutting-plane iteration limit"))
}

/// Decides whether `sigma` is `t`-shattered by `conv(F)`.
pub fn vc_convex_hull(
    class: &FunctionClass,
    sigma: &CoordinateSubset,
    t: f64,
    config: &ShatterConfig,
) -> Result<Option<ShatterWitness>> {
    check_scale(t)?;
    let s = sigma.len();
    if s > config.hull_max_points {
        return Err(Error::SizeCap {
            what: "convex-hull shattering LP",
            requested: s,
            limit: config.hull_max_points,
            cost: libm::pow(2.0, s as f64) * class.rows() as f64 + s as f64,
        });
    }
    let hull = max_hull_margin(class, sigma, t, config.hull_method)?;
    if hull.margin < t - LP_FEASIBILITY_TOL {
        return Ok(None);
    }
    let witness = ShatterWitness {
        sigma: sigma.clone(),
        level: hull.level,
        assignment: hull.weights.into_iter().map(PatternAssignment::Weights).collect(),
        scale: t,
    };
    if !witness.verify(class, LP_FEASIBILITY_TOL) {
        return Err(Error::Solver("hull witness failed re-verification"));
    }
    Ok(Some(witness))
}

/// The dual unit ball of `ℓ_∞^k` restricted to its vertices `±e_j`,
/// evaluated at `points` (columns of the class are the points).
pub fn dual_ball_class(points: &[RealVector]) -> Result<FunctionClass> {
    let k = points.first().map_or(0, |p| p.len());
    let mut rows = Vec::with_capacity(2 * k);
    for j in 0..k {
        let r: Vec<f64> = points.iter().map(|p| p[j]).collect();
        rows.push(r.iter().map(|v| -v).collect());
        rows.push(r);
    }
    FunctionClass::new(rows)
}

/// Columns of the `n x n` Sylvester–Hadamard matrix (`n` a power of two).
pub fn hadamard_points(n: usize) -> Result<Vec<RealVector>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::bad_input("Hadamard size must be a power of two"));
    }
    Ok((0..n)
        .map(|col| {
            RealVector::new(
                (0..n)
                    .map(|row| if (row & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                    .collect(),
            )
            .expect("finite")
        })
        .collect())
}
