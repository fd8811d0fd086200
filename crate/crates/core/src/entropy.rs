//! Packing and covering numbers of finite classes in `L_2(μ)`, and the
//! entropy inequality `N(F, t) ≤ (2/t)^{K vc(F, ct)}` as a fitted constant.
//!
//! Covering is internal (centers drawn from `F`, closed balls `d ≤ t`);
//! packing counts subsets with pairwise distances `> t`. With these
//! conventions `P(2t) ≤ N(t) ≤ P(t)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::shatter::{vc_dimension, ShatterConfig};
use crate::space::FunctionClass;

/// Largest class handled by the exact maximum-packing search.
pub const PACKING_EXACT_MAX: usize = 30;
/// Largest class handled by the exact set-cover search.
pub const COVERING_EXACT_MAX: usize = 25;

/// Symmetric table of normalized `L_2` distances between rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    m: usize,
    d: Vec<f64>,
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.m + j]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().fold(0.0, |a: f64, &b| a.max(b))
    }
}

/// `d(f, g) = ((1/n) Σ (f(i) − g(i))²)^{1/2}` for every pair of rows.
pub fn pairwise_l2_distances(class: &FunctionClass) -> DistanceTable {
    let m = class.rows();
    let n = class.cols() as f64;
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let s: f64 = class.row(i).iter().zip(class.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = libm::sqrt(s / n);
            d[i * m + j] = v;
            d[j * m + i] = v;
        }
    }
    DistanceTable { m, d }
}

fn check_radius(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::bad_input("radius t must be positive"))
    }
}

/// Greedy farthest-point traversal from row 0: a maximal `t`-separated set
/// (ties go to the lowest index).
pub fn greedy_packing(table: &DistanceTable, t: f64) -> Vec<usize> {
    let m = table.len();
    if m == 0 {
        return Vec::new();
    }
    let mut chosen = vec![0];
    let mut gap: Vec<f64> = (0..m).map(|j| table.get(0, j)).collect();
    loop {
        let mut pick: Option<usize> = None;
        for j in 0..m {
            if gap[j] > t && pick.is_none_or(|p| gap[j] > gap[p]) {
                pick = Some(j);
            }
        }
        match pick {
            Some(j) => {
                chosen.push(j);
                for k in 0..m {
                    gap[k] = gap[k].min(table.get(j, k));
                }
            }
            None => return chosen,
        }
    }
}

/// Maximum `t`-separated subset by branch and bound (maximum independent
/// set of the graph joining rows at distance `≤ t`).
pub fn exact_packing(table: &DistanceTable, t: f64) -> Result<Vec<usize>> {
    let m = table.len();
    if m > PACKING_EXACT_MAX {
        return Err(Error::SizeCap {
            what: "exact packing search",
            requested: m,
            limit: PACKING_EXACT_MAX,
            cost: libm::pow(2.0, m as f64),
        });
    }
    let close: Vec<u32> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i && table.get(i, j) <= t)
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();
    let mut best = greedy_packing(table, t).iter().fold(0u32, |acc, &j| acc | 1 << j);
    let all = (1u32 << m) - 1;
    independent_set(&close, all, 0, &mut best);
    Ok((0..m).filter(|&j| best >> j & 1 == 1).collect())
}

fn independent_set(close: &[u32], candidates: u32, current: u32, best: &mut u32) {
    if current.count_ones() + candidates.count_ones() <= best.count_ones() {
        return;
    }
    if candidates == 0 {
        *best = current;
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    independent_set(close, rest & !close[v], current | 1 << v, best);
    // excluding v only helps if some neighbour of v is still available
    if rest & close[v] != 0 {
        independent_set(close, rest, current, best);
    }
}

/// Greedy internal cover: repeatedly take the row whose closed `t`-ball
/// holds the most uncovered rows (ties to the lowest index).
pub fn greedy_cover(table: &DistanceTable, t: f64) -> Vec<usize> {
    let m = table.len();
    let mut covered = vec![false; m];
    let mut centers = Vec::new();
    while covered.iter().any(|c| !c) {
        let mut best = (0, 0);
        for i in 0..m {
            let gain = (0..m).filter(|&j| !covered[j] && table.get(i, j) <= t).count();
            if gain > best.1 {
                best = (i, gain);
            }
        }
        centers.push(best.0);
        for j in 0..m {
            if table.get(best.0, j) <= t {
                covered[j] = true;
            }
        }
    }
    centers
}

/// Minimum internal cover by branch and bound over the centers able to
/// cover the lowest uncovered row.
pub fn exact_cover(table: &DistanceTable, t: f64) -> Result<Vec<usize>> {
    let m = table.len();
    if m > COVERING_EXACT_MAX {
        return Err(Error::SizeCap {
            what: "exact covering search",
            requested: m,
            limit: COVERING_EXACT_MAX,
            cost: libm::pow(2.0, m as f64),
        });
    }
    let balls: Vec<u32> = (0..m)
        .map(|i| (0..m).filter(|&j| table.get(i, j) <= t).fold(0u32, |acc, j| acc | 1 << j))
        .collect();
    let largest = balls.iter().map(|b| b.count_ones()).max().unwrap_or(1).max(1);
    let mut best = greedy_cover(table, t);
    let all = (1u32 << m) - 1;
    let mut current = Vec::new();
    set_cover(&balls, all, largest, &mut current, &mut best);
    best.sort_unstable();
    Ok(best)
}

fn set_cover(balls: &[u32], uncovered: u32, largest: u32, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if uncovered == 0 {
        if current.len() < best.len() {
            *best = current.clone();
        }
        return;
    }
    let needed = uncovered.count_ones().div_ceil(largest) as usize;
    if current.len() + needed >= best.len() {
        return;
    }
    let u = uncovered.trailing_zeros() as usize;
    let mut options: Vec<usize> = (0..balls.len()).filter(|&c| balls[c] >> u & 1 == 1).collect();
    options.sort_by_key(|&c| core::cmp::Reverse((balls[c] & uncovered).count_ones()));
    for c in options {
        current.push(c);
        set_cover(balls, uncovered & !balls[c], largest, current, best);
        current.pop();
    }
}

/// Packing and covering counts at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringEstimate {
    pub t: f64,
    /// Size of the greedy maximal `t`-separated set.
    pub packing_greedy: usize,
    pub packing_exact: Option<usize>,
    /// Size of the greedy internal cover.
    pub covering_greedy: Option<usize>,
    pub covering_exact: Option<usize>,
    /// Set when every requested exact routine ran.
    pub exact: bool,
}

impl CoveringEstimate {
    /// Best known lower bound on the packing number.
    pub fn packing_lower(&self) -> usize {
        self.packing_exact.unwrap_or(self.packing_greedy)
    }

    /// Best known upper bound on the internal covering number.
    pub fn covering_upper(&self) -> Option<usize> {
        self.covering_exact.or(self.covering_greedy)
    }
}

/// Packing number at `t`: greedy always, exact when `m ≤ 30`.
pub fn packing_number(class: &FunctionClass, t: f64) -> Result<CoveringEstimate> {
    check_radius(t)?;
    let table = pairwise_l2_distances(class);
    let greedy = greedy_packing(&table, t).len();
    let exact = if class.rows() <= PACKING_EXACT_MAX {
        Some(exact_packing(&table, t)?.len())
    } else {
        None
    };
    Ok(CoveringEstimate {
        t,
        packing_greedy: greedy,
        packing_exact: exact,
        covering_greedy: None,
        covering_exact: None,
        exact: exact.is_some(),
    })
}

/// Size of the greedy internal `t`-cover.
pub fn covering_number_upper(class: &FunctionClass, t: f64) -> Result<usize> {
    check_radius(t)?;
    Ok(greedy_cover(&pairwise_l2_distances(class), t).len())
}

/// Exact internal covering number (`m ≤ 25`).
pub fn covering_number_exact(class: &FunctionClass, t: f64) -> Result<usize> {
    check_radius(t)?;
    Ok(exact_cover(&pairwise_l2_distances(class), t)?.len())
}

/// Packing and covering at `t`, running every exact routine the class
/// size allows.
pub fn covering_estimate(class: &FunctionClass, t: f64) -> Result<CoveringEstimate> {
    let mut est = packing_number(class, t)?;
    let table = pairwise_l2_distances(class);
    est.covering_greedy = Some(greedy_cover(&table, t).len());
    est.covering_exact = if class.rows() <= COVERING_EXACT_MAX {
        Some(exact_cover(&table, t)?.len())
    } else {
        None
    };
    est.exact = est.packing_exact.is_some() && est.covering_exact.is_some();
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantName {
    /// `K`
    K,
    /// `c`
    LowerC,
    /// `C`
    UpperC,
}

impl ConstantName {
    pub fn symbol(&self) -> &'static str {
        match self {
            ConstantName::K => "K",
            ConstantName::LowerC => "c",
            ConstantName::UpperC => "C",
        }
    }
}

/// An absolute constant estimated from data, with how it was estimated.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedConstant {
    pub name: ConstantName,
    pub value: f64,
    pub protocol: String,
    /// Hex SHA-256 of the little-endian bytes of the fitting inputs.
    pub inputs_digest: String,
}

impl FittedConstant {
    pub fn new(name: ConstantName, value: f64, protocol: impl Into<String>, inputs: &[f64]) -> Result<Self> {
        let protocol = protocol.into();
        if !(value >= 0.0) {
            return Err(Error::BadConstant(value));
        }
        if protocol.is_empty() {
            return Err(Error::bad_input("protocol must be described"));
        }
        Ok(FittedConstant {
            name,
            value,
            protocol,
            inputs_digest: digest_f64(inputs),
        })
    }
}

/// Hex SHA-256 of the little-endian encoding of `values`.
pub fn digest_f64(values: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for v in values {
        hasher.update(v.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyFlag {
    /// `vc(F, ct) = 0` but `N(F, t) > 1`.
    VcZeroAnomaly,
    /// The covering count at some `t` is a greedy upper bound.
    GreedyCovering,
}

impl EntropyFlag {
    pub fn code(&self) -> &'static str {
        match self {
            EntropyFlag::VcZeroAnomaly => "VC_ZERO_ANOMALY",
            EntropyFlag::GreedyCovering => "GREEDY_COVERING",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyAuditRow {
    pub t: f64,
    pub covering: usize,
    pub covering_exact: bool,
    pub vc: usize,
    /// `ln N / (vc ln(2/t))`; `None` when `vc = 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyAudit {
    pub constant: FittedConstant,
    pub c_assumed: f64,
    pub rows: Vec<EntropyAuditRow>,
    pub flags: Vec<EntropyFlag>,
}

/// Fits `K = max_t ln N(F, t) / (vc(F, c t) ln(2/t))` over `t_grid`.
pub fn entropy_inequality_audit(
    class: &FunctionClass,
    t_grid: &[f64],
    c_assumed: f64,
    config: &ShatterConfig,
) -> Result<EntropyAudit> {
    if !class.bounded_by_one() && class.max_abs() > 1.0 {
        return Err(Error::bad_input("class must be bounded by 1"));
    }
    if !(c_assumed > 0.0 && c_assumed.is_finite()) {
        return Err(Error::BadConstant(c_assumed));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::bad_input("grid values must lie in (0, 1)"));
    }
    let table = pairwise_l2_distances(class);
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut flags = Vec::new();
    let mut k_fit: f64 = 0.0;
    for &t in t_grid {
        let (covering, covering_exact) = if class.rows() <= COVERING_EXACT_MAX {
            (exact_cover(&table, t)?.len(), true)
        } else {
            if !flags.contains(&EntropyFlag::GreedyCovering) {
                flags.push(EntropyFlag::GreedyCovering);
            }
            (greedy_cover(&table, t).len(), false)
        };
        let vc = vc_dimension(class, c_assumed * t, config)?.dimension;
        let ratio = if vc == 0 {
            if covering > 1 && !flags.contains(&EntropyFlag::VcZeroAnomaly) {
                flags.push(EntropyFlag::VcZeroAnomaly);
            }
            None
        } else {
            let r = libm::log(covering as f64) / (vc as f64 * libm::log(2.0 / t));
            k_fit = k_fit.max(r);
            Some(r)
        };
        rows.push(EntropyAuditRow {
            t,
            covering,
            covering_exact,
            vc,
            ratio,
        });
    }
    let mut inputs: Vec<f64> = class.iter_rows().flatten().copied().collect();
    inputs.extend_from_slice(t_grid);
    inputs.push(c_assumed);
    let protocol = format!(
        "K = max over t in grid of ln N(F,t) / (vc(F, c t) ln(2/t)); internal covering (exact when m <= {COVERING_EXACT_MAX}), c = {c_assumed}, {} grid points, {}x{} class",
        t_grid.len(),
        class.rows(),
        class.cols()
    );
    Ok(EntropyAudit {
        constant: FittedConstant::new(ConstantName::K, k_fit, protocol, &inputs)?,
        c_assumed,
        rows,
        flags,
    })
}
