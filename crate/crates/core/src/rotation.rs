//! Haar-random rotations and the coordinate Johnson–Lindenstrauss embedding.
//!
//! The embedding rotates a family of unit vectors by a Haar orthogonal
//! operator, which flattens every vector to `ψ_2` norm `O(√(log n / n))`
//! in Euclidean scale, then keeps a random set of coordinates of size
//! about `(C M / ε)² ln n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::orlicz::psi_norm;
use crate::rng::RngStream;
use crate::space::{normalized_lp, CoordinateSubset, RealVector};

/// Default `C_fit`, from [`pilot_fit_c`] at `n = 128`, `ε = 0.25`, seeds
/// `0..200`.
pub const DEFAULT_C_FIT: f64 = 0.5;

const PSI_TOL: f64 = 1e-10;

/// An `n x n` orthogonal matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalOperator {
    n: usize,
    entries: Vec<f64>,
}

impl OrthogonalOperator {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        OrthogonalOperator { n, entries }
    }

    /// Accepts a row-major table whose orthogonality error is at most `tol`.
    pub fn from_rows(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::bad_input("operator must be square and nonempty"));
        }
        let op = OrthogonalOperator {
            n,
            entries: rows.concat(),
        };
        if op.entries.iter().any(|v| !v.is_finite()) || !(op.orthogonality_error() <= tol) {
            return Err(Error::bad_input("operator is not orthogonal"));
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        OrthogonalOperator { n, entries }
    }

    /// `max_{j,k} |(OᵀO − I)_{jk}|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = (0..n).map(|i| self.entries[i * n + j] * self.entries[i * n + k]).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Haar-distributed orthogonal matrix: Householder QR of an `n x n`
/// standard Gaussian matrix, with each column of `Q` multiplied by the sign
/// of the matching diagonal entry of `R`.
pub fn haar_orthogonal(n: usize, rng: &mut RngStream) -> Result<OrthogonalOperator> {
    if n == 0 {
        return Err(Error::bad_input("dimension must be positive"));
    }
    loop {
        // column-major working copy
        let mut a: Vec<f64> = (0..n * n).map(|_| rng.standard_normal()).collect();
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut diag_sign = vec![1.0; n];
        let mut singular = false;
        for j in 0..n {
            let col = &a[j * n + j..(j + 1) * n];
            let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
            if norm < 1e-300 {
                singular = true;
                break;
            }
            let alpha = if col[0] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = col.to_vec();
            v[0] -= alpha;
            let vnorm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if vnorm > 0.0 {
                for x in v.iter_mut() {
                    *x /= vnorm;
                }
            }
            // R_jj = alpha
            diag_sign[j] = if alpha >= 0.0 { 1.0 } else { -1.0 };
            for c in j..n {
                let base = c * n + j;
                let dot: f64 = v.iter().zip(&a[base..c * n + n]).map(|(p, q)| p * q).sum();
                for (k, vk) in v.iter().enumerate() {
                    a[base + k] -= 2.0 * dot * vk;
                }
            }
            reflectors.push(v);
        }
        if singular {
            continue;
        }
        // Q = H_0 H_1 ... H_{n-1}; build row-major by applying to I from the right end
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        for j in (0..n).rev() {
            let v = &reflectors[j];
            // rows j..n of Q are affected: Q[j.., :] -= 2 v (vᵀ Q[j.., :])
            for c in 0..n {
                let dot: f64 = v.iter().enumerate().map(|(k, vk)| vk * q[(j + k) * n + c]).sum();
                if dot != 0.0 {
                    for (k, vk) in v.iter().enumerate() {
                        q[(j + k) * n + c] -= 2.0 * dot * vk;
                    }
                }
            }
        }
        for (c, s) in diag_sign.iter().enumerate() {
            if *s < 0.0 {
                for i in 0..n {
                    q[i * n + c] = -q[i * n + c];
                }
            }
        }
        return Ok(OrthogonalOperator { n, entries: q });
    }
}

fn euclidean_norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum::<f64>())
}

/// `√n · ‖Ox‖_{ψ_2}` for a Euclidean unit vector `x`.
pub fn scaled_psi2(x: &[f64], op: &OrthogonalOperator) -> Result<f64> {
    if (euclidean_norm(x) - 1.0).abs() > 1e-9 {
        return Err(Error::bad_input("x must have unit Euclidean norm"));
    }
    let y = op.apply(x)?;
    Ok(libm::sqrt(x.len() as f64) * psi_norm(&y, 2.0, PSI_TOL)?.value)
}

/// `√n · ‖Ox‖_{ψ_2}` over independent Haar draws `O`.
pub fn rotated_psi2_tail(x: &RealVector, rotations: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if (euclidean_norm(x) - 1.0).abs() > 1e-9 {
        return Err(Error::bad_input("x must have unit Euclidean norm"));
    }
    let mut out = Vec::with_capacity(rotations);
    for r in 0..rotations {
        let mut sub = rng.substream(r as u64);
        let op = haar_orthogonal(x.len(), &mut sub)?;
        out.push(scaled_psi2(x, &op)?);
    }
    Ok(out)
}

/// `√(2n / ln n)`: the bound on `√n ψ_2(x)` valid for every unit `x`.
pub fn sphere_psi2_ceiling(n: usize) -> f64 {
    libm::sqrt(2.0 * n as f64 / libm::log(n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JlFlag {
    /// The requested cardinality reached `n`; every coordinate was kept.
    NoCompression,
    /// More vectors than coordinates.
    TooManyVectors,
    /// The selector draw came out empty; all ratios are reported as 0.
    EmptySelection,
}

impl JlFlag {
    pub fn code(&self) -> &'static str {
        match self {
            JlFlag::NoCompression => "NO_COMPRESSION",
            JlFlag::TooManyVectors => "TOO_MANY_VECTORS",
            JlFlag::EmptySelection => "EMPTY_SELECTION",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    /// `‖P_σ O f_i‖_{L_2^σ} / ‖f_i‖_{L_2^n}` per input vector.
    pub per_vector_ratio: Vec<f64>,
    pub max_deviation: f64,
    pub sigma: CoordinateSubset,
    /// `max_i ‖O f_i‖_{ψ_2}`.
    pub psi2_max: f64,
    /// `⌈(C M / ε)² ln n⌉` before capping at `n`.
    pub target_cardinality: f64,
    pub delta: f64,
    pub flags: Vec<JlFlag>,
}

/// Distortion of `{P_σ O f_i}`; a pure function of its inputs.
pub fn distortion_report(
    vectors: &[RealVector],
    op: &OrthogonalOperator,
    sigma: &CoordinateSubset,
    psi2_max: f64,
) -> Result<DistortionReport> {
    let mut flags = Vec::new();
    let mut ratios = Vec::with_capacity(vectors.len());
    for f in vectors {
        let norm = normalized_lp(f, 2.0)?;
        if norm == 0.0 {
            return Err(Error::bad_input("zero vector"));
        }
        if sigma.is_empty() {
            ratios.push(0.0);
            continue;
        }
        let y = op.apply(f)?;
        let kept: Vec<f64> = sigma.indices().iter().map(|&i| y[i]).collect();
        ratios.push(normalized_lp(&kept, 2.0)? / norm);
    }
    if sigma.is_empty() {
        flags.push(JlFlag::EmptySelection);
    }
    let max_deviation = ratios.iter().fold(0.0, |m: f64, r| m.max((r - 1.0).abs()));
    Ok(DistortionReport {
        per_vector_ratio: ratios,
        max_deviation,
        sigma: sigma.clone(),
        psi2_max,
        target_cardinality: f64::NAN,
        delta: f64::NAN,
        flags,
    })
}

/// Test hooks for [`coordinate_jl_with`].
#[derive(Debug, Clone, Default)]
pub struct JlOverrides {
    pub rotation: Option<OrthogonalOperator>,
    pub delta: Option<f64>,
}

/// Rotate, measure `M = max ψ_2`, sample `δn = ⌈(C_fit M / ε)² ln n⌉`
/// coordinates, and report distortions.
pub fn coordinate_jl(
    vectors: &[RealVector],
    eps: f64,
    c_fit: f64,
    rng: &mut RngStream,
) -> Result<DistortionReport> {
    coordinate_jl_with(vectors, eps, c_fit, rng, &JlOverrides::default()).map(|(r, _)| r)
}

/// [`coordinate_jl`] with optional fixed rotation or selector mean; also
/// returns the operator used.
///
/// Randomness is consumed in a fixed order (rotation, then one uniform per
/// coordinate), so runs that differ only in `c_fit` share `O` and the
/// selector uniforms.
pub fn coordinate_jl_with(
    vectors: &[RealVector],
    eps: f64,
    c_fit: f64,
    rng: &mut RngStream,
    overrides: &JlOverrides,
) -> Result<(DistortionReport, OrthogonalOperator)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadEpsilon(eps));
    }
    if !(c_fit > 0.0 && c_fit.is_finite()) {
        return Err(Error::BadConstant(c_fit));
    }
    let n = vectors.first().map(|v| v.len()).ok_or_else(|| Error::bad_input("no vectors"))?;
    for v in vectors {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: v.len(),
            });
        }
        if (normalized_lp(v, 2.0)? - 1.0).abs() > 1e-9 {
            return Err(Error::bad_input("vectors must have unit normalized L2 norm"));
        }
    }
    let op = match &overrides.rotation {
        Some(o) if o.dim() != n => {
            return Err(Error::Dimension {
                expected: n,
                found: o.dim(),
            })
        }
        Some(o) => o.clone(),
        None => haar_orthogonal(n, rng)?,
    };
    let mut psi2_max: f64 = 0.0;
    for v in vectors {
        psi2_max = psi2_max.max(psi_norm(&op.apply(v)?, 2.0, PSI_TOL)?.value);
    }
    let target = libm::ceil(libm::pow(c_fit * psi2_max / eps, 2.0) * libm::log(n as f64));
    let mut flags = Vec::new();
    let delta = match overrides.delta {
        Some(d) if !(d > 0.0 && d <= 1.0) => return Err(Error::BadDelta(d)),
        Some(d) => d,
        None => (target / n as f64).min(1.0),
    };
    if delta >= 1.0 {
        flags.push(JlFlag::NoCompression);
    }
    if vectors.len() > n {
        flags.push(JlFlag::TooManyVectors);
    }
    let mask: Vec<bool> = (0..n).map(|_| rng.uniform() < delta).collect();
    let sigma = CoordinateSubset::from_mask(&mask);
    let mut report = distortion_report(vectors, &op, &sigma, psi2_max)?;
    report.target_cardinality = target;
    report.delta = delta;
    flags.append(&mut report.flags);
    report.flags = flags;
    Ok((report, op))
}

/// `√n e_i` for `i < n`: the orthonormal basis of `L_2^n`.
pub fn normalized_basis(n: usize) -> Vec<RealVector> {
    let s = libm::sqrt(n as f64);
    (0..n).map(|i| RealVector::basis(n, i).scaled(s)).collect()
}

/// Success frequency of [`coordinate_jl`] (max distortion `≤ ε`) on the
/// normalized basis of `L_2^n`, one run per seed.
pub fn jl_success_frequency(n: usize, eps: f64, c_fit: f64, seeds: core::ops::Range<u64>) -> Result<f64> {
    let basis = normalized_basis(n);
    let total = seeds.end.saturating_sub(seeds.start);
    if total == 0 {
        return Err(Error::bad_input("empty seed range"));
    }
    let mut ok = 0u64;
    for seed in seeds {
        let mut rng = RngStream::new(seed, 0);
        if coordinate_jl(&basis, eps, c_fit, &mut rng)?.max_deviation <= eps {
            ok += 1;
        }
    }
    Ok(ok as f64 / total as f64)
}

/// Pilot protocol for `C_fit`: the smallest `C` on the grid
/// `0.1, 0.2, .., 3.0` whose success frequency over `seeds` is at least 1/2
/// on the normalized basis of `L_2^n`. `None` if no grid value qualifies.
pub fn pilot_fit_c(n: usize, eps: f64, seeds: core::ops::Range<u64>) -> Result<Option<f64>> {
    for step in 1..=30 {
        let c = step as f64 / 10.0;
        if jl_success_frequency(n, eps, c, seeds.clone())? >= 0.5 {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: Vec<f64>) -> RealVector {
        let norm = euclidean_norm(&v);
        RealVector::new(v.into_iter().map(|x| x / norm).collect()).unwrap()
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = RngStream::new(3, 0);
        for n in [1, 2, 7, 40] {
            let o = haar_orthogonal(n, &mut rng).unwrap();
            assert!(o.orthogonality_error() < 1e-10, "n={n}");
            assert!(o.transpose().orthogonality_error() < 1e-10);
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
                let y = o.apply(&x).unwrap();
                assert!((euclidean_norm(&y) / euclidean_norm(&x) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn first_coordinate_moments() {
        let mut rng = RngStream::new(4, 0);
        let n = 5;
        let trials = 10_000;
        let xs: Vec<f64> = (0..trials).map(|_| haar_orthogonal(n, &mut rng).unwrap().entry(0, 0)).collect();
        let mean = xs.iter().sum::<f64>() / trials as f64;
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let msq = sq.iter().sum::<f64>() / trials as f64;
        // Var(x_1) = 1/n, Var(x_1²) = 2(n−1)/(n²(n+2))
        let se_mean = libm::sqrt(1.0 / n as f64 / trials as f64);
        let se_sq = libm::sqrt(2.0 * (n as f64 - 1.0) / (n as f64 * n as f64 * (n as f64 + 2.0)) / trials as f64);
        assert!(mean.abs() < 3.0 * se_mean);
        assert!((msq - 1.0 / n as f64).abs() < 3.0 * se_sq);
    }

    #[test]
    fn identity_hook_gives_spike_closed_form() {
        for n in [4usize, 64] {
            let v = scaled_psi2(&RealVector::basis(n, 0), &OrthogonalOperator::identity(n)).unwrap();
            let expect = libm::sqrt(n as f64 / libm::log(n as f64 * (core::f64::consts::E - 1.0) + 1.0));
            assert!((v - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn rotated_samples_below_ceiling() {
        let mut rng = RngStream::new(8, 0);
        let x = unit((0..32).map(|i| (i as f64).sin()).collect());
        for v in rotated_psi2_tail(&x, 30, &mut rng).unwrap() {
            assert!(v <= sphere_psi2_ceiling(32));
        }
        let bad = RealVector::new(vec![1.0, 1.0]).unwrap();
        assert!(rotated_psi2_tail(&bad, 1, &mut rng).is_err());
    }

    #[test]
    fn full_selection_has_no_distortion() {
        let mut rng = RngStream::new(1, 0);
        let v = normalized_basis(16).remove(3);
        let hooks = JlOverrides {
            rotation: None,
            delta: Some(1.0),
        };
        let (r, _) = coordinate_jl_with(&[v], 0.2, 0.5, &mut rng, &hooks).unwrap();
        assert!(r.max_deviation < 1e-12);
        assert!(r.flags.contains(&JlFlag::NoCompression));
    }

    #[test]
    fn constant_vector_under_identity() {
        let mut rng = RngStream::new(2, 0);
        let n = 20;
        let hooks = JlOverrides {
            rotation: Some(OrthogonalOperator::identity(n)),
            delta: Some(0.3),
        };
        let v = RealVector::new(vec![1.0; n]).unwrap();
        let (r, _) = coordinate_jl_with(&[v], 0.1, 0.5, &mut rng, &hooks).unwrap();
        if !r.sigma.is_empty() {
            assert_eq!(r.per_vector_ratio, vec![1.0]);
        }
    }

    #[test]
    fn report_is_reproducible_from_parts() {
        let mut rng = RngStream::new(6, 0);
        let basis = normalized_basis(24);
        let (r, op) = coordinate_jl_with(&basis, 0.3, 0.5, &mut rng, &JlOverrides::default()).unwrap();
        let again = distortion_report(&basis, &op, &r.sigma, r.psi2_max).unwrap();
        assert_eq!(again.per_vector_ratio, r.per_vector_ratio);
        assert_eq!(again.max_deviation, r.max_deviation);
    }

    #[test]
    fn bad_arguments() {
        let mut rng = RngStream::new(0, 0);
        let basis = normalized_basis(4);
        assert_eq!(coordinate_jl(&basis, 1.0, 0.5, &mut rng), Err(Error::BadEpsilon(1.0)));
        let not_unit = [RealVector::new(vec![1.0, 0.0]).unwrap()];
        assert!(coordinate_jl(&not_unit, 0.5, 0.5, &mut rng).is_err());
    }
}
