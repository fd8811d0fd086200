//! Finite uniform probability spaces: vectors, function classes, coordinate
//! subsets and the normalized norms used throughout the crate.
//!
//! The domain is always `{0, .., n-1}` with the uniform measure, so a
//! function is just a length-`n` sequence of reals and a class of `m`
//! functions is an `m x n` table. Indices are zero-based.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A finite real vector, identified with a function on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::bad_input(alloc::format!("entry {i} is not finite")));
        }
        Ok(RealVector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        RealVector(alloc::vec![0.0; n])
    }

    /// The `i`-th standard basis vector of length `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = alloc::vec![0.0; n];
        v[i] = 1.0;
        RealVector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> RealVector {
        RealVector(self.0.iter().map(|v| c * v).collect())
    }
}

impl Deref for RealVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An ordered set of coordinates `σ ⊆ {0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateSubset {
    indices: Vec<usize>,
    ambient_n: usize,
}

impl CoordinateSubset {
    /// Builds a subset from arbitrary-order indices. Duplicates and
    /// out-of-range indices are rejected.
    pub fn new(mut indices: Vec<usize>, ambient_n: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::bad_input(alloc::format!("duplicate index {}", w[0])));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= ambient_n {
                return Err(Error::Dimension {
                    expected: ambient_n,
                    found: last + 1,
                });
            }
        }
        Ok(CoordinateSubset { indices, ambient_n })
    }

    pub fn full(n: usize) -> Self {
        CoordinateSubset {
            indices: (0..n).collect(),
            ambient_n: n,
        }
    }

    /// `{i : mask[i]}`.
    pub fn from_mask(mask: &[bool]) -> Self {
        CoordinateSubset {
            indices: mask
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
            ambient_n: mask.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Composes two projections: `inner` indexes positions of `self`, and
    /// the result indexes the ambient space of `self`.
    pub fn compose(&self, inner: &CoordinateSubset) -> Result<CoordinateSubset> {
        if inner.ambient_n != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: inner.ambient_n,
            });
        }
        Ok(CoordinateSubset {
            indices: inner.indices.iter().map(|&j| self.indices[j]).collect(),
            ambient_n: self.ambient_n,
        })
    }
}

/// `m` real functions on `{0, .., n-1}` stored row-major. Duplicated rows
/// are kept: the class is a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionClass {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    bounded_by_one: bool,
}

impl FunctionClass {
    /// Builds a class from rows of equal length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::bad_input("function class has no rows"));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::bad_input("function class has no columns"));
        }
        let mut values = Vec::with_capacity(m * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::bad_input(alloc::format!("row {i} has a non-finite entry")));
            }
            values.extend(row);
        }
        Ok(FunctionClass {
            values,
            rows: m,
            cols: n,
            bounded_by_one: false,
        })
    }

    /// Builds a class and asserts `max |value| ≤ 1`.
    pub fn bounded(rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut class = Self::new(rows)?;
        class.mark_bounded()?;
        Ok(class)
    }

    /// Sets the bounded-by-one flag after checking it.
    pub fn mark_bounded(&mut self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| v.abs() > 1.0) {
            return Err(Error::bad_input(alloc::format!(
                "value {v} violates the bound |f| <= 1"
            )));
        }
        self.bounded_by_one = true;
        Ok(())
    }

    pub fn from_vectors(rows: &[RealVector]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.as_slice().to_vec()).collect())
    }

    /// Every sign vector in `{-1, 1}^n`, in binary order (bit `i` set
    /// means `+1` at coordinate `i`).
    pub fn sign_cube(n: usize) -> Self {
        let rows = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let mut class = Self::new(rows).expect("sign cube is well formed");
        class.bounded_by_one = true;
        class
    }

    /// The standard basis `{e_0, .., e_{n-1}}` as rows.
    pub fn unit_vectors(n: usize) -> Self {
        let rows = (0..n).map(|i| RealVector::basis(n, i).into_inner()).collect();
        let mut class = Self::new(rows).expect("basis is well formed");
        class.bounded_by_one = true;
        class
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bounded_by_one(&self) -> bool {
        self.bounded_by_one
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> FunctionClass {
        FunctionClass {
            values: self.values.iter().map(|v| s * v).collect(),
            rows: self.rows,
            cols: self.cols,
            bounded_by_one: self.bounded_by_one && s.abs() <= 1.0,
        }
    }

    /// Appends rows; the bound flag survives only if the new rows respect it.
    pub fn extended(&self, extra: Vec<Vec<f64>>) -> Result<FunctionClass> {
        let mut rows: Vec<Vec<f64>> = self.iter_rows().map(|r| r.to_vec()).collect();
        rows.extend(extra);
        let mut class = FunctionClass::new(rows)?;
        if self.bounded_by_one && class.max_abs() <= 1.0 {
            class.bounded_by_one = true;
        }
        Ok(class)
    }

    /// Rows as owned vectors.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(|r| r.to_vec()).collect()
    }
}

/// A norm on `R^k` (not normalized by the dimension).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Sup,
    Lp(f64),
}

impl Norm {
    pub fn eval(&self, v: &[f64]) -> f64 {
        match *self {
            Norm::Sup => v.iter().fold(0.0, |acc, x| acc.max(x.abs())),
            Norm::Lp(p) if p == 2.0 => libm::sqrt(v.iter().map(|x| x * x).sum()),
            Norm::Lp(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
            Norm::Lp(p) => {
                let scale = v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = v.iter().map(|x| libm::pow(x.abs() / scale, p)).sum();
                scale * libm::pow(s, 1.0 / p)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Norm::Lp(p) if !(p >= 1.0) => Err(Error::BadExponent(p)),
            _ => Ok(()),
        }
    }
}

/// `P_σ f`: the coordinates of `f` listed in `sigma`, in index order.
pub fn project(f: &[f64], sigma: &CoordinateSubset) -> Result<RealVector> {
    check_subset(f.len(), sigma)?;
    Ok(RealVector(sigma.indices().iter().map(|&i| f[i]).collect()))
}

/// `((1/n) Σ |f(i)|^p)^{1/p}` under the uniform probability on the coordinates.
pub fn normalized_lp(f: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    if f.is_empty() {
        return Err(Error::bad_input("empty vector"));
    }
    let n = f.len() as f64;
    let scale = f.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mean = if p == 2.0 {
        f.iter().map(|x| (x / scale) * (x / scale)).sum::<f64>() / n
    } else {
        f.iter().map(|x| libm::pow(x.abs() / scale, p)).sum::<f64>() / n
    };
    Ok(scale * libm::pow(mean, 1.0 / p))
}

/// `P_σ F`, the class of restrictions. Duplicate rows are retained.
pub fn project_class(class: &FunctionClass, sigma: &CoordinateSubset) -> Result<FunctionClass> {
    check_subset(class.cols(), sigma)?;
    let k = sigma.len();
    let mut values = Vec::with_capacity(class.rows() * k);
    for row in class.iter_rows() {
        values.extend(sigma.indices().iter().map(|&i| row[i]));
    }
    Ok(FunctionClass {
        values,
        rows: class.rows(),
        cols: k,
        bounded_by_one: class.bounded_by_one(),
    })
}

fn check_subset(n: usize, sigma: &CoordinateSubset) -> Result<()> {
    if sigma.ambient_n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: sigma.ambient_n(),
        });
    }
    if sigma.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(())
}
