//! Dense two-phase simplex for the small linear programs behind the
//! convex-hull shattering and `ℓ_1`-domination routines.
//!
//! Problems are `min cᵀx` subject to linear rows (`≤`, `≥`, `=`) and
//! `x ≥ 0`. Pricing is Dantzig's rule. Ties in the ratio test are broken
//! lexicographically against the columns of the starting basis, which rules
//! out cycling on the heavily degenerate shattering LPs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-10;
const FEASIBILITY_EPS: f64 = 1e-9;
const TIE_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Sets the (minimized) objective coefficient of variable `j`.
    pub fn set_objective(&mut self, j: usize, c: f64) {
        self.objective[j] = c;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.num_vars));
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    m: usize,
    width: usize, // structural + slack + artificial columns, plus rhs
    n_struct: usize,
    first_artificial: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Starting basis; its columns hold the current basis inverse.
    initial: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.rows.len();
        let n_struct = lp.num_vars;
        let n_slack = lp.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        // after sign normalization a row needs an artificial unless it is `≤`
        let needs_artificial: Vec<bool> = lp
            .rows
            .iter()
            .map(|r| {
                let rel = if r.rhs < 0.0 { flip(r.relation) } else { r.relation };
                rel != Relation::Le
            })
            .collect();
        let n_art = needs_artificial.iter().filter(|&&b| b).count();
        let first_artificial = n_struct + n_slack;
        let width = first_artificial + n_art + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut slack = n_struct;
        let mut art = first_artificial;
        for (i, row) in lp.rows.iter().enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let rel = if row.rhs < 0.0 { flip(row.relation) } else { row.relation };
            let r = &mut data[i * width..(i + 1) * width];
            for &(j, c) in &row.coeffs {
                r[j] += sign * c;
            }
            r[width - 1] = sign * row.rhs;
            match row.relation {
                Relation::Eq => {}
                _ => {
                    r[slack] = match rel {
                        Relation::Le => 1.0,
                        _ => -1.0,
                    };
                    if rel == Relation::Le {
                        basis[i] = slack;
                    }
                    slack += 1;
                }
            }
            if needs_artificial[i] {
                r[art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
        Tableau {
            m,
            width,
            n_struct,
            first_artificial,
            data,
            initial: basis.clone(),
            basis,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, pr: usize, pc: usize, cost: &mut [f64]) {
        let w = self.width;
        let inv = 1.0 / self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for i in 0..self.m {
            if i == pr {
                continue;
            }
            let f = self.data[i * w + pc];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        let f = cost[pc];
        if f != 0.0 {
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Reduced-cost row for costs `c` (length `width - 1`); the last entry
    /// holds minus the current objective value.
    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let w = self.width;
        let mut cost = vec![0.0; w];
        cost[..w - 1].copy_from_slice(c);
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for (v, a) in cost.iter_mut().zip(&self.data[i * w..(i + 1) * w]) {
                    *v -= cb * a;
                }
            }
        }
        cost
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` if
    /// the problem is unbounded.
    fn iterate(&mut self, cost: &mut [f64], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            let mut best = -PIVOT_EPS;
            for (j, &c) in cost[..allowed].iter().enumerate() {
                if c < best {
                    entering = Some(j);
                    best = c;
                }
            }
            let Some(pc) = entering else {
                return Ok(true);
            };
            let Some(pr) = self.leaving_row(pc) else {
                return Ok(false);
            };
            self.pivot(pr, pc, cost);
        }
        Err(Error::Solver("pivot limit reached"))
    }

    /// Lexicographic ratio test for entering column `pc`.
    fn leaving_row(&self, pc: usize) -> Option<usize> {
        let mut ties: Vec<usize> = Vec::new();
        let mut best_ratio = f64::INFINITY;
        for i in 0..self.m {
            let a = self.at(i, pc);
            if a > PIVOT_EPS {
                // roundoff can leave a basic value slightly negative
                let ratio = self.rhs(i).max(0.0) / a;
                let tol = TIE_EPS * best_ratio.max(1.0);
                if ties.is_empty() || ratio < best_ratio - tol {
                    best_ratio = ratio;
                    ties.clear();
                    ties.push(i);
                } else if ratio <= best_ratio + tol {
                    ties.push(i);
                }
            }
        }
        for &col in &self.initial {
            if ties.len() <= 1 {
                break;
            }
            let key = |i: usize| self.at(i, col) / self.at(i, pc);
            let low = ties.iter().map(|&i| key(i)).fold(f64::INFINITY, f64::min);
            ties.retain(|&i| key(i) <= low + TIE_EPS);
        }
        // any survivors are numerically identical rows; take the largest pivot
        ties.into_iter()
            .max_by(|&i, &j| self.at(i, pc).total_cmp(&self.at(j, pc)))
    }

    fn run(mut self, objective: &[f64]) -> Result<LpOutcome> {
        let n_cols = self.width - 1;
        if self.first_artificial < n_cols {
            let mut phase1 = vec![0.0; n_cols];
            for c in &mut phase1[self.first_artificial..] {
                *c = 1.0;
            }
            let mut cost = self.reduced_costs(&phase1);
            self.iterate(&mut cost, n_cols)?;
            let infeasibility: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_artificial)
                .map(|i| self.rhs(i))
                .sum();
            let scale = 1.0 + (0..self.m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max);
            if infeasibility > FEASIBILITY_EPS * scale {
                return Ok(LpOutcome::Infeasible);
            }
            // drive zero-level artificials out of the basis where possible
            for i in 0..self.m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(j) = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > 1e-9) {
                        let mut dummy = vec![0.0; self.width];
                        self.pivot(i, j, &mut dummy);
                    }
                }
            }
        }
        let mut full = vec![0.0; n_cols];
        full[..self.n_struct].copy_from_slice(objective);
        let mut cost = self.reduced_costs(&full);
        if !self.iterate(&mut cost, self.first_artificial)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_struct];
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal(LpSolution { x, objective: value }))
    }
}

fn flip(r: Relation) -> Relation {
    match r {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}
