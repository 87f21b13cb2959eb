//! Dense simplex for `maximize c.x subject to A x <= b, x >= 0` with
//! `b >= 0`, so the all-slack basis is feasible from the start.
//!
//! The tableau is kept in condensed (Tucker) form: one column per nonbasic
//! variable, one row per basic variable. Entering variables are chosen by
//! largest reduced cost; after a run of degenerate pivots the solver falls
//! back to Bland's rule until the objective moves again, which rules out
//! cycling. In exact arithmetic ratio-test ties go to the basic variable
//! with the smallest index; in floating point the ratio test is Harris's
//! two-pass variant, which prefers large pivots among near-ties.

mod scalar;

use rayon::prelude::*;
use thiserror::Error;

pub use scalar::Scalar;

/// Rows with fewer cells than this are updated serially.
const PAR_MIN_CELLS: usize = 1 << 15;
/// Smallest pivot element accepted in floating point.
const PIVOT_TOL: f64 = 1e-9;
/// Primal feasibility slack allowed by the Harris ratio test.
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, expected: usize, got: usize },
    #[error("{rows} constraints but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("right-hand side of constraint {row} is negative")]
    NegativeRhs { row: usize },
    #[error("simplex did not terminate within {limit} pivots")]
    IterationLimit { limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Vec<S>>,
    pub rhs: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<S> {
    pub objective: S,
    pub primal: Vec<S>,
    /// One multiplier per constraint, read off the slack reduced costs.
    pub dual: Vec<S>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal(LpSolution<S>),
    Unbounded,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_pivots: Option<usize>,
    /// Consecutive degenerate pivots tolerated before switching to Bland.
    pub bland_after: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_pivots: None,
            bland_after: 32,
        }
    }
}

pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpOutcome<S>, LpError> {
    solve_with(lp, SimplexOptions::default())
}

struct Tableau<S> {
    rows: usize,
    cols: usize,
    /// `rows` rows of `cols + 1` cells, the last being the rhs.
    cells: Vec<S>,
    /// Reduced costs of the nonbasic columns.
    cost: Vec<S>,
    value: S,
    /// Variable index held by each row / column. Structural variables are
    /// `0..cols`, slacks `cols..cols + rows`.
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    #[inline]
    fn stride(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> &S {
        &self.cells[r * self.stride() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> &S {
        self.at(r, self.cols)
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let candidates = (0..self.cols).filter(|&j| self.cost[j].is_pos());
        if bland {
            candidates.min_by_key(|&j| self.nonbasic[j])
        } else {
            let mut best: Option<usize> = None;
            for j in candidates {
                match best {
                    Some(b) if self.cost[j] <= self.cost[b] => {}
                    _ => best = Some(j),
                }
            }
            best
        }
    }

    fn leaving(&self, s: usize) -> Option<usize> {
        if S::tolerance().is_zero() {
            self.leaving_exact(s)
        } else {
            self.leaving_harris(s)
        }
    }

    /// Textbook minimum ratio, ties to the smallest basic variable.
    fn leaving_exact(&self, s: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for r in 0..self.rows {
            let a = self.at(r, s);
            if !a.is_pos() {
                continue;
            }
            let ratio = self.rhs(r).clone() / a.clone();
            best = match best {
                Some((br, bratio)) if bratio < ratio || (bratio == ratio && self.basic[br] < self.basic[r]) => {
                    Some((br, bratio))
                }
                _ => Some((r, ratio)),
            };
        }
        best.map(|(r, _)| r)
    }

    /// Two-pass Harris test: bound the step using slightly relaxed
    /// right-hand sides, then take the largest pivot within that bound.
    fn leaving_harris(&self, s: usize) -> Option<usize> {
        let piv_tol = S::from_f64(PIVOT_TOL);
        let feas = S::from_f64(FEAS_TOL);
        let mut theta: Option<S> = None;
        for r in 0..self.rows {
            let a = self.at(r, s);
            if *a > piv_tol {
                let q = (self.rhs(r).clone() + feas.clone()) / a.clone();
                if theta.as_ref().is_none_or(|t| q < *t) {
                    theta = Some(q);
                }
            }
        }
        let theta = theta?;
        let mut best: Option<usize> = None;
        for r in 0..self.rows {
            let a = self.at(r, s);
            if *a > piv_tol && self.rhs(r).clone() / a.clone() <= theta {
                best = match best {
                    Some(b) if *self.at(b, s) > *a || (*self.at(b, s) == *a && self.basic[b] < self.basic[r]) => Some(b),
                    _ => Some(r),
                };
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let stride = self.stride();
        let p = self.at(r, s).clone();
        let inv = S::one() / p;

        let mut prow: Vec<S> = self.cells[r * stride..(r + 1) * stride].to_vec();
        for (j, v) in prow.iter_mut().enumerate() {
            *v = if j == s { inv.clone() } else { (v.clone() * inv.clone()).flush() };
        }

        let update = |(i, row): (usize, &mut [S])| {
            if i == r {
                row.clone_from_slice(&prow);
                return;
            }
            let f = row[s].clone();
            if f.is_zero() {
                return;
            }
            for (j, cell) in row.iter_mut().enumerate() {
                if j == s {
                    *cell = (-(f.clone() * inv.clone())).flush();
                } else if !prow[j].is_zero() {
                    *cell = (cell.clone() - f.clone() * prow[j].clone()).flush();
                }
            }
        };
        if self.cells.len() >= PAR_MIN_CELLS {
            self.cells.par_chunks_mut(stride).enumerate().for_each(update);
        } else {
            self.cells.chunks_mut(stride).enumerate().for_each(update);
        }

        let d = self.cost[s].clone();
        if !d.is_zero() {
            for (j, (c, p)) in self.cost.iter_mut().zip(&prow).enumerate().take(self.cols) {
                *c = if j == s {
                    (-(d.clone() * inv.clone())).flush()
                } else {
                    (c.clone() - d.clone() * p.clone()).flush()
                };
            }
            self.value = self.value.clone() + d * prow[self.cols].clone();
        }
        if !S::tolerance().is_zero() {
            let cols = self.cols;
            for row in self.cells.chunks_mut(stride) {
                if row[cols].is_negative() {
                    row[cols] = S::zero();
                }
            }
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
    }
}

pub fn solve_with<S: Scalar>(lp: &LinearProgram<S>, opts: SimplexOptions) -> Result<LpOutcome<S>, LpError> {
    let cols = lp.objective.len();
    let rows = lp.constraints.len();
    if lp.rhs.len() != rows {
        return Err(LpError::RhsLength { rows, rhs: lp.rhs.len() });
    }
    let mut cells = Vec::with_capacity(rows * (cols + 1));
    for (i, (a, b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        if a.len() != cols {
            return Err(LpError::Shape {
                row: i,
                expected: cols,
                got: a.len(),
            });
        }
        if b.is_negative() {
            return Err(LpError::NegativeRhs { row: i });
        }
        cells.extend(a.iter().cloned());
        cells.push(b.clone());
    }
    let mut t = Tableau {
        rows,
        cols,
        cells,
        cost: lp.objective.clone(),
        value: S::zero(),
        basic: (cols..cols + rows).collect(),
        nonbasic: (0..cols).collect(),
    };

    let limit = opts.max_pivots.unwrap_or(50 * (rows + cols) + 1000);
    let mut pivots = 0usize;
    let mut degenerate_run = 0usize;
    loop {
        let bland = degenerate_run >= opts.bland_after;
        let Some(s) = t.entering(bland) else { break };
        let Some(r) = t.leaving(s) else {
            return Ok(LpOutcome::Unbounded);
        };
        if pivots == limit {
            return Err(LpError::IterationLimit { limit });
        }
        if t.rhs(r).near_zero() {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        t.pivot(r, s);
        pivots += 1;
    }

    let mut primal = vec![S::zero(); cols];
    for (r, &var) in t.basic.iter().enumerate() {
        if var < cols {
            primal[var] = t.rhs(r).clone();
        }
    }
    let mut dual = vec![S::zero(); rows];
    for (j, &var) in t.nonbasic.iter().enumerate() {
        if var >= cols {
            dual[var - cols] = -t.cost[j].clone();
        }
    }
    Ok(LpOutcome::Optimal(LpSolution {
        objective: t.value,
        primal,
        dual,
        pivots,
    }))
}
