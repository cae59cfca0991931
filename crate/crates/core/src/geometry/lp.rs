//! Dense two-phase simplex for small equality-form programs
//! `min c·x  s.t.  A x = b, x >= 0`.
//!
//! Pivoting is Dantzig's rule with lowest-index tie breaks; after a run of
//! degenerate pivots it switches to Bland's rule, which cannot cycle. Both
//! rules are deterministic, so identical inputs give bit-identical outputs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const DEGENERATE_RUN: usize = 32;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial, excluding rhs
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.data[pr * w + pc];
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.data[r * w + c] -= f * self.data[pr * w + c];
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs the simplex on costs `cost` (length `cols`) with columns in
    /// `allowed` eligible to enter. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        let mut degenerate = 0usize;
        let max_iter = 50 * (self.rows + self.cols) + 1000;
        for _ in 0..max_iter {
            let reduced = self.reduced_costs(cost);
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -PIVOT_EPS;
            for c in 0..self.cols {
                if !allowed[c] || reduced[c] >= -PIVOT_EPS {
                    continue;
                }
                if bland {
                    enter = Some(c);
                    break;
                }
                if reduced[c] < best {
                    best = reduced[c];
                    enter = Some(c);
                }
            }
            let Some(pc) = enter else { return Ok(true) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-14
                                || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((pr, ratio)) = leave else { return Ok(false) };
            if ratio.abs() <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc);
        }
        Err(Error::Lp("iteration limit reached".into()))
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut red = cost.to_vec();
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (c, v) in red.iter_mut().enumerate() {
                    *v -= cb * self.at(r, c);
                }
            }
        }
        red
    }
}

pub fn solve(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Result<LpStatus> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return Err(Error::Lp("inconsistent program dimensions".into()));
    }
    let cols = n + m;
    let w = cols + 1;
    let mut data = vec![0.0; m * w];
    for r in 0..m {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[r * w + j] = sign * a[(r, j)];
        }
        data[r * w + n + r] = 1.0;
        data[r * w + cols] = sign * b[r];
    }
    let mut t = Tableau { rows: m, cols, data, basis: (n..n + m).collect() };

    let mut phase1 = vec![0.0; cols];
    phase1[n..].iter_mut().for_each(|x| *x = 1.0);
    let all = vec![true; cols];
    t.optimize(&phase1, &all)?;
    let infeas: f64 = (0..m).filter(|&r| t.basis[r] >= n).map(|r| t.rhs(r)).sum();
    let scale = 1.0 + b.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if infeas > 1e-9 * scale {
        return Ok(LpStatus::Infeasible);
    }
    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(pc) = (0..n).find(|&c| t.at(r, c).abs() > 1e-9) {
                t.pivot(r, pc);
            }
        }
    }

    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    let mut allowed = vec![true; cols];
    allowed[n..].iter_mut().for_each(|x| *x = false);
    if !t.optimize(&cost, &allowed)? {
        return Ok(LpStatus::Unbounded);
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpStatus::Optimal(LpSolution { x, value }))
}
