//! Exact rational simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`.
//!
//! Dense tableau, two phases when some `b_i < 0`, Bland's rule throughout so
//! the method terminates on degenerate problems.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{BiaError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<BigRational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
}

impl LinearProgram {
    pub fn new(objective: Vec<BigRational>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    n_vars: usize,
    n_slack: usize,
    n_art: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let negative: Vec<usize> = (0..m)
            .filter(|&i| lp.constraints[i].rhs.is_negative())
            .collect();
        let width = n + m + negative.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![BigRational::zero(); width];
            let flip = c.rhs.is_negative();
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = if flip { -v.clone() } else { v.clone() };
            }
            row[n + i] = if flip { -BigRational::one() } else { BigRational::one() };
            if flip {
                let a = negative.iter().position(|&r| r == i).unwrap();
                row[n + m + a] = BigRational::one();
                basis.push(n + m + a);
                rhs.push(-c.rhs.clone());
            } else {
                basis.push(n + i);
                rhs.push(c.rhs.clone());
            }
            rows.push(row);
        }
        Tableau {
            rows,
            rhs,
            basis,
            n_vars: n,
            n_slack: m,
            n_art: negative.len(),
        }
    }

    fn width(&self) -> usize {
        self.n_vars + self.n_slack + self.n_art
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over the current feasible basis using columns `< limit`.
    fn optimize(&mut self, cost: &[BigRational], limit: usize) -> Result<()> {
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(BiaError::Unbounded);
            };
            self.pivot(r, c);
        }
    }

    fn value(&self, cost: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &cost[b] * v)
            .sum()
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let width = self.width();
        let real = self.n_vars + self.n_slack;
        if self.n_art > 0 {
            let mut phase1 = vec![BigRational::zero(); width];
            for v in phase1.iter_mut().skip(real) {
                *v = -BigRational::one();
            }
            self.optimize(&phase1, width)?;
            if !self.value(&phase1).is_zero() {
                return Err(BiaError::Infeasible);
            }
            // Drive zero-level artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= real {
                    match (0..real).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![BigRational::zero(); width];
        cost[..self.n_vars].clone_from_slice(&lp.objective);
        self.optimize(&cost, real)?;
        let mut x = vec![BigRational::zero(); self.n_vars];
        for (&b, v) in self.basis.iter().zip(&self.rhs) {
            if b < self.n_vars {
                x[b] = v.clone();
            }
        }
        Ok(LpSolution {
            value: self.value(&cost),
            x,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qs(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    fn feasible(lp: &LinearProgram, x: &[BigRational]) -> bool {
        x.iter().all(|v| !v.is_negative())
            && lp.constraints.iter().all(|c| {
                let lhs: BigRational = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                lhs <= c.rhs
            })
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(qs(&[3, 5]));
        lp.add_le(qs(&[1, 0]), q(4, 1));
        lp.add_le(qs(&[0, 2]), q(12, 1));
        lp.add_le(qs(&[3, 2]), q(18, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, qs(&[2, 6]));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y ≤ 2, x + 3y ≤ 3 → x = 3/5, y = 4/5
        let mut lp = LinearProgram::new(qs(&[1, 1]));
        lp.add_le(qs(&[2, 1]), q(2, 1));
        lp.add_le(qs(&[1, 3]), q(3, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(7, 5));
        assert_eq!(s.x, vec![q(3, 5), q(4, 5)]);
    }

    #[test]
    fn unbounded_and_infeasible() {
        let mut lp = LinearProgram::new(qs(&[1, 0]));
        lp.add_le(qs(&[-1, 1]), q(1, 1));
        assert_eq!(lp.solve().unwrap_err(), BiaError::Unbounded);

        let mut lp = LinearProgram::new(qs(&[1]));
        lp.add_le(qs(&[1]), q(1, 1));
        lp.add_le(qs(&[-1]), q(-2, 1));
        assert_eq!(lp.solve().unwrap_err(), BiaError::Infeasible);
    }

    #[test]
    fn lower_bound_constraint_needs_phase_one() {
        // max -x - y, x + y ≥ 2 (as -x - y ≤ -2), x ≤ 3 → -2
        let mut lp = LinearProgram::new(qs(&[-1, -1]));
        lp.add_le(qs(&[-1, -1]), q(-2, 1));
        lp.add_le(qs(&[1, 0]), q(3, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(-2, 1));
        assert!(feasible(&lp, &s.x));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(vec![q(3, 4), q(-150, 1), q(1, 50), q(-6, 1)]);
        lp.add_le(vec![q(1, 4), q(-60, 1), q(-1, 25), q(9, 1)], q(0, 1));
        lp.add_le(vec![q(1, 2), q(-90, 1), q(-1, 50), q(3, 1)], q(0, 1));
        lp.add_le(qs(&[0, 0, 1, 0]), q(1, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(1, 20));
        assert!(feasible(&lp, &s.x));
    }

    #[test]
    fn weak_duality_on_small_grid() {
        // max Σx subject to pairwise caps x_i + x_j ≤ 1 on a triangle → 3/2
        let mut lp = LinearProgram::new(qs(&[1, 1, 1]));
        lp.add_le(qs(&[1, 1, 0]), q(1, 1));
        lp.add_le(qs(&[0, 1, 1]), q(1, 1));
        lp.add_le(qs(&[1, 0, 1]), q(1, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(3, 2));
        assert!(feasible(&lp, &s.x));
    }
}
