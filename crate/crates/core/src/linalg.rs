//! Dense rational matrices with exact and floating-point rank.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Row-major dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.set(i, i, BigRational::one());
        }
        out
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RatMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let conv: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
            .collect();
        Self::from_rows(&conv)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Horizontal concatenation. All blocks must have the same row count.
    pub fn hcat(blocks: &[&RatMatrix], rows: usize) -> RatMatrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "row mismatch in hcat");
            for c in 0..b.cols {
                for r in 0..rows {
                    out.set(r, at + c, b.get(r, c).clone());
                }
            }
            at += b.cols;
        }
        out
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for (k, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, k, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).to_f64().unwrap_or(f64::NAN)
        })
    }

    /// Exact rank by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.integer_rows();
        bareiss_rank(&mut m, self.rows, self.cols)
    }

    /// Rank from singular values above `tol` times the largest one.
    pub fn rank_float(&self, tol: f64) -> usize {
        float_rank(&self.to_f64(), tol)
    }

    /// Scales each column by the lcm of its denominators; rank is unchanged.
    fn integer_rows(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rows * self.cols];
        for c in 0..self.cols {
            let mut l = BigInt::one();
            for r in 0..self.rows {
                l = l.lcm(self.get(r, c).denom());
            }
            for r in 0..self.rows {
                let v = self.get(r, c);
                out[r * self.cols + c] = v.numer() * (&l / v.denom());
            }
        }
        out
    }
}

fn bareiss_rank(a: &mut [BigInt], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for k in 0..cols {
                a.swap(p * cols + k, rank * cols + k);
            }
        }
        let pivot = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let f = a[r * cols + c].clone();
            for k in c + 1..cols {
                let v = &pivot * &a[r * cols + k] - &f * &a[rank * cols + k];
                a[r * cols + k] = v / &prev;
            }
            a[r * cols + c] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Numerical rank of a float matrix via SVD.
pub fn float_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}
