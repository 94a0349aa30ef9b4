//! Dense exact linear algebra over the rationals: rank, kernel bases and
//! linear solves via fraction-free-ish Gaussian elimination. Sizes here stay
//! in the hundreds, so a straightforward row-reduction is plenty.

use crate::scalar::Ratio;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Ratio>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Ratio::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Ratio>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Ratio::one());
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Ratio {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ratio) {
        self.data[i * self.cols + j] = v;
    }

    /// Glues `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Reduced row echelon form together with the list of pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = Ratio::one() / m.get(row, col).clone();
            for j in col..m.cols {
                let v = m.get(row, j).clone() * inv.clone();
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(row, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space (vectors v with M v = 0), one vector per
    /// free column, in free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Ratio>> {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &pivots {
                s[p] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![Ratio::zero(); self.cols];
            v[free] = Ratio::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of M x = b if the system is consistent (free variables
    /// set to zero).
    pub fn solve(&self, b: &[Ratio]) -> Option<Vec<Ratio>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut rhs = Matrix::zeros(self.rows, 1);
        for (i, v) in b.iter().enumerate() {
            rhs.set(i, 0, v.clone());
        }
        let aug = self.hstack(&rhs);
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Ratio::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }
}
