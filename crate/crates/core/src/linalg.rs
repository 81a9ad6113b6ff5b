//! Small dense matrices and LU with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scale(&mut self, a: T) {
        for x in &mut self.data {
            *x = *x * a;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Factorises a square matrix; `None` when a pivot vanishes relative to
    /// the matrix scale.
    pub fn lu(mut self) -> Option<Lu<T>> {
        assert_eq!(self.rows, self.cols, "LU of a non-square matrix");
        let n = self.rows;
        let scale = self.max_abs();
        let tiny = scale * T::epsilon();
        if scale == T::zero() {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = self[(k, k)].abs();
            for i in k + 1..n {
                let a = self[(i, k)].abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            if !(best > tiny) {
                return None;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    self.data.swap(k * n + j, p * n + j);
                }
            }
            let pivot = self[(k, k)];
            let (upper, lower) = self.data.split_at_mut((k + 1) * n);
            let row_k = &upper[k * n..];
            for row in lower.chunks_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        row[j] = row[j] - f * row_k[j];
                    }
                }
            }
        }
        Some(Lu { lu: self, perm })
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed `PA = LU` factors.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu.data[i * n..i * n + i];
            let s: T = row.iter().zip(&x[..i]).map(|(a, b)| *a * *b).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = &self.lu.data[i * n + i + 1..(i + 1) * n];
            let s: T = row.iter().zip(&x[i + 1..]).map(|(a, b)| *a * *b).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        let mut a = DenseMatrix::<f64>::zeros(3, 3);
        let vals = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = vals[i][j];
            }
        }
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let got = a.clone().lu().unwrap().solve(&b);
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn detects_singular() {
        let mut a = DenseMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        assert!(a.lu().is_none());
    }
}
