//! Dense exact matrices over a field scalar, with deterministic
//! Gaussian elimination (first nonzero pivot, exact division).

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries, `entries[r * cols + c]`.
    pub entries: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[S]) {
        assert_eq!(v.len(), self.rows);
        for (r, x) in v.iter().enumerate() {
            *self.at_mut(r, c) = x.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out: Matrix<S> = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c).clone() + a.clone() * other.at(k, c).clone();
                    *out.at_mut(r, c) = v;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..self.cols {
                    if !v[c].is_zero() {
                        acc = acc + self.at(r, c).clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (Matrix<S>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let a = m.at(p, c).clone();
                    let b = m.at(row, c).clone();
                    *m.at_mut(p, c) = b;
                    *m.at_mut(row, c) = a;
                }
            }
            let inv = S::one() / m.at(row, col).clone();
            for c in 0..m.cols {
                let v = m.at(row, c).clone() * inv.clone();
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c).clone() - factor.clone() * m.at(row, c).clone();
                        *m.at_mut(r, c) = v;
                    }
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

    /// Solve `self * x = b`; None if inconsistent. Free variables are set to 0.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = b[r].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = red.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Is this a square invertible matrix?
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = S::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = red.at(r, n + c).clone();
            }
        }
        Some(inv)
    }

    pub fn trace(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let mut acc = S::zero();
        for i in 0..self.rows {
            acc = acc + self.at(i, i).clone();
        }
        acc
    }
}

/// Echelon basis of the column span of `columns` (each of length `dim`),
/// as a deterministic reduced set of spanning vectors.
pub fn column_span_basis<S: Scalar>(dim: usize, columns: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut m = Matrix::zero(columns.len(), dim);
    for (r, col) in columns.iter().enumerate() {
        assert_eq!(col.len(), dim);
        for (c, x) in col.iter().enumerate() {
            *m.at_mut(r, c) = x.clone();
        }
    }
    let (red, pivots) = m.rref();
    (0..pivots.len()).map(|r| (0..dim).map(|c| red.at(r, c).clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let m = Matrix::from_rows(vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(1), q(0), q(1)],
        ]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_and_inverse() {
        let m = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]);
        let x = m.solve(&[q(3), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn span_basis_is_reduced() {
        let b = column_span_basis(3, &[vec![q(0), q(2), q(2)], vec![q(0), q(1), q(1)]]);
        assert_eq!(b, vec![vec![q(0), q(1), q(1)]]);
    }
}
