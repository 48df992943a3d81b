//! Dense matrices over a [`Scalar`] with the handful of exact algorithms the
//! rest of the crate needs: row reduction, null spaces, determinants,
//! characteristic polynomials and sign-exact inertia.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>, // row-major
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Returns `None` when the rows are
    /// ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return None;
        }
        Some(Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Option<Self> {
        let k = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return None;
        }
        Some(Self::from_fn(n, k, |r, c| cols[c][r].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * k.clone()).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// `uᵀ · self · w`.
    pub fn bilinear(&self, u: &[T], w: &[T]) -> T {
        dot(u, &self.mul_vec(w))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)] == self[(c, r)]))
    }

    /// `Bᵀ · self · B` where the columns of `B` are `basis`.
    pub fn restrict(&self, basis: &[Vec<T>]) -> Self {
        let k = basis.len();
        let images: Vec<Vec<T>> = basis.iter().map(|b| self.mul_vec(b)).collect();
        Self::from_fn(k, k, |i, j| dot(&basis[i], &images[j]))
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = m.pivot_row(row, col) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = T::one() / m[(row, col)].clone();
            for c in col..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for c in col..m.cols {
                        let delta = factor.clone() * m[(row, c)].clone();
                        m[(r, c)] = m[(r, c)].clone() - delta;
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

    /// Basis of `{x : self · x = 0}`, one vector per free column, with the
    /// free coordinate set to one.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Unique solution of `self · x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        if !self.is_square() || b.len() != self.rows {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, n + 1, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else {
                b[r].clone()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some((0..n).map(|r| red[(r, n)].clone()).collect())
    }

    /// Determinant by Gaussian elimination.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = T::one();
        for col in 0..m.cols {
            let Some(p) = m.pivot_row(col, col) else {
                return T::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone() / pivot.clone();
                for c in col..m.cols {
                    let delta = factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - delta;
                }
            }
        }
        det
    }

    /// Determinants of the leading `k × k` submatrices, `k = 1..=n`.
    pub fn leading_principal_minors(&self) -> Vec<T> {
        (1..=self.rows)
            .map(|k| Self::from_fn(k, k, |r, c| self[(r, c)].clone()).determinant())
            .collect()
    }

    /// Coefficients `[c_0, …, c_n]` of `det(λI − A) = Σ c_k λ^k`
    /// (Faddeev–LeVerrier).
    pub fn characteristic_polynomial(&self) -> Vec<T> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let ident = Self::identity(n);
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A · M_{k-1} + c_{n-k+1} I
            m = &(self * &m) + &ident.scale(&coeffs[n - k + 1]);
            let am = self * &m;
            let trace = (0..n).fold(T::zero(), |acc, i| acc + am[(i, i)].clone());
            coeffs[n - k] = -trace / T::from_int(k as i64);
        }
        coeffs
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix, computed
    /// from sign variations of its characteristic polynomial. All roots of
    /// that polynomial are real, so Descartes' bound is exact.
    pub fn inertia(&self) -> Inertia {
        assert!(self.is_symmetric(), "inertia of a non-symmetric matrix");
        let p = self.characteristic_polynomial();
        let zero = p.iter().take_while(|c| c.is_negligible()).count();
        let positive = sign_variations(p.iter().cloned());
        let negative = sign_variations(p.iter().enumerate().map(|(k, c)| {
            if k % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            }
        }));
        Inertia {
            positive,
            negative,
            zero,
        }
    }

    fn pivot_row(&self, from: usize, col: usize) -> Option<usize> {
        if T::is_exact() {
            (from..self.rows).find(|&r| !self[(r, col)].is_zero())
        } else {
            // Partial pivoting keeps the floating instantiation stable.
            let best = (from..self.rows).max_by(|&a, &b| {
                self[(a, col)]
                    .abs()
                    .partial_cmp(&self[(b, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            (!self[(best, col)].is_negligible()).then_some(best)
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

fn sign_variations<T: Scalar>(coeffs: impl Iterator<Item = T>) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for c in coeffs {
        if c.is_negligible() {
            continue;
        }
        let pos = c > T::zero();
        if let Some(prev) = last {
            if prev != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

pub fn dot<T: Scalar>(u: &[T], w: &[T]) -> T {
    assert_eq!(u.len(), w.len(), "dot product dimension mismatch");
    u.iter()
        .zip(w)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Vectors are linearly independent iff the matrix with them as rows has
/// full row rank.
pub fn linearly_independent<T: Scalar>(vectors: &[Vec<T>]) -> bool {
    match Matrix::from_rows(vectors.to_vec()) {
        Some(m) => m.rank() == vectors.len(),
        None => false,
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc + self[(r, k)].clone() * rhs[(k, c)].clone()
            })
        })
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn determinant_and_minors() {
        let m = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.determinant(), q(18));
        assert_eq!(m.leading_principal_minors(), vec![q(2), q(5), q(18)]);
        let swap = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.determinant(), q(-1));
    }

    #[test]
    fn characteristic_polynomial_matches_hand_expansion() {
        // det(λI - [[0,1],[1,0]]) = λ² - 1
        let m = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.characteristic_polynomial(), vec![q(-1), q(0), q(1)]);
        // det(λI - diag(2,-2,0)) = λ³ - 4λ
        let d = mat(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
        assert_eq!(d.characteristic_polynomial(), vec![q(0), q(-4), q(0), q(1)]);
    }

    #[test]
    fn inertia_of_hyperbolic_and_degenerate_forms() {
        let h = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            h.inertia(),
            Inertia {
                positive: 1,
                negative: 1,
                zero: 0
            }
        );
        let d = mat(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
        assert_eq!(
            d.inertia(),
            Inertia {
                positive: 1,
                negative: 1,
                zero: 1
            }
        );
        let neg = mat(&[&[-2]]);
        assert_eq!(neg.inertia().negative, 1);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = mat(&[&[2, 0, -1], &[0, 2, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![Q::new(1.into(), 2.into()), q(0), q(1)]]);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_singular() {
        let m = mat(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.solve(&[q(3), q(2)]), Some(vec![q(1), q(1)]));
        let s = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.solve(&[q(1), q(2)]), None);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn restriction_to_a_line() {
        let m = mat(&[&[1, 0], &[0, -1]]);
        let r = m.restrict(&[vec![q(1), q(2)]]);
        assert_eq!(r[(0, 0)], q(-3));
    }

    #[test]
    fn float_instantiation_agrees() {
        let m: Matrix<f64> = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.determinant() - 5.0).abs() < 1e-12);
        assert_eq!(m.inertia().positive, 2);
    }
}
