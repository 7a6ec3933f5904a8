//! Exact rational linear algebra: fraction-free elimination, rank, kernel,
//! column space, and membership tests. All dimension counts downstream rely
//! on these being exact integers, so no floating point appears anywhere.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

pub fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> QMatrix {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> QMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<BigRational>]) -> QMatrix {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = QMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigRational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigRational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        s += &self[(i, j)] * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = QMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Scale each row to integers: returns numerators after clearing the lcm
    /// of row denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut l = BigInt::one();
                for j in 0..self.cols {
                    l = l.lcm(self[(i, j)].denom());
                }
                (0..self.cols)
                    .map(|j| {
                        let v = &self[(i, j)];
                        v.numer() * (&l / v.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Rank by fraction-free (Bareiss) elimination on the integer-scaled
    /// matrix.
    pub fn rank(&self) -> usize {
        let mut m = self.integer_rows();
        bareiss_rank(&mut m)
    }

    /// Basis of the right kernel `{v : Av = 0}`, via exact reduced row
    /// echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let (rref, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        for j in 0..self.cols {
            if pivot_set[j].is_some() {
                continue;
            }
            let mut vec = vec![BigRational::zero(); self.cols];
            vec[j] = BigRational::one();
            for (c, p) in pivot_set.iter().enumerate() {
                if let Some(r) = p {
                    vec[c] = -rref[(*r, j)].clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Reduced row echelon form together with pivot column indices.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // pick the entry with the smallest numerator/denominator bits? A
            // nonzero pivot suffices for exactness.
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for j in col..m.cols {
                        let v = &m[(r, j)] - &f * &m[(row, j)];
                        m[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// One solution of `Ax = b`, if any.
    pub fn solve_any(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, b.len());
        let aug = self.hcat(&QMatrix::from_columns(&[b.to_vec()]));
        let (rref, pivots) = aug.rref();
        // inconsistent iff a pivot lands in the last column
        if pivots.iter().any(|&c| c == self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = rref[(r, self.cols)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Bareiss fraction-free elimination; destroys `m`, returns the rank.
fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pivot = m[row][col].clone();
        for r in row + 1..rows {
            for c in col + 1..cols {
                let v = (&pivot * &m[r][c] - &m[r][col] * &m[row][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        row += 1;
    }
    row
}

/// A subspace of Q^n presented by a (not necessarily reduced) spanning set.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    gens: Vec<Vec<BigRational>>,
}

impl Subspace {
    pub fn from_spanning(ambient: usize, gens: Vec<Vec<BigRational>>) -> Subspace {
        for g in &gens {
            assert_eq!(g.len(), ambient);
        }
        Subspace { ambient, gens }
    }

    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, gens: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        if self.gens.is_empty() {
            0
        } else {
            QMatrix::from_rows(self.gens.clone()).rank()
        }
    }

    pub fn gens(&self) -> &[Vec<BigRational>] {
        &self.gens
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.gens.is_empty() {
            return false;
        }
        let a = QMatrix::from_columns(&self.gens);
        a.solve_any(v).is_some()
    }

    /// Dimension of `(self + other) / other`.
    pub fn dim_mod(&self, other: &Subspace) -> usize {
        assert_eq!(self.ambient, other.ambient);
        let mut all = other.gens.clone();
        all.extend(self.gens.clone());
        let total = Subspace::from_spanning(self.ambient, all).dim();
        total - other.dim()
    }
}

/// Solutions `{v : Av in col(B)}` as a subspace: the preimage of a column
/// space. Computed as the kernel of `[A | -B]` projected to the first block.
pub fn preimage_of_column_space(a: &QMatrix, b: &QMatrix) -> Subspace {
    assert_eq!(a.rows, b.rows);
    let stacked = a.hcat(b);
    let kernel = stacked.kernel_basis();
    let gens: Vec<Vec<BigRational>> = kernel
        .into_iter()
        .map(|v| v[..a.cols].to_vec())
        .collect();
    Subspace::from_spanning(a.cols, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_rows(vec![
            vec![qi(1), qi(2), qi(3)],
            vec![qi(2), qi(4), qi(6)],
            vec![qi(1), qi(0), qi(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn bareiss_agrees_with_rref_rank() {
        let m = QMatrix::from_rows(vec![
            vec![qr(1, 2), qi(3), qi(0), qi(1)],
            vec![qi(1), qi(6), qi(0), qi(2)],
            vec![qi(0), qi(0), qi(5), qi(5)],
        ]);
        let (_, pivots) = m.rref();
        assert_eq!(m.rank(), pivots.len());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_and_membership() {
        let a = QMatrix::from_rows(vec![vec![qi(1), qi(1)], vec![qi(0), qi(1)]]);
        let x = a.solve_any(&[qi(3), qi(1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![qi(3), qi(1)]);

        let s = Subspace::from_spanning(2, vec![vec![qi(1), qi(1)]]);
        assert!(s.contains(&[qi(2), qi(2)]));
        assert!(!s.contains(&[qi(1), qi(0)]));
    }

    #[test]
    fn preimage_subspace() {
        // A = [[1,0],[0,1]], B = span{(1,0)}: preimage = {v : v_2 = 0}
        let a = QMatrix::identity(2);
        let b = QMatrix::from_columns(&[vec![qi(1), qi(0)]]);
        let pre = preimage_of_column_space(&a, &b);
        assert_eq!(pre.dim(), 1);
        assert!(pre.contains(&[qi(5), qi(0)]));
        assert!(!pre.contains(&[qi(0), qi(1)]));
    }
}
