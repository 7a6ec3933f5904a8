//! Square matrices of exact expressions.

use crate::expr::{Expr, ExprError, Var};
use num::rational::BigRational;
use std::collections::BTreeSet;
use std::fmt;

/// An m-by-m matrix with `Expr` entries, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixExpr {
    pub m: usize,
    entries: Vec<Expr>,
}

impl MatrixExpr {
    pub fn zeros(m: usize) -> MatrixExpr {
        MatrixExpr { m, entries: vec![Expr::zero(); m * m] }
    }

    pub fn identity(m: usize) -> MatrixExpr {
        let mut out = MatrixExpr::zeros(m);
        for i in 0..m {
            out[(i, i)] = Expr::one();
        }
        out
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> MatrixExpr {
        let m = rows.len();
        assert!(rows.iter().all(|r| r.len() == m), "matrix must be square");
        MatrixExpr { m, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> Expr) -> MatrixExpr {
        let mut out = MatrixExpr::zeros(m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = f(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixExpr) -> MatrixExpr {
        assert_eq!(self.m, other.m);
        MatrixExpr::from_fn(self.m, |i, j| self[(i, j)].add(&other[(i, j)]))
    }

    pub fn sub(&self, other: &MatrixExpr) -> MatrixExpr {
        assert_eq!(self.m, other.m);
        MatrixExpr::from_fn(self.m, |i, j| self[(i, j)].sub(&other[(i, j)]))
    }

    pub fn neg(&self) -> MatrixExpr {
        MatrixExpr::from_fn(self.m, |i, j| self[(i, j)].neg())
    }

    pub fn matmul(&self, other: &MatrixExpr) -> MatrixExpr {
        assert_eq!(self.m, other.m);
        MatrixExpr::from_fn(self.m, |i, j| {
            let mut s = Expr::zero();
            for l in 0..self.m {
                s = s.add(&self[(i, l)].mul(&other[(l, j)]));
            }
            s
        })
    }

    pub fn commutator(&self, other: &MatrixExpr) -> MatrixExpr {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn scale(&self, c: &Expr) -> MatrixExpr {
        MatrixExpr::from_fn(self.m, |i, j| self[(i, j)].mul(c))
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> MatrixExpr {
        self.scale(&Expr::from_ratio(num, den))
    }

    pub fn scale_q(&self, q: &BigRational) -> MatrixExpr {
        self.scale(&Expr::from_rational(q))
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> MatrixExpr {
        MatrixExpr::from_fn(self.m, |i, j| f(&self[(i, j)]))
    }

    pub fn trace(&self) -> Expr {
        let mut s = Expr::zero();
        for i in 0..self.m {
            s = s.add(&self[(i, i)]);
        }
        s
    }

    /// Trace-free part `T - (tr T / m) Id`.
    pub fn tfp(&self) -> MatrixExpr {
        let t = self.trace().scale(1, self.m as i64);
        MatrixExpr::from_fn(self.m, |i, j| {
            if i == j {
                self[(i, j)].sub(&t)
            } else {
                self[(i, j)].clone()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Expr::is_zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for e in &self.entries {
            out.extend(e.vars());
        }
        out
    }

    pub fn has_aux(&self) -> bool {
        self.entries.iter().any(Expr::has_aux)
    }

    pub fn entries(&self) -> &[Expr] {
        &self.entries
    }

    /// Determinant by cofactor expansion; fine for the small m used here.
    pub fn det(&self) -> Expr {
        match self.m {
            0 => Expr::one(),
            1 => self[(0, 0)].clone(),
            _ => {
                let mut s = Expr::zero();
                for j in 0..self.m {
                    let c = self[(0, j)].mul(&self.minor(0, j).det());
                    s = if j % 2 == 0 { s.add(&c) } else { s.sub(&c) };
                }
                s
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> MatrixExpr {
        let m = self.m - 1;
        MatrixExpr::from_fn(m, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self[(si, sj)].clone()
        })
    }

    /// Adjugate matrix, so that `self * adjugate = det * Id`.
    pub fn adjugate(&self) -> MatrixExpr {
        if self.m == 1 {
            return MatrixExpr::identity(1);
        }
        MatrixExpr::from_fn(self.m, |i, j| {
            let c = self.minor(j, i).det();
            if (i + j) % 2 == 0 {
                c
            } else {
                c.neg()
            }
        })
    }

    /// Solve `self * x = b` by adjugate over the rational-function field.
    /// Fails when the determinant is identically zero.
    pub fn solve_vec(&self, b: &[Expr]) -> Result<Vec<Expr>, ExprError> {
        assert_eq!(b.len(), self.m);
        let det = self.det();
        if det.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let adj = self.adjugate();
        (0..self.m)
            .map(|i| {
                let mut s = Expr::zero();
                for j in 0..self.m {
                    s = s.add(&adj[(i, j)].mul(&b[j]));
                }
                s.div(&det)
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for MatrixExpr {
    type Output = Expr;
    fn index(&self, (i, j): (usize, usize)) -> &Expr {
        &self.entries[i * self.m + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixExpr {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Expr {
        &mut self.entries[i * self.m + j]
    }
}

impl fmt::Display for MatrixExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.m {
            write!(f, "  [")?;
            for j in 0..self.m {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfp_examples() {
        assert!(MatrixExpr::identity(2).tfp().is_zero());
        let n = MatrixExpr::from_rows(vec![
            vec![Expr::zero(), Expr::one()],
            vec![Expr::zero(), Expr::zero()],
        ]);
        assert_eq!(n.tfp(), n);
        let d = MatrixExpr::from_rows(vec![
            vec![Expr::from_int(2), Expr::zero()],
            vec![Expr::zero(), Expr::zero()],
        ]);
        let expected = MatrixExpr::from_rows(vec![
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), Expr::from_int(-1)],
        ]);
        assert_eq!(d.tfp(), expected);
        // idempotent and trace-free
        assert_eq!(d.tfp().tfp(), d.tfp());
        assert!(d.tfp().trace().is_zero());
    }

    #[test]
    fn adjugate_inverts() {
        let x = Expr::x();
        let a = MatrixExpr::from_rows(vec![
            vec![x.clone(), Expr::one()],
            vec![Expr::one(), Expr::from_int(2)],
        ]);
        let det = a.det();
        let prod = a.matmul(&a.adjugate());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { det.clone() } else { Expr::zero() };
                assert_eq!(prod[(i, j)], want);
            }
        }
    }

    #[test]
    fn solve_small_system() {
        let a = MatrixExpr::from_rows(vec![
            vec![Expr::from_int(2), Expr::zero()],
            vec![Expr::one(), Expr::one()],
        ]);
        let b = [Expr::from_int(4), Expr::from_int(3)];
        let x = a.solve_vec(&b).unwrap();
        assert_eq!(x[0], Expr::from_int(2));
        assert_eq!(x[1], Expr::one());
    }
}
