//! Linear differential operators with matrix coefficients and the classical
//! Wilczynski invariants of operators in Laguerre–Forsyth form.
//!
//! An operator is `D^(k+1) + P_k D^k + ... + P_0`, monic with m-by-m
//! coefficient matrices. The Laguerre–Forsyth normalization is `P_k = 0`,
//! `tr P_{k-1} = 0`; on such operators the expressions
//!
//! ```text
//! Theta_r = sum_{j=1}^{r-1} (-1)^(j+1)
//!           (2r-j-1)! (k-r+j)! / ((r-j)! (j-1)!) * P_{k-r+j}^{(j-1)}
//! ```
//!
//! for `r = 2..=k+1` are relative invariants, `Theta_r` of degree r.

pub use crate::matrix::MatrixExpr;

use crate::expr::{parse_expr, Expr, ParseError, Var};
use crate::jets::OdeSystem;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum LinOpError {
    #[error("operator needs order >= 2, got {0}")]
    BadOrder(usize),
    #[error("expected {expected} coefficient matrices, got {got}")]
    CoeffCount { expected: usize, got: usize },
    #[error("coefficient matrix {index} is {rows}x{cols}, expected {m}x{m}")]
    BadShape { index: usize, rows: usize, cols: usize, m: usize },
    #[error("invariant index r = {r} out of range 2..={max}")]
    ROutOfRange { r: usize, max: usize },
    #[error("operator is not in Laguerre-Forsyth form: {0}")]
    NotLaguerreForsyth(&'static str),
    #[error("operator file coefficients must depend on x only, found {0}")]
    NotXOnly(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Reparametrization data attached to a trace-normalized operator: the
/// auxiliary symbol `rho` together with the right-hand side of its defining
/// Riccati relation `D rho = ...`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RhoData {
    pub var: Var,
    pub riccati: Expr,
}

/// Derivation used to differentiate operator coefficients.
#[derive(Clone, Debug)]
pub enum CoeffDeriv {
    /// Plain d/dx on x-only coefficients.
    PlainX,
    /// Total derivative of an attached system.
    Total(OdeSystem),
    /// Gauge-twisted derivation of the reduction pipeline:
    /// `D M = (total M) + epsilon [M, phi]`, extended through the formal
    /// reparametrization by the chain rule on `rho` and a weight term.
    Twisted {
        sys: OdeSystem,
        phi: MatrixExpr,
        epsilon: i8,
        rho: Option<RhoData>,
    },
}

impl CoeffDeriv {
    /// Differentiate a coefficient matrix. `weight` is the reparametrization
    /// weight of the matrix (order minus coefficient index, plus derivatives
    /// already applied); it only matters for the twisted derivation.
    pub fn derive(&self, mat: &MatrixExpr, weight: i64) -> MatrixExpr {
        match self {
            CoeffDeriv::PlainX => mat.map(|e| e.partial(&Var::X)),
            CoeffDeriv::Total(sys) => mat.map(|e| {
                sys.total_derivative(e)
                    .expect("coefficients stay below top order")
            }),
            CoeffDeriv::Twisted { sys, phi, epsilon, rho } => {
                let mut out = mat.map(|e| {
                    sys.total_derivative(e)
                        .expect("coefficients stay below top order")
                });
                let comm = mat.commutator(phi);
                out = if *epsilon >= 0 { out.add(&comm) } else { out.sub(&comm) };
                if let Some(rho) = rho {
                    let chain = mat.map(|e| e.partial(&rho.var).mul(&rho.riccati));
                    out = out.add(&chain);
                    if weight != 0 {
                        let rv = Expr::var(rho.var.clone());
                        out = out.sub(&mat.scale(&rv).scale_ratio(weight, 1));
                    }
                }
                out
            }
        }
    }
}

/// Monic linear differential operator `D^(k+1) + sum_s P_s D^s`.
#[derive(Clone, Debug)]
pub struct LinDiffOp {
    pub m: usize,
    /// Top order k+1.
    pub order: usize,
    /// Coefficients `P_0..P_k`, index = power of D.
    pub coeffs: Vec<MatrixExpr>,
    pub deriv: CoeffDeriv,
}

/// JSON wire format for an operator file: matrices P_0..P_k, row-major.
#[derive(Serialize, Deserialize)]
pub struct OperatorFile {
    pub m: usize,
    pub order: usize,
    pub coeffs: Vec<Vec<Vec<String>>>,
}

/// Result of the Laguerre-Forsyth check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LfCheck {
    /// `P_k = 0`.
    pub is_semi_canonical: bool,
    /// `P_k = 0` and `tr P_{k-1} = 0`.
    pub is_lf: bool,
}

impl LinDiffOp {
    pub fn new(
        m: usize,
        order: usize,
        coeffs: Vec<MatrixExpr>,
        deriv: CoeffDeriv,
    ) -> Result<LinDiffOp, LinOpError> {
        if order < 2 {
            return Err(LinOpError::BadOrder(order));
        }
        if coeffs.len() != order {
            return Err(LinOpError::CoeffCount { expected: order, got: coeffs.len() });
        }
        for (index, c) in coeffs.iter().enumerate() {
            if c.m != m {
                return Err(LinOpError::BadShape { index, rows: c.m, cols: c.m, m });
            }
        }
        Ok(LinDiffOp { m, order, coeffs, deriv })
    }

    pub fn from_file(file: &OperatorFile) -> Result<LinDiffOp, LinOpError> {
        let mut coeffs = Vec::new();
        for (index, mat) in file.coeffs.iter().enumerate() {
            if mat.len() != file.m || mat.iter().any(|row| row.len() != file.m) {
                return Err(LinOpError::BadShape {
                    index,
                    rows: mat.len(),
                    cols: mat.first().map_or(0, Vec::len),
                    m: file.m,
                });
            }
            let rows = mat
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| Ok(parse_expr(s, file.m as u32, 0)?))
                        .collect::<Result<Vec<_>, LinOpError>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = MatrixExpr::from_rows(rows);
            for v in m.vars() {
                if matches!(v, Var::Jet { .. }) {
                    return Err(LinOpError::NotXOnly(v.to_string()));
                }
            }
            coeffs.push(m);
        }
        LinDiffOp::new(file.m, file.order, coeffs, CoeffDeriv::PlainX)
    }

    /// k = order - 1, index of the highest (necessarily vanishing in LF form)
    /// coefficient.
    pub fn k(&self) -> usize {
        self.order - 1
    }

    pub fn lf_check(&self) -> LfCheck {
        let k = self.k();
        let semi = self.coeffs[k].is_zero();
        let lf = semi && self.coeffs[k - 1].trace().is_zero();
        LfCheck { is_semi_canonical: semi, is_lf: lf }
    }

    /// The Wilczynski invariant `Theta_r`, `r = 2..=k+1`, of an operator in
    /// Laguerre-Forsyth form. Derivatives are taken with the operator's own
    /// derivation.
    pub fn theta(&self, r: usize) -> Result<MatrixExpr, LinOpError> {
        let k = self.k();
        if r < 2 || r > k + 1 {
            return Err(LinOpError::ROutOfRange { r, max: k + 1 });
        }
        let check = self.lf_check();
        if !check.is_semi_canonical {
            return Err(LinOpError::NotLaguerreForsyth("P_k != 0"));
        }
        if !check.is_lf {
            return Err(LinOpError::NotLaguerreForsyth("tr P_{k-1} != 0"));
        }
        let mut out = MatrixExpr::zeros(self.m);
        for term in theta_terms(k, r) {
            let mut mat = self.coeffs[term.coeff_index].clone();
            let mut weight = (k as i64 + 1) - term.coeff_index as i64;
            for _ in 0..term.derivs {
                mat = self.deriv.derive(&mat, weight);
                weight += 1;
            }
            out = out.add(&mat.scale_q(&term.coeff));
        }
        Ok(out)
    }

    pub fn theta_all(&self) -> Result<Vec<(usize, MatrixExpr)>, LinOpError> {
        (2..=self.k() + 1)
            .map(|r| Ok((r, self.theta(r)?)))
            .collect()
    }
}

/// One summand of the `Theta_r` formula.
#[derive(Clone, Debug)]
pub struct ThetaTerm {
    pub j: usize,
    pub coeff_index: usize,
    pub derivs: usize,
    pub coeff: BigRational,
}

/// The terms of `Theta_r` for top order k+1: signs and factorial weights.
pub fn theta_terms(k: usize, r: usize) -> Vec<ThetaTerm> {
    (1..r)
        .map(|j| {
            let num = factorial(2 * r - j - 1) * factorial(k + j - r);
            let den = factorial(r - j) * factorial(j - 1);
            let mut coeff = BigRational::new(num, den);
            if j % 2 == 0 {
                coeff = -coeff;
            }
            ThetaTerm { j, coeff_index: k + j - r, derivs: j - 1, coeff }
        })
        .collect()
}

pub fn factorial(n: usize) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=n {
        out *= BigInt::from(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    fn x_only_op(m: usize, order: usize, coeffs: Vec<MatrixExpr>) -> LinDiffOp {
        LinDiffOp::new(m, order, coeffs, CoeffDeriv::PlainX).unwrap()
    }

    #[test]
    fn lf_check_examples() {
        let trivial = x_only_op(2, 3, vec![MatrixExpr::zeros(2); 3]);
        assert_eq!(
            trivial.lf_check(),
            LfCheck { is_semi_canonical: true, is_lf: true }
        );

        // scalar y'' + p0(x) y with p0 = x: semi-canonical but tr P_0 = x != 0
        let p0 = MatrixExpr::from_rows(vec![vec![Expr::x()]]);
        let op = x_only_op(1, 2, vec![p0, MatrixExpr::zeros(1)]);
        assert_eq!(
            op.lf_check(),
            LfCheck { is_semi_canonical: true, is_lf: false }
        );

        let mut coeffs = vec![MatrixExpr::zeros(2); 3];
        coeffs[2] = MatrixExpr::identity(2);
        let op = x_only_op(2, 3, coeffs);
        assert_eq!(
            op.lf_check(),
            LfCheck { is_semi_canonical: false, is_lf: false }
        );
    }

    #[test]
    fn theta_requires_lf() {
        let mut coeffs = vec![MatrixExpr::zeros(2); 3];
        coeffs[2] = MatrixExpr::identity(2);
        let op = x_only_op(2, 3, coeffs);
        assert!(op.theta(2).is_err());
    }

    #[test]
    fn theta2_closed_form() {
        // Theta_2 = 2 (k-1)! P_{k-1} for k = 1..=5, with generic traceless
        // aux-coefficient P_{k-1}.
        for k in 1..=5usize {
            let m = 2;
            let mut coeffs = vec![MatrixExpr::zeros(m); k + 1];
            let p = MatrixExpr::from_rows(vec![
                vec![Expr::aux("a"), Expr::aux("b")],
                vec![Expr::aux("c"), Expr::aux("a").neg()],
            ]);
            coeffs[k - 1] = p.clone();
            let op = x_only_op(m, k + 1, coeffs);
            let theta2 = op.theta(2).unwrap();
            let factor = BigRational::from_integer(2 * factorial(k - 1));
            assert_eq!(theta2, p.scale_q(&factor), "k = {k}");
        }
    }

    #[test]
    fn theta3_closed_form_k2() {
        // Theta_3 = 12 P_0 - 6 P_1' for k = 2, with x-dependent entries.
        let e = |c: i64, d: u32| Expr::from_int(c).mul(&Expr::x().pow(d as i64).unwrap());
        let p0 = MatrixExpr::from_rows(vec![
            vec![e(1, 2), e(-1, 0)],
            vec![e(2, 1), e(3, 3)],
        ]);
        let p1 = MatrixExpr::from_rows(vec![
            vec![e(1, 3), e(4, 1)],
            vec![e(-2, 2), e(-1, 3)],
        ]);
        let coeffs = vec![p0.clone(), p1.clone(), MatrixExpr::zeros(2)];
        let op = x_only_op(2, 3, coeffs);
        let theta3 = op.theta(3).unwrap();
        let p1d = p1.map(|en| en.partial(&Var::X));
        let expected = p0.scale_ratio(12, 1).sub(&p1d.scale_ratio(6, 1));
        assert_eq!(theta3, expected);
    }

    #[test]
    fn theta_vanishes_on_trivial() {
        for k in 1..=4usize {
            let op = x_only_op(2, k + 1, vec![MatrixExpr::zeros(2); k + 1]);
            for r in 2..=k + 1 {
                assert!(op.theta(r).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn theta_term_bookkeeping() {
        // Theta_r uses only P_{k-r+1}..P_{k-1} with at most r-2 derivatives.
        for k in 1..=5usize {
            for r in 2..=k + 1 {
                for term in theta_terms(k, r) {
                    assert!(term.coeff_index + r >= k + 1);
                    assert!(term.coeff_index <= k - 1);
                    assert!(term.derivs <= r - 2);
                    assert!(!term.coeff.is_zero());
                }
            }
        }
    }

    #[test]
    fn theta_is_linear_and_theta2_tracefree() {
        // linearity in the coefficient family and tr Theta_2 = 0 on LF input
        let p_a = MatrixExpr::from_rows(vec![
            vec![Expr::x(), Expr::from_int(2)],
            vec![Expr::one(), Expr::x().neg()],
        ]);
        let p_b = MatrixExpr::from_rows(vec![
            vec![Expr::x().pow(2).unwrap(), Expr::zero()],
            vec![Expr::x(), Expr::x().pow(2).unwrap().neg()],
        ]);
        let make = |p: &MatrixExpr| {
            let coeffs = vec![MatrixExpr::zeros(2), p.clone(), MatrixExpr::zeros(2)];
            x_only_op(2, 3, coeffs)
        };
        let (a, b) = (make(&p_a), make(&p_b));
        let sum = make(&p_a.add(&p_b));
        for r in 2..=3 {
            let lhs = sum.theta(r).unwrap();
            let rhs = a.theta(r).unwrap().add(&b.theta(r).unwrap());
            assert_eq!(lhs, rhs);
        }
        assert!(a.theta(2).unwrap().trace().is_zero());
        assert!(sum.theta(2).unwrap().trace().is_zero());
    }
}
