//! Exact rational-function expressions over jet coordinates.
//!
//! Every `Expr` is a canonical fraction of expanded integer polynomials: the
//! denominator is nonzero with positive leading coefficient, the fraction is
//! reduced by the polynomial gcd, and zero is uniquely `0/1`. On this
//! fragment equality and zero-testing are decidable and exact.

mod parse;
mod poly;

pub use parse::{parse_expr, ParseError};
pub use poly::{set_max_degree, DegreeCapExceeded, Mono, Poly, Var};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Signed;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("division by an identically zero expression")]
    DivisionByZero,
    #[error("negative power of an identically zero expression")]
    ZeroToNegativePower,
}

/// Canonical rational function.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    /// Build the canonical form `num/den`, reducing by the gcd and fixing the
    /// denominator sign. Fails only when `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr { num: Poly::zero(), den: Poly::one() });
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g).expect("gcd divides numerator");
        let mut den = den.div_exact(&g).expect("gcd divides denominator");
        if den
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            num = num.neg();
            den = den.neg();
        }
        Ok(Expr { num, den })
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr { num: p, den: Poly::one() }
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn from_int(c: i64) -> Expr {
        Expr::from_poly(Poly::from_i64(c))
    }

    pub fn from_bigint(c: BigInt) -> Expr {
        Expr::from_poly(Poly::from_int(c))
    }

    pub fn from_ratio(num: i64, den: i64) -> Expr {
        Expr::new(Poly::from_i64(num), Poly::from_i64(den)).expect("nonzero denominator")
    }

    pub fn from_rational(q: &BigRational) -> Expr {
        Expr::new(Poly::from_int(q.numer().clone()), Poly::from_int(q.denom().clone()))
            .expect("nonzero denominator")
    }

    pub fn var(v: Var) -> Expr {
        Expr::from_poly(Poly::var(v))
    }

    pub fn x() -> Expr {
        Expr::var(Var::X)
    }

    pub fn jet(comp: u32, ord: u32) -> Expr {
        Expr::var(Var::jet(comp, ord))
    }

    pub fn aux(name: &str) -> Expr {
        Expr::var(Var::aux(name))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Identically zero as a rational function. Exact on the rational
    /// fragment; for expressions still containing auxiliary symbols this is
    /// a syntactic statement (see [`Expr::zero_verdict`]).
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Zero test together with its confidence: `syntactic_only` is set when
    /// auxiliary symbols remain, in which case hidden relations among them
    /// could invalidate the verdict.
    pub fn zero_verdict(&self) -> ZeroVerdict {
        ZeroVerdict {
            is_zero: self.is_zero(),
            syntactic_only: self.has_aux(),
        }
    }

    pub fn has_aux(&self) -> bool {
        self.vars().iter().any(Var::is_aux)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vs = self.num.vars();
        vs.extend(self.den.vars());
        vs
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(BigRational::new(n, d)),
            _ => None,
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Expr::new(num, den).expect("product of nonzero denominators")
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        Expr::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("product of nonzero denominators")
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Expr::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, num: i64, den: i64) -> Expr {
        self.mul(&Expr::from_ratio(num, den))
    }

    pub fn scale_q(&self, q: &BigRational) -> Expr {
        self.mul(&Expr::from_rational(q))
    }

    pub fn pow(&self, e: i64) -> Result<Expr, ExprError> {
        if e >= 0 {
            Ok(Expr {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            if self.is_zero() {
                return Err(ExprError::ZeroToNegativePower);
            }
            Expr::new(self.den.pow((-e) as u32), self.num.pow((-e) as u32))
        }
    }

    /// Partial derivative, by the quotient rule.
    pub fn partial(&self, v: &Var) -> Expr {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Expr::new(dn, self.den.clone()).expect("denominator unchanged");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        Expr::new(num, den).expect("square of nonzero denominator")
    }

    /// Substitute expressions for variables simultaneously; variables not in
    /// the map are left alone. Fails if a denominator becomes identically
    /// zero under the substitution.
    pub fn substitute(&self, map: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
        let num = subst_poly(&self.num, map);
        let den = subst_poly(&self.den, map);
        num.div(&den)
    }

    /// Coefficient-wise view as a polynomial in one variable with `Expr`
    /// coefficients; requires the variable to not occur in the denominator.
    pub fn poly_coeffs_in(&self, v: &Var) -> Option<Vec<Expr>> {
        if self.den.degree_in(v) > 0 {
            return None;
        }
        let deg = self.num.degree_in(v) as usize;
        let mut out = vec![Expr::zero(); deg + 1];
        for (m, c) in self.num.terms() {
            let e = m.exponent(v) as usize;
            let rest: Vec<_> = m
                .factors()
                .iter()
                .filter(|(w, _)| w != v)
                .cloned()
                .collect();
            let t = Poly::from_terms(vec![(Mono::from_factors(rest), c.clone())]);
            out[e] = out[e].add(&Expr::new(t, self.den.clone()).expect("nonzero denominator"));
        }
        Some(out)
    }
}

fn subst_poly(p: &Poly, map: &BTreeMap<Var, Expr>) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::from_bigint(c.clone());
        for (v, e) in m.factors() {
            let base = match map.get(v) {
                Some(repl) => repl.clone(),
                None => Expr::var(v.clone()),
            };
            term = term.mul(&base.pow(i64::from(*e)).expect("nonnegative power"));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Result of a zero test, flagging when auxiliary symbols kept it syntactic.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ZeroVerdict {
    pub is_zero: bool,
    pub syntactic_only: bool,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_expr(rng: &mut StdRng, vars: &[Var]) -> Expr {
        let mut p = Expr::zero();
        let nterms = rng.gen_range(1..4);
        for _ in 0..nterms {
            let mut t = Expr::from_int(rng.gen_range(-4i64..=4));
            let nf = rng.gen_range(0..3);
            for _ in 0..nf {
                let v = &vars[rng.gen_range(0..vars.len())];
                t = t.mul(&Expr::var(v.clone()));
            }
            p = p.add(&t);
        }
        p
    }

    #[test]
    fn canonical_zero_and_identity() {
        let x = Expr::x();
        let e = x.add(&Expr::one()).sub(&x.add(&Expr::one()));
        assert!(e.is_zero());
        assert_eq!(e, Expr::zero());
        let y = Expr::jet(1, 0);
        assert_eq!(y.mul(&Expr::one()), y);
    }

    #[test]
    fn fraction_reduction() {
        // (x^2 - 1)/(x - 1) canonicalizes to x + 1; oracle: multiply back.
        let x = Expr::x();
        let num = x.mul(&x).sub(&Expr::one());
        let den = x.sub(&Expr::one());
        let q = num.div(&den).unwrap();
        let expected = x.add(&Expr::one());
        assert_eq!(q, expected);
        assert_eq!(expected.mul(&den), num);
        assert!(q.sub(&expected).is_zero());
    }

    #[test]
    fn division_by_zero_rejected() {
        let e = Expr::x();
        assert_eq!(e.div(&Expr::zero()), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn binomial_expansion_is_zero() {
        // (x + y)^2 - x^2 - 2xy - y^2 == 0
        let x = Expr::x();
        let y = Expr::jet(1, 0);
        let s = x.add(&y);
        let e = s
            .mul(&s)
            .sub(&x.mul(&x))
            .sub(&x.mul(&y).scale(2, 1))
            .sub(&y.mul(&y));
        assert!(e.is_zero());
        assert!(!x.sub(&y).is_zero());
    }

    #[test]
    fn partial_derivatives() {
        let p = Expr::jet(1, 1).pow(3).unwrap();
        let d = p.partial(&Var::jet(1, 1));
        assert_eq!(d, Expr::jet(1, 1).pow(2).unwrap().scale(3, 1));
        assert!(Expr::x().partial(&Var::jet(1, 0)).is_zero());
        let prod = Expr::jet(1, 2).mul(&Expr::jet(2, 2));
        assert_eq!(prod.partial(&Var::jet(2, 2)), Expr::jet(1, 2));
    }

    #[test]
    fn partial_commutes_and_quotient_rule() {
        let x = Expr::x();
        let y = Expr::jet(1, 0);
        let e = x.pow(2).unwrap().div(&y.add(&Expr::one())).unwrap();
        let dxy = e.partial(&Var::X).partial(&Var::jet(1, 0));
        let dyx = e.partial(&Var::jet(1, 0)).partial(&Var::X);
        assert_eq!(dxy, dyx);
    }

    #[test]
    fn field_axioms_randomized() {
        let vars = [Var::X, Var::jet(1, 0), Var::jet(1, 1), Var::jet(2, 0)];
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let a = random_expr(&mut rng, &vars);
            let b = random_expr(&mut rng, &vars);
            let c = random_expr(&mut rng, &vars);
            assert_eq!(a.add(&b), b.add(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert!(a.sub(&a).is_zero());
        }
    }

    #[test]
    fn partial_is_derivation_randomized() {
        let vars = [Var::X, Var::jet(1, 0), Var::jet(1, 1)];
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_expr(&mut rng, &vars);
            let b = random_expr(&mut rng, &vars);
            for v in &vars {
                let lhs = a.mul(&b).partial(v);
                let rhs = a.partial(v).mul(&b).add(&a.mul(&b.partial(v)));
                assert!(lhs.sub(&rhs).is_zero());
            }
        }
    }

    #[test]
    fn substitution_composes() {
        // substitute y -> x^2 into y^2 + y
        let y = Var::jet(1, 0);
        let e = Expr::var(y.clone()).pow(2).unwrap().add(&Expr::var(y.clone()));
        let mut map = BTreeMap::new();
        map.insert(y, Expr::x().pow(2).unwrap());
        let r = e.substitute(&map).unwrap();
        let expected = Expr::x().pow(4).unwrap().add(&Expr::x().pow(2).unwrap());
        assert_eq!(r, expected);
    }

    #[test]
    fn zero_verdict_flags_aux() {
        let rho = Expr::aux("rho");
        let v = rho.sub(&rho).zero_verdict();
        assert!(v.is_zero && !v.syntactic_only);
        let w = rho.mul(&Expr::x()).zero_verdict();
        assert!(!w.is_zero && w.syntactic_only);
    }
}
