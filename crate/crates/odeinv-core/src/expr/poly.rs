//! Expanded multivariate polynomials over arbitrary-precision integers.
//!
//! Terms are kept sorted in graded lexicographic order (leading term first)
//! with the global variable order `x < y1_0 < y1_1 < ... < y2_0 < ... < aux
//! (alphabetical)`. This makes the representation canonical: two polynomials
//! are equal as functions iff they are structurally equal.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

/// A single indeterminate: the independent variable, a jet coordinate
/// `y<comp>_<ord>`, or a named auxiliary symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// The independent variable `x`.
    X,
    /// Jet coordinate `y^comp_ord` with 1-based component index.
    Jet { comp: u32, ord: u32 },
    /// Auxiliary formal symbol, ordered alphabetically after all jets.
    Aux(Arc<str>),
}

impl Var {
    pub fn jet(comp: u32, ord: u32) -> Var {
        Var::Jet { comp, ord }
    }

    pub fn aux(name: &str) -> Var {
        Var::Aux(Arc::from(name))
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, Var::Aux(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Jet { comp, ord } => write!(f, "y{comp}_{ord}"),
            Var::Aux(name) => write!(f, "{name}"),
        }
    }
}

/// Degree cap for polynomial products, settable via `ODEINV_MAX_DEGREE`.
/// Zero means unlimited.
static MAX_DEGREE: AtomicU64 = AtomicU64::new(0);

pub fn set_max_degree(cap: u64) {
    MAX_DEGREE.store(cap, AtomicOrdering::SeqCst);
}

/// Panic payload used to unwind out of a runaway expansion; the CLI converts
/// it into exit code 4.
#[derive(Debug)]
pub struct DegreeCapExceeded {
    pub degree: u64,
    pub cap: u64,
}

fn check_degree_cap(degree: u64) {
    let cap = MAX_DEGREE.load(AtomicOrdering::SeqCst);
    if cap != 0 && degree > cap {
        std::panic::panic_any(DegreeCapExceeded { degree, cap });
    }
}

/// A monomial: sorted list of `(variable, exponent)` with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono {
    factors: Vec<(Var, u32)>,
}

impl Mono {
    pub fn one() -> Mono {
        Mono { factors: Vec::new() }
    }

    pub fn var(v: Var) -> Mono {
        Mono { factors: vec![(v, 1)] }
    }

    pub fn from_factors(mut factors: Vec<(Var, u32)>) -> Mono {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Mono { factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.factors
            .iter()
            .find(|(w, _)| w == v)
            .map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            match self.factors[i].0.cmp(&other.factors[j].0) {
                Ordering::Less => {
                    out.push(self.factors[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.factors[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.factors[i].0.clone(), self.factors[i].1 + other.factors[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Mono { factors: out }
    }

    /// Exact monomial quotient, `None` if some exponent would go negative.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for (v, e) in &self.factors {
            let mut e = *e;
            while j < other.factors.len() && other.factors[j].0 < *v {
                return None; // divisor has a variable we lack
            }
            if j < other.factors.len() && other.factors[j].0 == *v {
                if other.factors[j].1 > e {
                    return None;
                }
                e -= other.factors[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((v.clone(), e));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Mono { factors: out })
    }

    /// Variable-wise minimum, the gcd of two monomials.
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        let mut j = 0;
        for (v, e) in &self.factors {
            while j < other.factors.len() && other.factors[j].0 < *v {
                j += 1;
            }
            if j < other.factors.len() && other.factors[j].0 == *v {
                out.push((v.clone(), (*e).min(other.factors[j].1)));
            }
        }
        Mono { factors: out }
    }
}

/// Graded lexicographic order: total degree first, then earlier variables
/// (under the global `Var` order) with higher exponents compare larger.
impl Ord for Mono {
    fn cmp(&self, other: &Mono) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            match self.factors[i].0.cmp(&other.factors[j].0) {
                // We own the earliest differing variable, so we are lex-larger.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match self.factors[i].1.cmp(&other.factors[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        // Equal total degree with one side exhausted means both exhausted.
        debug_assert!(i == self.factors.len() && j == other.factors.len());
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Mono) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Expanded polynomial: terms sorted by descending monomial order, nonzero
/// coefficients only. The empty term list is the zero polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Mono, BigInt)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::from_int(BigInt::one())
    }

    pub fn from_int(c: BigInt) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::one(), c)] }
        }
    }

    pub fn from_i64(c: i64) -> Poly {
        Poly::from_int(BigInt::from(c))
    }

    pub fn var(v: Var) -> Poly {
        Poly { terms: vec![(Mono::var(v), BigInt::one())] }
    }

    pub fn from_terms(terms: Vec<(Mono, BigInt)>) -> Poly {
        let mut map: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            if !c.is_zero() {
                let entry = map.entry(m).or_insert_with(BigInt::zero);
                *entry += c;
            }
        }
        Poly::from_map(map)
    }

    fn from_map(map: BTreeMap<Mono, BigInt>) -> Poly {
        let terms: Vec<_> = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Leading term under the graded lexicographic order.
    pub fn leading(&self) -> Option<&(Mono, BigInt)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.factors() {
                out.insert(v.clone());
            }
        }
        out
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        check_degree_cap(self.total_degree() + other.total_degree());
        let mut map: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                let entry = map.entry(m).or_insert_with(BigInt::zero);
                *entry += c;
            }
        }
        Poly::from_map(map)
    }

    pub fn mul_int(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(ma, c)| (ma.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to one variable.
    pub fn derivative(&self, v: &Var) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut factors: Vec<(Var, u32)> = m.factors().to_vec();
            for f in &mut factors {
                if &f.0 == v {
                    f.1 -= 1;
                }
            }
            terms.push((Mono::from_factors(factors), c * BigInt::from(e)));
        }
        Poly::from_terms(terms)
    }

    /// Positive gcd of all integer coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Common monomial factor of all terms.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Mono::one(),
        };
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_int_exact(&self, c: &BigInt) -> Poly {
        assert!(!c.is_zero());
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| {
                    let (q, r) = a.div_rem(c);
                    assert!(r.is_zero(), "non-exact integer division in polynomial");
                    (m.clone(), q)
                })
                .collect(),
        }
    }

    /// Exact multivariate division; `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (lm, lc) = other.leading().unwrap();
        let mut rem = self.clone();
        let mut quo: Vec<(Mono, BigInt)> = Vec::new();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm.div(lm)?;
            let (qc, r) = rc.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            let t = Poly { terms: vec![(qm.clone(), qc.clone())] };
            rem = rem.sub(&t.mul(other));
            quo.push((qm, qc));
        }
        Some(Poly::from_terms(quo))
    }

    /// Substitute integer value 1 for a variable (used for weight stripping).
    pub fn set_var_one(&self, v: &Var) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors: Vec<_> = m
                    .factors()
                    .iter()
                    .filter(|(w, _)| w != v)
                    .cloned()
                    .collect();
                (Mono { factors }, c.clone())
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Greatest common divisor via monomial/content extraction and a
    /// primitive pseudo-remainder sequence. Result has positive leading
    /// coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let g = gcd_inner(self, other);
        normalize_sign(g)
    }
}

fn normalize_sign(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let ca = a.content();
    let cb = b.content();
    let cg = ca.gcd(&cb);
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let pa = strip_mono(&a.div_int_exact(&ca), &ma);
    let pb = strip_mono(&b.div_int_exact(&cb), &mb);

    let base = Poly { terms: vec![(mg, cg)] };
    if pa.is_constant() || pb.is_constant() {
        return base;
    }
    let common: Vec<Var> = pa.vars().intersection(&pb.vars()).cloned().collect();
    let Some(main) = pick_main_var(&pa, &pb, &common) else {
        return base;
    };
    let core = univariate_gcd(&pa, &pb, &main);
    base.mul(&core)
}

fn strip_mono(p: &Poly, m: &Mono) -> Poly {
    if m.is_one() {
        return p.clone();
    }
    let terms = p
        .terms()
        .iter()
        .map(|(t, c)| (t.div(m).expect("monomial content must divide"), c.clone()))
        .collect();
    Poly::from_terms(terms)
}

/// Prefer the common variable with the smallest combined degree to keep the
/// remainder sequence short.
fn pick_main_var(a: &Poly, b: &Poly, common: &[Var]) -> Option<Var> {
    common
        .iter()
        .min_by_key(|v| u64::from(a.degree_in(v)) + u64::from(b.degree_in(v)))
        .cloned()
}

/// View of a polynomial as univariate in `main` with polynomial coefficients.
fn to_univariate(p: &Poly, main: &Var) -> Vec<Poly> {
    let deg = p.degree_in(main) as usize;
    let mut coeffs = vec![Poly::zero(); deg + 1];
    for (m, c) in p.terms() {
        let e = m.exponent(main) as usize;
        let rest: Vec<_> = m
            .factors()
            .iter()
            .filter(|(v, _)| v != main)
            .cloned()
            .collect();
        let t = Poly { terms: vec![(Mono { factors: rest }, c.clone())] };
        coeffs[e] = coeffs[e].add(&t);
    }
    coeffs
}

fn from_univariate(coeffs: &[Poly], main: &Var) -> Poly {
    let mut out = Poly::zero();
    for (e, c) in coeffs.iter().enumerate() {
        let m = Mono::from_factors(vec![(main.clone(), e as u32)]);
        out = out.add(&c.mul_mono(&m));
    }
    out
}

fn uni_degree(u: &[Poly]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// Content of a univariate view: gcd of the coefficient polynomials.
fn uni_content(u: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in u {
        if c.is_zero() {
            continue;
        }
        g = gcd_inner(&g, c);
        if g.is_one() {
            break;
        }
    }
    normalize_sign(g)
}

fn uni_div_exact(u: &[Poly], d: &Poly) -> Vec<Poly> {
    u.iter()
        .map(|c| c.div_exact(d).expect("content must divide coefficients"))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in the main variable.
fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let da = uni_degree(a).unwrap();
    let db = uni_degree(b).unwrap();
    assert!(da >= db);
    let lb = b[db].clone();
    let mut r: Vec<Poly> = a.to_vec();
    for i in (db..=da).rev() {
        let dr = match uni_degree(&r) {
            Some(d) => d,
            None => break,
        };
        if dr < db {
            break;
        }
        debug_assert!(dr <= i);
        if dr < i {
            continue;
        }
        let lead = r[dr].clone();
        // r := lb*r - lead*b*main^(dr-db)
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        for (j, bc) in b.iter().enumerate().take(db + 1) {
            if bc.is_zero() {
                continue;
            }
            let idx = j + dr - db;
            r[idx] = r[idx].sub(&lead.mul(bc));
        }
    }
    r
}

fn univariate_gcd(pa: &Poly, pb: &Poly, main: &Var) -> Poly {
    let ua = to_univariate(pa, main);
    let ub = to_univariate(pb, main);
    let cont_a = uni_content(&ua);
    let cont_b = uni_content(&ub);
    let cont_g = gcd_inner(&cont_a, &cont_b);

    let mut r0 = uni_div_exact(&ua, &cont_a);
    let mut r1 = uni_div_exact(&ub, &cont_b);
    if uni_degree(&r0) < uni_degree(&r1) {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        let rem = pseudo_rem(&r0, &r1);
        match uni_degree(&rem) {
            None => break,
            Some(_) => {
                let c = uni_content(&rem);
                let prim = uni_div_exact(&rem, &c);
                r0 = r1;
                r1 = prim;
            }
        }
    }
    let c1 = uni_content(&r1);
    let prim = uni_div_exact(&r1, &c1);
    normalize_sign(cont_g.mul(&from_univariate(&prim, main)))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                for (i, (v, e)) in m.factors().iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if *e == 1 {
                        write!(f, "{v}")?;
                    } else {
                        write!(f, "{v}^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::X)
    }

    fn y(c: u32, o: u32) -> Poly {
        Poly::var(Var::jet(c, o))
    }

    #[test]
    fn grlex_order() {
        let x2 = Mono::from_factors(vec![(Var::X, 2)]);
        let xy = Mono::from_factors(vec![(Var::X, 1), (Var::jet(1, 0), 1)]);
        let y2 = Mono::from_factors(vec![(Var::jet(1, 0), 2)]);
        let x1 = Mono::from_factors(vec![(Var::X, 1)]);
        assert!(x2 > xy);
        assert!(xy > y2);
        assert!(y2 > x1);
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let p = x().add(&Poly::one());
        let q = p.sub(&p);
        assert!(q.is_zero());
        let sq = p.mul(&p);
        let expanded = x().mul(&x()).add(&x().mul_int(&BigInt::from(2))).add(&Poly::one());
        assert_eq!(sq, expanded);
    }

    #[test]
    fn exact_division() {
        // (x^2 - 1) / (x - 1) = x + 1
        let num = x().mul(&x()).sub(&Poly::one());
        let den = x().sub(&Poly::one());
        let q = num.div_exact(&den).unwrap();
        assert_eq!(q, x().add(&Poly::one()));
        assert!(x().div_exact(&y(1, 0)).is_none());
    }

    #[test]
    fn derivative_leibniz() {
        let p = y(1, 1).pow(3);
        let d = p.derivative(&Var::jet(1, 1));
        assert_eq!(d, y(1, 1).mul(&y(1, 1)).mul_int(&BigInt::from(3)));
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((x+1)*(y+2), (x+1)*y) = x+1
        let a = x().add(&Poly::one()).mul(&y(1, 0).add(&Poly::from_i64(2)));
        let b = x().add(&Poly::one()).mul(&y(1, 0));
        let g = a.gcd(&b);
        assert_eq!(g, x().add(&Poly::one()));
    }

    #[test]
    fn gcd_with_contents() {
        // gcd(6x^2y, 4xy^2) = 2xy
        let a = x().pow(2).mul(&y(1, 0)).mul_int(&BigInt::from(6));
        let b = x().mul(&y(1, 0).pow(2)).mul_int(&BigInt::from(4));
        let g = a.gcd(&b);
        assert_eq!(g, x().mul(&y(1, 0)).mul_int(&BigInt::from(2)));
    }

    #[test]
    fn gcd_of_coprime() {
        let a = x().add(&y(1, 0));
        let b = x().sub(&y(1, 0));
        assert!(a.gcd(&b).is_one());
    }
}
