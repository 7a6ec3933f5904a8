//! ODE systems as jet-space objects: total derivative, prolongation of point
//! transformations, and pullback of equations.
//!
//! A system of m equations of order k+1 is kept in solved form
//! `y^i_{k+1} = f^i(x, y^j_r)` with `r <= k`. Point maps act on the
//! `(x, y^1, ..., y^m)` space and are prolonged to jets by the chain rule;
//! pulling back an equation produces the system whose prolonged solutions map
//! to solutions of the target.

use crate::expr::{parse_expr, Expr, ExprError, ParseError, Var};
use crate::matrix::MatrixExpr;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum JetError {
    #[error("system must have m >= 1 components, got {0}")]
    BadSize(usize),
    #[error("system order must be >= 2, got {0}")]
    BadOrder(usize),
    #[error("expected {expected} right-hand sides, got {got}")]
    RhsCount { expected: usize, got: usize },
    #[error("right-hand side mentions jet variable {var} of order > {max}")]
    OrderTooHigh { var: String, max: u32 },
    #[error("expression mentions top-order jet variable {0}")]
    TopOrderVar(String),
    #[error("point map component uses {0}, only x and y^i_0 are allowed")]
    NotPointFunction(String),
    #[error("point map Jacobian is identically singular")]
    SingularJacobian,
    #[error("map collapses the independent variable: D(x-component) = 0")]
    CollapsedIndependent,
    #[error("top-order Jacobian of the prolonged map is singular; not a point transformation near generic points")]
    SingularTopJacobian,
    #[error("component count mismatch: map has m = {map_m}, system has m = {sys_m}")]
    SizeMismatch { map_m: usize, sys_m: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Arith(#[from] ExprError),
}

/// System `y^i_{k+1} = f^i(x, y^j_r)`, `r <= k`, in solved form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OdeSystem {
    m: usize,
    order: usize,
    rhs: Vec<Expr>,
}

/// JSON wire format for a system file.
#[derive(Serialize, Deserialize)]
pub struct SystemFile {
    pub m: usize,
    pub order: usize,
    pub rhs: Vec<String>,
}

impl OdeSystem {
    pub fn new(m: usize, order: usize, rhs: Vec<Expr>) -> Result<OdeSystem, JetError> {
        if m == 0 {
            return Err(JetError::BadSize(m));
        }
        if order < 2 {
            return Err(JetError::BadOrder(order));
        }
        if rhs.len() != m {
            return Err(JetError::RhsCount { expected: m, got: rhs.len() });
        }
        let k = (order - 1) as u32;
        for f in &rhs {
            for v in f.vars() {
                if let Var::Jet { comp, ord } = &v {
                    if *comp as usize > m || *ord > k {
                        return Err(JetError::OrderTooHigh { var: v.to_string(), max: k });
                    }
                }
            }
        }
        Ok(OdeSystem { m, order, rhs })
    }

    /// The trivial system `y^(k+1) = 0`.
    pub fn trivial(m: usize, order: usize) -> OdeSystem {
        OdeSystem::new(m, order, vec![Expr::zero(); m]).expect("trivial system is valid")
    }

    pub fn from_file(file: &SystemFile) -> Result<OdeSystem, JetError> {
        let k = file.order.saturating_sub(1) as u32;
        let rhs = file
            .rhs
            .iter()
            .map(|s| parse_expr(s, file.m as u32, k))
            .collect::<Result<Vec<_>, _>>()?;
        OdeSystem::new(file.m, file.order, rhs)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            m: self.m,
            order: self.order,
            rhs: self.rhs.iter().map(Expr::to_string).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Order of the system, k+1.
    pub fn order(&self) -> usize {
        self.order
    }

    /// k = order - 1, the highest jet order appearing in the right-hand side.
    pub fn k(&self) -> usize {
        self.order - 1
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.iter().all(Expr::is_zero)
    }

    /// Total derivative along solutions:
    /// `D(e) = e_x + sum_{r<k} y^i_{r+1} e_{y^i_r} + sum_i f^i e_{y^i_k}`.
    /// Rejects expressions that already mention the top order k+1.
    pub fn total_derivative(&self, e: &Expr) -> Result<Expr, JetError> {
        let k = self.k() as u32;
        for v in e.vars() {
            if let Var::Jet { ord, .. } = v {
                if ord > k {
                    return Err(JetError::TopOrderVar(v.to_string()));
                }
            }
        }
        let mut out = e.partial(&Var::X);
        for i in 1..=self.m as u32 {
            for r in 0..k {
                let d = e.partial(&Var::jet(i, r));
                if !d.is_zero() {
                    out = out.add(&Expr::jet(i, r + 1).mul(&d));
                }
            }
            let d = e.partial(&Var::jet(i, k));
            if !d.is_zero() {
                out = out.add(&self.rhs[(i - 1) as usize].mul(&d));
            }
        }
        Ok(out)
    }

    /// Jacobian matrices `A_r = (d f^i / d y^j_r)` of the right-hand side,
    /// one per jet order `r = 0..=k`.
    pub fn jacobians(&self) -> Vec<MatrixExpr> {
        (0..=self.k() as u32)
            .map(|r| {
                MatrixExpr::from_fn(self.m, |i, j| {
                    self.rhs[i].partial(&Var::jet(j as u32 + 1, r))
                })
            })
            .collect()
    }
}

/// Total derivative on the free jet space (no equation imposed): jet
/// coordinates of every order are treated as independent.
pub fn free_total_derivative(e: &Expr) -> Expr {
    let mut out = e.partial(&Var::X);
    for v in e.vars() {
        if let Var::Jet { comp, ord } = v {
            let d = e.partial(&Var::jet(comp, ord));
            if !d.is_zero() {
                out = out.add(&Expr::jet(comp, ord + 1).mul(&d));
            }
        }
    }
    out
}

/// Point transformation `(x, y) -> (target_x, target_y)` of the base space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointMap {
    m: usize,
    target_x: Expr,
    target_y: Vec<Expr>,
}

/// JSON wire format for a point-map file.
#[derive(Serialize, Deserialize)]
pub struct MapFile {
    pub m: usize,
    pub x: String,
    pub y: Vec<String>,
}

impl PointMap {
    pub fn new(m: usize, target_x: Expr, target_y: Vec<Expr>) -> Result<PointMap, JetError> {
        if m == 0 {
            return Err(JetError::BadSize(m));
        }
        if target_y.len() != m {
            return Err(JetError::RhsCount { expected: m, got: target_y.len() });
        }
        for e in std::iter::once(&target_x).chain(&target_y) {
            for v in e.vars() {
                match &v {
                    Var::X | Var::Aux(_) => {}
                    Var::Jet { comp, ord } => {
                        if *ord != 0 || *comp as usize > m {
                            return Err(JetError::NotPointFunction(v.to_string()));
                        }
                    }
                }
            }
        }
        let map = PointMap { m, target_x, target_y };
        if map.jacobian().det().is_zero() {
            return Err(JetError::SingularJacobian);
        }
        Ok(map)
    }

    pub fn identity(m: usize) -> PointMap {
        PointMap::new(
            m,
            Expr::x(),
            (1..=m as u32).map(|i| Expr::jet(i, 0)).collect(),
        )
        .expect("identity map is valid")
    }

    pub fn from_file(file: &MapFile) -> Result<PointMap, JetError> {
        let x = parse_expr(&file.x, file.m as u32, 0)?;
        let y = file
            .y
            .iter()
            .map(|s| parse_expr(s, file.m as u32, 0))
            .collect::<Result<Vec<_>, _>>()?;
        PointMap::new(file.m, x, y)
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            m: self.m,
            x: self.target_x.to_string(),
            y: self.target_y.iter().map(Expr::to_string).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn target_x(&self) -> &Expr {
        &self.target_x
    }

    pub fn target_y(&self) -> &[Expr] {
        &self.target_y
    }

    /// Base Jacobian of `(target_x, target_y)` in `(x, y^1_0, ..., y^m_0)`.
    fn jacobian(&self) -> MatrixExpr {
        let n = self.m + 1;
        let var = |j: usize| {
            if j == 0 {
                Var::X
            } else {
                Var::jet(j as u32, 0)
            }
        };
        MatrixExpr::from_fn(n, |i, j| {
            let component = if i == 0 { &self.target_x } else { &self.target_y[i - 1] };
            component.partial(&var(j))
        })
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &PointMap) -> Result<PointMap, JetError> {
        assert_eq!(self.m, other.m);
        let mut map = BTreeMap::new();
        map.insert(Var::X, other.target_x.clone());
        for (i, y) in other.target_y.iter().enumerate() {
            map.insert(Var::jet(i as u32 + 1, 0), y.clone());
        }
        let x = self.target_x.substitute(&map)?;
        let y = self
            .target_y
            .iter()
            .map(|e| e.substitute(&map))
            .collect::<Result<Vec<_>, _>>()?;
        PointMap::new(self.m, x, y)
    }
}

/// Derivation used while prolonging: either the free jet space or the total
/// derivative of a concrete source system.
#[derive(Clone, Copy)]
pub enum ProlongContext<'a> {
    Free,
    System(&'a OdeSystem),
}

impl ProlongContext<'_> {
    fn derive(&self, e: &Expr) -> Result<Expr, JetError> {
        match self {
            ProlongContext::Free => Ok(free_total_derivative(e)),
            ProlongContext::System(sys) => sys.total_derivative(e),
        }
    }
}

/// Prolong a point map to jets: returns `ybar^i_s` for `s = 0..=up_to`,
/// computed by `ybar^i_{s+1} = D(ybar^i_s) / D(target_x)`.
pub fn prolong(
    map: &PointMap,
    ctx: ProlongContext<'_>,
    up_to: usize,
) -> Result<Vec<Vec<Expr>>, JetError> {
    let dx = ctx.derive(map.target_x())?;
    if dx.is_zero() {
        return Err(JetError::CollapsedIndependent);
    }
    let mut levels = vec![map.target_y().to_vec()];
    for _ in 0..up_to {
        let prev = levels.last().unwrap();
        let next = prev
            .iter()
            .map(|e| ctx.derive(e)?.div(&dx).map_err(JetError::from))
            .collect::<Result<Vec<_>, _>>()?;
        levels.push(next);
    }
    Ok(levels)
}

/// Pull back `target` along `map`: the system in source coordinates whose
/// prolonged solutions map to solutions of `target`.
///
/// Writing `ybar^i_{k+1} = fbar^i(...)`, the unknown source right-hand side
/// enters linearly through the total derivative; the resulting m-by-m linear
/// system is solved by adjugate/determinant.
pub fn pullback(map: &PointMap, target: &OdeSystem) -> Result<OdeSystem, JetError> {
    if map.m() != target.m() {
        return Err(JetError::SizeMismatch { map_m: map.m(), sys_m: target.m() });
    }
    let m = target.m();
    let k = target.k();

    let levels = prolong(map, ProlongContext::Free, k)?;
    let dx = free_total_derivative(map.target_x());

    // Top-order Jacobian M^i_j = d(ybar^i_k)/d(y^j_k).
    let top = MatrixExpr::from_fn(m, |i, j| levels[k][i].partial(&Var::jet(j as u32 + 1, k as u32)));
    if top.det().is_zero() {
        return Err(JetError::SingularTopJacobian);
    }

    // fbar composed with the prolonged map.
    let mut subst = BTreeMap::new();
    subst.insert(Var::X, map.target_x().clone());
    for s in 0..=k {
        for i in 0..m {
            subst.insert(Var::jet(i as u32 + 1, s as u32), levels[s][i].clone());
        }
    }
    let fbar: Vec<Expr> = target
        .rhs()
        .iter()
        .map(|f| f.substitute(&subst))
        .collect::<Result<_, _>>()?;

    // D(ybar^i_k) = D_trunc(ybar^i_k) + sum_j M^i_j y^j_{k+1}; on the source
    // equation y^j_{k+1} = F^j this must equal fbar^i * D(target_x).
    let b: Vec<Expr> = (0..m)
        .map(|i| {
            let mut trunc = levels[k][i].partial(&Var::X);
            for v in levels[k][i].vars() {
                if let Var::Jet { comp, ord } = v {
                    if (ord as usize) < k {
                        let d = levels[k][i].partial(&Var::jet(comp, ord));
                        trunc = trunc.add(&Expr::jet(comp, ord + 1).mul(&d));
                    }
                }
            }
            fbar[i].mul(&dx).sub(&trunc)
        })
        .collect();

    let rhs = top.solve_vec(&b)?;
    OdeSystem::new(m, target.order(), rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn scalar_sys(order: usize, f: Expr) -> OdeSystem {
        OdeSystem::new(1, order, vec![f]).unwrap()
    }

    #[test]
    fn total_derivative_basics() {
        let sys = scalar_sys(3, Expr::jet(1, 0));
        // D(y) = y'
        assert_eq!(sys.total_derivative(&Expr::jet(1, 0)).unwrap(), Expr::jet(1, 1));
        // D(y_k) = f
        assert_eq!(sys.total_derivative(&Expr::jet(1, 2)).unwrap(), Expr::jet(1, 0));
        // Leibniz: D(x*y) = y + x*y'
        let e = Expr::x().mul(&Expr::jet(1, 0));
        let expected = Expr::jet(1, 0).add(&Expr::x().mul(&Expr::jet(1, 1)));
        assert_eq!(sys.total_derivative(&e).unwrap(), expected);
        // top-order variable rejected
        assert!(sys.total_derivative(&Expr::jet(1, 3)).is_err());
    }

    #[test]
    fn prolong_shift_by_x_squared() {
        // map (x, y + x^2): ybar_1 = y' + 2x, ybar_2 = y'' + 2
        let map = PointMap::new(
            1,
            Expr::x(),
            vec![Expr::jet(1, 0).add(&Expr::x().pow(2).unwrap())],
        )
        .unwrap();
        let levels = prolong(&map, ProlongContext::Free, 2).unwrap();
        assert_eq!(
            levels[1][0],
            Expr::jet(1, 1).add(&Expr::x().scale(2, 1))
        );
        assert_eq!(levels[2][0], Expr::jet(1, 2).add(&Expr::from_int(2)));
    }

    #[test]
    fn prolong_identity_and_swap() {
        let id = PointMap::identity(1);
        let levels = prolong(&id, ProlongContext::Free, 3).unwrap();
        for (s, level) in levels.iter().enumerate() {
            assert_eq!(level[0], Expr::jet(1, s as u32));
        }

        let swap = PointMap::new(1, Expr::jet(1, 0), vec![Expr::x()]).unwrap();
        let levels = prolong(&swap, ProlongContext::Free, 1).unwrap();
        assert_eq!(levels[1][0], Expr::one().div(&Expr::jet(1, 1)).unwrap());
    }

    #[test]
    fn pullback_examples() {
        // (x, y + x^2) applied to y'' = 0 gives y'' = -2
        let map = PointMap::new(
            1,
            Expr::x(),
            vec![Expr::jet(1, 0).add(&Expr::x().pow(2).unwrap())],
        )
        .unwrap();
        let pulled = pullback(&map, &OdeSystem::trivial(1, 2)).unwrap();
        assert_eq!(pulled.rhs()[0], Expr::from_int(-2));

        // identity fixes any system
        let sys = scalar_sys(2, Expr::jet(1, 1).pow(2).unwrap());
        let same = pullback(&PointMap::identity(1), &sys).unwrap();
        assert_eq!(same, sys);

        // the x <-> y swap fixes y'' = 0
        let swap = PointMap::new(1, Expr::jet(1, 0), vec![Expr::x()]).unwrap();
        let pulled = pullback(&swap, &OdeSystem::trivial(1, 2)).unwrap();
        assert!(pulled.rhs()[0].is_zero());
    }

    #[test]
    fn swap_pullback_order3() {
        // y''' = 0 under (y, x) becomes y''' = 3 (y'')^2 / y'
        let swap = PointMap::new(1, Expr::jet(1, 0), vec![Expr::x()]).unwrap();
        let pulled = pullback(&swap, &OdeSystem::trivial(1, 3)).unwrap();
        let expected = Expr::jet(1, 2)
            .pow(2)
            .unwrap()
            .scale(3, 1)
            .div(&Expr::jet(1, 1))
            .unwrap();
        assert_eq!(pulled.rhs()[0], expected);
    }

    #[test]
    fn collapsed_independent_variable() {
        // x-component constant in x and y: rejected by the Jacobian check
        let err = PointMap::new(1, Expr::one(), vec![Expr::jet(1, 0)]).unwrap_err();
        assert!(matches!(err, JetError::SingularJacobian));
    }

    fn random_poly_map(rng: &mut StdRng, m: usize) -> PointMap {
        loop {
            let mut comps = Vec::new();
            for _ in 0..=m {
                let mut e = Expr::zero();
                for _ in 0..rng.gen_range(1..3) {
                    let c = rng.gen_range(-2i64..=2);
                    let mut t = Expr::from_int(if c == 0 { 1 } else { c });
                    for _ in 0..rng.gen_range(0..2) {
                        let pick = rng.gen_range(0..=m as u32);
                        let v = if pick == 0 { Expr::x() } else { Expr::jet(pick, 0) };
                        t = t.mul(&v);
                    }
                    e = e.add(&t);
                }
                comps.push(e);
            }
            // keep the base map near the identity so it stays invertible
            let x = Expr::x().add(&comps[0].pow(2).unwrap().scale(1, 7));
            let y: Vec<Expr> = (1..=m)
                .map(|i| Expr::jet(i as u32, 0).add(&comps[i].pow(2).unwrap().scale(1, 5)))
                .collect();
            if let Ok(map) = PointMap::new(m, x, y) {
                return map;
            }
        }
    }

    #[test]
    fn pullback_composes() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..3 {
            let phi = random_poly_map(&mut rng, 1);
            let psi = random_poly_map(&mut rng, 1);
            let target = OdeSystem::trivial(1, 2);
            let via_two = pullback(&phi, &pullback(&psi, &target).unwrap()).unwrap();
            let composed = psi.compose(&phi).unwrap();
            let via_one = pullback(&composed, &target).unwrap();
            assert_eq!(via_two, via_one);
        }
    }

    #[test]
    fn total_derivative_partial_commutator() {
        // D(e_{y_r}) - (De)_{y_r} = -e_{y_{r-1}} - sum_j f^j_{y_r} e_{y^j_k}, r >= 1
        let mut rng = StdRng::seed_from_u64(23);
        let sys = OdeSystem::new(
            2,
            3,
            vec![
                Expr::jet(1, 2).mul(&Expr::jet(2, 1)).add(&Expr::x()),
                Expr::jet(2, 2).pow(2).unwrap(),
            ],
        )
        .unwrap();
        let k = sys.k() as u32;
        for _ in 0..20 {
            let mut e = Expr::zero();
            for _ in 0..3 {
                let mut t = Expr::from_int(rng.gen_range(-3i64..=3));
                for _ in 0..rng.gen_range(1..3) {
                    let comp = rng.gen_range(1..=2);
                    let ord = rng.gen_range(0..=k);
                    t = t.mul(&Expr::jet(comp, ord));
                }
                e = e.add(&t);
            }
            for comp in 1..=2u32 {
                for r in 1..=k {
                    let v = Var::jet(comp, r);
                    let lhs = sys
                        .total_derivative(&e.partial(&v))
                        .unwrap()
                        .sub(&sys.total_derivative(&e).unwrap().partial(&v));
                    let mut rhs = e.partial(&Var::jet(comp, r - 1)).neg();
                    for j in 1..=2u32 {
                        let fj = &sys.rhs()[(j - 1) as usize];
                        rhs = rhs.sub(&fj.partial(&v).mul(&e.partial(&Var::jet(j, k))));
                    }
                    assert!(lhs.sub(&rhs).is_zero());
                }
            }
        }
    }
}
