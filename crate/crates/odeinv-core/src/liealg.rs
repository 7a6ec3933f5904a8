//! The graded symmetry algebra g(k, m) of the trivial system of m equations
//! of order k+1, with exact rational structure constants.
//!
//! g = (sl(2) x gl(m)) acting on the abelian ideal V = V_k (x) W, where V_k
//! is the (k+1)-dimensional irreducible sl(2)-module realized on monomials
//! `v^a = f2^(k-a) f1^a / a!` and W = R^m. Basis, grading and inner product:
//!
//! * basis order: `x, h, y`, then `e^i_j` lexicographically, then `v^a (x) e_i`
//!   by `(a, i)`;
//! * degrees: `deg y = 1`, `deg h = deg e^i_j = 0`, `deg x = -1`,
//!   `deg v^a (x) e_i = a - k - 1`;
//! * the basis is orthogonal with `(x,x) = (y,y) = 1`, `(h,h) = 2`,
//!   `(e^i_j, e^i_j) = 1`, `(v^a (x) e_i, v^a (x) e_i) = (k-a)!/a!`.

use crate::linop::factorial;
use crate::qlinalg::QMatrix;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Tagged basis element of g(k, m).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum BasisElt {
    X,
    H,
    Y,
    /// `e^i_j`, the endomorphism of W sending `e_i` to `e_j`; 0-based.
    E { i: usize, j: usize },
    /// `v^a (x) e_i`, `0 <= a <= k`, 0-based component.
    V { a: usize, i: usize },
}

impl fmt::Display for BasisElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElt::X => write!(f, "x"),
            BasisElt::H => write!(f, "h"),
            BasisElt::Y => write!(f, "y"),
            BasisElt::E { i, j } => write!(f, "e^{}_{}", i + 1, j + 1),
            BasisElt::V { a, i } => write!(f, "v^{}*e_{}", a, i + 1),
        }
    }
}

/// Sparse vector over the basis.
pub type SparseVec = Vec<(usize, BigRational)>;

pub struct GradedLieAlgebra {
    pub k: usize,
    pub m: usize,
    basis: Vec<BasisElt>,
    degree: Vec<i64>,
    gram: Vec<BigRational>,
    /// brackets[a][b] for a < b; antisymmetry fills the rest.
    table: Vec<Vec<SparseVec>>,
}

/// Construct g(k, m). Valid for any k >= 1, m >= 1; the theorems downstream
/// impose their own (k, m) hypotheses.
pub fn build_g(k: usize, m: usize) -> GradedLieAlgebra {
    assert!(k >= 1 && m >= 1);
    let mut basis = vec![BasisElt::X, BasisElt::H, BasisElt::Y];
    for i in 0..m {
        for j in 0..m {
            basis.push(BasisElt::E { i, j });
        }
    }
    for a in 0..=k {
        for i in 0..m {
            basis.push(BasisElt::V { a, i });
        }
    }
    let degree: Vec<i64> = basis
        .iter()
        .map(|b| match b {
            BasisElt::X => -1,
            BasisElt::H | BasisElt::E { .. } => 0,
            BasisElt::Y => 1,
            BasisElt::V { a, .. } => *a as i64 - k as i64 - 1,
        })
        .collect();
    let gram: Vec<BigRational> = basis
        .iter()
        .map(|b| match b {
            BasisElt::X | BasisElt::Y | BasisElt::E { .. } => BigRational::one(),
            BasisElt::H => BigRational::from_integer(2.into()),
            BasisElt::V { a, .. } => BigRational::new(factorial(k - a), factorial(*a)),
        })
        .collect();

    let g = GradedLieAlgebra { k, m, basis, degree, gram, table: Vec::new() };
    let n = g.dim();
    let mut table = vec![vec![SparseVec::new(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            table[a][b] = bracket_pair(&g, g.basis[a], g.basis[b]);
        }
    }
    GradedLieAlgebra { table, ..g }
}

fn bracket_pair(g: &GradedLieAlgebra, a: BasisElt, b: BasisElt) -> SparseVec {
    use BasisElt::*;
    let k = g.k as i64;
    let one = BigRational::one;
    let int = |n: i64| BigRational::from_integer(n.into());
    match (a, b) {
        // sl(2): [x, y] = h, [h, x] = 2x, [h, y] = -2y
        (X, Y) => vec![(g.idx(H), one())],
        (X, H) => vec![(g.idx(X), int(-2))],
        (H, Y) => vec![(g.idx(Y), int(-2))],
        // gl(m): [e^i_j, e^p_q] = delta_{iq} e^p_j - delta_{jp} e^i_q
        (E { i, j }, E { i: p, j: q }) => {
            let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
            if i == q {
                *out.entry(g.idx(E { i: p, j })).or_insert_with(BigRational::zero) += one();
            }
            if j == p {
                *out.entry(g.idx(E { i, j: q })).or_insert_with(BigRational::zero) -= one();
            }
            out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        }
        // sl(2) and gl(m) commute
        (X, E { .. }) | (H, E { .. }) | (Y, E { .. }) => Vec::new(),
        // sl(2) on V: x lowers a, y raises with weight (k-a)(a+1), h scales
        (X, V { a, i }) => {
            if a == 0 {
                Vec::new()
            } else {
                vec![(g.idx(V { a: a - 1, i }), one())]
            }
        }
        (H, V { a, i }) => {
            let c = k - 2 * a as i64;
            if c == 0 {
                Vec::new()
            } else {
                vec![(g.idx(V { a, i }), int(c))]
            }
        }
        (Y, V { a, i }) => {
            if a == g.k {
                Vec::new()
            } else {
                let c = (k - a as i64) * (a as i64 + 1);
                vec![(g.idx(V { a: a + 1, i }), int(c))]
            }
        }
        // gl(m) on the W factor: e^i_j . e_s = delta_{is} e_j
        (E { i, j }, V { a, i: s }) => {
            if i == s {
                vec![(g.idx(V { a, i: j }), one())]
            } else {
                Vec::new()
            }
        }
        // V abelian
        (V { .. }, V { .. }) => Vec::new(),
        // remaining combinations are handled by antisymmetry of the caller
        _ => negate(bracket_pair(g, b, a)),
    }
}

fn negate(v: SparseVec) -> SparseVec {
    v.into_iter().map(|(i, c)| (i, -c)).collect()
}

impl GradedLieAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElt] {
        &self.basis
    }

    pub fn idx(&self, b: BasisElt) -> usize {
        match b {
            BasisElt::X => 0,
            BasisElt::H => 1,
            BasisElt::Y => 2,
            BasisElt::E { i, j } => 3 + i * self.m + j,
            BasisElt::V { a, i } => 3 + self.m * self.m + a * self.m + i,
        }
    }

    pub fn degree(&self, idx: usize) -> i64 {
        self.degree[idx]
    }

    pub fn gram(&self, idx: usize) -> &BigRational {
        &self.gram[idx]
    }

    /// Structure constants `[basis_a, basis_b]` as a sparse vector.
    pub fn bracket_basis(&self, a: usize, b: usize) -> SparseVec {
        use std::cmp::Ordering;
        match a.cmp(&b) {
            Ordering::Less => self.table[a][b].clone(),
            Ordering::Equal => Vec::new(),
            Ordering::Greater => negate(self.table[b][a].clone()),
        }
    }

    /// Bilinear extension of the bracket to dense coefficient vectors.
    pub fn bracket_vec(&self, u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim()];
        for (a, ca) in u.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in v.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                for (t, c) in self.bracket_basis(a, b) {
                    out[t] += ca * cb * c;
                }
            }
        }
        out
    }

    /// Adjoint action of a basis element as a dim x dim matrix.
    pub fn ad_matrix(&self, idx: usize) -> QMatrix {
        let n = self.dim();
        let mut out = QMatrix::zeros(n, n);
        for b in 0..n {
            for (t, c) in self.bracket_basis(idx, b) {
                out[(t, b)] = c;
            }
        }
        out
    }

    /// Indices of the negative part g_- = R x + V, in basis order.
    pub fn negative_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree[i] < 0).collect()
    }

    /// Indices of V.
    pub fn v_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| matches!(self.basis[i], BasisElt::V { .. }))
            .collect()
    }

    /// Indices of the reductive part a = sl(2) + gl(m).
    pub fn a_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                matches!(
                    self.basis[i],
                    BasisElt::X | BasisElt::H | BasisElt::Y | BasisElt::E { .. }
                )
            })
            .collect()
    }

    /// Action of a reductive basis element on V, as a matrix over the
    /// V-basis (size m(k+1)).
    pub fn action_on_v(&self, a_idx: usize) -> QMatrix {
        let v_idx = self.v_indices();
        let pos: BTreeMap<usize, usize> =
            v_idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut out = QMatrix::zeros(v_idx.len(), v_idx.len());
        for (col, &vi) in v_idx.iter().enumerate() {
            for (t, c) in self.bracket_basis(a_idx, vi) {
                out[(pos[&t], col)] = c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Expr, Var};
    use crate::qlinalg::qi;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// 2x2 matrix commutator oracle for the sl(2) block.
    fn sl2_matrix(b: BasisElt) -> [[i64; 2]; 2] {
        match b {
            BasisElt::X => [[0, 0], [1, 0]],
            BasisElt::Y => [[0, 1], [0, 0]],
            BasisElt::H => [[-1, 0], [0, 1]],
            _ => panic!("not sl(2)"),
        }
    }

    fn commutator2(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    out[i][j] += a[i][l] * b[l][j] - b[i][l] * a[l][j];
                }
            }
        }
        out
    }

    #[test]
    fn sl2_brackets_match_matrix_commutators() {
        let g = build_g(3, 2);
        let elts = [BasisElt::X, BasisElt::H, BasisElt::Y];
        for &a in &elts {
            for &b in &elts {
                let lhs = g.bracket_basis(g.idx(a), g.idx(b));
                let want = commutator2(sl2_matrix(a), sl2_matrix(b));
                // decompose want = alpha x + beta h + gamma y
                let (alpha, beta, gamma) = (want[1][0], want[1][1], want[0][1]);
                assert_eq!(want[0][0], -beta);
                let mut dense = vec![q(0); g.dim()];
                for (i, c) in lhs {
                    dense[i] = c;
                }
                assert_eq!(dense[g.idx(BasisElt::X)], q(alpha));
                assert_eq!(dense[g.idx(BasisElt::H)], q(beta));
                assert_eq!(dense[g.idx(BasisElt::Y)], q(gamma));
            }
        }
    }

    #[test]
    fn glm_brackets_match_operator_commutators() {
        // e^i_j acts on W by e_s -> delta_{is} e_j; compare with composition
        let m = 3;
        let g = build_g(2, m);
        let apply = |i: usize, j: usize, s: usize| -> Option<usize> {
            (i == s).then_some(j)
        };
        for i in 0..m {
            for j in 0..m {
                for p in 0..m {
                    for qq in 0..m {
                        // [e^i_j, e^p_q] acting on each e_s
                        for s in 0..m {
                            let first = apply(p, qq, s).and_then(|t| apply(i, j, t));
                            let second = apply(i, j, s).and_then(|t| apply(p, qq, t));
                            let mut want = vec![0i64; m];
                            if let Some(t) = first {
                                want[t] += 1;
                            }
                            if let Some(t) = second {
                                want[t] -= 1;
                            }
                            // evaluate the structure constants on v^0 (x) e_s
                            let br = g.bracket_basis(
                                g.idx(BasisElt::E { i, j }),
                                g.idx(BasisElt::E { i: p, j: qq }),
                            );
                            let mut got = vec![q(0); m];
                            for (t_idx, c) in br {
                                if let BasisElt::E { i: bi, j: bj } = g.basis()[t_idx] {
                                    if let Some(t) = apply(bi, bj, s) {
                                        got[t] += c.clone();
                                    }
                                } else {
                                    panic!("gl bracket left gl(m)");
                                }
                            }
                            for t in 0..m {
                                assert_eq!(got[t], q(want[t]));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sl2_action_on_v_matches_monomial_model() {
        // v^a = f2^(k-a) f1^a / a!; S in sl(2) acts as the derivation sending
        // f to S f. Compare structure constants against symbolic calculus.
        for (k, m) in [(3usize, 2usize), (4, 2), (5, 3)] {
            let g = build_g(k, m);
            let f1 = Expr::aux("f1");
            let f2 = Expr::aux("f2");
            let monomial = |a: usize| {
                f2.pow((k - a) as i64)
                    .unwrap()
                    .mul(&f1.pow(a as i64).unwrap())
                    .scale_q(&BigRational::new(1.into(), factorial(a)))
            };
            // S f1 and S f2 for the matrix [[m00,m01],[m10,m11]]: column action
            let act = |mat: [[i64; 2]; 2], p: &Expr| -> Expr {
                let sf1 = f1.scale(mat[0][0], 1).add(&f2.scale(mat[1][0], 1));
                let sf2 = f1.scale(mat[0][1], 1).add(&f2.scale(mat[1][1], 1));
                p.partial(&Var::aux("f1"))
                    .mul(&sf1)
                    .add(&p.partial(&Var::aux("f2")).mul(&sf2))
            };
            for s_elt in [BasisElt::X, BasisElt::Y, BasisElt::H] {
                for a in 0..=k {
                    let image = act(sl2_matrix(s_elt), &monomial(a));
                    // expected from the structure constants
                    let br = g.bracket_basis(g.idx(s_elt), g.idx(BasisElt::V { a, i: 0 }));
                    let mut expected = Expr::zero();
                    for (t, c) in br {
                        if let BasisElt::V { a: b, i: 0 } = g.basis()[t] {
                            expected = expected.add(&monomial(b).scale_q(&c));
                        } else {
                            panic!("sl(2) action left V");
                        }
                    }
                    assert!(
                        image.sub(&expected).is_zero(),
                        "mismatch for {s_elt:?} on v^{a}, k = {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn x_power_kills_v() {
        // iterating x from a = k reaches v^0 and then 0: x^(k+1) = 0 on V
        let g = build_g(3, 2);
        let mut vec = vec![q(0); g.dim()];
        vec[g.idx(BasisElt::V { a: 3, i: 1 })] = q(1);
        let mut x = vec![q(0); g.dim()];
        x[g.idx(BasisElt::X)] = q(1);
        let mut cur = vec;
        for _ in 0..=g.k {
            cur = g.bracket_vec(&x, &cur);
        }
        assert!(cur.iter().all(Zero::is_zero));
    }

    #[test]
    fn dims_and_examples() {
        let g = build_g(3, 2);
        assert_eq!(g.dim(), 3 + 4 + 8);
        assert_eq!(g.dim(), 15);

        // [h, v^0 (x) e_1] = k v^0 (x) e_1
        let br = g.bracket_basis(g.idx(BasisElt::H), g.idx(BasisElt::V { a: 0, i: 0 }));
        assert_eq!(br, vec![(g.idx(BasisElt::V { a: 0, i: 0 }), q(3))]);

        // V abelian
        let br = g.bracket_basis(
            g.idx(BasisElt::V { a: 1, i: 0 }),
            g.idx(BasisElt::V { a: 2, i: 1 }),
        );
        assert!(br.is_empty());

        // [e^1_2, e^2_1] = e^2_2 - e^1_1 under the e^i_j e_k = delta_{ik} e_j
        // convention
        let br = g.bracket_basis(
            g.idx(BasisElt::E { i: 0, j: 1 }),
            g.idx(BasisElt::E { i: 1, j: 0 }),
        );
        let mut dense = vec![q(0); g.dim()];
        for (i, c) in br {
            dense[i] = c;
        }
        assert_eq!(dense[g.idx(BasisElt::E { i: 1, j: 1 })], q(1));
        assert_eq!(dense[g.idx(BasisElt::E { i: 0, j: 0 })], q(-1));
    }

    #[test]
    fn jacobi_grading_and_metric_grid() {
        for (k, m) in [(1usize, 1usize), (2, 2), (3, 2), (4, 2), (3, 3), (5, 3)] {
            let g = build_g(k, m);
            let n = g.dim();
            // grading additivity on basis pairs
            for a in 0..n {
                for b in 0..n {
                    for (t, _) in g.bracket_basis(a, b) {
                        assert_eq!(g.degree(t), g.degree(a) + g.degree(b));
                    }
                }
            }
            // Jacobi identity on all basis triples
            for a in 0..n {
                let mut ua = vec![q(0); n];
                ua[a] = q(1);
                for b in a + 1..n {
                    let mut ub = vec![q(0); n];
                    ub[b] = q(1);
                    let ab = g.bracket_vec(&ua, &ub);
                    for c in b + 1..n {
                        let mut uc = vec![q(0); n];
                        uc[c] = q(1);
                        let bc = g.bracket_vec(&ub, &uc);
                        let ca = g.bracket_vec(&uc, &ua);
                        let mut total = g.bracket_vec(&ab, &uc);
                        let t2 = g.bracket_vec(&bc, &ua);
                        let t3 = g.bracket_vec(&ca, &ub);
                        for i in 0..n {
                            total[i] += &t2[i] + &t3[i];
                        }
                        assert!(
                            total.iter().all(Zero::is_zero),
                            "Jacobi fails at ({a},{b},{c}) for (k,m)=({k},{m})"
                        );
                    }
                }
            }
            // metric compatibility: (S u, v) = (u, S^t v) for S in the
            // reductive part, u, v in V, with transposes x <-> y, h -> h,
            // e^i_j -> e^j_i
            let transpose = |b: BasisElt| match b {
                BasisElt::X => BasisElt::Y,
                BasisElt::Y => BasisElt::X,
                BasisElt::H => BasisElt::H,
                BasisElt::E { i, j } => BasisElt::E { i: j, j: i },
                v => v,
            };
            for &s_idx in &g.a_indices() {
                let st_idx = g.idx(transpose(g.basis()[s_idx]));
                for &u in &g.v_indices() {
                    for &v in &g.v_indices() {
                        // (S u, v)
                        let su = g.bracket_basis(s_idx, u);
                        let lhs: BigRational = su
                            .iter()
                            .filter(|(t, _)| *t == v)
                            .map(|(t, c)| c * g.gram(*t))
                            .sum();
                        // (u, S^t v)
                        let stv = g.bracket_basis(st_idx, v);
                        let rhs: BigRational = stv
                            .iter()
                            .filter(|(t, _)| *t == u)
                            .map(|(t, c)| c * g.gram(*t))
                            .sum();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn ad_matrix_consistency() {
        let g = build_g(2, 2);
        let x_ad = g.ad_matrix(g.idx(BasisElt::X));
        // column of v^1 (x) e_0 maps to v^0 (x) e_0
        let col = g.idx(BasisElt::V { a: 1, i: 0 });
        let row = g.idx(BasisElt::V { a: 0, i: 0 });
        assert_eq!(x_ad[(row, col)], qi(1));
    }
}
