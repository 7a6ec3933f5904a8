//! The explicit per-order fundamental invariant sets and the
//! trivializability verdict.
//!
//! Classical subscript notation is used throughout for scalar equations:
//! subscript `i` is the partial derivative with respect to `y^(i)` and
//! subscript `x` is the total derivative, applied left to right.

use crate::convention::Convention;
use crate::expr::{Expr, Var};
use crate::jets::OdeSystem;
use crate::matrix::MatrixExpr;
use crate::qlinalg::{qi, QMatrix};
use crate::reduction::{self, ReductionError};
use num::rational::BigRational;
use num::Zero;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum InvariantError {
    #[error("operation needs m = {want_m} and order {want_order}, got m = {m}, order = {order}")]
    WrongShape { want_m: String, want_order: String, m: usize, order: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

fn shape_err(sys: &OdeSystem, want_m: &str, want_order: &str) -> InvariantError {
    InvariantError::WrongShape {
        want_m: want_m.to_string(),
        want_order: want_order.to_string(),
        m: sys.m(),
        order: sys.order(),
    }
}

/// A named invariant with a multi-indexed component array.
#[derive(Clone, Debug)]
pub struct InvariantTensor {
    pub name: String,
    pub m: usize,
    /// Number of upper indices (0 or 1 here).
    pub upper: usize,
    pub lower: usize,
    pub degree: i64,
    /// Displayed leading part of an invariant only defined modulo others;
    /// such entries never witness non-trivializability.
    pub partial_leading: bool,
    components: Vec<Expr>,
}

impl InvariantTensor {
    pub fn scalar(name: &str, degree: i64, value: Expr) -> InvariantTensor {
        InvariantTensor {
            name: name.to_string(),
            m: 1,
            upper: 0,
            lower: 0,
            degree,
            partial_leading: false,
            components: vec![value],
        }
    }

    pub fn from_fn(
        name: &str,
        m: usize,
        upper: usize,
        lower: usize,
        degree: i64,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> InvariantTensor {
        let rank = upper + lower;
        let len = m.pow(rank as u32);
        let mut components = Vec::with_capacity(len);
        let mut idx = vec![0usize; rank];
        for flat in 0..len {
            let mut rem = flat;
            for pos in (0..rank).rev() {
                idx[pos] = rem % m;
                rem /= m;
            }
            components.push(f(&idx));
        }
        InvariantTensor {
            name: name.to_string(),
            m,
            upper,
            lower,
            degree,
            partial_leading: false,
            components,
        }
    }

    pub fn from_matrix(name: &str, degree: i64, mat: &MatrixExpr) -> InvariantTensor {
        InvariantTensor::from_fn(name, mat.m, 1, 1, degree, |idx| mat[(idx[0], idx[1])].clone())
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.upper + self.lower);
        idx.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.components[self.flat(idx)]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn partial_flagged(mut self) -> InvariantTensor {
        self.partial_leading = true;
        self
    }

    /// 1-based multi-index label like `1;2,2` (upper; lower).
    pub fn index_label(&self, idx: &[usize]) -> String {
        let up: Vec<String> = idx[..self.upper].iter().map(|i| (i + 1).to_string()).collect();
        let lo: Vec<String> = idx[self.upper..].iter().map(|i| (i + 1).to_string()).collect();
        if self.upper + self.lower == 0 {
            String::new()
        } else if self.upper == 0 {
            lo.join(",")
        } else {
            format!("{};{}", up.join(","), lo.join(","))
        }
    }

    /// Nonzero components as `(label, value)` pairs.
    pub fn witnesses(&self) -> Vec<(String, Expr)> {
        let rank = self.upper + self.lower;
        let mut out = Vec::new();
        let mut idx = vec![0usize; rank];
        for (flat, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut rem = flat;
            for pos in (0..rank).rev() {
                idx[pos] = rem % self.m;
                rem /= self.m;
            }
            out.push((self.index_label(&idx), c.clone()));
        }
        out
    }

    pub fn has_aux(&self) -> bool {
        self.components.iter().any(Expr::has_aux)
    }
}

/// Trace-free part of a tensor with one upper index and `q` symmetric lower
/// indices: the correction `sum_t delta^i_{j_t} S_{...}` is found by solving
/// the exact linear system that kills all upper-lower contractions.
pub fn tfp_symmetric(t: &InvariantTensor) -> InvariantTensor {
    assert_eq!(t.upper, 1, "tfp needs an upper index to contract");
    let q = t.lower;
    let m = t.m;
    if q == 0 {
        return t.clone();
    }

    // symmetric multi-indices of length q-1 parametrize the correction
    let sym_idx = symmetric_indices(m, q - 1);
    let n = sym_idx.len();

    // system matrix: contraction of the correction applied to unit tensors
    let mut a = QMatrix::zeros(n, n);
    for (col, s_ix) in sym_idx.iter().enumerate() {
        for (row, c_ix) in sym_idx.iter().enumerate() {
            let mut val = BigRational::zero();
            for i in 0..m {
                let mut lower = vec![i];
                lower.extend_from_slice(c_ix);
                for tpos in 0..q {
                    if lower[tpos] != i {
                        continue;
                    }
                    let mut rest: Vec<usize> = lower
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != tpos)
                        .map(|(_, &v)| v)
                        .collect();
                    rest.sort_unstable();
                    if &rest == s_ix {
                        val += qi(1);
                    }
                }
            }
            a[(row, col)] += val;
        }
    }

    // contraction of T itself over (upper, first lower)
    let contractions: Vec<Expr> = sym_idx
        .iter()
        .map(|c_ix| {
            let mut s = Expr::zero();
            for i in 0..m {
                let mut idx = vec![i, i];
                idx.extend_from_slice(c_ix);
                s = s.add(t.get(&idx));
            }
            s
        })
        .collect();

    // S = A^{-1} c, exactly
    let mut a_inv_cols: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[j] = qi(1);
        let col = a.solve_any(&e).expect("trace-correction system is invertible");
        a_inv_cols.push(col);
    }
    let mut s_comps = vec![Expr::zero(); n];
    for (jpos, s) in s_comps.iter_mut().enumerate() {
        let mut acc = Expr::zero();
        for (l, c) in contractions.iter().enumerate() {
            let coeff = &a_inv_cols[l][jpos];
            if !coeff.is_zero() {
                acc = acc.add(&c.scale_q(coeff));
            }
        }
        *s = acc;
    }
    let s_of = |ix: &[usize]| -> &Expr {
        let mut sorted = ix.to_vec();
        sorted.sort_unstable();
        let pos = sym_idx.iter().position(|x| x == &sorted).unwrap();
        &s_comps[pos]
    };

    InvariantTensor::from_fn(&t.name, m, 1, q, t.degree, |idx| {
        let i = idx[0];
        let lower = &idx[1..];
        let mut val = t.get(idx).clone();
        for tpos in 0..q {
            if lower[tpos] != i {
                continue;
            }
            let rest: Vec<usize> = lower
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != tpos)
                .map(|(_, &v)| v)
                .collect();
            val = val.sub(s_of(&rest));
        }
        val
    })
}

fn symmetric_indices(m: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(
        m: usize,
        len: usize,
        start: usize,
        pos: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == len {
            out.push(cur.clone());
            return;
        }
        for v in start..m {
            cur[pos] = v;
            rec(m, len, v, pos + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    rec(m, len, 0, 0, &mut cur, &mut out);
    out
}

/// Scalar-equation helpers: subscripts are partials in `y^(i)`, `x` is the
/// total derivative.
struct Scalar<'a> {
    sys: &'a OdeSystem,
}

const DX: i32 = -1;

impl Scalar<'_> {
    fn f(&self) -> &Expr {
        &self.sys.rhs()[0]
    }

    fn d(&self, e: &Expr) -> Expr {
        self.sys.total_derivative(e).expect("below top order")
    }

    fn p(&self, e: &Expr, i: u32) -> Expr {
        e.partial(&Var::jet(1, i))
    }

    /// Apply subscripts left to right: nonnegative entries are jet orders,
    /// `DX` is the total derivative.
    fn sub(&self, subs: &[i32]) -> Expr {
        let mut e = self.f().clone();
        for &s in subs {
            e = if s < 0 { self.d(&e) } else { self.p(&e, s as u32) };
        }
        e
    }
}

/// Tresse invariants of a scalar second-order equation.
pub fn tresse(sys: &OdeSystem) -> Result<(InvariantTensor, InvariantTensor), InvariantError> {
    if sys.m() != 1 || sys.order() != 2 {
        return Err(shape_err(sys, "1", "2"));
    }
    let s = Scalar { sys };
    let i1 = s.sub(&[1, 1, 1, 1]);
    let i2 = s
        .sub(&[1, 1, DX, DX])
        .scale(1, 6)
        .sub(&s.sub(&[1]).mul(&s.sub(&[1, 1, DX])).scale(1, 6))
        .sub(&s.sub(&[0, 1, DX]).scale(2, 3))
        .add(&s.sub(&[1]).mul(&s.sub(&[0, 1])).scale(2, 3))
        .add(&s.sub(&[0, 0]))
        .sub(&s.sub(&[0]).mul(&s.sub(&[1, 1])).scale(1, 2));
    Ok((
        InvariantTensor::scalar("I1", 4, i1),
        InvariantTensor::scalar("I2", 4, i2),
    ))
}

/// Chern's fundamental pair for a scalar third-order equation under contact
/// transformations: `(f_2222, W)` with `W` the Wunschmann invariant.
pub fn chern_wunschmann(
    sys: &OdeSystem,
) -> Result<(InvariantTensor, InvariantTensor), InvariantError> {
    if sys.m() != 1 || sys.order() != 3 {
        return Err(shape_err(sys, "1", "3"));
    }
    let s = Scalar { sys };
    let i1 = s.sub(&[2, 2, 2, 2]);
    let w = wunschmann_expr(&s);
    Ok((
        InvariantTensor::scalar("I1", 4, i1),
        InvariantTensor::scalar("W", 3, w),
    ))
}

fn wunschmann_expr(s: &Scalar<'_>) -> Expr {
    s.sub(&[0])
        .neg()
        .sub(&s.sub(&[1]).mul(&s.sub(&[2])).scale(1, 3))
        .sub(&s.sub(&[2]).pow(3).unwrap().scale(2, 27))
        .add(&s.sub(&[1, DX]).scale(1, 2))
        .add(&s.sub(&[2]).mul(&s.sub(&[2, DX])).scale(1, 3))
        .sub(&s.sub(&[2, DX, DX]).scale(1, 6))
}

/// Cartan's four point-trivializability conditions for a scalar third-order
/// equation: `(W, f_222, f_22^2 + 6 f_122 + 2 f_2 f_222, C)`.
pub fn cartan_point3(sys: &OdeSystem) -> Result<[InvariantTensor; 4], InvariantError> {
    if sys.m() != 1 || sys.order() != 3 {
        return Err(shape_err(sys, "1", "3"));
    }
    let s = Scalar { sys };
    let w = wunschmann_expr(&s);
    let c2 = s.sub(&[2, 2, 2]);
    let c3 = s
        .sub(&[2, 2])
        .pow(2)
        .unwrap()
        .add(&s.sub(&[1, 2, 2]).scale(6, 1))
        .add(&s.sub(&[2]).mul(&s.sub(&[2, 2, 2])).scale(2, 1));
    // C uses W_2 = dW/dy'' of the already-computed Wunschmann invariant
    let w2 = w.partial(&Var::jet(1, 2));
    let c4 = s
        .sub(&[1, 1])
        .add(&w2.scale(2, 1))
        .sub(&s.sub(&[0, 2]).scale(2, 1))
        .add(&s.sub(&[2]).mul(&s.sub(&[1, 2])).scale(2, 3))
        .add(
            &s.sub(&[2, 2])
                .mul(
                    &s.sub(&[2, DX])
                        .scale(1, 3)
                        .sub(&s.sub(&[2]).pow(2).unwrap().scale(2, 9))
                        .sub(&s.sub(&[1])),
                )
                .scale(2, 1),
        );
    Ok([
        InvariantTensor::scalar("W", 3, w),
        InvariantTensor::scalar("f_222", 0, c2),
        InvariantTensor::scalar("f_22^2+6f_122+2f_2*f_222", 0, c3),
        InvariantTensor::scalar("C", 0, c4),
    ])
}

/// Fels invariants of a second-order system: `(W_2, I_3)`.
pub fn fels(sys: &OdeSystem) -> Result<(InvariantTensor, InvariantTensor), InvariantError> {
    if sys.order() != 2 {
        return Err(shape_err(sys, "any", "2"));
    }
    let w2 = InvariantTensor::from_matrix("W2", 2, &fels_w2_matrix(sys));
    let m = sys.m();
    let k = sys.k() as u32;
    let raw = InvariantTensor::from_fn("I3", m, 1, 3, 3, |idx| {
        sys.rhs()[idx[0]]
            .partial(&Var::jet(idx[1] as u32 + 1, k))
            .partial(&Var::jet(idx[2] as u32 + 1, k))
            .partial(&Var::jet(idx[3] as u32 + 1, k))
    });
    Ok((w2, tfp_symmetric(&raw)))
}

/// The Fels display `tfp(f_y - 1/2 D f_p + 1/4 f_p^2)` as a matrix.
pub fn fels_w2_matrix(sys: &OdeSystem) -> MatrixExpr {
    let jac = sys.jacobians();
    let (a0, a1) = (&jac[0], &jac[1]);
    let da1 = a1.map(|e| sys.total_derivative(e).expect("below top order"));
    a0.sub(&da1.scale_ratio(1, 2))
        .add(&a1.matmul(a1).scale_ratio(1, 4))
        .tfp()
}

/// The Medvedev fundamental set of a third-order system, plus the auxiliary
/// contractions used in its displays.
pub struct MedvedevSet {
    pub w2: InvariantTensor,
    pub w3: InvariantTensor,
    pub i2: InvariantTensor,
    pub i4: InvariantTensor,
    pub h_minus1: Vec<Expr>,
    pub h_x: Expr,
}

pub fn medvedev(sys: &OdeSystem) -> Result<MedvedevSet, InvariantError> {
    if sys.order() != 3 {
        return Err(shape_err(sys, "any", "3"));
    }
    let m = sys.m();
    let jac = sys.jacobians();
    let (a0, a1, a2) = (&jac[0], &jac[1], &jac[2]);
    let d = |mat: &MatrixExpr| mat.map(|e| sys.total_derivative(e).expect("below top order"));
    let ds = |e: &Expr| sys.total_derivative(e).expect("below top order");
    let q_var = |j: usize| Var::jet(j as u32 + 1, 2);
    let p_var = |j: usize| Var::jet(j as u32 + 1, 1);

    let da2 = d(a2);
    let core = a1.sub(&da2).add(&a2.matmul(a2).scale_ratio(1, 3));
    let w2 = core.tfp();
    let h_x = core.trace().scale(-1, 4 * m as i64);

    let w3_mat = a0
        .add(&a2.matmul(a1).scale_ratio(1, 3))
        .sub(&d(a1))
        .add(&d(&da2).scale_ratio(2, 3))
        .add(&a2.matmul(a2).matmul(a2).scale_ratio(2, 27))
        .sub(&a2.matmul(&da2).scale_ratio(4, 9))
        .sub(&da2.matmul(a2).scale_ratio(2, 9))
        .sub(&MatrixExpr::identity(m).scale(&ds(&h_x)).scale_ratio(2, 1));

    let i2_raw = InvariantTensor::from_fn("I2", m, 1, 2, 2, |idx| {
        sys.rhs()[idx[0]].partial(&q_var(idx[1])).partial(&q_var(idx[2]))
    });
    let i2 = tfp_symmetric(&i2_raw);

    let h_minus1: Vec<Expr> = (0..m)
        .map(|j| {
            let mut s = Expr::zero();
            for i in 0..m {
                s = s.add(&sys.rhs()[i].partial(&q_var(i)).partial(&q_var(j)));
            }
            s.scale(1, 6 * (m as i64 + 1))
        })
        .collect();

    let i4 = InvariantTensor::from_fn("I4", m, 0, 2, 4, |idx| {
        let (j, kk) = (idx[0], idx[1]);
        let mut s = h_minus1[kk].partial(&p_var(j)).neg();
        s = s.add(&h_x.partial(&q_var(kk)).partial(&q_var(j)));
        s = s.sub(&ds(&h_minus1[j]).partial(&q_var(kk)));
        let mut contracted = Expr::zero();
        for l in 0..m {
            contracted = contracted.add(&h_minus1[l].mul(&sys.rhs()[l].partial(&q_var(j))));
        }
        s = s.sub(&contracted.partial(&q_var(kk)));
        s.add(&h_minus1[j].mul(&h_minus1[kk]).scale(2, 1))
    });

    Ok(MedvedevSet {
        w2: InvariantTensor::from_matrix("W2", 2, &w2),
        w3: InvariantTensor::from_matrix("W3", 3, &w3_mat),
        i2,
        i4,
        h_minus1,
        h_x,
    })
}

/// The Medvedev `W_2` and `W_3` displays as matrices, for oracle tests.
pub fn medvedev_w_matrices(sys: &OdeSystem) -> (MatrixExpr, MatrixExpr) {
    let set = medvedev(sys).expect("order-3 system");
    let m = sys.m();
    let w2 = MatrixExpr::from_fn(m, |i, j| set.w2.get(&[i, j]).clone());
    let w3 = MatrixExpr::from_fn(m, |i, j| set.w3.get(&[i, j]).clone());
    (w2, w3)
}

/// Scalar higher-order invariants: the fully displayed ones plus the leading
/// parts of the mod-defined ones (flagged partial).
pub fn doubrov_scalar(sys: &OdeSystem) -> Result<Vec<InvariantTensor>, InvariantError> {
    if sys.m() != 1 || sys.order() < 4 {
        return Err(shape_err(sys, "1", ">= 4"));
    }
    let s = Scalar { sys };
    let k = sys.k() as i32;
    let mut out = Vec::new();
    match sys.order() {
        4 => {
            out.push(InvariantTensor::scalar("I3", 3, s.sub(&[3, 3, 3])));
            let j4 = s
                .sub(&[2, 3, 3])
                .add(&s.sub(&[3, 3]).pow(2).unwrap().scale(1, 6))
                .add(&s.sub(&[3]).mul(&s.sub(&[3, 3, 3])).scale(9, 8))
                .add(&s.sub(&[3, 3, 3, DX]).scale(3, 4));
            out.push(InvariantTensor::scalar("J4", 4, j4));
        }
        5 => {
            out.push(InvariantTensor::scalar("I2", 2, s.sub(&[4, 4])));
            let j6 = s
                .sub(&[2, 3, 4])
                .sub(&s.sub(&[3, 3, 3]).scale(2, 3))
                .sub(&s.sub(&[3, 4]).pow(2).unwrap().scale(1, 2));
            out.push(InvariantTensor::scalar("J6", 6, j6).partial_flagged());
        }
        _ => {
            out.push(InvariantTensor::scalar("I2", 2, s.sub(&[k, k])));
            out.push(InvariantTensor::scalar("J3", 3, s.sub(&[k, k - 1])).partial_flagged());
            if sys.order() >= 7 {
                out.push(
                    InvariantTensor::scalar("J4", 4, s.sub(&[k - 1, k - 1])).partial_flagged(),
                );
            }
        }
    }
    Ok(out)
}

/// The degree-2 invariant of systems of order >= 4:
/// `(I_2)^i_{jl} = d^2 f^i / dy^j_k dy^l_k`, the whole tensor with no trace
/// removal, symmetric in the lower pair.
pub fn i2_higher(sys: &OdeSystem) -> Result<InvariantTensor, InvariantError> {
    if sys.m() < 2 || sys.order() < 4 {
        return Err(shape_err(sys, ">= 2", ">= 4"));
    }
    let k = sys.k() as u32;
    Ok(InvariantTensor::from_fn("I2", sys.m(), 1, 2, 2, |idx| {
        sys.rhs()[idx[0]]
            .partial(&Var::jet(idx[1] as u32 + 1, k))
            .partial(&Var::jet(idx[2] as u32 + 1, k))
    }))
}

/// Outcome of the trivializability decision for one equivalence pseudogroup.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerdictStatus {
    Trivializable,
    NotTrivializable,
    Undecided,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EquivalenceKind {
    Point,
    Contact,
}

impl EquivalenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquivalenceKind::Point => "point",
            EquivalenceKind::Contact => "contact",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub invariant: String,
    pub component: String,
    pub value: String,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub equivalence_kind: EquivalenceKind,
    pub witnesses: Vec<Witness>,
    /// Partial invariants whose leading part is nonzero; they block a
    /// Trivializable verdict without witnessing the opposite.
    pub blockers: Vec<String>,
}

/// The verdicts applicable to a system, one per relevant pseudogroup, the
/// headline verdict first.
#[derive(Clone, Debug)]
pub struct TrivialVerdict {
    pub verdicts: Vec<Verdict>,
}

impl TrivialVerdict {
    pub fn headline(&self) -> &Verdict {
        &self.verdicts[0]
    }
}

fn verdict_from(kind: EquivalenceKind, tensors: &[InvariantTensor]) -> Verdict {
    let mut witnesses = Vec::new();
    let mut blockers = Vec::new();
    for t in tensors {
        if t.is_zero() {
            continue;
        }
        if t.partial_leading {
            blockers.push(t.name.clone());
        } else {
            for (component, value) in t.witnesses() {
                witnesses.push(Witness {
                    invariant: t.name.clone(),
                    component,
                    value: value.to_string(),
                });
            }
        }
    }
    let status = if !witnesses.is_empty() {
        VerdictStatus::NotTrivializable
    } else if !blockers.is_empty() {
        VerdictStatus::Undecided
    } else {
        VerdictStatus::Trivializable
    };
    Verdict { status, equivalence_kind: kind, witnesses, blockers }
}

/// All fundamental invariants applicable to the system's (m, order) class,
/// in report order.
pub fn compute_all(
    sys: &OdeSystem,
    conv: &Convention,
) -> Result<Vec<InvariantTensor>, InvariantError> {
    let m = sys.m();
    let order = sys.order();
    let mut out = Vec::new();
    match (m, order) {
        (1, 2) => {
            let (i1, i2) = tresse(sys)?;
            out.push(i1);
            out.push(i2);
        }
        (1, 3) => {
            let [w, c2, c3, c4] = cartan_point3(sys)?;
            let (i1, _) = chern_wunschmann(sys)?;
            out.push(w);
            out.push(c2);
            out.push(c3);
            out.push(c4);
            out.push(i1);
        }
        (_, 2) => {
            let (w2, i3) = fels(sys)?;
            out.push(w2);
            out.push(i3);
        }
        (_, 3) => {
            let set = medvedev(sys)?;
            out.push(set.w2);
            out.push(set.w3);
            out.push(set.i2);
            out.push(set.i4);
        }
        (1, _) => {
            for w in reduction::wilczynski_all(sys, conv)? {
                out.push(InvariantTensor::from_matrix(
                    &format!("W{}", w.r),
                    w.r as i64,
                    &w.aligned,
                ));
            }
            out.extend(doubrov_scalar(sys)?);
        }
        (_, _) => {
            for w in reduction::wilczynski_all(sys, conv)? {
                out.push(InvariantTensor::from_matrix(
                    &format!("W{}", w.r),
                    w.r as i64,
                    &w.aligned,
                ));
            }
            out.push(i2_higher(sys)?);
        }
    }
    Ok(out)
}

/// Decide trivializability by the fundamental set of the system's class.
pub fn trivializable(
    sys: &OdeSystem,
    conv: &Convention,
) -> Result<TrivialVerdict, InvariantError> {
    let m = sys.m();
    let order = sys.order();
    let verdicts = match (m, order) {
        (1, 2) => {
            let (i1, i2) = tresse(sys)?;
            vec![verdict_from(EquivalenceKind::Point, &[i1, i2])]
        }
        (1, 3) => {
            let cartan = cartan_point3(sys)?;
            let (i1, w) = chern_wunschmann(sys)?;
            vec![
                verdict_from(EquivalenceKind::Point, &cartan),
                verdict_from(EquivalenceKind::Contact, &[i1, w]),
            ]
        }
        (1, _) => {
            let tensors = compute_all(sys, conv)?;
            vec![verdict_from(EquivalenceKind::Contact, &tensors)]
        }
        (_, _) => {
            let tensors = compute_all(sys, conv)?;
            vec![verdict_from(EquivalenceKind::Point, &tensors)]
        }
    };
    Ok(TrivialVerdict { verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(order: usize, f: Expr) -> OdeSystem {
        OdeSystem::new(1, order, vec![f]).unwrap()
    }

    #[test]
    fn tresse_examples() {
        let (i1, i2) = tresse(&scalar(2, Expr::zero())).unwrap();
        assert!(i1.is_zero() && i2.is_zero());

        let (i1, _) = tresse(&scalar(2, Expr::jet(1, 1).pow(4).unwrap())).unwrap();
        assert_eq!(i1.get(&[]), &Expr::from_int(24));

        let (i1, i2) = tresse(&scalar(2, Expr::jet(1, 0))).unwrap();
        assert!(i1.is_zero());
        assert!(i2.is_zero());

        assert!(tresse(&OdeSystem::trivial(2, 2)).is_err());
    }

    #[test]
    fn chern_wunschmann_examples() {
        let (i1, w) = chern_wunschmann(&scalar(3, Expr::zero())).unwrap();
        assert!(i1.is_zero() && w.is_zero());

        let (_, w) = chern_wunschmann(&scalar(3, Expr::jet(1, 0))).unwrap();
        assert_eq!(w.get(&[]), &Expr::from_int(-1));

        let (i1, _) = chern_wunschmann(&scalar(3, Expr::jet(1, 2).pow(4).unwrap())).unwrap();
        assert_eq!(i1.get(&[]), &Expr::from_int(24));
    }

    #[test]
    fn cartan_examples() {
        let all = cartan_point3(&scalar(3, Expr::zero())).unwrap();
        assert!(all.iter().all(InvariantTensor::is_zero));

        let all = cartan_point3(&scalar(3, Expr::jet(1, 0))).unwrap();
        assert_eq!(all[0].get(&[]), &Expr::from_int(-1));

        // f = (y'')^2: f_222 = 0 and f_22^2 + 6 f_122 + 2 f_2 f_222 = 4
        let all = cartan_point3(&scalar(3, Expr::jet(1, 2).pow(2).unwrap())).unwrap();
        assert!(all[1].is_zero());
        assert_eq!(all[2].get(&[]), &Expr::from_int(4));
    }

    #[test]
    fn fels_examples() {
        let (w2, i3) = fels(&OdeSystem::trivial(2, 2)).unwrap();
        assert!(w2.is_zero() && i3.is_zero());

        let sys = OdeSystem::new(2, 2, vec![Expr::jet(2, 0), Expr::zero()]).unwrap();
        let (w2, _) = fels(&sys).unwrap();
        assert_eq!(w2.get(&[0, 1]), &Expr::one());
        assert_eq!(w2.get(&[0, 0]), &Expr::zero());

        // f1 = (y1')^3: raw I_3 (1;111) = 6, trace-removed by the exact solve
        let sys =
            OdeSystem::new(2, 2, vec![Expr::jet(1, 1).pow(3).unwrap(), Expr::zero()]).unwrap();
        let (_, i3) = fels(&sys).unwrap();
        assert_eq!(i3.get(&[0, 0, 0, 0]), &Expr::from_ratio(3, 2));
        // all contractions of the tfp output vanish
        for a in 0..2 {
            for b in 0..2 {
                let mut s = Expr::zero();
                for i in 0..2 {
                    s = s.add(i3.get(&[i, i, a, b]));
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn medvedev_examples() {
        let set = medvedev(&OdeSystem::trivial(2, 3)).unwrap();
        assert!(set.w2.is_zero() && set.w3.is_zero() && set.i2.is_zero() && set.i4.is_zero());

        // f1 = (q^2)^2, f2 = 0
        let sys =
            OdeSystem::new(2, 3, vec![Expr::jet(2, 2).pow(2).unwrap(), Expr::zero()]).unwrap();
        let set = medvedev(&sys).unwrap();
        assert_eq!(set.i2.get(&[0, 1, 1]), &Expr::from_int(2));
        assert!(set.h_minus1.iter().all(Expr::is_zero));

        // linear, x-independent rhs: I2 = I4 = 0
        let sys = OdeSystem::new(
            2,
            3,
            vec![
                Expr::jet(2, 1).add(&Expr::jet(1, 0)),
                Expr::jet(1, 2).scale(3, 1),
            ],
        )
        .unwrap();
        let set = medvedev(&sys).unwrap();
        assert!(set.i2.is_zero());
        assert!(set.i4.is_zero());
    }

    #[test]
    fn doubrov_examples() {
        let out = doubrov_scalar(&OdeSystem::trivial(1, 4)).unwrap();
        assert!(out.iter().all(InvariantTensor::is_zero));

        let sys = scalar(4, Expr::jet(1, 3).pow(3).unwrap());
        let out = doubrov_scalar(&sys).unwrap();
        assert_eq!(out[0].name, "I3");
        assert_eq!(out[0].get(&[]), &Expr::from_int(6));

        let sys = scalar(5, Expr::jet(1, 0));
        let out = doubrov_scalar(&sys).unwrap();
        assert_eq!(out[0].name, "I2");
        assert!(out[0].is_zero());
        assert!(out[1].partial_leading);
    }

    #[test]
    fn i2_higher_examples() {
        assert!(i2_higher(&OdeSystem::trivial(2, 4)).unwrap().is_zero());

        let sys = OdeSystem::new(
            2,
            4,
            vec![Expr::jet(1, 3).mul(&Expr::jet(2, 3)), Expr::zero()],
        )
        .unwrap();
        let i2 = i2_higher(&sys).unwrap();
        assert_eq!(i2.get(&[0, 0, 1]), &Expr::one());
        assert_eq!(i2.get(&[0, 1, 0]), &Expr::one());
        assert_eq!(i2.get(&[0, 0, 0]), &Expr::zero());

        let sys =
            OdeSystem::new(2, 5, vec![Expr::jet(2, 4).pow(2).unwrap(), Expr::zero()]).unwrap();
        let i2 = i2_higher(&sys).unwrap();
        assert_eq!(i2.get(&[0, 1, 1]), &Expr::from_int(2));

        // symmetry in the lower pair, on a messier rhs
        let sys = OdeSystem::new(
            2,
            4,
            vec![
                Expr::jet(1, 3).pow(2).unwrap().mul(&Expr::jet(2, 3)),
                Expr::jet(2, 3).mul(&Expr::jet(1, 3)),
            ],
        )
        .unwrap();
        let i2 = i2_higher(&sys).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    assert_eq!(i2.get(&[i, j, l]), i2.get(&[i, l, j]));
                }
            }
        }
    }

    #[test]
    fn tfp_idempotent_and_contraction_free() {
        let sys = OdeSystem::new(
            2,
            3,
            vec![
                Expr::jet(1, 2).pow(2).unwrap().mul(&Expr::jet(2, 2)),
                Expr::jet(2, 2).pow(3).unwrap(),
            ],
        )
        .unwrap();
        let raw = InvariantTensor::from_fn("T", 2, 1, 2, 2, |idx| {
            sys.rhs()[idx[0]]
                .partial(&Var::jet(idx[1] as u32 + 1, 2))
                .partial(&Var::jet(idx[2] as u32 + 1, 2))
        });
        let t = tfp_symmetric(&raw);
        let tt = tfp_symmetric(&t);
        for (a, b) in t.components().iter().zip(tt.components()) {
            assert_eq!(a, b);
        }
        for a in 0..2 {
            let mut s = Expr::zero();
            for i in 0..2 {
                s = s.add(t.get(&[i, i, a]));
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn trivializable_dispatch() {
        let conv = Convention::default();

        // m = 2, order 4 with an I2 witness
        let sys =
            OdeSystem::new(2, 4, vec![Expr::jet(2, 3).pow(2).unwrap(), Expr::zero()]).unwrap();
        let v = trivializable(&sys, &conv).unwrap();
        assert_eq!(v.headline().status, VerdictStatus::NotTrivializable);
        let w = &v.headline().witnesses[0];
        assert_eq!(w.invariant, "I2");
        assert_eq!(w.component, "1;2,2");
        assert_eq!(w.value, "2");

        // scalar order 3, f = y: both point and contact fail
        let sys = OdeSystem::new(1, 3, vec![Expr::jet(1, 0)]).unwrap();
        let v = trivializable(&sys, &conv).unwrap();
        assert_eq!(v.verdicts.len(), 2);
        assert!(v
            .verdicts
            .iter()
            .all(|x| x.status == VerdictStatus::NotTrivializable));

        // trivial systems are trivializable in every class
        for (m, order) in [(1, 2), (1, 3), (2, 2), (2, 3), (2, 4), (1, 5)] {
            let v = trivializable(&OdeSystem::trivial(m, order), &conv).unwrap();
            assert!(v
                .verdicts
                .iter()
                .all(|x| x.status == VerdictStatus::Trivializable));
        }
    }

    #[test]
    fn undecided_when_partial_leading_nonzero() {
        // order 5 scalar with I2 = f_44 = 0 but a nonzero J6 leading part
        let f = Expr::jet(1, 3).mul(&Expr::jet(1, 4));
        let sys = OdeSystem::new(1, 5, vec![f]).unwrap();
        let out = doubrov_scalar(&sys).unwrap();
        assert!(out[0].is_zero());
        assert!(!out[1].is_zero());
        let conv = Convention::default();
        let v = trivializable(&sys, &conv).unwrap();
        if v.headline().status == VerdictStatus::Undecided {
            assert_eq!(v.headline().blockers, vec!["J6".to_string()]);
        } else {
            // a Wilczynski invariant may already witness non-trivializability
            assert_eq!(v.headline().status, VerdictStatus::NotTrivializable);
        }
    }
}
