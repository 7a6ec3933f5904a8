//! Exact symbolic engine for point invariants of systems of ODEs.
//!
//! The crate has two halves that check each other:
//!
//! * a **symbolic side** computing relative point invariants of systems
//!   `y^(k+1) = f(x, y, ..., y^(k))` — generalized Wilczynski invariants from
//!   the linearized system, the classical low-order invariant sets (Tresse,
//!   Chern/Wünschmann, Cartan, Fels, Medvedev, scalar higher-order), the
//!   degree-2 invariant of higher-order systems, and the trivializability
//!   verdict they imply;
//! * an **algebraic side** building the graded symmetry algebra of the
//!   trivial system with exact rational structure constants and computing its
//!   Chevalley–Eilenberg cohomology, Spencer operators, and the effective
//!   part of the second cohomology by exact linear algebra.
//!
//! Everything is exact: integer/rational arithmetic only, canonical rational
//! function representations, decidable zero tests.

pub mod cohomology;
pub mod convention;
pub mod expr;
pub mod invariants;
pub mod jets;
pub mod liealg;
pub mod linop;
pub mod matrix;
pub mod qlinalg;
pub mod reduction;
pub mod report;
pub mod selftest;

pub use expr::{parse_expr, Expr, ExprError, ParseError, Var};

pub use jets::{OdeSystem, PointMap};


