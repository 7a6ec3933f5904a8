//! JSON-first report shapes for the CLI, with a plain-text pretty printer.

use crate::invariants::{InvariantTensor, TrivialVerdict, VerdictStatus};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Serialize, Deserialize)]
pub struct InvariantEntry {
    pub name: String,
    pub degree: i64,
    pub components: BTreeMap<String, String>,
    pub is_zero: bool,
    /// `exact` on the rational fragment; `syntactic-only` when auxiliary
    /// symbols remain in the system.
    pub zero_test: String,
    /// Leading part of an invariant only defined modulo others.
    pub partial_leading: bool,
}

#[derive(Serialize, Deserialize)]
pub struct WitnessEntry {
    pub invariant: String,
    pub component: String,
    pub value: String,
}

#[derive(Serialize, Deserialize)]
pub struct VerdictEntry {
    pub equivalence: String,
    pub status: String,
    pub witnesses: Vec<WitnessEntry>,
    pub blockers: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdicts: Vec<VerdictEntry>,
    pub exit_code: i32,
}

#[derive(Serialize, Deserialize)]
pub struct InvariantReport {
    pub m: usize,
    pub order: usize,
    pub invariants: Vec<InvariantEntry>,
    pub verdict: VerdictReport,
}

pub fn status_str(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::Trivializable => "Trivializable",
        VerdictStatus::NotTrivializable => "NotTrivializable",
        VerdictStatus::Undecided => "Undecided",
    }
}

/// Exit code contract: 0 trivializable, 1 not, 3 undecided.
pub fn exit_code_for(v: &TrivialVerdict) -> i32 {
    match v.headline().status {
        VerdictStatus::Trivializable => 0,
        VerdictStatus::NotTrivializable => 1,
        VerdictStatus::Undecided => 3,
    }
}

pub fn invariant_entries(tensors: &[InvariantTensor]) -> Vec<InvariantEntry> {
    tensors
        .iter()
        .map(|t| {
            let mut components = BTreeMap::new();
            for (label, value) in t.witnesses() {
                components.insert(label, value.to_string());
            }
            InvariantEntry {
                name: t.name.clone(),
                degree: t.degree,
                components,
                is_zero: t.is_zero(),
                zero_test: if t.has_aux() { "syntactic-only" } else { "exact" }.to_string(),
                partial_leading: t.partial_leading,
            }
        })
        .collect()
}

pub fn verdict_report(v: &TrivialVerdict) -> VerdictReport {
    VerdictReport {
        verdicts: v
            .verdicts
            .iter()
            .map(|x| VerdictEntry {
                equivalence: x.equivalence_kind.as_str().to_string(),
                status: status_str(x.status).to_string(),
                witnesses: x
                    .witnesses
                    .iter()
                    .map(|w| WitnessEntry {
                        invariant: w.invariant.clone(),
                        component: w.component.clone(),
                        value: w.value.clone(),
                    })
                    .collect(),
                blockers: x.blockers.clone(),
            })
            .collect(),
        exit_code: exit_code_for(v),
    }
}

pub fn render_invariant_report_text(r: &InvariantReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system: m = {}, order = {}", r.m, r.order);
    for e in &r.invariants {
        let mark = if e.is_zero { "= 0" } else { "nonzero" };
        let partial = if e.partial_leading { " (leading part)" } else { "" };
        let _ = writeln!(out, "  {} (degree {}){}: {} [{}]", e.name, e.degree, partial, mark, e.zero_test);
        for (idx, val) in &e.components {
            if idx.is_empty() {
                let _ = writeln!(out, "      value = {val}");
            } else {
                let _ = writeln!(out, "      ({idx}) = {val}");
            }
        }
    }
    for v in &r.verdict.verdicts {
        let _ = writeln!(out, "verdict ({}): {}", v.equivalence, v.status);
        for w in &v.witnesses {
            let _ = writeln!(out, "    witness: {}({}) = {}", w.invariant, w.component, w.value);
        }
        for b in &v.blockers {
            let _ = writeln!(out, "    blocked by partial invariant: {b}");
        }
    }
    out
}

/// One line of the cohomology dimension table.
#[derive(Serialize, Deserialize)]
pub struct CohomologyRow {
    pub q: usize,
    pub degree: i64,
    pub dim: usize,
    /// `direct`, `E02`, `E11`, `effective`, or `effective-weak`.
    pub source: String,
}

#[derive(Serialize, Deserialize)]
pub struct CohomologyChecks {
    pub d_squared: bool,
    pub degree_blocks: bool,
    pub hodge_consistent: bool,
    pub serre_hochschild: bool,
    pub diagram_commutes: bool,
}

#[derive(Serialize, Deserialize)]
pub struct CohomologyReport {
    pub k: usize,
    pub m: usize,
    pub rows: Vec<CohomologyRow>,
    pub sop1_kernel_dim: usize,
    pub sop2_kernel_dim: usize,
    pub checks: CohomologyChecks,
}

pub fn render_cohomology_text(r: &CohomologyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "g(k = {}, m = {}):", r.k, r.m);
    let _ = writeln!(
        out,
        "  ker Sop^1 = {}, ker Sop^2 = {}",
        r.sop1_kernel_dim, r.sop2_kernel_dim
    );
    for row in &r.rows {
        let _ = writeln!(
            out,
            "  H^{}[degree {:>2}] dim {:>3}  ({})",
            row.q, row.degree, row.dim, row.source
        );
    }
    let c = &r.checks;
    let _ = writeln!(
        out,
        "  checks: d^2=0 {}, graded {}, hodge {}, serre-hochschild {}, diagram {}",
        c.d_squared, c.degree_blocks, c.hodge_consistent, c.serre_hochschild, c.diagram_commutes
    );
    out
}
