//! The structured document every command emits, and its text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use enriques_core::decompose::{Decomposition, ExtremalCase, IsotropicFrame};
use enriques_core::invariants::{CaseTag, GonalityReport, IsotropicWitness, MuKind, MuResult, TypeTag};
use enriques_core::oracle::ParityReport;
use enriques_core::verify::SweepReport;
use enriques_core::LatticeClass;

/// Bumped whenever a field of the document changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// The command line, without the program name.
    pub command: Vec<String>,
    pub inputs: Vec<InputClass>,
    pub result: ReportResult,
    pub caveats: Caveats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputClass {
    pub expression: String,
    pub class: LatticeClass,
    pub l_squared: i64,
}

/// Scope flags: classes are numerical classes, and effectivity is the
/// numerical test on the positive cone (no nodal curves).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caveats {
    pub numerical_equivalence_only: bool,
    pub unnodal_model: bool,
}

impl Default for Caveats {
    fn default() -> Self {
        Caveats {
            numerical_equivalence_only: true,
            unnodal_model: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GengonSummary {
    pub gengon: i64,
    pub two_phi: i64,
    pub mu: i64,
    pub mu_exact: bool,
    pub quarter_bound: i64,
    pub case_tag: CaseTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub l_squared: i64,
    pub phi: i64,
    pub case_tag: CaseTag,
    pub type_tag: TypeTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `input`, `theorem_violation` or `overflow`.
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum ReportResult {
    Invariants(GonalityReport),
    Phi(IsotropicWitness),
    Mu(MuResult),
    Gengon(GengonSummary),
    Classify(Classification),
    Decompose(Decomposition),
    TenFrame(IsotropicFrame),
    Extremal(ExtremalCase),
    Verify(SweepReport),
    OracleCheck(ParityReport),
    Error(ErrorReport),
}

impl ReportDocument {
    pub fn new(command: Vec<String>, inputs: Vec<InputClass>, result: ReportResult) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            command,
            inputs,
            result,
            caveats: Caveats::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report documents always serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<ReportDocument> {
        serde_json::from_str(s)
    }

    /// Plain `key: value` lines carrying the same numbers as the JSON form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.inputs {
            line(&mut out, "input", &i.expression);
            line(&mut out, "class", &i.class);
            line(&mut out, "L^2", &i.l_squared);
        }
        match &self.result {
            ReportResult::Invariants(r) => {
                line(&mut out, "phi", &r.phi.value);
                line(&mut out, "phi witness", &r.phi.class);
                mu_lines(&mut out, &r.mu);
                line(&mut out, "quarter bound", &r.quarter_bound);
                line(&mut out, "gengon", &r.gengon);
                line(&mut out, "case", &r.case_tag.as_str());
                line(&mut out, "type", &r.type_tag);
                let m = &r.mingon;
                let open = if m.lower_excluded { "(lower bound excluded)" } else { "" };
                line(&mut out, "mingon", &format!("[{}, {}] {open}", m.lower, m.upper).trim_end());
            }
            ReportResult::Phi(w) => {
                line(&mut out, "phi", &w.value);
                line(&mut out, "witness", &w.class);
            }
            ReportResult::Mu(m) => mu_lines(&mut out, m),
            ReportResult::Gengon(g) => {
                line(&mut out, "gengon", &g.gengon);
                line(&mut out, "2 phi", &g.two_phi);
                line(&mut out, "mu", &mu_value(g.mu, g.mu_exact));
                line(&mut out, "quarter bound", &g.quarter_bound);
                line(&mut out, "case", &g.case_tag.as_str());
            }
            ReportResult::Classify(c) => {
                line(&mut out, "phi", &c.phi);
                line(&mut out, "case", &c.case_tag.as_str());
                line(&mut out, "type", &c.type_tag);
            }
            ReportResult::Decompose(d) => {
                line(&mut out, "pattern", &format!("{:?}", d.pattern));
                for (k, (a, e)) in d.coefficients.iter().zip(&d.classes).enumerate() {
                    line(&mut out, &format!("E{}", k + 1), &format!("{a} * {e}"));
                }
            }
            ReportResult::TenFrame(f) => {
                line(&mut out, "D", &f.d);
                for (k, e) in f.classes.iter().enumerate() {
                    line(&mut out, &format!("F{}", k + 1), e);
                }
            }
            ReportResult::Extremal(x) => {
                line(&mut out, "case", &x.tag.as_str());
                line(&mut out, "h", &x.h);
                line(&mut out, "E1", &x.e1);
                line(&mut out, "E2", &x.e2);
                if let Some(e3) = x.e3 {
                    line(&mut out, "E3", &e3);
                }
            }
            ReportResult::Verify(r) => {
                line(&mut out, "radius", &r.radius);
                if let Some(m) = r.max_l2 {
                    line(&mut out, "max L^2", &m);
                }
                line(&mut out, "classes tested", &r.classes_tested);
                line(&mut out, "fixtures injected", &r.fixtures_injected);
                for c in &r.counters {
                    line(
                        &mut out,
                        c.check.as_str(),
                        &format!("tested {} passed {} failed {}", c.tested, c.passed, c.failed),
                    );
                }
                for (k, v) in &r.case_tags {
                    line(&mut out, &format!("case {k}"), v);
                }
                for (k, v) in &r.type_tags {
                    line(&mut out, &format!("type {k}"), v);
                }
                for c in &r.counterexamples {
                    line(&mut out, "counterexample", &format!("{} {}: {}", c.check, c.class, c.details));
                }
                for w in &r.warnings {
                    line(&mut out, "warning", w);
                }
                line(&mut out, "elapsed ms", &r.elapsed_ms);
            }
            ReportResult::OracleCheck(r) => {
                line(&mut out, "radius", &r.radius);
                line(&mut out, "seed", &r.seed);
                line(&mut out, "anchors", &r.anchors.len());
                line(&mut out, "queries", &r.queries);
                line(&mut out, "infeasible", &r.infeasible);
                line(&mut out, "solutions compared", &r.solutions_compared);
                line(&mut out, "discrepancies", &r.discrepancies.len());
                for d in &r.discrepancies {
                    line(
                        &mut out,
                        "discrepancy",
                        &format!(
                            "{} s={} c={} enumerator {} oracle {}",
                            d.anchor, d.s, d.c, d.enumerator_count, d.oracle_count
                        ),
                    );
                }
                line(&mut out, "elapsed ms", &r.elapsed_ms);
            }
            ReportResult::Error(e) => {
                line(&mut out, "error", &e.kind);
                line(&mut out, "message", &e.message);
            }
        }
        out
    }
}

fn line(out: &mut String, key: &str, value: &dyn std::fmt::Display) {
    let _ = writeln!(out, "{key:<20} {value}");
}

fn mu_value(v: i64, exact: bool) -> String {
    if exact {
        v.to_string()
    } else {
        format!(">= {v}")
    }
}

fn mu_lines(out: &mut String, m: &MuResult) {
    line(out, "mu", &mu_value(m.value, m.kind == MuKind::Exact));
    line(out, "mu cap", &m.cap_used);
    if let Some(w) = &m.witness {
        line(out, "mu witness", &w.class);
        if let Some(s) = &w.splitting {
            line(out, "splitting", &format!("{} + {}", s.f1, s.f2));
        }
    }
}
