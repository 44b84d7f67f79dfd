//! Report structure shared by the text and machine-readable renderers.
//!
//! Every field is an owned string or a `BTreeMap`, so serialization order
//! is fixed by construction and two runs over the same input produce
//! byte-identical output. Rationals are rendered as `p/q` strings, the
//! same convention the input files use.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Serialize)]
pub struct Report {
    pub version: &'static str,
    /// Input kind: "scenario" or "cbd".
    pub input: &'static str,
    pub verdict: VerdictSummary,
    pub checks: Vec<CheckReport>,
}

/// Cross-check summary, populated only with the facts the requested
/// checks established.
#[derive(Serialize, Default)]
pub struct VerdictSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signalling: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logically_contextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strongly_contextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilistically_contextual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contextual_fraction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstructed_sections: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cbd_contextual: Option<bool>,
    /// Total direct influence Δ of a CbD input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_influence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qq: Option<String>,
}

#[derive(Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckReport {
    Signalling {
        signalling: bool,
        violations: Vec<ViolationEntry>,
    },
    Logical {
        logically_contextual: bool,
        /// Every supported section with no global extension.
        witnesses: Vec<SectionEntry>,
    },
    Strong {
        strongly_contextual: bool,
        /// A witness assignment when one exists.
        #[serde(skip_serializing_if = "Option::is_none")]
        global_section: Option<String>,
    },
    Lp {
        feasible: bool,
        /// Feasible case: a joint distribution reproducing every table.
        #[serde(skip_serializing_if = "Option::is_none")]
        joint: Option<BTreeMap<String, String>>,
        /// Infeasible case: the nonzero rows of a verified Farkas
        /// certificate.
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<Vec<CertificateRow>>,
    },
    Fraction {
        confounded: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        fraction: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        noncontextual_weight: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        subdistribution: Option<BTreeMap<String, String>>,
        /// Confounded case: the number of disagreeing overlap marginals.
        #[serde(skip_serializing_if = "Option::is_none")]
        violations: Option<usize>,
    },
    Cech {
        supported: usize,
        obstructed: usize,
        /// Present when any obstruction vanishes: vanishing does not
        /// certify extendability.
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<&'static str>,
        sections: Vec<ObstructionEntry>,
    },
    Cbd {
        contextual: bool,
        delta: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        cyclic: Option<CyclicEntry>,
        #[serde(skip_serializing_if = "Option::is_none")]
        coupling: Option<CouplingEntry>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<Vec<CbdCertificateRow>>,
    },
    Qq {
        q: String,
        content_a: String,
        content_b: String,
        table_ab: BTreeMap<String, String>,
        table_ba: BTreeMap<String, String>,
    },
}

#[derive(Serialize)]
pub struct ViolationEntry {
    pub context_a: String,
    pub context_b: String,
    pub section: String,
    pub weight_a: String,
    pub weight_b: String,
}

#[derive(Serialize)]
pub struct SectionEntry {
    pub context: String,
    pub section: String,
}

#[derive(Serialize)]
pub struct CertificateRow {
    pub context: String,
    pub section: String,
    pub coefficient: String,
}

#[derive(Serialize)]
pub struct ObstructionEntry {
    pub context: String,
    pub section: String,
    pub vanishes: bool,
    /// Integer cochain family per nerve vertex, re-verified before report
    /// assembly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
pub struct CyclicEntry {
    pub rank: usize,
    pub correlations: Vec<String>,
    pub delta: String,
    pub d: String,
    pub contextual: bool,
}

#[derive(Serialize)]
pub struct CouplingEntry {
    /// Slot labels "context:content" in coupling variable order.
    pub slots: Vec<String>,
    pub weights: BTreeMap<String, String>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CbdCertificateRow {
    Table {
        context: String,
        pattern: String,
        coefficient: String,
    },
    Alignment {
        content: String,
        context_a: String,
        context_b: String,
        coefficient: String,
    },
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("report types serialize infallibly");
        out.push('\n');
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("ctxkit {}", self.version));
        line(format!("input: {}", self.input));
        for check in &self.checks {
            render_check(check, &mut line);
        }
        out
    }
}

fn render_check(check: &CheckReport, line: &mut impl FnMut(String)) {
    match check {
        CheckReport::Signalling {
            signalling,
            violations,
        } => {
            if *signalling {
                line(format!(
                    "signalling: yes (overlap violations: {})",
                    violations.len()
                ));
                for v in violations {
                    line(format!(
                        "  {} vs {} at {}: {} vs {}",
                        v.context_a, v.context_b, v.section, v.weight_a, v.weight_b
                    ));
                }
            } else {
                line("signalling: none".to_string());
            }
        }
        CheckReport::Logical {
            logically_contextual,
            witnesses,
        } => {
            if *logically_contextual {
                line(format!(
                    "logical: contextual (non-extendable sections: {})",
                    witnesses.len()
                ));
                for w in witnesses {
                    line(format!("  {} in context {}", w.section, w.context));
                }
            } else {
                line("logical: not contextual".to_string());
            }
        }
        CheckReport::Strong {
            strongly_contextual,
            global_section,
        } => match global_section {
            Some(g) => line(format!("strong: not strongly contextual (global section {g})")),
            None => {
                debug_assert!(*strongly_contextual);
                line("strong: strongly contextual (no global section)".to_string());
            }
        },
        CheckReport::Lp {
            feasible,
            joint,
            certificate,
        } => {
            if *feasible {
                let rows = joint.as_ref().map_or(0, BTreeMap::len);
                line(format!(
                    "lp: feasible (joint distribution, supported assignments: {rows})"
                ));
            } else {
                let rows = certificate.as_ref().map_or(0, Vec::len);
                line(format!(
                    "lp: infeasible (Farkas certificate, nonzero coefficients: {rows})"
                ));
            }
        }
        CheckReport::Fraction {
            confounded,
            fraction,
            noncontextual_weight,
            violations,
            ..
        } => {
            if *confounded {
                line(format!(
                    "fraction: confounded by signalling (overlap violations: {})",
                    violations.unwrap_or(0)
                ));
            } else {
                line(format!(
                    "fraction: {} (noncontextual weight {})",
                    fraction.as_deref().unwrap_or("?"),
                    noncontextual_weight.as_deref().unwrap_or("?")
                ));
            }
        }
        CheckReport::Cech {
            supported,
            obstructed,
            note,
            ..
        } => {
            line(format!(
                "cech: {obstructed} of {supported} supported sections obstructed"
            ));
            if let Some(note) = note {
                line(format!("  note: {note}"));
            }
        }
        CheckReport::Cbd {
            contextual,
            delta,
            cyclic,
            coupling,
            certificate,
        } => {
            let verdict = if *contextual {
                "contextual"
            } else {
                "noncontextual"
            };
            line(format!("cbd: {verdict} (direct influence {delta})"));
            if let Some(c) = cyclic {
                line(format!(
                    "  cyclic rank {}: correlations [{}], d = {}",
                    c.rank,
                    c.correlations.join(", "),
                    c.d
                ));
            }
            if let Some(c) = coupling {
                line(format!(
                    "  multimaximal coupling verified over slots [{}]",
                    c.slots.join(", ")
                ));
            }
            if let Some(rows) = certificate {
                line(format!(
                    "  infeasibility certificate, nonzero coefficients: {}",
                    rows.len()
                ));
            }
        }
        CheckReport::Qq { q, table_ab, table_ba, .. } => {
            line(format!("qq: q = {q}"));
            line(format!("  a-then-b: {}", render_table(table_ab)));
            line(format!("  b-then-a: {}", render_table(table_ba)));
        }
    }
}

fn render_table(table: &BTreeMap<String, String>) -> String {
    table
        .iter()
        .map(|(k, v)| format!("({k})={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}
