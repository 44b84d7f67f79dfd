//! Input detection, check selection, and report assembly.
//!
//! Checks always execute in one fixed order (structural checks, then
//! linear programs, then cohomology) regardless of the order they were
//! requested in, so reports are stable.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use ctxkit::cbd::{
    cbd_contextual, cyclic_criterion, order_effect_view, parse_cbd, qq_statistic, CbdSystem,
    CouplingRow,
};
use ctxkit::cech::{obstruction, ONE_SIDEDNESS_NOTE};
use ctxkit::glue::{
    first_global_section, logical_witnesses, signalling_report, support_model, SupportModel,
};
use ctxkit::lp::{contextual_fraction, noncontextuality_lp, CfOutcome, NcLpOutcome};
use ctxkit::{parse_model, EmpiricalModel, Error, Rational, Scenario, Section};

use crate::report::{
    CbdCertificateRow, CertificateRow, CheckReport, CouplingEntry, CyclicEntry, ObstructionEntry,
    Report, SectionEntry, VerdictSummary, ViolationEntry,
};
use crate::CliError;

pub enum Input {
    Scenario(EmpiricalModel),
    Cbd(CbdSystem),
}

/// Sniffs the input kind from the top-level JSON keys, then runs the
/// matching typed parser.
pub fn detect_input(text: &str) -> Result<Input, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::syntax(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::syntax("the top level must be a JSON object"))?;
    if object.contains_key("observables") {
        Ok(Input::Scenario(parse_model(text)?))
    } else if object.contains_key("contents") {
        Ok(Input::Cbd(parse_cbd(text)?))
    } else {
        Err(Error::syntax(
            "expected an \"observables\" key (scenario model) or a \"contents\" key (CbD system) at the top level",
        )
        .into())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Signalling,
    Logical,
    Strong,
    Lp,
    Fraction,
    Cech,
    Cbd,
    Qq,
}

/// The fixed execution order: cheap structural checks, then linear
/// programs, then cohomology; CbD checks close the list.
const CHECK_ORDER: [Check; 8] = [
    Check::Signalling,
    Check::Logical,
    Check::Strong,
    Check::Lp,
    Check::Fraction,
    Check::Cech,
    Check::Cbd,
    Check::Qq,
];

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Signalling => "signalling",
            Check::Logical => "logical",
            Check::Strong => "strong",
            Check::Lp => "lp",
            Check::Fraction => "fraction",
            Check::Cech => "cech",
            Check::Cbd => "cbd",
            Check::Qq => "qq",
        }
    }

    fn parse(token: &str) -> Option<Check> {
        CHECK_ORDER.into_iter().find(|c| c.name() == token)
    }

    fn applies_to_scenario(self) -> bool {
        !matches!(self, Check::Cbd | Check::Qq)
    }
}

/// Resolves the requested check list against the input kind. Without an
/// explicit request every applicable check runs; `qq` is applicable only
/// when the CbD system is a two-context order-effect pair.
fn select_checks(requested: Option<&str>, input: &Input) -> Result<Vec<Check>, CliError> {
    let selected: BTreeSet<Check> = match requested {
        None => match input {
            Input::Scenario(_) => CHECK_ORDER
                .into_iter()
                .filter(|c| c.applies_to_scenario())
                .collect(),
            Input::Cbd(sys) => {
                let mut set = BTreeSet::from([Check::Cbd]);
                if order_effect_view(sys).is_ok() {
                    set.insert(Check::Qq);
                }
                set
            }
        },
        Some(csv) => {
            let mut set = BTreeSet::new();
            for token in csv.split(',') {
                let token = token.trim();
                let check = Check::parse(token)
                    .ok_or_else(|| CliError::Request(format!("unknown check '{token}'")))?;
                set.insert(check);
            }
            set
        }
    };
    if selected.is_empty() {
        return Err(CliError::Request("at least one check is required".into()));
    }
    for check in &selected {
        match input {
            Input::Scenario(_) if !check.applies_to_scenario() => {
                return Err(CliError::Request(format!(
                    "check '{}' requires a CbD system input, got a scenario model",
                    check.name()
                )));
            }
            Input::Cbd(_) if check.applies_to_scenario() => {
                return Err(CliError::Request(format!(
                    "check '{}' requires a scenario model input, got a CbD system",
                    check.name()
                )));
            }
            _ => {}
        }
    }
    Ok(CHECK_ORDER
        .into_iter()
        .filter(|c| selected.contains(c))
        .collect())
}

pub fn analyze(
    text: &str,
    requested: Option<&str>,
    max_columns: u64,
) -> Result<Report, CliError> {
    let input = detect_input(text)?;
    let checks = select_checks(requested, &input)?;
    let mut verdict = VerdictSummary::default();
    let mut reports = Vec::new();
    match &input {
        Input::Scenario(m) => {
            let sm = support_model(m);
            for check in checks {
                reports.push(scenario_check(m, &sm, check, max_columns, &mut verdict)?);
            }
        }
        Input::Cbd(sys) => {
            for check in checks {
                reports.push(cbd_check(sys, check, max_columns, &mut verdict)?);
            }
        }
    }
    Ok(Report {
        version: env!("CARGO_PKG_VERSION"),
        input: match input {
            Input::Scenario(_) => "scenario",
            Input::Cbd(_) => "cbd",
        },
        verdict,
        checks: reports,
    })
}

fn scenario_check(
    m: &EmpiricalModel,
    sm: &SupportModel,
    check: Check,
    max_columns: u64,
    verdict: &mut VerdictSummary,
) -> Result<CheckReport, CliError> {
    let sc = &m.scenario;
    Ok(match check {
        Check::Signalling => {
            let report = signalling_report(m);
            verdict.signalling = Some(report.is_signalling());
            CheckReport::Signalling {
                signalling: report.is_signalling(),
                violations: report
                    .violations
                    .iter()
                    .map(|v| ViolationEntry {
                        context_a: sc.context_key(&sc.cover[v.context_i]),
                        context_b: sc.context_key(&sc.cover[v.context_j]),
                        section: sc.section_label(&v.section),
                        weight_a: v.p_i.to_string(),
                        weight_b: v.p_j.to_string(),
                    })
                    .collect(),
            }
        }
        Check::Logical => {
            let witnesses = logical_witnesses(sm);
            verdict.logically_contextual = Some(!witnesses.is_empty());
            CheckReport::Logical {
                logically_contextual: !witnesses.is_empty(),
                witnesses: witnesses
                    .iter()
                    .map(|(i, s)| SectionEntry {
                        context: sc.context_key(&sc.cover[*i]),
                        section: sc.section_label(s),
                    })
                    .collect(),
            }
        }
        Check::Strong => {
            let global = first_global_section(sm);
            verdict.strongly_contextual = Some(global.is_none());
            CheckReport::Strong {
                strongly_contextual: global.is_none(),
                global_section: global.map(|g| sc.section_label(&g)),
            }
        }
        Check::Lp => match noncontextuality_lp(m, max_columns)? {
            NcLpOutcome::Feasible { joint } => {
                verdict.probabilistically_contextual = Some(false);
                CheckReport::Lp {
                    feasible: true,
                    joint: Some(weight_map(sc, joint.weights.iter())),
                    certificate: None,
                }
            }
            NcLpOutcome::Infeasible { certificate } => {
                verdict.probabilistically_contextual = Some(true);
                let rows = certificate
                    .rows
                    .iter()
                    .zip(&certificate.farkas)
                    .filter(|(_, y)| !y.is_zero())
                    .map(|((i, s), y)| CertificateRow {
                        context: sc.context_key(&sc.cover[*i]),
                        section: sc.section_label(s),
                        coefficient: y.to_string(),
                    })
                    .collect();
                CheckReport::Lp {
                    feasible: false,
                    joint: None,
                    certificate: Some(rows),
                }
            }
        },
        Check::Fraction => match contextual_fraction(m, max_columns)? {
            CfOutcome::Computed(report) => {
                verdict.contextual_fraction = Some(report.fraction.to_string());
                CheckReport::Fraction {
                    confounded: false,
                    fraction: Some(report.fraction.to_string()),
                    noncontextual_weight: Some(report.noncontextual_weight.to_string()),
                    subdistribution: Some(weight_map(sc, report.subdistribution.iter().map(
                        |(s, w)| (s, w),
                    ))),
                    violations: None,
                }
            }
            CfOutcome::Confounded { violations } => CheckReport::Fraction {
                confounded: true,
                fraction: None,
                noncontextual_weight: None,
                subdistribution: None,
                violations: Some(violations),
            },
        },
        Check::Cech => {
            let mut sections = Vec::new();
            let mut obstructed = 0usize;
            for (i, support) in sm.supports.iter().enumerate() {
                for s in support {
                    let result = obstruction(sm, s)?;
                    if !result.vanishes {
                        obstructed += 1;
                    }
                    sections.push(ObstructionEntry {
                        context: sc.context_key(&sc.cover[i]),
                        section: sc.section_label(s),
                        vanishes: result.vanishes,
                        witness: result.witness.map(|family| {
                            family
                                .coefficients
                                .iter()
                                .map(|v| v.iter().map(|z| z.to_string()).collect())
                                .collect()
                        }),
                    });
                }
            }
            verdict.obstructed_sections = Some(obstructed);
            CheckReport::Cech {
                supported: sections.len(),
                obstructed,
                note: sections
                    .iter()
                    .any(|entry| entry.vanishes)
                    .then_some(ONE_SIDEDNESS_NOTE),
                sections,
            }
        }
        Check::Cbd | Check::Qq => unreachable!("rejected by select_checks"),
    })
}

fn cbd_check(
    sys: &CbdSystem,
    check: Check,
    max_columns: u64,
    verdict: &mut VerdictSummary,
) -> Result<CheckReport, CliError> {
    Ok(match check {
        Check::Cbd => {
            let outcome = cbd_contextual(sys, max_columns)?;
            let cyclic = match cyclic_criterion(sys) {
                Ok(report) => Some(report),
                Err(Error::Invalid(_)) => None,
                Err(e) => return Err(e.into()),
            };
            verdict.cbd_contextual = Some(outcome.contextual);
            verdict.direct_influence = Some(outcome.delta.to_string());
            CheckReport::Cbd {
                contextual: outcome.contextual,
                delta: outcome.delta.to_string(),
                cyclic: cyclic.map(|r| CyclicEntry {
                    rank: r.rank,
                    correlations: r.correlations.iter().map(Rational::to_string).collect(),
                    delta: r.delta.to_string(),
                    d: r.d.to_string(),
                    contextual: r.contextual,
                }),
                coupling: outcome.coupling.map(|c| CouplingEntry {
                    slots: c
                        .slots
                        .iter()
                        .map(|(ctx, pos)| {
                            let context = &sys.contexts[*ctx];
                            format!("{}:{}", context.id, sys.contents[context.measures[*pos]])
                        })
                        .collect(),
                    weights: c
                        .weights
                        .iter()
                        .filter(|(_, w)| !w.is_zero())
                        .map(|(pattern, w)| (pattern_key(pattern), w.to_string()))
                        .collect(),
                }),
                certificate: outcome.certificate.map(|cert| {
                    cert.rows
                        .iter()
                        .zip(&cert.farkas)
                        .filter(|(_, y)| !y.is_zero())
                        .map(|(row, y)| match row {
                            CouplingRow::Table { context, pattern } => CbdCertificateRow::Table {
                                context: sys.contexts[*context].id.clone(),
                                pattern: pattern_key(pattern),
                                coefficient: y.to_string(),
                            },
                            CouplingRow::Alignment {
                                content,
                                context_a,
                                context_b,
                            } => CbdCertificateRow::Alignment {
                                content: sys.contents[*content].clone(),
                                context_a: sys.contexts[*context_a].id.clone(),
                                context_b: sys.contexts[*context_b].id.clone(),
                                coefficient: y.to_string(),
                            },
                        })
                        .collect()
                }),
            }
        }
        Check::Qq => {
            let data = order_effect_view(sys)?;
            let q = qq_statistic(&data);
            verdict.qq = Some(q.to_string());
            CheckReport::Qq {
                q: q.to_string(),
                content_a: data.content_a.clone(),
                content_b: data.content_b.clone(),
                table_ab: order_table_map(&data.table_ab),
                table_ba: order_table_map(&data.table_ba),
            }
        }
        _ => unreachable!("rejected by select_checks"),
    })
}

fn weight_map<'a>(
    sc: &Scenario,
    entries: impl Iterator<Item = (&'a Section, &'a Rational)>,
) -> BTreeMap<String, String> {
    entries
        .filter(|(_, w)| !w.is_zero())
        .map(|(s, w)| (sc.section_label(s), w.to_string()))
        .collect()
}

fn pattern_key(pattern: &[bool]) -> String {
    pattern
        .iter()
        .map(|b| if *b { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(",")
}

fn order_table_map(table: &BTreeMap<(bool, bool), Rational>) -> BTreeMap<String, String> {
    table
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|((first, second), w)| {
            (
                format!(
                    "{},{}",
                    if *first { "1" } else { "0" },
                    if *second { "1" } else { "0" }
                ),
                w.to_string(),
            )
        })
        .collect()
}
