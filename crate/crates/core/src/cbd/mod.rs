//! Contextuality-by-Default analysis for inconsistently connected systems.
//!
//! Here a measurement of the same content in two different contexts is two
//! different random variables. A system is contextual when no single joint
//! distribution (a coupling) both reproduces every context table and aligns
//! same-content variables as much as their marginals allow. Alignment is
//! the multimaximal condition: for every pair of contexts sharing a
//! content, the coupling puts probability `min(p, p')` on both variables
//! being 1. Direct influence (unequal marginals across a connection) is
//! measured separately by the delta statistic and never conflated with
//! contextuality.
//!
//! The module also carries the question-order tooling: sequential yes/no
//! tables in both orders, the QQ statistic, and an exact quantum generator
//! for projector-valued sequential measurements.

pub mod quantum;

pub use quantum::{quantum_order_model, SurdMatrix};

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpResult, RationalMatrix, Relation};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::scenario::{
    Context, Distribution, EmpiricalModel, Observable, ObsId, OutcomeId, Scenario, Section,
};

/// One context of a CbD system: an ordered list of contents measured
/// together and an exact joint table over their binary outcomes. Patterns
/// are indexed in `measures` order; zero-weight rows are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbdContext {
    pub id: String,
    pub measures: Vec<usize>,
    pub table: BTreeMap<Vec<bool>, Rational>,
}

impl CbdContext {
    pub fn weight(&self, pattern: &[bool]) -> Rational {
        self.table.get(pattern).cloned().unwrap_or_else(Rational::zero)
    }

    /// `P(R_q^c = 1)` for the content at position `pos` of `measures`.
    pub fn marginal(&self, pos: usize) -> Rational {
        let mut p = Rational::zero();
        for (pattern, w) in &self.table {
            if pattern[pos] {
                p += w;
            }
        }
        p
    }
}

/// A system of binary context-indexed random variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbdSystem {
    pub contents: Vec<String>,
    pub contexts: Vec<CbdContext>,
}

/// Returns every invariant violation of the system as human-readable
/// strings; empty means valid.
pub fn validate_cbd_system(sys: &CbdSystem) -> Vec<String> {
    let mut out = Vec::new();
    if sys.contents.is_empty() {
        out.push("system declares no contents".to_string());
    }
    let mut seen = BTreeSet::new();
    for c in &sys.contents {
        if c.is_empty() {
            out.push("content ids must be non-empty".to_string());
        }
        if !seen.insert(c) {
            out.push(format!("duplicate content id {c:?}"));
        }
    }
    if sys.contexts.is_empty() {
        out.push("system declares no contexts".to_string());
    }
    let mut ids = BTreeSet::new();
    let mut covered = vec![false; sys.contents.len()];
    for ctx in &sys.contexts {
        if ctx.id.is_empty() {
            out.push("context ids must be non-empty".to_string());
        }
        if !ids.insert(&ctx.id) {
            out.push(format!("duplicate context id {:?}", ctx.id));
        }
        if ctx.measures.is_empty() {
            out.push(format!("context {:?} measures nothing", ctx.id));
        }
        let mut local = BTreeSet::new();
        for &q in &ctx.measures {
            if q >= sys.contents.len() {
                out.push(format!("context {:?} references an unknown content", ctx.id));
            } else {
                covered[q] = true;
                if !local.insert(q) {
                    out.push(format!(
                        "context {:?} measures content {:?} twice",
                        ctx.id, sys.contents[q]
                    ));
                }
            }
        }
        let mut sum = Rational::zero();
        for (pattern, w) in &ctx.table {
            if pattern.len() != ctx.measures.len() {
                out.push(format!("context {:?} has a row of wrong arity", ctx.id));
            }
            if !w.is_positive() {
                out.push(format!(
                    "context {:?} stores a non-positive weight",
                    ctx.id
                ));
            }
            sum += w;
        }
        if !sum.is_one() {
            out.push(format!(
                "table for context {:?} sums to {}, not 1",
                ctx.id,
                format_rational(&sum)
            ));
        }
    }
    for (q, c) in covered.iter().zip(&sys.contents) {
        if !q {
            out.push(format!("content {c:?} appears in no context"));
        }
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CbdFile {
    contents: Vec<String>,
    contexts: Vec<CbdContextFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CbdContextFile {
    id: String,
    measures: Vec<String>,
    table: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct CbdFileOut<'a> {
    contents: &'a [String],
    contexts: Vec<CbdContextOut<'a>>,
}

#[derive(Serialize)]
struct CbdContextOut<'a> {
    id: &'a str,
    measures: Vec<&'a str>,
    table: BTreeMap<String, String>,
}

/// Parses a CbD system file. JSON shape errors and unparseable rational
/// strings are `Syntax`; semantic violations are `Invalid`. Zero-weight
/// rows are accepted and dropped.
pub fn parse_cbd(text: &str) -> Result<CbdSystem> {
    let file: CbdFile =
        serde_json::from_str(text).map_err(|e| Error::syntax(format!("cbd file: {e}")))?;
    let index: BTreeMap<&str, usize> = file
        .contents
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    if index.len() != file.contents.len() {
        return Err(Error::invalid("duplicate content id"));
    }
    let mut contexts = Vec::with_capacity(file.contexts.len());
    for cf in &file.contexts {
        let mut measures = Vec::with_capacity(cf.measures.len());
        for name in &cf.measures {
            let &q = index
                .get(name.as_str())
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "context {:?} measures unknown content {name:?}",
                        cf.id
                    ))
                })?;
            measures.push(q);
        }
        let mut table = BTreeMap::new();
        for (key, value) in &cf.table {
            let mut pattern = Vec::with_capacity(measures.len());
            for token in key.split(',') {
                match token {
                    "0" => pattern.push(false),
                    "1" => pattern.push(true),
                    _ => {
                        return Err(Error::invalid(format!(
                            "context {:?} row key {key:?} must use outcomes 0 and 1",
                            cf.id
                        )))
                    }
                }
            }
            if pattern.len() != measures.len() {
                return Err(Error::invalid(format!(
                    "context {:?} row key {key:?} has the wrong arity",
                    cf.id
                )));
            }
            let w = parse_rational(value).ok_or_else(|| {
                Error::syntax(format!("unparseable rational {value:?} in context {:?}", cf.id))
            })?;
            if w.is_negative() {
                return Err(Error::invalid(format!(
                    "negative weight in context {:?}",
                    cf.id
                )));
            }
            if !w.is_zero() && table.insert(pattern, w).is_some() {
                return Err(Error::internal("map keys cannot repeat"));
            }
        }
        contexts.push(CbdContext {
            id: cf.id.clone(),
            measures,
            table,
        });
    }
    let sys = CbdSystem {
        contents: file.contents,
        contexts,
    };
    let violations = validate_cbd_system(&sys);
    if let Some(first) = violations.first() {
        return Err(Error::invalid(first.clone()));
    }
    Ok(sys)
}

/// Serializes a system in the canonical file layout; `parse_cbd` of the
/// result reproduces the system exactly.
pub fn serialize_cbd(sys: &CbdSystem) -> String {
    let contexts = sys
        .contexts
        .iter()
        .map(|ctx| {
            let table = ctx
                .table
                .iter()
                .map(|(pattern, w)| {
                    let key = pattern
                        .iter()
                        .map(|&b| if b { "1" } else { "0" })
                        .collect::<Vec<_>>()
                        .join(",");
                    (key, format_rational(w))
                })
                .collect();
            CbdContextOut {
                id: &ctx.id,
                measures: ctx
                    .measures
                    .iter()
                    .map(|&q| sys.contents[q].as_str())
                    .collect(),
                table,
            }
        })
        .collect();
    let out = CbdFileOut {
        contents: &sys.contents,
        contexts,
    };
    serde_json::to_string_pretty(&out).expect("cbd serialization cannot fail")
}

/// All contexts measuring one content, with the per-context marginals
/// `P(R_q^c = 1)`. A connection is genuine when it spans at least two
/// contexts; singleton connections are still listed for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub content: usize,
    pub contexts: Vec<usize>,
    pub marginals: Vec<Rational>,
}

pub fn connections(sys: &CbdSystem) -> Vec<Connection> {
    (0..sys.contents.len())
        .map(|q| {
            let mut contexts = Vec::new();
            let mut marginals = Vec::new();
            for (k, ctx) in sys.contexts.iter().enumerate() {
                if let Some(pos) = ctx.measures.iter().position(|&m| m == q) {
                    contexts.push(k);
                    marginals.push(ctx.marginal(pos));
                }
            }
            Connection {
                content: q,
                contexts,
                marginals,
            }
        })
        .collect()
}

/// One multimaximality equation: the coupling mass on both variables being
/// 1 equals the smaller marginal, the largest value any joint of the two
/// can achieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultimaximalConstraint {
    pub content: usize,
    pub context_a: usize,
    pub context_b: usize,
    pub both_one: Rational,
}

/// The multimaximal constraints of a connection, one per unordered pair of
/// its contexts.
pub fn multimaximal_constraints(conn: &Connection) -> Vec<MultimaximalConstraint> {
    let mut out = Vec::new();
    for i in 0..conn.contexts.len() {
        for j in i + 1..conn.contexts.len() {
            let both_one = conn.marginals[i].clone().min(conn.marginals[j].clone());
            out.push(MultimaximalConstraint {
                content: conn.content,
                context_a: conn.contexts[i],
                context_b: conn.contexts[j],
                both_one,
            });
        }
    }
    out
}

/// Total direct influence: for each connection, the largest gap
/// `|<R_q^c> - <R_q^c'>|` between expectations (`<R> = 2p - 1`) over its
/// context pairs, summed over contents.
pub fn direct_influence_delta(sys: &CbdSystem) -> Rational {
    let two = Rational::from_integer(2.into());
    connections(sys)
        .iter()
        .map(|conn| {
            if conn.marginals.len() < 2 {
                return Rational::zero();
            }
            let max = conn.marginals.iter().max().expect("non-empty");
            let min = conn.marginals.iter().min().expect("non-empty");
            &two * &(max - min)
        })
        .sum()
}

/// The slot layout of a coupling: one binary variable per (context,
/// measure-position) pair, in context order then position order.
pub fn coupling_slots(sys: &CbdSystem) -> Vec<(usize, usize)> {
    let mut slots = Vec::new();
    for (k, ctx) in sys.contexts.iter().enumerate() {
        for p in 0..ctx.measures.len() {
            slots.push((k, p));
        }
    }
    slots
}

/// A coupling found by the LP: a distribution over complete assignments to
/// every slot variable, nonzero atoms only, each atom keyed by its slot
/// values in [`coupling_slots`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbdCoupling {
    pub slots: Vec<(usize, usize)>,
    pub weights: BTreeMap<Vec<bool>, Rational>,
}

/// Label of one row of the coupling LP, for rendering certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CouplingRow {
    /// Reproduce one pattern probability of one context table.
    Table { context: usize, pattern: Vec<bool> },
    /// One multimaximal alignment equation.
    Alignment {
        content: usize,
        context_a: usize,
        context_b: usize,
    },
}

/// A verified Farkas certificate for the coupling program.
#[derive(Debug, Clone)]
pub struct CbdCertificate {
    pub farkas: Vec<Rational>,
    pub rows: Vec<CouplingRow>,
}

/// Verdict of the coupling-existence analysis. The delta statistic is
/// always reported: direct influence is a distinct quantity and is never
/// folded into the contextuality flag.
#[derive(Debug, Clone)]
pub struct CouplingVerdict {
    pub contextual: bool,
    pub coupling: Option<CbdCoupling>,
    pub certificate: Option<CbdCertificate>,
    pub delta: Rational,
}

/// Checks a coupling by direct arithmetic, independent of the solver path:
/// weights form a distribution, every context table is reproduced exactly,
/// and every multimaximal equality holds exactly.
pub fn verify_coupling(sys: &CbdSystem, coupling: &CbdCoupling) -> Result<()> {
    let slots = coupling_slots(sys);
    if coupling.slots != slots {
        return Err(Error::internal("coupling has an unexpected slot layout"));
    }
    let mut total = Rational::zero();
    for (atom, w) in &coupling.weights {
        if atom.len() != slots.len() {
            return Err(Error::internal("coupling atom has the wrong length"));
        }
        if w.is_negative() {
            return Err(Error::internal("coupling carries a negative weight"));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(Error::internal("coupling weights do not sum to 1"));
    }
    let mut offset = Vec::with_capacity(sys.contexts.len());
    let mut acc = 0usize;
    for ctx in &sys.contexts {
        offset.push(acc);
        acc += ctx.measures.len();
    }
    for (k, ctx) in sys.contexts.iter().enumerate() {
        let mut marginal: BTreeMap<Vec<bool>, Rational> = BTreeMap::new();
        for (atom, w) in &coupling.weights {
            let pattern = atom[offset[k]..offset[k] + ctx.measures.len()].to_vec();
            *marginal.entry(pattern).or_insert_with(Rational::zero) += w;
        }
        marginal.retain(|_, w| !w.is_zero());
        if marginal != ctx.table {
            return Err(Error::internal(format!(
                "coupling does not reproduce the table of context {:?}",
                ctx.id
            )));
        }
    }
    for conn in connections(sys) {
        for c in multimaximal_constraints(&conn) {
            let pos_a = sys.contexts[c.context_a]
                .measures
                .iter()
                .position(|&m| m == c.content)
                .expect("connection context measures the content");
            let pos_b = sys.contexts[c.context_b]
                .measures
                .iter()
                .position(|&m| m == c.content)
                .expect("connection context measures the content");
            let slot_a = offset[c.context_a] + pos_a;
            let slot_b = offset[c.context_b] + pos_b;
            let mut mass = Rational::zero();
            for (atom, w) in &coupling.weights {
                if atom[slot_a] && atom[slot_b] {
                    mass += w;
                }
            }
            if mass != c.both_one {
                return Err(Error::internal(format!(
                    "coupling violates the alignment of content {:?} between contexts {:?} and {:?}",
                    sys.contents[c.content],
                    sys.contexts[c.context_a].id,
                    sys.contexts[c.context_b].id
                )));
            }
        }
    }
    Ok(())
}

/// Decides coupling existence by exact LP: one column per complete slot
/// assignment, equality rows for every context-table pattern (including
/// zero-weight patterns) and every multimaximal constraint. Returned
/// couplings pass [`verify_coupling`]; infeasibility comes with a verified
/// Farkas certificate over labeled rows.
pub fn cbd_contextual(sys: &CbdSystem, max_columns: u64) -> Result<CouplingVerdict> {
    let violations = validate_cbd_system(sys);
    if let Some(first) = violations.first() {
        return Err(Error::invalid(first.clone()));
    }
    let slots = coupling_slots(sys);
    let s = slots.len();
    let needed = 1u128.checked_shl(s as u32).unwrap_or(u128::MAX);
    if needed > u128::from(max_columns) {
        return Err(Error::TooLarge {
            what: "coupling atom set",
            needed,
            cap: max_columns,
        });
    }
    let n_atoms = 1usize << s;
    let atom_bit = |atom: usize, slot: usize| (atom >> (s - 1 - slot)) & 1 == 1;

    let mut offset = Vec::with_capacity(sys.contexts.len());
    let mut acc = 0usize;
    for ctx in &sys.contexts {
        offset.push(acc);
        acc += ctx.measures.len();
    }

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for (k, ctx) in sys.contexts.iter().enumerate() {
        let m = ctx.measures.len();
        for pidx in 0..(1usize << m) {
            let pattern: Vec<bool> = (0..m).map(|p| (pidx >> (m - 1 - p)) & 1 == 1).collect();
            let mut row = vec![Rational::zero(); n_atoms];
            for (atom, entry) in row.iter_mut().enumerate() {
                if (0..m).all(|p| atom_bit(atom, offset[k] + p) == pattern[p]) {
                    *entry = Rational::one();
                }
            }
            rhs.push(ctx.weight(&pattern));
            labels.push(CouplingRow::Table {
                context: k,
                pattern,
            });
            rows.push(row);
        }
    }
    for conn in connections(sys) {
        for c in multimaximal_constraints(&conn) {
            let pos_a = sys.contexts[c.context_a]
                .measures
                .iter()
                .position(|&m| m == c.content)
                .expect("connection context measures the content");
            let pos_b = sys.contexts[c.context_b]
                .measures
                .iter()
                .position(|&m| m == c.content)
                .expect("connection context measures the content");
            let slot_a = offset[c.context_a] + pos_a;
            let slot_b = offset[c.context_b] + pos_b;
            let mut row = vec![Rational::zero(); n_atoms];
            for (atom, entry) in row.iter_mut().enumerate() {
                if atom_bit(atom, slot_a) && atom_bit(atom, slot_b) {
                    *entry = Rational::one();
                }
            }
            rhs.push(c.both_one.clone());
            labels.push(CouplingRow::Alignment {
                content: c.content,
                context_a: c.context_a,
                context_b: c.context_b,
            });
            rows.push(row);
        }
    }

    let matrix = RationalMatrix::from_rows(rows)?;
    let relations = vec![Relation::Eq; matrix.rows()];
    let problem = LpProblem::feasibility(matrix, relations, rhs);
    let delta = direct_influence_delta(sys);
    match lp::solve_lp(&problem)? {
        LpResult::Optimal { solution, .. } => {
            let mut weights = BTreeMap::new();
            for (atom, w) in solution.into_iter().enumerate() {
                if !w.is_zero() {
                    let pattern: Vec<bool> = (0..s).map(|slot| atom_bit(atom, slot)).collect();
                    weights.insert(pattern, w);
                }
            }
            let coupling = CbdCoupling {
                slots,
                weights,
            };
            verify_coupling(sys, &coupling)?;
            Ok(CouplingVerdict {
                contextual: false,
                coupling: Some(coupling),
                certificate: None,
                delta,
            })
        }
        LpResult::Infeasible { farkas } => Ok(CouplingVerdict {
            contextual: true,
            coupling: None,
            certificate: Some(CbdCertificate {
                farkas,
                rows: labels,
            }),
            delta,
        }),
        LpResult::Unbounded => Err(Error::internal(
            "feasibility program cannot be unbounded",
        )),
    }
}

/// Result of the cyclic-system criterion.
#[derive(Debug, Clone)]
pub struct CyclicReport {
    pub rank: usize,
    /// `<R_q R_q'>` per context, in context order, under the recoding
    /// `1 -> +1`, `0 -> -1`.
    pub correlations: Vec<Rational>,
    pub delta: Rational,
    pub d: Rational,
    pub contextual: bool,
}

/// Maximum of `sum(eps_k * x_k)` over sign vectors with an odd number of
/// negative signs.
fn s_odd(values: &[Rational]) -> Rational {
    let total: Rational = values.iter().map(|v| v.abs()).sum();
    let negatives = values.iter().filter(|v| v.is_negative()).count();
    if negatives % 2 == 1 {
        return total;
    }
    let min_abs = values
        .iter()
        .map(|v| v.abs())
        .min()
        .expect("cyclic systems have at least two contexts");
    let two = Rational::from_integer(2.into());
    total - two * min_abs
}

/// Fast path for cyclic binary systems: rank n, each context measuring
/// exactly two contents, each content in exactly two contexts, a single
/// cycle. Computes `D = s_odd(correlations) - (n - 2) - delta`; the system
/// is contextual exactly when `D > 0`. Agreement with [`cbd_contextual`]
/// on every cyclic input is a tested property.
pub fn cyclic_criterion(sys: &CbdSystem) -> Result<CyclicReport> {
    let violations = validate_cbd_system(sys);
    if let Some(first) = violations.first() {
        return Err(Error::invalid(first.clone()));
    }
    let n = sys.contexts.len();
    if n < 2 || sys.contents.len() != n {
        return Err(Error::invalid(
            "cyclic systems need equally many contents and contexts, at least two",
        ));
    }
    for ctx in &sys.contexts {
        if ctx.measures.len() != 2 || ctx.measures[0] == ctx.measures[1] {
            return Err(Error::invalid(format!(
                "context {:?} does not measure exactly two distinct contents",
                ctx.id
            )));
        }
    }
    let mut degree = vec![0usize; n];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for ctx in &sys.contexts {
        let (a, b) = (ctx.measures[0], ctx.measures[1]);
        degree[a] += 1;
        degree[b] += 1;
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    if degree.iter().any(|&d| d != 2) {
        return Err(Error::invalid(
            "every content of a cyclic system appears in exactly two contexts",
        ));
    }
    let mut visited = vec![false; n];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(q) = stack.pop() {
        for &r in &adjacency[q] {
            if !visited[r] {
                visited[r] = true;
                stack.push(r);
            }
        }
    }
    if visited.iter().any(|v| !v) {
        return Err(Error::invalid(
            "the contexts of a cyclic system must form a single cycle",
        ));
    }

    let correlations: Vec<Rational> = sys
        .contexts
        .iter()
        .map(|ctx| {
            let mut corr = Rational::zero();
            for (pattern, w) in &ctx.table {
                if pattern[0] == pattern[1] {
                    corr += w;
                } else {
                    corr -= w;
                }
            }
            corr
        })
        .collect();
    let delta = direct_influence_delta(sys);
    let n_minus_2 = Rational::from_integer(BigInt::from(n) - 2);
    let d = s_odd(&correlations) - n_minus_2 - &delta;
    let contextual = d.is_positive();
    Ok(CyclicReport {
        rank: n,
        correlations,
        delta,
        d,
        contextual,
    })
}

/// Sequential yes/no measurement data in both orders. Table keys are
/// (first answer, second answer) in the asked order of that table: the
/// `a_then_b` table is keyed (answer to a, answer to b) and the `b_then_a`
/// table is keyed (answer to b, answer to a).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderEffectData {
    pub content_a: String,
    pub content_b: String,
    pub table_ab: BTreeMap<(bool, bool), Rational>,
    pub table_ba: BTreeMap<(bool, bool), Rational>,
}

fn order_table_weight(table: &BTreeMap<(bool, bool), Rational>, key: (bool, bool)) -> Rational {
    table.get(&key).cloned().unwrap_or_else(Rational::zero)
}

fn validate_order_table(
    table: &BTreeMap<(bool, bool), Rational>,
    which: &str,
) -> Result<()> {
    let mut sum = Rational::zero();
    for w in table.values() {
        if w.is_negative() {
            return Err(Error::invalid(format!(
                "negative weight in the {which} table"
            )));
        }
        sum += w;
    }
    if !sum.is_one() {
        return Err(Error::invalid(format!(
            "the {which} table sums to {}, not 1",
            format_rational(&sum)
        )));
    }
    Ok(())
}

/// Builds the cyclic rank-2 CbD system of an order-effect experiment:
/// contents {a, b}, context "AB" measuring (a, b) and context "BA"
/// measuring (b, a), tables copied.
pub fn build_order_effect_system(d: &OrderEffectData) -> Result<CbdSystem> {
    if d.content_a.is_empty() || d.content_b.is_empty() || d.content_a == d.content_b {
        return Err(Error::invalid(
            "order-effect data needs two distinct non-empty content ids",
        ));
    }
    validate_order_table(&d.table_ab, "first-order")?;
    validate_order_table(&d.table_ba, "second-order")?;
    let strip = |table: &BTreeMap<(bool, bool), Rational>| {
        table
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&(x, y), w)| (vec![x, y], w.clone()))
            .collect::<BTreeMap<_, _>>()
    };
    Ok(CbdSystem {
        contents: vec![d.content_a.clone(), d.content_b.clone()],
        contexts: vec![
            CbdContext {
                id: "AB".to_string(),
                measures: vec![0, 1],
                table: strip(&d.table_ab),
            },
            CbdContext {
                id: "BA".to_string(),
                measures: vec![1, 0],
                table: strip(&d.table_ba),
            },
        ],
    })
}

/// Reads an order-effect experiment back out of a CbD system: exactly two
/// contexts over the same two contents in opposite orders. The first
/// context defines the A-then-B order.
pub fn order_effect_view(sys: &CbdSystem) -> Result<OrderEffectData> {
    if sys.contexts.len() != 2 || sys.contents.len() != 2 {
        return Err(Error::invalid(
            "an order-effect system has exactly two contents and two contexts",
        ));
    }
    let first = &sys.contexts[0];
    let second = &sys.contexts[1];
    if first.measures.len() != 2
        || second.measures.len() != 2
        || first.measures[0] == first.measures[1]
        || second.measures[0] != first.measures[1]
        || second.measures[1] != first.measures[0]
    {
        return Err(Error::invalid(
            "order-effect contexts must measure the same two contents in opposite orders",
        ));
    }
    let unpack = |ctx: &CbdContext| {
        ctx.table
            .iter()
            .map(|(pattern, w)| ((pattern[0], pattern[1]), w.clone()))
            .collect::<BTreeMap<_, _>>()
    };
    Ok(OrderEffectData {
        content_a: sys.contents[first.measures[0]].clone(),
        content_b: sys.contents[first.measures[1]].clone(),
        table_ab: unpack(first),
        table_ba: unpack(second),
    })
}

/// The question-order statistic
/// `q = [p_AB(yy) + p_AB(nn)] - [p_BA(yy) + p_BA(nn)]`. Both terms are
/// order-symmetric in their keys, so the asked-order keying of the tables
/// does not matter here. `q = 0` is the QQ equality.
pub fn qq_statistic(d: &OrderEffectData) -> Rational {
    let same = |t: &BTreeMap<(bool, bool), Rational>| {
        order_table_weight(t, (true, true)) + order_table_weight(t, (false, false))
    };
    same(&d.table_ab) - same(&d.table_ba)
}

/// Re-expresses a CbD system as an empirical model over its contents,
/// forgetting the context indexing of the variables. Fails when the
/// context sets do not form a valid cover (for instance two contexts over
/// the same content pair). For consistently connected systems this is the
/// bridge to the standard noncontextuality LP.
pub fn to_empirical_model(sys: &CbdSystem) -> Result<EmpiricalModel> {
    let observables = sys
        .contents
        .iter()
        .map(|id| Observable {
            id: id.clone(),
            outcomes: vec!["0".to_string(), "1".to_string()],
        })
        .collect();
    let mut cover = Vec::with_capacity(sys.contexts.len());
    let mut tables = Vec::with_capacity(sys.contexts.len());
    for ctx in &sys.contexts {
        let context = Context::new(ctx.measures.iter().map(|&q| ObsId(q)).collect());
        let rows = ctx
            .table
            .iter()
            .map(|(pattern, w)| {
                let values = context
                    .members()
                    .iter()
                    .map(|o| {
                        let pos = ctx
                            .measures
                            .iter()
                            .position(|&q| q == o.0)
                            .expect("member comes from measures");
                        OutcomeId(usize::from(pattern[pos]))
                    })
                    .collect();
                (
                    Section {
                        context: context.clone(),
                        values,
                    },
                    w.clone(),
                )
            })
            .collect();
        tables.push(Distribution::new(context.clone(), rows)?);
        cover.push(context);
    }
    EmpiricalModel::new(
        Scenario {
            observables,
            cover,
        },
        tables,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lp::DEFAULT_MAX_COLUMNS;
    use crate::rational::ratio;

    #[test]
    fn parse_and_serialize_round_trip() {
        let sys = fixtures::qorder_zx();
        let text = serialize_cbd(&sys);
        let back = parse_cbd(&text).unwrap();
        assert_eq!(back, sys);
        assert_eq!(serialize_cbd(&back), text);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let unknown_content = r#"{"contents":["a"],"contexts":[{"id":"X","measures":["b"],"table":{"1":"1"}}]}"#;
        assert!(matches!(
            parse_cbd(unknown_content),
            Err(Error::Invalid(_))
        ));

        let bad_key = r#"{"contents":["a"],"contexts":[{"id":"X","measures":["a"],"table":{"2":"1"}}]}"#;
        assert!(matches!(parse_cbd(bad_key), Err(Error::Invalid(_))));

        let bad_arity = r#"{"contents":["a"],"contexts":[{"id":"X","measures":["a"],"table":{"1,1":"1"}}]}"#;
        assert!(matches!(parse_cbd(bad_arity), Err(Error::Invalid(_))));

        let bad_rational = r#"{"contents":["a"],"contexts":[{"id":"X","measures":["a"],"table":{"1":"0.5"}}]}"#;
        assert!(matches!(parse_cbd(bad_rational), Err(Error::Syntax(_))));

        let bad_sum = r#"{"contents":["a"],"contexts":[{"id":"X","measures":["a"],"table":{"1":"1/2"}}]}"#;
        assert!(matches!(parse_cbd(bad_sum), Err(Error::Invalid(_))));

        let unknown_field = r#"{"contents":["a"],"contexts":[],"extra":1}"#;
        assert!(matches!(parse_cbd(unknown_field), Err(Error::Syntax(_))));

        let duplicate_id = r#"{"contents":["a","b"],"contexts":[
            {"id":"X","measures":["a"],"table":{"1":"1"}},
            {"id":"X","measures":["b"],"table":{"1":"1"}}]}"#;
        assert!(matches!(parse_cbd(duplicate_id), Err(Error::Invalid(_))));
    }

    #[test]
    fn connections_of_the_zx_system() {
        let sys = fixtures::qorder_zx();
        let conns = connections(&sys);
        assert_eq!(conns.len(), 2);
        assert_eq!(conns[0].contexts, vec![0, 1]);
        assert_eq!(conns[0].marginals, vec![ratio(1, 1), ratio(1, 2)]);
        assert_eq!(conns[1].contexts, vec![0, 1]);
        assert_eq!(conns[1].marginals, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn multimaximal_examples() {
        let conn = Connection {
            content: 0,
            contexts: vec![0, 1],
            marginals: vec![ratio(1, 1), ratio(1, 2)],
        };
        let cs = multimaximal_constraints(&conn);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].both_one, ratio(1, 2));

        let equal = Connection {
            content: 0,
            contexts: vec![0, 1],
            marginals: vec![ratio(1, 3), ratio(1, 3)],
        };
        assert_eq!(multimaximal_constraints(&equal)[0].both_one, ratio(1, 3));

        let extreme = Connection {
            content: 0,
            contexts: vec![0, 1],
            marginals: vec![ratio(0, 1), ratio(1, 1)],
        };
        assert_eq!(multimaximal_constraints(&extreme)[0].both_one, ratio(0, 1));

        let singleton = Connection {
            content: 0,
            contexts: vec![0],
            marginals: vec![ratio(1, 2)],
        };
        assert!(multimaximal_constraints(&singleton).is_empty());
    }

    #[test]
    fn order_effect_system_construction() {
        let d = order_effect_fixture();
        let sys = build_order_effect_system(&d).unwrap();
        assert_eq!(sys, fixtures::qorder_zx());

        let deterministic = OrderEffectData {
            content_a: "a".into(),
            content_b: "b".into(),
            table_ab: BTreeMap::from([((true, true), ratio(1, 1))]),
            table_ba: BTreeMap::from([((true, true), ratio(1, 1))]),
        };
        let sys = build_order_effect_system(&deterministic).unwrap();
        for conn in connections(&sys) {
            assert_eq!(conn.marginals, vec![ratio(1, 1), ratio(1, 1)]);
        }

        let missing = OrderEffectData {
            content_a: "a".into(),
            content_b: "b".into(),
            table_ab: BTreeMap::from([((true, true), ratio(1, 1))]),
            table_ba: BTreeMap::new(),
        };
        assert!(build_order_effect_system(&missing).is_err());
    }

    fn order_effect_fixture() -> OrderEffectData {
        order_effect_view(&fixtures::qorder_zx()).unwrap()
    }

    #[test]
    fn zx_system_is_noncontextual_despite_direct_influence() {
        let sys = fixtures::qorder_zx();
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        assert!(!verdict.contextual);
        assert_eq!(verdict.delta, ratio(1, 1));
        let coupling = verdict.coupling.unwrap();
        verify_coupling(&sys, &coupling).unwrap();
    }

    #[test]
    fn tampered_coupling_is_rejected_by_the_verifier() {
        let sys = fixtures::qorder_zx();
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        let mut coupling = verdict.coupling.unwrap();
        let first = coupling.weights.keys().next().unwrap().clone();
        coupling.weights.remove(&first);
        assert!(verify_coupling(&sys, &coupling).is_err());
    }

    #[test]
    fn consistently_connected_prbox_system_is_contextual() {
        let sys = fixtures::cbd_prbox();
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        assert!(verdict.contextual);
        assert_eq!(verdict.delta, ratio(0, 1));
        assert!(verdict.certificate.is_some());
        assert_eq!(
            verdict.certificate.unwrap().rows.len(),
            4 * 4 + 4
        );
    }

    #[test]
    fn single_context_system_is_its_own_coupling() {
        let sys = CbdSystem {
            contents: vec!["a".into(), "b".into()],
            contexts: vec![CbdContext {
                id: "only".into(),
                measures: vec![0, 1],
                table: BTreeMap::from([
                    (vec![true, true], ratio(1, 3)),
                    (vec![false, false], ratio(2, 3)),
                ]),
            }],
        };
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        assert!(!verdict.contextual);
        assert_eq!(verdict.delta, ratio(0, 1));
    }

    #[test]
    fn cyclic_criterion_on_the_zx_system() {
        let report = cyclic_criterion(&fixtures::qorder_zx()).unwrap();
        assert_eq!(report.rank, 2);
        assert_eq!(report.correlations, vec![ratio(0, 1), ratio(0, 1)]);
        assert_eq!(report.delta, ratio(1, 1));
        assert_eq!(report.d, ratio(-1, 1));
        assert!(!report.contextual);
    }

    #[test]
    fn cyclic_criterion_on_the_prbox_system() {
        let report = cyclic_criterion(&fixtures::cbd_prbox()).unwrap();
        assert_eq!(report.rank, 4);
        assert_eq!(
            report.correlations,
            vec![ratio(1, 1), ratio(1, 1), ratio(1, 1), ratio(-1, 1)]
        );
        assert_eq!(report.delta, ratio(0, 1));
        assert_eq!(report.d, ratio(2, 1));
        assert!(report.contextual);
    }

    #[test]
    fn cyclic_criterion_on_independent_uniform_tables() {
        let uniform: BTreeMap<Vec<bool>, Rational> = [
            (vec![false, false], ratio(1, 4)),
            (vec![false, true], ratio(1, 4)),
            (vec![true, false], ratio(1, 4)),
            (vec![true, true], ratio(1, 4)),
        ]
        .into_iter()
        .collect();
        let sys = CbdSystem {
            contents: vec!["x".into(), "y".into(), "z".into()],
            contexts: vec![
                CbdContext {
                    id: "c1".into(),
                    measures: vec![0, 1],
                    table: uniform.clone(),
                },
                CbdContext {
                    id: "c2".into(),
                    measures: vec![1, 2],
                    table: uniform.clone(),
                },
                CbdContext {
                    id: "c3".into(),
                    measures: vec![2, 0],
                    table: uniform,
                },
            ],
        };
        let report = cyclic_criterion(&sys).unwrap();
        assert_eq!(report.d, ratio(-1, 1));
        assert!(!report.contextual);
    }

    #[test]
    fn cyclic_criterion_rejects_non_cyclic_systems() {
        // A content in three contexts breaks the degree condition.
        let uniform: BTreeMap<Vec<bool>, Rational> = [
            (vec![false, false], ratio(1, 4)),
            (vec![false, true], ratio(1, 4)),
            (vec![true, false], ratio(1, 4)),
            (vec![true, true], ratio(1, 4)),
        ]
        .into_iter()
        .collect();
        let sys = CbdSystem {
            contents: vec!["x".into(), "y".into(), "z".into()],
            contexts: vec![
                CbdContext {
                    id: "c1".into(),
                    measures: vec![0, 1],
                    table: uniform.clone(),
                },
                CbdContext {
                    id: "c2".into(),
                    measures: vec![0, 2],
                    table: uniform.clone(),
                },
                CbdContext {
                    id: "c3".into(),
                    measures: vec![0, 1],
                    table: uniform,
                },
            ],
        };
        assert!(cyclic_criterion(&sys).is_err());
    }

    #[test]
    fn qq_statistic_examples() {
        assert_eq!(qq_statistic(&order_effect_fixture()), ratio(0, 1));

        let symmetric = OrderEffectData {
            content_a: "a".into(),
            content_b: "b".into(),
            table_ab: BTreeMap::from([
                ((true, false), ratio(1, 2)),
                ((false, true), ratio(1, 2)),
            ]),
            table_ba: BTreeMap::from([
                ((true, false), ratio(1, 2)),
                ((false, true), ratio(1, 2)),
            ]),
        };
        assert_eq!(qq_statistic(&symmetric), ratio(0, 1));

        let still_equal = OrderEffectData {
            content_a: "a".into(),
            content_b: "b".into(),
            table_ab: BTreeMap::from([((true, true), ratio(1, 1))]),
            table_ba: BTreeMap::from([
                ((true, true), ratio(1, 2)),
                ((false, false), ratio(1, 2)),
            ]),
        };
        assert_eq!(qq_statistic(&still_equal), ratio(0, 1));
        let violating = OrderEffectData {
            content_a: "a".into(),
            content_b: "b".into(),
            table_ab: BTreeMap::from([((true, true), ratio(1, 1))]),
            table_ba: BTreeMap::from([
                ((true, true), ratio(1, 2)),
                ((true, false), ratio(1, 2)),
            ]),
        };
        assert_eq!(qq_statistic(&violating), ratio(1, 2));
    }

    #[test]
    fn prbox_system_converts_to_a_strongly_contextual_model() {
        let sys = fixtures::cbd_prbox();
        let model = to_empirical_model(&sys).unwrap();
        let sm = crate::glue::support_model(&model);
        assert!(crate::glue::first_global_section(&sm).is_none());
        let outcome = lp::noncontextuality_lp(&model, DEFAULT_MAX_COLUMNS).unwrap();
        assert!(!outcome.is_feasible());
    }

    #[test]
    fn rank_two_systems_do_not_convert() {
        // Two contexts over the same content pair collapse to a duplicate
        // cover element, which the scenario format rejects.
        assert!(to_empirical_model(&fixtures::qorder_zx()).is_err());
    }
}
