//! The presheaf engine: supports, overlap comparison, and global-section
//! search.
//!
//! A global assignment is consistent with a support model when its
//! restriction to every cover context is a supported section. Logical
//! contextuality means some supported section has no consistent global
//! extension; strong contextuality means no consistent global assignment
//! exists at all. Signalling (direct influence) is disagreement of overlap
//! marginals and is reported separately because it confounds the other
//! readings.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lp;
use crate::rational::Rational;
use crate::scenario::{marginalize, Context, EmpiricalModel, ObsId, OutcomeId, Scenario, Section};

/// Possibilistic collapse of an empirical model: per cover context, the set
/// of sections with strictly positive weight.
#[derive(Debug, Clone)]
pub struct SupportModel {
    pub scenario: Scenario,
    pub supports: Vec<BTreeSet<Section>>,
}

pub fn support_model(m: &EmpiricalModel) -> SupportModel {
    let supports = m
        .tables
        .iter()
        .map(|t| t.weights.keys().cloned().collect())
        .collect();
    SupportModel {
        scenario: m.scenario.clone(),
        supports,
    }
}

/// One overlap disagreement: the marginals of cover contexts `i` and `j`
/// assign different weights to the same section over their overlap.
#[derive(Debug, Clone)]
pub struct SignallingViolation {
    pub context_i: usize,
    pub context_j: usize,
    pub overlap: Context,
    pub section: Section,
    pub p_i: Rational,
    pub p_j: Rational,
}

#[derive(Debug, Clone)]
pub struct SignallingReport {
    pub violations: Vec<SignallingViolation>,
}

impl SignallingReport {
    /// An empty report defines "non-signalling" (consistently connected).
    pub fn is_signalling(&self) -> bool {
        !self.violations.is_empty()
    }
}

/// Compares marginals on every non-empty pairwise overlap, section by
/// section in lexicographic order. Every disagreeing section is reported;
/// note that two normalized marginals always disagree on at least two
/// sections when they disagree at all.
pub fn signalling_report(m: &EmpiricalModel) -> SignallingReport {
    let sc = &m.scenario;
    let mut violations = Vec::new();
    for i in 0..sc.cover.len() {
        for j in i + 1..sc.cover.len() {
            let overlap = sc.cover[i].intersect(&sc.cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let pi = marginalize(&m.tables[i], &overlap).expect("overlap is a subcontext");
            let pj = marginalize(&m.tables[j], &overlap).expect("overlap is a subcontext");
            for section in sc.sections(&overlap) {
                let wi = pi.weight(&section);
                let wj = pj.weight(&section);
                if wi != wj {
                    violations.push(SignallingViolation {
                        context_i: i,
                        context_j: j,
                        overlap: overlap.clone(),
                        section,
                        p_i: wi,
                        p_j: wj,
                    });
                }
            }
        }
    }
    SignallingReport { violations }
}

/// Backtracking search state. Observables are assigned in declaration
/// order; per cover context the still-compatible supported sections are
/// tracked so dead branches are pruned as early as possible.
struct Search<'a> {
    scenario: &'a Scenario,
    supports: Vec<Vec<&'a Section>>,
    by_obs: Vec<Vec<usize>>,
    alive: Vec<Vec<bool>>,
    alive_count: Vec<usize>,
    trail: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(sm: &'a SupportModel) -> Self {
        let n = sm.scenario.observables.len();
        let supports: Vec<Vec<&Section>> =
            sm.supports.iter().map(|s| s.iter().collect()).collect();
        let mut by_obs = vec![Vec::new(); n];
        for (i, c) in sm.scenario.cover.iter().enumerate() {
            for o in c.members() {
                by_obs[o.0].push(i);
            }
        }
        let alive: Vec<Vec<bool>> = supports.iter().map(|s| vec![true; s.len()]).collect();
        let alive_count = supports.iter().map(|s| s.len()).collect();
        Search {
            scenario: &sm.scenario,
            supports,
            by_obs,
            alive,
            alive_count,
            trail: vec![],
        }
    }

    /// Fixes observable `o` to outcome `v`. Returns false when some context
    /// loses its last compatible section; the trail records every kill for
    /// the matching `undo`.
    fn assign(&mut self, o: usize, v: usize) -> bool {
        let mut ok = true;
        for &i in &self.by_obs[o] {
            let slot = self.scenario.cover[i]
                .position(ObsId(o))
                .expect("context contains the observable");
            for k in 0..self.supports[i].len() {
                if self.alive[i][k] && self.supports[i][k].values[slot].0 != v {
                    self.alive[i][k] = false;
                    self.alive_count[i] -= 1;
                    self.trail.push((i, k));
                }
            }
            if self.alive_count[i] == 0 {
                ok = false;
            }
        }
        ok
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (i, k) = self.trail.pop().expect("trail is non-empty above the mark");
            self.alive[i][k] = true;
            self.alive_count[i] += 1;
        }
    }

    /// Depth-first enumeration in lexicographic order. `fixed` pins
    /// observables to outcomes; `out` collects consistent assignments until
    /// `limit` is reached.
    fn run(&mut self, fixed: &[Option<usize>], limit: usize, out: &mut Vec<Section>) {
        let mut values = vec![0usize; self.scenario.observables.len()];
        self.recurse(0, fixed, &mut values, limit, out);
    }

    fn recurse(
        &mut self,
        o: usize,
        fixed: &[Option<usize>],
        values: &mut Vec<usize>,
        limit: usize,
        out: &mut Vec<Section>,
    ) {
        if out.len() >= limit {
            return;
        }
        if o == self.scenario.observables.len() {
            out.push(Section {
                context: self.scenario.full_context(),
                values: values.iter().map(|&v| OutcomeId(v)).collect(),
            });
            return;
        }
        let candidates: Vec<usize> = match fixed[o] {
            Some(v) => vec![v],
            None => (0..self.scenario.outcome_count(ObsId(o))).collect(),
        };
        for v in candidates {
            let mark = self.trail.len();
            values[o] = v;
            if self.assign(o, v) {
                self.recurse(o + 1, fixed, values, limit, out);
            }
            self.undo(mark);
            if out.len() >= limit {
                return;
            }
        }
    }
}

/// All consistent global assignments, sorted lexicographically. The result
/// can be exponential in the observable count (a model with full supports
/// has every assignment), so callers on untrusted sizes should prefer
/// [`first_global_section`].
pub fn global_sections(sm: &SupportModel) -> Vec<Section> {
    let mut out = Vec::new();
    let fixed = vec![None; sm.scenario.observables.len()];
    Search::new(sm).run(&fixed, usize::MAX, &mut out);
    out
}

/// The lexicographically least consistent global assignment, if any. Its
/// absence is exactly strong contextuality.
pub fn first_global_section(sm: &SupportModel) -> Option<Section> {
    let mut out = Vec::new();
    let fixed = vec![None; sm.scenario.observables.len()];
    Search::new(sm).run(&fixed, 1, &mut out);
    out.pop()
}

/// The lexicographically least consistent global assignment restricting to
/// `s`, or `None` when the section cannot be extended. Errors unless `s` is
/// a supported section of a cover context.
pub fn extend_section(sm: &SupportModel, s: &Section) -> Result<Option<Section>> {
    let i = sm
        .scenario
        .cover
        .iter()
        .position(|c| *c == s.context)
        .ok_or_else(|| Error::invalid("section's context is not a cover element"))?;
    if !sm.supports[i].contains(s) {
        return Err(Error::invalid(
            "section is not in the support of its context",
        ));
    }
    let mut fixed = vec![None; sm.scenario.observables.len()];
    for (o, v) in s.context.members().iter().zip(&s.values) {
        fixed[o.0] = Some(v.0);
    }
    let mut out = Vec::new();
    Search::new(sm).run(&fixed, 1, &mut out);
    Ok(out.pop())
}

/// Every supported section with no consistent global extension, in (cover
/// order, lexicographic) order. Non-empty exactly when the model is
/// logically contextual.
pub fn logical_witnesses(sm: &SupportModel) -> Vec<(usize, Section)> {
    let mut out = Vec::new();
    for (i, support) in sm.supports.iter().enumerate() {
        for s in support {
            let extension = extend_section(sm, s).expect("iterating supported sections");
            if extension.is_none() {
                out.push((i, s.clone()));
            }
        }
    }
    out
}

/// Layered contextuality verdict. `probabilistically_contextual` is `None`
/// when the LP was not requested. When signalling is present the other
/// flags are still computed (they are well-defined set-theoretically) but
/// `confounded_by_direct_influence` is raised: direct influence must not be
/// conflated with structural contextuality, and the CbD analysis is the
/// appropriate tool.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub signalling: bool,
    pub probabilistically_contextual: Option<bool>,
    pub logically_contextual: bool,
    pub strongly_contextual: bool,
    pub confounded_by_direct_influence: bool,
    pub logical_witness: Option<Section>,
    pub global_section: Option<Section>,
}

pub fn classify(m: &EmpiricalModel, with_lp: bool, max_columns: u64) -> Result<Verdict> {
    let sm = support_model(m);
    let signalling = signalling_report(m).is_signalling();
    let global_section = first_global_section(&sm);
    let strongly_contextual = global_section.is_none();
    let witnesses = logical_witnesses(&sm);
    let logically_contextual = !witnesses.is_empty();
    let logical_witness = witnesses.into_iter().next().map(|(_, s)| s);

    if strongly_contextual && !logically_contextual {
        return Err(Error::internal(
            "hierarchy breach: strongly contextual model with every section extendable",
        ));
    }

    let probabilistically_contextual = if with_lp {
        let outcome = lp::noncontextuality_lp(m, max_columns)?;
        let infeasible = matches!(outcome, lp::NcLpOutcome::Infeasible { .. });
        if logically_contextual && !infeasible {
            return Err(Error::internal(
                "hierarchy breach: logically contextual model with a feasible joint",
            ));
        }
        Some(infeasible)
    } else {
        None
    };

    Ok(Verdict {
        signalling,
        probabilistically_contextual,
        logically_contextual,
        strongly_contextual,
        confounded_by_direct_influence: signalling,
        logical_witness,
        global_section,
    })
}
