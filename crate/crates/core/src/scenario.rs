//! Measurement scenarios and empirical models.
//!
//! A scenario declares observables with finite outcome sets and a cover of
//! maximal contexts (sets of jointly measurable observables, ordered by
//! subset inclusion). An empirical model adds one exact-rational probability
//! table per cover context. Declaration order matters: it fixes the
//! lexicographic enumeration of sections and assignments, the table key
//! format, and therefore every report and certificate downstream.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Signed, Zero};

/// Index of an observable in its scenario's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsId(pub usize);

/// Index of an outcome in its observable's declared outcome list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutcomeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    pub id: String,
    pub outcomes: Vec<String>,
}

/// A set of observables, stored sorted by declaration index so that set
/// operations, table keys, and matrix orderings are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(Vec<ObsId>);

impl Context {
    pub fn new(mut members: Vec<ObsId>) -> Self {
        members.sort();
        members.dedup();
        Context(members)
    }

    /// The full context over all observables of a scenario with `n` of them.
    pub fn full(n: usize) -> Self {
        Context((0..n).map(ObsId).collect())
    }

    pub fn members(&self) -> &[ObsId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, o: ObsId) -> bool {
        self.0.binary_search(&o).is_ok()
    }

    /// Position of `o` in this context's member order.
    pub fn position(&self, o: ObsId) -> Option<usize> {
        self.0.binary_search(&o).ok()
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.0.iter().all(|o| other.contains(*o))
    }

    pub fn intersect(&self, other: &Context) -> Context {
        Context(self.0.iter().copied().filter(|o| other.contains(*o)).collect())
    }
}

/// An outcome assignment on one context: `values[k]` is the outcome of
/// `context.members()[k]`. The derived ordering is lexicographic in the
/// member order, which is the enumeration order used everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    pub context: Context,
    pub values: Vec<OutcomeId>,
}

impl Section {
    /// Forgets every observable outside `d`. Callers must pass a subcontext;
    /// use [`restrict_section`] for the checked variant.
    pub fn restrict(&self, d: &Context) -> Section {
        let values = d
            .members()
            .iter()
            .map(|o| {
                let k = self
                    .context
                    .position(*o)
                    .expect("restrict target must be a subcontext");
                self.values[k]
            })
            .collect();
        Section {
            context: d.clone(),
            values,
        }
    }
}

/// Checked restriction: errors unless `d` is a subcontext of `s.context`.
pub fn restrict_section(s: &Section, d: &Context) -> Result<Section> {
    if !d.is_subset(&s.context) {
        return Err(Error::invalid(
            "cannot restrict a section to a non-subcontext",
        ));
    }
    Ok(s.restrict(d))
}

/// A probability table over one context. Validated tables store only
/// strictly positive weights (absent sections have weight zero), so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub context: Context,
    pub weights: BTreeMap<Section, Rational>,
}

impl Distribution {
    /// Builds a table, dropping explicit zero rows. Section contexts,
    /// non-negativity, and normalization are checked.
    pub fn new(context: Context, rows: Vec<(Section, Rational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut total = Rational::zero();
        for (section, weight) in rows {
            if section.context != context {
                return Err(Error::invalid(
                    "distribution row keyed by a section over a different context",
                ));
            }
            if weight.is_negative() {
                return Err(Error::invalid("negative probability in distribution"));
            }
            total += &weight;
            if !weight.is_zero() {
                weights.insert(section, weight);
            }
        }
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "distribution weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Distribution { context, weights })
    }

    /// The weight of `s`, zero when absent.
    pub fn weight(&self, s: &Section) -> Rational {
        self.weights.get(s).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Sums `p` over the fibres of restriction to `d`. Errors unless `d` is a
/// subcontext of `p.context`; the output is normalized whenever `p` is.
pub fn marginalize(p: &Distribution, d: &Context) -> Result<Distribution> {
    if !d.is_subset(&p.context) {
        return Err(Error::invalid(
            "cannot marginalize to a non-subcontext",
        ));
    }
    let mut weights: BTreeMap<Section, Rational> = BTreeMap::new();
    for (section, weight) in &p.weights {
        let t = section.restrict(d);
        *weights.entry(t).or_insert_with(Rational::zero) += weight;
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(Distribution {
        context: d.clone(),
        weights,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub observables: Vec<Observable>,
    pub cover: Vec<Context>,
}

impl Scenario {
    pub fn observable(&self, o: ObsId) -> &Observable {
        &self.observables[o.0]
    }

    pub fn outcome_count(&self, o: ObsId) -> usize {
        self.observables[o.0].outcomes.len()
    }

    pub fn obs_id(&self, name: &str) -> Option<ObsId> {
        self.observables.iter().position(|ob| ob.id == name).map(ObsId)
    }

    pub fn full_context(&self) -> Context {
        Context::full(self.observables.len())
    }

    /// The canonical table key of a context: member ids comma-joined in
    /// declaration order.
    pub fn context_key(&self, c: &Context) -> String {
        c.members()
            .iter()
            .map(|o| self.observable(*o).id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// The canonical row key of a section: outcome labels comma-joined in
    /// the context's member order.
    pub fn row_key(&self, s: &Section) -> String {
        s.context
            .members()
            .iter()
            .zip(&s.values)
            .map(|(o, v)| self.observable(*o).outcomes[v.0].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Human-readable section form: "a1=0,b1=1".
    pub fn section_label(&self, s: &Section) -> String {
        s.context
            .members()
            .iter()
            .zip(&s.values)
            .map(|(o, v)| {
                let ob = self.observable(*o);
                format!("{}={}", ob.id, ob.outcomes[v.0])
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// All sections over `c` in lexicographic order.
    pub fn sections(&self, c: &Context) -> SectionIter {
        let counts = c.members().iter().map(|o| self.outcome_count(*o)).collect();
        SectionIter::new(c.clone(), counts)
    }

    /// All global assignments in lexicographic order.
    pub fn assignments(&self) -> SectionIter {
        self.sections(&self.full_context())
    }

    /// Number of sections over `c`, saturating at `u128::MAX`.
    pub fn section_count(&self, c: &Context) -> u128 {
        c.members()
            .iter()
            .map(|o| self.outcome_count(*o) as u128)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    pub fn assignment_count(&self) -> u128 {
        self.section_count(&self.full_context())
    }

    /// Rank of a section in the lexicographic enumeration of its context.
    pub fn section_rank(&self, s: &Section) -> usize {
        let mut rank = 0usize;
        for (o, v) in s.context.members().iter().zip(&s.values) {
            rank = rank * self.outcome_count(*o) + v.0;
        }
        rank
    }
}

/// Odometer over the outcome grid of one context, in lexicographic order
/// (last member varies fastest).
pub struct SectionIter {
    context: Context,
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl SectionIter {
    fn new(context: Context, counts: Vec<usize>) -> Self {
        let next = if counts.iter().all(|&n| n > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        SectionIter {
            context,
            counts,
            next,
        }
    }
}

impl Iterator for SectionIter {
    type Item = Section;

    fn next(&mut self) -> Option<Section> {
        let current = self.next.take()?;
        let section = Section {
            context: self.context.clone(),
            values: current.iter().map(|&v| OutcomeId(v)).collect(),
        };
        let mut digits = current;
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < self.counts[k] {
                self.next = Some(digits);
                return Some(section);
            }
            digits[k] = 0;
        }
        // The empty context has exactly one section, handled by the same
        // exhaustion path.
        self.next = None;
        Some(section)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    pub scenario: Scenario,
    /// One table per cover context, aligned with `scenario.cover`.
    pub tables: Vec<Distribution>,
}

impl EmpiricalModel {
    /// Builds and fully validates a model.
    pub fn new(scenario: Scenario, tables: Vec<Distribution>) -> Result<Self> {
        let model = EmpiricalModel { scenario, tables };
        let violations = validate_model(&model);
        if let Some(first) = violations.first() {
            return Err(Error::invalid(format!(
                "{first}{}",
                if violations.len() > 1 {
                    format!(" (and {} more violations)", violations.len() - 1)
                } else {
                    String::new()
                }
            )));
        }
        Ok(model)
    }

    pub fn table(&self, cover_index: usize) -> &Distribution {
        &self.tables[cover_index]
    }
}

/// Checks every declared invariant and returns the violations as data; an
/// empty list means the model is valid. Errors are for failures, invariant
/// breaches in hand-built models are results.
pub fn validate_model(m: &EmpiricalModel) -> Vec<String> {
    let mut out = Vec::new();
    let sc = &m.scenario;

    if sc.observables.is_empty() {
        out.push("scenario declares no observables".to_string());
    }
    for (k, ob) in sc.observables.iter().enumerate() {
        if ob.id.is_empty() {
            out.push(format!("observable #{k} has an empty id"));
        }
        if ob.id.contains(',') {
            out.push(format!("observable id {:?} contains ','", ob.id));
        }
        if ob.outcomes.is_empty() {
            out.push(format!("observable {:?} has no outcomes", ob.id));
        }
        for label in &ob.outcomes {
            if label.is_empty() {
                out.push(format!("observable {:?} has an empty outcome label", ob.id));
            }
            if label.contains(',') {
                out.push(format!(
                    "outcome label {:?} of observable {:?} contains ','",
                    label, ob.id
                ));
            }
        }
        let mut seen = ob.outcomes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != ob.outcomes.len() {
            out.push(format!("observable {:?} repeats an outcome label", ob.id));
        }
        if sc.observables.iter().filter(|o| o.id == ob.id).count() > 1 && sc
            .observables
            .iter()
            .position(|o| o.id == ob.id)
            == Some(k)
        {
            out.push(format!("duplicate observable id {:?}", ob.id));
        }
    }

    if sc.cover.is_empty() {
        out.push("scenario declares no contexts".to_string());
    }
    for (i, c) in sc.cover.iter().enumerate() {
        if c.is_empty() {
            out.push(format!("context #{i} is empty"));
        }
        for o in c.members() {
            if o.0 >= sc.observables.len() {
                out.push(format!(
                    "context #{i} references observable index {} out of range",
                    o.0
                ));
            }
        }
    }
    let indices_ok = sc
        .cover
        .iter()
        .all(|c| c.members().iter().all(|o| o.0 < sc.observables.len()));
    if indices_ok {
        for (k, _) in sc.observables.iter().enumerate() {
            if !sc.cover.iter().any(|c| c.contains(ObsId(k))) {
                out.push(format!(
                    "observable {:?} appears in no context",
                    sc.observables[k].id
                ));
            }
        }
        for (i, ci) in sc.cover.iter().enumerate() {
            for (j, cj) in sc.cover.iter().enumerate() {
                if i != j && ci.is_subset(cj) {
                    out.push(format!(
                        "cover is not an antichain: context \"{}\" is contained in \"{}\"",
                        sc.context_key(ci),
                        sc.context_key(cj)
                    ));
                }
            }
        }
    }

    if m.tables.len() != sc.cover.len() {
        out.push(format!(
            "model has {} tables for {} contexts",
            m.tables.len(),
            sc.cover.len()
        ));
    }
    for (i, table) in m.tables.iter().enumerate() {
        let where_ = if indices_ok && i < sc.cover.len() {
            format!("table for context \"{}\"", sc.context_key(&sc.cover[i]))
        } else {
            format!("table #{i}")
        };
        if i < sc.cover.len() && table.context != sc.cover[i] {
            out.push(format!("{where_}: keyed by a different context"));
        }
        let mut total = Rational::zero();
        for (section, weight) in &table.weights {
            if section.context != table.context {
                out.push(format!(
                    "{where_}: row keyed by a section over the wrong context"
                ));
                continue;
            }
            if section.values.len() != table.context.len() {
                out.push(format!("{where_}: row with wrong arity"));
                continue;
            }
            let in_range = indices_ok
                && section
                    .context
                    .members()
                    .iter()
                    .zip(&section.values)
                    .all(|(o, v)| v.0 < sc.outcome_count(*o));
            if !in_range {
                out.push(format!("{where_}: row with an out-of-range outcome"));
                continue;
            }
            if weight.is_negative() {
                out.push(format!("{where_}: negative probability"));
            }
            total += weight;
        }
        if !total.is_one() {
            out.push(format!(
                "{where_}: rows sum to {}, not 1",
                format_rational(&total)
            ));
        }
    }

    out
}

/// Convex mixture of two models over the same scenario.
pub fn mix_models(
    a: &EmpiricalModel,
    b: &EmpiricalModel,
    lambda: &Rational,
) -> Result<EmpiricalModel> {
    if a.scenario != b.scenario {
        return Err(Error::invalid("cannot mix models over different scenarios"));
    }
    if lambda.is_negative() || *lambda > Rational::one() {
        return Err(Error::invalid("mixture weight must lie in [0, 1]"));
    }
    let co = Rational::one() - lambda;
    let tables = a
        .tables
        .iter()
        .zip(&b.tables)
        .map(|(ta, tb)| {
            let mut weights: BTreeMap<Section, Rational> = BTreeMap::new();
            for (s, w) in &ta.weights {
                *weights.entry(s.clone()).or_insert_with(Rational::zero) += lambda * w;
            }
            for (s, w) in &tb.weights {
                *weights.entry(s.clone()).or_insert_with(Rational::zero) += &co * w;
            }
            weights.retain(|_, w| !w.is_zero());
            Distribution {
                context: ta.context.clone(),
                weights,
            }
        })
        .collect();
    EmpiricalModel::new(a.scenario.clone(), tables)
}

/// Applies per-observable outcome permutations to every table: `perms[o]`
/// sends the old outcome index to the new one and must be a bijection on
/// that observable's outcomes. The scenario itself is unchanged; only
/// weights move between rows. Contextuality verdicts of every kind are
/// invariant under this relabeling.
pub fn relabel_model(m: &EmpiricalModel, perms: &[Vec<usize>]) -> Result<EmpiricalModel> {
    let sc = &m.scenario;
    if perms.len() != sc.observables.len() {
        return Err(Error::invalid(
            "relabeling needs one permutation per observable",
        ));
    }
    for (ob, perm) in sc.observables.iter().zip(perms) {
        let k = ob.outcomes.len();
        let mut seen = vec![false; k];
        if perm.len() != k {
            return Err(Error::invalid(format!(
                "permutation for observable {:?} has the wrong length",
                ob.id
            )));
        }
        for &v in perm {
            if v >= k || seen[v] {
                return Err(Error::invalid(format!(
                    "permutation for observable {:?} is not a bijection",
                    ob.id
                )));
            }
            seen[v] = true;
        }
    }
    let tables = m
        .tables
        .iter()
        .map(|t| {
            let rows = t
                .weights
                .iter()
                .map(|(s, w)| {
                    let values = s
                        .context
                        .members()
                        .iter()
                        .zip(&s.values)
                        .map(|(o, v)| OutcomeId(perms[o.0][v.0]))
                        .collect();
                    (
                        Section {
                            context: s.context.clone(),
                            values,
                        },
                        w.clone(),
                    )
                })
                .collect();
            Distribution::new(t.context.clone(), rows).expect("relabeled rows stay valid")
        })
        .collect();
    EmpiricalModel::new(sc.clone(), tables)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    observables: Vec<ObservableFile>,
    contexts: Vec<Vec<String>>,
    tables: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableFile {
    id: String,
    outcomes: Vec<String>,
}

#[derive(Serialize)]
struct ScenarioFileOut<'a> {
    observables: Vec<ObservableOut<'a>>,
    contexts: Vec<Vec<&'a str>>,
    tables: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Serialize)]
struct ObservableOut<'a> {
    id: &'a str,
    outcomes: &'a [String],
}

/// Parses a scenario file: JSON shape errors are `Syntax`, semantic
/// violations (unknown ids, bad sums, antichain breaks) are `Invalid`,
/// unparseable rational strings are `Syntax`.
pub fn parse_model(text: &str) -> Result<EmpiricalModel> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::syntax(e.to_string()))?;

    let observables: Vec<Observable> = file
        .observables
        .iter()
        .map(|ob| Observable {
            id: ob.id.clone(),
            outcomes: ob.outcomes.clone(),
        })
        .collect();
    let scenario_head = Scenario {
        observables,
        cover: Vec::new(),
    };
    for ob in &scenario_head.observables {
        if ob.id.is_empty() {
            return Err(Error::invalid("observable with empty id"));
        }
        if scenario_head
            .observables
            .iter()
            .filter(|o| o.id == ob.id)
            .count()
            > 1
        {
            return Err(Error::invalid(format!("duplicate observable id {:?}", ob.id)));
        }
    }

    let mut cover = Vec::new();
    for (i, names) in file.contexts.iter().enumerate() {
        if names.is_empty() {
            return Err(Error::invalid(format!("context #{} is empty", i + 1)));
        }
        let mut members = Vec::new();
        for name in names {
            let id = scenario_head.obs_id(name).ok_or_else(|| {
                Error::invalid(format!(
                    "context #{} references unknown observable {:?}",
                    i + 1,
                    name
                ))
            })?;
            if members.contains(&id) {
                return Err(Error::invalid(format!(
                    "context #{} lists observable {:?} twice",
                    i + 1,
                    name
                )));
            }
            members.push(id);
        }
        cover.push(Context::new(members));
    }
    if cover.is_empty() {
        return Err(Error::invalid("scenario declares no contexts"));
    }
    let scenario = Scenario {
        observables: scenario_head.observables,
        cover,
    };
    for (i, ci) in scenario.cover.iter().enumerate() {
        for (j, cj) in scenario.cover.iter().enumerate() {
            if i != j && ci.is_subset(cj) {
                return Err(Error::invalid(format!(
                    "cover is not an antichain: context \"{}\" is contained in \"{}\"",
                    scenario.context_key(ci),
                    scenario.context_key(cj)
                )));
            }
        }
    }
    for (k, ob) in scenario.observables.iter().enumerate() {
        if ob.outcomes.is_empty() {
            return Err(Error::invalid(format!(
                "observable {:?} has no outcomes",
                ob.id
            )));
        }
        let mut sorted = ob.outcomes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ob.outcomes.len() {
            return Err(Error::invalid(format!(
                "observable {:?} repeats an outcome label",
                ob.id
            )));
        }
        if ob.id.contains(',') || ob.outcomes.iter().any(|l| l.contains(',') || l.is_empty()) {
            return Err(Error::invalid(format!(
                "observable {:?}: ids and outcome labels must be non-empty and must not contain ','",
                ob.id
            )));
        }
        if !scenario.cover.iter().any(|c| c.contains(ObsId(k))) {
            return Err(Error::invalid(format!(
                "observable {:?} appears in no context",
                ob.id
            )));
        }
    }

    let keys: Vec<String> = scenario
        .cover
        .iter()
        .map(|c| scenario.context_key(c))
        .collect();
    for key in file.tables.keys() {
        if !keys.contains(key) {
            return Err(Error::invalid(format!(
                "table key {:?} does not match any cover context (keys join observable ids in declaration order)",
                key
            )));
        }
    }

    let mut tables = Vec::new();
    for (i, c) in scenario.cover.iter().enumerate() {
        let key = &keys[i];
        let rows = file
            .tables
            .get(key)
            .ok_or_else(|| Error::invalid(format!("missing table for context \"{key}\"")))?;
        let mut pairs = Vec::new();
        let mut total = Rational::zero();
        for (row_key, value) in rows {
            let labels: Vec<&str> = row_key.split(',').collect();
            if labels.len() != c.len() {
                return Err(Error::invalid(format!(
                    "table \"{key}\": row key {:?} has {} entries for {} observables",
                    row_key,
                    labels.len(),
                    c.len()
                )));
            }
            let mut values = Vec::new();
            for (o, label) in c.members().iter().zip(&labels) {
                let ob = scenario.observable(*o);
                let v = ob
                    .outcomes
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| {
                        Error::invalid(format!(
                            "table \"{key}\": row key {:?} uses {:?}, not an outcome of {:?}",
                            row_key, label, ob.id
                        ))
                    })?;
                values.push(OutcomeId(v));
            }
            let weight = parse_rational(value).ok_or_else(|| {
                Error::syntax(format!(
                    "table \"{key}\" row {:?}: cannot parse rational {:?}",
                    row_key, value
                ))
            })?;
            if weight.is_negative() {
                return Err(Error::invalid(format!(
                    "table \"{key}\" row {:?}: negative probability",
                    row_key
                )));
            }
            total += &weight;
            let section = Section {
                context: c.clone(),
                values,
            };
            if !weight.is_zero() {
                pairs.push((section, weight));
            }
        }
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "table \"{key}\": rows sum to {}, not 1",
                format_rational(&total)
            )));
        }
        let mut weights = BTreeMap::new();
        for (s, w) in pairs {
            weights.insert(s, w);
        }
        tables.push(Distribution {
            context: c.clone(),
            weights,
        });
    }

    let model = EmpiricalModel { scenario, tables };
    let violations = validate_model(&model);
    if !violations.is_empty() {
        return Err(Error::internal(format!(
            "parser admitted an invalid model: {}",
            violations.join("; ")
        )));
    }
    Ok(model)
}

/// Renders the canonical file form. `parse_model(serialize_model(m)) == m`
/// for every validated model, bit-exact on rationals.
pub fn serialize_model(m: &EmpiricalModel) -> String {
    let sc = &m.scenario;
    let observables = sc
        .observables
        .iter()
        .map(|ob| ObservableOut {
            id: &ob.id,
            outcomes: &ob.outcomes,
        })
        .collect();
    let contexts = sc
        .cover
        .iter()
        .map(|c| {
            c.members()
                .iter()
                .map(|o| sc.observable(*o).id.as_str())
                .collect()
        })
        .collect();
    let mut tables = BTreeMap::new();
    for (i, table) in m.tables.iter().enumerate() {
        let mut rows = BTreeMap::new();
        for (s, w) in &table.weights {
            rows.insert(sc.row_key(s), format_rational(w));
        }
        tables.insert(sc.context_key(&sc.cover[i]), rows);
    }
    let out = ScenarioFileOut {
        observables,
        contexts,
        tables,
    };
    serde_json::to_string_pretty(&out).expect("model serialization cannot fail")
}
