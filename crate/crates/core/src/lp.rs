//! Exact linear programming over the rationals.
//!
//! The solver is a dense two-phase primal simplex using Bland's rule, so
//! every run terminates and every verdict is exact. Results are
//! self-certifying: an optimum comes with a dual solution and an infeasible
//! system comes with a Farkas vector, and both certificates are re-checked
//! by direct arithmetic before they are returned.
//!
//! On top of the solver sit the two model-level programs: the
//! noncontextuality feasibility program (is there a global joint
//! distribution with the observed marginals?) and the contextual fraction
//! (how much noncontextual weight can be carved out of the model?).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::glue;
use crate::rational::Rational;
use crate::scenario::{marginalize, Distribution, EmpiricalModel, Scenario, Section};

/// Default cap on the number of global-assignment columns. Incidence
/// systems above this size are refused with [`Error::TooLarge`] rather than
/// silently consuming memory.
pub const DEFAULT_MAX_COLUMNS: u64 = 1 << 20;

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors, which must all have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("matrix rows have unequal lengths"));
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// Maximize the objective over the feasible region.
    Maximize,
    /// Only decide feasibility; the objective must be all zeros.
    Feasibility,
}

/// A linear program over implicitly nonnegative variables:
/// optimize `objective . x` subject to `matrix[i] . x  <relation[i]>  rhs[i]`
/// and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub matrix: RationalMatrix,
    pub relations: Vec<Relation>,
    pub rhs: Vec<Rational>,
    pub sense: Sense,
}

impl LpProblem {
    pub fn maximize(
        objective: Vec<Rational>,
        matrix: RationalMatrix,
        relations: Vec<Relation>,
        rhs: Vec<Rational>,
    ) -> Self {
        LpProblem {
            objective,
            matrix,
            relations,
            rhs,
            sense: Sense::Maximize,
        }
    }

    pub fn feasibility(matrix: RationalMatrix, relations: Vec<Relation>, rhs: Vec<Rational>) -> Self {
        let objective = vec![Rational::zero(); matrix.cols()];
        LpProblem {
            objective,
            matrix,
            relations,
            rhs,
            sense: Sense::Feasibility,
        }
    }

    fn validate(&self) -> Result<()> {
        let m = self.matrix.rows();
        let n = self.matrix.cols();
        if self.relations.len() != m || self.rhs.len() != m {
            return Err(Error::invalid(
                "relation and right-hand-side counts must match the row count",
            ));
        }
        if self.objective.len() != n {
            return Err(Error::invalid(
                "objective length must match the column count",
            ));
        }
        if self.sense == Sense::Feasibility && self.objective.iter().any(|c| !c.is_zero()) {
            return Err(Error::invalid(
                "feasibility problems take an all-zero objective",
            ));
        }
        Ok(())
    }
}

/// Outcome of an exact solve. Certificates are in terms of the problem as
/// posed (one dual coordinate per constraint row) and have already been
/// re-verified by the solver.
#[derive(Debug, Clone)]
pub enum LpResult {
    Optimal {
        solution: Vec<Rational>,
        objective: Rational,
        dual: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "dot product needs equal lengths");
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Checks an infeasibility certificate by direct arithmetic: `y` must
/// satisfy the row sign conditions (`y_i <= 0` on `Le` rows, `y_i >= 0` on
/// `Ge` rows, free on `Eq` rows), `y^T A <= 0` componentwise, and
/// `y^T b > 0`. Any feasible `x >= 0` would then give the contradiction
/// `0 >= (y^T A) x = y^T (A x) >= y^T b > 0`.
pub fn verify_farkas(p: &LpProblem, y: &[Rational]) -> Result<()> {
    let m = p.matrix.rows();
    if y.len() != m {
        return Err(Error::internal(
            "infeasibility certificate has the wrong length",
        ));
    }
    for (i, rel) in p.relations.iter().enumerate() {
        let ok = match rel {
            Relation::Le => !y[i].is_positive(),
            Relation::Ge => !y[i].is_negative(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(Error::internal(format!(
                "infeasibility certificate violates the sign condition on row {i}"
            )));
        }
    }
    for j in 0..p.matrix.cols() {
        let mut s = Rational::zero();
        for i in 0..m {
            let a = p.matrix.entry(i, j);
            if !a.is_zero() && !y[i].is_zero() {
                s += &y[i] * a;
            }
        }
        if s.is_positive() {
            return Err(Error::internal(format!(
                "infeasibility certificate has positive column combination at column {j}"
            )));
        }
    }
    if !dot(y, &p.rhs).is_positive() {
        return Err(Error::internal(
            "infeasibility certificate does not separate the right-hand side",
        ));
    }
    Ok(())
}

/// Checks an optimality certificate by direct arithmetic. The primal `x`
/// must be feasible with `objective = c . x`, and the dual `y` must satisfy
/// `y_i >= 0` on `Le` rows, `y_i <= 0` on `Ge` rows, `y^T A >= c`
/// componentwise, and `y^T b = objective`. Weak duality then pins the
/// optimum: any feasible `x'` has `c.x' <= (y^T A) x' <= y^T b`.
pub fn verify_optimal(
    p: &LpProblem,
    x: &[Rational],
    y: &[Rational],
    objective: &Rational,
) -> Result<()> {
    let m = p.matrix.rows();
    let n = p.matrix.cols();
    if x.len() != n || y.len() != m {
        return Err(Error::internal("optimality certificate has wrong lengths"));
    }
    if x.iter().any(|v| v.is_negative()) {
        return Err(Error::internal("primal solution has a negative coordinate"));
    }
    let ax = p.matrix.apply(x);
    for i in 0..m {
        let ok = match p.relations[i] {
            Relation::Le => ax[i] <= p.rhs[i],
            Relation::Ge => ax[i] >= p.rhs[i],
            Relation::Eq => ax[i] == p.rhs[i],
        };
        if !ok {
            return Err(Error::internal(format!(
                "primal solution violates constraint row {i}"
            )));
        }
        let sign_ok = match p.relations[i] {
            Relation::Le => !y[i].is_negative(),
            Relation::Ge => !y[i].is_positive(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return Err(Error::internal(format!(
                "dual solution violates the sign condition on row {i}"
            )));
        }
    }
    if &dot(&p.objective, x) != objective {
        return Err(Error::internal(
            "reported objective does not match the primal solution",
        ));
    }
    for j in 0..n {
        let mut s = Rational::zero();
        for i in 0..m {
            let a = p.matrix.entry(i, j);
            if !a.is_zero() && !y[i].is_zero() {
                s += &y[i] * a;
            }
        }
        if s < p.objective[j] {
            return Err(Error::internal(format!(
                "dual solution underprices column {j}"
            )));
        }
    }
    if &dot(y, &p.rhs) != objective {
        return Err(Error::internal(
            "dual objective does not match the primal objective",
        ));
    }
    Ok(())
}

/// Constraint kind after right-hand sides are made nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Le,
    Ge,
    Eq,
}

/// Simplex tableau. Two objective rows are carried through every pivot:
/// `obj1` prices the phase-one program (maximize minus the artificial sum)
/// and `obj2` prices the real objective, so phase two starts without any
/// re-pricing. Because row operations only ever add multiples of constraint
/// rows to an objective row, each objective row always equals its initial
/// value plus `y^T [A' | b']` for some multiplier vector `y`, and `y_i` can
/// be read off the column owned by row `i` (its slack, surplus, or
/// artificial column) at any time. That identity is what makes certificate
/// extraction exact, and it survives the deletion of redundant rows.
struct Tableau {
    width: usize,
    n_struct: usize,
    rows: Vec<Vec<Rational>>,
    obj1: Vec<Rational>,
    obj2: Vec<Rational>,
    basis: Vec<usize>,
    is_artificial: Vec<bool>,
    dual_col: Vec<usize>,
    dual_kind: Vec<RowKind>,
    negated: Vec<bool>,
}

impl Tableau {
    fn new(p: &LpProblem) -> Tableau {
        let m = p.matrix.rows();
        let n = p.matrix.cols();

        let mut kinds = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        for i in 0..m {
            let neg = p.rhs[i].is_negative();
            negated.push(neg);
            kinds.push(match (p.relations[i], neg) {
                (Relation::Le, false) | (Relation::Ge, true) => RowKind::Le,
                (Relation::Ge, false) | (Relation::Le, true) => RowKind::Ge,
                (Relation::Eq, _) => RowKind::Eq,
            });
        }

        // Column layout: structural, then one slack or surplus per
        // inequality row, then one artificial per Ge or Eq row.
        let mut width = n;
        let mut own_col = vec![usize::MAX; m];
        for i in 0..m {
            if kinds[i] != RowKind::Eq {
                own_col[i] = width;
                width += 1;
            }
        }
        let mut art_col = vec![usize::MAX; m];
        for i in 0..m {
            if kinds[i] != RowKind::Le {
                art_col[i] = width;
                width += 1;
            }
        }
        let mut is_artificial = vec![false; width];
        for i in 0..m {
            if art_col[i] != usize::MAX {
                is_artificial[art_col[i]] = true;
            }
        }

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![Rational::zero(); width + 1];
            for j in 0..n {
                let a = p.matrix.entry(i, j);
                if !a.is_zero() {
                    row[j] = if negated[i] { -a.clone() } else { a.clone() };
                }
            }
            match kinds[i] {
                RowKind::Le => {
                    row[own_col[i]] = Rational::one();
                    basis.push(own_col[i]);
                }
                RowKind::Ge => {
                    row[own_col[i]] = -Rational::one();
                    row[art_col[i]] = Rational::one();
                    basis.push(art_col[i]);
                }
                RowKind::Eq => {
                    row[art_col[i]] = Rational::one();
                    basis.push(art_col[i]);
                }
            }
            row[width] = if negated[i] {
                -p.rhs[i].clone()
            } else {
                p.rhs[i].clone()
            };
            rows.push(row);
        }

        // Phase-one costs are -1 on artificials and 0 elsewhere; the
        // objective row starts as minus the costs and is then priced out
        // against the initial basis.
        let mut obj1 = vec![Rational::zero(); width + 1];
        for i in 0..m {
            if art_col[i] != usize::MAX {
                obj1[art_col[i]] = Rational::one();
            }
        }
        for i in 0..m {
            if art_col[i] != usize::MAX {
                for idx in 0..=width {
                    if !rows[i][idx].is_zero() {
                        obj1[idx] = &obj1[idx] - &rows[i][idx];
                    }
                }
            }
        }

        // The initial basis columns all carry zero real cost, so the real
        // objective row starts already priced out.
        let mut obj2 = vec![Rational::zero(); width + 1];
        if p.sense == Sense::Maximize {
            for j in 0..n {
                if !p.objective[j].is_zero() {
                    obj2[j] = -p.objective[j].clone();
                }
            }
        }

        let dual_col = (0..m)
            .map(|i| match kinds[i] {
                RowKind::Le | RowKind::Ge => own_col[i],
                RowKind::Eq => art_col[i],
            })
            .collect();

        Tableau {
            width,
            n_struct: n,
            rows,
            obj1,
            obj2,
            basis,
            is_artificial,
            dual_col,
            dual_kind: kinds,
            negated,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let pivot_val = self.rows[r][j].clone();
        if !pivot_val.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &pivot_val;
                }
            }
        }
        let prow = self.rows[r].clone();
        for k in 0..self.rows.len() {
            if k == r {
                continue;
            }
            let factor = self.rows[k][j].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[k];
            for (idx, pv) in prow.iter().enumerate() {
                if !pv.is_zero() {
                    row[idx] = &row[idx] - &(&factor * pv);
                }
            }
        }
        for obj in [&mut self.obj1, &mut self.obj2] {
            let factor = obj[j].clone();
            if factor.is_zero() {
                continue;
            }
            for (idx, pv) in prow.iter().enumerate() {
                if !pv.is_zero() {
                    obj[idx] = &obj[idx] - &(&factor * pv);
                }
            }
        }
        self.basis[r] = j;
    }

    /// Runs Bland's rule to optimality. Entering: the lowest-index column
    /// with a negative reduced cost. Leaving: the minimum-ratio row, ties
    /// broken by the lowest basic column index. Returns false on
    /// unboundedness.
    fn optimize(&mut self, phase_one: bool) -> bool {
        loop {
            let entering = {
                let obj = if phase_one { &self.obj1 } else { &self.obj2 };
                (0..self.width)
                    .find(|&j| (phase_one || !self.is_artificial[j]) && obj[j].is_negative())
            };
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio: Option<Rational> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][j].is_positive() {
                    continue;
                }
                let ratio = &self.rows[r][self.width] / &self.rows[r][j];
                let better = match (&best_ratio, leave) {
                    (None, _) => true,
                    (Some(b), Some(lr)) => {
                        ratio < *b || (ratio == *b && self.basis[r] < self.basis[lr])
                    }
                    (Some(_), None) => unreachable!("ratio without a leaving row"),
                };
                if better {
                    best_ratio = Some(ratio);
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                return false;
            };
            self.pivot(r, j);
        }
    }

    /// After a feasible phase one, removes artificials from the basis by
    /// degenerate pivots. A row whose only nonzero entries sit in
    /// artificial columns is a dependency among the original rows and is
    /// dropped; its dual multiplier can still be read off later because the
    /// objective-row identity refers to the original rows, not the working
    /// ones.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if !self.is_artificial[self.basis[r]] {
                r += 1;
                continue;
            }
            let pivot_col = (0..self.width)
                .find(|&j| !self.is_artificial[j] && !self.rows[r][j].is_zero());
            match pivot_col {
                Some(j) => {
                    self.pivot(r, j);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_struct];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rows[r][self.width].clone();
            }
        }
        x
    }

    /// Reads the multiplier vector embedded in an objective row, one entry
    /// per original constraint row, and undoes the right-hand-side
    /// normalization so the result refers to the rows as posed.
    fn multipliers(&self, phase_one: bool) -> Vec<Rational> {
        let obj = if phase_one { &self.obj1 } else { &self.obj2 };
        (0..self.dual_col.len())
            .map(|i| {
                let c = self.dual_col[i];
                let raw = match self.dual_kind[i] {
                    RowKind::Le => obj[c].clone(),
                    RowKind::Ge => -obj[c].clone(),
                    RowKind::Eq => {
                        if phase_one {
                            &obj[c] - &Rational::one()
                        } else {
                            obj[c].clone()
                        }
                    }
                };
                if self.negated[i] {
                    -raw
                } else {
                    raw
                }
            })
            .collect()
    }
}

/// Solves an exact linear program. Every returned certificate has already
/// passed [`verify_optimal`] or [`verify_farkas`]; a verification failure
/// surfaces as [`Error::Internal`].
pub fn solve_lp(p: &LpProblem) -> Result<LpResult> {
    p.validate()?;
    let mut t = Tableau::new(p);
    if !t.optimize(true) {
        return Err(Error::internal(
            "phase one reported unbounded, but its objective is bounded above by zero",
        ));
    }
    if t.obj1[t.width].is_negative() {
        let farkas: Vec<Rational> = t.multipliers(true).into_iter().map(|v| -v).collect();
        verify_farkas(p, &farkas)?;
        return Ok(LpResult::Infeasible { farkas });
    }
    t.drive_out_artificials();
    if !t.optimize(false) {
        return match p.sense {
            Sense::Maximize => Ok(LpResult::Unbounded),
            Sense::Feasibility => Err(Error::internal(
                "feasibility phase reported unbounded with a zero objective",
            )),
        };
    }
    let solution = t.solution();
    let objective = t.obj2[t.width].clone();
    let dual = t.multipliers(false);
    verify_optimal(p, &solution, &dual, &objective)?;
    Ok(LpResult::Optimal {
        solution,
        objective,
        dual,
    })
}

/// The incidence system of a scenario: one row per (cover context, section)
/// pair in (cover order, lexicographic) order including unsupported
/// sections, one column per global assignment in lexicographic order, and a
/// 1 exactly where the assignment restricts to the section. Every column
/// sums to the number of cover contexts.
#[derive(Debug, Clone)]
pub struct IncidenceSystem {
    pub matrix: RationalMatrix,
    pub rows: Vec<(usize, Section)>,
    pub columns: Vec<Section>,
}

pub fn incidence_matrix(sc: &Scenario, max_columns: u64) -> Result<IncidenceSystem> {
    let needed = sc.assignment_count();
    if needed > u128::from(max_columns) {
        return Err(Error::TooLarge {
            what: "incidence system",
            needed,
            cap: max_columns,
        });
    }
    let columns: Vec<Section> = sc.assignments().collect();
    let mut rows = Vec::new();
    for (i, c) in sc.cover.iter().enumerate() {
        for s in sc.sections(c) {
            rows.push((i, s));
        }
    }
    let mut matrix = RationalMatrix::zero(rows.len(), columns.len());
    let mut offset = 0usize;
    for c in &sc.cover {
        for (j, g) in columns.iter().enumerate() {
            let r = offset + sc.section_rank(&g.restrict(c));
            *matrix.entry_mut(r, j) = Rational::one();
        }
        offset += sc.section_count(c) as usize;
    }
    Ok(IncidenceSystem {
        matrix,
        rows,
        columns,
    })
}

/// A verified Farkas certificate for the noncontextuality program, with one
/// multiplier per labeled (cover context, section) row. It satisfies
/// `y^T M <= 0` componentwise and `y^T v > 0` against the incidence matrix
/// `M` and the stacked table weights `v`.
#[derive(Debug, Clone)]
pub struct NcCertificate {
    pub farkas: Vec<Rational>,
    pub rows: Vec<(usize, Section)>,
}

/// Outcome of the noncontextuality feasibility program `Mx = v, x >= 0`.
#[derive(Debug, Clone)]
pub enum NcLpOutcome {
    /// A global joint distribution reproducing every table exactly. The
    /// returned marginals have been re-checked against the model.
    Feasible { joint: Distribution },
    /// No such joint exists; the certificate proves it.
    Infeasible { certificate: NcCertificate },
}

impl NcLpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, NcLpOutcome::Feasible { .. })
    }
}

pub fn noncontextuality_lp(m: &EmpiricalModel, max_columns: u64) -> Result<NcLpOutcome> {
    let IncidenceSystem {
        matrix,
        rows,
        columns,
    } = incidence_matrix(&m.scenario, max_columns)?;
    let rhs: Vec<Rational> = rows.iter().map(|(i, s)| m.tables[*i].weight(s)).collect();
    let relations = vec![Relation::Eq; rows.len()];
    let problem = LpProblem::feasibility(matrix, relations, rhs);
    match solve_lp(&problem)? {
        LpResult::Optimal { solution, .. } => {
            let weights: Vec<(Section, Rational)> = columns
                .iter()
                .zip(&solution)
                .filter(|(_, w)| !w.is_zero())
                .map(|(s, w)| (s.clone(), w.clone()))
                .collect();
            let joint = Distribution::new(m.scenario.full_context(), weights)
                .map_err(|e| Error::internal(format!("solver joint failed validation: {e}")))?;
            for (i, c) in m.scenario.cover.iter().enumerate() {
                let marginal = marginalize(&joint, c)?;
                if marginal.weights != m.tables[i].weights {
                    return Err(Error::internal(format!(
                        "solver joint does not reproduce table {i}"
                    )));
                }
            }
            Ok(NcLpOutcome::Feasible { joint })
        }
        LpResult::Infeasible { farkas } => Ok(NcLpOutcome::Infeasible {
            certificate: NcCertificate { farkas, rows },
        }),
        LpResult::Unbounded => Err(Error::internal(
            "feasibility program cannot be unbounded",
        )),
    }
}

/// Exact contextual fraction of a non-signalling model.
#[derive(Debug, Clone)]
pub struct CfReport {
    /// `1 - noncontextual_weight`; 0 exactly on noncontextual models and 1
    /// exactly on strongly contextual ones.
    pub fraction: Rational,
    pub noncontextual_weight: Rational,
    /// The optimal noncontextual subdistribution over global assignments,
    /// nonzero entries only.
    pub subdistribution: Vec<(Section, Rational)>,
}

/// The contextual fraction is only meaningful for non-signalling models, so
/// a signalling input is reported as confounded instead of being forced
/// through the program.
#[derive(Debug, Clone)]
pub enum CfOutcome {
    Computed(CfReport),
    /// The model signals; overlap marginals disagree in `violations`
    /// places. The contents-by-default analysis handles such models.
    Confounded { violations: usize },
}

pub fn contextual_fraction(m: &EmpiricalModel, max_columns: u64) -> Result<CfOutcome> {
    let signalling = glue::signalling_report(m);
    if signalling.is_signalling() {
        return Ok(CfOutcome::Confounded {
            violations: signalling.violations.len(),
        });
    }
    let IncidenceSystem {
        matrix,
        rows,
        columns,
    } = incidence_matrix(&m.scenario, max_columns)?;
    let rhs: Vec<Rational> = rows.iter().map(|(i, s)| m.tables[*i].weight(s)).collect();
    let relations = vec![Relation::Le; rows.len()];
    let objective = vec![Rational::one(); columns.len()];
    let problem = LpProblem::maximize(objective, matrix, relations, rhs);
    match solve_lp(&problem)? {
        LpResult::Optimal {
            solution, objective, ..
        } => {
            if objective.is_negative() || objective > Rational::one() {
                return Err(Error::internal(
                    "noncontextual weight must lie between zero and one",
                ));
            }
            let fraction = &Rational::one() - &objective;
            let subdistribution = columns
                .into_iter()
                .zip(solution)
                .filter(|(_, w)| !w.is_zero())
                .collect();
            Ok(CfOutcome::Computed(CfReport {
                fraction,
                noncontextual_weight: objective,
                subdistribution,
            }))
        }
        LpResult::Infeasible { .. } => Err(Error::internal(
            "subnormalized program is feasible at zero by construction",
        )),
        LpResult::Unbounded => Err(Error::internal(
            "subnormalized program is bounded by the table masses",
        )),
    }
}
