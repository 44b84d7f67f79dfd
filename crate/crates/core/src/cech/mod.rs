//! The cohomological extension obstruction.
//!
//! A supported section either extends to a compatible family of
//! integer-coefficient combinations of supported sections over every cover
//! context, or it does not. Non-existence is decided exactly by an integer
//! linear system over the nerve of the cover and is a sound no-go: a
//! genuine global extension would in particular be such a family, so when
//! none exists the section certainly has no extension. Existence is the
//! one-sided direction; integer coefficients may conspire where actual
//! sections cannot, which is why every vanishing result carries
//! [`ONE_SIDEDNESS_NOTE`].

pub mod snf;

pub use snf::{smith_normal_form, solve_integer_system, IntMatrix, SmithForm};

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::glue::SupportModel;
use crate::scenario::{Context, Scenario, Section};

/// Caveat attached to every vanishing obstruction.
pub const ONE_SIDEDNESS_NOTE: &str =
    "vanishing does not by itself certify a genuine extension";

/// The simplicial nerve of a measurement cover, up to dimension two.
/// Vertices are the cover contexts in cover order; edges and triangles are
/// the index pairs and triples with non-empty common intersection, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    pub vertices: Vec<Context>,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
}

pub fn build_nerve(sc: &Scenario) -> Nerve {
    let vertices = sc.cover.clone();
    let m = vertices.len();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if !vertices[i].intersect(&vertices[j]).is_empty() {
                edges.push((i, j));
            }
        }
    }
    let mut triangles = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let common = vertices[i].intersect(&vertices[j]).intersect(&vertices[k]);
                if !common.is_empty() {
                    triangles.push((i, j, k));
                }
            }
        }
    }
    Nerve {
        vertices,
        edges,
        triangles,
    }
}

/// The free abelian coefficient system on supports. For each context in
/// the nerve's intersection closure (cover contexts, edge overlaps, and
/// triangle overlaps), the basis is the lexicographically sorted set of
/// restrictions of supported sections from every cover context containing
/// it; elements are formal integer combinations of basis sections.
#[derive(Debug, Clone)]
pub struct FreeAbelianPresheaf {
    pub bases: BTreeMap<Context, Vec<Section>>,
}

impl FreeAbelianPresheaf {
    pub fn basis(&self, c: &Context) -> Option<&[Section]> {
        self.bases.get(c).map(Vec::as_slice)
    }
}

pub fn support_presheaf(sm: &SupportModel) -> FreeAbelianPresheaf {
    let nerve = build_nerve(&sm.scenario);
    let mut contexts: BTreeSet<Context> = nerve.vertices.iter().cloned().collect();
    for &(i, j) in &nerve.edges {
        contexts.insert(nerve.vertices[i].intersect(&nerve.vertices[j]));
    }
    for &(i, j, k) in &nerve.triangles {
        contexts.insert(
            nerve.vertices[i]
                .intersect(&nerve.vertices[j])
                .intersect(&nerve.vertices[k]),
        );
    }
    let mut bases = BTreeMap::new();
    for d in contexts {
        let mut sections: BTreeSet<Section> = BTreeSet::new();
        for (c, support) in sm.scenario.cover.iter().zip(&sm.supports) {
            if d.is_subset(c) {
                for s in support {
                    sections.insert(s.restrict(&d));
                }
            }
        }
        bases.insert(d, sections.into_iter().collect());
    }
    FreeAbelianPresheaf { bases }
}

/// The matrix of the linearized restriction from `c` down to `d` in the
/// fixed bases: one column per basis section of `c`, carrying a single 1 in
/// the row of its restriction. Distinct sections restricting alike share a
/// row, which is how their coefficients sum.
pub fn presheaf_restriction_matrix(
    f: &FreeAbelianPresheaf,
    c: &Context,
    d: &Context,
) -> Result<IntMatrix> {
    if !d.is_subset(c) {
        return Err(Error::invalid(
            "restriction target is not a subcontext of the source",
        ));
    }
    let Some(from) = f.basis(c) else {
        return Err(Error::invalid("source context is not in the presheaf"));
    };
    let Some(to) = f.basis(d) else {
        return Err(Error::invalid("target context is not in the presheaf"));
    };
    let mut matrix = IntMatrix::zero(to.len(), from.len());
    for (col, s) in from.iter().enumerate() {
        let restricted = s.restrict(d);
        let row = to
            .binary_search(&restricted)
            .map_err(|_| Error::internal("restriction left the presheaf basis"))?;
        *matrix.entry_mut(row, col) = BigInt::one();
    }
    Ok(matrix)
}

/// An integer cochain over the cover: one coefficient vector per cover
/// vertex, indexed like the presheaf basis of that vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainFamily {
    pub coefficients: Vec<Vec<BigInt>>,
}

/// Outcome of the extension-obstruction computation for one supported
/// section. `vanishes = false` certifies that no extension exists;
/// `vanishes = true` comes with the witness family and the one-sidedness
/// caveat.
#[derive(Debug, Clone)]
pub struct ObstructionResult {
    pub section: Section,
    pub context_index: usize,
    pub vanishes: bool,
    pub witness: Option<CochainFamily>,
    pub note: Option<&'static str>,
}

/// Checks a witness family by direct matrix arithmetic, independent of the
/// solver: the pinned vertex must equal the basis vector of `s` and the
/// two restrictions must agree on every nerve edge.
pub fn verify_cochain_family(
    sm: &SupportModel,
    s: &Section,
    family: &CochainFamily,
) -> Result<()> {
    let nerve = build_nerve(&sm.scenario);
    let presheaf = support_presheaf(sm);
    let i0 = sm
        .scenario
        .cover
        .iter()
        .position(|c| *c == s.context)
        .ok_or_else(|| Error::invalid("section's context is not a cover element"))?;
    if family.coefficients.len() != nerve.vertices.len() {
        return Err(Error::internal("witness family has the wrong vertex count"));
    }
    for (i, c) in nerve.vertices.iter().enumerate() {
        let basis = presheaf
            .basis(c)
            .ok_or_else(|| Error::internal("presheaf is missing a cover context"))?;
        if family.coefficients[i].len() != basis.len() {
            return Err(Error::internal(format!(
                "witness family has the wrong length at vertex {i}"
            )));
        }
    }
    let pin_basis = presheaf.basis(&s.context).expect("cover context has a basis");
    for (t, b) in pin_basis.iter().enumerate() {
        let expected = if b == s { BigInt::one() } else { BigInt::zero() };
        if family.coefficients[i0][t] != expected {
            return Err(Error::internal(
                "witness family does not pin the requested section",
            ));
        }
    }
    for &(j, k) in &nerve.edges {
        let d = nerve.vertices[j].intersect(&nerve.vertices[k]);
        let rj = presheaf_restriction_matrix(&presheaf, &nerve.vertices[j], &d)?;
        let rk = presheaf_restriction_matrix(&presheaf, &nerve.vertices[k], &d)?;
        let left = rj.apply(&family.coefficients[j]);
        let right = rk.apply(&family.coefficients[k]);
        if left != right {
            return Err(Error::internal(format!(
                "witness family disagrees on edge ({j}, {k})"
            )));
        }
    }
    Ok(())
}

/// Decides whether an integer cochain family extends the supported section
/// `s`: unknowns are one coefficient per basis section per cover vertex,
/// with pin rows fixing the vertex of `s` and agreement rows for every
/// nerve edge. The system is solved exactly via the Smith normal form, and
/// any witness is re-verified before it is returned.
pub fn obstruction(sm: &SupportModel, s: &Section) -> Result<ObstructionResult> {
    let i0 = sm
        .scenario
        .cover
        .iter()
        .position(|c| *c == s.context)
        .ok_or_else(|| Error::invalid("section's context is not a cover element"))?;
    if !sm.supports[i0].contains(s) {
        return Err(Error::invalid(
            "section is not in the support of its context",
        ));
    }

    let nerve = build_nerve(&sm.scenario);
    let presheaf = support_presheaf(sm);
    let vertex_bases: Vec<&[Section]> = nerve
        .vertices
        .iter()
        .map(|c| presheaf.basis(c).expect("cover context has a basis"))
        .collect();
    let mut offsets = Vec::with_capacity(vertex_bases.len());
    let mut total = 0usize;
    for basis in &vertex_bases {
        offsets.push(total);
        total += basis.len();
    }

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();

    // Pin rows: the coefficient vector at the section's own vertex is the
    // basis vector of the section.
    for (t, b) in vertex_bases[i0].iter().enumerate() {
        let mut row = vec![BigInt::zero(); total];
        row[offsets[i0] + t] = BigInt::one();
        rows.push(row);
        rhs.push(if b == s { BigInt::one() } else { BigInt::zero() });
    }

    // Edge rows: restrictions from both endpoints agree on the overlap.
    for &(j, k) in &nerve.edges {
        let d = nerve.vertices[j].intersect(&nerve.vertices[k]);
        let rj = presheaf_restriction_matrix(&presheaf, &nerve.vertices[j], &d)?;
        let rk = presheaf_restriction_matrix(&presheaf, &nerve.vertices[k], &d)?;
        for r in 0..rj.rows() {
            let mut row = vec![BigInt::zero(); total];
            for col in 0..rj.cols() {
                if !rj.entry(r, col).is_zero() {
                    row[offsets[j] + col] = rj.entry(r, col).clone();
                }
            }
            for col in 0..rk.cols() {
                if !rk.entry(r, col).is_zero() {
                    row[offsets[k] + col] = -rk.entry(r, col).clone();
                }
            }
            rows.push(row);
            rhs.push(BigInt::zero());
        }
    }

    let matrix = IntMatrix::from_rows(rows).expect("system rows have equal length");
    let witness = match solve_integer_system(&matrix, &rhs) {
        None => None,
        Some(x) => {
            let coefficients = vertex_bases
                .iter()
                .zip(&offsets)
                .map(|(basis, &off)| x[off..off + basis.len()].to_vec())
                .collect();
            let family = CochainFamily { coefficients };
            verify_cochain_family(sm, s, &family)?;
            Some(family)
        }
    };
    let vanishes = witness.is_some();
    Ok(ObstructionResult {
        section: s.clone(),
        context_index: i0,
        vanishes,
        witness,
        note: if vanishes { Some(ONE_SIDEDNESS_NOTE) } else { None },
    })
}
