//! Exact generator for quantum question-order data: two projective yes/no
//! measurements applied sequentially to a real state vector, in both
//! orders, with every probability computed in closed form.
//!
//! All entries live in a single quadratic extension of the rationals (see
//! [`crate::surd`]), which covers the standard small examples while
//! keeping arithmetic exact. Inputs mixing distinct radicals or producing
//! irrational probabilities are rejected rather than approximated.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cbd::OrderEffectData;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::surd::Surd;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 4;

/// A dense matrix of [`Surd`] entries. Operations panic when entries mix
/// distinct radicals; [`quantum_order_model`] screens its inputs first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Surd>,
}

impl SurdMatrix {
    /// Builds a matrix from row vectors; rows must be non-empty and of
    /// equal length.
    pub fn from_rows(rows: Vec<Vec<Surd>>) -> Result<SurdMatrix> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::invalid("matrix must have at least one entry"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("matrix rows must all have the same length"));
        }
        Ok(SurdMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> SurdMatrix {
        let mut data = vec![Surd::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Surd::one();
        }
        SurdMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Surd {
        &self.data[i * self.cols + j]
    }

    /// All entries, row-major; used for radical-family screening.
    pub fn entries(&self) -> &[Surd] {
        &self.data
    }

    pub fn mul(&self, other: &SurdMatrix) -> SurdMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut sum = Surd::zero();
                for k in 0..self.cols {
                    sum = &sum + &(self.entry(i, k) * other.entry(k, j));
                }
                data.push(sum);
            }
        }
        SurdMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn sub(&self, other: &SurdMatrix) -> SurdMatrix {
        assert_eq!(self.rows, other.rows, "dimensions must agree");
        assert_eq!(self.cols, other.cols, "dimensions must agree");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        SurdMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn apply(&self, v: &[Surd]) -> Vec<Surd> {
        assert_eq!(self.cols, v.len(), "dimensions must agree");
        (0..self.rows)
            .map(|i| {
                let mut sum = Surd::zero();
                for (k, value) in v.iter().enumerate() {
                    sum = &sum + &(self.entry(i, k) * value);
                }
                sum
            })
            .collect()
    }

    /// Symmetry is the reality condition here: for real matrices the
    /// adjoint is the transpose.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// Exact projector check: square, symmetric and idempotent.
    pub fn is_projector(&self) -> bool {
        self.rows == self.cols && self.is_symmetric() && self.mul(self) == *self
    }
}

fn norm_squared(v: &[Surd]) -> Surd {
    let mut sum = Surd::zero();
    for x in v {
        sum = &sum + &(x * x);
    }
    sum
}

/// Rejects inputs whose irrational parts do not all share one radicand.
fn check_radical_family<'a>(entries: impl Iterator<Item = &'a Surd>) -> Result<()> {
    let mut family: Option<u64> = None;
    for e in entries {
        if e.is_rational() {
            continue;
        }
        match family {
            None => family = Some(e.radicand()),
            Some(d) if d == e.radicand() => {}
            Some(d) => {
                return Err(Error::invalid(format!(
                    "inputs mix distinct radicals sqrt({d}) and sqrt({})",
                    e.radicand()
                )))
            }
        }
    }
    Ok(())
}

/// Computes the exact sequential-measurement tables of two projective
/// yes/no questions on a real state, in both orders.
///
/// The yes effect of a question is its projector `P`, the no effect is
/// `I - P`, and the probability of answering `x` then `y` is the squared
/// norm of the state after applying both effects in asked order. Inputs
/// are validated exactly: dimension at most [`MAX_DIM`], one shared
/// radical family, symmetric idempotent projectors, unit state. Any
/// irrational probability is an error naming the offending entry.
///
/// The two tables always satisfy the QQ equality; the row sums are
/// checked to be 1 as an internal invariant.
pub fn quantum_order_model(
    state: &[Surd],
    proj_a: &SurdMatrix,
    proj_b: &SurdMatrix,
) -> Result<OrderEffectData> {
    let dim = state.len();
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(format!(
            "state dimension must be between 1 and {MAX_DIM}, got {dim}"
        )));
    }
    for (name, p) in [("first", proj_a), ("second", proj_b)] {
        if p.rows() != dim || p.cols() != dim {
            return Err(Error::invalid(format!(
                "the {name} projector must be {dim}x{dim}"
            )));
        }
    }
    check_radical_family(
        state
            .iter()
            .chain(proj_a.entries())
            .chain(proj_b.entries()),
    )?;
    for (name, p) in [("first", proj_a), ("second", proj_b)] {
        if !p.is_symmetric() {
            return Err(Error::invalid(format!(
                "the {name} projector is not symmetric"
            )));
        }
        if !p.is_projector() {
            return Err(Error::invalid(format!(
                "the {name} projector is not idempotent"
            )));
        }
    }
    if norm_squared(state) != Surd::one() {
        return Err(Error::invalid("the state is not normalized"));
    }

    let identity = SurdMatrix::identity(dim);
    let effect = |p: &SurdMatrix, yes: bool| {
        if yes {
            p.clone()
        } else {
            identity.sub(p)
        }
    };

    let mut table_ab = BTreeMap::new();
    let mut table_ba = BTreeMap::new();
    for order_ab in [true, false] {
        let (p_first, p_second) = if order_ab {
            (proj_a, proj_b)
        } else {
            (proj_b, proj_a)
        };
        for x in [true, false] {
            for y in [true, false] {
                let after_first = effect(p_first, x).apply(state);
                let after_second = effect(p_second, y).apply(&after_first);
                let p = norm_squared(&after_second);
                let p = p.to_rational().ok_or_else(|| {
                    Error::invalid(format!(
                        "the {} probability at ({}, {}) is irrational",
                        if order_ab { "a-then-b" } else { "b-then-a" },
                        u8::from(x),
                        u8::from(y)
                    ))
                })?;
                if !p.is_zero() {
                    if order_ab {
                        table_ab.insert((x, y), p);
                    } else {
                        table_ba.insert((x, y), p);
                    }
                }
            }
        }
    }
    for table in [&table_ab, &table_ba] {
        let sum: Rational = table.values().cloned().sum();
        if !sum.is_one() {
            return Err(Error::internal(
                "sequential probabilities must sum to 1",
            ));
        }
    }
    Ok(OrderEffectData {
        content_a: "a".to_string(),
        content_b: "b".to_string(),
        table_ab,
        table_ba,
    })
}
