//! Integer matrices and the Smith normal form.
//!
//! The reduction returns unimodular `U`, `V` with `U * A * V = S`, where
//! `S` is diagonal with a divisibility chain `d1 | d2 | ...`. That shape
//! decides integer solvability of `A * x = b` by inspecting one diagonal
//! entry at a time, which is all the obstruction computation needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors, which must all have equal length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Option<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return None;
        }
        Some(IntMatrix {
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

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for (a, v) in self.row(r).iter().zip(x) {
                    if !a.is_zero() && !v.is_zero() {
                        acc += a * v;
                    }
                }
                acc
            })
            .collect()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.entry(k, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = self.entry_mut(r, j);
            if !v.is_zero() {
                *v = -v.clone();
            }
        }
    }

    /// `row[dst] += q * row[src]`.
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = self.entry(src, j) * q;
            if !add.is_zero() {
                *self.entry_mut(dst, j) += add;
            }
        }
    }

    /// `col[dst] += q * col[src]`.
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = self.entry(i, src) * q;
            if !add.is_zero() {
                *self.entry_mut(i, dst) += add;
            }
        }
    }
}

/// Result of the reduction: `u * a * v == s` with `u`, `v` unimodular and
/// `s` diagonal with nonnegative entries in a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The diagonal of `s`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|t| self.s.entry(t, t).clone())
            .collect()
    }
}

/// Reduces `a` to Smith normal form. Pivots are chosen as the entry of
/// minimal absolute value in the trailing submatrix (ties broken
/// lexicographically), which keeps intermediate entries from growing
/// needlessly on the small systems this crate produces.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let m = a.rows();
    let n = a.cols();
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        'step: loop {
            // Minimal-magnitude pivot in the trailing submatrix.
            let mut pivot: Option<(BigInt, usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = s.entry(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    let mag = e.abs();
                    match &pivot {
                        Some((best, _, _)) if *best <= mag => {}
                        _ => pivot = Some((mag, i, j)),
                    }
                }
            }
            let Some((_, pi, pj)) = pivot else {
                // The trailing submatrix is zero; the form is final.
                return SmithForm { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            if s.entry(t, t).is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
            let d = s.entry(t, t).clone();

            // Clear the column under the pivot. Floor division against a
            // positive pivot leaves remainders in [0, d); any nonzero
            // remainder is a strictly smaller entry, so re-pick.
            let mut dirty = false;
            for i in t + 1..m {
                if s.entry(i, t).is_zero() {
                    continue;
                }
                let q = -s.entry(i, t).div_floor(&d);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !s.entry(i, t).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'step;
            }
            for j in t + 1..n {
                if s.entry(t, j).is_zero() {
                    continue;
                }
                let q = -s.entry(t, j).div_floor(&d);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !s.entry(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'step;
            }

            // Enforce the divisibility chain: fold a non-divisible row into
            // row t and reduce again, which strictly shrinks the pivot.
            for i in t + 1..m {
                for j in t + 1..n {
                    if !s.entry(i, j).mod_floor(&d).is_zero() {
                        s.add_row_multiple(t, i, &BigInt::one());
                        u.add_row_multiple(t, i, &BigInt::one());
                        continue 'step;
                    }
                }
            }
            break 'step;
        }
    }
    SmithForm { u, s, v }
}

/// Finds an integer solution of `a * x = b`, or `None` when no integer
/// solution exists. Free coordinates are set to zero.
pub fn solve_integer_system(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.rows(), "right-hand side must match the row count");
    let form = smith_normal_form(a);
    let c = form.u.apply(b);
    let rank_bound = a.rows().min(a.cols());
    let mut y = vec![BigInt::zero(); a.cols()];
    for t in 0..rank_bound {
        let d = form.s.entry(t, t);
        if d.is_zero() {
            if !c[t].is_zero() {
                return None;
            }
        } else {
            if !(&c[t] % d).is_zero() {
                return None;
            }
            y[t] = &c[t] / d;
        }
    }
    for entry in c.iter().skip(rank_bound) {
        if !entry.is_zero() {
            return None;
        }
    }
    Some(form.v.apply(&y))
}
