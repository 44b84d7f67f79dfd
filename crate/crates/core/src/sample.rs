//! Seeded generators for scenarios, models, CbD systems, and quantum
//! inputs, used by property tests and benchmarks. Every output is exact;
//! callers supply any [`rand::Rng`], and the test suites use fixed-seed
//! ChaCha streams so failures reproduce byte for byte.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::cbd::{CbdContext, CbdSystem, OrderEffectData, SurdMatrix};
use crate::glue::SupportModel;
use crate::lp::{self, LpProblem, LpResult, RationalMatrix, Relation};
use crate::rational::Rational;
use crate::scenario::{
    mix_models, Context, Distribution, EmpiricalModel, Observable, ObsId, Scenario, Section,
};
use crate::surd::Surd;

fn int(n: u64) -> BigInt {
    BigInt::from(n)
}

/// A random rational in [0, 1] with denominator at most `bound`.
pub fn random_probability<R: Rng>(rng: &mut R, bound: u64) -> Rational {
    let d = rng.gen_range(1..=bound.max(1));
    let n = rng.gen_range(0..=d);
    Rational::new(int(n), int(d))
}

/// `k` non-negative rationals summing to 1, with a common denominator at
/// most `k * bound`.
fn random_weights<R: Rng>(rng: &mut R, k: usize, bound: u64) -> Vec<Rational> {
    let mut raw: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=bound)).collect();
    if raw.iter().all(|&w| w == 0) {
        let lucky = rng.gen_range(0..k);
        raw[lucky] = 1;
    }
    let total: u64 = raw.iter().sum();
    raw.into_iter()
        .map(|w| Rational::new(int(w), int(total)))
        .collect()
}

/// A small scenario with 3 or 4 observables of 2 or 3 outcomes each and a
/// covering antichain of binary contexts, either a cycle around the
/// observables or, for 4 observables, the two-party square.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    scenario_with_outcomes(rng, 3)
}

/// Like [`random_scenario`] but with every observable binary, the setting
/// of the hierarchy acceptance suite.
pub fn random_binary_scenario<R: Rng>(rng: &mut R) -> Scenario {
    scenario_with_outcomes(rng, 2)
}

fn scenario_with_outcomes<R: Rng>(rng: &mut R, max_outcomes: usize) -> Scenario {
    let n = rng.gen_range(3..=4usize);
    let observables = (0..n)
        .map(|i| {
            let outcomes = rng.gen_range(2..=max_outcomes);
            Observable {
                id: format!("o{i}"),
                outcomes: (0..outcomes).map(|k| k.to_string()).collect(),
            }
        })
        .collect();
    let cover = if n == 4 && rng.gen_range(0..2) == 1 {
        vec![
            Context::new(vec![ObsId(0), ObsId(2)]),
            Context::new(vec![ObsId(0), ObsId(3)]),
            Context::new(vec![ObsId(1), ObsId(2)]),
            Context::new(vec![ObsId(1), ObsId(3)]),
        ]
    } else {
        (0..n)
            .map(|i| Context::new(vec![ObsId(i), ObsId((i + 1) % n)]))
            .collect()
    };
    Scenario {
        observables,
        cover,
    }
}

/// A model over `sc` with arbitrary exact tables; may well be signalling.
pub fn random_model<R: Rng>(rng: &mut R, sc: &Scenario, bound: u64) -> EmpiricalModel {
    let tables = sc
        .cover
        .iter()
        .map(|c| {
            let sections: Vec<Section> = sc.sections(c).collect();
            let weights = random_weights(rng, sections.len(), bound);
            Distribution::new(c.clone(), sections.into_iter().zip(weights).collect())
                .expect("generated rows are valid")
        })
        .collect();
    EmpiricalModel::new(sc.clone(), tables).expect("generated tables are valid")
}

/// A support model over `sc` with non-empty random supports.
pub fn random_support_model<R: Rng>(rng: &mut R, sc: &Scenario) -> SupportModel {
    let supports = sc
        .cover
        .iter()
        .map(|c| {
            let all: Vec<Section> = sc.sections(c).collect();
            let mut support: BTreeSet<Section> = all
                .iter()
                .filter(|_| rng.gen_range(0..2) == 1)
                .cloned()
                .collect();
            if support.is_empty() {
                support.insert(all[rng.gen_range(0..all.len())].clone());
            }
            support
        })
        .collect();
    SupportModel {
        scenario: sc.clone(),
        supports,
    }
}

/// A vertex of the non-signalling polytope of `sc`, found by maximizing a
/// random integer objective over exact tables constrained to normalize
/// and to agree on every overlap.
fn non_signalling_vertex<R: Rng>(rng: &mut R, sc: &Scenario) -> EmpiricalModel {
    let counts: Vec<usize> = sc
        .cover
        .iter()
        .map(|c| {
            usize::try_from(sc.section_count(c)).expect("sampling covers stay small")
        })
        .collect();
    let mut offsets = Vec::with_capacity(counts.len());
    let mut acc = 0usize;
    for k in &counts {
        offsets.push(acc);
        acc += k;
    }
    let n_cols = acc;

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for (i, _) in sc.cover.iter().enumerate() {
        let mut row = vec![Rational::zero(); n_cols];
        for entry in row.iter_mut().skip(offsets[i]).take(counts[i]) {
            *entry = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for i in 0..sc.cover.len() {
        for j in i + 1..sc.cover.len() {
            let overlap = sc.cover[i].intersect(&sc.cover[j]);
            if overlap.is_empty() {
                continue;
            }
            for t in sc.sections(&overlap) {
                let mut row = vec![Rational::zero(); n_cols];
                for s in sc.sections(&sc.cover[i]) {
                    if s.restrict(&overlap) == t {
                        row[offsets[i] + sc.section_rank(&s)] += Rational::one();
                    }
                }
                for s in sc.sections(&sc.cover[j]) {
                    if s.restrict(&overlap) == t {
                        row[offsets[j] + sc.section_rank(&s)] -= Rational::one();
                    }
                }
                rows.push(row);
                rhs.push(Rational::zero());
            }
        }
    }

    let objective: Vec<Rational> = (0..n_cols)
        .map(|_| Rational::from_integer(rng.gen_range(-5..=5i64).into()))
        .collect();
    let relations = vec![Relation::Eq; rows.len()];
    let matrix = RationalMatrix::from_rows(rows).expect("rows are consistent");
    let problem = LpProblem::maximize(objective, matrix, relations, rhs);
    let solution = match lp::solve_lp(&problem).expect("exact solver on exact input") {
        LpResult::Optimal { solution, .. } => solution,
        LpResult::Infeasible { .. } => {
            panic!("the non-signalling polytope contains the product model")
        }
        LpResult::Unbounded => panic!("probability tables are bounded"),
    };

    let tables = sc
        .cover
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rows = sc
                .sections(c)
                .map(|s| {
                    let w = solution[offsets[i] + sc.section_rank(&s)].clone();
                    (s, w)
                })
                .collect();
            Distribution::new(c.clone(), rows).expect("vertex tables are valid")
        })
        .collect();
    EmpiricalModel::new(sc.clone(), tables).expect("vertex models are valid")
}

/// A random non-signalling model: a random vertex of the non-signalling
/// polytope about a quarter of the time, otherwise a mixture of two such
/// vertices. Vertices include contextual extreme points, not only
/// deterministic ones.
pub fn random_ns_model<R: Rng>(rng: &mut R, sc: &Scenario) -> EmpiricalModel {
    if rng.gen_range(0..4) == 0 {
        return non_signalling_vertex(rng, sc);
    }
    let a = non_signalling_vertex(rng, sc);
    let b = non_signalling_vertex(rng, sc);
    let lambda = random_probability(rng, 16);
    mix_models(&a, &b, &lambda).expect("vertices share the scenario")
}

fn pattern_table(weights: Vec<Rational>) -> BTreeMap<Vec<bool>, Rational> {
    let patterns = [
        [false, false],
        [false, true],
        [true, false],
        [true, true],
    ];
    patterns
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(p, w)| (p.to_vec(), w))
        .collect()
}

/// A cyclic CbD system of the given rank with arbitrary exact binary
/// tables; connections are typically inconsistent.
pub fn random_cyclic_system<R: Rng>(rng: &mut R, rank: usize, bound: u64) -> CbdSystem {
    assert!(rank >= 2, "cyclic systems have rank at least 2");
    let contents = (0..rank).map(|i| format!("q{i}")).collect();
    let contexts = (0..rank)
        .map(|i| {
            let mut measures = vec![i, (i + 1) % rank];
            if rng.gen_range(0..2) == 1 {
                measures.reverse();
            }
            CbdContext {
                id: format!("c{i}"),
                measures,
                table: pattern_table(random_weights(rng, 4, bound)),
            }
        })
        .collect();
    CbdSystem {
        contents,
        contexts,
    }
}

/// A consistently connected cyclic system: per-content marginals are drawn
/// once and every context table is built to reproduce them exactly, with
/// the joint cell chosen uniformly inside its Frechet interval.
pub fn random_consistently_connected_cyclic<R: Rng>(
    rng: &mut R,
    rank: usize,
    bound: u64,
) -> CbdSystem {
    assert!(rank >= 2, "cyclic systems have rank at least 2");
    let marginals: Vec<Rational> = (0..rank).map(|_| random_probability(rng, bound)).collect();
    let contents = (0..rank).map(|i| format!("q{i}")).collect();
    let contexts = (0..rank)
        .map(|i| {
            let mut measures = vec![i, (i + 1) % rank];
            if rng.gen_range(0..2) == 1 {
                measures.reverse();
            }
            let p0 = marginals[measures[0]].clone();
            let p1 = marginals[measures[1]].clone();
            let lo = std::cmp::max(Rational::zero(), &(&p0 + &p1) - &Rational::one());
            let hi = std::cmp::min(p0.clone(), p1.clone());
            let both = &lo + &(&(&hi - &lo) * &random_probability(rng, bound));
            let weights = vec![
                &(&Rational::one() - &p0) - &(&p1 - &both),
                &p1 - &both,
                &p0 - &both,
                both,
            ];
            CbdContext {
                id: format!("c{i}"),
                measures,
                table: pattern_table(weights),
            }
        })
        .collect();
    CbdSystem {
        contents,
        contexts,
    }
}

/// Random sequential yes/no data in both orders; unrelated tables, so QQ
/// generally fails.
pub fn random_order_effect<R: Rng>(rng: &mut R, bound: u64) -> OrderEffectData {
    let table = |rng: &mut R| {
        let keys = [(false, false), (false, true), (true, false), (true, true)];
        keys.iter()
            .zip(random_weights(rng, 4, bound))
            .filter(|(_, w)| !w.is_zero())
            .map(|(&k, w)| (k, w))
            .collect::<BTreeMap<_, _>>()
    };
    let table_ab = table(rng);
    let table_ba = table(rng);
    OrderEffectData {
        content_a: "a".to_string(),
        content_b: "b".to_string(),
        table_ab,
        table_ba,
    }
}

/// An exact rotation: cosine and sine from a random Pythagorean triple,
/// so the pair satisfies c*c + s*s = 1 in the rationals.
fn random_cos_sin<R: Rng>(rng: &mut R) -> (Rational, Rational) {
    let m: i64 = rng.gen_range(2..=6);
    let n: i64 = rng.gen_range(1..m);
    let mut cos = Rational::new(BigInt::from(m * m - n * n), BigInt::from(m * m + n * n));
    let mut sin = Rational::new(BigInt::from(2 * m * n), BigInt::from(m * m + n * n));
    if rng.gen_range(0..2) == 1 {
        std::mem::swap(&mut cos, &mut sin);
    }
    if rng.gen_range(0..2) == 1 {
        sin = -sin;
    }
    (cos, sin)
}

/// An exactly orthogonal matrix: a product of random Givens rotations.
fn random_rotation<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<Rational>> {
    let mut q: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    if dim < 2 {
        return q;
    }
    for _ in 0..2 * dim {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        let (c, s) = random_cos_sin(rng);
        for k in 0..dim {
            let a = q[i][k].clone();
            let b = q[j][k].clone();
            q[i][k] = &(&c * &a) + &(&s * &b);
            q[j][k] = &(&c * &b) - &(&s * &a);
        }
    }
    q
}

/// A random exact unit vector with rational entries.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Surd> {
    let q = random_rotation(rng, dim);
    (0..dim)
        .map(|i| Surd::from_rational(q[i][0].clone()))
        .collect()
}

/// A random exact projector `Q D Q^T` with `Q` a product of rational
/// rotations and `D` a 0/1 diagonal of rank between 1 and `dim - 1`
/// (rank `dim` would be the identity).
pub fn random_projector<R: Rng>(rng: &mut R, dim: usize) -> SurdMatrix {
    let q = random_rotation(rng, dim);
    let rank = if dim == 1 { 1 } else { rng.gen_range(1..dim) };
    let mut keep = vec![false; dim];
    let mut chosen = 0usize;
    while chosen < rank {
        let k = rng.gen_range(0..dim);
        if !keep[k] {
            keep[k] = true;
            chosen += 1;
        }
    }
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mut sum = Rational::zero();
                    for k in 0..dim {
                        if keep[k] {
                            sum = &sum + &(&q[i][k] * &q[j][k]);
                        }
                    }
                    Surd::from_rational(sum)
                })
                .collect()
        })
        .collect();
    SurdMatrix::from_rows(rows).expect("projector matrices are square")
}
