//! Built-in example systems used by tests, documentation, and the CLI
//! `examples` subcommand. Every fixture is exact and deterministic.

use std::collections::BTreeMap;

use crate::cbd::{serialize_cbd, CbdContext, CbdSystem};
use crate::rational::{ratio, Rational};
use crate::scenario::{
    serialize_model, Context, Distribution, EmpiricalModel, Observable, ObsId, OutcomeId,
    Scenario, Section,
};

/// Names accepted by [`fixture`], in listing order.
pub const FIXTURE_NAMES: [&str; 5] = ["prbox", "hardy", "product", "qorder-zx", "cbd-prbox"];

/// A named example: either an empirical model or a CbD system.
#[derive(Debug, Clone)]
pub enum Fixture {
    Scenario(EmpiricalModel),
    Cbd(CbdSystem),
}

impl Fixture {
    /// The canonical file text of the fixture.
    pub fn to_text(&self) -> String {
        match self {
            Fixture::Scenario(m) => serialize_model(m),
            Fixture::Cbd(s) => serialize_cbd(s),
        }
    }
}

/// Looks a fixture up by name.
pub fn fixture(name: &str) -> Option<Fixture> {
    match name {
        "prbox" => Some(Fixture::Scenario(prbox())),
        "hardy" => Some(Fixture::Scenario(hardy())),
        "product" => Some(Fixture::Scenario(product())),
        "qorder-zx" => Some(Fixture::Cbd(qorder_zx())),
        "cbd-prbox" => Some(Fixture::Cbd(cbd_prbox())),
        _ => None,
    }
}

fn binary_observable(id: &str) -> Observable {
    Observable {
        id: id.to_string(),
        outcomes: vec!["0".to_string(), "1".to_string()],
    }
}

/// The standard two-party binary scenario: parties with settings a1/a2 and
/// b1/b2, one context per setting pair.
fn two_party_scenario() -> Scenario {
    let observables = ["a1", "a2", "b1", "b2"]
        .iter()
        .map(|id| binary_observable(id))
        .collect();
    // a1 = 0, a2 = 1, b1 = 2, b2 = 3.
    let cover = vec![
        Context::new(vec![ObsId(0), ObsId(2)]),
        Context::new(vec![ObsId(0), ObsId(3)]),
        Context::new(vec![ObsId(1), ObsId(2)]),
        Context::new(vec![ObsId(1), ObsId(3)]),
    ];
    Scenario {
        observables,
        cover,
    }
}

fn dist(context: &Context, rows: &[(&[usize], Rational)]) -> Distribution {
    Distribution::new(
        context.clone(),
        rows.iter()
            .map(|(values, w)| {
                (
                    Section {
                        context: context.clone(),
                        values: values.iter().map(|&v| OutcomeId(v)).collect(),
                    },
                    w.clone(),
                )
            })
            .collect(),
    )
    .expect("fixture tables are valid")
}

/// The PR box: perfect correlation in three contexts, perfect
/// anticorrelation in the fourth. Non-signalling and strongly contextual,
/// with contextual fraction 1.
pub fn prbox() -> EmpiricalModel {
    let sc = two_party_scenario();
    let correlated = |c: &Context| {
        dist(
            c,
            &[(&[0, 0][..], ratio(1, 2)), (&[1, 1][..], ratio(1, 2))],
        )
    };
    let anticorrelated = |c: &Context| {
        dist(
            c,
            &[(&[0, 1][..], ratio(1, 2)), (&[1, 0][..], ratio(1, 2))],
        )
    };
    let tables = vec![
        correlated(&sc.cover[0]),
        correlated(&sc.cover[1]),
        correlated(&sc.cover[2]),
        anticorrelated(&sc.cover[3]),
    ];
    EmpiricalModel::new(sc, tables).expect("prbox is a valid model")
}

/// The Hardy support pattern with uniform weights over each support: the
/// (a1,b1) table has full support but the sections (a1=0,b2=0),
/// (a2=0,b1=0) and (a2=1,b2=1) are forbidden, so the supported section
/// (a1=0,b1=0) has no global extension. Logically but not strongly
/// contextual; the uniform weighting is signalling, which matters only to
/// the probabilistic analyses.
pub fn hardy() -> EmpiricalModel {
    let sc = two_party_scenario();
    let third_support = |c: &Context, rows: [[usize; 2]; 3]| {
        dist(
            c,
            &[
                (&rows[0][..], ratio(1, 3)),
                (&rows[1][..], ratio(1, 3)),
                (&rows[2][..], ratio(1, 3)),
            ],
        )
    };
    let tables = vec![
        dist(
            &sc.cover[0],
            &[
                (&[0, 0][..], ratio(1, 4)),
                (&[0, 1][..], ratio(1, 4)),
                (&[1, 0][..], ratio(1, 4)),
                (&[1, 1][..], ratio(1, 4)),
            ],
        ),
        third_support(&sc.cover[1], [[0, 1], [1, 0], [1, 1]]),
        third_support(&sc.cover[2], [[0, 1], [1, 0], [1, 1]]),
        third_support(&sc.cover[3], [[0, 0], [0, 1], [1, 0]]),
    ];
    EmpiricalModel::new(sc, tables).expect("hardy is a valid model")
}

/// Independent uniform coins in every context: the product model, which
/// is noncontextual in every sense.
pub fn product() -> EmpiricalModel {
    let sc = two_party_scenario();
    let uniform = |c: &Context| {
        dist(
            c,
            &[
                (&[0, 0][..], ratio(1, 4)),
                (&[0, 1][..], ratio(1, 4)),
                (&[1, 0][..], ratio(1, 4)),
                (&[1, 1][..], ratio(1, 4)),
            ],
        )
    };
    let tables = sc.cover.iter().map(uniform).collect();
    EmpiricalModel::new(sc, tables).expect("product is a valid model")
}

/// The sequential Z-then-X / X-then-Z measurement system on the state
/// |0>: asking a first forces a = yes, asking b first erases that bias.
/// Inconsistently connected (delta 1) yet noncontextual, and its QQ
/// statistic is 0.
pub fn qorder_zx() -> CbdSystem {
    CbdSystem {
        contents: vec!["a".to_string(), "b".to_string()],
        contexts: vec![
            CbdContext {
                id: "AB".to_string(),
                measures: vec![0, 1],
                table: BTreeMap::from([
                    (vec![true, true], ratio(1, 2)),
                    (vec![true, false], ratio(1, 2)),
                ]),
            },
            CbdContext {
                id: "BA".to_string(),
                measures: vec![1, 0],
                table: BTreeMap::from([
                    (vec![false, false], ratio(1, 4)),
                    (vec![false, true], ratio(1, 4)),
                    (vec![true, false], ratio(1, 4)),
                    (vec![true, true], ratio(1, 4)),
                ]),
            },
        ],
    }
}

/// The PR box phrased as a cyclic rank-4 CbD system: four contents around
/// a cycle, three perfectly correlated contexts and one perfectly
/// anticorrelated. Consistently connected and contextual with D = 2.
pub fn cbd_prbox() -> CbdSystem {
    let correlated: BTreeMap<Vec<bool>, Rational> = BTreeMap::from([
        (vec![false, false], ratio(1, 2)),
        (vec![true, true], ratio(1, 2)),
    ]);
    let anticorrelated: BTreeMap<Vec<bool>, Rational> = BTreeMap::from([
        (vec![false, true], ratio(1, 2)),
        (vec![true, false], ratio(1, 2)),
    ]);
    CbdSystem {
        contents: vec![
            "a1".to_string(),
            "b1".to_string(),
            "a2".to_string(),
            "b2".to_string(),
        ],
        contexts: vec![
            CbdContext {
                id: "c1".to_string(),
                measures: vec![0, 1],
                table: correlated.clone(),
            },
            CbdContext {
                id: "c2".to_string(),
                measures: vec![1, 2],
                table: correlated.clone(),
            },
            CbdContext {
                id: "c3".to_string(),
                measures: vec![2, 3],
                table: correlated,
            },
            CbdContext {
                id: "c4".to_string(),
                measures: vec![3, 0],
                table: anticorrelated,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbd::{parse_cbd, validate_cbd_system};
    use crate::glue::signalling_report;
    use crate::scenario::{parse_model, validate_model};

    #[test]
    fn all_fixtures_are_valid() {
        for name in FIXTURE_NAMES {
            match fixture(name).expect("fixture exists") {
                Fixture::Scenario(m) => assert!(
                    validate_model(&m).is_empty(),
                    "{name} must validate"
                ),
                Fixture::Cbd(s) => assert!(
                    validate_cbd_system(&s).is_empty(),
                    "{name} must validate"
                ),
            }
        }
        assert!(fixture("nonsense").is_none());
    }

    #[test]
    fn fixture_text_round_trips() {
        for name in FIXTURE_NAMES {
            let fx = fixture(name).unwrap();
            let text = fx.to_text();
            match fx {
                Fixture::Scenario(m) => assert_eq!(parse_model(&text).unwrap(), m),
                Fixture::Cbd(s) => assert_eq!(parse_cbd(&text).unwrap(), s),
            }
        }
    }

    #[test]
    fn prbox_and_product_are_non_signalling_but_uniform_hardy_signals() {
        for m in [prbox(), product()] {
            assert!(!signalling_report(&m).is_signalling());
        }
        // Uniform-over-support weights cannot reproduce the a1 marginal
        // across the two a1 contexts: 1/2 in the full-support table versus
        // 1/3 where (0,0) is forbidden.
        assert!(signalling_report(&hardy()).is_signalling());
    }

    #[test]
    fn hardy_marginals_match_the_construction() {
        let m = hardy();
        let a1 = Context::new(vec![ObsId(0)]);
        let zero = Section {
            context: a1.clone(),
            values: vec![OutcomeId(0)],
        };
        let full = crate::scenario::marginalize(m.table(0), &a1).unwrap();
        assert_eq!(full.weight(&zero), ratio(1, 2));
        let punctured = crate::scenario::marginalize(m.table(1), &a1).unwrap();
        assert_eq!(punctured.weight(&zero), ratio(1, 3));
    }
}
