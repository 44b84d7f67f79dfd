//! Randomized invariant suites over seeded generators. Each test draws a
//! moderate number of instances (the CLI acceptance suite runs the large
//! counts) and checks a law against an independent re-computation rather
//! than against the implementation under test.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxkit::cbd::{
    self, build_order_effect_system, cbd_contextual, cyclic_criterion, qq_statistic,
    quantum_order_model, to_empirical_model,
};
use ctxkit::cech::{obstruction, verify_cochain_family};
use ctxkit::glue::{
    classify, extend_section, first_global_section, global_sections, signalling_report,
    support_model, SupportModel,
};
use ctxkit::lp::{
    contextual_fraction, incidence_matrix, noncontextuality_lp, CfOutcome, NcLpOutcome,
    DEFAULT_MAX_COLUMNS,
};
use ctxkit::sample::{
    random_consistently_connected_cyclic, random_cyclic_system, random_model, random_ns_model,
    random_probability, random_projector, random_scenario, random_state, random_support_model,
};
use ctxkit::scenario::{marginalize, mix_models, relabel_model, Scenario, Section};
use ctxkit::{OutcomeId, Rational};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Brute-force global sections: filter all assignments by support
/// membership of every restriction. Independent of the backtracking
/// search.
fn brute_force_globals(sm: &SupportModel) -> Vec<Section> {
    sm.scenario
        .assignments()
        .filter(|g| {
            sm.scenario
                .cover
                .iter()
                .zip(&sm.supports)
                .all(|(c, support)| support.contains(&g.restrict(c)))
        })
        .collect()
}

#[test]
fn restriction_is_functorial_on_random_sections() {
    let mut rng = rng(101);
    for _ in 0..50 {
        let sc = random_scenario(&mut rng);
        for g in sc.assignments() {
            for c in &sc.cover {
                // Restricting in stages agrees with restricting directly.
                let via_context = g.restrict(c);
                for o in c.members() {
                    let single = ctxkit::Context::new(vec![*o]);
                    assert_eq!(via_context.restrict(&single), g.restrict(&single));
                }
                // Restricting to the context itself is the identity.
                assert_eq!(via_context.restrict(c), via_context);
            }
        }
    }
}

#[test]
fn search_agrees_with_brute_force_enumeration() {
    let mut rng = rng(102);
    for _ in 0..60 {
        let sc = random_scenario(&mut rng);
        let sm = random_support_model(&mut rng, &sc);
        let expected = brute_force_globals(&sm);
        assert_eq!(global_sections(&sm), expected);
        assert_eq!(first_global_section(&sm), expected.first().cloned());
    }
}

#[test]
fn extension_witnesses_are_genuine_and_complete() {
    let mut rng = rng(103);
    for _ in 0..40 {
        let sc = random_scenario(&mut rng);
        let sm = random_support_model(&mut rng, &sc);
        let globals = brute_force_globals(&sm);
        for (i, c) in sc.cover.iter().enumerate() {
            for s in &sm.supports[i] {
                let extension = extend_section(&sm, s).unwrap();
                let expected = globals.iter().find(|g| &g.restrict(c) == s);
                match (extension, expected) {
                    (Some(found), Some(_)) => {
                        assert_eq!(&found.restrict(c), s);
                        assert!(globals.contains(&found));
                    }
                    (None, None) => {}
                    (got, want) => panic!(
                        "extension search disagrees with brute force: {got:?} vs {want:?}"
                    ),
                }
            }
        }
    }
}

/// Independent signalling detector: compare every overlap marginal via
/// `marginalize` directly.
fn signals_by_marginalization(m: &ctxkit::EmpiricalModel) -> bool {
    let sc = &m.scenario;
    for i in 0..sc.cover.len() {
        for j in i + 1..sc.cover.len() {
            let overlap = sc.cover[i].intersect(&sc.cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let a = marginalize(m.table(i), &overlap).unwrap();
            let b = marginalize(m.table(j), &overlap).unwrap();
            if a.weights != b.weights {
                return true;
            }
        }
    }
    false
}

#[test]
fn signalling_report_matches_direct_marginal_comparison() {
    let mut rng = rng(104);
    for _ in 0..60 {
        let sc = random_scenario(&mut rng);
        let m = random_model(&mut rng, &sc, 6);
        assert_eq!(
            signalling_report(&m).is_signalling(),
            signals_by_marginalization(&m)
        );
        let ns = random_ns_model(&mut rng, &sc);
        assert!(!signals_by_marginalization(&ns));
    }
}

#[test]
fn contextuality_hierarchy_holds_on_random_models() {
    let mut rng = rng(105);
    for _ in 0..40 {
        let sc = random_scenario(&mut rng);
        // classify re-checks the hierarchy internally and returns an
        // internal error on any breach; both arbitrary and non-signalling
        // models must pass.
        let m = random_model(&mut rng, &sc, 6);
        let v = classify(&m, true, DEFAULT_MAX_COLUMNS).unwrap();
        if v.strongly_contextual {
            assert!(v.logically_contextual);
        }
        if v.logically_contextual {
            assert_eq!(v.probabilistically_contextual, Some(true));
        }
        let ns = random_ns_model(&mut rng, &sc);
        let v = classify(&ns, true, DEFAULT_MAX_COLUMNS).unwrap();
        assert!(!v.signalling);
        if v.strongly_contextual {
            assert!(v.logically_contextual);
        }
    }
}

#[test]
fn feasible_joints_reproduce_tables_and_respect_supports() {
    let mut rng = rng(106);
    for _ in 0..30 {
        let sc = random_scenario(&mut rng);
        let m = random_ns_model(&mut rng, &sc);
        match noncontextuality_lp(&m, DEFAULT_MAX_COLUMNS).unwrap() {
            NcLpOutcome::Feasible { joint } => {
                let sm = support_model(&m);
                for (i, c) in sc.cover.iter().enumerate() {
                    let marginal = marginalize(&joint, c).unwrap();
                    assert_eq!(&marginal.weights, &m.table(i).weights);
                    for s in joint.weights.keys() {
                        assert!(sm.supports[i].contains(&s.restrict(c)));
                    }
                }
            }
            NcLpOutcome::Infeasible { certificate } => {
                // Re-verify the Farkas certificate against a freshly built
                // incidence system: y^T M <= 0 on every column and
                // y^T v > 0.
                let system = incidence_matrix(&sc, DEFAULT_MAX_COLUMNS).unwrap();
                assert_eq!(system.rows.len(), certificate.farkas.len());
                for j in 0..system.matrix.cols() {
                    let mut dot = Rational::zero();
                    for (i, y) in certificate.farkas.iter().enumerate() {
                        dot += y * system.matrix.entry(i, j);
                    }
                    assert!(!dot.is_positive());
                }
                let mut value = Rational::zero();
                for ((ctx, section), y) in system.rows.iter().zip(&certificate.farkas) {
                    value += y * &m.table(*ctx).weight(section);
                }
                assert!(value.is_positive());
            }
        }
    }
}

#[test]
fn contextual_fraction_is_convex_and_anchored() {
    let mut rng = rng(107);
    let fraction = |m: &ctxkit::EmpiricalModel| -> Rational {
        match contextual_fraction(m, DEFAULT_MAX_COLUMNS).unwrap() {
            CfOutcome::Computed(report) => report.fraction,
            CfOutcome::Confounded { .. } => panic!("non-signalling inputs only"),
        }
    };
    for _ in 0..12 {
        let sc = random_scenario(&mut rng);
        let a = random_ns_model(&mut rng, &sc);
        let b = random_ns_model(&mut rng, &sc);
        let lambda = random_probability(&mut rng, 8);
        let mixed = mix_models(&a, &b, &lambda).unwrap();

        let cf_a = fraction(&a);
        let cf_b = fraction(&b);
        let cf_m = fraction(&mixed);
        let bound = &(&lambda * &cf_a) + &(&(&Rational::one() - &lambda) * &cf_b);
        assert!(cf_m <= bound, "convexity failed: {cf_m} > {bound}");

        // CF = 0 exactly on LP-feasible models; CF = 1 exactly on strongly
        // contextual non-signalling models.
        let feasible = noncontextuality_lp(&mixed, DEFAULT_MAX_COLUMNS)
            .unwrap()
            .is_feasible();
        assert_eq!(cf_m.is_zero(), feasible);
        let strong = first_global_section(&support_model(&mixed)).is_none();
        assert_eq!(cf_m.is_one(), strong);
    }
}

#[test]
fn vanishing_obstructions_follow_genuine_extensions() {
    let mut rng = rng(108);
    for _ in 0..40 {
        let sc = random_scenario(&mut rng);
        let sm = random_support_model(&mut rng, &sc);
        for support in &sm.supports {
            for s in support {
                let result = obstruction(&sm, s).unwrap();
                let extendable = extend_section(&sm, s).unwrap().is_some();
                if extendable {
                    assert!(
                        result.vanishes,
                        "a genuine extension is an integer family"
                    );
                }
                if !result.vanishes {
                    assert!(!extendable, "non-vanishing must imply no extension");
                }
                if let Some(family) = &result.witness {
                    verify_cochain_family(&sm, s, family).unwrap();
                }
            }
        }
    }
}

fn permuted_section(s: &Section, perms: &[Vec<usize>]) -> Section {
    Section {
        context: s.context.clone(),
        values: s
            .context
            .members()
            .iter()
            .zip(&s.values)
            .map(|(o, v)| OutcomeId(perms[o.0][v.0]))
            .collect(),
    }
}

fn random_perms<R: Rng>(rng: &mut R, sc: &Scenario) -> Vec<Vec<usize>> {
    sc.observables
        .iter()
        .map(|ob| {
            let mut p: Vec<usize> = (0..ob.outcomes.len()).collect();
            for i in (1..p.len()).rev() {
                let j = rng.gen_range(0..=i);
                p.swap(i, j);
            }
            p
        })
        .collect()
}

#[test]
fn verdicts_are_natural_under_outcome_relabeling() {
    let mut rng = rng(109);
    for _ in 0..25 {
        let sc = random_scenario(&mut rng);
        let m = random_model(&mut rng, &sc, 6);
        let perms = random_perms(&mut rng, &sc);
        let relabeled = relabel_model(&m, &perms).unwrap();

        let v = classify(&m, true, DEFAULT_MAX_COLUMNS).unwrap();
        let w = classify(&relabeled, true, DEFAULT_MAX_COLUMNS).unwrap();
        assert_eq!(v.signalling, w.signalling);
        assert_eq!(v.logically_contextual, w.logically_contextual);
        assert_eq!(v.strongly_contextual, w.strongly_contextual);
        assert_eq!(
            v.probabilistically_contextual,
            w.probabilistically_contextual
        );

        // Cohomology verdicts transport along the relabeling section by
        // section.
        let sm = support_model(&m);
        let sm_relabeled = support_model(&relabeled);
        for support in &sm.supports {
            for s in support {
                let here = obstruction(&sm, s).unwrap();
                let there = obstruction(&sm_relabeled, &permuted_section(s, &perms)).unwrap();
                assert_eq!(here.vanishes, there.vanishes);
            }
        }
    }
}

#[test]
fn cyclic_criterion_agrees_with_the_coupling_lp() {
    let mut rng = rng(110);
    for _ in 0..60 {
        let rank = rng.gen_range(2..=4usize);
        let sys = if rng.gen_range(0..2) == 1 {
            random_cyclic_system(&mut rng, rank, 6)
        } else {
            random_consistently_connected_cyclic(&mut rng, rank, 6)
        };
        let report = cyclic_criterion(&sys).unwrap();
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        assert_eq!(
            report.contextual, verdict.contextual,
            "criterion and coupling LP disagree on {}",
            cbd::serialize_cbd(&sys)
        );
        assert_eq!(report.delta, verdict.delta);
    }
}

#[test]
fn consistently_connected_systems_reduce_to_the_standard_lp() {
    let mut rng = rng(111);
    for _ in 0..40 {
        let rank = rng.gen_range(3..=4usize);
        let sys = random_consistently_connected_cyclic(&mut rng, rank, 6);
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        let model = to_empirical_model(&sys).unwrap();
        assert!(!signalling_report(&model).is_signalling());
        let lp = noncontextuality_lp(&model, DEFAULT_MAX_COLUMNS).unwrap();
        assert_eq!(verdict.contextual, !lp.is_feasible());
    }
}

#[test]
fn quantum_sequential_tables_always_satisfy_qq() {
    let mut rng = rng(112);
    for _ in 0..30 {
        let dim = rng.gen_range(2..=4usize);
        let state = random_state(&mut rng, dim);
        let proj_a = random_projector(&mut rng, dim);
        let proj_b = random_projector(&mut rng, dim);
        let data = quantum_order_model(&state, &proj_a, &proj_b).unwrap();
        assert!(qq_statistic(&data).is_zero());
        let sys = build_order_effect_system(&data).unwrap();
        let report = cyclic_criterion(&sys).unwrap();
        let verdict = cbd_contextual(&sys, DEFAULT_MAX_COLUMNS).unwrap();
        assert_eq!(report.contextual, verdict.contextual);
    }
}

#[test]
fn support_enlargement_is_monotone_for_global_sections() {
    let mut rng = rng(113);
    for _ in 0..30 {
        let sc = random_scenario(&mut rng);
        let sm = random_support_model(&mut rng, &sc);
        let before: BTreeSet<Section> = global_sections(&sm).into_iter().collect();
        let mut enlarged = sm.clone();
        // Complete one random context's support entirely.
        let i = rng.gen_range(0..sc.cover.len());
        enlarged.supports[i] = sc.sections(&sc.cover[i]).collect();
        let after: BTreeSet<Section> = global_sections(&enlarged).into_iter().collect();
        assert!(before.is_subset(&after));
    }
}
