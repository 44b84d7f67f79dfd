//! Acceptance gate: seven product criteria, one verdict line each.
//!
//! Each criterion re-checks results against independent arithmetic
//! (brute-force enumeration, direct Farkas products, direct coupling
//! marginals) rather than trusting the code under test. The process exits
//! nonzero if any criterion fails, so the workspace test run fails with
//! it.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctxkit::cbd::{
    build_order_effect_system, cbd_contextual, cyclic_criterion, parse_cbd, qq_statistic,
    quantum_order_model, serialize_cbd, to_empirical_model, SurdMatrix,
};
use ctxkit::cech::{obstruction, verify_cochain_family};
use ctxkit::fixtures::{fixture, Fixture, FIXTURE_NAMES};
use ctxkit::glue::{
    extend_section, first_global_section, global_sections, logical_witnesses, signalling_report,
    support_model, SupportModel,
};
use ctxkit::lp::{
    contextual_fraction, incidence_matrix, noncontextuality_lp, CfOutcome, NcCertificate,
    NcLpOutcome, DEFAULT_MAX_COLUMNS,
};
use ctxkit::sample::{
    random_binary_scenario, random_consistently_connected_cyclic, random_cyclic_system,
    random_ns_model, random_projector, random_state,
};
use ctxkit::surd::Surd;
use ctxkit::{ratio, EmpiricalModel, Rational, Section};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 (PR box)", criterion_1_prbox),
        ("2 (Hardy)", criterion_2_hardy),
        ("3 (hierarchy suite)", criterion_3_hierarchy),
        ("4 (cohomology soundness)", criterion_4_cohomology),
        ("5 (CbD equivalence)", criterion_5_cbd),
        ("6 (QQ equality)", criterion_6_qq),
        ("7 (determinism)", criterion_7_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {name}: PASS - {detail}"),
            Ok(Err(reason)) => {
                failed += 1;
                println!("criterion {name}: FAIL - {reason}");
            }
            Err(payload) => {
                failed += 1;
                println!("criterion {name}: FAIL - panic: {}", panic_text(&payload));
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string payload".to_string()
    }
}

fn ok<T>(r: ctxkit::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn scenario_fixture(name: &str) -> EmpiricalModel {
    match fixture(name) {
        Some(Fixture::Scenario(m)) => m,
        _ => panic!("{name} is a scenario fixture"),
    }
}

/// Brute-force global sections, independent of the backtracking search.
fn enumerate_globals(sm: &SupportModel) -> Vec<Section> {
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

/// Re-checks a Farkas certificate by direct products against a freshly
/// built incidence system: `y^T M <= 0` columnwise and `y^T v > 0`.
fn recheck_farkas(m: &EmpiricalModel, certificate: &NcCertificate) -> Result<(), String> {
    let system = ok(incidence_matrix(&m.scenario, DEFAULT_MAX_COLUMNS))?;
    if system.rows.len() != certificate.farkas.len() {
        return Err("certificate length does not match the incidence system".into());
    }
    for j in 0..system.matrix.cols() {
        let mut dot = Rational::zero();
        for (i, y) in certificate.farkas.iter().enumerate() {
            dot += y * system.matrix.entry(i, j);
        }
        if dot.is_positive() {
            return Err(format!("certificate fails on column {j}"));
        }
    }
    let mut value = Rational::zero();
    for ((ctx, section), y) in system.rows.iter().zip(&certificate.farkas) {
        value += y * &m.table(*ctx).weight(section);
    }
    if !value.is_positive() {
        return Err("certificate has non-positive value against the tables".into());
    }
    Ok(())
}

fn criterion_1_prbox() -> Outcome {
    let started = Instant::now();
    let m = scenario_fixture("prbox");

    ensure!(
        !signalling_report(&m).is_signalling(),
        "PR box must be non-signalling"
    );

    let sm = support_model(&m);
    ensure!(
        global_sections(&sm).is_empty(),
        "PR box must have no global section"
    );

    match ok(noncontextuality_lp(&m, DEFAULT_MAX_COLUMNS))? {
        NcLpOutcome::Feasible { .. } => return Err("LP must be infeasible".into()),
        NcLpOutcome::Infeasible { certificate } => recheck_farkas(&m, &certificate)?,
    }

    match ok(contextual_fraction(&m, DEFAULT_MAX_COLUMNS))? {
        CfOutcome::Computed(report) => {
            ensure!(report.fraction.is_one(), "contextual fraction must be 1");
            ensure!(
                report.noncontextual_weight.is_zero(),
                "noncontextual weight must be 0"
            );
        }
        CfOutcome::Confounded { .. } => return Err("PR box does not signal".into()),
    }

    let supported: usize = sm.supports.iter().map(|s| s.len()).sum();
    ensure!(supported == 8, "PR box has 8 supported sections");
    for (i, support) in sm.supports.iter().enumerate() {
        for s in support {
            let result = ok(obstruction(&sm, s))?;
            ensure!(
                !result.vanishes,
                "section {} in context {} must be obstructed",
                sm.scenario.section_label(s),
                i
            );
        }
    }

    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "non-signalling; no global section; Farkas certificate re-verified; fraction 1; 8/8 sections obstructed; {elapsed:?}"
    ))
}

fn criterion_2_hardy() -> Outcome {
    let started = Instant::now();
    let m = scenario_fixture("hardy");
    let sc = &m.scenario;
    let sm = support_model(&m);

    let witnesses = logical_witnesses(&sm);
    let expected = witnesses.iter().any(|(i, s)| {
        sc.context_key(&sc.cover[*i]) == "a1,b1" && sc.section_label(s) == "a1=0,b1=0"
    });
    ensure!(
        expected,
        "the non-extendable section (a1=0,b1=0) must be reported"
    );

    let global = first_global_section(&sm);
    let Some(g) = global else {
        return Err("Hardy is not strongly contextual; a witness assignment is due".into());
    };
    for (c, support) in sc.cover.iter().zip(&sm.supports) {
        ensure!(
            support.contains(&g.restrict(c)),
            "returned global assignment must restrict into every support"
        );
    }

    match ok(noncontextuality_lp(&m, DEFAULT_MAX_COLUMNS))? {
        NcLpOutcome::Feasible { .. } => {
            return Err("LP must be infeasible on the uniform-over-support tables".into())
        }
        NcLpOutcome::Infeasible { certificate } => recheck_farkas(&m, &certificate)?,
    }

    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "witness a1=0,b1=0; global assignment {} verified; LP infeasible; {elapsed:?}",
        sc.section_label(&g)
    ))
}

const HIERARCHY_SEED: u64 = 9301;
const HIERARCHY_INSTANCES: usize = 1000;

fn criterion_3_hierarchy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(HIERARCHY_SEED);
    let mut strong = 0usize;
    let mut logical = 0usize;
    let mut infeasible = 0usize;
    for i in 0..HIERARCHY_INSTANCES {
        let sc = random_binary_scenario(&mut rng);
        let m = random_ns_model(&mut rng, &sc);
        ensure!(
            !signalling_report(&m).is_signalling(),
            "instance {i}: sampler produced a signalling model"
        );

        let sm = support_model(&m);
        let found = global_sections(&sm);
        ensure!(
            found == enumerate_globals(&sm),
            "instance {i}: search disagrees with exhaustive enumeration"
        );

        let is_strong = found.is_empty();
        let is_logical = !logical_witnesses(&sm).is_empty();
        let is_infeasible = !ok(noncontextuality_lp(&m, DEFAULT_MAX_COLUMNS))?.is_feasible();
        ensure!(
            !is_strong || is_logical,
            "instance {i}: strong without logical"
        );
        ensure!(
            !is_logical || is_infeasible,
            "instance {i}: logical with a feasible LP"
        );
        strong += usize::from(is_strong);
        logical += usize::from(is_logical);
        infeasible += usize::from(is_infeasible);
    }
    Ok(format!(
        "{HIERARCHY_INSTANCES} non-signalling models, zero violations; search = enumeration; strong {strong}, logical {logical}, LP-infeasible {infeasible}"
    ))
}

fn criterion_4_cohomology() -> Outcome {
    // The same model stream as the hierarchy suite.
    let mut rng = ChaCha8Rng::seed_from_u64(HIERARCHY_SEED);
    let mut checked = 0usize;
    let mut vanishing = 0usize;
    for i in 0..HIERARCHY_INSTANCES {
        let sc = random_binary_scenario(&mut rng);
        let m = random_ns_model(&mut rng, &sc);
        let sm = support_model(&m);
        for support in &sm.supports {
            for s in support {
                let extendable = ok(extend_section(&sm, s))?.is_some();
                let result = ok(obstruction(&sm, s))?;
                ensure!(
                    !extendable || result.vanishes,
                    "instance {i}: extendable section {} with non-vanishing obstruction",
                    sm.scenario.section_label(s)
                );
                if let Some(family) = &result.witness {
                    ok(verify_cochain_family(&sm, s, family))?;
                }
                checked += 1;
                vanishing += usize::from(result.vanishes);
            }
        }
    }
    Ok(format!(
        "{checked} supported sections over {HIERARCHY_INSTANCES} models, zero violations; {vanishing} vanishing witnesses re-verified"
    ))
}

fn criterion_5_cbd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9502);
    let instances = 1000usize;
    let mut contextual = 0usize;
    let mut reduced = 0usize;
    for i in 0..instances {
        let rank = 2 + i % 3;
        let consistent = i % 2 == 0;
        let sys = if consistent {
            random_consistently_connected_cyclic(&mut rng, rank, 6)
        } else {
            random_cyclic_system(&mut rng, rank, 6)
        };

        let report = ok(cyclic_criterion(&sys))?;
        let verdict = ok(cbd_contextual(&sys, DEFAULT_MAX_COLUMNS))?;
        ensure!(
            report.contextual == verdict.contextual,
            "instance {i}: criterion {} but coupling LP {}",
            report.contextual,
            verdict.contextual
        );
        ensure!(
            report.delta == verdict.delta,
            "instance {i}: direct-influence values disagree"
        );
        contextual += usize::from(verdict.contextual);

        // Consistently connected systems of rank >= 3 convert to empirical
        // models (rank 2 repeats a context pair), where the standard LP
        // must agree.
        if consistent && rank >= 3 {
            let m = ok(to_empirical_model(&sys))?;
            ensure!(
                !signalling_report(&m).is_signalling(),
                "instance {i}: consistently connected system converted to a signalling model"
            );
            let feasible = ok(noncontextuality_lp(&m, DEFAULT_MAX_COLUMNS))?.is_feasible();
            ensure!(
                verdict.contextual == !feasible,
                "instance {i}: coupling LP and standard LP disagree"
            );
            reduced += 1;
        }
    }
    Ok(format!(
        "{instances} cyclic systems rank 2-4, zero disagreements ({contextual} contextual); {reduced} consistently connected instances match the standard LP"
    ))
}

fn criterion_6_qq() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9603);
    let instances = 120usize;
    for i in 0..instances {
        let dim = 2 + i % 3;
        let state = random_state(&mut rng, dim);
        let proj_a = random_projector(&mut rng, dim);
        let proj_b = random_projector(&mut rng, dim);
        let data = ok(quantum_order_model(&state, &proj_a, &proj_b))?;
        let q = qq_statistic(&data);
        ensure!(
            q.is_zero(),
            "instance {i} (dim {dim}): q = {q} instead of 0"
        );
    }

    // The Z/X example: state (1,0), first projector onto the first axis,
    // second onto the uniform superposition.
    let one = Surd::one();
    let zero = Surd::zero();
    let half = Surd::from_rational(ratio(1, 2));
    let state = [one.clone(), zero.clone()];
    let proj_a = SurdMatrix::from_rows(vec![
        vec![one.clone(), zero.clone()],
        vec![zero.clone(), zero.clone()],
    ])
    .expect("2x2");
    let proj_b = SurdMatrix::from_rows(vec![
        vec![half.clone(), half.clone()],
        vec![half.clone(), half],
    ])
    .expect("2x2");
    let data = ok(quantum_order_model(&state, &proj_a, &proj_b))?;

    let expected_ab: BTreeMap<(bool, bool), Rational> = BTreeMap::from([
        ((true, true), ratio(1, 2)),
        ((true, false), ratio(1, 2)),
    ]);
    let expected_ba: BTreeMap<(bool, bool), Rational> = BTreeMap::from([
        ((true, true), ratio(1, 4)),
        ((true, false), ratio(1, 4)),
        ((false, true), ratio(1, 4)),
        ((false, false), ratio(1, 4)),
    ]);
    ensure!(
        data.table_ab == expected_ab,
        "Z/X a-then-b table must be 1/2, 1/2, 0, 0"
    );
    ensure!(
        data.table_ba == expected_ba,
        "Z/X b-then-a table must be uniform"
    );
    ensure!(qq_statistic(&data).is_zero(), "Z/X q must be 0");

    let sys = ok(build_order_effect_system(&data))?;
    let report = ok(cyclic_criterion(&sys))?;
    ensure!(report.d == ratio(-1, 1), "Z/X d must be -1, got {}", report.d);
    ensure!(report.delta == ratio(1, 1), "Z/X direct influence must be 1");
    ensure!(!report.contextual, "Z/X must be CbD-noncontextual");
    let verdict = ok(cbd_contextual(&sys, DEFAULT_MAX_COLUMNS))?;
    ensure!(!verdict.contextual, "Z/X coupling must exist");

    Ok(format!(
        "{instances} projector models with q = 0 exactly; Z/X tables reproduced, d = -1, noncontextual despite direct influence 1"
    ))
}

fn criterion_7_determinism() -> Outcome {
    // Parse -> serialize -> parse fixpoint on every fixture.
    for name in FIXTURE_NAMES {
        let text = match fixture(name).expect("fixture names enumerate fixtures") {
            Fixture::Scenario(m) => {
                let text = ctxkit::serialize_model(&m);
                let reparsed = ok(ctxkit::parse_model(&text))?;
                ensure!(
                    ctxkit::serialize_model(&reparsed) == text,
                    "{name}: scenario round trip is not a fixpoint"
                );
                text
            }
            Fixture::Cbd(sys) => {
                let text = serialize_cbd(&sys);
                let reparsed = ok(parse_cbd(&text))?;
                ensure!(
                    serialize_cbd(&reparsed) == text,
                    "{name}: CbD round trip is not a fixpoint"
                );
                text
            }
        };
        ensure!(!text.is_empty(), "{name}: canonical text must be non-empty");
    }

    // Byte-identical reports across repeated binary runs.
    for name in FIXTURE_NAMES {
        for format in ["json", "text"] {
            let run = || {
                Command::new(env!("CARGO_BIN_EXE_ctxkit"))
                    .args(["analyze", name, "--format", format])
                    .output()
                    .expect("binary runs")
            };
            let first = run();
            let second = run();
            ensure!(
                first.status.success() && second.status.success(),
                "{name}: analyze failed: {}",
                String::from_utf8_lossy(&first.stderr)
            );
            ensure!(
                first.stdout == second.stdout,
                "{name}: {format} reports differ between runs"
            );
        }
    }
    Ok(format!(
        "round-trip fixpoint on {} fixtures; reports byte-identical across repeated runs",
        FIXTURE_NAMES.len()
    ))
}
