//! Fixed benchmark inputs. Builders live here rather than in the bench
//! file so every benchmark times the analysis alone, never input
//! construction, and so the inputs stay identical across benchmark runs.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctxkit::cbd::{CbdSystem, SurdMatrix};
use ctxkit::fixtures::{fixture, Fixture};
use ctxkit::sample::{
    random_consistently_connected_cyclic, random_projector, random_scenario, random_state,
    random_support_model,
};
use ctxkit::scenario::mix_models;
use ctxkit::surd::Surd;
use ctxkit::{ratio, EmpiricalModel};

pub fn scenario_fixture(name: &str) -> EmpiricalModel {
    match fixture(name) {
        Some(Fixture::Scenario(m)) => m,
        _ => panic!("{name} is a scenario fixture"),
    }
}

pub fn cbd_fixture(name: &str) -> CbdSystem {
    match fixture(name) {
        Some(Fixture::Cbd(sys)) => sys,
        _ => panic!("{name} is a CbD fixture"),
    }
}

/// A point strictly inside the contextual region: 3/4 PR box plus 1/4
/// uniform noise, contextual fraction 1/2.
pub fn noisy_prbox() -> EmpiricalModel {
    let pr = scenario_fixture("prbox");
    let uniform = scenario_fixture("product");
    mix_models(&pr, &uniform, &ratio(3, 4)).expect("same scenario")
}

/// A deterministic random support model, sized up from the fixtures.
pub fn sampled_support_model() -> ctxkit::glue::SupportModel {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let sc = random_scenario(&mut rng);
    random_support_model(&mut rng, &sc)
}

/// A deterministic consistently connected rank-4 cyclic system.
pub fn sampled_cyclic_system() -> CbdSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    random_consistently_connected_cyclic(&mut rng, 4, 6)
}

/// Deterministic dimension-4 quantum generator inputs.
pub fn sampled_quantum_inputs() -> (Vec<Surd>, SurdMatrix, SurdMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let state = random_state(&mut rng, 4);
    let a = random_projector(&mut rng, 4);
    let b = random_projector(&mut rng, 4);
    (state, a, b)
}
