//! Exact-arithmetic contextuality analysis.
//!
//! The crate decides, for empirical models over a family of measurement
//! contexts, whether the locally consistent probability tables glue into a
//! single global account. Every verdict is computed over exact rationals or
//! integers; there is no floating point anywhere in a decision path.
//!
//! The layers, from cheapest to strongest machinery:
//!
//! - [`scenario`]: observables, contexts, sections, distributions, and the
//!   external JSON model format.
//! - [`glue`]: overlap marginal comparison (signalling / direct influence),
//!   backtracking global-section search, logical and strong contextuality.
//! - [`lp`]: an exact rational simplex with Farkas and optimality
//!   certificates, the joint-distribution feasibility test, and the
//!   contextual fraction.
//! - [`cech`]: the integer cochain extension obstruction over the nerve of
//!   the cover, via Smith normal form.
//! - [`cbd`]: Contextuality-by-Default for inconsistently connected systems,
//!   multimaximal couplings, the cyclic-system criterion, question-order
//!   effects, and a small exact quantum generator for sequential projective
//!   measurements.
//! - [`sample`]: deterministic seeded generators used by the randomized test
//!   suites.
//!
//! Feasible verdicts return explicit witnesses (joints, couplings, cochains)
//! and infeasible verdicts return certificates (Farkas vectors); both are
//! re-verified by direct arithmetic before they are reported.

pub mod cbd;
pub mod cech;
pub mod error;
pub mod fixtures;
pub mod glue;
pub mod lp;
pub mod rational;
pub mod sample;
pub mod scenario;
pub mod surd;

pub use error::{Error, Result};
pub use rational::{parse_rational, ratio, Rational};
pub use scenario::{
    marginalize, parse_model, relabel_model, restrict_section, serialize_model, validate_model,
    Context, Distribution, EmpiricalModel, Observable, ObsId, OutcomeId, Scenario, Section,
};
