//! Simulation and verification engine for EPR-Bell correlation experiments.
//!
//! The crate is organized around the measurement models it compares:
//!
//! * [`spin`]: coplanar axes, spin-1/2 outcomes, outcome-pair counting.
//! * [`quantum`]: closed-form singlet predictions and the CHSH operator
//!   algebra (operator identity, Tsirelson bound).
//! * [`lhv`]: factorizable hidden-variable models, the CHSH and
//!   joint-distribution bounds, and set-measure (Wigner) inequalities.
//! * [`model1`]: classical angular momenta with ensemble-dependent
//!   measurement probabilities.
//! * [`model2`]: hemispherical fields on spheres, equivalence classes and
//!   the non-separable two-party field.
//! * [`experiment`]: seeded parallel runs, angle scans, verification suites
//!   and report emission used by the `bellfoundry` binary.
//!
//! All Monte Carlo work is driven by [`rng`], which derives independent
//! ChaCha8 substreams from `(seed, stream)` so results do not depend on the
//! number of worker threads.

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod lhv;
pub mod model1;
pub mod model2;
pub mod oracle;
pub mod quantum;
pub mod rng;
pub mod spin;

pub use error::{Error, Result};
pub use spin::{
    empirical_expectation, wrap_delta, Axis, ExpectationEstimate, Outcome, PairCounts, V_MAX,
};
