//! Exact-rational toolkit for nonsignaling correlation boxes: validation,
//! locality, Bell functionals, shareability, monogamy, and incompatibility.

pub mod bell;
pub mod correlation;
pub mod error;
pub mod incompat;
pub mod isotropic;
pub mod locality;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod scenario;
pub mod shareability;

pub use bell::{BellFunctional, Correlators};
pub use correlation::{validate_box, CorrelationBox, Relabeling, SignalingWitness};
pub use error::{Error, Result};
pub use locality::{Certificate, LocalModel, LocalityVerdict, SecrecyVerdict};
pub use polytope::DeterministicStrategy;
pub use rational::{parse_rational, rat, Rational};
pub use scenario::{PartySubset, Scenario};
