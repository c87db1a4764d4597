//! Simulation and analysis kernel for granular-gripper surface adaptation.
//!
//! The library has two halves that meet in the [`mobility`] module:
//!
//! * a particle-flow simulator ([`profiles`], [`multiscale`], [`dynamics`],
//!   [`metrics`], [`statespace`]) in which a gripper surface adapts to a
//!   target profile by moving blocks of particles toward the worst-fitting
//!   region at the worst-fitting scale, and
//! * an executable finite-category kernel ([`fincat`]) that checks category
//!   laws, functors and natural transformations, and decides isomorphism
//!   versus equivalence of small categories.
//!
//! [`mobility`] enumerates the reachable states of toy simulator instances
//! into thin categories and classifies them (hard / soft / effectively soft)
//! with the category kernel.

pub mod config;
pub mod dynamics;
pub mod fincat;
pub mod height;
pub mod metrics;
pub mod mobility;
pub mod multiscale;
pub mod profiles;
pub mod statespace;

pub use config::{SimConfig, TargetChoice};
pub use height::HeightField;
pub use profiles::Profile;
