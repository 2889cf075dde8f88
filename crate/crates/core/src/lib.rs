//! Exact metric models, finite-scale coarse-map certifiers and coarse
//! dynamics experiments.
//!
//! * [`spaces`]: lattices, the free group F₂, the binary tree and cones,
//!   with exact distances and finite ball enumeration.
//! * [`coarse`]: bornologous profiles, properness tables, closeness bounds
//!   and Higson defects.
//! * [`actions`]: semigroup actions, orbits and coarse fixed points.
//! * [`odometer`]: the adding machine on the tree and on its boundary.
//! * [`cone`]: the λ-metric on cones and the compactification diagnostic.
//! * [`cli`]: the experiment runner behind the `coarse-lab` binary.

pub mod actions;
pub mod cli;
pub mod coarse;
pub mod cone;
pub mod error;
pub mod odometer;
pub mod par;
pub mod spaces;

pub use error::{Error, Result};
