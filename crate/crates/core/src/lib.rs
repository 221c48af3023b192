//! Stationary discrete solitons of a DNLS lattice with next-nearest-neighbour coupling.
//!
//! The stationary equation is a reversible, volume-preserving polynomial map of R^4.
//! Solitons are orbits homoclinic to the origin; they are located by intersecting
//! power-series parametrizations of the origin's stable and unstable manifolds.

pub mod error;
pub mod homoclinic;
pub mod lattice;
pub mod manifold;
pub mod soliton;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{ModelParams, State2, State4};
