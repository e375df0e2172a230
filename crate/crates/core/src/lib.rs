//! Few-body celestial mechanics for symmetric four- and five-body problems.
//!
//! The crate covers four layers that build on each other:
//!
//! * [`equilibrium`] solves the symmetric equilibrium (central configuration)
//!   families for their shape parameters as a function of the mass ratio.
//! * [`stability`] linearizes the motion of one body about such a
//!   configuration in the rotating frame and classifies the spectrum.
//! * [`szebehely`] evaluates the Sundman-inequality boundary surfaces, the
//!   Szebehely ladder and the critical constant that guarantees hierarchical
//!   stability of the Caledonian symmetric five-body problem.
//! * [`dynamics`] and [`harness`] integrate orbits with a 15th-order
//!   Gauss-Radau scheme and aggregate outcomes over phase-space grids.
//!
//! Units: G = 1 throughout; the CS5BP works with total mass 1 so that
//! masses equal the mass ratios.

pub mod cli;
pub mod common;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod format;
pub mod harness;
pub mod numeric;
pub mod stability;
pub mod szebehely;

pub use common::{
    energy_and_momentum, potential, EnergyMomentum, FullState, Hierarchy, MassRatios, MassVector,
    PlanarState, Vec2,
};
pub use error::{Error, Result};
