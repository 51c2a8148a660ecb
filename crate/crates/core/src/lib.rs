//! Steady subsonic Euler flow through infinitely long two-dimensional nozzles.
//!
//! The flow is computed through its stream function `ψ`, which solves a
//! quasilinear elliptic problem whose coefficients come from the upstream
//! far-field state. The crate is organized bottom-up:
//!
//! - [`gas`]: isentropic gas algebra and the subsonic density branch.
//! - [`farfield`]: Bernoulli profiles, upstream/downstream asymptotic states
//!   and the stream-coordinate coefficient functions.
//! - [`geometry`]: nozzle walls, truncated domains, meshes and boundary data.
//! - [`elliptic`]: the truncated coefficient pipeline and the Picard solver.
//! - [`flow`]: field recovery and invariant diagnostics.
//! - [`critical`]: margin sweeps and the critical mass-flux bracket.

pub mod critical;
pub mod elliptic;
pub mod farfield;
pub mod flow;
pub mod gas;
pub mod geometry;
pub mod numerics;
