//! Interferometric discrimination between real, complex and quaternionic
//! scattering amplitudes.
//!
//! - [`quat`]: Hamilton quaternion algebra.
//! - [`interference`]: cross sections, the cosines `α, β, γ`, the
//!   discriminator `F(α, β, γ)`, classification and amplitude fitting.
//! - [`mixtures`]: ensemble-averaged cosines for mixed beams.
//! - [`neutron`]: S-wave neutron amplitudes, slab phases, slab ordering and
//!   fringe visibility.
//! - [`harness`]: file formats, configuration, Monte-Carlo counting
//!   statistics and reports behind the `qinterf` binary.

pub mod error;
pub mod harness;
pub mod interference;
pub mod mixtures;
pub mod neutron;
pub mod quat;

pub use error::{Error, Result};
