//! Matter-wave dynamics in atom guides.
//!
//! The library covers four pieces of physics, one module each:
//!
//! - [`guide`]: kinematics and exact spin evolution of a matter wave whose
//!   propagation direction follows a noncoplanar curved guide, including the
//!   accumulated geometric phase.
//! - [`two_level`]: time-dependent two-level dynamics driven by a classical
//!   field, solved both through a dynamical invariant (with the associated
//!   phase decomposition) and by direct integration.
//! - [`dressed`]: guiding potentials for the atomic centre of mass — classical
//!   adiabatic potentials, quantized-field dressed manifolds, three-level
//!   Λ manifolds, and the electro-magnetic side-guide potential.
//! - [`bands`]: Bloch band structure and transfer-matrix transmission for
//!   matter waves in spatially periodic guiding potentials, with recoil-scale
//!   helpers.
//!
//! [`cli`] wires everything into a batch front end (one thin binary); the
//! `examples/` directory holds one runnable example per capability.
//!
//! Internal unit conventions are documented per module. Frequency-like
//! quantities (detunings, couplings, effective fields) are angular frequencies
//! in rad/s; energies divided by the reduced Planck constant share that unit.
//! SI joules appear only at file-format boundaries.

pub mod bands;
pub mod cli;
pub mod constants;
pub mod dressed;
mod error;
pub mod guide;
pub mod linalg;
pub mod two_level;

pub use error::{Error, Result};
