// SPDX-License-Identifier: Apache-2.0

//! Simulation and black-box training of reconfigurable continuously-coupled
//! waveguide interferometers.
//!
//! The crate is organized bottom-up:
//!
//! * [`chip`] describes layouts, propagation constants, couplings and the
//!   control models that map knobs onto propagation constants.
//! * [`unitary`] turns Hamiltonians into unitaries and compares them.
//! * [`photonics`] computes one- and two-photon output statistics and
//!   samples finite measurement records.
//! * [`trainer`] runs the measurement-driven finite-difference optimizer.
//!
//! ```
//! use ccwave::chip::{Chip, ChipGeometry, ChipParameters, ControlModel};
//! use ccwave::rng::stream;
//! use ccwave::unitary::fidelity;
//!
//! let geom = ChipGeometry::planar(4)?;
//! let target = ChipParameters::sample_target(&geom, &mut stream(1));
//! let chip = Chip::new(geom, ControlModel::direct(), target.couplings().clone())?;
//! let u = chip.unitary(&target.beta()[0])?;
//! assert!((fidelity(&u, &u)? - 1.0).abs() < 1e-12);
//! # Ok::<(), ccwave::Error>(())
//! ```

pub mod chip;
mod error;
pub mod photonics;
pub mod rng;
pub mod trainer;
pub mod unitary;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
