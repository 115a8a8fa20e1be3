// SPDX-License-Identifier: Apache-2.0

//! Interferometer layouts, physical parameters and control models.

mod control;
mod device;
mod doc;
mod geometry;
mod hamiltonian;
mod params;

pub use control::{crosstalk_weights, ControlModel, MESH_BETA_BASE, MESH_CONTROL_RANGE};
pub use device::{parameters_unitary, Chip};
pub use doc::{ChipDocument, CouplingEntry};
pub use geometry::{
    ChipGeometry, Edge, Layout, Resistor, Segment, TriangularControl, MULTI_PHASE_SEGMENTS, RESISTOR_COLUMNS,
    TRIANGULAR_COLS, TRIANGULAR_LENGTH_MM, TRIANGULAR_ROWS,
};
pub use hamiltonian::Hamiltonian;
pub use params::{sample_couplings, ChipParameters, BETA_RANGE, COUPLING_RANGE, MIN_COUPLING};
