// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::control::ControlModel;
use super::geometry::{ChipGeometry, Edge};
use super::hamiltonian::Hamiltonian;
use super::params::{check_couplings, ChipParameters};
use crate::error::Result;
use crate::unitary::{compose, evolve, Unitary};

/// Forward model of a programmable chip: fixed couplings, a control model,
/// and the map from a control vector to the implemented unitary.
#[derive(Debug, Clone)]
pub struct Chip {
    geometry: ChipGeometry,
    control: ControlModel,
    couplings: BTreeMap<Edge, f64>,
    /// Unitary of an unheated segment, keyed by segment length; shared by
    /// every passive segment of a mesh device.
    passive: Option<(f64, Unitary)>,
}

impl Chip {
    pub fn new(geometry: ChipGeometry, control: ControlModel, couplings: BTreeMap<Edge, f64>) -> Result<Self> {
        check_couplings(&geometry, &couplings)?;
        let passive = match &control {
            ControlModel::Mesh { beta_base, .. } => geometry
                .segments()
                .iter()
                .find(|s| !s.active)
                .map(|s| {
                    let h = Hamiltonian::from_edges(&vec![*beta_base; geometry.modes()], &couplings)
                        .expect("edge-keyed couplings are symmetric");
                    (s.len_mm, evolve(&h, s.len_mm))
                }),
            ControlModel::Direct { .. } => None,
        };
        Ok(Chip { geometry, control, couplings, passive })
    }

    pub fn geometry(&self) -> &ChipGeometry {
        &self.geometry
    }

    pub fn control(&self) -> &ControlModel {
        &self.control
    }

    pub fn couplings(&self) -> &BTreeMap<Edge, f64> {
        &self.couplings
    }

    pub fn control_count(&self) -> usize {
        self.control.control_count(&self.geometry)
    }

    /// Same chip with different couplings.
    pub fn with_couplings(&self, couplings: BTreeMap<Edge, f64>) -> Result<Self> {
        Chip::new(self.geometry.clone(), self.control.clone(), couplings)
    }

    /// Physical parameters produced by the control vector `x`.
    pub fn parameters(&self, x: &[f64]) -> Result<ChipParameters> {
        let beta = self.control.apply(&self.geometry, x)?;
        ChipParameters::new(&self.geometry, beta, self.couplings.clone())
    }

    /// Unitary implemented with control vector `x`.
    pub fn unitary(&self, x: &[f64]) -> Result<Unitary> {
        let beta = self.control.apply(&self.geometry, x)?;
        let segments: Vec<Unitary> = self
            .geometry
            .segments()
            .iter()
            .zip(&beta)
            .map(|(seg, b)| match &self.passive {
                Some((len, u)) if !seg.active && *len == seg.len_mm => u.clone(),
                _ => {
                    let h = Hamiltonian::from_edges(b, &self.couplings).expect("edge-keyed couplings are symmetric");
                    evolve(&h, seg.len_mm)
                }
            })
            .collect();
        compose(&segments)
    }
}

/// Unitary of explicit chip parameters, segment by segment.
pub fn parameters_unitary(geom: &ChipGeometry, params: &ChipParameters) -> Result<Unitary> {
    let segments: Vec<Unitary> = geom
        .segments()
        .iter()
        .enumerate()
        .map(|(s, seg)| evolve(&params.hamiltonian(s), seg.len_mm))
        .collect();
    compose(&segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::{sample_couplings, TriangularControl};
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn direct_chip_matches_parameter_route() {
        let geom = ChipGeometry::planar(6).unwrap();
        let target = ChipParameters::sample_target(&geom, &mut stream(1));
        let chip = Chip::new(geom.clone(), ControlModel::direct(), target.couplings().clone()).unwrap();
        let a = chip.unitary(&target.beta()[0]).unwrap();
        let b = parameters_unitary(&geom, &target).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn mesh_chip_caches_passive_segments_consistently() {
        let geom = ChipGeometry::triangular(TriangularControl::MultiPhase);
        let couplings = sample_couplings(&geom, &mut stream(2));
        let chip = Chip::new(geom.clone(), ControlModel::mesh(&geom).unwrap(), couplings).unwrap();
        let mut rng = stream(3);
        let x: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..0.6)).collect();
        let a = chip.unitary(&x).unwrap();
        let b = parameters_unitary(&geom, &chip.parameters(&x).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(a.unitarity_error() < 1e-10);
    }
}
