// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rand::Rng;

use super::geometry::{ChipGeometry, Edge};
use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};

/// Physical range of the propagation constants, mm⁻¹.
pub const BETA_RANGE: (f64, f64) = (0.7, 1.3);
/// Range from which fabricated couplings are drawn, mm⁻¹.
pub const COUPLING_RANGE: (f64, f64) = (0.1, 0.3);
/// Smallest coupling kept after a random shift.
pub const MIN_COUPLING: f64 = 1e-6;

/// Propagation constants per segment and couplings per edge, in mm⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipParameters {
    beta: Vec<Vec<f64>>,
    couplings: BTreeMap<Edge, f64>,
}

impl ChipParameters {
    /// Validates shapes against `geom`: one β vector of length `m` per
    /// segment, and couplings defined exactly on the geometry edges.
    pub fn new(geom: &ChipGeometry, beta: Vec<Vec<f64>>, couplings: BTreeMap<Edge, f64>) -> Result<Self> {
        if beta.len() != geom.segments().len() {
            return Err(Error::DimensionMismatch { expected: geom.segments().len(), found: beta.len() });
        }
        if let Some(b) = beta.iter().find(|b| b.len() != geom.modes()) {
            return Err(Error::DimensionMismatch { expected: geom.modes(), found: b.len() });
        }
        check_couplings(geom, &couplings)?;
        Ok(ChipParameters { beta, couplings })
    }

    /// Same β vector in every segment.
    pub fn uniform(geom: &ChipGeometry, beta: Vec<f64>, couplings: BTreeMap<Edge, f64>) -> Result<Self> {
        let per_segment = vec![beta; geom.segments().len()];
        Self::new(geom, per_segment, couplings)
    }

    /// Draws a target device: β ~ U[0.7, 1.3] per mode (shared by all
    /// segments) and C ~ U[0.1, 0.3] per edge.
    pub fn sample_target<R: Rng + ?Sized>(geom: &ChipGeometry, rng: &mut R) -> Self {
        let beta: Vec<f64> = (0..geom.modes())
            .map(|_| rng.random_range(BETA_RANGE.0..=BETA_RANGE.1))
            .collect();
        let couplings = sample_couplings(geom, rng);
        ChipParameters { beta: vec![beta; geom.segments().len()], couplings }
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn couplings(&self) -> &BTreeMap<Edge, f64> {
        &self.couplings
    }

    pub fn with_beta(&self, beta: Vec<Vec<f64>>) -> Result<Self> {
        if beta.len() != self.beta.len() {
            return Err(Error::DimensionMismatch { expected: self.beta.len(), found: beta.len() });
        }
        Ok(ChipParameters { beta, couplings: self.couplings.clone() })
    }

    pub fn with_couplings(&self, couplings: BTreeMap<Edge, f64>) -> Result<Self> {
        if couplings.keys().ne(self.couplings.keys()) {
            return Err(Error::InvariantViolation("coupling edges differ".into()));
        }
        Ok(ChipParameters { beta: self.beta.clone(), couplings })
    }

    /// Shifts every β by an independent U[-range, range] draw, clamped to
    /// [`BETA_RANGE`]. Couplings are untouched.
    pub fn perturb<R: Rng + ?Sized>(&self, range: f64, rng: &mut R) -> Self {
        let beta = self
            .beta
            .iter()
            .map(|seg| {
                seg.iter()
                    .map(|&b| {
                        let shift = if range > 0.0 { rng.random_range(-range..=range) } else { 0.0 };
                        (b + shift).clamp(BETA_RANGE.0, BETA_RANGE.1)
                    })
                    .collect()
            })
            .collect();
        ChipParameters { beta, couplings: self.couplings.clone() }
    }

    /// Shifts every coupling by an independent U[-δC, δC] draw, kept positive.
    pub fn shift_couplings<R: Rng + ?Sized>(&self, delta_c: f64, rng: &mut R) -> Self {
        let couplings = self
            .couplings
            .iter()
            .map(|(&e, &c)| {
                let shift = if delta_c > 0.0 { rng.random_range(-delta_c..=delta_c) } else { 0.0 };
                (e, (c + shift).max(MIN_COUPLING))
            })
            .collect();
        ChipParameters { beta: self.beta.clone(), couplings }
    }

    /// Hamiltonian of segment `s`.
    pub fn hamiltonian(&self, s: usize) -> Hamiltonian {
        Hamiltonian::from_edges(&self.beta[s], &self.couplings)
            .expect("edge-keyed couplings are symmetric by construction")
    }
}

/// Draws C ~ U[0.1, 0.3] for every edge of `geom`, in edge order.
pub fn sample_couplings<R: Rng + ?Sized>(geom: &ChipGeometry, rng: &mut R) -> BTreeMap<Edge, f64> {
    geom.edges()
        .iter()
        .map(|&e| (e, rng.random_range(COUPLING_RANGE.0..=COUPLING_RANGE.1)))
        .collect()
}

pub(crate) fn check_couplings(geom: &ChipGeometry, couplings: &BTreeMap<Edge, f64>) -> Result<()> {
    let mut expected: Vec<Edge> = geom.edges().to_vec();
    expected.sort();
    if couplings.keys().ne(expected.iter()) {
        return Err(Error::InvariantViolation("couplings must be defined exactly on the geometry edges".into()));
    }
    Ok(())
}
