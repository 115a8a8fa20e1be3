// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;

use super::geometry::{distance, ChipGeometry};
use super::params::BETA_RANGE;
use crate::error::{Error, Result};

/// Control range of the resistor drives in the cross-talk mesh, mm⁻¹.
pub const MESH_CONTROL_RANGE: (f64, f64) = (0.0, 0.6);
/// Propagation constant of every mode with no heating, mm⁻¹.
pub const MESH_BETA_BASE: f64 = 0.7;

/// Map from the control vector `x` to per-segment propagation constants.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlModel {
    /// `β_i = x_i` in every segment.
    Direct { bounds: (f64, f64) },
    /// `β_i(s) = β_base + Σ_r W[i][r] x_r` over the resistors of segment `s`;
    /// unheated segments stay at `β_base`.
    Mesh {
        bounds: (f64, f64),
        beta_base: f64,
        /// `modes × resistors` cross-talk weights.
        weights: DMatrix<f64>,
        /// Segment index of each resistor (column of `weights`).
        resistor_segments: Vec<usize>,
    },
}

impl ControlModel {
    pub fn direct() -> Self {
        ControlModel::Direct { bounds: BETA_RANGE }
    }

    /// Multiplicative cross-talk mesh for a resistor-driven geometry.
    pub fn mesh(geom: &ChipGeometry) -> Result<Self> {
        Ok(ControlModel::Mesh {
            bounds: MESH_CONTROL_RANGE,
            beta_base: MESH_BETA_BASE,
            weights: crosstalk_weights(geom)?,
            resistor_segments: geom.resistors().iter().map(|r| r.segment).collect(),
        })
    }

    /// The natural control model of `geom`: mesh when it carries resistors.
    pub fn for_geometry(geom: &ChipGeometry) -> Self {
        if geom.is_multi_phase() {
            Self::mesh(geom).expect("resistor geometry has a mesh")
        } else {
            Self::direct()
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self {
            ControlModel::Direct { bounds } | ControlModel::Mesh { bounds, .. } => *bounds,
        }
    }

    pub fn is_mesh(&self) -> bool {
        matches!(self, ControlModel::Mesh { .. })
    }

    /// Length of the control vector.
    pub fn control_count(&self, geom: &ChipGeometry) -> usize {
        match self {
            ControlModel::Direct { .. } => geom.modes(),
            ControlModel::Mesh { weights, .. } => weights.ncols(),
        }
    }

    /// Clamps `x` into the control bounds, returning how many entries moved.
    pub fn clamp(&self, x: &[f64]) -> (Vec<f64>, usize) {
        let (lo, hi) = self.bounds();
        let mut moved = 0;
        let out = x
            .iter()
            .map(|&v| {
                let c = v.clamp(lo, hi);
                if c != v {
                    moved += 1;
                }
                c
            })
            .collect();
        (out, moved)
    }

    /// Per-segment propagation constants produced by the control vector `x`.
    ///
    /// Out-of-bounds controls are clamped and logged. Mesh outputs saturate
    /// at the physical β range.
    pub fn apply(&self, geom: &ChipGeometry, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.control_count(geom);
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let (x, moved) = self.clamp(x);
        if moved > 0 {
            log::warn!("{moved} control value(s) outside {:?} were clamped", self.bounds());
        }
        let mut beta = self.apply_unclamped(geom, &x)?;
        if self.is_mesh() {
            for b in beta.iter_mut().flatten() {
                *b = b.clamp(BETA_RANGE.0, BETA_RANGE.1);
            }
        }
        Ok(beta)
    }

    /// The linear control map with no clamping or saturation, for probing
    /// the model outside the physical ranges.
    pub fn apply_unclamped(&self, geom: &ChipGeometry, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.control_count(geom);
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let segments = geom.segments().len();
        let m = geom.modes();
        Ok(match self {
            ControlModel::Direct { .. } => vec![x.to_vec(); segments],
            ControlModel::Mesh { beta_base, weights, resistor_segments, .. } => {
                let mut beta = vec![vec![*beta_base; m]; segments];
                for (r, &s) in resistor_segments.iter().enumerate() {
                    for (i, b) in beta[s].iter_mut().enumerate() {
                        *b += weights[(i, r)] * x[r];
                    }
                }
                beta
            }
        })
    }
}

/// Cross-talk weights `W[i][r] = 1/d`, with `d` the lattice distance from
/// resistor `r` to mode `i`, rescaled so the nearest mode sits at `d = 1`.
pub fn crosstalk_weights(geom: &ChipGeometry) -> Result<DMatrix<f64>> {
    if !geom.is_multi_phase() {
        return Err(Error::InvalidGeometry("cross-talk weights need a resistor geometry".into()));
    }
    let sites = geom.sites();
    let resistors = geom.resistors();
    let mut w = DMatrix::zeros(sites.len(), resistors.len());
    for (r, res) in resistors.iter().enumerate() {
        let d: Vec<f64> = sites.iter().map(|&s| distance(s, res.site)).collect();
        let nearest = d.iter().cloned().fold(f64::INFINITY, f64::min);
        for (i, di) in d.into_iter().enumerate() {
            w[(i, r)] = nearest / di;
        }
    }
    Ok(w)
}
