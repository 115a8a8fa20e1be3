// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross-section family of the waveguide array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Planar,
    Triangular3d,
}

/// How the 32-mode triangular device is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangularControl {
    /// Every propagation constant is an independent knob.
    Direct,
    /// Segmented chip with surface resistors and thermal cross-talk.
    MultiPhase,
}

/// Unordered pair of coupled modes, stored 0-based with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    lo: usize,
    hi: usize,
}

impl Edge {
    /// Builds the edge between two distinct 0-based modes, in either order.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidGeometry(format!("self-coupling on mode {}", a + 1)));
        }
        Ok(Edge { lo: a.min(b), hi: a.max(b) })
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

/// Longitudinal slice of the chip with constant parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub len_mm: f64,
    pub active: bool,
}

/// Thermo-optic resistor on the chip surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resistor {
    /// Index of the (active) segment the resistor heats.
    pub segment: usize,
    /// Position in lattice-pitch units, same frame as [`ChipGeometry::sites`].
    pub site: [f64; 2],
}

/// Static layout of an interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipGeometry {
    layout: Layout,
    sites: Vec<[f64; 2]>,
    edges: Vec<Edge>,
    segments: Vec<Segment>,
    resistors: Vec<Resistor>,
}

pub const TRIANGULAR_ROWS: usize = 4;
pub const TRIANGULAR_COLS: usize = 8;
pub const TRIANGULAR_LENGTH_MM: f64 = 36.0;
pub const MULTI_PHASE_SEGMENTS: usize = 18;
/// 1-based top-row columns under which each active segment carries a resistor.
pub const RESISTOR_COLUMNS: [usize; 2] = [3, 6];

const ROW_HEIGHT: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2

impl ChipGeometry {
    /// Planar array of `m` waveguides with only first-neighbour coupling and
    /// a single segment of `2m` mm.
    pub fn planar(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGeometry(format!("planar array needs at least 2 modes, got {m}")));
        }
        let sites = (0..m).map(|i| [i as f64, 0.0]).collect();
        let edges = (0..m - 1).map(|i| Edge { lo: i, hi: i + 1 }).collect();
        Ok(ChipGeometry {
            layout: Layout::Planar,
            sites,
            edges,
            segments: vec![Segment { len_mm: 2.0 * m as f64, active: true }],
            resistors: Vec::new(),
        })
    }

    /// The 32-mode triangular device: four offset rows of eight waveguides.
    ///
    /// Mode `r * 8 + c` (0-based) sits at `(c + r/2 mod 1, -r·√3/2)`, so every
    /// first neighbour lies at unit distance; row 0 is closest to the surface.
    pub fn triangular(control: TriangularControl) -> Self {
        let mut sites = Vec::with_capacity(TRIANGULAR_ROWS * TRIANGULAR_COLS);
        for r in 0..TRIANGULAR_ROWS {
            let shift = if r % 2 == 1 { 0.5 } else { 0.0 };
            for c in 0..TRIANGULAR_COLS {
                sites.push([c as f64 + shift, -(r as f64) * ROW_HEIGHT]);
            }
        }

        let mut edges = Vec::new();
        for a in 0..sites.len() {
            for b in a + 1..sites.len() {
                if (distance(sites[a], sites[b]) - 1.0).abs() < 1e-9 {
                    edges.push(Edge { lo: a, hi: b });
                }
            }
        }

        let (segments, resistors) = match control {
            TriangularControl::Direct => (
                vec![Segment { len_mm: TRIANGULAR_LENGTH_MM, active: true }],
                Vec::new(),
            ),
            TriangularControl::MultiPhase => {
                let len = TRIANGULAR_LENGTH_MM / MULTI_PHASE_SEGMENTS as f64;
                let segments: Vec<Segment> = (0..MULTI_PHASE_SEGMENTS)
                    // 2nd, 4th, ..., 16th segments are heated
                    .map(|s| Segment { len_mm: len, active: s % 2 == 1 && s < MULTI_PHASE_SEGMENTS - 1 })
                    .collect();
                let resistors = segments
                    .iter()
                    .enumerate()
                    .filter(|(_, seg)| seg.active)
                    .flat_map(|(s, _)| {
                        RESISTOR_COLUMNS.iter().map(move |&col| Resistor {
                            segment: s,
                            site: [(col - 1) as f64, 1.0],
                        })
                    })
                    .collect();
                (segments, resistors)
            }
        };

        ChipGeometry { layout: Layout::Triangular3d, sites, edges, segments, resistors }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn modes(&self) -> usize {
        self.sites.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn resistors(&self) -> &[Resistor] {
        &self.resistors
    }

    /// Mode positions in lattice-pitch units.
    pub fn sites(&self) -> &[[f64; 2]] {
        &self.sites
    }

    pub fn total_length_mm(&self) -> f64 {
        self.segments.iter().map(|s| s.len_mm).sum()
    }

    /// True for the segmented, resistor-driven triangular device.
    pub fn is_multi_phase(&self) -> bool {
        !self.resistors.is_empty()
    }

    /// Rebuilds a known geometry from its serialized description.
    pub fn from_parts(layout: Layout, m: usize, segments: &[Segment]) -> Result<Self> {
        let geom = match layout {
            Layout::Planar => ChipGeometry::planar(m)?,
            Layout::Triangular3d => {
                if m != TRIANGULAR_ROWS * TRIANGULAR_COLS {
                    return Err(Error::InvalidGeometry(format!("triangular device has 32 modes, got {m}")));
                }
                match segments.len() {
                    1 => ChipGeometry::triangular(TriangularControl::Direct),
                    MULTI_PHASE_SEGMENTS => ChipGeometry::triangular(TriangularControl::MultiPhase),
                    n => {
                        return Err(Error::InvalidGeometry(format!(
                            "triangular device has 1 or {MULTI_PHASE_SEGMENTS} segments, got {n}"
                        )))
                    }
                }
            }
        };
        let same = geom.segments.len() == segments.len()
            && geom
                .segments
                .iter()
                .zip(segments)
                .all(|(a, b)| (a.len_mm - b.len_mm).abs() < 1e-9 && a.active == b.active);
        if !same {
            return Err(Error::InvalidGeometry("segment plan does not match the layout".into()));
        }
        Ok(geom)
    }
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
