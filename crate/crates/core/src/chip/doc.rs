// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::{ChipGeometry, Edge, Layout, Segment};
use super::params::ChipParameters;
use crate::error::{Error, Result};

/// One coupling in the JSON document, 1-based modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub i: usize,
    pub j: usize,
    pub c: f64,
}

/// JSON form of a geometry together with its parameters. Mode indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipDocument {
    pub layout: Layout,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    pub segments: Vec<Segment>,
    pub beta: Vec<Vec<f64>>,
    pub couplings: Vec<CouplingEntry>,
}

impl ChipDocument {
    pub fn new(geom: &ChipGeometry, params: &ChipParameters) -> Self {
        ChipDocument {
            layout: geom.layout(),
            m: geom.modes(),
            edges: geom.edges().iter().map(|e| [e.lo() + 1, e.hi() + 1]).collect(),
            segments: geom.segments().to_vec(),
            beta: params.beta().to_vec(),
            couplings: params
                .couplings()
                .iter()
                .map(|(e, &c)| CouplingEntry { i: e.lo() + 1, j: e.hi() + 1, c })
                .collect(),
        }
    }

    /// Rebuilds and validates the geometry and parameters.
    pub fn into_parts(&self) -> Result<(ChipGeometry, ChipParameters)> {
        let geom = ChipGeometry::from_parts(self.layout, self.m, &self.segments)?;
        let listed: Vec<Edge> = self
            .edges
            .iter()
            .map(|&[i, j]| one_based_edge(i, j, self.m))
            .collect::<Result<_>>()?;
        let mut expected = geom.edges().to_vec();
        let mut listed_sorted = listed;
        expected.sort();
        listed_sorted.sort();
        if expected != listed_sorted {
            return Err(Error::InvalidGeometry("edge list does not match the layout".into()));
        }
        let mut couplings = BTreeMap::new();
        for entry in &self.couplings {
            let e = one_based_edge(entry.i, entry.j, self.m)?;
            if let Some(prev) = couplings.insert(e, entry.c) {
                if prev != entry.c {
                    return Err(Error::InvariantViolation(format!(
                        "asymmetric coupling between modes {} and {}",
                        entry.i, entry.j
                    )));
                }
            }
        }
        let params = ChipParameters::new(&geom, self.beta.clone(), couplings)?;
        Ok((geom, params))
    }
}

fn one_based_edge(i: usize, j: usize, m: usize) -> Result<Edge> {
    if i == 0 || j == 0 || i > m || j > m {
        return Err(Error::IndexOutOfRange { index: i.max(j), modes: m });
    }
    Edge::new(i - 1, j - 1)
}
