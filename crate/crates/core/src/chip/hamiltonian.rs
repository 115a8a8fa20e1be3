// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::geometry::Edge;
use crate::error::{Error, Result};

/// Single-excitation Hamiltonian of one segment, in mm⁻¹.
///
/// Propagation constants sit on the diagonal, couplings off the diagonal.
/// Stored as a dense real matrix that is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian(DMatrix<f64>);

impl Hamiltonian {
    /// Assembles `H` from propagation constants and 0-based coupling entries.
    ///
    /// An entry may be listed once or in both orientations; orientations that
    /// disagree are rejected.
    pub fn assemble(beta: &[f64], couplings: &[(usize, usize, f64)]) -> Result<Self> {
        let m = beta.len();
        let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(beta));
        let mut seen: BTreeMap<Edge, f64> = BTreeMap::new();
        for &(i, j, c) in couplings {
            if i >= m || j >= m {
                return Err(Error::IndexOutOfRange { index: i.max(j) + 1, modes: m });
            }
            let edge = Edge::new(i, j).map_err(|e| Error::InvariantViolation(e.to_string()))?;
            if let Some(&prev) = seen.get(&edge) {
                if prev != c {
                    return Err(Error::InvariantViolation(format!(
                        "asymmetric coupling between modes {} and {}: {prev} vs {c}",
                        edge.lo() + 1,
                        edge.hi() + 1
                    )));
                }
            }
            seen.insert(edge, c);
            h[(i, j)] = c;
            h[(j, i)] = c;
        }
        Ok(Hamiltonian(h))
    }

    /// Assembles `H` from a coupling map keyed by [`Edge`].
    pub fn from_edges(beta: &[f64], couplings: &BTreeMap<Edge, f64>) -> Result<Self> {
        let entries: Vec<_> = couplings.iter().map(|(e, &c)| (e.lo(), e.hi(), c)).collect();
        Self::assemble(beta, &entries)
    }

    /// Wraps an explicit matrix, checking that it is square and exactly symmetric.
    pub fn from_matrix(h: DMatrix<f64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
        }
        for i in 0..h.nrows() {
            for j in i + 1..h.ncols() {
                if h[(i, j)] != h[(j, i)] {
                    return Err(Error::InvariantViolation(format!(
                        "Hamiltonian is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Hamiltonian(h))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}
