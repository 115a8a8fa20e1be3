// SPDX-License-Identifier: Apache-2.0

//! Independent reference computations used only by test suites.
//!
//! Nothing here shares code paths with the production routines it checks.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::photonics::{InputState, OutputDistribution};
use crate::unitary::Unitary;

/// Largest mode count the Fock-space oracle accepts.
pub const FOCK_ORACLE_MAX_MODES: usize = 6;

type FockState = Vec<u8>;

fn create(state: &BTreeMap<FockState, Complex64>, amps: &[Complex64]) -> BTreeMap<FockState, Complex64> {
    let mut out: BTreeMap<FockState, Complex64> = BTreeMap::new();
    for (occ, &amp) in state {
        for (mode, &u) in amps.iter().enumerate() {
            let mut next = occ.clone();
            let n = next[mode] as f64;
            next[mode] += 1;
            *out.entry(next).or_default() += amp * u * (n + 1.0).sqrt();
        }
    }
    out
}

/// Two-photon output distribution by expanding `Π_k (Σ_j U_{j,k} a†_j) |0⟩`
/// on the Fock basis with explicit creation operators.
pub fn brute_force_two_photon(u: &Unitary, i: usize, k: usize) -> Result<OutputDistribution> {
    let m = u.dim();
    if m > FOCK_ORACLE_MAX_MODES {
        return Err(Error::InvalidConfig(format!("Fock oracle limited to {FOCK_ORACLE_MAX_MODES} modes")));
    }
    let input = InputState::pair(i, k)?;
    let column = |c: usize| -> Vec<Complex64> { (0..m).map(|j| u.matrix()[(j, c)]).collect() };

    let mut state = BTreeMap::new();
    state.insert(vec![0u8; m], Complex64::new(1.0, 0.0));
    let state = create(&create(&state, &column(k)), &column(i));

    let mut probs = Vec::new();
    for j in 0..m {
        for l in j..m {
            let mut occ = vec![0u8; m];
            occ[j] += 1;
            occ[l] += 1;
            probs.push(state.get(&occ).map_or(0.0, |a| a.norm_sqr()));
        }
    }
    OutputDistribution::new(input, m, probs)
}

/// `exp(A)` by a truncated Taylor series with scaling and squaring.
pub fn taylor_expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.25 {
        squarings += 1;
    }
    let scaled = a.map(|z| z / 2f64.powi(squarings as i32));
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = (&term * &scaled).map(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
