// SPDX-License-Identifier: Apache-2.0

//! Unitary evolution of the waveguide array and operations on unitaries.
//!
//! Segments propagate as `U = exp(-i H Δz)`. Since `H` is real symmetric the
//! exponential is taken through its eigendecomposition `H = V Λ Vᵀ`, which
//! is exact up to rounding and needs no special handling of degeneracies.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chip::Hamiltonian;
use crate::error::{Error, Result};

/// Tolerance used when validating `U†U = I`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Eigenphases closer than this to ±π are treated as sitting on the branch cut.
pub const BRANCH_CUT_TOL: f64 = 1e-9;

/// Complex m×m matrix of mode input-output amplitudes; column `i` is the
/// image of input mode `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(DMatrix<Complex64>);

impl Unitary {
    pub fn identity(m: usize) -> Self {
        Unitary(DMatrix::identity(m, m))
    }

    /// Wraps `u` after checking `‖U†U − I‖_max ≤ 1e-10`.
    pub fn from_matrix(u: DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
        }
        let err = unitarity_error(&u);
        if err.is_nan() || err > UNITARITY_TOL {
            return Err(Error::InvariantViolation(format!("matrix is not unitary: ‖U†U − I‖ = {err:e}")));
        }
        Ok(Unitary(u))
    }

    /// Wraps `u` without validation. Callers guarantee unitarity.
    pub fn from_matrix_unchecked(u: DMatrix<Complex64>) -> Self {
        Unitary(u)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Amplitude `U_{out,inp}` for 0-based modes.
    pub fn amplitude(&self, out: usize, inp: usize) -> Complex64 {
        self.0[(out, inp)]
    }

    pub fn adjoint(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.0)
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Unitary) -> Result<Unitary> {
        check_dims(self.dim(), rhs.dim())?;
        Ok(Unitary(&self.0 * &rhs.0))
    }

    /// `e^{iφ} U`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        Unitary(self.0.map(|z| z * Complex64::from_polar(1.0, phi)))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            err = err.max((g[(i, j)] - target).norm());
        }
    }
    err
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Propagates through a segment of length `dz` mm: `U = exp(-i H dz)`.
///
/// Negative lengths give the inverse propagation.
pub fn evolve(h: &Hamiltonian, dz: f64) -> Unitary {
    let eig = h.matrix().clone().symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * dz);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Unitary(scaled * v.transpose())
}

/// Product of segment unitaries in propagation order: `U_k ⋯ U_2 U_1`.
pub fn compose(segments: &[Unitary]) -> Result<Unitary> {
    let first = segments
        .first()
        .ok_or_else(|| Error::InvalidConfig("cannot compose an empty segment list".into()))?;
    let m = first.dim();
    let mut acc = first.0.clone();
    for u in &segments[1..] {
        check_dims(m, u.dim())?;
        acc = &u.0 * acc;
    }
    Ok(Unitary(acc))
}

/// Phase-insensitive similarity `|Tr(U_target† U)| / m`.
pub fn fidelity(target: &Unitary, u: &Unitary) -> Result<f64> {
    check_dims(target.dim(), u.dim())?;
    let m = target.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            tr += target.0[(j, i)].conj() * u.0[(j, i)];
        }
    }
    Ok((tr.norm() / m as f64).min(1.0))
}

/// Spectral decomposition `Γ = Q diag(e^{iθ}) Q†` of a unitary, with
/// principal eigenphases `θ ∈ (−π, π)`.
struct UnitarySpectrum {
    q: DMatrix<Complex64>,
    phases: Vec<f64>,
}

fn unitary_spectrum(gamma: &Unitary) -> Result<UnitarySpectrum> {
    // The Schur form of a normal matrix is diagonal.
    let schur = nalgebra::Schur::try_new(gamma.0.clone(), 1e-15, 0)
        .ok_or_else(|| Error::InvariantViolation("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut phases = Vec::with_capacity(t.nrows());
    for k in 0..t.nrows() {
        let theta = t[(k, k)].arg();
        if theta.abs() > std::f64::consts::PI - BRANCH_CUT_TOL {
            return Err(Error::BranchAmbiguity { phase: theta });
        }
        phases.push(theta);
    }
    Ok(UnitarySpectrum { q, phases })
}

/// Points `U(t_j) = U1 exp(t_j log(U1† U2))` at `t_j = j/steps`, `j = 1..=steps`.
///
/// The logarithm takes the principal branch. An eigenphase of `U1† U2` on
/// the branch cut (eigenvalue −1) is reported as [`Error::BranchAmbiguity`];
/// callers may perturb either endpoint and retry.
pub fn geodesic_path(u1: &Unitary, u2: &Unitary, steps: usize) -> Result<Vec<Unitary>> {
    check_dims(u1.dim(), u2.dim())?;
    if steps == 0 {
        return Err(Error::InvalidConfig("geodesic needs at least one step".into()));
    }
    let gamma = u1.adjoint().mul(u2)?;
    let spec = unitary_spectrum(&gamma)?;
    let q_adj = spec.q.adjoint();
    let path = (1..=steps)
        .map(|j| {
            let t = j as f64 / steps as f64;
            let mut scaled = spec.q.clone();
            for (k, &theta) in spec.phases.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, t * theta);
                for z in scaled.column_mut(k).iter_mut() {
                    *z *= phase;
                }
            }
            Unitary(&u1.0 * (scaled * &q_adj))
        })
        .collect();
    Ok(path)
}

/// Random Hermitian matrix `(A + A†)/2` with `A` complex standard normal.
pub fn random_hermitian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&a + a.adjoint()).map(|z| z * 0.5)
}

/// Noise unitary `exp(iεH)` for a random Hermitian `H`.
pub fn random_unitary_noise<R: Rng + ?Sized>(m: usize, epsilon: f64, rng: &mut R) -> Unitary {
    let h = random_hermitian(m, rng);
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, epsilon * lambda);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Unitary(scaled * v.adjoint())
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn haar_random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Unitary {
    let z = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..m {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        for x in q.column_mut(k).iter_mut() {
            *x *= phase;
        }
    }
    Unitary(q)
}

/// JSON form `{"m", "re", "im"}`, row-major; row `j`, column `i` holds `U_{j+1,i+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryDoc {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Unitary> for UnitaryDoc {
    fn from(u: &Unitary) -> Self {
        let m = u.dim();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m).map(|j| (0..m).map(|i| f(&u.0[(j, i)])).collect()).collect()
        };
        UnitaryDoc { m, re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<&UnitaryDoc> for Unitary {
    type Error = Error;

    fn try_from(doc: &UnitaryDoc) -> Result<Self> {
        let m = doc.m;
        let shape_ok = doc.re.len() == m
            && doc.im.len() == m
            && doc.re.iter().chain(&doc.im).all(|row| row.len() == m);
        if !shape_ok {
            return Err(Error::DimensionMismatch { expected: m, found: doc.re.len() });
        }
        Unitary::from_matrix(DMatrix::from_fn(m, m, |j, i| Complex64::new(doc.re[j][i], doc.im[j][i])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_mode(b: f64, kappa: f64) -> Hamiltonian {
        Hamiltonian::assemble(&[b, b], &[(0, 1, kappa)]).unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = Hamiltonian::assemble(&[0.0; 4], &[]).unwrap();
        assert!(evolve(&h, 3.0).max_abs_diff(&Unitary::identity(4)) < 1e-15);
    }

    #[test]
    fn coupled_pair_transfer_matches_closed_form() {
        // |U12|^2 = sin^2(κ Δz) for equal propagation constants
        for &(b, kappa, dz) in &[(1.0, 0.2, 3.0), (0.8, 0.15, 7.5), (1.2, 0.3, 11.0)] {
            let u = evolve(&two_mode(b, kappa), dz);
            let expected = (kappa * dz).sin().powi(2);
            assert!((u.amplitude(0, 1).norm_sqr() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_transfer_is_balanced() {
        let kappa = 0.25;
        let u = evolve(&two_mode(1.0, kappa), PI / 4.0 / kappa);
        assert!((u.amplitude(0, 0).norm_sqr() - 0.5).abs() < 1e-12);
        assert!((u.amplitude(0, 1).norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let h = Hamiltonian::assemble(&[0.9, 1.1, 1.25], &[(0, 1, 0.2), (1, 2, 0.12)]).unwrap();
        let prod = evolve(&h, 40.0).mul(&evolve(&h, -40.0)).unwrap();
        assert!(prod.max_abs_diff(&Unitary::identity(3)) < 1e-10);
    }

    #[test]
    fn composition_order_and_semigroup() {
        let h = Hamiltonian::assemble(&[0.9, 1.1], &[(0, 1, 0.2)]).unwrap();
        let id = Unitary::identity(2);
        assert_eq!(compose(&[id.clone(), id.clone(), id.clone()]).unwrap(), id);
        let u = evolve(&h, 1.3);
        assert_eq!(compose(std::slice::from_ref(&u)).unwrap(), u);
        let ab = compose(&[evolve(&h, 2.0), evolve(&h, 3.5)]).unwrap();
        assert!(ab.max_abs_diff(&evolve(&h, 5.5)) < 1e-10);

        // later segments act on the left
        let g = Hamiltonian::assemble(&[1.3, 0.7], &[(0, 1, 0.1)]).unwrap();
        let (u1, u2) = (evolve(&h, 2.0), evolve(&g, 3.0));
        let expected = u2.mul(&u1).unwrap();
        assert!(compose(&[u1, u2]).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn compose_rejects_mixed_dimensions() {
        let err = compose(&[Unitary::identity(2), Unitary::identity(3)]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn fidelity_basics() {
        let u = haar_random(5, &mut stream(3));
        assert!((fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&u, &u.with_global_phase(1.234)).unwrap() - 1.0).abs() < 1e-12);
        let z = Unitary::from_matrix(DMatrix::from_diagonal(&nalgebra::dvector![c(1.0, 0.0), c(-1.0, 0.0)])).unwrap();
        assert!(fidelity(&Unitary::identity(2), &z).unwrap().abs() < 1e-15);
        assert!(fidelity(&Unitary::identity(2), &Unitary::identity(3)).is_err());
    }

    #[test]
    fn geodesic_endpoint_and_midpoint() {
        let u1 = haar_random(4, &mut stream(1));
        let u2 = haar_random(4, &mut stream(2));
        let path = geodesic_path(&u1, &u2, 1).unwrap();
        assert_eq!(path.len(), 1);
        assert!(path[0].max_abs_diff(&u2) < 1e-10);

        let target = Unitary::from_matrix(DMatrix::from_diagonal(&nalgebra::dvector![
            Complex64::from_polar(1.0, PI / 2.0),
            c(1.0, 0.0)
        ]))
        .unwrap();
        let path = geodesic_path(&Unitary::identity(2), &target, 2).unwrap();
        let mid = Unitary::from_matrix(DMatrix::from_diagonal(&nalgebra::dvector![
            Complex64::from_polar(1.0, PI / 4.0),
            c(1.0, 0.0)
        ]))
        .unwrap();
        assert!(path[0].max_abs_diff(&mid) < 1e-12);
        assert!(path[1].max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn geodesic_flags_branch_cut() {
        let flip = Unitary::from_matrix(DMatrix::from_diagonal(&nalgebra::dvector![c(-1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let err = geodesic_path(&Unitary::identity(2), &flip, 3).unwrap_err();
        assert!(matches!(err, Error::BranchAmbiguity { .. }));
    }

    #[test]
    fn noise_is_unitary_and_trivial_at_zero() {
        let mut rng = stream(21);
        assert!(random_unitary_noise(6, 0.0, &mut rng).max_abs_diff(&Unitary::identity(6)) < 1e-12);
        for _ in 0..20 {
            assert!(random_unitary_noise(10, 0.1, &mut rng).unitarity_error() < 1e-10);
        }
    }

    #[test]
    fn noise_strength_matches_expected_fidelity() {
        // E|Tr exp(iεH)|/m ≈ 1 − ε² m / 2 = 0.95 for ε = 0.1, m = 10
        let mut rng = stream(8);
        let id = Unitary::identity(10);
        let n = 2000;
        let mean: f64 = (0..n)
            .map(|_| fidelity(&id, &random_unitary_noise(10, 0.1, &mut rng)).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.95).abs() < 0.01, "mean fidelity {mean}");
    }

    #[test]
    fn json_round_trip() {
        let u = haar_random(3, &mut stream(4));
        let doc = UnitaryDoc::from(&u);
        let text = serde_json::to_string(&doc).unwrap();
        let back: UnitaryDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(Unitary::try_from(&back).unwrap(), u);
        assert_eq!(doc.re[1][2], u.amplitude(1, 2).re);
    }

    #[test]
    fn from_matrix_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(Unitary::from_matrix(m).is_err());
    }
}
