// SPDX-License-Identifier: Apache-2.0

//! Photon statistics at the chip output.
//!
//! Single photons exit mode `j` with probability `|U_{j,i}|²`. Two
//! indistinguishable photons entering modes `i ≠ k` exit in the unordered
//! pair `{j, l}` with probability `|per U[{j,l},{i,k}]|² / (n_j! n_l!)`:
//!
//! * `j ≠ l`: `|U_{j,i} U_{l,k} + U_{l,i} U_{j,k}|²`
//! * `j = l`: `2 |U_{j,i} U_{j,k}|²`
//!
//! Bunched outcomes are kept so that every distribution sums to one.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::chip::{ChipGeometry, Layout};
use crate::error::{Error, Result};
use crate::unitary::Unitary;

/// One- or two-photon input, 0-based modes; pairs are stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputState {
    Single(usize),
    Pair(usize, usize),
}

impl InputState {
    pub fn pair(i: usize, k: usize) -> Result<Self> {
        if i == k {
            return Err(Error::UnsupportedInput(format!("both photons in mode {}", i + 1)));
        }
        Ok(InputState::Pair(i.min(k), i.max(k)))
    }

    pub fn photons(&self) -> usize {
        match self {
            InputState::Single(_) => 1,
            InputState::Pair(..) => 2,
        }
    }

    /// 1-based mode list, as used in serialized records.
    pub fn one_based(&self) -> Vec<usize> {
        match *self {
            InputState::Single(i) => vec![i + 1],
            InputState::Pair(i, k) => vec![i + 1, k + 1],
        }
    }

    pub fn from_one_based(modes: &[usize]) -> Result<Self> {
        match *modes {
            [i] if i > 0 => Ok(InputState::Single(i - 1)),
            [i, k] if i > 0 && k > 0 => InputState::pair(i - 1, k - 1),
            _ => Err(Error::UnsupportedInput(format!("{modes:?}"))),
        }
    }
}

/// Detection event: one photon in mode `j`, or a pair `{j, l}` with `j ≤ l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Single(usize),
    Pair(usize, usize),
}

impl Outcome {
    pub fn one_based(&self) -> Vec<usize> {
        match *self {
            Outcome::Single(j) => vec![j + 1],
            Outcome::Pair(j, l) => vec![j + 1, l + 1],
        }
    }
}

/// Number of outcomes for `photons` photons in `m` modes.
pub fn outcome_count(m: usize, photons: usize) -> usize {
    match photons {
        1 => m,
        _ => m * (m + 1) / 2,
    }
}

/// Position of pair outcome `{j, l}` (`j ≤ l`) in the canonical ordering
/// `(0,0), (0,1), …, (0,m−1), (1,1), …`.
pub fn pair_outcome_index(m: usize, j: usize, l: usize) -> usize {
    let (j, l) = (j.min(l), j.max(l));
    j * m - j * (j + 1) / 2 + l
}

/// Outcomes in canonical order.
pub fn outcomes(m: usize, photons: usize) -> Vec<Outcome> {
    match photons {
        1 => (0..m).map(Outcome::Single).collect(),
        _ => (0..m).flat_map(|j| (j..m).map(move |l| Outcome::Pair(j, l))).collect(),
    }
}

/// Probabilities over the canonical outcome ordering of one input state.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    input: InputState,
    modes: usize,
    probs: Vec<f64>,
}

impl OutputDistribution {
    pub fn new(input: InputState, modes: usize, probs: Vec<f64>) -> Result<Self> {
        let expected = outcome_count(modes, input.photons());
        if probs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: probs.len() });
        }
        Ok(OutputDistribution { input, modes, probs })
    }

    pub fn input(&self) -> InputState {
        self.input
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Single(j) => self.probs[j],
            Outcome::Pair(j, l) => self.probs[pair_outcome_index(self.modes, j, l)],
        }
    }

    pub fn outcomes(&self) -> Vec<Outcome> {
        outcomes(self.modes, self.input.photons())
    }
}

/// Shot counts over the canonical outcome ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCounts {
    input: InputState,
    modes: usize,
    counts: Vec<u64>,
    shots: u64,
}

impl SampleCounts {
    pub fn input(&self) -> InputState {
        self.input
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }
}

fn check_mode(i: usize, m: usize) -> Result<()> {
    if i >= m {
        Err(Error::IndexOutOfRange { index: i + 1, modes: m })
    } else {
        Ok(())
    }
}

/// `p_j = |U_{j,i}|²` for a photon injected in mode `i` (0-based).
pub fn single_photon_distribution(u: &Unitary, i: usize) -> Result<OutputDistribution> {
    let m = u.dim();
    check_mode(i, m)?;
    let probs = (0..m).map(|j| u.amplitude(j, i).norm_sqr()).collect();
    OutputDistribution::new(InputState::Single(i), m, probs)
}

/// Output-pair distribution for photons injected in distinct modes `i` and `k`.
pub fn two_photon_distribution(u: &Unitary, i: usize, k: usize) -> Result<OutputDistribution> {
    let m = u.dim();
    check_mode(i, m)?;
    check_mode(k, m)?;
    let input = InputState::pair(i, k)?;
    let mut probs = Vec::with_capacity(outcome_count(m, 2));
    for j in 0..m {
        let (uji, ujk) = (u.amplitude(j, i), u.amplitude(j, k));
        probs.push(2.0 * (uji * ujk).norm_sqr());
        for l in j + 1..m {
            let perm = uji * u.amplitude(l, k) + u.amplitude(l, i) * ujk;
            probs.push(perm.norm_sqr());
        }
    }
    OutputDistribution::new(input, m, probs)
}

/// Exact output distribution of `input`.
pub fn distribution(u: &Unitary, input: InputState) -> Result<OutputDistribution> {
    match input {
        InputState::Single(i) => single_photon_distribution(u, i),
        InputState::Pair(i, k) => two_photon_distribution(u, i, k),
    }
}

/// Multinomial draw of `shots` detection events, as a chain of conditional binomials.
pub fn sample_counts<R: Rng + ?Sized>(dist: &OutputDistribution, shots: u64, rng: &mut R) -> SampleCounts {
    let probs = dist.probs();
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let last = probs.iter().rposition(|&p| p > 0.0);
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if Some(k) == last {
            counts[k] = remaining;
            break;
        }
        if p == 0.0 {
            continue;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, q).expect("probability in [0, 1]").sample(rng);
        counts[k] = n;
        remaining -= n;
        mass -= p;
    }
    SampleCounts { input: dist.input, modes: dist.modes, counts, shots }
}

/// Empirical frequencies `N_k / N_s`.
pub fn estimate_distribution(counts: &SampleCounts) -> OutputDistribution {
    let n = counts.shots as f64;
    OutputDistribution {
        input: counts.input,
        modes: counts.modes,
        probs: counts.counts.iter().map(|&c| c as f64 / n).collect(),
    }
}

/// The input states probed in one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSet {
    pub singles: Vec<InputState>,
    pub pairs: Vec<InputState>,
}

impl InputSet {
    pub fn iter(&self) -> impl Iterator<Item = &InputState> {
        self.singles.iter().chain(&self.pairs)
    }

    pub fn len(&self) -> usize {
        self.singles.len() + self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Two-photon inputs available on `geom`: first-neighbour pairs, plus `(1, m)`
/// on planar chips.
pub fn candidate_pairs(geom: &ChipGeometry) -> Vec<InputState> {
    let mut pairs: Vec<InputState> = geom
        .edges()
        .iter()
        .map(|e| InputState::Pair(e.lo(), e.hi()))
        .collect();
    if geom.layout() == Layout::Planar {
        let wrap = InputState::Pair(0, geom.modes() - 1);
        if !pairs.contains(&wrap) {
            pairs.push(wrap);
        }
    }
    pairs
}

/// Every single-photon input and every candidate pair.
pub fn full_input_set(geom: &ChipGeometry) -> InputSet {
    InputSet {
        singles: (0..geom.modes()).map(InputState::Single).collect(),
        pairs: candidate_pairs(geom),
    }
}

/// Inputs for one epoch. Planar chips always use the full pair set;
/// triangular chips draw `subset` distinct pairs uniformly (all when `None`).
pub fn select_input_set<R: Rng + ?Sized>(geom: &ChipGeometry, subset: Option<usize>, rng: &mut R) -> Result<InputSet> {
    let mut set = full_input_set(geom);
    if geom.layout() == Layout::Planar {
        return Ok(set);
    }
    if let Some(k) = subset {
        let n = set.pairs.len();
        if k > n {
            return Err(Error::InvalidConfig(format!("{k} pairs requested but only {n} available")));
        }
        if k < n {
            let mut picked: Vec<usize> = index::sample(rng, n, k).into_vec();
            picked.sort_unstable();
            set.pairs = picked.into_iter().map(|p| set.pairs[p]).collect();
        }
    }
    Ok(set)
}

/// One outcome entry of a serialized record; exactly one of `p`/`n` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub out: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

/// JSON record `{"input": [i] | [i,k], "outcomes": [{"out", "p" | "n"}]}`, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub input: Vec<usize>,
    pub outcomes: Vec<OutcomeEntry>,
}

impl From<&OutputDistribution> for OutcomeRecord {
    fn from(d: &OutputDistribution) -> Self {
        OutcomeRecord {
            input: d.input.one_based(),
            outcomes: d
                .outcomes()
                .iter()
                .zip(&d.probs)
                .map(|(o, &p)| OutcomeEntry { out: o.one_based(), p: Some(p), n: None })
                .collect(),
        }
    }
}

impl From<&SampleCounts> for OutcomeRecord {
    fn from(c: &SampleCounts) -> Self {
        OutcomeRecord {
            input: c.input.one_based(),
            outcomes: outcomes(c.modes, c.input.photons())
                .iter()
                .zip(&c.counts)
                .map(|(o, &n)| OutcomeEntry { out: o.one_based(), p: None, n: Some(n) })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::{Hamiltonian, TriangularControl};
    use crate::rng::stream;
    use crate::unitary::{evolve, haar_random};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn splitter() -> Unitary {
        let h = Hamiltonian::assemble(&[1.0, 1.0], &[(0, 1, 0.2)]).unwrap();
        evolve(&h, PI / 4.0 / 0.2)
    }

    #[test]
    fn identity_single_photon() {
        let d = single_photon_distribution(&Unitary::identity(5), 2).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(single_photon_distribution(&Unitary::identity(5), 5).is_err());
    }

    #[test]
    fn splitter_single_photon_is_balanced() {
        let d = single_photon_distribution(&splitter(), 0).unwrap();
        assert!((d.probs()[0] - 0.5).abs() < 1e-12 && (d.probs()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_single_photon_columns() {
        let u = haar_random(5, &mut stream(1));
        for i in 0..5 {
            let d = single_photon_distribution(&u, i).unwrap();
            for j in 0..5 {
                assert!((d.probs()[j] - u.amplitude(j, i).norm_sqr()).abs() < 1e-12);
            }
            assert!((d.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hong_ou_mandel() {
        let d = two_photon_distribution(&splitter(), 0, 1).unwrap();
        assert!(d.prob(Outcome::Pair(0, 1)).abs() < 1e-12);
        assert!((d.prob(Outcome::Pair(0, 0)) - 0.5).abs() < 1e-12);
        assert!((d.prob(Outcome::Pair(1, 1)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_two_photon() {
        let d = two_photon_distribution(&Unitary::identity(6), 1, 4).unwrap();
        assert_eq!(d.prob(Outcome::Pair(1, 4)), 1.0);
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn same_mode_pair_is_rejected() {
        let err = two_photon_distribution(&Unitary::identity(3), 1, 1).unwrap_err();
        assert!(matches!(err, Error::UnsupportedInput(_)));
    }

    #[test]
    fn pair_index_matches_enumeration() {
        let m = 7;
        for (idx, o) in outcomes(m, 2).into_iter().enumerate() {
            let Outcome::Pair(j, l) = o else { unreachable!() };
            assert_eq!(pair_outcome_index(m, j, l), idx);
            assert_eq!(pair_outcome_index(m, l, j), idx);
        }
        assert_eq!(outcome_count(m, 2), 28);
    }

    #[test]
    fn point_mass_sampling() {
        let d = single_photon_distribution(&Unitary::identity(4), 3).unwrap();
        let c = sample_counts(&d, 1234, &mut stream(0));
        assert_eq!(c.counts(), &[0, 0, 0, 1234]);
        assert_eq!(estimate_distribution(&c).probs(), d.probs());
    }

    #[test]
    fn binomial_spread_of_fair_splitter() {
        let d = single_photon_distribution(&splitter(), 0).unwrap();
        let n = 100_000u64;
        let sigma = (n as f64 / 4.0).sqrt();
        let mut rng = stream(5);
        for _ in 0..20 {
            let c = sample_counts(&d, n, &mut rng);
            assert_eq!(c.counts().iter().sum::<u64>(), n);
            assert!((c.counts()[0] as f64 - n as f64 / 2.0).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn estimate_divides_by_shots() {
        let c = SampleCounts { input: InputState::Single(0), modes: 2, counts: vec![7, 3], shots: 10 };
        assert_eq!(estimate_distribution(&c).probs(), &[0.7, 0.3]);
    }

    #[test]
    fn large_sample_estimate_converges() {
        let u = haar_random(5, &mut stream(2));
        let d = two_photon_distribution(&u, 0, 3).unwrap();
        let est = estimate_distribution(&sample_counts(&d, 1_000_000, &mut stream(3)));
        let worst = d.probs().iter().zip(est.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 0.01, "max error {worst}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let u = haar_random(4, &mut stream(2));
        let d = two_photon_distribution(&u, 0, 1).unwrap();
        assert_eq!(sample_counts(&d, 5000, &mut stream(9)), sample_counts(&d, 5000, &mut stream(9)));
    }

    #[test]
    fn input_sets() {
        let planar = ChipGeometry::planar(10).unwrap();
        let set = select_input_set(&planar, Some(3), &mut stream(0)).unwrap();
        assert_eq!((set.singles.len(), set.pairs.len()), (10, 10));
        assert!(set.pairs.contains(&InputState::Pair(0, 9)));

        let two = ChipGeometry::planar(2).unwrap();
        assert_eq!(select_input_set(&two, None, &mut stream(0)).unwrap().pairs.len(), 1);

        let tri = ChipGeometry::triangular(TriangularControl::Direct);
        assert_eq!(select_input_set(&tri, None, &mut stream(0)).unwrap().pairs.len(), 73);
        let sub = select_input_set(&tri, Some(10), &mut stream(1)).unwrap();
        assert_eq!(sub.singles.len(), 32);
        let mut distinct = sub.pairs.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 10);
        let edges = candidate_pairs(&tri);
        assert!(sub.pairs.iter().all(|p| edges.contains(p)));
        assert!(select_input_set(&tri, Some(74), &mut stream(1)).is_err());
    }

    #[test]
    fn subsets_cover_every_edge_over_a_run() {
        let tri = ChipGeometry::triangular(TriangularControl::Direct);
        for seed in 0..20 {
            let mut seen = std::collections::BTreeSet::new();
            let mut rng = stream(seed);
            for _ in 0..200 {
                seen.extend(select_input_set(&tri, Some(10), &mut rng).unwrap().pairs);
            }
            assert_eq!(seen.len(), 73, "seed {seed}");
        }
    }

    #[test]
    fn record_json_shapes() {
        let d = two_photon_distribution(&Unitary::identity(3), 0, 2).unwrap();
        let v = serde_json::to_value(OutcomeRecord::from(&d)).unwrap();
        assert_eq!(v["input"], serde_json::json!([1, 3]));
        assert_eq!(v["outcomes"][0]["out"], serde_json::json!([1, 1]));
        assert!(v["outcomes"][0].get("n").is_none());
        let c = sample_counts(&d, 10, &mut stream(0));
        let v = serde_json::to_value(OutcomeRecord::from(&c)).unwrap();
        assert_eq!(v["outcomes"][2]["n"], 10);
        assert_eq!(InputState::from_one_based(&[3, 1]).unwrap(), InputState::Pair(0, 2));
    }

    proptest! {
        #[test]
        fn distributions_normalized_and_swap_symmetric(seed in 0u64..10_000, m in 2usize..7) {
            let u = haar_random(m, &mut stream(seed));
            let a = two_photon_distribution(&u, 0, m - 1).unwrap();
            let b = two_photon_distribution(&u, m - 1, 0).unwrap();
            prop_assert_eq!(a.probs(), b.probs());
            prop_assert!((a.total() - 1.0).abs() < 1e-10);
            prop_assert!(a.probs().iter().all(|&p| p >= 0.0));
            let s = single_photon_distribution(&u, 0).unwrap();
            prop_assert!((s.total() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn counts_sum_to_shots(seed in 0u64..10_000, shots in 1u64..100_000) {
            let u = haar_random(4, &mut stream(seed));
            let d = two_photon_distribution(&u, 1, 2).unwrap();
            let c = sample_counts(&d, shots, &mut stream(seed + 1));
            prop_assert_eq!(c.counts().iter().sum::<u64>(), shots);
        }
    }
}
