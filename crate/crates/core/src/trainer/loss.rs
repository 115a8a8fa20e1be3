// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use crate::chip::ChipGeometry;
use crate::error::{Error, Result};
use crate::photonics::{distribution, full_input_set, InputSet, InputState, OutputDistribution};
use crate::unitary::Unitary;

/// Exact target distributions for every input a run may probe.
#[derive(Debug, Clone)]
pub struct TargetDataset {
    targets: BTreeMap<InputState, OutputDistribution>,
}

impl TargetDataset {
    /// Target statistics of `u` over the full input set of `geom`.
    pub fn new(geom: &ChipGeometry, u: &Unitary) -> Result<Self> {
        Self::for_inputs(u, &full_input_set(geom))
    }

    pub fn for_inputs(u: &Unitary, inputs: &InputSet) -> Result<Self> {
        let targets = inputs
            .iter()
            .map(|&inp| distribution(u, inp).map(|d| (inp, d)))
            .collect::<Result<_>>()?;
        Ok(TargetDataset { targets })
    }

    pub fn get(&self, input: &InputState) -> Option<&OutputDistribution> {
        self.targets.get(input)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Targets of the inputs in `set`, in set order.
    pub fn select(&self, set: &InputSet) -> Result<Vec<&OutputDistribution>> {
        set.iter()
            .map(|inp| {
                self.targets
                    .get(inp)
                    .ok_or_else(|| Error::MismatchedInputs(format!("no target for input {:?}", inp.one_based())))
            })
            .collect()
    }
}

/// Mean absolute error between estimated and target distributions:
/// `(1/M1) Σ |p̃ − p| over single-photon outcomes + (1/M2) Σ |p̃ − p| over
/// two-photon outcomes`, where `M1`, `M2` count the input states.
///
/// Both lists must cover the same inputs; their order is irrelevant.
pub fn mae_loss(estimated: &[OutputDistribution], targets: &[&OutputDistribution]) -> Result<f64> {
    if estimated.len() != targets.len() {
        return Err(Error::MismatchedInputs(format!(
            "{} estimated vs {} target inputs",
            estimated.len(),
            targets.len()
        )));
    }
    let by_input: BTreeMap<InputState, &OutputDistribution> = targets.iter().map(|t| (t.input(), *t)).collect();
    if by_input.len() != targets.len() {
        return Err(Error::MismatchedInputs("duplicate target input".into()));
    }

    let (mut singles, mut pairs) = (0usize, 0usize);
    let (mut single_sum, mut pair_sum) = (0.0, 0.0);
    let mut seen = std::collections::BTreeSet::new();
    for est in estimated {
        let input = est.input();
        if !seen.insert(input) {
            return Err(Error::MismatchedInputs(format!("duplicate estimate for {:?}", input.one_based())));
        }
        let target = by_input
            .get(&input)
            .ok_or_else(|| Error::MismatchedInputs(format!("no target for input {:?}", input.one_based())))?;
        if target.probs().len() != est.probs().len() {
            return Err(Error::DimensionMismatch { expected: target.probs().len(), found: est.probs().len() });
        }
        let err: f64 = est.probs().iter().zip(target.probs()).map(|(a, b)| (a - b).abs()).sum();
        match input {
            InputState::Single(_) => {
                singles += 1;
                single_sum += err;
            }
            InputState::Pair(..) => {
                pairs += 1;
                pair_sum += err;
            }
        }
    }
    let block = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
    Ok(block(single_sum, singles) + block(pair_sum, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(input: InputState, probs: &[f64]) -> OutputDistribution {
        OutputDistribution::new(input, probs.len(), probs.to_vec()).unwrap()
    }

    #[test]
    fn identical_is_zero() {
        let t = dist(InputState::Single(0), &[0.3, 0.7]);
        assert_eq!(mae_loss(std::slice::from_ref(&t), &[&t]).unwrap(), 0.0);
    }

    #[test]
    fn single_block_arithmetic() {
        let est = dist(InputState::Single(0), &[0.6, 0.4]);
        let tgt = dist(InputState::Single(0), &[0.5, 0.5]);
        assert!((mae_loss(&[est], &[&tgt]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn blocks_are_averaged_separately() {
        let s0 = dist(InputState::Single(0), &[0.6, 0.4]);
        let s1 = dist(InputState::Single(1), &[0.5, 0.5]);
        let t0 = dist(InputState::Single(0), &[0.5, 0.5]);
        let t1 = dist(InputState::Single(1), &[0.5, 0.5]);
        let p = OutputDistribution::new(InputState::Pair(0, 1), 2, vec![0.2, 0.3, 0.5]).unwrap();
        let tp = OutputDistribution::new(InputState::Pair(0, 1), 2, vec![0.5, 0.0, 0.5]).unwrap();
        let loss = mae_loss(&[s0, s1, p], &[&t0, &t1, &tp]).unwrap();
        // singles: 0.2 / 2, pairs: 0.6 / 1
        assert!((loss - 0.7).abs() < 1e-15);
    }

    #[test]
    fn order_does_not_matter() {
        let a = dist(InputState::Single(0), &[0.6, 0.4]);
        let b = dist(InputState::Single(1), &[0.1, 0.9]);
        let ta = dist(InputState::Single(0), &[0.5, 0.5]);
        let tb = dist(InputState::Single(1), &[0.2, 0.8]);
        let l1 = mae_loss(&[a.clone(), b.clone()], &[&ta, &tb]).unwrap();
        let l2 = mae_loss(&[b, a], &[&ta, &tb]).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
    }

    #[test]
    fn mismatched_inputs_error() {
        let a = dist(InputState::Single(0), &[0.6, 0.4]);
        let tb = dist(InputState::Single(1), &[0.2, 0.8]);
        assert!(matches!(mae_loss(std::slice::from_ref(&a), &[&tb]), Err(Error::MismatchedInputs(_))));
        assert!(mae_loss(&[a.clone(), a.clone()], &[&tb, &tb]).is_err());
        assert!(mae_loss(&[], &[&tb]).is_err());
    }
}
