// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::chip::{Chip, ChipGeometry, ChipParameters, ControlModel};
use crate::rng::stream;
use crate::unitary::Unitary;

fn planar(m: usize, seed: u64) -> (Chip, Vec<f64>, Unitary) {
    let geom = ChipGeometry::planar(m).unwrap();
    let t = ChipParameters::sample_target(&geom, &mut stream(seed));
    let chip = Chip::new(geom, ControlModel::direct(), t.couplings().clone()).unwrap();
    let x = t.beta()[0].clone();
    let u = chip.unitary(&x).unwrap();
    (chip, x, u)
}

fn exact(epochs: usize) -> TrainerConfig {
    TrainerConfig { epochs, shots: None, ..TrainerConfig::default() }
}

#[test]
fn stays_at_optimum() {
    let (chip, x, u) = planar(5, 1);
    let trainer = Trainer::new(&chip, u, exact(10)).unwrap();
    let mut state = TrainingState::new(x.clone());
    let rec = trainer.epoch_step(&mut state).unwrap();
    assert_eq!(rec.action, Action::Stay);
    assert_eq!(rec.l_prev, 0.0);
    assert!(rec.l_up > 0.0 && rec.l_down > 0.0);
    assert_eq!(state.params, x);
    let out = trainer.run(&x).unwrap();
    assert_eq!(out.params, x);
    assert!((out.final_fidelity - 1.0).abs() < 1e-12);
}

#[test]
fn moves_up_onto_lower_probe() {
    let (chip, x, u) = planar(5, 2);
    let mut start = x.clone();
    start[0] -= 0.02;
    let trainer = Trainer::new(&chip, u, exact(1)).unwrap();
    let mut state = TrainingState::new(start.clone());
    let rec = trainer.epoch_step(&mut state).unwrap();
    assert_eq!(rec.index, 0);
    assert_eq!(rec.action, Action::Up);
    assert!(rec.l_up < rec.l_prev && rec.l_prev < rec.l_down);
    assert_eq!(state.params[0], start[0] + 0.02);
    assert_eq!(&state.params[1..], &start[1..]);
}

#[test]
fn every_index_visited_once_per_pass() {
    let (chip, x, u) = planar(6, 3);
    let trainer = Trainer::new(&chip, u, exact(18)).unwrap();
    let mut start = x.clone();
    start.iter_mut().for_each(|v| *v = (*v + 0.05).min(1.3));
    let out = trainer.run(&start).unwrap();
    for pass in out.trajectory.chunks(6) {
        let mut seen: Vec<usize> = pass.iter().map(|r| r.index).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
    }
    // first pass follows the identity order
    assert!(out.trajectory[..6].iter().enumerate().all(|(k, r)| r.index == k));
}

#[test]
fn state_invariants_hold() {
    let (chip, x, u) = planar(4, 4);
    let trainer = Trainer::new(&chip, u, TrainerConfig { epochs: 30, shots: Some(100), ..Default::default() }).unwrap();
    let mut state = TrainingState::new(x.iter().map(|v| (v + 0.3f64).min(1.3)).collect());
    for _ in 0..30 {
        trainer.epoch_step(&mut state).unwrap();
        assert_eq!(state.trajectory.len(), state.epoch);
        assert!(state.cursor <= state.params.len());
        assert!(state.params.iter().all(|v| (0.7..=1.3).contains(v)));
    }
}

#[test]
fn deterministic_and_resumable() {
    let (chip, x, u) = planar(5, 5);
    let cfg = TrainerConfig { epochs: 40, shots: Some(500), seed: 9, ..Default::default() };
    let start: Vec<f64> = x.iter().map(|v| v - 0.05).collect();
    let a = train(&chip, &u, &start, &cfg).unwrap();
    let b = train(&chip, &u, &start, &cfg).unwrap();
    assert_eq!(a, b);

    let trainer = Trainer::new(&chip, u.clone(), cfg.clone()).unwrap();
    let mut state = TrainingState::new(start.clone());
    for _ in 0..15 {
        trainer.epoch_step(&mut state).unwrap();
    }
    let json = serde_json::to_string(&state).unwrap();
    let mut resumed: TrainingState = serde_json::from_str(&json).unwrap();
    trainer.resume(&mut resumed).unwrap();
    assert_eq!(resumed.trajectory, a.trajectory);

    let other = train(&chip, &u, &start, &TrainerConfig { seed: 10, ..cfg }).unwrap();
    assert_ne!(other.trajectory, a.trajectory);
}

#[test]
fn exact_loss_at_target_is_zero_and_sampled_is_positive() {
    let (chip, x, u) = planar(6, 6);
    let inputs = crate::photonics::full_input_set(chip.geometry());
    let ex = Trainer::new(&chip, u.clone(), exact(1)).unwrap();
    assert_eq!(ex.evaluate_loss(&x, &inputs, 0).unwrap(), 0.0);
    let sh = Trainer::new(&chip, u, TrainerConfig { shots: Some(10_000), ..Default::default() }).unwrap();
    assert!(sh.evaluate_loss(&x, &inputs, 0).unwrap() > 0.0);
}

#[test]
fn gradient_proportional_step_size() {
    let (chip, x, u) = planar(4, 7);
    let mut start = x.clone();
    start[0] -= 0.1;
    let cfg = TrainerConfig { update: UpdateMethod::GradientProportional { gain: 0.01 }, ..exact(1) };
    let trainer = Trainer::new(&chip, u, cfg).unwrap();
    let mut state = TrainingState::new(start.clone());
    let r = trainer.epoch_step(&mut state).unwrap();
    assert_eq!(r.action, Action::Up);
    let expected = start[0] + 0.01 * (r.l_prev - r.l_up) / r.delta;
    assert!((state.params[0] - expected).abs() < 1e-15);
    assert_eq!(state.last_loss, None);
}

#[test]
fn reuse_previous_loss_skips_measurement() {
    let (chip, x, u) = planar(4, 8);
    let start: Vec<f64> = x.iter().map(|v| v + 0.04).collect();
    let cfg = TrainerConfig { reuse_previous_loss: true, ..exact(8) };
    let out = train(&chip, &u, &start, &cfg).unwrap();
    for w in out.trajectory.windows(2) {
        assert_eq!(w[1].l_prev, w[0].loss);
    }
}

fn record(loss: f64) -> EpochRecord {
    EpochRecord {
        epoch: 0,
        index: 0,
        l_prev: loss,
        l_up: loss,
        l_down: loss,
        action: Action::Stay,
        delta: 0.02,
        loss,
        fidelity: None,
    }
}

#[test]
fn stuck_flag_uses_trailing_tenth() {
    let mut t: Vec<EpochRecord> = (0..90).map(|_| record(1.0)).collect();
    t.extend((0..10).map(|_| record(0.01)));
    assert!(!flag_stuck(&t, 0.05));
    assert!(flag_stuck(&t, 0.005));
    assert!(!flag_stuck(&t, f64::INFINITY));
    assert_eq!(trailing_window(100), 10);
    assert_eq!(trailing_window(5), 1);
    assert_eq!(trailing_window(15), 2);
}

#[test]
fn csv_layout() {
    let mut r = record(0.5);
    r.index = 2;
    r.fidelity = Some(0.75);
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &[r, record(0.25)]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TRAJECTORY_HEADER);
    assert_eq!(lines[1], "0,3,0.5,0.5,0.5,stay,0.02,0.5,0.75");
    assert_eq!(lines[2], "0,1,0.25,0.25,0.25,stay,0.02,0.25,");
}

#[test]
fn one_step_chain_equals_plain_training() {
    let (chip, x, u) = planar(4, 11);
    let start: Vec<f64> = x.iter().map(|v| v + 0.05).collect();
    let cfg = TrainerConfig { epochs: 20, shots: Some(200), seed: 3, ..Default::default() };
    let plain = train(&chip, &u, &start, &cfg).unwrap();
    let staged = intermediate_unitaries_train(&chip, &start, &u, 1, &cfg).unwrap();
    assert_eq!(staged.last, plain);
    assert_eq!(staged.stages.len(), 1);
}
