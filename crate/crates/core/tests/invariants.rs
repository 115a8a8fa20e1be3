use ccwave::chip::{Chip, ChipGeometry, ChipParameters, ControlModel, TriangularControl, BETA_RANGE};
use ccwave::photonics::{distribution, full_input_set, InputState};
use ccwave::rng::stream;
use ccwave::trainer::{mae_loss, train, TrainerConfig};
use ccwave::unitary::{fidelity, geodesic_path, haar_random};
use proptest::prelude::*;

fn mesh_chip(seed: u64) -> Chip {
    let geom = ChipGeometry::triangular(TriangularControl::MultiPhase);
    let control = ControlModel::mesh(&geom).unwrap();
    let couplings = ChipParameters::sample_target(&geom, &mut stream(seed)).couplings().clone();
    Chip::new(geom, control, couplings).unwrap()
}

#[test]
fn hamiltonians_are_exactly_symmetric() {
    for geom in [
        ChipGeometry::planar(10).unwrap(),
        ChipGeometry::triangular(TriangularControl::Direct),
        ChipGeometry::triangular(TriangularControl::MultiPhase),
    ] {
        let p = ChipParameters::sample_target(&geom, &mut stream(5));
        for s in 0..geom.segments().len() {
            let h = p.hamiltonian(s);
            assert_eq!(h.matrix(), &h.matrix().transpose());
        }
    }
}

#[test]
fn edge_counts() {
    assert_eq!(ChipGeometry::triangular(TriangularControl::Direct).edges().len(), 73);
    for m in 2..20 {
        assert_eq!(ChipGeometry::planar(m).unwrap().edges().len(), m - 1);
    }
}

#[test]
fn seeded_parameter_draws_repeat_bitwise() {
    let geom = ChipGeometry::triangular(TriangularControl::Direct);
    let p = ChipParameters::sample_target(&geom, &mut stream(6));
    assert_eq!(p.perturb(0.1, &mut stream(7)), p.perturb(0.1, &mut stream(7)));
    assert_eq!(p.shift_couplings(0.01, &mut stream(8)), p.shift_couplings(0.01, &mut stream(8)));
}

#[test]
fn mesh_training_never_leaves_the_bounds() {
    let chip = mesh_chip(9);
    let target = chip.unitary(&vec![0.3; chip.control_count()]).unwrap();
    let (lo, hi) = chip.control().bounds();
    // start on the boundary so that probes push outward
    let start: Vec<f64> = (0..chip.control_count()).map(|i| if i % 2 == 0 { lo } else { hi }).collect();
    let config = TrainerConfig { epochs: 60, shots: Some(200), pairs_per_epoch: Some(5), seed: 3, ..TrainerConfig::default() };
    let out = train(&chip, &target, &start, &config).unwrap();
    assert!(out.params.iter().all(|&x| (lo..=hi).contains(&x)));
    for beta in chip.parameters(&out.params).unwrap().beta() {
        assert!(beta.iter().all(|&b| (BETA_RANGE.0..=BETA_RANGE.1).contains(&b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_ignores_phase_and_common_right_factor(seed in any::<u64>(), m in 2usize..8, phi in -6.3f64..6.3) {
        let mut rng = stream(seed);
        let a = haar_random(m, &mut rng);
        let b = haar_random(m, &mut rng);
        let w = haar_random(m, &mut rng);
        let f = fidelity(&a, &b).unwrap();
        let fw = fidelity(&a.mul(&w).unwrap(), &b.mul(&w).unwrap()).unwrap();
        prop_assert!((f - fw).abs() < 1e-12);
        prop_assert!((fidelity(&a, &b.with_global_phase(phi)).unwrap() - f).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn geodesic_ends_on_target(seed in any::<u64>(), m in 2usize..8, steps in 1usize..12) {
        let mut rng = stream(seed);
        let a = haar_random(m, &mut rng);
        let b = haar_random(m, &mut rng);
        let path = geodesic_path(&a, &b, steps).unwrap();
        prop_assert_eq!(path.len(), steps);
        prop_assert!(fidelity(path.last().unwrap(), &b).unwrap() >= 1.0 - 1e-10);
        for u in &path {
            prop_assert!(u.unitarity_error() < 1e-10);
        }
    }

    #[test]
    fn loss_is_nonnegative_and_order_free(seed in any::<u64>(), m in 3usize..7, rot in 0usize..20) {
        let mut rng = stream(seed);
        let geom = ChipGeometry::planar(m).unwrap();
        let a = haar_random(m, &mut rng);
        let b = haar_random(m, &mut rng);
        let inputs: Vec<InputState> = full_input_set(&geom).iter().copied().collect();
        let est: Vec<_> = inputs.iter().map(|&s| distribution(&a, s).unwrap()).collect();
        let tgt: Vec<_> = inputs.iter().map(|&s| distribution(&b, s).unwrap()).collect();
        let refs: Vec<_> = tgt.iter().collect();
        let loss = mae_loss(&est, &refs).unwrap();
        prop_assert!(loss >= 0.0);
        let k = rot % est.len();
        let mut est2 = est.clone();
        est2.rotate_left(k);
        let mut refs2 = refs.clone();
        refs2.rotate_left(k);
        prop_assert!((mae_loss(&est2, &refs2).unwrap() - loss).abs() < 1e-15);
    }

    #[test]
    fn exact_training_loss_never_rises(seed in 0u64..1000) {
        let geom = ChipGeometry::planar(6).unwrap();
        let t = ChipParameters::sample_target(&geom, &mut stream(seed));
        let chip = Chip::new(geom, ControlModel::direct(), t.couplings().clone()).unwrap();
        let target = chip.unitary(&t.beta()[0]).unwrap();
        let start = t.perturb(0.1, &mut stream(seed + 1)).beta()[0].clone();
        let config = TrainerConfig { epochs: 40, shots: None, seed, ..TrainerConfig::default() };
        let out = train(&chip, &target, &start, &config).unwrap();
        for w in out.trajectory.windows(2) {
            prop_assert!(w[1].loss <= w[0].loss);
        }
        prop_assert!(out.trajectory.iter().all(|r| r.loss >= 0.0));
    }
}
