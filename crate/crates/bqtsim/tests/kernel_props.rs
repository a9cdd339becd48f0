//! Statistical and cross-module properties of the simulation kernel.

use bqtsim::gate::{apply_gate, Gate};
use bqtsim::measure::{force_branch, measure, Projector};
use bqtsim::protocol::{bell_projectors, bell_state, BellOutcome, GhzLikeSpec};
use bqtsim::{PureState, SimRng};

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn measurement_frequencies_follow_born_probabilities() {
    // Fixed two-qubit state with four distinct outcome probabilities.
    let amps = vec![
        num_complex::Complex64::new(0.1f64.sqrt(), 0.0),
        num_complex::Complex64::new(0.0, 0.2f64.sqrt()),
        num_complex::Complex64::new(0.3f64.sqrt(), 0.0),
        num_complex::Complex64::new(0.0, -(0.4f64.sqrt())),
    ];
    let state = PureState::new(2, amps).unwrap();
    let projectors: Vec<Projector> = (0..4)
        .map(|i| Projector::onto(&PureState::basis(2, i).unwrap()).unwrap())
        .collect();
    let born = [0.1, 0.2, 0.3, 0.4];

    let samples = 100_000usize;
    let mut counts = [0usize; 4];
    let mut rng = SimRng::seeded(20_240_817);
    for _ in 0..samples {
        let (outcome, _, _) = measure(&state, &projectors, &[0, 1], &mut rng).unwrap();
        counts[outcome] += 1;
    }

    let chi2: f64 = counts
        .iter()
        .zip(&born)
        .map(|(&observed, &p)| {
            let expected = p * samples as f64;
            (observed as f64 - expected).powi(2) / expected
        })
        .sum();
    // Significance 1e-3 with 3 degrees of freedom.
    let critical = ChiSquared::new(3.0).unwrap().inverse_cdf(1.0 - 1e-3);
    assert!(chi2 < critical, "chi2 = {chi2:.3} >= {critical:.3}");
}

#[test]
fn bell_measurement_on_carrier_plus_pair_is_uniform() {
    // A carrier qubit against half of a Bell pair: all four Bell outcomes
    // show up with probability 1/4.
    let mut rng = SimRng::seeded(5);
    let carrier = PureState::random(1, &mut rng).unwrap();
    let joint = carrier.kron(&bell_state(BellOutcome::PhiPlus)).unwrap();
    let projectors = bell_projectors();
    for outcome in 0..4 {
        let (p, collapsed) = force_branch(&joint, &projectors, &[0, 1], outcome).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
        assert!((collapsed.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn protocol_states_are_normalized_after_long_gate_chains() {
    let spec = GhzLikeSpec::ghz(6).unwrap();
    let mut state = bqtsim::protocol::make_ghz_like(&spec).unwrap();
    for step in 0..200 {
        let target = step % 6;
        let gate = match step % 3 {
            0 => Gate::hadamard(),
            1 => Gate::y(),
            _ => Gate::z(),
        };
        state = apply_gate(&state, &gate, &[target]).unwrap();
        if step % 5 == 0 {
            let other = (target + 1 + step % 5) % 6;
            state = apply_gate(&state, &Gate::cnot(), &[target, other]).unwrap();
        }
    }
    assert!((state.norm() - 1.0).abs() < 1e-12);
}
