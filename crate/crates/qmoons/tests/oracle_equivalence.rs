//! The stride kernels against the dense Kronecker oracle, plus the algebraic
//! invariants the gate set must satisfy.

use num_complex::Complex64;
use proptest::prelude::*;
use qmoons::oracle::oracle_apply;
use qmoons::rng::SplitMix64;
use qmoons::statevector::{Gate, StateVector};
use std::f64::consts::{PI, TAU};

const KERNEL_TOL: f64 = 1e-12;

fn random_state(n_qubits: usize, rng: &mut SplitMix64) -> StateVector {
    let dim = 1usize << n_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(n_qubits, amps).unwrap()
}

fn random_gate(n_qubits: usize, rng: &mut SplitMix64) -> Gate {
    let angle = rng.uniform(-TAU, TAU);
    let target = (rng.next_f64() * n_qubits as f64) as usize;
    match (rng.next_f64() * 3.0) as usize {
        0 => Gate::Ry { target, angle },
        1 => Gate::Rz { target, angle },
        _ if n_qubits == 1 => Gate::Ry { target: 0, angle },
        _ => {
            let control = target;
            let mut t = (rng.next_f64() * n_qubits as f64) as usize;
            if t == control {
                t = (t + 1) % n_qubits;
            }
            Gate::Cnot { control, target: t }
        }
    }
}

fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn single_gates_match_the_oracle(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let state = random_state(n, &mut rng);
        let gate = random_gate(n, &mut rng);
        let mut kernel = state.clone();
        kernel.apply(gate).unwrap();
        let dense = oracle_apply(&state, gate).unwrap();
        prop_assert!(max_amp_diff(&kernel, &dense) < KERNEL_TOL);
    }

    #[test]
    fn cnot_is_an_involution(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let state = random_state(n, &mut rng);
        let control = (rng.next_f64() * n as f64) as usize;
        let target = (control + 1 + (rng.next_f64() * (n - 1) as f64) as usize) % n;
        let mut twice = state.clone();
        twice.apply_cnot(control, target).unwrap();
        twice.apply_cnot(control, target).unwrap();
        prop_assert!(max_amp_diff(&twice, &state) < KERNEL_TOL);
    }

    #[test]
    fn ry_has_period_four_pi(n in 1usize..=4, seed in any::<u64>(), angle in -PI..PI) {
        let mut rng = SplitMix64::new(seed);
        let state = random_state(n, &mut rng);
        let target = (rng.next_f64() * n as f64) as usize;
        let mut a = state.clone();
        a.apply_ry(target, angle).unwrap();
        let mut b = state.clone();
        b.apply_ry(target, angle + 2.0 * TAU).unwrap();
        prop_assert!(max_amp_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn rz_never_changes_magnitudes(n in 1usize..=5, seed in any::<u64>(), angle in -TAU..TAU) {
        let mut rng = SplitMix64::new(seed);
        let state = random_state(n, &mut rng);
        let target = (rng.next_f64() * n as f64) as usize;
        let mut rotated = state.clone();
        rotated.apply_rz(target, angle).unwrap();
        for (a, b) in state.amplitudes().iter().zip(rotated.amplitudes()) {
            prop_assert!((a.norm_sqr() - b.norm_sqr()).abs() < KERNEL_TOL);
        }
    }
}

#[test]
fn gate_sequences_track_the_oracle() {
    let mut rng = SplitMix64::new(0x5eed);
    for _ in 0..10 {
        let n = 1 + (rng.next_f64() * 5.0) as usize;
        let mut kernel = random_state(n, &mut rng);
        let mut dense = kernel.clone();
        for _ in 0..50 {
            let gate = random_gate(n, &mut rng);
            kernel.apply(gate).unwrap();
            dense = oracle_apply(&dense, gate).unwrap();
            assert!(max_amp_diff(&kernel, &dense) < KERNEL_TOL);
        }
    }
}

#[test]
fn norm_survives_a_thousand_gates() {
    let mut rng = SplitMix64::new(0xabcd);
    let mut state = StateVector::zero(5).unwrap();
    for _ in 0..1000 {
        state.apply(random_gate(5, &mut rng)).unwrap();
    }
    assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn expectations_match_the_oracle_route() {
    // expectation after kernels vs after dense applications
    let mut rng = SplitMix64::new(31);
    for _ in 0..20 {
        let n = 1 + (rng.next_f64() * 4.0) as usize;
        let state = random_state(n, &mut rng);
        let gate = random_gate(n, &mut rng);
        let mut kernel = state.clone();
        kernel.apply(gate).unwrap();
        let dense = oracle_apply(&state, gate).unwrap();
        for q in 0..n {
            let a = kernel.expectation_z(q).unwrap();
            let b = dense.expectation_z(q).unwrap();
            assert!((a - b).abs() < KERNEL_TOL);
        }
    }
}
