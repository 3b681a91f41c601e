//! The layered rotation ansatz and its exact Jacobian.
//!
//! Each sublayer applies an RY rotation to every qubit, then an RZ rotation
//! to every qubit, then a linear CNOT chain (control q, target q+1). Angles
//! are consumed from a flat parameter vector: sublayer l owns the slice
//! `[l*2n, (l+1)*2n)`, RY angles first, RZ angles second, each indexed by
//! qubit. The circuit always starts from |0...0>.

use crate::statevector::{Gate, SimError, StateVector};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnsatzError {
    #[error("parameter vector has length {got}, spec requires {expected}")]
    ParamCount { expected: usize, got: usize },
    #[error("sublayer count must be at least 1")]
    ZeroSublayers,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Shape of the ansatz: register width and number of sublayers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    n_qubits: usize,
    n_sublayers: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_sublayers: usize) -> Result<Self, AnsatzError> {
        if n_sublayers == 0 {
            return Err(AnsatzError::ZeroSublayers);
        }
        // reuse the register width validation
        StateVector::zero(n_qubits).map_err(AnsatzError::Sim)?;
        Ok(Self { n_qubits, n_sublayers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_sublayers(&self) -> usize {
        self.n_sublayers
    }

    /// Two angles per qubit per sublayer.
    pub fn param_count(&self) -> usize {
        2 * self.n_qubits * self.n_sublayers
    }

    /// Index of the RY angle for `qubit` in `sublayer`.
    pub fn ry_index(&self, sublayer: usize, qubit: usize) -> usize {
        sublayer * 2 * self.n_qubits + qubit
    }

    /// Index of the RZ angle for `qubit` in `sublayer`.
    pub fn rz_index(&self, sublayer: usize, qubit: usize) -> usize {
        sublayer * 2 * self.n_qubits + self.n_qubits + qubit
    }

    fn check_params(&self, params: &[f64]) -> Result<(), AnsatzError> {
        if params.len() != self.param_count() {
            return Err(AnsatzError::ParamCount {
                expected: self.param_count(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// The full gate sequence for one parameter vector.
    pub fn gates(&self, params: &[f64]) -> Result<Vec<Gate>, AnsatzError> {
        self.check_params(params)?;
        let n = self.n_qubits;
        let mut gates = Vec::with_capacity(self.n_sublayers * (2 * n + n.saturating_sub(1)));
        for sublayer in 0..self.n_sublayers {
            for q in 0..n {
                gates.push(Gate::Ry { target: q, angle: params[self.ry_index(sublayer, q)] });
            }
            for q in 0..n {
                gates.push(Gate::Rz { target: q, angle: params[self.rz_index(sublayer, q)] });
            }
            for q in 0..n.saturating_sub(1) {
                gates.push(Gate::Cnot { control: q, target: q + 1 });
            }
        }
        Ok(gates)
    }

    /// Runs the circuit on |0...0>.
    pub fn run(&self, params: &[f64]) -> Result<StateVector, AnsatzError> {
        self.check_params(params)?;
        let n = self.n_qubits;
        let mut state = StateVector::zero(n)?;
        for sublayer in 0..self.n_sublayers {
            for q in 0..n {
                state.apply_ry(q, params[self.ry_index(sublayer, q)])?;
            }
            for q in 0..n {
                state.apply_rz(q, params[self.rz_index(sublayer, q)])?;
            }
            for q in 0..n.saturating_sub(1) {
                state.apply_cnot(q, q + 1)?;
            }
        }
        Ok(state)
    }

    /// Per-qubit Z expectations of the prepared state.
    pub fn expectations(&self, params: &[f64]) -> Result<Vec<f64>, AnsatzError> {
        let state = self.run(params)?;
        (0..self.n_qubits)
            .map(|q| state.expectation_z(q).map_err(AnsatzError::from))
            .collect()
    }

    /// Exact Jacobian d<Z_i>/d theta_j via the parameter-shift rule:
    /// (E(theta + pi/2 e_j) - E(theta - pi/2 e_j)) / 2. Exact because every
    /// angle enters through a rotation generated by a Pauli.
    pub fn jacobian(&self, params: &[f64]) -> Result<Jacobian, AnsatzError> {
        self.check_params(params)?;
        let m = self.param_count();
        let mut jac = Jacobian::zeros(self.n_qubits, m);
        let mut shifted = params.to_vec();
        for j in 0..m {
            let original = shifted[j];
            shifted[j] = original + FRAC_PI_2;
            let plus = self.expectations(&shifted)?;
            shifted[j] = original - FRAC_PI_2;
            let minus = self.expectations(&shifted)?;
            shifted[j] = original;
            for (i, (p, q)) in plus.iter().zip(&minus).enumerate() {
                jac.set(i, j, (p - q) / 2.0);
            }
        }
        Ok(jac)
    }

    /// Central-difference Jacobian, the numerical check for [`Self::jacobian`].
    pub fn jacobian_fd(&self, params: &[f64], h: f64) -> Result<Jacobian, AnsatzError> {
        assert!(h > 0.0, "step size must be positive");
        self.check_params(params)?;
        let m = self.param_count();
        let mut jac = Jacobian::zeros(self.n_qubits, m);
        let mut shifted = params.to_vec();
        for j in 0..m {
            let original = shifted[j];
            shifted[j] = original + h;
            let plus = self.expectations(&shifted)?;
            shifted[j] = original - h;
            let minus = self.expectations(&shifted)?;
            shifted[j] = original;
            for (i, (p, q)) in plus.iter().zip(&minus).enumerate() {
                jac.set(i, j, (p - q) / (2.0 * h));
            }
        }
        Ok(jac)
    }

    /// Human-readable gate listing, one gate per line: `RY q angle`,
    /// `RZ q angle`, `CNOT control target`.
    pub fn circuit_text(&self, params: &[f64]) -> Result<String, AnsatzError> {
        let mut out = String::new();
        for gate in self.gates(params)? {
            match gate {
                Gate::Ry { target, angle } => writeln!(out, "RY {target} {angle:?}"),
                Gate::Rz { target, angle } => writeln!(out, "RZ {target} {angle:?}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            }
            .expect("writing to a String cannot fail");
        }
        Ok(out)
    }
}

/// Row-major matrix of d<Z_i>/d theta_j: one row per qubit, one column per
/// angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Jacobian {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// J^T v, the pullback of a gradient over expectations to the angles.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "gradient length must match row count");
        let mut out = vec![0.0; self.cols];
        for (row, weight) in v.iter().enumerate() {
            for (col, o) in out.iter_mut().enumerate() {
                *o += weight * self.at(row, col);
            }
        }
        out
    }

    /// Largest entrywise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Jacobian) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::{FRAC_PI_2, PI};

    const EPS: f64 = 1e-12;

    #[test]
    fn param_count_examples() {
        assert_eq!(AnsatzSpec::new(2, 4).unwrap().param_count(), 16);
        assert_eq!(AnsatzSpec::new(1, 1).unwrap().param_count(), 2);
        assert_eq!(AnsatzSpec::new(4, 4).unwrap().param_count(), 32);
    }

    #[test]
    fn rejects_zero_sublayers() {
        assert_eq!(AnsatzSpec::new(2, 0), Err(AnsatzError::ZeroSublayers));
    }

    #[test]
    fn rejects_wrong_parameter_length() {
        let spec = AnsatzSpec::new(2, 1).unwrap();
        assert_eq!(
            spec.run(&[0.0; 3]).unwrap_err(),
            AnsatzError::ParamCount { expected: 4, got: 3 }
        );
    }

    #[test]
    fn zero_angles_fix_the_zero_state() {
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let state = spec.run(&vec![0.0; spec.param_count()]).unwrap();
        assert_eq!(state, StateVector::zero(3).unwrap());
        let exps = spec.expectations(&vec![0.0; spec.param_count()]).unwrap();
        assert_eq!(exps, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn single_qubit_pi_rotation() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let exps = spec.expectations(&[PI, 0.0]).unwrap();
        assert!((exps[0] + 1.0).abs() < EPS);
    }

    #[test]
    fn single_qubit_follows_cosine() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let exps = spec.expectations(&[2.0, 5.0]).unwrap();
        assert!((exps[0] - 2.0f64.cos()).abs() < EPS);
    }

    #[test]
    fn entangling_layer_balances_both_qubits() {
        // RY(pi/2) on qubit 0, everything else neutral, then the CNOT chain
        let spec = AnsatzSpec::new(2, 1).unwrap();
        let exps = spec.expectations(&[FRAC_PI_2, 0.0, 0.0, 0.0]).unwrap();
        assert!(exps[0].abs() < EPS);
        assert!(exps[1].abs() < EPS);
    }

    #[test]
    fn expectations_stay_in_unit_interval() {
        let spec = AnsatzSpec::new(2, 4).unwrap();
        let mut rng = SplitMix64::new(19);
        for _ in 0..50 {
            let params: Vec<f64> =
                (0..spec.param_count()).map(|_| rng.uniform(-PI, PI)).collect();
            for e in spec.expectations(&params).unwrap() {
                assert!((-1.0..=1.0).contains(&e));
            }
        }
    }

    #[test]
    fn gate_sequence_shape() {
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let gates = spec.gates(&vec![0.1; spec.param_count()]).unwrap();
        // per sublayer: 3 RY + 3 RZ + 2 CNOT
        assert_eq!(gates.len(), 16);
        assert!(matches!(gates[0], Gate::Ry { target: 0, .. }));
        assert!(matches!(gates[3], Gate::Rz { target: 0, .. }));
        assert!(matches!(gates[6], Gate::Cnot { control: 0, target: 1 }));
        assert!(matches!(gates[7], Gate::Cnot { control: 1, target: 2 }));
        assert!(matches!(gates[8], Gate::Ry { target: 0, .. }));
    }

    #[test]
    fn single_qubit_jacobian_is_minus_sine() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let theta = rng.uniform(-PI, PI);
            let phi = rng.uniform(-PI, PI);
            let jac = spec.jacobian(&[theta, phi]).unwrap();
            assert!((jac.at(0, 0) + theta.sin()).abs() < EPS, "theta {theta}");
            assert!(jac.at(0, 1).abs() < EPS);
        }
    }

    #[test]
    fn jacobian_vanishes_at_zero_angles() {
        // every expectation sits at the cos maximum, so all derivatives are 0
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let params = vec![0.0; spec.param_count()];
        let jac = spec.jacobian(&params).unwrap();
        for i in 0..jac.rows() {
            for j in 0..jac.cols() {
                assert!(jac.at(i, j).abs() < EPS);
            }
        }
        let fd = spec.jacobian_fd(&params, 1e-5).unwrap();
        assert!(jac.max_abs_diff(&fd) < 1e-6);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let mut rng = SplitMix64::new(23);
        let params: Vec<f64> = (0..spec.param_count()).map(|_| rng.uniform(-PI, PI)).collect();
        let jac = spec.jacobian(&params).unwrap();
        let fd = spec.jacobian_fd(&params, 1e-5).unwrap();
        assert!(jac.max_abs_diff(&fd) < 1e-6);
    }

    #[test]
    fn finite_differences_tighten_as_h_shrinks() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let mut rng = SplitMix64::new(29);
        let params: Vec<f64> = (0..spec.param_count()).map(|_| rng.uniform(-PI, PI)).collect();
        let exact = spec.jacobian(&params).unwrap();
        let coarse = spec.jacobian_fd(&params, 1e-3).unwrap();
        let fine = spec.jacobian_fd(&params, 1e-4).unwrap();
        // central differences are O(h^2): a 10x smaller h gains ~100x
        let coarse_err = exact.max_abs_diff(&coarse);
        let fine_err = exact.max_abs_diff(&fine);
        assert!(fine_err < coarse_err);
        assert!(coarse_err < 1e-5);
    }

    #[test]
    fn circuit_text_single_sublayer() {
        let spec = AnsatzSpec::new(2, 1).unwrap();
        let text = spec.circuit_text(&[0.5, 0.25, -0.5, 0.0]).unwrap();
        let expected = "RY 0 0.5\nRY 1 0.25\nRZ 0 -0.5\nRZ 1 0.0\nCNOT 0 1\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn transpose_mul_pulls_back() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let jac = spec.jacobian(&[1.0, 0.0]).unwrap();
        let pulled = jac.transpose_mul(&[2.0]);
        assert!((pulled[0] + 2.0 * 1.0f64.sin()).abs() < EPS);
        assert!(pulled[1].abs() < EPS);
    }
}
