//! Dense-matrix gate application, used as an independent oracle against the
//! stride kernels in [`crate::statevector`].
//!
//! Builds the full 2^n x 2^n unitary for a gate by Kronecker products (or an
//! explicit permutation for CNOT) and applies it with a dense matrix-vector
//! multiply. Deliberately naive; capped at [`MAX_ORACLE_QUBITS`] qubits.

use crate::statevector::{Gate, SimError, StateVector, MAX_ORACLE_QUBITS};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Applies `gate` through the dense route and returns the new state.
pub fn oracle_apply(state: &StateVector, gate: Gate) -> Result<StateVector, SimError> {
    let n = state.n_qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(SimError::OracleSize(n));
    }
    gate.validate(n)?;
    let matrix = gate_unitary(n, gate)?;
    let dim = 1usize << n;
    let amps = state.amplitudes();
    let mut out = vec![ZERO; dim];
    for (row, out_amp) in out.iter_mut().enumerate() {
        for (col, amp) in amps.iter().enumerate() {
            *out_amp += matrix[row * dim + col] * amp;
        }
    }
    StateVector::from_amplitudes(n, out)
}

/// Full row-major unitary of one gate on an n-qubit register.
pub fn gate_unitary(n_qubits: usize, gate: Gate) -> Result<Vec<Complex64>, SimError> {
    if n_qubits == 0 || n_qubits > MAX_ORACLE_QUBITS {
        return Err(SimError::OracleSize(n_qubits));
    }
    gate.validate(n_qubits)?;
    match gate {
        Gate::Ry { target, angle } => {
            let (s, c) = (angle / 2.0).sin_cos();
            let block = [
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ];
            Ok(embed_single(n_qubits, target, &block))
        }
        Gate::Rz { target, angle } => {
            let block = [
                Complex64::from_polar(1.0, -angle / 2.0),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, angle / 2.0),
            ];
            Ok(embed_single(n_qubits, target, &block))
        }
        Gate::Cnot { control, target } => {
            let dim = 1usize << n_qubits;
            let mut out = vec![ZERO; dim * dim];
            for col in 0..dim {
                let row = if col & (1 << control) != 0 { col ^ (1 << target) } else { col };
                out[row * dim + col] = ONE;
            }
            Ok(out)
        }
    }
}

/// I x ... x block x ... x I with the block at `target`, folding from the
/// most significant qubit down so the slot at bit position `target` lines up
/// with the index convention.
fn embed_single(n_qubits: usize, target: usize, block: &[Complex64; 4]) -> Vec<Complex64> {
    let identity = [ONE, ZERO, ZERO, ONE];
    let mut matrix = vec![ONE];
    let mut dim = 1usize;
    for q in (0..n_qubits).rev() {
        let factor: &[Complex64] = if q == target { block } else { &identity };
        matrix = kron(&matrix, dim, factor, 2);
        dim *= 2;
    }
    matrix
}

/// Kronecker product of row-major square matrices.
fn kron(a: &[Complex64], a_dim: usize, b: &[Complex64], b_dim: usize) -> Vec<Complex64> {
    let dim = a_dim * b_dim;
    let mut out = vec![ZERO; dim * dim];
    for ar in 0..a_dim {
        for ac in 0..a_dim {
            let scale = a[ar * a_dim + ac];
            if scale == ZERO {
                continue;
            }
            for br in 0..b_dim {
                for bc in 0..b_dim {
                    out[(ar * b_dim + br) * dim + (ac * b_dim + bc)] = scale * b[br * b_dim + bc];
                }
            }
        }
    }
    out
}
