//! Dense statevector simulation of small qubit registers.
//!
//! The register holds all 2^n complex amplitudes explicitly. Qubit `q`
//! addresses bit `q` of the basis-state index, so qubit 0 is the least
//! significant bit. Only the gates the layered ansatz needs are implemented:
//! RY and RZ in the half-angle convention and CNOT.

use num_complex::Complex64;
use thiserror::Error;

/// Upper bound for [`StateVector::zero`]; 2^24 amplitudes is 256 MiB.
pub const MAX_QUBITS: usize = 24;

/// Upper bound for the dense-matrix oracle, which builds a full 2^n x 2^n
/// unitary per gate.
pub const MAX_ORACLE_QUBITS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("qubit {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("CNOT control and target are both qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("rotation angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("dense oracle supports at most {MAX_ORACLE_QUBITS} qubits, got {0}")]
    OracleSize(usize),
    #[error("expected {expected} amplitudes for {n_qubits} qubits, got {got}")]
    AmplitudeCount {
        n_qubits: usize,
        expected: usize,
        got: usize,
    },
}

/// One gate application in the ansatz gate set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Checks qubit indices and angle finiteness against a register width.
    pub fn validate(&self, n_qubits: usize) -> Result<(), SimError> {
        let check_qubit = |index: usize| {
            if index >= n_qubits {
                Err(SimError::QubitIndex { index, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Ry { target, angle } | Gate::Rz { target, angle } => {
                check_qubit(target)?;
                if !angle.is_finite() {
                    return Err(SimError::NonFiniteAngle(angle));
                }
            }
            Gate::Cnot { control, target } => {
                check_qubit(control)?;
                check_qubit(target)?;
                if control == target {
                    return Err(SimError::ControlEqualsTarget(control));
                }
            }
        }
        Ok(())
    }
}

/// Dense register of 2^n complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0...0>.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::QubitCount(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Builds a register from raw amplitudes; the caller is responsible for
    /// normalisation.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::QubitCount(n_qubits));
        }
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(SimError::AmplitudeCount {
                n_qubits,
                expected,
                got: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn check_qubit(&self, index: usize) -> Result<(), SimError> {
        if index >= self.n_qubits {
            return Err(SimError::QubitIndex {
                index,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: Gate) -> Result<(), SimError> {
        match gate {
            Gate::Ry { target, angle } => self.apply_ry(target, angle),
            Gate::Rz { target, angle } => self.apply_rz(target, angle),
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
        }
    }

    /// RY(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]]
    /// applied to `target`, in place.
    pub fn apply_ry(&mut self, target: usize, angle: f64) -> Result<(), SimError> {
        self.check_qubit(target)?;
        if !angle.is_finite() {
            return Err(SimError::NonFiniteAngle(angle));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let step = 1usize << target;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let k0 = base + offset;
                let k1 = k0 | step;
                let a = self.amps[k0];
                let b = self.amps[k1];
                self.amps[k0] = a * c - b * s;
                self.amps[k1] = a * s + b * c;
            }
        }
        Ok(())
    }

    /// RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}) applied to `target`,
    /// in place.
    pub fn apply_rz(&mut self, target: usize, angle: f64) -> Result<(), SimError> {
        self.check_qubit(target)?;
        if !angle.is_finite() {
            return Err(SimError::NonFiniteAngle(angle));
        }
        let phase0 = Complex64::from_polar(1.0, -angle / 2.0);
        let phase1 = Complex64::from_polar(1.0, angle / 2.0);
        let step = 1usize << target;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let k0 = base + offset;
                let k1 = k0 | step;
                self.amps[k0] *= phase0;
                self.amps[k1] *= phase1;
            }
        }
        Ok(())
    }

    /// Swaps the amplitude pairs where the control bit is set, in place.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(SimError::ControlEqualsTarget(control));
        }
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for k in 0..self.amps.len() {
            // visit each swapped pair once, from its target-bit-0 member
            if k & cmask != 0 && k & tmask == 0 {
                self.amps.swap(k, k | tmask);
            }
        }
        Ok(())
    }

    /// Expectation of Pauli Z on `qubit`: sum of |a_k|^2 signed by bit `qubit`
    /// of k. Clamped to [-1, 1] against rounding spill.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64, SimError> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let mut value = 0.0;
        for (k, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if k & mask == 0 {
                value += p;
            } else {
                value -= p;
            }
        }
        Ok(value.clamp(-1.0, 1.0))
    }

    /// Total probability mass; 1 for any normalised state.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Debug dump, one amplitude per line: `index_binary re im` with the
    /// most significant qubit printed first.
    pub fn dump_lines(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (k, amp) in self.amps.iter().enumerate() {
            writeln!(out, "{:0width$b} {:?} {:?}", k, amp.re, amp.im, width = self.n_qubits)
                .expect("writing to a String cannot fail");
        }
        out
    }
}
