//! Exact statevector simulation of a layered RY/RZ/CNOT ansatz and the
//! hybrid dense-quantum-dense classifier built on it, plus the deterministic
//! two-moons dataset the classifier trains on.
//!
//! Everything is seeded and single-precision-free: the same seed produces the
//! same bytes on every platform, which the test suite leans on heavily.

pub mod ansatz;
pub mod dataset;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod statevector;
pub mod train;

pub use ansatz::{AnsatzError, AnsatzSpec, Jacobian};
pub use num_complex::Complex64;
pub use dataset::{load_csv, make_moons, DataError, MoonsDataset, SplitKind};
pub use model::{accuracy, loss_mae, DenseLayer, FfnnModel, HybridModel, Model, ModelError};
pub use statevector::{Gate, SimError, StateVector};
pub use train::{evaluate_split, train, EpochMetrics, MetricsHistory, TrainConfig, TrainError};
