//! Dense state-vector backend: operator application, tensor products,
//! measurement, matrix generation and oracle construction.
//!
//! Basis labels are big-endian: in `|x, y⟩` with `y` on `m` qubits the
//! index is `x·2^m + y`, and register 0 of a subsystem split is the most
//! significant group of bits.

mod error;
mod matrix;
mod measure;
mod ops;
mod state;

pub use error::QError;
pub use matrix::Matrix;
pub use measure::{format_probability, measure, sample, subsystem_marginals, subsystems, MeasurementReport};
pub use ops::{
    apply, apply_n, apply_operand, decode_function, generate_matrix, oracle, oracle_permutation,
    outer, qft_matrix, tensor, tensor_op, tensor_operands, Operand,
};
pub use state::{log2_exact, norm, QuantumState, NORM_TOLERANCE};
