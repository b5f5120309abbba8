//! Truncated bosonic Fock space with dense operators, used as a brute-force
//! reference for the quasi-free formulas.

pub mod basis;
pub mod ops;
pub mod state;

pub use basis::{OccupationBasis, DEFAULT_STATE_CAP};
pub use ops::{
    annihilation, creation, expectation, number_operator, second_quantize_one_body,
    second_quantize_two_body, FockOperator, FockVector, OPERATOR_CAP,
};
pub use state::{bogolubov_by_displacement, prepare_state, PrepConfig, PreparedState, StateSpec};
