//! Numerical companion for Bogolubov-type trial states of charged Bose
//! gases: a truncated Fock-space oracle, the closed-form quasi-free model,
//! finite-frame Berezin-Lieb checks, momentum kernels, and the energy-bound
//! assemblies for the two-component and one-component gases.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod berezin;
pub mod bogolubov;
pub mod checks;
pub mod dyson;
pub mod error;
pub mod fock;
pub mod jellium;
pub mod kernels;
pub mod linalg;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
