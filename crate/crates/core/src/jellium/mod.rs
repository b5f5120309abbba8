//! One-component jellium trial state: edge profile, charge mismatch,
//! pairing symbol, exchange bounds and the high-density energy assembly.

mod bound;
mod gamma;
mod hardy;
mod jprofile;
mod mismatch;
mod profile;

pub use bound::*;
pub use gamma::*;
pub use hardy::*;
pub use jprofile::*;
pub use mismatch::*;
pub use profile::*;
