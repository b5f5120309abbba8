//! Radial variational problem for the two-component gas and the
//! coherent-packet energy bound built on its minimizer.

mod bound;
mod packet;
mod profile;
mod variational;

pub use bound::*;
pub use packet::*;
pub use profile::*;
pub use variational::*;
