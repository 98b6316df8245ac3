//! Energy-optimal placement and update scheduling of UAV base stations
//! serving a time-varying ground-user density.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod channel;
pub mod csv;
pub mod density;
pub mod error;
pub mod figures;
pub mod layout;
pub mod placement;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod scenario;
pub mod scheduler;

pub use error::{Error, Result};
