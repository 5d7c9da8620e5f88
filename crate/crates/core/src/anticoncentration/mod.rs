//! Exact laws, concentration functions, characteristic functions and bounds.

mod bounds;
mod chf;
mod law;
mod levy;
pub mod quadrature;

pub use bounds::*;
pub use chf::{exact_chf, roos_bound, ROOS_MAX_N};
pub use law::*;
pub use levy::*;
