//! Combinatorial random matrices with fixed row weight: sampling and
//! enumeration, spectral statistics, anti-concentration laws and bounds, the
//! combinatorial least common denominator, and sphere decompositions.

pub mod anticoncentration;
pub mod clcd;
pub mod combi;
pub mod error;
pub mod rng;
pub mod spectral;
pub mod sphere;

pub use error::{Error, Result};
pub use rng::{substream, RngSubstream};
