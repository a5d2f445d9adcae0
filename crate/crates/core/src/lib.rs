//! Exact computations with nilpotent Higgs bundles, twisted pullbacks and the
//! local inverse Cartier transform in characteristic `p`.

pub mod cartier;
pub mod cech;
pub mod error;
pub mod harness;
pub mod higgs;
pub mod linalg;
pub mod matrix;
pub mod pullback;
pub mod registry;
pub mod ring;
pub mod scenario;

pub use error::{Error, Result};
#[cfg(test)]
mod properties;
