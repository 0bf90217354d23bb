//! Numerical laboratory for the Selberg class: L-function evaluation,
//! critical-line zeros, compactly supported Fourier pairs, the explicit
//! formula, and comparison experiments for pairs of L-functions.

pub mod arith;
pub mod comparator;
pub mod config;
pub mod data;
pub mod ef;
pub mod error;
pub mod fourier;
pub mod lfunc;
pub mod quad;
pub mod report;
pub mod runner;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};
