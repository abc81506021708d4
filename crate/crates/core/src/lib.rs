//! Exact computations with A-infinity modules over Z2[e]/(e^2), truncated bar
//! complexes and twisted complexes over the zigzag category.

pub mod amod;
pub mod barcx;
pub mod error;
pub mod f2lin;
pub mod freecert;
pub mod homlat;
pub mod tw;
pub mod zigzag;

pub use error::{Error, Result};
