//! Linear algebra over Z2 and over truncated polynomial rings Z2[t]/(t^N).

mod barcode;
mod bits;
mod matrix;
mod poly;

pub use barcode::{barcode, barcode_factors, invariant_factors, Barcode, InvariantFactors};
pub use bits::{BitVec, EchelonBasis};
pub use matrix::{ungraded_cohomology_rank, Cohomology, F2Matrix};
pub use poly::{Poly, PolyMatrix};

/// Rank of `m` over Z2.
pub fn rank(m: &F2Matrix) -> usize {
    m.rank()
}
