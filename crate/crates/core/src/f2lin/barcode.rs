use serde::{Deserialize, Serialize};

use super::poly::PolyMatrix;
use crate::error::{Error, Result};

/// Homology of a t-deformed differential: free part plus cyclic torsion `Z2[t]/(t^e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Barcode {
    pub free_rank: usize,
    /// Torsion exponents, sorted ascending.
    pub torsion: Vec<usize>,
}

impl Barcode {
    pub fn new(free_rank: usize, mut torsion: Vec<usize>) -> Self {
        torsion.sort_unstable();
        Barcode { free_rank, torsion }
    }

    pub fn sum(&self, other: &Barcode) -> Barcode {
        let mut t = self.torsion.clone();
        t.extend_from_slice(&other.torsion);
        Barcode::new(self.free_rank + other.free_rank, t)
    }
}

/// Full invariant-factor data of a differential, including exponent-zero factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors {
    pub size: usize,
    /// Exponents of the nonzero invariant factors, in pivot order.
    pub exponents: Vec<usize>,
}

impl InvariantFactors {
    pub fn barcode(&self) -> Barcode {
        Barcode::new(
            self.size - 2 * self.exponents.len(),
            self.exponents.iter().copied().filter(|&e| e > 0).collect(),
        )
    }
}

/// Smith normal form exponents over Z2[t]/(t^N).
///
/// Pivots on the entry of lowest valuation, leftmost column first and then
/// topmost row, and clears its row and column.
pub fn invariant_factors(d: &PolyMatrix) -> Result<Vec<usize>> {
    let n = d.truncation();
    if n == 0 {
        return Err(Error::InvalidArgument("truncation N must be at least 1".into()));
    }
    let mut a = d.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut exps = Vec::new();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best: Option<(usize, usize, usize)> = None;
        for j in r..cols {
            for i in r..rows {
                if let Some(v) = a.get(i, j).valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        a.swap_rows(r, pi);
        a.swap_cols(r, pj);
        let unit = a.get(r, r).shift_down(v);
        let uinv = unit
            .inverse()
            .ok_or_else(|| Error::Invariant("pivot is not t^v times a unit".into()))?;
        for i in r + 1..rows {
            let e = a.get(i, r);
            if e.is_zero() {
                continue;
            }
            let q = e.shift_down(v).mul(&uinv);
            a.add_row_multiple(i, r, &q);
        }
        for j in r + 1..cols {
            let e = a.get(r, j);
            if e.is_zero() {
                continue;
            }
            let q = e.shift_down(v).mul(&uinv);
            a.add_col_multiple(j, r, &q);
        }
        exps.push(v);
        r += 1;
    }
    Ok(exps)
}

/// Barcode of the homology `ker D / im D` of a square differential over Z2[t]/(t^N).
pub fn barcode(d: &PolyMatrix) -> Result<Barcode> {
    Ok(barcode_factors(d)?.barcode())
}

pub fn barcode_factors(d: &PolyMatrix) -> Result<InvariantFactors> {
    if d.truncation() == 0 {
        return Err(Error::InvalidArgument("truncation N must be at least 1".into()));
    }
    if d.rows() != d.cols() {
        return Err(Error::Dimension(format!(
            "differential must be square, got {}x{}",
            d.rows(),
            d.cols()
        )));
    }
    if !d.mul(d)?.is_zero() {
        return Err(Error::Validation(
            "differential does not square to zero in the truncated ring".into(),
        ));
    }
    let exponents = invariant_factors(d)?;
    if 2 * exponents.len() > d.rows() {
        return Err(Error::Invariant("more invariant factors than D^2 = 0 allows".into()));
    }
    Ok(InvariantFactors {
        size: d.rows(),
        exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::super::poly::Poly;
    use super::*;

    fn nilpotent(e: usize, n: usize) -> PolyMatrix {
        let mut d = PolyMatrix::zeros(2, 2, n);
        d.set(1, 0, Poly::monomial(e, n));
        d
    }

    #[test]
    fn zero_differential() {
        let b = barcode(&PolyMatrix::zeros(2, 2, 3)).unwrap();
        assert_eq!(b, Barcode::new(2, vec![]));
    }

    #[test]
    fn single_torsion_bar() {
        assert_eq!(barcode(&nilpotent(1, 4)).unwrap(), Barcode::new(0, vec![1]));
        assert_eq!(barcode(&nilpotent(3, 8)).unwrap(), Barcode::new(0, vec![3]));
        assert_eq!(barcode(&nilpotent(0, 3)).unwrap(), Barcode::new(0, vec![]));
    }

    #[test]
    fn rejects_bad_input() {
        let mut d = PolyMatrix::zeros(2, 2, 4);
        d.set(0, 0, Poly::one(4));
        assert!(matches!(barcode(&d), Err(Error::Validation(_))));
        assert!(matches!(
            barcode(&PolyMatrix::zeros(2, 2, 0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            barcode(&PolyMatrix::zeros(2, 3, 4)),
            Err(Error::Dimension(_))
        ));
    }
}
