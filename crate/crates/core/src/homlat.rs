//! Middle homology of the A_m Milnor fibre: intersection form and Picard-Lefschetz twists.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::zigzag::BraidWord;

/// The lattice spanned by the vanishing cycles `d_1, ..., d_m` in complex dimension `n`.
///
/// The form is `d_i . d_{i+1} = 1`, `d_{i+1} . d_i = sigma`, `d_i . d_i = chi`, with
/// `sigma = -1, chi = 0` for odd `n` and `sigma = 1, chi = -2 s` for even `n`, where
/// `s = (-1)^{n(n+1)/2}` is the twist sign. Only `n mod 4` matters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MilnorLattice {
    pub m: usize,
    pub n_mod4: u8,
    pub sign: i64,
    pub sigma: i64,
    pub chi: i64,
    pub form: Vec<Vec<i64>>,
}

impl MilnorLattice {
    pub fn new(m: usize, n_mod4: u8) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if n_mod4 > 3 {
            return Err(Error::InvalidArgument(format!("n mod 4 must be 0..=3, got {n_mod4}")));
        }
        let sign = match n_mod4 {
            0 | 3 => 1,
            _ => -1,
        };
        let (sigma, chi) = if n_mod4 % 2 == 1 { (-1, 0) } else { (1, -2 * sign) };
        let mut form = vec![vec![0; m]; m];
        for i in 0..m {
            form[i][i] = chi;
            if i + 1 < m {
                form[i][i + 1] = 1;
                form[i + 1][i] = sigma;
            }
        }
        Ok(MilnorLattice {
            m,
            n_mod4,
            sign,
            sigma,
            chi,
            form,
        })
    }

    pub fn basis(&self, i: usize) -> Result<Vec<i64>> {
        if i == 0 || i > self.m {
            return Err(Error::InvalidArgument(format!("index {i} outside 1..={}", self.m)));
        }
        let mut v = vec![0; self.m];
        v[i - 1] = 1;
        Ok(v)
    }

    fn check(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::Dimension(format!(
                "vector of length {} in a rank {} lattice",
                v.len(),
                self.m
            )));
        }
        Ok(())
    }

    /// `x . y`.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check(x)?;
        self.check(y)?;
        let mut acc: i64 = 0;
        for i in 0..self.m {
            for j in 0..self.m {
                let q = self.form[i][j];
                if q == 0 || x[i] == 0 || y[j] == 0 {
                    continue;
                }
                acc = x[i]
                    .checked_mul(q)
                    .and_then(|v| v.checked_mul(y[j]))
                    .and_then(|v| acc.checked_add(v))
                    .ok_or_else(overflow)?;
            }
        }
        Ok(acc)
    }

    /// `tau_S^e (x)` with `tau_S(x) = x + s (x . S) S`.
    pub fn pl_twist(&self, s_vec: &[i64], x: &[i64], exponent: i64) -> Result<Vec<i64>> {
        self.check(s_vec)?;
        self.check(x)?;
        let ss = self.pairing(s_vec, s_vec)?;
        let denom = 1 + self.sign * ss;
        let mut cur = x.to_vec();
        for _ in 0..exponent.unsigned_abs() {
            let xs = self.pairing(&cur, s_vec)?;
            let coeff = if exponent > 0 {
                self.sign * xs
            } else {
                if denom == 0 || xs % denom != 0 {
                    return Err(Error::InvalidArgument(
                        "twist about this class is not invertible over the integers".into(),
                    ));
                }
                -self.sign * (xs / denom)
            };
            cur = add_multiple(&cur, coeff, s_vec)?;
        }
        Ok(cur)
    }

    /// Matrix of `tau_{d_i}^e`; column `j` is the image of `d_j`.
    pub fn twist_matrix(&self, i: usize, exponent: i64) -> Result<Vec<Vec<i64>>> {
        let s = self.basis(i)?;
        let mut mat = vec![vec![0; self.m]; self.m];
        for j in 1..=self.m {
            let img = self.pl_twist(&s, &self.basis(j)?, exponent)?;
            for (r, v) in img.into_iter().enumerate() {
                mat[r][j - 1] = v;
            }
        }
        Ok(mat)
    }

    /// Class of the sphere `word @ base`, applying the rightmost syllable first.
    pub fn homology_class(&self, word: &BraidWord, base: usize) -> Result<Vec<i64>> {
        let mut cur = self.basis(base)?;
        for &(g, e) in word.syllables.iter().rev() {
            cur = self.pl_twist(&self.basis(g)?, &cur, e)?;
        }
        Ok(cur)
    }
}

fn overflow() -> Error {
    Error::InvalidArgument("integer overflow in lattice arithmetic".into())
}

fn add_multiple(x: &[i64], c: i64, s: &[i64]) -> Result<Vec<i64>> {
    x.iter()
        .zip(s)
        .map(|(&a, &b)| c.checked_mul(b).and_then(|v| a.checked_add(v)).ok_or_else(overflow))
        .collect()
}

/// Product of square integer matrices.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = a[i][k]
                    .checked_mul(b[k][j])
                    .and_then(|v| out[i][j].checked_add(v))
                    .ok_or_else(overflow)?;
            }
        }
    }
    Ok(out)
}
