use std::fmt;

use super::bits::BitVec;
use super::matrix::F2Matrix;
use crate::error::{Error, Result};

/// Element of Z2[t]/(t^N); bit `i` is the coefficient of `t^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    bits: BitVec,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            bits: BitVec::zeros(n),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(0, n)
    }

    /// `t^k`, which is zero once `k >= n`.
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut p = Self::zero(n);
        if k < n {
            p.bits.set(k, true);
        }
        p
    }

    /// Coefficients listed from degree 0; terms of degree `>= n` are dropped.
    pub fn from_coeffs(coeffs: &[bool], n: usize) -> Self {
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate().take(n) {
            if c {
                p.bits.set(i, true);
            }
        }
        p
    }

    pub fn truncation(&self) -> usize {
        self.bits.len()
    }

    pub fn coeff(&self, i: usize) -> bool {
        i < self.bits.len() && self.bits.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.bits.leading()
    }

    /// Largest `v` with `t^v` dividing `self`; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.bits.first_one()
    }

    pub fn is_unit(&self) -> bool {
        self.coeff(0)
    }

    pub fn add_assign(&mut self, other: &Poly) {
        self.bits.xor_assign(&other.bits);
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let n = self.truncation();
        debug_assert_eq!(n, other.truncation());
        let mut out = Poly::zero(n);
        for i in self.bits.ones() {
            out.xor_shifted(other, i);
        }
        out
    }

    /// Adds `other * t^shift`, truncating.
    fn xor_shifted(&mut self, other: &Poly, shift: usize) {
        let n = self.truncation();
        if shift >= n {
            return;
        }
        let (ws, bs) = (shift / 64, shift % 64);
        let src = other.bits.words();
        let dst = self.bits.words_mut();
        for k in (ws..dst.len()).rev() {
            let j = k - ws;
            let mut w = src[j] << bs;
            if bs > 0 && j > 0 {
                w |= src[j - 1] >> (64 - bs);
            }
            dst[k] ^= w;
        }
        let extra = dst.len() * 64 - n;
        if extra > 0 {
            let last = dst.len() - 1;
            dst[last] &= u64::MAX >> extra;
        }
    }

    /// `self / t^v` for `v` at most the valuation; the top `v` coefficients become zero.
    pub fn shift_down(&self, v: usize) -> Poly {
        let n = self.truncation();
        let mut out = Poly::zero(n);
        for i in self.bits.ones() {
            debug_assert!(i >= v, "shift_down past valuation");
            if i >= v {
                out.bits.set(i - v, true);
            }
        }
        out
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Option<Poly> {
        if !self.is_unit() {
            return None;
        }
        let n = self.truncation();
        // Solve self * y = 1 one coefficient at a time.
        let mut y = Poly::zero(n);
        let mut prod = Poly::zero(n);
        for k in 0..n {
            let want = k == 0;
            if prod.coeff(k) != want {
                y.bits.set(k, true);
                prod.xor_shifted(self, k);
            }
        }
        Some(y)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .bits
            .ones()
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

/// Matrix over Z2[t]/(t^N).
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, n: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            n,
            entries: vec![Poly::zero(n); rows * cols],
        }
    }

    pub fn identity(size: usize, n: usize) -> Self {
        let mut m = Self::zeros(size, size, n);
        for i in 0..size {
            m.set(i, i, Poly::one(n));
        }
        m
    }

    /// `sum_k t^(k-1) * mats[k-1]`, truncated at `n`.
    pub fn from_layers(mats: &[F2Matrix], n: usize) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::InvalidArgument("no layers given".into()));
        };
        let (rows, cols) = (first.rows(), first.cols());
        let mut out = Self::zeros(rows, cols, n);
        for (k, m) in mats.iter().enumerate() {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::Dimension("layers have different shapes".into()));
            }
            if k >= n {
                continue;
            }
            for i in 0..rows {
                for j in m.row(i).ones() {
                    out.entries[i * cols + j].bits.flip(k);
                }
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert!(i < self.rows && j < self.cols);
        assert_eq!(p.truncation(), self.n, "truncation mismatch");
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows || self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} (N={}) by {}x{} (N={})",
                self.rows, self.cols, self.n, other.rows, other.cols, other.n
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.n);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let p = a.mul(b);
                        out.entries[i * other.cols + j].add_assign(&p);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row `dst += c * row src`.
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, c: &Poly) {
        for j in 0..self.cols {
            let s = &self.entries[src * self.cols + j];
            if !s.is_zero() {
                let p = c.mul(s);
                self.entries[dst * self.cols + j].add_assign(&p);
            }
        }
    }

    /// Column `dst += c * column src`.
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, c: &Poly) {
        for i in 0..self.rows {
            let s = &self.entries[i * self.cols + src];
            if !s.is_zero() {
                let p = s.mul(c);
                self.entries[i * self.cols + dst].add_assign(&p);
            }
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} mod t^{} [", self.rows, self.cols, self.n)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_inverse() {
        let n = 70;
        let u = Poly::from_coeffs(&[true, true, false, true], n);
        let inv = u.inverse().unwrap();
        assert_eq!(u.mul(&inv), Poly::one(n));
        assert!(Poly::monomial(1, n).inverse().is_none());
    }

    #[test]
    fn truncated_product() {
        let n = 4;
        let a = Poly::monomial(2, n);
        assert!(a.mul(&a).is_zero());
        let b = Poly::from_coeffs(&[true, true], n);
        assert_eq!(b.mul(&b), Poly::from_coeffs(&[true, false, true], n));
        assert_eq!(Poly::monomial(3, n).valuation(), Some(3));
        assert_eq!(Poly::monomial(5, n), Poly::zero(n));
    }

    #[test]
    fn wide_shift_crosses_words() {
        let n = 130;
        let a = Poly::from_coeffs(&[false, true], n);
        let b = Poly::monomial(63, n);
        assert_eq!(a.mul(&b), Poly::monomial(64, n));
        assert_eq!(Poly::monomial(64, n).shift_down(64), Poly::one(n));
        assert!(Poly::monomial(100, n).mul(&Poly::monomial(30, n)).is_zero());
    }

    #[test]
    fn layered_matrix() {
        let m1 = F2Matrix::zeros(2, 2);
        let m2 = F2Matrix::from_rows(&[[0u8, 0], [1, 0]]).unwrap();
        let d = PolyMatrix::from_layers(&[m1, m2], 4).unwrap();
        assert_eq!(*d.get(1, 0), Poly::monomial(1, 4));
        assert!(d.mul(&d).unwrap().is_zero());
    }
}
