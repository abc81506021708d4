use std::fmt;

use super::bits::{BitVec, EchelonBasis};
use crate::error::{Error, Result};

/// Dense matrix over the two-element field, one packed bit vector per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows. Fails on ragged input or entries other than 0/1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, &x) in r.iter().enumerate() {
                match x {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "entry ({i},{j}) = {other} is not 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_row_vecs(cols: usize, data: Vec<BitVec>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols));
        F2Matrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows, "row {i} out of range {}", self.rows);
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows, "row {i} out of range {}", self.rows);
        self.data[i].set(j, value);
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        assert!(i < self.rows, "row {i} out of range {}", self.rows);
        self.data[i].flip(j);
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.data[i].get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|r| r.count_ones()).sum()
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub(crate) fn add_assign(&mut self, other: &F2Matrix) {
        debug_assert!(self.rows == other.rows && self.cols == other.cols);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for k in r.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`, indexing `(i, k) -> i * other.rows + k`.
    pub fn kron(&self, other: &F2Matrix) -> F2Matrix {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in self.data[i].ones() {
                for k in 0..other.rows {
                    for l in other.data[k].ones() {
                        out.set(i * other.rows + k, j * other.cols + l, true);
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &F2Matrix) -> F2Matrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in self.data[i].ones() {
                out.set(i, j, true);
            }
        }
        for i in 0..other.rows {
            for j in other.data[i].ones() {
                out.set(self.rows + i, self.cols + j, true);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        // Row reduction keyed on the leading bit; each row is reduced against
        // the table until it either vanishes or claims a fresh pivot.
        let mut table: Vec<Option<BitVec>> = vec![None; self.cols];
        let mut rank = 0;
        for r in &self.data {
            let mut v = r.clone();
            while let Some(p) = v.leading() {
                match &table[p] {
                    Some(b) => v.xor_assign(b),
                    None => {
                        table[p] = Some(v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// Basis of the null space `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = BitVec::unit(self.cols, free);
            for (row, &p) in pivots.iter().enumerate() {
                if rref.data[row].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for i in 0..self.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn inverse(&self) -> Option<F2Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| a.data[i].get(c))?;
            a.data.swap(c, p);
            inv.data.swap(c, p);
            let (ar, ir) = (a.data[c].clone(), inv.data[c].clone());
            for i in 0..n {
                if i != c && a.data[i].get(c) {
                    a.data[i].xor_assign(&ar);
                    inv.data[i].xor_assign(&ir);
                }
            }
        }
        Some(inv)
    }

    /// Basis of the column space, in the order columns were first found independent.
    pub fn column_space_basis(&self) -> Vec<BitVec> {
        let mut ech = EchelonBasis::new(self.rows, 0);
        let mut out = Vec::new();
        for j in 0..self.cols {
            let c = self.column(j);
            if ech.insert(&c) {
                out.push(c);
            }
        }
        out
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

/// Rank of the cohomology of an ungraded complex `(F2^n, d)`: `n - 2 rank(d)`.
pub fn ungraded_cohomology_rank(d: &F2Matrix) -> Result<usize> {
    if !d.is_square() {
        return Err(Error::Dimension(format!(
            "differential must be square, got {}x{}",
            d.rows(),
            d.cols()
        )));
    }
    if !d.mul(d)?.is_zero() {
        return Err(Error::Validation("differential does not square to zero".into()));
    }
    Ok(d.rows() - 2 * d.rank())
}

/// Cohomology of an ungraded complex with a fixed basis of cocycle representatives.
///
/// Representatives are drawn from a deterministic kernel basis and kept when
/// independent modulo the image, in kernel-basis order.
#[derive(Clone, Debug)]
pub struct Cohomology {
    dim: usize,
    representatives: Vec<BitVec>,
    echelon: EchelonBasis,
}

impl Cohomology {
    pub fn new(d: &F2Matrix) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::Dimension("differential must be square".into()));
        }
        let dim = d.rows();
        let image = d.column_space_basis();
        let kernel = d.kernel_basis();
        let h = kernel.len() - image.len();
        let mut echelon = EchelonBasis::new(dim, h);
        for v in &image {
            echelon.insert(v);
        }
        let mut representatives = Vec::with_capacity(h);
        for v in kernel {
            if echelon.insert_tagged(&v, representatives.len()) {
                representatives.push(v);
            }
        }
        if representatives.len() != h {
            return Err(Error::Invariant(
                "image is not contained in the kernel".into(),
            ));
        }
        Ok(Cohomology {
            dim,
            representatives,
            echelon,
        })
    }

    pub fn rank(&self) -> usize {
        self.representatives.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn representatives(&self) -> &[BitVec] {
        &self.representatives
    }

    /// Coordinates of the class of cocycle `v` in the representative basis.
    pub fn class_of(&self, v: &BitVec) -> Result<BitVec> {
        let (residue, tag) = self.echelon.reduce(v);
        if !residue.is_zero() {
            return Err(Error::Invariant(
                "vector is not a cocycle of this complex".into(),
            ));
        }
        Ok(tag)
    }
}
