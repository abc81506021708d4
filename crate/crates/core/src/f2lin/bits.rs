use std::fmt;

/// A fixed-length vector over the two-element field, packed 64 entries per word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the highest set bit.
    pub fn leading(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(k * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "BitVec[{s}]")
    }
}

/// Incremental echelon basis keyed by leading bit.
///
/// Each stored vector remembers which inserted vectors it was built from, so
/// membership queries can also return coordinates.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    pivots: Vec<Option<(BitVec, BitVec)>>,
    tag_len: usize,
}

impl EchelonBasis {
    /// `tag_len` is the number of distinct tags available to `insert_tagged`.
    pub fn new(dim: usize, tag_len: usize) -> Self {
        EchelonBasis {
            dim,
            pivots: vec![None; dim],
            tag_len,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    /// Reduces `v`; returns the residue and the combination of stored tags used.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut v = v.clone();
        let mut tag = BitVec::zeros(self.tag_len);
        while let Some(p) = v.leading() {
            match &self.pivots[p] {
                Some((b, t)) => {
                    v.xor_assign(b);
                    tag.xor_assign(t);
                }
                None => break,
            }
        }
        (v, tag)
    }

    /// Clears every pivot position of `v`; the result is the canonical
    /// representative of `v` modulo the span.
    pub fn reduce_full(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for p in (0..self.dim).rev() {
            if v.get(p) {
                if let Some((b, _)) = &self.pivots[p] {
                    v.xor_assign(b);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v` without tracking; returns whether it was independent.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        self.insert_inner(v, None)
    }

    /// Inserts `v` and records it under tag bit `tag`.
    pub fn insert_tagged(&mut self, v: &BitVec, tag: usize) -> bool {
        self.insert_inner(v, Some(tag))
    }

    fn insert_inner(&mut self, v: &BitVec, tag_bit: Option<usize>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let (r, mut tag) = self.reduce(v);
        match r.leading() {
            None => false,
            Some(p) => {
                if let Some(k) = tag_bit {
                    tag.flip(k);
                }
                self.pivots[p] = Some((r, tag));
                true
            }
        }
    }

    pub fn pivot_positions(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.pivots[i].is_some()).collect()
    }
}
