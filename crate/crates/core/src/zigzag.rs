//! The zigzag category of the A_m quiver, braid words and the spheres they produce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amod::AModule;
use crate::error::{Error, Result};
use crate::tw::{self, AInfCategory, TwObject};

/// The zigzag category with objects `P_1, ..., P_m` (stored at indices `0..m`).
///
/// `hom(P_i, P_i)` has basis `{1, X_i}`, `hom(P_i, P_{i±1})` has basis `{a}`.
#[derive(Clone, Debug)]
pub struct ZigzagCat {
    m: usize,
    cat: AInfCategory,
}

pub fn zigzag(m: usize) -> Result<ZigzagCat> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let mut hom = vec![vec![0; m]; m];
    for i in 0..m {
        hom[i][i] = 2;
        if i + 1 < m {
            hom[i][i + 1] = 1;
            hom[i + 1][i] = 1;
        }
    }
    let mut cat = AInfCategory::new(hom, vec![0; m])?;
    for i in 0..m {
        for j in [i.wrapping_sub(1), i + 1] {
            if j < m {
                cat.set_mu2(i, j, i, 0, 0, 0b10)?;
            }
        }
    }
    let bad = cat.validate();
    if !bad.is_empty() {
        return Err(Error::Invariant(format!("zigzag category: {}", bad[0])));
    }
    Ok(ZigzagCat { m, cat })
}

impl ZigzagCat {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn category(&self) -> &AInfCategory {
        &self.cat
    }

    fn check_index(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.m {
            return Err(Error::InvalidArgument(format!(
                "object index {i} outside 1..={}",
                self.m
            )));
        }
        Ok(i - 1)
    }

    /// `P_i`, one-based.
    pub fn plain(&self, i: usize) -> Result<TwObject> {
        TwObject::plain(&self.cat, self.check_index(i)?)
    }

    pub fn hf(&self, x: &TwObject, y: &TwObject) -> Result<usize> {
        tw::hf(&self.cat, x, y)
    }

    /// `hf(P_j, X)` for `j = 1..=m`.
    pub fn fingerprint(&self, x: &TwObject) -> Result<Vec<usize>> {
        (1..=self.m).map(|j| self.hf(&self.plain(j)?, x)).collect()
    }

    /// `tau_i^e (X)`, reduced after every single twist.
    pub fn twist_power(&self, i: usize, e: i64, x: &TwObject) -> Result<TwObject> {
        let l = self.plain(i)?;
        let mut cur = x.clone();
        for _ in 0..e.unsigned_abs() {
            let next = if e > 0 {
                tw::twist(&self.cat, &l, &cur)?
            } else {
                tw::untwist(&self.cat, &l, &cur)?
            };
            cur = tw::reduce(&self.cat, &next)?;
        }
        Ok(cur)
    }

    /// Applies `word` to `X`, rightmost syllable first.
    pub fn apply(&self, word: &BraidWord, x: &TwObject) -> Result<TwObject> {
        self.check_word(word)?;
        let mut cur = tw::reduce(&self.cat, x)?;
        for &(g, e) in word.syllables.iter().rev() {
            cur = self.twist_power(g, e, &cur)?;
        }
        Ok(cur)
    }

    pub fn check_word(&self, word: &BraidWord) -> Result<()> {
        for &(g, _) in &word.syllables {
            self.check_index(g)?;
        }
        Ok(())
    }

    pub fn sphere(&self, spec: &SphereSpec) -> Result<TwObject> {
        self.apply(&spec.word, &self.plain(spec.base)?)
    }

    /// `hom(P_l, X)` as a right module over `End(P_l)`.
    pub fn hom_module_right(&self, l: usize, x: &TwObject) -> Result<AModule> {
        tw::hom_module_right(&self.cat, self.check_index(l)?, x)
    }

    /// `hom(X, P_l)` as a left module over `End(P_l)`.
    pub fn hom_module_left(&self, x: &TwObject, l: usize) -> Result<AModule> {
        tw::hom_module_left(&self.cat, x, self.check_index(l)?)
    }
}

/// A product of powers of the generators `t_1, ..., t_m`, applied right to left.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub syllables: Vec<(usize, i64)>,
}

impl BraidWord {
    pub fn new(syllables: Vec<(usize, i64)>) -> Result<Self> {
        if let Some(&(g, e)) = syllables.iter().find(|&&(g, e)| g == 0 || e == 0) {
            return Err(Error::InvalidArgument(format!(
                "syllable t{g}^{e} needs a positive index and nonzero exponent"
            )));
        }
        Ok(BraidWord { syllables })
    }

    pub fn identity() -> Self {
        BraidWord::default()
    }

    /// Sum of the absolute values of the exponents.
    pub fn length(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Self {
        BraidWord {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// `self` followed on the right by `other`, so `other` acts first.
    pub fn compose(&self, other: &BraidWord) -> Self {
        let mut syllables = self.syllables.clone();
        syllables.extend_from_slice(&other.syllables);
        BraidWord { syllables }
    }

    /// All words with adjacent syllables on distinct generators and `length() <= max_len`,
    /// shortest first.
    pub fn enumerate(m: usize, max_len: usize) -> Vec<BraidWord> {
        let mut by_len: Vec<Vec<BraidWord>> = vec![vec![BraidWord::identity()]];
        for len in 1..=max_len {
            let mut words = Vec::new();
            for e in 1..=len {
                for shorter in &by_len[len - e] {
                    let first = shorter.syllables.first().map(|&(g, _)| g);
                    for g in 1..=m {
                        if Some(g) == first {
                            continue;
                        }
                        for sign in [1i64, -1] {
                            let mut s = vec![(g, sign * e as i64)];
                            s.extend_from_slice(&shorter.syllables);
                            words.push(BraidWord { syllables: s });
                        }
                    }
                }
            }
            by_len.push(words);
        }
        by_len.into_iter().flatten().collect()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(g, e)| if e == 1 { format!("t{g}") } else { format!("t{g}^{e}") })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// A braid word together with the index of the object it acts on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphereSpec {
    pub word: BraidWord,
    pub base: usize,
}

impl SphereSpec {
    pub fn plain(base: usize) -> Self {
        SphereSpec {
            word: BraidWord::identity(),
            base,
        }
    }
}

impl fmt::Display for SphereSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "@{}", self.base)
        } else {
            write!(f, "{} @{}", self.word, self.base)
        }
    }
}

fn parse_error(position: usize, token: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        token: token.to_string(),
        message: message.into(),
    }
}

fn split_tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        match tok.find('@') {
            Some(p) if p > 0 => {
                out.push(&tok[..p]);
                out.push(&tok[p..]);
            }
            _ => out.push(tok),
        }
    }
    out
}

fn parse_index(position: usize, token: &str, digits: &str) -> Result<usize> {
    match digits.parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i),
        _ => Err(parse_error(position, token, "expected a positive index")),
    }
}

fn parse_syllable(position: usize, token: &str) -> Result<(usize, i64)> {
    let body = token
        .strip_prefix('t')
        .ok_or_else(|| parse_error(position, token, "expected t<i> or t<i>^<e>"))?;
    let (idx, exp) = match body.split_once('^') {
        Some((i, e)) => {
            let e = e
                .parse::<i64>()
                .map_err(|_| parse_error(position, token, "exponent is not an integer"))?;
            (i, e)
        }
        None => (body, 1),
    };
    if exp == 0 {
        return Err(parse_error(position, token, "exponent must be nonzero"));
    }
    Ok((parse_index(position, token, idx)?, exp))
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syllables = split_tokens(s)
            .into_iter()
            .enumerate()
            .map(|(p, t)| parse_syllable(p, t))
            .collect::<Result<_>>()?;
        Ok(BraidWord { syllables })
    }
}

impl FromStr for SphereSpec {
    type Err = Error;

    /// `"t2 t3^2 @1"`: whitespace-separated syllables followed by exactly one base `@<i>`.
    fn from_str(s: &str) -> Result<Self> {
        let tokens = split_tokens(s);
        let mut syllables = Vec::new();
        let mut base = None;
        for (p, tok) in tokens.iter().enumerate() {
            if let Some(digits) = tok.strip_prefix('@') {
                if base.is_some() {
                    return Err(parse_error(p, tok, "base given twice"));
                }
                base = Some(parse_index(p, tok, digits)?);
            } else if base.is_some() {
                return Err(parse_error(p, tok, "syllable after the base"));
            } else {
                syllables.push(parse_syllable(p, tok)?);
            }
        }
        let base = base.ok_or_else(|| parse_error(tokens.len(), "", "missing base @<i>"))?;
        Ok(SphereSpec {
            word: BraidWord { syllables },
            base,
        })
    }
}

/// Two spheres with `hf = 2` and a witness object separating them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatedPair {
    pub l0: SphereSpec,
    pub l1: SphereSpec,
    pub witness: SphereSpec,
    pub hf_pair: usize,
    pub hf_l0_witness: usize,
    pub hf_l1_witness: usize,
}

/// Searches for spheres `L0 = P_i`, `L1 = w P_j` with `hf(L0, L1) = target_hf`, and a
/// witness `T` among the spheres of length at most `max_len` with
/// `{hf(L0, T), hf(L1, T)} = witness_values`. Shortest words first.
pub fn search_pair(
    z: &ZigzagCat,
    max_len: usize,
    target_hf: usize,
    witness_values: (usize, usize),
) -> Result<Option<SeparatedPair>> {
    let words = BraidWord::enumerate(z.m, max_len);
    let mut spheres = Vec::new();
    for w in &words {
        for base in 1..=z.m {
            let spec = SphereSpec {
                word: w.clone(),
                base,
            };
            let obj = z.sphere(&spec)?;
            spheres.push((spec, obj));
        }
    }
    let (lo, hi) = if witness_values.0 <= witness_values.1 {
        witness_values
    } else {
        (witness_values.1, witness_values.0)
    };
    for i in 1..=z.m {
        let l0 = z.plain(i)?;
        for (s1, l1) in &spheres {
            if z.hf(&l0, l1)? != target_hf {
                continue;
            }
            for (st, t) in &spheres {
                let a = z.hf(&l0, t)?;
                let b = z.hf(l1, t)?;
                if (a.min(b), a.max(b)) == (lo, hi) {
                    return Ok(Some(SeparatedPair {
                        l0: SphereSpec::plain(i),
                        l1: s1.clone(),
                        witness: st.clone(),
                        hf_pair: target_hf,
                        hf_l0_witness: a,
                        hf_l1_witness: b,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Random braid words for tests and sweeps.
pub mod random {
    use super::BraidWord;
    use rand::Rng;

    /// A word of length at most `max_len` with adjacent syllables on distinct generators.
    pub fn word<R: Rng>(rng: &mut R, m: usize, max_len: usize) -> BraidWord {
        let len = rng.gen_range(0..=max_len);
        let mut syllables: Vec<(usize, i64)> = Vec::new();
        for _ in 0..len {
            let g = rng.gen_range(1..=m);
            let e: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            match syllables.last_mut() {
                Some(last) if last.0 == g && last.1.signum() == e => last.1 += e,
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        syllables.pop();
                    }
                }
                _ => syllables.push((g, e)),
            }
        }
        BraidWord { syllables }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amod::classify;
    use crate::f2lin::Barcode;

    #[test]
    fn small_categories() {
        let z1 = zigzag(1).unwrap();
        assert_eq!(z1.category().hom_dim(0, 0), 2);
        let z2 = zigzag(2).unwrap();
        assert_eq!(z2.category().hom_dim(0, 1), 1);
        let z3 = zigzag(3).unwrap();
        assert_eq!(z3.category().hom_dim(0, 2), 0);
        assert!(zigzag(0).is_err());
    }

    #[test]
    fn plain_hf_table() {
        let z = zigzag(4).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                let h = z.hf(&z.plain(i).unwrap(), &z.plain(j).unwrap()).unwrap();
                let want = match i.abs_diff(j) {
                    0 => 2,
                    1 => 1,
                    _ => 0,
                };
                assert_eq!(h, want, "hf(P{i}, P{j})");
            }
        }
    }

    #[test]
    fn parsing() {
        let s: SphereSpec = "t2 t3^2 t2^-1 @1".parse().unwrap();
        assert_eq!(s.word.syllables, vec![(2, 1), (3, 2), (2, -1)]);
        assert_eq!(s.base, 1);
        assert_eq!(s.word.length(), 4);
        let s: SphereSpec = "t2@3".parse().unwrap();
        assert_eq!((s.word.syllables.clone(), s.base), (vec![(2, 1)], 3));
        assert_eq!(s.to_string().parse::<SphereSpec>().unwrap(), s);
        match "t2 x3 @1".parse::<SphereSpec>() {
            Err(Error::Parse { position, token, .. }) => {
                assert_eq!((position, token.as_str()), (1, "x3"));
            }
            other => panic!("{other:?}"),
        }
        assert!("t2^0 @1".parse::<SphereSpec>().is_err());
        assert!("t2".parse::<SphereSpec>().is_err());
        assert!("@1 @2".parse::<SphereSpec>().is_err());
        assert!("t0 @1".parse::<SphereSpec>().is_err());
    }

    #[test]
    fn single_twist_is_two_term() {
        let z = zigzag(2).unwrap();
        let x = z.sphere(&"t2 @1".parse().unwrap()).unwrap();
        assert_eq!(x.copies(), &[1, 0]);
        assert_eq!(x.delta().len(), 1);
        let p1 = z.sphere(&"@1".parse().unwrap()).unwrap();
        assert_eq!(p1.copies(), &[0]);
    }

    #[test]
    fn a3_example() {
        let z = zigzag(3).unwrap();
        let x = z.sphere(&"t2 t3^2 t2^2 t3^2 t2 @1".parse().unwrap()).unwrap();
        assert_eq!(z.hf(&z.plain(1).unwrap(), &x).unwrap(), 4);
    }

    #[test]
    fn self_module_is_a() {
        let z = zigzag(2).unwrap();
        let p1 = z.plain(1).unwrap();
        let m = z.hom_module_right(1, &p1).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(classify(&m).unwrap(), Barcode::new(0, vec![1]));
        let m = z.hom_module_right(1, &z.plain(2).unwrap()).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(classify(&m).unwrap(), Barcode::new(1, vec![]));
    }

    #[test]
    fn twists_preserve_hf_between_spheres() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in 1..=3 {
            let z = zigzag(m).unwrap();
            for _ in 0..6 {
                let w = random::word(&mut rng, m, 4);
                for i in 1..=m {
                    for j in 1..=m {
                        let xi = z.apply(&w, &z.plain(i).unwrap()).unwrap();
                        let xj = z.apply(&w, &z.plain(j).unwrap()).unwrap();
                        let plain = z.hf(&z.plain(i).unwrap(), &z.plain(j).unwrap()).unwrap();
                        assert_eq!(z.hf(&xi, &xj).unwrap(), plain, "{w} on P{i}, P{j}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let words = BraidWord::enumerate(2, 2);
        // identity; t1^±1, t2^±1; t1^±2, t2^±2; four sign choices for t1 t2 and t2 t1
        assert_eq!(words.len(), 1 + 4 + 4 + 8);
        assert!(words.windows(2).all(|w| w[0].length() <= w[1].length()));
    }
}
