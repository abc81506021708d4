//! Distinguishing pairs of spheres and certifying that words in their twists act nontrivially.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2lin::BitVec;
use crate::tw::{self, h_product, TwObject};
use crate::zigzag::{SphereSpec, ZigzagCat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsoVerdict {
    Distinct,
    Indistinguishable,
}

/// One reason two objects cannot be isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// `hf(A, T) != hf(B, T)`.
    Witness {
        witness: String,
        hf_a: usize,
        hf_b: usize,
    },
    /// `H(B, A) x H(A, B) -> H(A, A)` (or the other way round) misses the unit.
    ProductNotSurjective {
        onto: String,
        image_rank: usize,
        target_rank: usize,
    },
    /// The nilpotent class of `H(A, A)` acts by zero on `H(A, B)`.
    ZeroEpsilonAction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertySReport {
    pub a: String,
    pub b: String,
    pub hf: usize,
    pub verdict: IsoVerdict,
    pub evidence: Vec<Evidence>,
    pub failed_criteria: Vec<String>,
    pub holds: bool,
}

/// `P_1, ..., P_m` followed by both spheres.
pub fn default_witnesses(z: &ZigzagCat, a: &SphereSpec, b: &SphereSpec) -> Vec<SphereSpec> {
    let mut w: Vec<SphereSpec> = (1..=z.m()).map(SphereSpec::plain).collect();
    w.push(a.clone());
    w.push(b.clone());
    w
}

pub fn property_s(
    z: &ZigzagCat,
    a: &SphereSpec,
    b: &SphereSpec,
    witnesses: &[SphereSpec],
) -> Result<PropertySReport> {
    let oa = z.sphere(a)?;
    let ob = z.sphere(b)?;
    let c = z.category();
    let hf = z.hf(&oa, &ob)?;
    let mut evidence = Vec::new();
    let mut failed = Vec::new();
    for w in witnesses {
        let t = z.sphere(w)?;
        let (hf_a, hf_b) = (z.hf(&oa, &t)?, z.hf(&ob, &t)?);
        if hf_a != hf_b {
            evidence.push(Evidence::Witness {
                witness: w.to_string(),
                hf_a,
                hf_b,
            });
        }
    }
    if evidence.is_empty() {
        failed.push("hf fingerprint".to_string());
    }
    let mut surjective = true;
    for (x, y, name) in [(&oa, &ob, a), (&ob, &oa, b)] {
        let p = h_product(c, x, y, x)?;
        if !p.is_surjective() {
            surjective = false;
            evidence.push(Evidence::ProductNotSurjective {
                onto: format!("H({name}, {name})"),
                image_rank: p.image_rank(),
                target_rank: p.xz.rank(),
            });
        }
    }
    if surjective {
        failed.push("product surjectivity".to_string());
    }
    if epsilon_action_is_zero(z, &oa, &ob)? {
        evidence.push(Evidence::ZeroEpsilonAction);
    } else {
        failed.push("epsilon action".to_string());
    }
    let verdict = if evidence.is_empty() {
        IsoVerdict::Indistinguishable
    } else {
        IsoVerdict::Distinct
    };
    Ok(PropertySReport {
        a: a.to_string(),
        b: b.to_string(),
        hf,
        verdict,
        evidence,
        failed_criteria: failed,
        holds: hf >= 2 && verdict == IsoVerdict::Distinct,
    })
}

/// Whether the nonzero square-zero class of `H(A, A)` composes to zero with all of `H(A, B)`.
/// Returns false when `H(A, A)` has no such unique class.
fn epsilon_action_is_zero(z: &ZigzagCat, a: &TwObject, b: &TwObject) -> Result<bool> {
    let c = z.category();
    let end = h_product(c, a, a, a)?;
    let r = end.xy.rank();
    if r != 2 {
        return Ok(false);
    }
    let mut nilpotent = Vec::new();
    for bits in 1u32..(1 << r) {
        let v = BitVec::from_bools(&(0..r).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
        if combine(&end.table, &v, &v, r).is_zero() {
            nilpotent.push(v);
        }
    }
    if nilpotent.len() != 1 {
        return Ok(false);
    }
    let eps = &nilpotent[0];
    let act = h_product(c, a, a, b)?;
    for row in &act.table {
        let mut acc = BitVec::zeros(act.xz.rank());
        for j in eps.ones() {
            acc.xor_assign(&row[j]);
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `u * v` in a product table with rows indexed by the left factor.
fn combine(table: &[Vec<BitVec>], u: &BitVec, v: &BitVec, out: usize) -> BitVec {
    let mut acc = BitVec::zeros(out);
    for i in u.ones() {
        for j in v.ones() {
            acc.xor_assign(&table[i][j]);
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    L,
    Lp,
}

impl Gen {
    fn other(self) -> Gen {
        match self {
            Gen::L => Gen::Lp,
            Gen::Lp => Gen::L,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::L => "L",
            Gen::Lp => "Lp",
        })
    }
}

/// A word in the twists about `L` and `L'`, applied right to left.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    pub syllables: Vec<(Gen, i64)>,
}

impl FreeWord {
    /// Merges adjacent syllables on the same generator and drops zero exponents.
    pub fn normalized(&self) -> FreeWord {
        let mut out: Vec<(Gen, i64)> = Vec::new();
        for &(g, e) in &self.syllables {
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ if e != 0 => out.push((g, e)),
                _ => {}
            }
        }
        FreeWord { syllables: out }
    }

    pub fn length(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Every reduced word with `length() <= max_len`, shortest first.
    pub fn enumerate(max_len: usize) -> Vec<FreeWord> {
        let mut by_len: Vec<Vec<FreeWord>> = vec![vec![FreeWord::default()]];
        for len in 1..=max_len {
            let mut words = Vec::new();
            for e in 1..=len {
                for shorter in &by_len[len - e] {
                    let gens = match shorter.syllables.first() {
                        Some(&(g, _)) => vec![g.other()],
                        None => vec![Gen::L, Gen::Lp],
                    };
                    for g in gens {
                        for sign in [1i64, -1] {
                            let mut s = vec![(g, sign * e as i64)];
                            s.extend_from_slice(&shorter.syllables);
                            words.push(FreeWord { syllables: s });
                        }
                    }
                }
            }
            by_len.push(words);
        }
        by_len.into_iter().flatten().collect()
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(g, e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    /// Whitespace-separated tokens `L`, `Lp`, `L^<e>` or `Lp^<e>`.
    fn from_str(s: &str) -> Result<Self> {
        let mut syllables = Vec::new();
        for (position, token) in s.split_whitespace().enumerate() {
            let err = |message: &str| Error::Parse {
                position,
                token: token.to_string(),
                message: message.to_string(),
            };
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| err("exponent is not an integer"))?),
                None => (token, 1),
            };
            let g = match name {
                "L" => Gen::L,
                "Lp" => Gen::Lp,
                _ => return Err(err("expected L or Lp")),
            };
            syllables.push((g, exp));
        }
        Ok(FreeWord { syllables })
    }
}

/// `hfL < hfLp` or `hfLp < hfL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inequality {
    #[serde(rename = "hfL<hfLp")]
    LBelowLp,
    #[serde(rename = "hfLp<hfL")]
    LpBelowL,
}

impl Inequality {
    pub fn holds(self, hf_l: usize, hf_lp: usize) -> bool {
        match self {
            Inequality::LBelowLp => hf_l < hf_lp,
            Inequality::LpBelowL => hf_lp < hf_l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub prefix: String,
    #[serde(rename = "hfL")]
    pub hf_l: usize,
    #[serde(rename = "hfLp")]
    pub hf_lp: usize,
    pub predicted: Option<Inequality>,
    pub observed: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordVerdict {
    Identity,
    Nontrivial,
    Undetermined,
}

/// An object whose fingerprint the word changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NontrivialityWitness {
    pub object: String,
    pub before: Vec<usize>,
    pub after: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessTrace {
    pub word: String,
    pub trace: Vec<TraceRecord>,
    pub predictions_hold: bool,
    pub witness: Option<NontrivialityWitness>,
    pub verdict: WordVerdict,
}

/// Applies a word in the twists about `l` and `lp` to `x`, reducing after each twist.
pub fn apply_free_word(
    z: &ZigzagCat,
    l: &TwObject,
    lp: &TwObject,
    word: &FreeWord,
    x: &TwObject,
) -> Result<TwObject> {
    let mut cur = x.clone();
    for &(g, e) in word.syllables.iter().rev() {
        cur = twist_power(z, if g == Gen::L { l } else { lp }, e, &cur)?;
    }
    Ok(cur)
}

/// `tau_S^e (X)` for a spherical object `S`, reduced after each step.
pub fn twist_power(z: &ZigzagCat, s: &TwObject, e: i64, x: &TwObject) -> Result<TwObject> {
    let c = z.category();
    let mut cur = x.clone();
    for _ in 0..e.unsigned_abs() {
        let next = if e > 0 {
            tw::twist(c, s, &cur)?
        } else {
            tw::untwist(c, s, &cur)?
        };
        cur = tw::reduce(c, &next)?;
    }
    Ok(cur)
}

/// Runs the prefix chain of `word` on `L` and looks for a fingerprint the word changes.
pub fn certify_word(
    z: &ZigzagCat,
    l: &SphereSpec,
    lp: &SphereSpec,
    word: &FreeWord,
) -> Result<FreenessTrace> {
    let report = property_s(z, l, lp, &default_witnesses(z, l, lp))?;
    if !report.holds {
        return Err(Error::Validation(format!(
            "property S fails for ({l}, {lp}): hf = {}, verdict {:?}",
            report.hf, report.verdict
        )));
    }
    let word = word.normalized();
    if word.syllables.is_empty() {
        return Ok(FreenessTrace {
            word: String::new(),
            trace: Vec::new(),
            predictions_hold: true,
            witness: None,
            verdict: WordVerdict::Identity,
        });
    }
    let ol = z.sphere(l)?;
    let olp = z.sphere(lp)?;
    let hf0 = report.hf;
    let mut trace = Vec::new();
    let mut cur = ol.clone();
    let n = word.syllables.len();
    for k in 0..n {
        let (g, e) = word.syllables[n - 1 - k];
        cur = twist_power(z, if g == Gen::L { &ol } else { &olp }, e, &cur)?;
        let predicted = match g {
            // the first syllable fixes L; the inequality is strict only when hf > 2
            Gen::L if k == 0 => (hf0 > 2).then_some(Inequality::LBelowLp),
            Gen::L => Some(Inequality::LBelowLp),
            Gen::Lp => Some(Inequality::LpBelowL),
        };
        let hf_l = z.hf(&ol, &cur)?;
        let hf_lp = z.hf(&olp, &cur)?;
        trace.push(TraceRecord {
            prefix: FreeWord {
                syllables: word.syllables[n - 1 - k..].to_vec(),
            }
            .to_string(),
            hf_l,
            hf_lp,
            predicted,
            observed: predicted.map(|p| p.holds(hf_l, hf_lp)),
        });
    }
    let predictions_hold = trace.iter().all(|r| r.observed != Some(false));
    let mut candidates = vec![(l.to_string(), ol.clone()), (lp.to_string(), olp.clone())];
    for j in 1..=z.m() {
        candidates.push((format!("@{j}"), z.plain(j)?));
    }
    let mut witness = None;
    for (name, obj) in candidates {
        let image = apply_free_word(z, &ol, &olp, &word, &obj)?;
        let before = z.fingerprint(&obj)?;
        let after = z.fingerprint(&image)?;
        if before != after {
            witness = Some(NontrivialityWitness {
                object: name,
                before,
                after,
            });
            break;
        }
    }
    let verdict = if witness.is_some() {
        WordVerdict::Nontrivial
    } else {
        WordVerdict::Undetermined
    };
    Ok(FreenessTrace {
        word: word.to_string(),
        trace,
        predictions_hold,
        witness,
        verdict,
    })
}
