use std::collections::{BTreeMap, VecDeque};

use super::category::{ones, AInfCategory};
use super::object::{same_category, validate_mc, Components, TwObject};
use crate::error::{Error, Result};
use crate::f2lin::{BitVec, EchelonBasis};

/// Cancels invertible connection components between copies of the same object
/// until none is left. Only available over dg categories.
pub fn reduce(cat: &AInfCategory, x: &TwObject) -> Result<TwObject> {
    same_category(cat, &[x])?;
    if !cat.is_dg() {
        return Err(Error::Unsupported(
            "reduction needs a category without higher products".into(),
        ));
    }
    let mut copies: Vec<Option<usize>> = x.copies().iter().map(|&o| Some(o)).collect();
    let mut delta = x.delta().clone();
    while let Some((s, t, inv)) = find_pivot(cat, &copies, &delta) {
        let os = copies[s].unwrap();
        let into_t: Vec<(usize, u64)> = delta
            .iter()
            .filter(|(&(a, b), _)| b == t && a != s)
            .map(|(&(a, _), &m)| (a, m))
            .collect();
        let from_s: Vec<(usize, u64)> = delta
            .iter()
            .filter(|(&(a, b), _)| a == s && b != t)
            .map(|(&(_, b), &m)| (b, m))
            .collect();
        for &(a, at) in &into_t {
            let oa = copies[a].unwrap();
            let back = cat.mu2(oa, os, os, inv, at);
            if back == 0 {
                continue;
            }
            for &(b, sb) in &from_s {
                let ob = copies[b].unwrap();
                let v = cat.mu2(oa, os, ob, sb, back);
                if v != 0 {
                    *delta.entry((a, b)).or_insert(0) ^= v;
                }
            }
        }
        delta.retain(|&(a, b), m| *m != 0 && a != s && a != t && b != s && b != t);
        copies[s] = None;
        copies[t] = None;
    }
    let kept: Vec<usize> = (0..copies.len()).filter(|&i| copies[i].is_some()).collect();
    let mut new_index = vec![usize::MAX; copies.len()];
    for (n, &i) in kept.iter().enumerate() {
        new_index[i] = n;
    }
    let new_copies = kept.iter().map(|&i| copies[i].unwrap()).collect();
    let new_delta = delta
        .into_iter()
        .map(|((a, b), m)| ((new_index[a], new_index[b]), m))
        .collect();
    let y = TwObject::from_parts(cat, new_copies, new_delta)?;
    let bad = validate_mc(cat, &y);
    if !bad.is_empty() {
        return Err(Error::Invariant(format!("reduction broke the connection: {}", bad[0])));
    }
    Ok(y)
}

fn find_pivot(
    cat: &AInfCategory,
    copies: &[Option<usize>],
    delta: &Components,
) -> Option<(usize, usize, u64)> {
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in delta.keys() {
        succ.entry(a).or_default().push(b);
    }
    for (&(s, t), &phi) in delta {
        let (Some(os), Some(ot)) = (copies[s], copies[t]) else {
            continue;
        };
        if os != ot {
            continue;
        }
        let Some(inv) = cat.inverse(os, phi) else {
            continue;
        };
        if !reaches_indirectly(&succ, s, t) {
            return Some((s, t, inv));
        }
    }
    None
}

fn reaches_indirectly(succ: &BTreeMap<usize, Vec<usize>>, s: usize, t: usize) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    let mut queue: VecDeque<usize> = succ
        .get(&s)
        .into_iter()
        .flatten()
        .copied()
        .filter(|&b| b != t)
        .collect();
    while let Some(c) = queue.pop_front() {
        if c == t {
            return true;
        }
        if !seen.insert(c) {
            continue;
        }
        if let Some(next) = succ.get(&c) {
            queue.extend(next.iter().copied());
        }
    }
    false
}

/// A sub-object given, for each object of the category, by vectors over the
/// copies of a twisted complex. Every vector involves only copies of its object.
#[derive(Clone, Debug, Default)]
pub struct Subcomplex {
    pub parts: Vec<(usize, Vec<BitVec>)>,
}

impl Subcomplex {
    /// The smallest sub-object containing the given copies and closed under the connection.
    pub fn generated_by(cat: &AInfCategory, x: &TwObject, copies: &[usize]) -> Result<Self> {
        same_category(cat, &[x])?;
        let n = x.len();
        let mut bases: BTreeMap<usize, EchelonBasis> = BTreeMap::new();
        let mut queue: VecDeque<(usize, BitVec)> = VecDeque::new();
        for &c in copies {
            if c >= n {
                return Err(Error::InvalidArgument(format!("copy {c} out of range")));
            }
            queue.push_back((x.copies()[c], BitVec::unit(n, c)));
        }
        let outs = x.out_lists();
        let mut parts: BTreeMap<usize, Vec<BitVec>> = BTreeMap::new();
        while let Some((o, v)) = queue.pop_front() {
            let basis = bases.entry(o).or_insert_with(|| EchelonBasis::new(n, 0));
            if !basis.insert(&v) {
                continue;
            }
            parts.entry(o).or_default().push(v.clone());
            for (o2, w) in coefficient_vectors(x, &outs, &v) {
                queue.push_back((o2, w));
            }
        }
        Ok(Subcomplex {
            parts: parts.into_iter().collect(),
        })
    }
}

/// The image of `v` under the connection, split by target object and basis element.
fn coefficient_vectors(x: &TwObject, outs: &[Vec<(usize, u64)>], v: &BitVec) -> Vec<(usize, BitVec)> {
    let n = x.len();
    let mut acc: BTreeMap<(usize, usize), BitVec> = BTreeMap::new();
    for s in v.ones() {
        for &(t, m) in &outs[s] {
            let ot = x.copies()[t];
            for b in ones(m) {
                acc.entry((ot, b)).or_insert_with(|| BitVec::zeros(n)).flip(t);
            }
        }
    }
    acc.into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|((ot, _), w)| (ot, w))
        .collect()
}

/// `X / W` for a sub-object `W` closed under the connection. Returns the quotient
/// and, for each of its copies, the index of the copy of `X` it comes from.
pub fn quotient(cat: &AInfCategory, x: &TwObject, sub: &Subcomplex) -> Result<(TwObject, Vec<usize>)> {
    same_category(cat, &[x])?;
    let n = x.len();
    let mut bases: BTreeMap<usize, EchelonBasis> = BTreeMap::new();
    for (o, vecs) in &sub.parts {
        let basis = bases.entry(*o).or_insert_with(|| EchelonBasis::new(n, 0));
        for v in vecs {
            if v.len() != n {
                return Err(Error::Dimension(format!(
                    "subcomplex vector of length {} for {n} copies",
                    v.len()
                )));
            }
            if v.ones().any(|c| x.copies()[c] != *o) {
                return Err(Error::Validation(format!(
                    "subcomplex vector for object {o} involves other objects"
                )));
            }
            basis.insert(v);
        }
    }
    let outs = x.out_lists();
    for (_, vecs) in &sub.parts {
        for v in vecs {
            for (o2, w) in coefficient_vectors(x, &outs, v) {
                let inside = bases.get(&o2).map(|b| b.contains(&w)).unwrap_or(false);
                if !inside {
                    return Err(Error::Validation(
                        "subcomplex is not closed under the connection".into(),
                    ));
                }
            }
        }
    }
    let mut pivot = vec![false; n];
    for b in bases.values() {
        for p in b.pivot_positions() {
            pivot[p] = true;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !pivot[i]).collect();
    let mut new_index = vec![usize::MAX; n];
    for (k, &i) in kept.iter().enumerate() {
        new_index[i] = k;
    }
    // residue of each copy modulo W, on kept positions only
    let residue: Vec<BitVec> = (0..n)
        .map(|t| {
            let e = BitVec::unit(n, t);
            match bases.get(&x.copies()[t]) {
                Some(b) => b.reduce_full(&e),
                None => e,
            }
        })
        .collect();
    let mut delta = Components::new();
    for &s in &kept {
        for &(t, m) in &outs[s] {
            for u in residue[t].ones() {
                *delta.entry((new_index[s], new_index[u])).or_insert(0) ^= m;
            }
        }
    }
    delta.retain(|_, m| *m != 0);
    let copies = kept.iter().map(|&i| x.copies()[i]).collect();
    let q = TwObject::from_parts(cat, copies, delta)?;
    let bad = validate_mc(cat, &q);
    if !bad.is_empty() {
        return Err(Error::Invariant(format!("quotient connection: {}", bad[0])));
    }
    Ok((q, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tw::{cone, hf, twist, TwMorphism};
    use crate::zigzag::{random, zigzag};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sum(x: &TwObject, y: &TwObject) -> TwMorphism {
        TwMorphism {
            source: x.clone(),
            target: y.clone(),
            components: Components::new(),
        }
    }

    #[test]
    fn acyclic_summands_cancel() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        let x = z.sphere(&"t1 t2^-2 @3".parse().unwrap()).unwrap();
        let y = z.sphere(&"t3 @2".parse().unwrap()).unwrap();
        let acyclic = cone(c, &y.identity(c)).unwrap();
        let both = cone(c, &sum(&x, &acyclic)).unwrap();
        assert_eq!(reduce(c, &both).unwrap(), reduce(c, &x).unwrap());
    }

    #[test]
    fn self_twist_is_plain() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        for i in 0..3 {
            let p = TwObject::plain(c, i).unwrap();
            assert_eq!(reduce(c, &twist(c, &p, &p).unwrap()).unwrap(), p);
        }
    }

    #[test]
    fn reduce_keeps_hf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = zigzag(3).unwrap();
        let c = z.category();
        for _ in 0..20 {
            let w = random::word(&mut rng, 3, 3);
            let p = TwObject::plain(c, rng.gen_range(0..3)).unwrap();
            let x = z.apply(&w, &p).unwrap();
            let l = TwObject::plain(c, rng.gen_range(0..3)).unwrap();
            let raw = twist(c, &l, &x).unwrap();
            let red = reduce(c, &raw).unwrap();
            for j in 0..3 {
                let pj = TwObject::plain(c, j).unwrap();
                assert_eq!(hf(c, &pj, &raw).unwrap(), hf(c, &pj, &red).unwrap());
                assert_eq!(hf(c, &raw, &pj).unwrap(), hf(c, &red, &pj).unwrap());
            }
        }
    }

    #[test]
    fn higher_categories_are_unsupported() {
        let mut c3 = AInfCategory::new(vec![vec![3]], vec![0]).unwrap();
        c3.set_higher(&[0, 0, 0, 0], &[1, 1, 1], 0b100).unwrap();
        let x = TwObject::plain(&c3, 0).unwrap();
        assert!(matches!(reduce(&c3, &x), Err(Error::Unsupported(_))));
    }

    #[test]
    fn quotient_checks_closure() {
        let z = zigzag(2).unwrap();
        let c = z.category();
        // P2 -> P1 via a; the P1 copy is a subcomplex, the P2 copy is not
        let x = z.sphere(&"t2 @1".parse().unwrap()).unwrap();
        let bad = Subcomplex {
            parts: vec![(1, vec![BitVec::unit(2, 0)])],
        };
        assert!(matches!(quotient(c, &x, &bad), Err(Error::Validation(_))));
        let good = Subcomplex {
            parts: vec![(0, vec![BitVec::unit(2, 1)])],
        };
        let (q, kept) = quotient(c, &x, &good).unwrap();
        assert_eq!(q, TwObject::plain(c, 1).unwrap());
        assert_eq!(kept, vec![0]);
    }

    #[test]
    fn quotient_by_acyclic_piece_keeps_hf() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        let x = z.sphere(&"t2 t3 @1".parse().unwrap()).unwrap();
        let acyclic = cone(c, &x.identity(c)).unwrap();
        let both = cone(c, &sum(&x, &acyclic)).unwrap();
        let n = x.len();
        // the target half of cone(id) is a subcomplex; dividing it out leaves x plus x
        let sub = Subcomplex::generated_by(c, &both, &(2 * n..3 * n).collect::<Vec<_>>()).unwrap();
        let (q, _) = quotient(c, &both, &sub).unwrap();
        assert_eq!(q.len(), 2 * n);
        let sub = Subcomplex::generated_by(c, &both, &(n..2 * n).collect::<Vec<_>>()).unwrap();
        let (q, _) = quotient(c, &both, &sub).unwrap();
        for j in 0..3 {
            let pj = TwObject::plain(c, j).unwrap();
            assert_eq!(hf(c, &pj, &q).unwrap(), hf(c, &pj, &x).unwrap());
        }
    }
}
