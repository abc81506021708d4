use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::category::{ones, AInfCategory};
use crate::error::{Error, Result};
use crate::f2lin::{BitVec, Cohomology, F2Matrix};

/// Components of a map between expanded twisted complexes: `(source copy, target copy)`
/// to an element of the hom space between the underlying objects.
pub type Components = BTreeMap<(usize, usize), u64>;

/// A one-sided twisted complex, stored with one copy per multiplicity.
///
/// `copies[c]` is the underlying object of copy `c`; `delta[(c, c')]` is the
/// connection component from copy `c` to copy `c'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwObject {
    cat_id: u64,
    copies: Vec<usize>,
    delta: Components,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwMorphism {
    pub source: TwObject,
    pub target: TwObject,
    pub components: Components,
}

impl TwObject {
    pub fn plain(cat: &AInfCategory, obj: usize) -> Result<Self> {
        if obj >= cat.num_objects() {
            return Err(Error::InvalidArgument(format!("object {obj} out of range")));
        }
        Ok(TwObject {
            cat_id: cat.id(),
            copies: vec![obj],
            delta: Components::new(),
        })
    }

    pub fn zero(cat: &AInfCategory) -> Self {
        TwObject {
            cat_id: cat.id(),
            copies: Vec::new(),
            delta: Components::new(),
        }
    }

    /// Checks shapes only; see [`validate_mc`] for the twisted complex axioms.
    pub fn from_parts(cat: &AInfCategory, copies: Vec<usize>, delta: Components) -> Result<Self> {
        if let Some(&o) = copies.iter().find(|&&o| o >= cat.num_objects()) {
            return Err(Error::InvalidArgument(format!("object {o} out of range")));
        }
        let mut clean = Components::new();
        for (&(s, t), &m) in &delta {
            if s >= copies.len() || t >= copies.len() {
                return Err(Error::InvalidArgument(format!("connection ({s},{t}) out of range")));
            }
            let d = cat.hom_dim(copies[s], copies[t]);
            if d < 64 && m >> d != 0 {
                return Err(Error::InvalidArgument(format!(
                    "connection ({s},{t}) is not an element of a {d}-dimensional hom space"
                )));
            }
            if m != 0 {
                clean.insert((s, t), m);
            }
        }
        Ok(TwObject {
            cat_id: cat.id(),
            copies,
            delta: clean,
        })
    }

    /// Shape checks plus the filtration and Maurer-Cartan conditions.
    pub fn new(cat: &AInfCategory, copies: Vec<usize>, delta: Components) -> Result<Self> {
        let x = Self::from_parts(cat, copies, delta)?;
        let v = validate_mc(cat, &x);
        if v.is_empty() {
            Ok(x)
        } else {
            Err(Error::Validation(v.join("; ")))
        }
    }

    pub fn copies(&self) -> &[usize] {
        &self.copies
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn delta(&self) -> &Components {
        &self.delta
    }


    /// Number of copies of each object.
    pub fn multiplicities(&self, num_objects: usize) -> Vec<usize> {
        let mut m = vec![0; num_objects];
        for &o in &self.copies {
            m[o] += 1;
        }
        m
    }

    pub(crate) fn out_lists(&self) -> Vec<Vec<(usize, u64)>> {
        let mut out = vec![Vec::new(); self.len()];
        for (&(s, t), &m) in &self.delta {
            out[s].push((t, m));
        }
        out
    }

    pub(crate) fn in_lists(&self) -> Vec<Vec<(usize, u64)>> {
        let mut inn = vec![Vec::new(); self.len()];
        for (&(s, t), &m) in &self.delta {
            inn[t].push((s, m));
        }
        inn
    }

    /// Identity endomorphism: the unit on every copy.
    pub fn identity(&self, cat: &AInfCategory) -> TwMorphism {
        let comps = self
            .copies
            .iter()
            .enumerate()
            .map(|(c, &o)| ((c, c), cat.unit(o)))
            .collect();
        TwMorphism {
            source: self.clone(),
            target: self.clone(),
            components: comps,
        }
    }

    pub fn to_spec(&self) -> TwObjectSpec {
        TwObjectSpec {
            copies: self.copies.clone(),
            delta: self
                .delta
                .iter()
                .map(|(&(s, t), &m)| DeltaEntry {
                    from: s,
                    to: t,
                    component: ones(m).collect(),
                })
                .collect(),
        }
    }

    pub fn from_spec(cat: &AInfCategory, spec: &TwObjectSpec) -> Result<Self> {
        let mut delta = Components::new();
        for e in &spec.delta {
            let mut m = 0u64;
            for &b in &e.component {
                if b >= 64 {
                    return Err(Error::InvalidArgument(format!("basis index {b} too large")));
                }
                m ^= 1 << b;
            }
            *delta.entry((e.from, e.to)).or_insert(0) ^= m;
        }
        Self::new(cat, spec.copies.clone(), delta)
    }
}

/// JSON form of a twisted complex: the object of every copy and the
/// connection components as lists of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwObjectSpec {
    pub copies: Vec<usize>,
    pub delta: Vec<DeltaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub from: usize,
    pub to: usize,
    pub component: Vec<usize>,
}

pub(crate) fn same_category(cat: &AInfCategory, objs: &[&TwObject]) -> Result<()> {
    if objs.iter().all(|x| x.cat_id == cat.id()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("twisted complexes over different categories".into()))
    }
}

/// Filtration and Maurer-Cartan violations of `x`.
pub fn validate_mc(cat: &AInfCategory, x: &TwObject) -> Vec<String> {
    let mut out = Vec::new();
    if x.cat_id != cat.id() {
        out.push("object was built over a different category".into());
        return out;
    }
    for &(s, t) in x.delta.keys() {
        if s == t {
            out.push(format!("connection has a diagonal component on copy {s}"));
        }
    }
    if out.is_empty() && has_cycle(x) {
        out.push("connection support is not nilpotent".into());
    }
    if !out.is_empty() {
        return out;
    }
    let mc = mu_tw(cat, &[x], &[]);
    for ((s, t), m) in mc {
        out.push(format!("Maurer-Cartan equation fails on component ({s},{t}): {m:#b}"));
    }
    out
}

fn has_cycle(x: &TwObject) -> bool {
    let out = x.out_lists();
    // 0 = unseen, 1 = on stack, 2 = done
    let mut state = vec![0u8; x.len()];
    for root in 0..x.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < out[v].len() {
                let w = out[v][*i].0;
                *i += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// Deformed composition in the category of twisted complexes:
/// `mu^d(a_d, ..., a_1)` with every admissible insertion of connections.
///
/// `objs` has `args.len() + 1` entries, `args[k]` maps `objs[k]` to
/// `objs[k + 1]`. With no arguments this is the Maurer-Cartan expression
/// `sum_r mu^r(delta, ..., delta)` of `objs[0]`.
pub fn mu_tw(cat: &AInfCategory, objs: &[&TwObject], args: &[&Components]) -> Components {
    assert_eq!(objs.len(), args.len() + 1);
    let d = args.len();
    let budget = cat.d_max().saturating_sub(d);
    let outs: Vec<Vec<Vec<(usize, u64)>>> = objs.iter().map(|x| x.out_lists()).collect();
    let arg_out: Vec<Vec<Vec<(usize, u64)>>> = args
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let mut v = vec![Vec::new(); objs[k].len()];
            for (&(s, t), &m) in a.iter() {
                if m != 0 {
                    v[s].push((t, m));
                }
            }
            v
        })
        .collect();
    let mut walk = Walk {
        cat,
        objs,
        outs: &outs,
        arg_out: &arg_out,
        d,
        chain_objs: Vec::new(),
        chain_masks: Vec::new(),
        result: Components::new(),
    };
    if d == 0 {
        for c in 0..objs[0].len() {
            walk.chain_objs.push(objs[0].copies[c]);
            walk.extend(0, c, c, cat.d_max());
            walk.chain_objs.pop();
        }
    } else {
        // Every chain passes through a component of a_1; start from the source
        // copies that have one and allow connections before it.
        let ins = objs[0].in_lists();
        for s0 in 0..objs[0].len() {
            if arg_out[0][s0].is_empty() {
                continue;
            }
            let mut prefixes = Vec::new();
            back_chains(&ins, s0, budget, &mut Vec::new(), &mut prefixes);
            for (start, chain) in prefixes {
                walk.chain_objs.push(objs[0].copies[start]);
                for &(c, m) in &chain {
                    walk.chain_masks.push(m);
                    walk.chain_objs.push(objs[0].copies[c]);
                }
                walk.extend(0, start, s0, budget - chain.len());
                for _ in &chain {
                    walk.chain_masks.pop();
                    walk.chain_objs.pop();
                }
                walk.chain_objs.pop();
            }
        }
    }
    walk.result.retain(|_, m| *m != 0);
    walk.result
}

/// Chains of connection components ending at `end`, of length at most `budget`.
/// Each result is the start copy and the forward steps `(copy reached, component)`.
/// `acc` holds the steps found so far as `(source copy, component)`, latest first.
fn back_chains(
    ins: &[Vec<(usize, u64)>],
    end: usize,
    budget: usize,
    acc: &mut Vec<(usize, u64)>,
    out: &mut Vec<(usize, Vec<(usize, u64)>)>,
) {
    let start = acc.last().map(|&(s, _)| s).unwrap_or(end);
    out.push((start, chain_from(acc, end)));
    if budget == 0 {
        return;
    }
    for &(src, m) in &ins[start] {
        acc.push((src, m));
        back_chains(ins, end, budget - 1, acc, out);
        acc.pop();
    }
}

/// Converts backward steps `(source, component)` into forward steps `(target, component)`.
fn chain_from(acc: &[(usize, u64)], end: usize) -> Vec<(usize, u64)> {
    let mut forward = Vec::with_capacity(acc.len());
    for i in (0..acc.len()).rev() {
        let target = if i == 0 { end } else { acc[i - 1].0 };
        forward.push((target, acc[i].1));
    }
    forward
}

struct Walk<'a> {
    cat: &'a AInfCategory,
    objs: &'a [&'a TwObject],
    outs: &'a [Vec<Vec<(usize, u64)>>],
    arg_out: &'a [Vec<Vec<(usize, u64)>>],
    d: usize,
    chain_objs: Vec<usize>,
    chain_masks: Vec<u64>,
    result: Components,
}

impl Walk<'_> {
    /// At copy `cur` of `objs[level]`, having used every argument below `level`.
    fn extend(&mut self, level: usize, start: usize, cur: usize, budget: usize) {
        let arity = self.chain_masks.len();
        if level == self.d && arity >= 2 {
            let v = self.cat.mu_masks(&self.chain_objs, &self.chain_masks);
            if v != 0 {
                *self.result.entry((start, cur)).or_insert(0) ^= v;
            }
        }
        // connections before a_1 come from the backward prefix
        if budget > 0 && (self.d == 0 || level > 0) {
            for &(t, m) in &self.outs[level][cur] {
                self.chain_objs.push(self.objs[level].copies[t]);
                self.chain_masks.push(m);
                self.extend(level, start, t, budget - 1);
                self.chain_masks.pop();
                self.chain_objs.pop();
            }
        }
        if level < self.d {
            for &(t, m) in &self.arg_out[level][cur] {
                self.chain_objs.push(self.objs[level + 1].copies[t]);
                self.chain_masks.push(m);
                self.extend(level + 1, start, t, budget);
                self.chain_masks.pop();
                self.chain_objs.pop();
            }
        }
    }
}

/// Basis of `hom(X, Y)`: triples `(source copy, target copy, basis index)`,
/// ordered by source copy, then target copy, then basis index.
#[derive(Clone, Debug)]
pub struct HomBasis {
    entries: Vec<(usize, usize, usize)>,
    offsets: Vec<usize>,
    ny: usize,
}

impl HomBasis {
    pub fn new(cat: &AInfCategory, x: &TwObject, y: &TwObject) -> Self {
        let ny = y.len();
        let mut entries = Vec::new();
        let mut offsets = Vec::with_capacity(x.len() * ny + 1);
        for (s, &ox) in x.copies.iter().enumerate() {
            for (t, &oy) in y.copies.iter().enumerate() {
                offsets.push(entries.len());
                for b in 0..cat.hom_dim(ox, oy) {
                    entries.push((s, t, b));
                }
            }
        }
        offsets.push(entries.len());
        HomBasis {
            entries,
            offsets,
            ny,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> (usize, usize, usize) {
        self.entries[i]
    }

    pub fn entries(&self) -> &[(usize, usize, usize)] {
        &self.entries
    }

    pub fn index(&self, s: usize, t: usize, b: usize) -> usize {
        self.offsets[s * self.ny + t] + b
    }

    pub fn to_vector(&self, comps: &Components) -> BitVec {
        let mut v = BitVec::zeros(self.len());
        for (&(s, t), &m) in comps {
            for b in ones(m) {
                v.flip(self.index(s, t, b));
            }
        }
        v
    }

    pub fn to_components(&self, v: &BitVec) -> Components {
        let mut c = Components::new();
        for i in v.ones() {
            let (s, t, b) = self.entries[i];
            *c.entry((s, t)).or_insert(0) ^= 1 << b;
        }
        c
    }
}

/// The hom complex `hom(X, Y)` with its deformed differential.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub basis: HomBasis,
    pub differential: F2Matrix,
}

impl HomComplex {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn hom_complex(cat: &AInfCategory, x: &TwObject, y: &TwObject) -> Result<HomComplex> {
    same_category(cat, &[x, y])?;
    let basis = HomBasis::new(cat, x, y);
    let n = basis.len();
    let mut d = F2Matrix::zeros(n, n);
    for (col, &(s, t, b)) in basis.entries.iter().enumerate() {
        let mut e = Components::new();
        e.insert((s, t), 1u64 << b);
        for ((s2, t2), m) in mu_tw(cat, &[x, y], &[&e]) {
            for b2 in ones(m) {
                d.flip(basis.index(s2, t2, b2), col);
            }
        }
    }
    Ok(HomComplex {
        basis,
        differential: d,
    })
}

/// Rank of the cohomology of `hom(X, Y)`.
pub fn hf(cat: &AInfCategory, x: &TwObject, y: &TwObject) -> Result<usize> {
    let h = hom_complex(cat, x, y)?;
    let d = &h.differential;
    if !d.mul(d)?.is_zero() {
        return Err(Error::Invariant("hom differential does not square to zero".into()));
    }
    Ok(h.dim() - 2 * d.rank())
}

/// The deformed first-order differential of a morphism.
pub fn mu1(cat: &AInfCategory, f: &TwMorphism) -> Result<Components> {
    same_category(cat, &[&f.source, &f.target])?;
    Ok(mu_tw(cat, &[&f.source, &f.target], &[&f.components]))
}

pub fn is_cocycle(cat: &AInfCategory, f: &TwMorphism) -> Result<bool> {
    Ok(mu1(cat, f)?.is_empty())
}

/// Deformed composition `mu^2(b, a)`.
pub fn compose2(cat: &AInfCategory, b: &TwMorphism, a: &TwMorphism) -> Result<TwMorphism> {
    same_category(cat, &[&a.source, &a.target, &b.source, &b.target])?;
    if a.target != b.source {
        return Err(Error::InvalidArgument("morphisms are not composable".into()));
    }
    let comps = mu_tw(
        cat,
        &[&a.source, &a.target, &b.target],
        &[&a.components, &b.components],
    );
    Ok(TwMorphism {
        source: a.source.clone(),
        target: b.target.clone(),
        components: comps,
    })
}

/// Composition on cohomology, `H(Y, Z) x H(X, Y) -> H(X, Z)`, in the
/// representative bases chosen by [`Cohomology`].
#[derive(Clone, Debug)]
pub struct HProduct {
    pub xy: Cohomology,
    pub yz: Cohomology,
    pub xz: Cohomology,
    pub xy_basis: HomBasis,
    pub yz_basis: HomBasis,
    pub xz_basis: HomBasis,
    /// `table[i][j]` is the class of `mu^2(yz_i, xy_j)`.
    pub table: Vec<Vec<BitVec>>,
}

impl HProduct {
    /// Rank of the image of the product map.
    pub fn image_rank(&self) -> usize {
        let mut e = crate::f2lin::EchelonBasis::new(self.xz.rank(), 0);
        for row in &self.table {
            for v in row {
                e.insert(v);
            }
        }
        e.rank()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_rank() == self.xz.rank()
    }
}

pub fn h_product(cat: &AInfCategory, x: &TwObject, y: &TwObject, z: &TwObject) -> Result<HProduct> {
    same_category(cat, &[x, y, z])?;
    let hxy = hom_complex(cat, x, y)?;
    let hyz = hom_complex(cat, y, z)?;
    let hxz = hom_complex(cat, x, z)?;
    let cxy = Cohomology::new(&hxy.differential)?;
    let cyz = Cohomology::new(&hyz.differential)?;
    let cxz = Cohomology::new(&hxz.differential)?;
    let mut table = Vec::with_capacity(cyz.rank());
    for b in cyz.representatives() {
        let bc = hyz.basis.to_components(b);
        let mut row = Vec::with_capacity(cxy.rank());
        for a in cxy.representatives() {
            let ac = hxy.basis.to_components(a);
            let p = mu_tw(cat, &[x, y, z], &[&ac, &bc]);
            row.push(cxz.class_of(&hxz.basis.to_vector(&p))?);
        }
        table.push(row);
    }
    Ok(HProduct {
        xy: cxy,
        yz: cyz,
        xz: cxz,
        xy_basis: hxy.basis,
        yz_basis: hyz.basis,
        xz_basis: hxz.basis,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zigzag::zigzag;

    fn comps(entries: &[((usize, usize), u64)]) -> Components {
        entries.iter().copied().collect()
    }

    #[test]
    fn connection_checks() {
        let z = zigzag(2).unwrap();
        let c = z.category();
        assert!(validate_mc(c, &TwObject::from_parts(c, vec![0, 1], Components::new()).unwrap()).is_empty());
        let diag = TwObject::from_parts(c, vec![0], comps(&[((0, 0), 0b10)])).unwrap();
        assert!(validate_mc(c, &diag)[0].contains("diagonal"));
        let cyc = TwObject::from_parts(c, vec![0, 1], comps(&[((0, 1), 1), ((1, 0), 1)])).unwrap();
        assert!(validate_mc(c, &cyc)[0].contains("nilpotent"));
        // P1 -> P2 -> P1 composes to X_1, which is not zero
        let chain = TwObject::from_parts(c, vec![0, 1, 0], comps(&[((0, 1), 1), ((1, 2), 1)])).unwrap();
        assert!(validate_mc(c, &chain)[0].contains("Maurer-Cartan"));
        assert!(TwObject::new(c, vec![0, 1, 0], comps(&[((0, 1), 1), ((1, 2), 1)])).is_err());
        assert!(TwObject::from_parts(c, vec![0, 1], comps(&[((0, 1), 0b10)])).is_err());
        assert!(TwObject::from_parts(c, vec![2], Components::new()).is_err());
    }

    #[test]
    fn plain_hom_complexes() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        let p = TwObject::plain(c, 1).unwrap();
        let h = hom_complex(c, &p, &p).unwrap();
        assert_eq!(h.dim(), 2);
        assert!(h.differential.is_zero());
    }

    #[test]
    fn mixing_categories_is_rejected() {
        let a = zigzag(2).unwrap();
        let b = zigzag(3).unwrap();
        let x = TwObject::plain(a.category(), 0).unwrap();
        let y = TwObject::plain(b.category(), 0).unwrap();
        assert!(hom_complex(a.category(), &x, &y).is_err());
        assert!(!validate_mc(b.category(), &x).is_empty());
    }

    #[test]
    fn units_compose_trivially() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        let x = z.sphere(&"t2 t3 @1".parse().unwrap()).unwrap();
        let y = z.sphere(&"t1 @2".parse().unwrap()).unwrap();
        let h = hom_complex(c, &x, &y).unwrap();
        for v in h.differential.kernel_basis() {
            let a = TwMorphism { source: x.clone(), target: y.clone(), components: h.basis.to_components(&v) };
            assert!(is_cocycle(c, &a).unwrap());
            assert_eq!(compose2(c, &y.identity(c), &a).unwrap().components, a.components);
            assert_eq!(compose2(c, &a, &x.identity(c)).unwrap().components, a.components);
        }
    }

    #[test]
    fn endomorphisms_of_a_plain_object() {
        let z = zigzag(2).unwrap();
        let c = z.category();
        let p = TwObject::plain(c, 0).unwrap();
        let prod = h_product(c, &p, &p, &p).unwrap();
        assert!(prod.is_surjective());
        // representatives are the unit and X_1 in some order; X_1 squares to zero
        let reps: Vec<usize> = prod.xy.representatives().iter().map(|v| v.first_one().unwrap()).collect();
        let x = reps.iter().position(|&b| b == 1).unwrap();
        assert!(prod.table[x][x].is_zero());
        let u = 1 - x;
        assert_eq!(prod.table[u][x], prod.table[x][u]);
        assert!(!prod.table[u][u].is_zero());
    }

    #[test]
    fn hom_basis_indexing() {
        let z = zigzag(3).unwrap();
        let c = z.category();
        let x = z.sphere(&"t2 @1".parse().unwrap()).unwrap();
        let y = z.sphere(&"t2 @3".parse().unwrap()).unwrap();
        let b = HomBasis::new(c, &x, &y);
        for (i, &(s, t, k)) in b.entries().iter().enumerate() {
            assert_eq!(b.index(s, t, k), i);
        }
        let v = crate::f2lin::BitVec::from_bools(&(0..b.len()).map(|i| i % 2 == 0).collect::<Vec<_>>());
        assert_eq!(b.to_vector(&b.to_components(&v)), v);
    }
}
