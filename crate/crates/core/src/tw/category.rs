use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Largest supported hom-space dimension; elements are stored as `u64` bit masks.
pub const MAX_HOM_DIM: usize = 64;

/// A finite, minimal, strictly unital A-infinity category over Z2 given by
/// structure constants on fixed bases of its hom spaces.
///
/// Hom elements are bit masks in the basis of `hom(x, y)`. Compositions take
/// their inputs first-to-last, so `mu(&[x0, x1, x2], &[a1, a2])` is
/// `mu^2(a2, a1)` with `a1: x0 -> x1` and `a2: x1 -> x2`.
#[derive(Clone, Debug)]
pub struct AInfCategory {
    hom: Vec<Vec<usize>>,
    units: Vec<usize>,
    mu2: HashMap<(usize, usize, usize), Vec<u64>>,
    higher: BTreeMap<(Vec<usize>, Vec<usize>), u64>,
    d_max: usize,
    id: u64,
}

impl AInfCategory {
    /// `hom[x][y]` is `dim hom(x, y)`; `units[x]` is the basis index of `1_x`.
    pub fn new(hom: Vec<Vec<usize>>, units: Vec<usize>) -> Result<Self> {
        let n = hom.len();
        if hom.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("hom dimension table must be square".into()));
        }
        if units.len() != n {
            return Err(Error::Dimension("one unit per object required".into()));
        }
        for x in 0..n {
            for y in 0..n {
                if hom[x][y] > MAX_HOM_DIM {
                    return Err(Error::Unsupported(format!(
                        "hom({x},{y}) has dimension {} > {MAX_HOM_DIM}",
                        hom[x][y]
                    )));
                }
            }
            if units[x] >= hom[x][x] {
                return Err(Error::InvalidArgument(format!("unit of object {x} out of range")));
            }
        }
        let mut cat = AInfCategory {
            hom,
            units,
            mu2: HashMap::new(),
            higher: BTreeMap::new(),
            d_max: 2,
            id: 0,
        };
        for x in 0..n {
            for y in 0..n {
                for a in 0..cat.hom[x][y] {
                    cat.set_mu2_raw(x, x, y, a, cat.units[x], 1 << a);
                    cat.set_mu2_raw(x, y, y, cat.units[y], a, 1 << a);
                }
            }
        }
        cat.refresh_id();
        Ok(cat)
    }

    fn refresh_id(&mut self) {
        let mut h = DefaultHasher::new();
        self.hom.hash(&mut h);
        self.units.hash(&mut h);
        let mut keys: Vec<_> = self.mu2.iter().collect();
        keys.sort_by_key(|(k, _)| **k);
        keys.hash(&mut h);
        self.higher.hash(&mut h);
        self.d_max.hash(&mut h);
        self.id = h.finish();
    }

    fn set_mu2_raw(&mut self, x: usize, y: usize, z: usize, b: usize, a: usize, value: u64) {
        let (da, db) = (self.hom[x][y], self.hom[y][z]);
        let table = self
            .mu2
            .entry((x, y, z))
            .or_insert_with(|| vec![0; da * db]);
        table[b * da + a] = value;
    }

    /// Sets `mu^2(b, a)` for basis elements `a in hom(x, y)`, `b in hom(y, z)`.
    /// Products involving a unit are fixed by strict unitality and cannot be overridden.
    pub fn set_mu2(&mut self, x: usize, y: usize, z: usize, b: usize, a: usize, value: u64) -> Result<()> {
        self.check_obj(&[x, y, z])?;
        if a >= self.hom[x][y] || b >= self.hom[y][z] {
            return Err(Error::InvalidArgument("basis index out of range".into()));
        }
        self.check_mask(x, z, value)?;
        if (x == y && a == self.units[x]) || (y == z && b == self.units[y]) {
            return Err(Error::InvalidArgument("unit products are fixed".into()));
        }
        self.set_mu2_raw(x, y, z, b, a, value);
        self.refresh_id();
        Ok(())
    }

    /// Sets `mu^d` on basis elements, `d = args.len() >= 3`.
    pub fn set_higher(&mut self, objs: &[usize], args: &[usize], value: u64) -> Result<()> {
        let d = args.len();
        if d < 3 || objs.len() != d + 1 {
            return Err(Error::InvalidArgument("higher products need d >= 3 and d + 1 objects".into()));
        }
        self.check_obj(objs)?;
        for (k, &a) in args.iter().enumerate() {
            if a >= self.hom[objs[k]][objs[k + 1]] {
                return Err(Error::InvalidArgument("basis index out of range".into()));
            }
        }
        self.check_mask(objs[0], objs[d], value)?;
        if value == 0 {
            self.higher.remove(&(objs.to_vec(), args.to_vec()));
        } else {
            self.higher.insert((objs.to_vec(), args.to_vec()), value);
            self.d_max = self.d_max.max(d);
        }
        self.refresh_id();
        Ok(())
    }

    fn check_obj(&self, objs: &[usize]) -> Result<()> {
        match objs.iter().find(|&&o| o >= self.num_objects()) {
            Some(o) => Err(Error::InvalidArgument(format!("object {o} out of range"))),
            None => Ok(()),
        }
    }

    fn check_mask(&self, x: usize, y: usize, mask: u64) -> Result<()> {
        let d = self.hom[x][y];
        if d < 64 && mask >> d != 0 {
            return Err(Error::InvalidArgument(format!(
                "element {mask:#b} does not lie in hom({x},{y}) of dimension {d}"
            )));
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.hom.len()
    }

    pub fn hom_dim(&self, x: usize, y: usize) -> usize {
        self.hom[x][y]
    }

    pub fn unit_index(&self, x: usize) -> usize {
        self.units[x]
    }

    pub fn unit(&self, x: usize) -> u64 {
        1 << self.units[x]
    }

    /// Highest order of a nonzero composition (at least 2).
    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// True when every composition of order three or more vanishes.
    pub fn is_dg(&self) -> bool {
        self.higher.is_empty()
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    /// `mu^d` on basis elements; `objs` has one more entry than `args`.
    pub fn mu(&self, objs: &[usize], args: &[usize]) -> u64 {
        match args.len() {
            0 | 1 => 0,
            2 => self.mu2_basis(objs[0], objs[1], objs[2], args[1], args[0]),
            _ => self
                .higher
                .get(&(objs.to_vec(), args.to_vec()))
                .copied()
                .unwrap_or(0),
        }
    }

    #[inline]
    fn mu2_basis(&self, x: usize, y: usize, z: usize, b: usize, a: usize) -> u64 {
        match self.mu2.get(&(x, y, z)) {
            Some(t) => t[b * self.hom[x][y] + a],
            None => 0,
        }
    }

    /// `mu^2(b, a)` on arbitrary elements.
    pub fn mu2(&self, x: usize, y: usize, z: usize, b: u64, a: u64) -> u64 {
        let Some(t) = self.mu2.get(&(x, y, z)) else {
            return 0;
        };
        let da = self.hom[x][y];
        let mut out = 0;
        for i in ones(a) {
            for j in ones(b) {
                out ^= t[j * da + i];
            }
        }
        out
    }

    /// Multilinear extension of [`AInfCategory::mu`].
    pub fn mu_masks(&self, objs: &[usize], masks: &[u64]) -> u64 {
        match masks.len() {
            0 | 1 => 0,
            2 => self.mu2(objs[0], objs[1], objs[2], masks[1], masks[0]),
            d if d > self.d_max => 0,
            _ => {
                let mut args = vec![0; masks.len()];
                self.expand(objs, masks, 0, &mut args)
            }
        }
    }

    fn expand(&self, objs: &[usize], masks: &[u64], k: usize, args: &mut Vec<usize>) -> u64 {
        if k == masks.len() {
            return self.mu(objs, args);
        }
        let mut out = 0;
        for i in ones(masks[k]) {
            args[k] = i;
            out ^= self.expand(objs, masks, k + 1, args);
        }
        out
    }

    /// Two-sided inverse of `phi` in `End(x)`, if it exists.
    pub fn inverse(&self, x: usize, phi: u64) -> Option<u64> {
        let d = self.hom[x][x];
        // Solve mu^2(y, phi) = 1 by elimination on the images of basis vectors.
        let mut rows: Vec<(u64, u64)> = (0..d)
            .map(|j| (self.mu2(x, x, x, 1 << j, phi), 1u64 << j))
            .collect();
        let mut target = (self.unit(x), 0u64);
        let mut pivots: Vec<(u32, u64, u64)> = Vec::new();
        for (img, comb) in rows.drain(..) {
            let (mut img, mut comb) = (img, comb);
            for &(p, pi, pc) in &pivots {
                if img >> p & 1 == 1 {
                    img ^= pi;
                    comb ^= pc;
                }
            }
            if img != 0 {
                let p = 63 - img.leading_zeros();
                for piv in pivots.iter_mut() {
                    if piv.1 >> p & 1 == 1 {
                        piv.1 ^= img;
                        piv.2 ^= comb;
                    }
                }
                pivots.push((p, img, comb));
            }
        }
        for &(p, pi, pc) in &pivots {
            if target.0 >> p & 1 == 1 {
                target.0 ^= pi;
                target.1 ^= pc;
            }
        }
        if target.0 != 0 {
            return None;
        }
        let y = target.1;
        (self.mu2(x, x, x, phi, y) == self.unit(x)).then_some(y)
    }

    /// Every failure of the unit axioms and of the A-infinity equations up to order `2 * d_max`.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.num_objects();
        for x in 0..n {
            for y in 0..n {
                for a in 0..self.hom[x][y] {
                    if self.mu(&[x, x, y], &[self.units[x], a]) != 1 << a
                        || self.mu(&[x, y, y], &[a, self.units[y]]) != 1 << a
                    {
                        out.push(format!("unit axiom fails on basis {a} of hom({x},{y})"));
                    }
                }
            }
        }
        for (objs, args) in self.higher.keys() {
            if (0..args.len()).any(|k| objs[k] == objs[k + 1] && args[k] == self.units[objs[k]]) {
                out.push(format!("higher product on {objs:?} {args:?} has a unit input"));
            }
        }
        for order in 3..=2 * self.d_max {
            let mut objs = Vec::with_capacity(order + 1);
            for x in 0..n {
                objs.push(x);
                self.check_relation_paths(order, &mut objs, &mut Vec::new(), &mut out);
                objs.pop();
            }
        }
        out
    }

    fn check_relation_paths(
        &self,
        order: usize,
        objs: &mut Vec<usize>,
        args: &mut Vec<usize>,
        out: &mut Vec<String>,
    ) {
        if args.len() == order {
            let v = self.relation(objs, args);
            if v != 0 {
                out.push(format!(
                    "A-infinity relation of order {order} fails on objects {objs:?}, basis {args:?}"
                ));
            }
            return;
        }
        let last = *objs.last().unwrap();
        for y in 0..self.num_objects() {
            for a in 0..self.hom[last][y] {
                objs.push(y);
                args.push(a);
                self.check_relation_paths(order, objs, args, out);
                args.pop();
                objs.pop();
            }
        }
    }

    /// `sum mu^{r+t+1}(1^t, mu^s, 1^r)` on a composable basis tuple.
    fn relation(&self, objs: &[usize], args: &[usize]) -> u64 {
        let n = args.len();
        let mut acc = 0;
        for s in 2..=n.min(self.d_max) {
            let outer = n - s + 1;
            if outer < 2 || outer > self.d_max {
                continue;
            }
            for r in 0..=n - s {
                let inner = self.mu(&objs[r..=r + s], &args[r..r + s]);
                if inner == 0 {
                    continue;
                }
                let mut o = objs[..=r].to_vec();
                o.extend_from_slice(&objs[r + s..]);
                let mut m: Vec<u64> = args[..r].iter().map(|&a| 1u64 << a).collect();
                m.push(inner);
                m.extend(args[r + s..].iter().map(|&a| 1u64 << a));
                acc ^= self.mu_masks(&o, &m);
            }
        }
        acc
    }
}

/// Indices of set bits.
#[inline]
pub(crate) fn ones(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let t = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(t)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A = Z2[e]/(e^2) as a one-object category.
    pub(crate) fn dual_numbers() -> AInfCategory {
        AInfCategory::new(vec![vec![2]], vec![0]).unwrap()
    }

    #[test]
    fn units_are_built_in() {
        let a = dual_numbers();
        assert_eq!(a.mu2(0, 0, 0, 0b01, 0b10), 0b10);
        assert_eq!(a.mu2(0, 0, 0, 0b10, 0b10), 0);
        assert!(a.validate().is_empty());
        assert_eq!(a.inverse(0, 0b11), Some(0b11));
        assert_eq!(a.inverse(0, 0b10), None);
    }

    #[test]
    fn detects_non_associativity() {
        // e * e = 1 in a three-dimensional algebra {1, e, f} with e f = 0 but f e = e
        let mut c = AInfCategory::new(vec![vec![3]], vec![0]).unwrap();
        c.set_mu2(0, 0, 0, 1, 1, 0b001).unwrap();
        c.set_mu2(0, 0, 0, 2, 1, 0b010).unwrap();
        assert!(!c.validate().is_empty());
    }

    #[test]
    fn unit_products_are_protected() {
        let mut a = dual_numbers();
        assert!(a.set_mu2(0, 0, 0, 0, 1, 0).is_err());
        assert!(a.set_mu2(0, 0, 0, 1, 1, 0b100).is_err());
    }

    #[test]
    fn higher_products_with_units_are_flagged() {
        let mut a = dual_numbers();
        a.set_higher(&[0, 0, 0, 0], &[1, 1, 1], 0b10).unwrap();
        assert_eq!(a.d_max(), 3);
        // mu^3(e,e,e) = e alone is consistent at order 3 but not at order 5
        let v = a.validate();
        assert!(v.iter().all(|s| !s.contains("unit input")));
        assert!(v.iter().any(|s| s.contains("order 5")));
        a.set_higher(&[0, 0, 0, 0], &[0, 1, 1], 0b10).unwrap();
        assert!(a.validate().iter().any(|s| s.contains("unit input")));
    }
}
