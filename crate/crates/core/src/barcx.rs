//! Truncated reduced bar complexes `(M ⊗_A N)_n` and rank sweeps over minimal modules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amod::{self, AModule, Side};
use crate::error::{Error, Result};
use crate::f2lin::{Barcode, F2Matrix};

/// `(M ⊗_A N)_n` with basis `(s, x, y) -> s*dM*dN + x*dN + y`, where `s` counts the
/// copies of `e` between `x` in `M` and `y` in `N`.
#[derive(Clone, Debug)]
pub struct BarComplex {
    pub n: usize,
    pub left_dim: usize,
    pub right_dim: usize,
    pub differential: F2Matrix,
}

impl BarComplex {
    pub fn total_dim(&self) -> usize {
        self.n * self.left_dim * self.right_dim
    }

    pub fn index(&self, s: usize, x: usize, y: usize) -> usize {
        (s * self.left_dim + x) * self.right_dim + y
    }

    pub fn cohomology_rank(&self) -> usize {
        self.total_dim() - 2 * self.differential.rank()
    }
}

fn check_sides(m: &AModule, nm: &AModule, n: usize) -> Result<()> {
    if m.side() != Side::Right {
        return Err(Error::InvalidArgument("left factor must be a right module".into()));
    }
    if nm.side() != Side::Left {
        return Err(Error::InvalidArgument("right factor must be a left module".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation n must be at least 1".into()));
    }
    for (name, x) in [("left", m), ("right", nm)] {
        let bad = x.validate();
        if !bad.is_empty() {
            return Err(Error::Validation(format!(
                "{name} factor violates module relations for n in {bad:?}"
            )));
        }
    }
    Ok(())
}

pub fn build_bar(m: &AModule, nm: &AModule, n: usize) -> Result<BarComplex> {
    check_sides(m, nm, n)?;
    let bar = build_unchecked(m, nm, n);
    if !bar.differential.mul(&bar.differential)?.is_zero() {
        return Err(Error::Invariant("bar differential does not square to zero".into()));
    }
    Ok(bar)
}

fn build_unchecked(m: &AModule, nm: &AModule, n: usize) -> BarComplex {
    let (dm, dn) = (m.dim(), nm.dim());
    let total = n * dm * dn;
    let mut d = F2Matrix::zeros(total, total);
    let bar = |s: usize, x: usize, y: usize| (s * dm + x) * dn + y;
    for (i, mi) in m.actions().iter().enumerate() {
        // m_{i+1} consumes i copies of e
        for s in i..n {
            for x in 0..dm {
                for xp in mi.column(x).ones() {
                    for y in 0..dn {
                        d.flip(bar(s - i, xp, y), bar(s, x, y));
                    }
                }
            }
        }
    }
    for (j, nj) in nm.actions().iter().enumerate() {
        for s in j..n {
            for y in 0..dn {
                for yp in nj.column(y).ones() {
                    for x in 0..dm {
                        d.flip(bar(s - j, x, yp), bar(s, x, y));
                    }
                }
            }
        }
    }
    BarComplex {
        n,
        left_dim: dm,
        right_dim: dn,
        differential: d,
    }
}

pub fn bar_rank(m: &AModule, nm: &AModule, n: usize) -> Result<usize> {
    Ok(build_bar(m, nm, n)?.cohomology_rank())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepBounds {
    pub max_dim: usize,
    pub max_n: usize,
    /// Smallest torsion parameter `k` of an `R(k)` / `L(k)` summand.
    pub min_k: usize,
    /// Largest torsion parameter `k`.
    pub max_k: usize,
}

impl SweepBounds {
    pub fn new(max_dim: usize, max_n: usize, min_k: usize) -> Self {
        SweepBounds {
            max_dim,
            max_n,
            min_k,
            max_k: max_dim.max(min_k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    /// `rk H < dim M * dim N`.
    Base,
    /// `rk H < 2 dim M dim N` with all torsion `k >= 3` and `n >= 2`.
    Strengthened,
    /// A non-minimal representative gave a different rank.
    Guard,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub left: Barcode,
    pub right: Barcode,
    pub n: usize,
    pub rank: usize,
    pub bound: usize,
    pub failure: Failure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub bounds: SweepBounds,
    pub left_modules: usize,
    pub right_modules: usize,
    pub cases: usize,
    pub strengthened_cases: usize,
    pub guard_cases: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Barcodes of all minimal modules built from `Z2` and `R(k)` / `L(k)` with
/// `min_k <= k <= max_k` and total dimension in `1..=max_dim`.
pub fn minimal_barcodes(max_dim: usize, min_k: usize, max_k: usize) -> Vec<Barcode> {
    fn rec(
        k: usize,
        max_k: usize,
        room: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(current.clone());
        if room < 2 {
            return;
        }
        for next in k..=max_k {
            current.push(next - 1);
            rec(next, max_k, room - 2, current, out);
            current.pop();
        }
    }
    let mut torsions = Vec::new();
    rec(min_k.max(1), max_k, max_dim, &mut Vec::new(), &mut torsions);
    let mut out = Vec::new();
    for t in torsions {
        for f in 0..=max_dim - 2 * t.len() {
            if f + t.len() > 0 {
                out.push(Barcode::new(f, t.clone()));
            }
        }
    }
    out.sort_by(|a, b| {
        (a.free_rank + 2 * a.torsion.len(), a.free_rank, &a.torsion).cmp(&(
            b.free_rank + 2 * b.torsion.len(),
            b.free_rank,
            &b.torsion,
        ))
    });
    out
}

fn all_torsion_at_least_three(b: &Barcode) -> bool {
    b.torsion.iter().all(|&e| e + 1 >= 3)
}

/// A quasi-isomorphic, non-minimal representative: adds an acyclic `R(1)`/`L(1)`
/// summand and conjugates by a random invertible matrix.
pub fn perturbed_representative<R: Rng>(rng: &mut R, m: &AModule) -> AModule {
    let acyclic = amod::standard_on(m.side(), 1).expect("k = 1 is valid");
    let big = amod::direct_sum(m, &acyclic).expect("same side");
    let p = amod::random::random_invertible(rng, big.dim());
    big.conjugate(&p).expect("invertible")
}

/// Checks `rk H >= dim M dim N` on all minimal pairs, and `rk H >= 2 dim M dim N`
/// when every torsion summand on both sides has `k >= 3` and `n >= 2`.
///
/// Every pair is computed in full. About a tenth of the cases, chosen by a
/// fixed seed, are recomputed on perturbed non-minimal representatives.
pub fn inequality_sweep(bounds: SweepBounds) -> SweepReport {
    let lefts = minimal_barcodes(bounds.max_dim, bounds.min_k, bounds.max_k);
    let left_mods: Vec<AModule> = lefts.iter().map(|b| amod::canonical(b, Side::Right)).collect();
    let right_mods: Vec<AModule> = lefts.iter().map(|b| amod::canonical(b, Side::Left)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut report = SweepReport {
        bounds,
        left_modules: left_mods.len(),
        right_modules: right_mods.len(),
        cases: 0,
        strengthened_cases: 0,
        guard_cases: 0,
        counterexamples: Vec::new(),
    };
    for (lb, m) in lefts.iter().zip(&left_mods) {
        for (rb, nm) in lefts.iter().zip(&right_mods) {
            let prod = m.dim() * nm.dim();
            let strong_pair = all_torsion_at_least_three(lb) && all_torsion_at_least_three(rb);
            for n in 1..=bounds.max_n {
                let rank = build_unchecked(m, nm, n).cohomology_rank();
                report.cases += 1;
                let mut fail = |bound: usize, failure: Failure| {
                    report.counterexamples.push(Counterexample {
                        left: lb.clone(),
                        right: rb.clone(),
                        n,
                        rank,
                        bound,
                        failure,
                    })
                };
                if rank < prod {
                    fail(prod, Failure::Base);
                }
                if strong_pair && n >= 2 {
                    if rank < 2 * prod {
                        fail(2 * prod, Failure::Strengthened);
                    }
                    report.strengthened_cases += 1;
                }
                if rng.gen_bool(0.1) {
                    report.guard_cases += 1;
                    let m2 = perturbed_representative(&mut rng, m);
                    let n2 = perturbed_representative(&mut rng, nm);
                    let r2 = build_unchecked(&m2, &n2, n).cohomology_rank();
                    if r2 != rank {
                        report.counterexamples.push(Counterexample {
                            left: lb.clone(),
                            right: rb.clone(),
                            n,
                            rank: r2,
                            bound: rank,
                            failure: Failure::Guard,
                        });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amod::{canonical, classify, direct_sum, random, standard, StandardModuleKind};

    fn r(k: usize) -> AModule {
        standard(StandardModuleKind::R(k)).unwrap()
    }
    fn l(k: usize) -> AModule {
        standard(StandardModuleKind::L(k)).unwrap()
    }
    fn z(side: Side) -> AModule {
        amod::trivial(side)
    }

    /// Rank of H computed from ker/im dimensions separately.
    fn oracle_rank(bar: &BarComplex) -> usize {
        let d = &bar.differential;
        let ker = d.kernel_basis().len();
        ker - d.column_space_basis().len()
    }

    #[test]
    fn trivial_factors() {
        for n in 1..=5 {
            let bar = build_bar(&z(Side::Right), &z(Side::Left), n).unwrap();
            assert!(bar.differential.is_zero());
            assert_eq!(bar.total_dim(), n);
        }
        assert_eq!(bar_rank(&z(Side::Right), &z(Side::Left), 5).unwrap(), 5);
    }

    #[test]
    fn figure_ranks() {
        let bar = build_bar(&r(2), &l(3), 3).unwrap();
        assert_eq!(bar.total_dim(), 12);
        assert_eq!(bar.cohomology_rank(), 4);
        assert_eq!(oracle_rank(&bar), 4);
        let flat = build_bar(&r(3), &l(3), 2).unwrap();
        assert!(flat.differential.is_zero());
        assert_eq!(flat.cohomology_rank(), 8);
    }

    #[test]
    fn two_arrow_families() {
        // m_2 on the left moves one e, m_3 on the right moves two.
        let bar = build_bar(&r(2), &l(3), 3).unwrap();
        let d = &bar.differential;
        assert!(d.get(bar.index(0, 1, 0), bar.index(1, 0, 0)));
        assert!(d.get(bar.index(0, 0, 1), bar.index(2, 0, 0)));
        assert_eq!(d.count_ones(), 2 * 2 + 2);
    }

    #[test]
    fn rejects_wrong_sides() {
        assert!(build_bar(&l(2), &l(2), 2).is_err());
        assert!(build_bar(&r(2), &r(2), 2).is_err());
        assert!(build_bar(&r(2), &l(2), 0).is_err());
    }

    #[test]
    fn small_pairs_meet_bounds() {
        assert!(bar_rank(&r(3), &l(3), 4).unwrap() >= 8);
        assert!(bar_rank(&r(2), &z(Side::Left), 1).unwrap() >= 2);
    }

    #[test]
    fn random_modules_square_zero_additive_and_invariant() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..150 {
            let m = random::random_module(&mut rng, Side::Right, 5, 4);
            let m2 = random::random_module(&mut rng, Side::Right, 3, 4);
            let nm = random::random_module(&mut rng, Side::Left, 5, 4);
            let n = rng.gen_range(1..=6);
            let bar = build_bar(&m, &nm, n).unwrap();
            assert_eq!(bar.cohomology_rank(), oracle_rank(&bar));
            let rk = bar.cohomology_rank();
            let rk2 = bar_rank(&m2, &nm, n).unwrap();
            assert_eq!(bar_rank(&direct_sum(&m, &m2).unwrap(), &nm, n).unwrap(), rk + rk2);
            let mc = canonical(&classify(&m).unwrap(), Side::Right);
            let nc = canonical(&classify(&nm).unwrap(), Side::Left);
            assert_eq!(bar_rank(&mc, &nc, n).unwrap(), rk);
        }
    }

    #[test]
    fn minimal_enumeration_counts() {
        // dims <= 2 with k in 2..=3: Z2, Z2^2, R2, R3
        let b = minimal_barcodes(2, 2, 3);
        assert_eq!(b.len(), 4);
        assert!(minimal_barcodes(8, 2, 6).iter().all(|x| x.free_rank + 2 * x.torsion.len() <= 8));
    }

    #[test]
    fn small_sweep_is_clean() {
        let report = inequality_sweep(SweepBounds {
            max_dim: 6,
            max_n: 4,
            min_k: 2,
            max_k: 6,
        });
        assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
        assert!(report.guard_cases > 0 && report.strengthened_cases > 0);
        let json = serde_json::to_string(&report).unwrap();
        let back: SweepReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
