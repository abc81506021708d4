use super::category::{ones, AInfCategory};
use super::object::{
    hf, hom_complex, mu1, mu_tw, same_category, Components, HomBasis, TwMorphism, TwObject,
};
use super::reduce::{quotient, Subcomplex};
use crate::amod::{AModule, Side};
use crate::error::{Error, Result};
use crate::f2lin::{BitVec, F2Matrix};

/// `Cone(f)`: the source copies followed by the target copies, with connection
/// `delta_X` and `delta_Y` on the diagonal and `f` from source to target.
pub fn cone(cat: &AInfCategory, f: &TwMorphism) -> Result<TwObject> {
    if !mu1(cat, f)?.is_empty() {
        return Err(Error::Validation("cone of a morphism that is not a cocycle".into()));
    }
    Ok(cone_unchecked(cat, f))
}

fn cone_unchecked(cat: &AInfCategory, f: &TwMorphism) -> TwObject {
    let nx = f.source.len();
    let mut copies = f.source.copies().to_vec();
    copies.extend_from_slice(f.target.copies());
    let mut delta = f.source.delta().clone();
    for (&(s, t), &m) in f.target.delta() {
        delta.insert((nx + s, nx + t), m);
    }
    for (&(s, t), &m) in &f.components {
        if m != 0 {
            delta.insert((s, nx + t), m);
        }
    }
    TwObject::from_parts(cat, copies, delta).expect("cone of well-formed objects")
}

/// Source object `hom(L, X) ⊗ L` and the evaluation map to `X`.
///
/// Copy `(i, l)` of the source, stored at `i * |L| + l`, is the `l`-th copy of
/// `L` tensored with the `i`-th basis element of `hom(L, X)`.
pub fn evaluation(cat: &AInfCategory, l: &TwObject, x: &TwObject) -> Result<TwMorphism> {
    let h = hom_complex(cat, l, x)?;
    let nl = l.len();
    let dim = h.dim();
    let mut copies = Vec::with_capacity(dim * nl);
    for _ in 0..dim {
        copies.extend_from_slice(l.copies());
    }
    let mut delta = Components::new();
    for i in 0..dim {
        for j in h.differential.column(i).ones() {
            for (c, &o) in l.copies().iter().enumerate() {
                *delta.entry((i * nl + c, j * nl + c)).or_insert(0) ^= cat.unit(o);
            }
        }
        for (&(a, b), &m) in l.delta() {
            *delta.entry((i * nl + a, i * nl + b)).or_insert(0) ^= m;
        }
    }
    let source = TwObject::from_parts(cat, copies, delta)?;
    let mut ev = Components::new();
    for (i, &(s, t, b)) in h.basis.entries().iter().enumerate() {
        ev.insert((i * nl + s, t), 1u64 << b);
    }
    Ok(TwMorphism {
        source,
        target: x.clone(),
        components: ev,
    })
}

/// Coevaluation `X -> hom(X, L)^∨ ⊗ L`, dual to [`evaluation`].
pub fn coevaluation(cat: &AInfCategory, l: &TwObject, x: &TwObject) -> Result<TwMorphism> {
    let h = hom_complex(cat, x, l)?;
    let nl = l.len();
    let dim = h.dim();
    let mut copies = Vec::with_capacity(dim * nl);
    for _ in 0..dim {
        copies.extend_from_slice(l.copies());
    }
    let mut delta = Components::new();
    for i in 0..dim {
        // dual differential: f_j^∨ -> sum_i d[j][i] f_i^∨
        for j in h.differential.column(i).ones() {
            for (c, &o) in l.copies().iter().enumerate() {
                *delta.entry((j * nl + c, i * nl + c)).or_insert(0) ^= cat.unit(o);
            }
        }
        for (&(a, b), &m) in l.delta() {
            *delta.entry((i * nl + a, i * nl + b)).or_insert(0) ^= m;
        }
    }
    delta.retain(|_, m| *m != 0);
    let target = TwObject::from_parts(cat, copies, delta)?;
    let mut coev = Components::new();
    for (i, &(s, t, b)) in h.basis.entries().iter().enumerate() {
        coev.insert((s, i * nl + t), 1u64 << b);
    }
    Ok(TwMorphism {
        source: x.clone(),
        target,
        components: coev,
    })
}

/// Checks that `End(L)` looks like Z2[e]/(e^2): two-dimensional with a square-zero `e`
/// for a plain object, two-dimensional cohomology otherwise.
pub fn check_spherical(cat: &AInfCategory, l: &TwObject) -> Result<()> {
    same_category(cat, &[l])?;
    if l.len() == 1 && l.delta().is_empty() {
        let o = l.copies()[0];
        if cat.hom_dim(o, o) != 2 {
            return Err(Error::InvalidArgument(format!(
                "End of object {o} has dimension {}, expected 2",
                cat.hom_dim(o, o)
            )));
        }
        let e = epsilon(cat, o);
        if cat.mu2(o, o, o, e, e) != 0 {
            return Err(Error::InvalidArgument(format!("e^2 != 0 in End of object {o}")));
        }
        return Ok(());
    }
    let r = hf(cat, l, l)?;
    if r != 2 {
        return Err(Error::InvalidArgument(format!(
            "hom(L, L) has cohomology of rank {r}, expected 2"
        )));
    }
    Ok(())
}

/// The non-unit basis element of a two-dimensional endomorphism space.
pub fn epsilon(cat: &AInfCategory, o: usize) -> u64 {
    let d = cat.hom_dim(o, o);
    let full = if d >= 64 { u64::MAX } else { (1u64 << d) - 1 };
    full & !cat.unit(o)
}

/// The twist `Cone(ev: hom(L, X) ⊗ L -> X)`.
pub fn twist(cat: &AInfCategory, l: &TwObject, x: &TwObject) -> Result<TwObject> {
    check_spherical(cat, l)?;
    same_category(cat, &[x])?;
    cone(cat, &evaluation(cat, l, x)?)
}

/// The inverse twist `Cone(coev: X -> hom(X, L)^∨ ⊗ L)`.
pub fn untwist(cat: &AInfCategory, l: &TwObject, x: &TwObject) -> Result<TwObject> {
    check_spherical(cat, l)?;
    same_category(cat, &[x])?;
    cone(cat, &coevaluation(cat, l, x)?)
}

/// `hom(L, X)` as a right module over `End(L)`: `m_k(a) = mu^k(a, e, ..., e)`.
pub fn hom_module_right(cat: &AInfCategory, l: usize, x: &TwObject) -> Result<AModule> {
    let lo = TwObject::plain(cat, l)?;
    check_spherical(cat, &lo)?;
    same_category(cat, &[x])?;
    let h = hom_complex(cat, &lo, x)?;
    let e = epsilon(cat, l);
    let mut eps = Components::new();
    eps.insert((0, 0), e);
    let mut actions = vec![h.differential.clone()];
    for k in 2..=cat.d_max() {
        let mut m = F2Matrix::zeros(h.dim(), h.dim());
        let mut objs: Vec<&TwObject> = vec![&lo; k];
        objs.push(x);
        for (col, &(s, t, b)) in h.basis.entries().iter().enumerate() {
            let mut a = Components::new();
            a.insert((s, t), 1u64 << b);
            let mut args: Vec<&Components> = vec![&eps; k - 1];
            args.push(&a);
            for ((s2, t2), v) in mu_tw(cat, &objs, &args) {
                for b2 in ones(v) {
                    m.flip(h.basis.index(s2, t2, b2), col);
                }
            }
        }
        actions.push(m);
    }
    Ok(AModule::new(Side::Right, h.dim(), actions)?.trimmed())
}

/// `hom(X, L)` as a left module over `End(L)`: `m_k(a) = mu^k(e, ..., e, a)`.
pub fn hom_module_left(cat: &AInfCategory, x: &TwObject, l: usize) -> Result<AModule> {
    let lo = TwObject::plain(cat, l)?;
    check_spherical(cat, &lo)?;
    same_category(cat, &[x])?;
    let h = hom_complex(cat, x, &lo)?;
    let e = epsilon(cat, l);
    let mut eps = Components::new();
    eps.insert((0, 0), e);
    let mut actions = vec![h.differential.clone()];
    for k in 2..=cat.d_max() {
        let mut m = F2Matrix::zeros(h.dim(), h.dim());
        let mut objs: Vec<&TwObject> = vec![x];
        objs.extend(std::iter::repeat_n(&lo, k));
        for (col, &(s, t, b)) in h.basis.entries().iter().enumerate() {
            let mut a = Components::new();
            a.insert((s, t), 1u64 << b);
            let mut args: Vec<&Components> = vec![&a];
            args.extend(std::iter::repeat_n(&eps, k - 1));
            for ((s2, t2), v) in mu_tw(cat, &objs, &args) {
                for b2 in ones(v) {
                    m.flip(h.basis.index(s2, t2, b2), col);
                }
            }
        }
        actions.push(m);
    }
    Ok(AModule::new(Side::Left, h.dim(), actions)?.trimmed())
}

/// The bar-type model of the `n`-th power of the twist about `L`.
///
/// With `M = hom(L, X)` of dimension `m`, copy `s * m + i` is
/// `e_i ⊗ e^{⊗s} ⊗ L` for `s < n`, followed by the copies of `X`. The
/// connection is `ev` from block 0 to `X`, `e` from block `s` to block
/// `s - 1`, and `m_k ⊗ 1` from block `s` to block `s - k + 1`.
pub fn build_tn(cat: &AInfCategory, l: usize, x: &TwObject, n: usize) -> Result<TwObject> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let lo = TwObject::plain(cat, l)?;
    check_spherical(cat, &lo)?;
    let module = hom_module_right(cat, l, x)?;
    let basis = HomBasis::new(cat, &lo, x);
    let m = basis.len();
    let e = epsilon(cat, l);
    let unit = cat.unit(l);
    let xo = n * m;
    let mut copies = vec![l; xo];
    copies.extend_from_slice(x.copies());
    let mut delta = Components::new();
    for (i, &(_, t, b)) in basis.entries().iter().enumerate() {
        delta.insert((i, xo + t), 1u64 << b);
    }
    for s in 1..n {
        for i in 0..m {
            delta.insert((s * m + i, (s - 1) * m + i), e);
        }
    }
    for (k1, mk) in module.actions().iter().enumerate() {
        for s in k1..n {
            for i in 0..m {
                for i2 in mk.column(i).ones() {
                    *delta.entry((s * m + i, (s - k1) * m + i2)).or_insert(0) ^= unit;
                }
            }
        }
    }
    for (&(a, b), &v) in x.delta() {
        delta.insert((xo + a, xo + b), v);
    }
    delta.retain(|_, v| *v != 0);
    let t = TwObject::from_parts(cat, copies, delta)?;
    let bad = super::object::validate_mc(cat, &t);
    if !bad.is_empty() {
        return Err(Error::Invariant(format!("bar model is not a twisted complex: {}", bad[0])));
    }
    Ok(t)
}

/// The chain of quotients turning `Cone(ev: hom(L, T^{n-1}) ⊗ L -> T^{n-1})`
/// into a complex of the size of `T^n`.
///
/// Stage `r` divides out the copies `e_i ⊗ e^{⊗(r-1)} ⊗ 1 ⊗ L` together with
/// their image under the connection.
pub fn hat_chain(cat: &AInfCategory, l: usize, x: &TwObject, n: usize) -> Result<Vec<TwObject>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let lo = TwObject::plain(cat, l)?;
    let prev = if n == 1 {
        x.clone()
    } else {
        build_tn(cat, l, x, n - 1)?
    };
    let ev = evaluation(cat, &lo, &prev)?;
    let hat = cone(cat, &ev)?;
    let m = HomBasis::new(cat, &lo, x).len();
    let hb = HomBasis::new(cat, &lo, &prev);
    let unit_idx = cat.unit_index(l);
    let mut stages = vec![hat.clone()];
    // labels[c] is the index in the first stage of the current copy c
    let mut labels: Vec<usize> = (0..hat.len()).collect();
    let mut current = hat;
    for r in 1..n {
        let seeds: Vec<usize> = (0..m)
            .map(|i| hb.index(0, (r - 1) * m + i, unit_idx))
            .collect();
        let positions: Vec<usize> = seeds
            .iter()
            .map(|s| {
                labels.iter().position(|&c| c == *s).ok_or_else(|| {
                    Error::Invariant("seed copy was removed by an earlier quotient".into())
                })
            })
            .collect::<Result<_>>()?;
        let sub = Subcomplex::generated_by(cat, &current, &positions)?;
        let (q, kept) = quotient(cat, &current, &sub)?;
        labels = kept.iter().map(|&k| labels[k]).collect();
        current = q;
        stages.push(current.clone());
    }
    Ok(stages)
}

/// Evaluates `mu^2(ev, a ⊗ b)` and `mu^2(a, b)` for `b: L' -> L`, `a in hom(L, X)`,
/// returning both as elements of `hom(L', X)`.
pub fn evaluation_identity(
    cat: &AInfCategory,
    l: &TwObject,
    x: &TwObject,
    lp: &TwObject,
    a: &BitVec,
    b: &Components,
) -> Result<(Components, Components)> {
    let ev = evaluation(cat, l, x)?;
    let hlx = HomBasis::new(cat, l, x);
    let nl = l.len();
    // a ⊗ b as a morphism L' -> hom(L, X) ⊗ L
    let mut ab = Components::new();
    for i in a.ones() {
        for (&(s, t), &m) in b {
            *ab.entry((s, i * nl + t)).or_insert(0) ^= m;
        }
    }
    ab.retain(|_, m| *m != 0);
    let lhs = mu_tw(cat, &[lp, &ev.source, x], &[&ab, &ev.components]);
    let ac = hlx.to_components(a);
    let rhs = mu_tw(cat, &[lp, l, x], &[b, &ac]);
    Ok((lhs, rhs))
}
