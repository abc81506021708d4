use std::time::{Duration, Instant};

use dehn_core::amod::{self, canonical, classify, direct_sum, standard, Side, StandardModuleKind};
use dehn_core::barcx::{bar_rank, inequality_sweep, SweepBounds};
use dehn_core::f2lin::{Barcode, BitVec};
use dehn_core::freecert::{certify_word, default_witnesses, property_s, FreeWord, WordVerdict};
use dehn_core::homlat::MilnorLattice;
use dehn_core::tw::{self, hom_complex, TwMorphism, TwObject};
use dehn_core::zigzag::{random, search_pair, zigzag, BraidWord, SeparatedPair, SphereSpec, ZigzagCat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn r(k: usize) -> amod::AModule {
    standard(StandardModuleKind::R(k)).unwrap()
}

fn l(k: usize) -> amod::AModule {
    standard(StandardModuleKind::L(k)).unwrap()
}

fn criterion_1() -> Outcome {
    let exact = bar_rank(&r(2), &l(3), 3).unwrap();
    let frozen = [((3, 3, 4), 8), ((3, 4, 4), 8), ((3, 4, 5), 8)];
    let mut ok = exact == 4;
    let mut parts = vec![format!("R2xL3 n=3: {exact}")];
    for ((a, b, n), want) in frozen {
        let got = bar_rank(&r(a), &l(b), n).unwrap();
        ok &= got >= 8 && got == want;
        parts.push(format!("R{a}xL{b} n={n}: {got}"));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_2() -> Outcome {
    let base = inequality_sweep(SweepBounds {
        max_dim: 8,
        max_n: 6,
        min_k: 2,
        max_k: 6,
    });
    let ok = base.counterexamples.is_empty() && base.strengthened_cases > 0;
    outcome(
        ok,
        format!(
            "{} modules per side, {} cases, {} strengthened, {} guard, {} counterexamples",
            base.left_modules,
            base.cases,
            base.strengthened_cases,
            base.guard_cases,
            base.counterexamples.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    for i in 0..500 {
        let side = if i % 2 == 0 { Side::Right } else { Side::Left };
        let m = amod::random::random_module(&mut rng, side, 6, 5);
        let other = amod::random::random_module(&mut rng, side, 6, 5);
        let b = classify(&m).unwrap();
        let p = amod::random::random_invertible(&mut rng, m.dim());
        if classify(&m.conjugate(&p).unwrap()).unwrap() != b {
            bad.push(format!("conjugation #{i}"));
        }
        let sum = classify(&direct_sum(&m, &other).unwrap()).unwrap();
        if sum != b.sum(&classify(&other).unwrap()) {
            bad.push(format!("additivity #{i}"));
        }
        if classify(&canonical(&b, side)).unwrap() != b {
            bad.push(format!("canonical #{i}"));
        }
    }
    for k in 2..=8 {
        if classify(&r(k)).unwrap() != Barcode::new(0, vec![k - 1]) {
            bad.push(format!("R({k})"));
        }
    }
    if classify(&r(1)).unwrap() != Barcode::new(0, vec![]) {
        bad.push("R(1)".into());
    }
    outcome(bad.is_empty(), format!("500 random modules, failures: {bad:?}"))
}

fn short_spheres(z: &ZigzagCat, max_len: usize) -> Vec<(SphereSpec, TwObject)> {
    let mut out = Vec::new();
    for w in BraidWord::enumerate(z.m(), max_len) {
        for base in 1..=z.m() {
            let spec = SphereSpec { word: w.clone(), base };
            let obj = z.sphere(&spec).unwrap();
            out.push((spec, obj));
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut checks = 0usize;
    let mut bad = Vec::new();
    for m in 1..=3 {
        let z = zigzag(m).unwrap();
        let c = z.category();
        for (spec, x) in short_spheres(&z, 3) {
            for li in 1..=m {
                let mm = z.hom_module_right(li, &x).unwrap();
                let mut tx = x.clone();
                for n in 1..=4 {
                    tx = z.twist_power(li, 1, &tx).unwrap();
                    let t = tw::build_tn(c, li - 1, &x, n).unwrap();
                    for j in 1..=m {
                        let pj = z.plain(j).unwrap();
                        let lhs = z.hf(&pj, &t).unwrap();
                        let rhs = z.hf(&tx, &pj).unwrap();
                        let nn = z.hom_module_left(&pj, li).unwrap();
                        let bound = bar_rank(&mm, &nn, n).unwrap();
                        let total = rhs + z.hf(&x, &pj).unwrap();
                        checks += 1;
                        if lhs != rhs || total < bound {
                            bad.push(format!("m={m} X={spec} L={li} n={n} j={j}"));
                        }
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checks} instances, failures: {bad:?}"))
}

fn a2_pair() -> Option<(ZigzagCat, SeparatedPair)> {
    let z = zigzag(2).unwrap();
    let pair = search_pair(&z, 6, 2, (1, 3)).unwrap()?;
    Some((z, pair))
}

fn criterion_5() -> Outcome {
    let Some((z, pair)) = a2_pair() else {
        return outcome(false, "no pair found up to length 6");
    };
    let report = property_s(&z, &pair.l0, &pair.l1, std::slice::from_ref(&pair.witness)).unwrap();
    let full = property_s(&z, &pair.l0, &pair.l1, &default_witnesses(&z, &pair.l0, &pair.l1)).unwrap();
    let ok = pair.hf_pair == 2
        && report.hf == 2
        && report.holds
        && full.holds
        && [pair.hf_l0_witness, pair.hf_l1_witness].iter().min() == Some(&1)
        && [pair.hf_l0_witness, pair.hf_l1_witness].iter().max() == Some(&3);
    outcome(
        ok,
        format!(
            "L0 = {}, L1 = {}, T = {}: hf(L0,L1) = {}, hf(L0,T) = {}, hf(L1,T) = {}",
            pair.l0, pair.l1, pair.witness, pair.hf_pair, pair.hf_l0_witness, pair.hf_l1_witness
        ),
    )
}

const A3_WORD: &str = "t2 t3^2 t2^2 t3^2 t2";

fn criterion_6() -> Outcome {
    let z = zigzag(3).unwrap();
    let spec: SphereSpec = format!("{A3_WORD} @1").parse().unwrap();
    let x = z.sphere(&spec).unwrap();
    let h = z.hf(&z.plain(1).unwrap(), &x).unwrap();
    let lat = MilnorLattice::new(3, 1).unwrap();
    let class = lat.homology_class(&spec.word, 1).unwrap();
    let d1 = lat.basis(1).unwrap();
    let pairing = lat.pairing(&d1, &class).unwrap();
    let homologous = class == d1 || class == vec![-1, 0, 0];
    outcome(
        h == 4 && homologous && pairing == 0,
        format!("hf(P1, X) = {h}, [X] = {class:?}, [P1].[X] = {pairing}"),
    )
}

fn random_cocycle(rng: &mut ChaCha8Rng, z: &ZigzagCat, x: &TwObject, y: &TwObject) -> TwMorphism {
    let h = hom_complex(z.category(), x, y).unwrap();
    let mut v = BitVec::zeros(h.dim());
    for k in h.differential.kernel_basis() {
        if rng.gen_bool(0.5) {
            v.xor_assign(&k);
        }
    }
    TwMorphism {
        source: x.clone(),
        target: y.clone(),
        components: h.basis.to_components(&v),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0usize;
    let mut bad = Vec::new();
    while cases < 240 {
        let m = rng.gen_range(1..=3);
        let z = zigzag(m).unwrap();
        let c = z.category();
        let sphere = |rng: &mut ChaCha8Rng| {
            let w = random::word(rng, m, 3);
            z.apply(&w, &z.plain(rng.gen_range(1..=m)).unwrap()).unwrap()
        };
        let x = sphere(&mut rng);
        let y = sphere(&mut rng);
        let li = rng.gen_range(1..=m);
        let lo = z.plain(li).unwrap();
        let fp = |o: &TwObject| z.fingerprint(o).unwrap();
        let tag = format!("case {cases} m={m}");

        // braid relations and distant commutation
        if m >= 2 {
            let i = rng.gen_range(1..m);
            let a = z.apply(&BraidWord::new(vec![(i, 1), (i + 1, 1), (i, 1)]).unwrap(), &x).unwrap();
            let b = z.apply(&BraidWord::new(vec![(i + 1, 1), (i, 1), (i + 1, 1)]).unwrap(), &x).unwrap();
            if fp(&a) != fp(&b) || a.len() != b.len() {
                bad.push(format!("{tag}: braid relation"));
            }
        }
        if m == 3 {
            let a = z.apply(&BraidWord::new(vec![(1, 1), (3, 1)]).unwrap(), &x).unwrap();
            let b = z.apply(&BraidWord::new(vec![(3, 1), (1, 1)]).unwrap(), &x).unwrap();
            if fp(&a) != fp(&b) || a.len() != b.len() {
                bad.push(format!("{tag}: distant commutation"));
            }
        }
        // round trips
        let w = random::word(&mut rng, m, 4);
        let there = z.apply(&w, &x).unwrap();
        let back = z.apply(&w.inverse(), &there).unwrap();
        let back2 = z.apply(&w, &z.apply(&w.inverse(), &x).unwrap()).unwrap();
        if fp(&back) != fp(&x) || back.len() != x.len() || fp(&back2) != fp(&x) || back2.len() != x.len() {
            bad.push(format!("{tag}: round trip {w}"));
        }
        // duality
        let n = rng.gen_range(1..=3);
        let lhs = z.hf(&z.twist_power(li, n, &x).unwrap(), &y).unwrap();
        let rhs = z.hf(&x, &z.twist_power(li, -n, &y).unwrap()).unwrap();
        if lhs != rhs {
            bad.push(format!("{tag}: duality"));
        }
        // evaluation identity
        let hlx = tw::HomBasis::new(c, &lo, &x);
        let hyl = tw::HomBasis::new(c, &y, &lo);
        let a = BitVec::from_bools(&(0..hlx.len()).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let bv = BitVec::from_bools(&(0..hyl.len()).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let (e1, e2) = tw::evaluation_identity(c, &lo, &x, &y, &a, &hyl.to_components(&bv)).unwrap();
        if e1 != e2 {
            bad.push(format!("{tag}: evaluation identity"));
        }
        // cone bounds and reduce invariance
        let f = random_cocycle(&mut rng, &z, &x, &y);
        let cf = tw::cone(c, &f).unwrap();
        let red = tw::reduce(c, &cf).unwrap();
        for j in 1..=m {
            let pj = z.plain(j).unwrap();
            for (hx, hy, hc, hr) in [
                (z.hf(&pj, &x), z.hf(&pj, &y), z.hf(&pj, &cf), z.hf(&pj, &red)),
                (z.hf(&x, &pj), z.hf(&y, &pj), z.hf(&cf, &pj), z.hf(&red, &pj)),
            ] {
                let (hx, hy, hc, hr) = (hx.unwrap(), hy.unwrap(), hc.unwrap(), hr.unwrap());
                if hc < hx.abs_diff(hy) || hc > hx + hy || hr != hc {
                    bad.push(format!("{tag}: cone bounds / reduce at P{j}"));
                }
            }
        }
        cases += 1;
    }
    outcome(bad.is_empty(), format!("{cases} randomized cases, failures: {bad:?}"))
}

fn criterion_8() -> Outcome {
    let Some((z, pair)) = a2_pair() else {
        return outcome(false, "criterion 5 pair missing");
    };
    let words: Vec<FreeWord> = FreeWord::enumerate(4).into_iter().skip(1).collect();
    let mut bad = Vec::new();
    let mut predictions = 0usize;
    for w in &words {
        let t = certify_word(&z, &pair.l0, &pair.l1, w).unwrap();
        predictions += t.trace.iter().filter(|r| r.predicted.is_some()).count();
        if t.verdict != WordVerdict::Nontrivial || !t.predictions_hold {
            bad.push(w.to_string());
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} words, {predictions} predicted inequalities, failures: {bad:?}", words.len()),
    )
}

fn criterion_9() -> Outcome {
    let mut pairs: Vec<(usize, SphereSpec, SphereSpec)> = Vec::new();
    if let Some((_, p)) = a2_pair() {
        let specs = [p.l0, p.l1, p.witness];
        for a in &specs {
            for b in &specs {
                pairs.push((2, a.clone(), b.clone()));
            }
        }
    }
    let x: SphereSpec = format!("{A3_WORD} @1").parse().unwrap();
    for b in [x.clone(), SphereSpec::plain(1), SphereSpec::plain(2), SphereSpec::plain(3)] {
        pairs.push((3, x.clone(), b.clone()));
        pairs.push((3, b, x.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let a = SphereSpec {
            word: random::word(&mut rng, m, 4),
            base: rng.gen_range(1..=m),
        };
        let b = SphereSpec {
            word: random::word(&mut rng, m, 4),
            base: rng.gen_range(1..=m),
        };
        pairs.push((m, a, b));
    }
    let mut bad = Vec::new();
    for (m, a, b) in &pairs {
        let z = zigzag(*m).unwrap();
        let lat = MilnorLattice::new(*m, 1).unwrap();
        let h = z.hf(&z.sphere(a).unwrap(), &z.sphere(b).unwrap()).unwrap();
        let ca = lat.homology_class(&a.word, a.base).unwrap();
        let cb = lat.homology_class(&b.word, b.base).unwrap();
        let p = lat.pairing(&ca, &cb).unwrap();
        if (h as i64 - p).rem_euclid(2) != 0 {
            bad.push(format!("m={m} ({a}, {b}): hf {h}, pairing {p}"));
        }
    }
    outcome(bad.is_empty(), format!("{} pairs, failures: {bad:?}", pairs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome, Duration); 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(120)),
        (3, criterion_3, Duration::from_secs(30)),
        (4, criterion_4, Duration::from_secs(120)),
        (5, criterion_5, Duration::from_secs(60)),
        (6, criterion_6, Duration::from_secs(10)),
        (7, criterion_7, Duration::from_secs(120)),
        (8, criterion_8, Duration::from_secs(120)),
        (9, criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (id, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        println!(
            "criterion {id}: {} ({:.2}s of {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
