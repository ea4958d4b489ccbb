//! Acceptance gate: ten criteria, one test (and one pass/fail line) each.
//!
//! Every criterion checks the library against the generic collection
//! engine or against exhaustive/sampled boxes with the stated tolerances,
//! and asserts its own time budget where one applies. Run with
//! `--nocapture` to see the per-criterion summary lines.

use num_bigint::BigInt;
use polyz_core::engine::{AutMatrix, Automorphism, Tower};
use polyz_core::g2::{
    self, aut2_compose, aut2_inverse, aut2_is_inner, aut2_out_class, g2_mul, g2_pow, g2_word,
    inner_from_element_g2, Aut2, Family2, OutClass2,
};
use polyz_core::g3::{
    self, aut3_compose, aut3_inverse, aut3_membership, out_class, out_compose, Aut3, Family3,
    Pattern2x2, Variant,
};
use polyz_core::iso::{
    conjugation_witness, inner_twist_witness, verify_witness, TwistSequence,
};
use polyz_core::presentation::NormalWord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::hint::black_box;
use std::time::{Duration, Instant};

fn w(exps: &[i64]) -> NormalWord {
    NormalWord::from_i64s(exps)
}

fn word_of_g2(x: &g2::G2Word) -> NormalWord {
    NormalWord::new(vec![x.0.clone(), x.1.clone()])
}

fn rand_word(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> NormalWord {
    NormalWord::new(
        (0..n)
            .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
            .collect(),
    )
}

/// All pattern-valid unimodular 2×2 blocks with entries in [−bound, bound].
fn unimodular_patterns(bound: i64) -> Vec<Pattern2x2> {
    let mut out = Vec::new();
    for p in -bound..=bound {
        for q in -bound..=bound {
            for r in -bound..=bound {
                for s in -bound..=bound {
                    if let Ok(pat) = Pattern2x2::from_i64s(&[&[p, q], &[r, s]]) {
                        out.push(pat);
                    }
                }
            }
        }
    }
    out
}

/// Every constructible family automorphism with integer parameters in
/// [−bound, bound], mod-2 parameters over {0, 1}, blocks from `patterns`.
fn family_box(variant: Variant, bound: i64, patterns: &[Pattern2x2]) -> Vec<Aut3> {
    let mut out = Vec::new();
    match variant {
        Variant::B1 => {
            for block in patterns {
                for family in Family3::ALL {
                    for a in -bound..=bound {
                        if let Ok(f) = Aut3::b1(family, a, block.clone()) {
                            out.push(f);
                        }
                    }
                }
            }
        }
        Variant::A0 => {
            for family in Family3::ALL {
                for a in -bound..=bound {
                    for b in -bound..=bound {
                        for c in 0..2u8 {
                            out.push(Aut3::a0(family, a, b, c));
                        }
                    }
                }
            }
        }
        Variant::A1 => {
            for family in Family3::ALL {
                for a in -bound..=bound {
                    for c in -bound..=bound {
                        for d in 0..2u8 {
                            out.push(Aut3::a1(family, a, c, d));
                        }
                    }
                }
            }
        }
        Variant::B0 => {
            for block in patterns {
                for family in [Family3::Alpha, Family3::Beta] {
                    for a in -bound..=bound {
                        out.push(Aut3::b0(family, a, block.clone()).unwrap());
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_01_two_step_kernels_exhaustive() {
    let start = Instant::now();
    let t = Tower::g2();
    let range = -20i64..=20;
    let words: Vec<(g2::G2Word, NormalWord)> = range
        .clone()
        .flat_map(|a| range.clone().map(move |b| (g2_word(a, b), w(&[a, b]))))
        .collect();
    let mut mismatches = 0usize;
    for (xt, xw) in &words {
        for (yt, yw) in &words {
            if word_of_g2(&g2_mul(xt, yt)) != t.mul(xw, yw) {
                mismatches += 1;
            }
        }
        for m in -30i64..=30 {
            let m = BigInt::from(m);
            if word_of_g2(&g2_pow(xt, &m)) != t.pow(xw, &m) {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(mismatches, 0, "two-step kernel disagrees with the engine");
    assert!(
        elapsed < Duration::from_secs(10),
        "criterion 1 took {elapsed:?}, budget is 10 s"
    );
    println!(
        "criterion 1 PASS: {} products + {} powers match the engine, 0 mismatches, {elapsed:?}",
        words.len() * words.len(),
        words.len() * 61
    );
}

#[test]
fn criterion_02_three_step_kernels_sampled() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc2);
    for variant in Variant::ALL {
        let t = variant.tower();
        let mut mismatches = 0usize;
        for _ in 0..10_000 {
            let x = rand_word(&mut rng, 3, 15);
            let y = rand_word(&mut rng, 3, 15);
            if g3::g3_mul(variant, &x, &y) != t.mul(&x, &y) {
                mismatches += 1;
            }
        }
        for _ in 0..10_000 {
            let x = rand_word(&mut rng, 3, 15);
            let m = BigInt::from(rng.gen_range(-25i64..=25));
            if g3::g3_pow(variant, &x, &m) != t.pow(&x, &m) {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0, "{variant}: kernel disagrees with the engine");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "criterion 2 took {elapsed:?}, budget is 30 s"
    );
    println!(
        "criterion 2 PASS: 10⁴ products and 10⁴ powers per variant match the engine, {elapsed:?}"
    );
}

#[test]
fn criterion_03_composition_table_and_inner_generators() {
    let t = Tower::g2();
    // exhaustive table-vs-engine comparison, all 16 family pairs
    let mut checked = 0usize;
    for ff in Family2::ALL {
        for gf in Family2::ALL {
            for fa in -6i64..=6 {
                for ga in -6i64..=6 {
                    let f = Aut2::new(ff, fa);
                    let g = Aut2::new(gf, ga);
                    let composed = aut2_compose(&f, &g);
                    let engine = t.compose_aut(&f.matrix(), &g.matrix()).unwrap();
                    assert_eq!(composed.matrix(), engine, "{f} ∘ {g}");
                    checked += 1;
                }
            }
        }
    }
    // α_1∘α_1 = γ_2
    let a1 = Aut2::new(Family2::Alpha, 1);
    assert_eq!(aut2_compose(&a1, &a1), Aut2::new(Family2::Gamma, 2));
    // ⟨α_1², β_0⟩ generates exactly {β_even, γ_even} with parameters in [−10,10]
    let generators = [
        aut2_compose(&a1, &a1),
        Aut2::new(Family2::Beta, 0),
    ];
    let in_range = |f: &Aut2| num_traits::Signed::abs(&f.a) <= BigInt::from(10);
    let mut closure: HashSet<Aut2> = HashSet::new();
    let mut frontier: Vec<Aut2> = Vec::new();
    for g in &generators {
        for h in [g.clone(), aut2_inverse(g)] {
            if in_range(&h) && closure.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    while let Some(f) = frontier.pop() {
        for g in &generators {
            for h in [
                aut2_compose(&f, g),
                aut2_compose(g, &f),
                aut2_compose(&f, &aut2_inverse(g)),
                aut2_compose(&aut2_inverse(g), &f),
            ] {
                if in_range(&h) && closure.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
    }
    let expected: HashSet<Aut2> = (-5i64..=5)
        .flat_map(|k| {
            [
                Aut2::new(Family2::Beta, 2 * k),
                Aut2::new(Family2::Gamma, 2 * k),
            ]
        })
        .collect();
    assert_eq!(closure, expected, "⟨α_1², β_0⟩ truncated to |a| ≤ 10");
    println!(
        "criterion 3 PASS: {checked} exhaustive compositions match the engine; α_1∘α_1 = γ_2; \
         ⟨α_1², β_0⟩ spans exactly the even β/γ parameters"
    );
}

#[test]
fn criterion_04_out_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc4);
    let families = Family2::ALL;
    for _ in 0..1_000 {
        let f = Aut2::new(families[rng.gen_range(0..4)], rng.gen_range(-8i64..=8));
        let inner = inner_from_element_g2(&rand_word(&mut rng, 2, 8));
        assert!(aut2_is_inner(&inner));
        let class = aut2_out_class(&f);
        assert_eq!(aut2_out_class(&aut2_compose(&inner, &f)), class, "{inner} ∘ {f}");
        assert_eq!(aut2_out_class(&aut2_compose(&f, &inner)), class, "{f} ∘ {inner}");
    }
    // the four representatives are pairwise in distinct classes
    let reps = OutClass2::ALL.map(|c| c.representative());
    for (i, r) in reps.iter().enumerate() {
        for s in &reps[i + 1..] {
            assert!(
                !aut2_is_inner(&aut2_compose(r, &aut2_inverse(s))),
                "{r} and {s} fell into one class"
            );
        }
    }
    println!(
        "criterion 4 PASS: out class constant on 10³ sampled inner compositions; \
         4 representatives pairwise distinct"
    );
}

/// i64 mirror of the closed-form product, used to scan the 5⁹ matrix box
/// without allocation. Cross-checked against the BigInt kernel below.
fn mul3(v: Variant, x: [i64; 3], y: [i64; 3]) -> [i64; 3] {
    let m = |t: i64| t.rem_euclid(2);
    let pw = |t: i64| if t % 2 == 0 { 1 } else { -1 };
    let z2 = x[2] + y[2];
    match v {
        Variant::B1 => [
            x[0] + y[0] * pw(x[1] + x[2]) + m(x[2]) * m(y[1]) * pw(x[1]),
            x[1] + y[1],
            z2,
        ],
        Variant::A0 => [x[0] + y[0] * pw(x[1]), x[1] + y[1] * pw(x[2]), z2],
        Variant::A1 => [
            x[0] + (y[0] + m(y[1]) * x[2]) * pw(x[1]),
            x[1] + y[1] * pw(x[2]),
            z2,
        ],
        Variant::B0 => [x[0] + y[0] * pw(x[1] + x[2]), x[1] + y[1], z2],
    }
}

fn inv3(v: Variant, x: [i64; 3]) -> [i64; 3] {
    let m = |t: i64| t.rem_euclid(2);
    let pw = |t: i64| if t % 2 == 0 { 1 } else { -1 };
    match v {
        Variant::B1 => [
            -(x[0] + m(x[2]) * m(x[1]) * pw(x[1])) * pw(x[1] + x[2]),
            -x[1],
            -x[2],
        ],
        Variant::A0 => [-x[0] * pw(x[1]), -x[1] * pw(x[2]), -x[2]],
        Variant::A1 => [
            -x[0] * pw(x[1]) - m(x[1]) * x[2],
            -x[1] * pw(x[2]),
            -x[2],
        ],
        Variant::B0 => [-x[0] * pw(x[1] + x[2]), -x[1], -x[2]],
    }
}

/// Relation preservation of the column map, on machine integers: the
/// image of each defining conjugation relation must collapse correctly.
fn preserves_relations_fast(v: Variant, cols: [[i64; 3]; 3]) -> bool {
    let conj = |a: [i64; 3], b: [i64; 3]| mul3(v, mul3(v, a, b), inv3(v, a));
    let [c1, c2, c3] = cols;
    // g2·g1·g2⁻¹ = g1⁻¹
    if conj(c2, c1) != inv3(v, c1) {
        return false;
    }
    // g3·g1·g3⁻¹ and g3·g2·g3⁻¹ per variant
    let (r2, r3) = match v {
        Variant::B1 => (inv3(v, c1), mul3(v, c1, c2)),
        Variant::A0 => (c1, inv3(v, c2)),
        Variant::A1 => (c1, mul3(v, c1, inv3(v, c2))),
        Variant::B0 => (inv3(v, c1), c2),
    };
    conj(c3, c1) == r2 && conj(c3, c2) == r3
}

fn pow3(v: Variant, x: [i64; 3], e: i64) -> [i64; 3] {
    let (base, reps) = if e < 0 { (inv3(v, x), -e) } else { (x, e) };
    let mut acc = [0i64; 3];
    for _ in 0..reps {
        acc = mul3(v, acc, base);
    }
    acc
}

/// Columns of a matrix as i64 triples; `None` if an entry overflows i64.
fn i64_columns(m: &AutMatrix) -> Option<[[i64; 3]; 3]> {
    use num_traits::ToPrimitive;
    let mut cols = [[0i64; 3]; 3];
    for (c, col) in cols.iter_mut().enumerate() {
        for (r, slot) in col.iter_mut().enumerate() {
            *slot = m.entry(r, c).to_i64()?;
        }
    }
    Some(cols)
}

/// Applies the column map of `cols` to the word with the given exponents.
fn apply3(v: Variant, cols: [[i64; 3]; 3], e: [i64; 3]) -> [i64; 3] {
    let mut acc = [0i64; 3];
    for (col, exp) in cols.iter().zip(e) {
        acc = mul3(v, acc, pow3(v, *col, exp));
    }
    acc
}

/// True iff the column maps of `f` and `g` compose to the identity both
/// ways (g_i ↦ g_i), i.e. g is the compositional inverse of f.
fn composes_to_identity(v: Variant, f: [[i64; 3]; 3], g: [[i64; 3]; 3]) -> bool {
    let units = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    (0..3).all(|i| {
        apply3(v, f, g[i]) == units[i] && apply3(v, g, f[i]) == units[i]
    })
}

#[test]
fn criterion_05_membership_box() {
    let start = Instant::now();
    // the i64 mirrors must agree with the BigInt kernels before the scan
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    for variant in Variant::ALL {
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    let x = [a, b, c];
                    let xi = inv3(variant, x);
                    assert_eq!(mul3(variant, x, xi), [0, 0, 0]);
                    assert_eq!(
                        variant.tower().inv(&w(&x)),
                        w(&xi),
                        "{variant}: inv3 of {x:?}"
                    );
                    let y = [
                        rng.gen_range(-3i64..=3),
                        rng.gen_range(-3i64..=3),
                        rng.gen_range(-3i64..=3),
                    ];
                    assert_eq!(
                        g3::g3_mul(variant, &w(&x), &w(&y)),
                        w(&mul3(variant, x, y)),
                        "{variant}: mul3 of {x:?}·{y:?}"
                    );
                }
            }
        }
    }

    // soundness + round-trip completeness: every family matrix from the
    // parameter box passes the engine with the family inverse formula, and
    // membership classifies it back to the same element. The box strictly
    // covers every family matrix whose entries fit in [−2,2] (parameters
    // are read off entries directly), so the per-variant sets built here
    // enumerate ALL family matrices inside the scan box below.
    let patterns = unimodular_patterns(3);
    let mut sound = 0usize;
    let mut family_sets: Vec<HashSet<[[i64; 3]; 3]>> = Vec::new();
    for variant in Variant::ALL {
        let t = variant.tower();
        let mut set = HashSet::new();
        for f in family_box(variant, 4, &patterns) {
            let matrix = f.matrix();
            let inv = aut3_inverse(&f).matrix();
            let preimages = [inv.column(0), inv.column(1), inv.column(2)];
            assert_eq!(
                t.is_automorphism(&matrix, &preimages),
                Ok(true),
                "{f} rejected by the engine"
            );
            assert_eq!(
                aut3_membership(variant, &matrix).as_ref(),
                Some(&f),
                "membership does not round-trip {f}"
            );
            sound += 1;
            if let Some(cols) = i64_columns(&matrix) {
                if cols.iter().flatten().all(|e| e.abs() <= 2) {
                    set.insert(cols);
                }
            }
        }
        family_sets.push(set);
    }

    // completeness: over the full 5⁹ entry box, membership accepts exactly
    // the matrices that preserve relations and have an in-family inverse.
    // The compositional inverse of an automorphism is unique and the family
    // system is closed under inverses, so "has an in-family inverse" is
    // equivalent to being a family matrix — certified by the enumerated
    // per-variant sets; for accepted matrices the family inverse is
    // additionally verified to compose to the identity both ways.
    let mut scanned = 0usize;
    let mut accepted = 0usize;
    for (variant, family_set) in Variant::ALL.into_iter().zip(&family_sets) {
        let t = variant.tower();
        let mut cross_checked = 0usize;
        for code in 0..5u64.pow(9) {
            let mut digits = code;
            let mut m = [[0i64; 3]; 3];
            for row in &mut m {
                for e in row.iter_mut() {
                    *e = (digits % 5) as i64 - 2;
                    digits /= 5;
                }
            }
            let cols = [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ];
            let matrix = AutMatrix::from_i64s(&[&m[0], &m[1], &m[2]]);
            let claimed = aut3_membership(variant, &matrix);
            let preserves = preserves_relations_fast(variant, cols);
            // spot-check the fast relation test against the engine
            if code % 100_000 == 0 {
                assert_eq!(t.preserves_relations(&matrix), Ok(preserves), "{matrix}");
                cross_checked += 1;
            }
            match &claimed {
                Some(f) => {
                    assert!(preserves, "{variant}: accepted {matrix} breaks a relation");
                    assert!(
                        family_set.contains(&cols),
                        "{variant}: accepted {matrix} is not an enumerated family matrix"
                    );
                    let inv_cols = i64_columns(&aut3_inverse(f).matrix())
                        .expect("family inverse entries fit i64");
                    assert!(
                        composes_to_identity(variant, cols, inv_cols),
                        "{variant}: family inverse of {matrix} is not two-sided"
                    );
                    accepted += 1;
                }
                None => assert!(
                    !family_set.contains(&cols),
                    "{variant}: rejected {matrix} has an in-family inverse"
                ),
            }
            scanned += 1;
        }
        assert!(cross_checked >= 19, "{variant}: engine spot checks ran");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "criterion 5 took {elapsed:?}, budget is 2 min"
    );
    println!(
        "criterion 5 PASS: {sound} family matrices engine-verified; {scanned} matrices scanned, \
         {accepted} accepted, boundary exact, {elapsed:?}"
    );
}

#[test]
fn criterion_06_out_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc6);
    let patterns = unimodular_patterns(2);
    for variant in Variant::ALL {
        let pool = family_box(variant, 6, &patterns);
        for _ in 0..1_000 {
            let f = &pool[rng.gen_range(0..pool.len())];
            let g = &pool[rng.gen_range(0..pool.len())];
            assert_eq!(
                out_class(&aut3_compose(f, g)),
                out_compose(&out_class(f), &out_class(g)),
                "{f} ∘ {g}"
            );
        }
    }
    println!("criterion 6 PASS: out_compose matches composed classification on 10³ pairs per variant");
}

#[test]
fn criterion_07_twist_sequence_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    let mut configs = 0usize;
    for which in 0..102usize {
        let (t, alpha, a) = match which % 3 {
            0 => {
                let s = if rng.gen() { 1 } else { -1 };
                let m = AutMatrix::from_i64s(&[&[s]]);
                (
                    Tower::z(),
                    Automorphism {
                        forward: m.clone(),
                        inverse: m,
                    },
                    rand_word(&mut rng, 1, 6),
                )
            }
            1 => {
                let (forward, inverse) = loop {
                    let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-3i64..=3)).collect();
                    let det = e[0] * e[3] - e[1] * e[2];
                    if det.abs() == 1 {
                        break (
                            AutMatrix::from_i64s(&[&[e[0], e[1]], &[e[2], e[3]]]),
                            AutMatrix::from_i64s(&[
                                &[det * e[3], -det * e[1]],
                                &[-det * e[2], det * e[0]],
                            ]),
                        );
                    }
                };
                (
                    Tower::zxz(),
                    Automorphism { forward, inverse },
                    rand_word(&mut rng, 2, 5),
                )
            }
            _ => {
                let f = Aut2::new(Family2::ALL[rng.gen_range(0..4)], rng.gen_range(-6i64..=6));
                (
                    Tower::g2(),
                    Automorphism {
                        forward: f.matrix(),
                        inverse: aut2_inverse(&f).matrix(),
                    },
                    rand_word(&mut rng, 2, 5),
                )
            }
        };
        let mut seq = TwistSequence::new(t.clone(), alpha.clone(), a.clone()).unwrap();
        for k in -12i64..=12 {
            let alpha_k = t.aut_pow(&alpha, &BigInt::from(k)).unwrap();
            // (1) A_k = α^k(A_{−k}^{−1})
            let ak = seq.a_k(&BigInt::from(k));
            let amk_inv = t.inv(&seq.a_k(&BigInt::from(-k)));
            assert_eq!(
                ak,
                t.apply_aut(&alpha_k.forward, &amk_inv).unwrap(),
                "identity (1), config {which}, k = {k}"
            );
            // (2) A_k^{−1}·A_{k+k2} = α^k(A_{k2})
            let ak_inv = t.inv(&ak);
            for k2 in -12i64..=12 {
                let lhs = t.mul(&ak_inv, &seq.a_k(&BigInt::from(k + k2)));
                let rhs = t
                    .apply_aut(&alpha_k.forward, &seq.a_k(&BigInt::from(k2)))
                    .unwrap();
                assert_eq!(lhs, rhs, "identity (2), config {which}, k1 = {k}, k2 = {k2}");
            }
        }
        configs += 1;
    }
    println!(
        "criterion 7 PASS: both telescoping identities hold over {configs} configurations × k ∈ [−12,12]"
    );
}

#[test]
fn criterion_08_witnesses() {
    let g2t = Tower::g2();
    let zxz = Tower::zxz();
    let aut = |f: Aut2| Automorphism {
        forward: f.matrix(),
        inverse: aut2_inverse(&f).matrix(),
    };
    let witnesses = vec![
        inner_twist_witness(&g2t, &aut(Aut2::new(Family2::Alpha, 1)), &g2t.generator(1)).unwrap(),
        inner_twist_witness(&g2t, &Automorphism::identity(2), &g2t.generator(2)).unwrap(),
        inner_twist_witness(&g2t, &aut(Aut2::new(Family2::Delta, 3)), &w(&[2, -1])).unwrap(),
        inner_twist_witness(&g2t, &aut(Aut2::new(Family2::Beta, -2)), &g2t.identity()).unwrap(),
        inner_twist_witness(
            &zxz,
            &Automorphism {
                forward: AutMatrix::from_i64s(&[&[0, 1], &[1, 0]]),
                inverse: AutMatrix::from_i64s(&[&[0, 1], &[1, 0]]),
            },
            &w(&[1, 2]),
        )
        .unwrap(),
        conjugation_witness(
            &g2t,
            &aut(Aut2::new(Family2::Alpha, 0)),
            &aut(Aut2::new(Family2::Gamma, 1)),
        )
        .unwrap(),
        conjugation_witness(
            &g2t,
            &aut(Aut2::new(Family2::Beta, 1)),
            &aut(Aut2::new(Family2::Delta, 2)),
        )
        .unwrap(),
        conjugation_witness(
            &zxz,
            &Automorphism {
                forward: AutMatrix::from_i64s(&[&[0, 1], &[1, 0]]),
                inverse: AutMatrix::from_i64s(&[&[0, 1], &[1, 0]]),
            },
            &Automorphism {
                forward: AutMatrix::from_i64s(&[&[1, 1], &[0, 1]]),
                inverse: AutMatrix::from_i64s(&[&[1, -1], &[0, 1]]),
            },
        )
        .unwrap(),
    ];
    for (i, witness) in witnesses.iter().enumerate() {
        let report = verify_witness(witness, 1_000, 10, 0x8000 + i as u64).unwrap();
        assert!(
            report.passed(),
            "witness {i} failed verification: {report:?}"
        );
    }
    // negative controls: a corrupted forward map must be caught (either by
    // multiplicativity or by the round trips; which one fires depends on
    // whether the corrupted map happens to stay a homomorphism)
    let mut corrupted_caught = 0usize;
    for witness in [&witnesses[0], &witnesses[5]] {
        let report = verify_witness(&witness.with_corrupted_forward(), 1_000, 10, 0x9000).unwrap();
        assert!(
            report.multiplicativity_failures + report.round_trip_failures >= 1,
            "corruption went unnoticed: {report:?}"
        );
        corrupted_caught += 1;
    }
    println!(
        "criterion 8 PASS: {} witnesses verified with zero failures (10³ samples, bound 10); \
         {corrupted_caught} corrupted controls reported failures",
        witnesses.len()
    );
}

#[test]
fn criterion_09_center_facts() {
    let g2_squared = w(&[0, 2, 0]);
    let g3_squared = w(&[0, 0, 2]);
    // A0: g3² central
    assert!(Variant::A0.tower().is_central(&g3_squared));
    // B0 and B1: g2² and g3² central
    for variant in [Variant::B0, Variant::B1] {
        let t = variant.tower();
        assert!(t.is_central(&g2_squared), "{variant}: g2² should be central");
        assert!(t.is_central(&g3_squared), "{variant}: g3² should be central");
    }
    // A1: no nonidentity word with exponents in {−1,0,1}³ is central
    let t = Variant::A1.tower();
    let mut checked = 0usize;
    for a in -1i64..=1 {
        for b in -1i64..=1 {
            for c in -1i64..=1 {
                let x = w(&[a, b, c]);
                if x.is_identity() {
                    continue;
                }
                assert!(!t.is_central(&x), "a1: {x} should not be central");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 26);
    println!(
        "criterion 9 PASS: g3² central in a0; g2², g3² central in b0/b1; \
         all 26 small nonidentity words non-central in a1"
    );
}

#[test]
fn criterion_10_kernel_performance() {
    let m = BigInt::from(1_000_000i64);
    let mut lines = Vec::new();
    let median = |mut v: Vec<Duration>| {
        v.sort();
        v[v.len() / 2]
    };
    // two-step kernel
    {
        let t = Tower::g2();
        let x = g2_word(3, 5);
        let xw = w(&[3, 5]);
        assert_eq!(word_of_g2(&g2_pow(&x, &m)), t.pow(&xw, &m), "g2 results differ");
        let kernel = median(
            (0..100)
                .map(|_| {
                    let s = Instant::now();
                    black_box(g2_pow(black_box(&x), black_box(&m)));
                    s.elapsed()
                })
                .collect(),
        );
        let engine = median(
            (0..100)
                .map(|_| {
                    let s = Instant::now();
                    black_box(t.pow(black_box(&xw), black_box(&m)));
                    s.elapsed()
                })
                .collect(),
        );
        assert!(
            engine >= kernel * 5,
            "g2: engine {engine:?} not ≥5× kernel {kernel:?}"
        );
        lines.push(format!("g2 {}x", engine.as_nanos() / kernel.as_nanos().max(1)));
    }
    // three-step kernels
    for variant in Variant::ALL {
        let t = variant.tower();
        let x = w(&[2, 3, 5]);
        assert_eq!(
            g3::g3_pow(variant, &x, &m),
            t.pow(&x, &m),
            "{variant}: results differ"
        );
        let kernel = median(
            (0..100)
                .map(|_| {
                    let s = Instant::now();
                    black_box(g3::g3_pow(variant, black_box(&x), black_box(&m)));
                    s.elapsed()
                })
                .collect(),
        );
        let engine = median(
            (0..100)
                .map(|_| {
                    let s = Instant::now();
                    black_box(t.pow(black_box(&x), black_box(&m)));
                    s.elapsed()
                })
                .collect(),
        );
        assert!(
            engine >= kernel * 5,
            "{variant}: engine {engine:?} not ≥5× kernel {kernel:?}"
        );
        lines.push(format!(
            "{variant} {}x",
            engine.as_nanos() / kernel.as_nanos().max(1)
        ));
    }
    println!(
        "criterion 10 PASS: closed-form pow at m = 10⁶ beats the engine ≥5× on every preset ({})",
        lines.join(", ")
    );
}
