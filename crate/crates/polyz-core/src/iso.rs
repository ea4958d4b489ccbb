//! Constructive isomorphism witnesses between semidirect products
//! H ⋊_φ Z, together with sampled verification.
//!
//! Two constructions are provided. When the twisting automorphisms differ
//! by an inner automorphism — β = ι_a ∘ α for some a ∈ H — the products
//! are isomorphic via the *twisted translation* (h, k) ↦ (h·A_k, k),
//! where A_k is the telescoping sequence
//!
//! ```text
//! A_0 = e,   A_k = a·α(a)···α^{k−1}(a)  (k > 0),
//! A_k = α^{−1}(a^{−1})···α^{k}(a^{−1})  (k < 0),
//! ```
//!
//! realized by [`TwistSequence`] with memoization of consecutive values.
//! When instead β = ψ∘α∘ψ^{−1} for an automorphism ψ, the products are
//! isomorphic via (g, k) ↦ (ψ(g), k). Both witnesses carry their data
//! (base tower, twists, the element a or the conjugator ψ) and serialize
//! to JSON; [`verify_witness`] replays a seeded sample of multiplicativity
//! and round-trip checks and reports failures as data.
//!
//! Everything here is pure values: a witness is immutable, and each
//! [`IsoWitness::mapper`] call builds its own memoized state, so
//! concurrent verification of one witness is safe.

use crate::engine::{AutMatrix, Automorphism, EngineError, Tower};
use crate::presentation::NormalWord;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn inverse_columns(m: &AutMatrix) -> Vec<NormalWord> {
    (0..m.dim()).map(|c| m.column(c)).collect()
}

/// Errors with `NotAnAutomorphism` unless `f` (forward matrix plus claimed
/// inverse) really is an automorphism of `t`.
fn ensure_automorphism(t: &Tower, f: &Automorphism) -> Result<(), EngineError> {
    if t.is_automorphism(&f.forward, &inverse_columns(&f.inverse))? {
        Ok(())
    } else {
        Err(EngineError::NotAnAutomorphism)
    }
}

/// The sequence A_k attached to (H, α, a), with every consecutive value
/// between 0 and the largest queried k memoized — verification replays
/// many nearby k, so the incremental recurrences
/// A_{k+1} = A_k·α^k(a) and A_{k−1} = A_k·α^{k−1}(a^{−1})
/// dominate the cost.
#[derive(Debug, Clone)]
pub struct TwistSequence {
    base: Tower,
    alpha: Automorphism,
    a: NormalWord,
    /// pos[k] = A_k for 0 ≤ k < pos.len()
    pos: Vec<NormalWord>,
    /// neg[j] = A_{−j} for 0 ≤ j < neg.len()
    neg: Vec<NormalWord>,
    /// α^{pos.len()−1}(a): the next factor extending `pos`
    next_fwd: NormalWord,
    /// α^{−neg.len()}(a^{−1}): the next factor extending `neg`
    next_bwd: NormalWord,
}

impl TwistSequence {
    /// Validates that α is an automorphism of the base and that `a` lives
    /// in it, then starts the sequence at A_0 = e.
    pub fn new(base: Tower, alpha: Automorphism, a: NormalWord) -> Result<TwistSequence, EngineError> {
        ensure_automorphism(&base, &alpha)?;
        if a.len() != base.n() {
            return Err(EngineError::DimensionMismatch {
                expected: base.n(),
                got: a.len(),
            });
        }
        let next_bwd = base.apply_aut(&alpha.inverse, &base.inv(&a))?;
        Ok(TwistSequence {
            next_fwd: a.clone(),
            pos: vec![base.identity()],
            neg: vec![base.identity()],
            next_bwd,
            base,
            alpha,
            a,
        })
    }

    pub fn base(&self) -> &Tower {
        &self.base
    }

    pub fn alpha(&self) -> &Automorphism {
        &self.alpha
    }

    pub fn element(&self) -> &NormalWord {
        &self.a
    }

    /// A_k, in O(|k|) automorphism applications the first time and O(1)
    /// afterwards. Panics if |k| does not fit in an i64 (such a value
    /// could never be computed term by term anyway).
    pub fn a_k(&mut self, k: &BigInt) -> NormalWord {
        let k: i64 = k.try_into().expect("twist sequence index fits in i64");
        if k >= 0 {
            let k = k as usize;
            while self.pos.len() <= k {
                let next = self.base.mul(self.pos.last().unwrap(), &self.next_fwd);
                self.pos.push(next);
                self.next_fwd = self
                    .base
                    .apply_aut(&self.alpha.forward, &self.next_fwd)
                    .expect("sequence factor has the base dimension");
            }
            self.pos[k].clone()
        } else {
            let j = k.unsigned_abs() as usize;
            while self.neg.len() <= j {
                let next = self.base.mul(self.neg.last().unwrap(), &self.next_bwd);
                self.neg.push(next);
                self.next_bwd = self
                    .base
                    .apply_aut(&self.alpha.inverse, &self.next_bwd)
                    .expect("sequence factor has the base dimension");
            }
            self.neg[j].clone()
        }
    }
}

/// One-shot A_k; builds a fresh [`TwistSequence`] and queries it.
pub fn twist_sequence(
    base: &Tower,
    alpha: &Automorphism,
    a: &NormalWord,
    k: &BigInt,
) -> Result<NormalWord, EngineError> {
    Ok(TwistSequence::new(base.clone(), alpha.clone(), a.clone())?.a_k(k))
}

/// Which construction produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    InnerTwist,
    Conjugation,
}

/// Kind-specific witness data: the conjugating element for twisted
/// translations, the conjugating automorphism for conjugations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum WitnessData {
    InnerTwist { element: NormalWord },
    Conjugation { conjugator: Automorphism },
}

/// A constructive isomorphism between two semidirect products over the
/// same base tower H:
///
/// * inner twist (β = ι_a∘α): H ⋊_β Z → H ⋊_α Z, (h, k) ↦ (h·A_k, k),
///   inverse (h, k) ↦ (h·A_k^{−1}, k);
/// * conjugation (β = ψ∘α∘ψ^{−1}): H ⋊_α Z → H ⋊_β Z, (g, k) ↦ (ψ(g), k).
///
/// The struct stores only the defining data; [`IsoWitness::mapper`] builds
/// the executable maps and [`verify_witness`] samples their correctness.
/// The JSON form records the kind, the base tower, both Z-twists, the
/// element/conjugator, and the most recent verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    #[serde(flatten)]
    data: WitnessData,
    base: Tower,
    source_twist: Automorphism,
    target_twist: Automorphism,
    /// Outcome of the most recent [`verify_witness`] run, if attached.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<VerifyReport>,
}

impl IsoWitness {
    pub fn kind(&self) -> WitnessKind {
        match self.data {
            WitnessData::InnerTwist { .. } => WitnessKind::InnerTwist,
            WitnessData::Conjugation { .. } => WitnessKind::Conjugation,
        }
    }

    /// The shared base tower H.
    pub fn base_tower(&self) -> &Tower {
        &self.base
    }

    /// The Z-action of the source product (β for inner twists, α for
    /// conjugations).
    pub fn source_twist(&self) -> &Automorphism {
        &self.source_twist
    }

    /// The Z-action of the target product (α for inner twists,
    /// β = ψ∘α∘ψ^{−1} for conjugations).
    pub fn target_twist(&self) -> &Automorphism {
        &self.target_twist
    }

    /// The conjugating element a (inner twists only).
    pub fn twist_element(&self) -> Option<&NormalWord> {
        match &self.data {
            WitnessData::InnerTwist { element } => Some(element),
            WitnessData::Conjugation { .. } => None,
        }
    }

    /// The conjugating automorphism ψ (conjugations only).
    pub fn conjugator(&self) -> Option<&Automorphism> {
        match &self.data {
            WitnessData::Conjugation { conjugator } => Some(conjugator),
            WitnessData::InnerTwist { .. } => None,
        }
    }

    /// The source product H ⋊ Z as a tower, revalidating the twist (so a
    /// tampered serialized witness fails here rather than mid-map).
    pub fn source(&self) -> Result<Tower, EngineError> {
        self.base.extend(
            self.source_twist.forward.clone(),
            &inverse_columns(&self.source_twist.inverse),
        )
    }

    /// The target product H ⋊ Z as a tower.
    pub fn target(&self) -> Result<Tower, EngineError> {
        self.base.extend(
            self.target_twist.forward.clone(),
            &inverse_columns(&self.target_twist.inverse),
        )
    }

    /// Builds the executable forward/backward maps. Each call owns its
    /// memoized twist sequence, so mappers from the same witness can be
    /// used concurrently.
    pub fn mapper(&self) -> Result<WitnessMapper, EngineError> {
        let source = self.source()?;
        let target = self.target()?;
        let (seq, psi) = match &self.data {
            WitnessData::InnerTwist { element } => (
                Some(TwistSequence::new(
                    self.base.clone(),
                    self.target_twist.clone(),
                    element.clone(),
                )?),
                None,
            ),
            WitnessData::Conjugation { conjugator } => (None, Some(conjugator.clone())),
        };
        Ok(WitnessMapper {
            base: self.base.clone(),
            source,
            target,
            seq,
            psi,
        })
    }

    /// Negative-control copy whose forward map is deliberately wrong: the
    /// stored element a (resp. the first column of ψ) is multiplied by g1
    /// while the products themselves are left alone, so verification must
    /// report multiplicativity failures. Over an *abelian* base every
    /// twisted translation happens to be an isomorphism of something, so
    /// the corruption is only detectable over a nonabelian base such as
    /// the Klein-bottle tower.
    pub fn with_corrupted_forward(&self) -> IsoWitness {
        let mut w = self.clone();
        w.report = None;
        let g1 = self.base.generator(1);
        w.data = match &self.data {
            WitnessData::InnerTwist { element } => WitnessData::InnerTwist {
                element: self.base.mul(element, &g1),
            },
            WitnessData::Conjugation { conjugator } => {
                let mut cols: Vec<NormalWord> = (0..conjugator.dim())
                    .map(|c| conjugator.forward.column(c))
                    .collect();
                cols[0] = self.base.mul(&cols[0], &g1);
                WitnessData::Conjugation {
                    conjugator: Automorphism {
                        forward: AutMatrix::from_columns(&cols)
                            .expect("columns keep the base dimension"),
                        inverse: conjugator.inverse.clone(),
                    },
                }
            }
        };
        w
    }
}

/// Builds the inner-twist witness H ⋊_β Z → H ⋊_α Z for β = ι_a∘α.
/// β is computed here from α and a; errors if α is not an automorphism
/// of the base or `a` has the wrong dimension.
pub fn inner_twist_witness(
    base: &Tower,
    alpha: &Automorphism,
    a: &NormalWord,
) -> Result<IsoWitness, EngineError> {
    ensure_automorphism(base, alpha)?;
    let n = base.n();
    if a.len() != n {
        return Err(EngineError::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let a_inv = base.inv(a);
    let mut fwd_cols = Vec::with_capacity(n);
    let mut inv_cols = Vec::with_capacity(n);
    for i in 1..=n {
        let g = base.generator(i);
        // β(g) = a·α(g)·a⁻¹
        fwd_cols.push(base.conjugate(a, &base.apply_aut(&alpha.forward, &g)?));
        // β⁻¹(g) = α⁻¹(a⁻¹·g·a)
        inv_cols.push(base.apply_aut(&alpha.inverse, &base.conjugate(&a_inv, &g))?);
    }
    let beta = Automorphism {
        forward: AutMatrix::from_columns(&fwd_cols)?,
        inverse: AutMatrix::from_columns(&inv_cols)?,
    };
    debug_assert_eq!(base.is_automorphism(&beta.forward, &inv_cols), Ok(true));
    Ok(IsoWitness {
        data: WitnessData::InnerTwist { element: a.clone() },
        base: base.clone(),
        source_twist: beta,
        target_twist: alpha.clone(),
        report: None,
    })
}

/// Builds the conjugation witness G ⋊_α Z → G ⋊_β Z for β = ψ∘α∘ψ^{−1}.
/// β is computed here; errors if α or ψ is not an automorphism of the base.
pub fn conjugation_witness(
    base: &Tower,
    alpha: &Automorphism,
    psi: &Automorphism,
) -> Result<IsoWitness, EngineError> {
    ensure_automorphism(base, alpha)?;
    ensure_automorphism(base, psi)?;
    let beta = Automorphism {
        forward: base.compose_aut(&psi.forward, &base.compose_aut(&alpha.forward, &psi.inverse)?)?,
        inverse: base.compose_aut(&psi.forward, &base.compose_aut(&alpha.inverse, &psi.inverse)?)?,
    };
    Ok(IsoWitness {
        data: WitnessData::Conjugation {
            conjugator: psi.clone(),
        },
        base: base.clone(),
        source_twist: alpha.clone(),
        target_twist: beta,
        report: None,
    })
}

/// Executable forward/backward maps of a witness. Words passed to the
/// maps are elements of the source (resp. target) product: base exponents
/// first, the Z-exponent last.
#[derive(Debug, Clone)]
pub struct WitnessMapper {
    base: Tower,
    source: Tower,
    target: Tower,
    seq: Option<TwistSequence>,
    psi: Option<Automorphism>,
}

impl WitnessMapper {
    pub fn source(&self) -> &Tower {
        &self.source
    }

    pub fn target(&self) -> &Tower {
        &self.target
    }

    fn split(&self, x: &NormalWord) -> (NormalWord, BigInt) {
        let n = self.base.n();
        assert_eq!(x.len(), n + 1, "expected an element of the product tower");
        (x.prefix(n), x.exponents()[n].clone())
    }

    fn join(&self, h: NormalWord, k: BigInt) -> NormalWord {
        let mut exps = h.exponents().to_vec();
        exps.push(k);
        NormalWord::new(exps)
    }

    /// φ(h, k): (h·A_k, k) for inner twists, (ψ(h), k) for conjugations.
    pub fn forward(&mut self, x: &NormalWord) -> NormalWord {
        let (h, k) = self.split(x);
        let image = match (&mut self.seq, &self.psi) {
            (Some(seq), _) => {
                let a_k = seq.a_k(&k);
                self.base.mul(&h, &a_k)
            }
            (None, Some(psi)) => self
                .base
                .apply_aut(&psi.forward, &h)
                .expect("conjugator has the base dimension"),
            (None, None) => unreachable!("mapper always carries its kind's data"),
        };
        self.join(image, k)
    }

    /// φ^{−1}(h, k): (h·A_k^{−1}, k) for inner twists, (ψ^{−1}(h), k) for
    /// conjugations.
    pub fn backward(&mut self, x: &NormalWord) -> NormalWord {
        let (h, k) = self.split(x);
        let image = match (&mut self.seq, &self.psi) {
            (Some(seq), _) => {
                let a_k = seq.a_k(&k);
                self.base.mul(&h, &self.base.inv(&a_k))
            }
            (None, Some(psi)) => self
                .base
                .apply_aut(&psi.inverse, &h)
                .expect("conjugator has the base dimension"),
            (None, None) => unreachable!("mapper always carries its kind's data"),
        };
        self.join(image, k)
    }
}

/// Outcome of a sampled witness verification. Failures are data, not
/// errors; `passed` means every sampled check succeeded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// RNG seed, recorded so any run can be replayed exactly.
    pub seed: u64,
    pub sample_count: usize,
    pub exponent_bound: i64,
    pub multiplicativity_failures: usize,
    pub round_trip_failures: usize,
    /// Up to eight failing samples, rendered as text.
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.multiplicativity_failures == 0 && self.round_trip_failures == 0
    }
}

const REPORTED_FAILURES: usize = 8;

/// Replays `sample_count` seeded checks of the witness: multiplicativity
/// φ(x·y) = φ(x)·φ(y) with x, y drawn uniformly with exponents in
/// [−bound, bound], plus both round trips φ^{−1}∘φ = id and φ∘φ^{−1} = id.
/// Errors only when the witness data is structurally unusable (tampered
/// towers, dimension mismatches); check failures land in the report.
pub fn verify_witness(
    w: &IsoWitness,
    sample_count: usize,
    exponent_bound: i64,
    seed: u64,
) -> Result<VerifyReport, EngineError> {
    let mut mapper = w.mapper()?;
    let n = mapper.source().n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        seed,
        sample_count,
        exponent_bound,
        multiplicativity_failures: 0,
        round_trip_failures: 0,
        failures: Vec::new(),
    };
    let bound = exponent_bound.abs();
    let sample = |rng: &mut ChaCha8Rng| {
        NormalWord::new(
            (0..n)
                .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
                .collect(),
        )
    };
    // the identity must map to the identity: φ(e) = φ(e·e) = φ(e)² forces
    // it, but check it outright so a constant-offset corruption cannot
    // hide from an unlucky sample
    let id = mapper.source().identity();
    if mapper.forward(&id) != mapper.target().identity() {
        report.multiplicativity_failures += 1;
        report.failures.push("identity: φ(e) ≠ e".to_string());
    }
    for _ in 0..sample_count {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let xy = mapper.source().mul(&x, &y);
        let fx = mapper.forward(&x);
        let fy = mapper.forward(&y);
        let fxy = mapper.forward(&xy);
        if fxy != mapper.target().mul(&fx, &fy) {
            report.multiplicativity_failures += 1;
            if report.failures.len() < REPORTED_FAILURES {
                report.failures.push(format!("multiplicativity: x = {x}, y = {y}"));
            }
        }
        if mapper.backward(&fx) != x {
            report.round_trip_failures += 1;
            if report.failures.len() < REPORTED_FAILURES {
                report.failures.push(format!("round trip φ⁻¹∘φ: x = {x}"));
            }
        }
        let z = sample(&mut rng);
        let bz = mapper.backward(&z);
        if mapper.forward(&bz) != z {
            report.round_trip_failures += 1;
            if report.failures.len() < REPORTED_FAILURES {
                report.failures.push(format!("round trip φ∘φ⁻¹: z = {z}"));
            }
        }
    }
    Ok(report)
}
