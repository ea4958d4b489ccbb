//! Closed-form kernels and the full automorphism calculus for the
//! two-generator tower ⟨g1, g2 | g2·g1 = g1⁻¹·g2⟩ (the Klein-bottle group).
//!
//! Elements are pairs `(a, b)` standing for the normal word g1^a·g2^b.
//! Products and powers follow from the sliding rule
//! g2^a·g1^b = g1^{b·(−1)^a}·g2^a, so no generic collection is needed.
//!
//! Every automorphism lies in one of four one-parameter families of
//! upper-triangular matrices (columns are generator images):
//!
//! ```text
//!   α_a = [1 a; 0 −1]   β_a = [−1 a; 0 1]   γ_a = [1 a; 0 1]   δ_a = [−1 a; 0 −1]
//! ```
//!
//! γ_0 is the identity. Composition stays inside the table, the inner
//! automorphisms are exactly β_even ∪ γ_even, and the outer-automorphism
//! group has the four representatives α_0, α_1, β_0, β_1.

use crate::engine::AutMatrix;
use crate::presentation::{NormalWord, ParseError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Parity indicator μ: 0 for even arguments, 1 for odd ones.
pub fn mu(x: &BigInt) -> BigInt {
    if x.is_even() {
        BigInt::zero()
    } else {
        BigInt::one()
    }
}

/// (−1)^x.
pub fn neg_one_pow(x: &BigInt) -> BigInt {
    if x.is_even() {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// A pair (a, b) naming the normal word g1^a·g2^b.
pub type G2Word = (BigInt, BigInt);

/// Builds a [`G2Word`] from machine integers.
pub fn g2_word(a: i64, b: i64) -> G2Word {
    (BigInt::from(a), BigInt::from(b))
}

/// Product of two normal words:
/// (a1, b1)·(a2, b2) = (a1 + a2·(−1)^{b1}, b1 + b2).
pub fn g2_mul(x: &G2Word, y: &G2Word) -> G2Word {
    (&x.0 + &y.0 * neg_one_pow(&x.1), &x.1 + &y.1)
}

/// m-th power of a normal word: (ma, mb) when b is even,
/// (μ(m)·a, mb) when b is odd.
pub fn g2_pow(x: &G2Word, m: &BigInt) -> G2Word {
    let (a, b) = x;
    if b.is_even() {
        (a * m, b * m)
    } else {
        (a * mu(m), b * m)
    }
}

/// Inverse of a normal word (the m = −1 power).
pub fn g2_inv(x: &G2Word) -> G2Word {
    g2_pow(x, &BigInt::from(-1))
}

/// The four automorphism families, tagged by the diagonal signs
/// (s1, s2) of their matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family2 {
    /// s = (+1, −1)
    Alpha,
    /// s = (−1, +1)
    Beta,
    /// s = (+1, +1); γ_0 is the identity automorphism.
    Gamma,
    /// s = (−1, −1)
    Delta,
}

impl Family2 {
    /// All four families, in α, β, γ, δ order.
    pub const ALL: [Family2; 4] = [Family2::Alpha, Family2::Beta, Family2::Gamma, Family2::Delta];

    /// Diagonal signs (s1, s2) of this family's matrices.
    pub fn signs(self) -> (i8, i8) {
        match self {
            Family2::Alpha => (1, -1),
            Family2::Beta => (-1, 1),
            Family2::Gamma => (1, 1),
            Family2::Delta => (-1, -1),
        }
    }

    /// The family with the given diagonal signs.
    pub fn from_signs(s1: i8, s2: i8) -> Family2 {
        match (s1 > 0, s2 > 0) {
            (true, false) => Family2::Alpha,
            (false, true) => Family2::Beta,
            (true, true) => Family2::Gamma,
            (false, false) => Family2::Delta,
        }
    }

    /// Lower-case family name.
    pub fn name(self) -> &'static str {
        match self {
            Family2::Alpha => "alpha",
            Family2::Beta => "beta",
            Family2::Gamma => "gamma",
            Family2::Delta => "delta",
        }
    }

    fn from_name(name: &str) -> Option<Family2> {
        Family2::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Family2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An automorphism of the two-generator tower, stored as family plus
/// integer parameter; the matrix form is derived on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aut2 {
    pub family: Family2,
    pub a: BigInt,
}

impl Aut2 {
    pub fn new(family: Family2, a: impl Into<BigInt>) -> Aut2 {
        Aut2 { family, a: a.into() }
    }

    /// The identity automorphism γ_0.
    pub fn identity() -> Aut2 {
        Aut2::new(Family2::Gamma, 0)
    }

    /// Matrix form [s1, a; 0, s2] (columns are generator images).
    pub fn matrix(&self) -> AutMatrix {
        let (s1, s2) = self.family.signs();
        AutMatrix::new(vec![
            vec![BigInt::from(s1), self.a.clone()],
            vec![BigInt::zero(), BigInt::from(s2)],
        ])
        .expect("2×2 family matrix is square")
    }

    /// Image of the word (x, y): (s1·x + μ(y)·a, s2·y). The parameter
    /// contributes only through the parity of y because the g2-image
    /// g1^a·g2^{s2} squares to g2^{2·s2}.
    pub fn apply(&self, w: &G2Word) -> G2Word {
        let (s1, s2) = self.family.signs();
        (BigInt::from(s1) * &w.0 + mu(&w.1) * &self.a, BigInt::from(s2) * &w.1)
    }
}

impl fmt::Display for Aut2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family.name(), self.a)
    }
}

/// Composition f ∘ g (apply g first): the family signs multiply
/// componentwise and the parameter is f.a + s1_f·g.a.
pub fn aut2_compose(f: &Aut2, g: &Aut2) -> Aut2 {
    let (fs1, fs2) = f.family.signs();
    let (gs1, gs2) = g.family.signs();
    Aut2 {
        family: Family2::from_signs(fs1 * gs1, fs2 * gs2),
        a: &f.a + BigInt::from(fs1) * &g.a,
    }
}

/// Inverse: α_a⁻¹ = α_{−a}, β_a⁻¹ = β_a, γ_a⁻¹ = γ_{−a}, δ_a⁻¹ = δ_a
/// (uniformly, the parameter flips to −s1·a inside the same family).
pub fn aut2_inverse(f: &Aut2) -> Aut2 {
    let (s1, _) = f.family.signs();
    Aut2 {
        family: f.family,
        a: -BigInt::from(s1) * &f.a,
    }
}

/// True iff f is a conjugation: Inn = {β_{2a}, γ_{2a} | a ∈ Z}.
pub fn aut2_is_inner(f: &Aut2) -> bool {
    matches!(f.family, Family2::Beta | Family2::Gamma) && f.a.is_even()
}

/// Conjugation by h = g1^a·g2^b as a classified automorphism:
/// γ_{2a} when b is even, β_{2a} when b is odd.
pub fn inner_from_element_g2(h: &NormalWord) -> Aut2 {
    assert_eq!(h.len(), 2, "inner_from_element_g2 expects a 2-generator word");
    let a = &h.exponents()[0];
    let b = &h.exponents()[1];
    let family = if b.is_even() { Family2::Gamma } else { Family2::Beta };
    Aut2 { family, a: a * 2 }
}

/// Classifies a 2×2 matrix into the families, if it fits: upper
/// triangular with ±1 diagonal. Returns `None` otherwise.
pub fn aut2_from_matrix(m: &AutMatrix) -> Option<Aut2> {
    if m.dim() != 2 || !m.entry(1, 0).is_zero() {
        return None;
    }
    let s1 = sign_of_unit(m.entry(0, 0))?;
    let s2 = sign_of_unit(m.entry(1, 1))?;
    Some(Aut2 {
        family: Family2::from_signs(s1, s2),
        a: m.entry(0, 1).clone(),
    })
}

pub(crate) fn sign_of_unit(x: &BigInt) -> Option<i8> {
    if x == &BigInt::one() {
        Some(1)
    } else if x == &(-BigInt::one()) {
        Some(-1)
    } else {
        None
    }
}

/// The four outer-automorphism classes, named by representative;
/// β_0 represents the identity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutClass2 {
    Alpha0,
    Alpha1,
    Beta0,
    Beta1,
}

impl OutClass2 {
    /// All four classes.
    pub const ALL: [OutClass2; 4] = [
        OutClass2::Alpha0,
        OutClass2::Alpha1,
        OutClass2::Beta0,
        OutClass2::Beta1,
    ];

    /// The class's named representative as an automorphism.
    pub fn representative(self) -> Aut2 {
        match self {
            OutClass2::Alpha0 => Aut2::new(Family2::Alpha, 0),
            OutClass2::Alpha1 => Aut2::new(Family2::Alpha, 1),
            OutClass2::Beta0 => Aut2::new(Family2::Beta, 0),
            OutClass2::Beta1 => Aut2::new(Family2::Beta, 1),
        }
    }
}

impl fmt::Display for OutClass2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative())
    }
}

/// Outer class of f: composing with inners reduces α/δ to α_{μ(a)} and
/// β/γ to β_{μ(a)} (the parameter survives only mod 2, and δ = inner ∘ α,
/// γ = inner ∘ β at matching parity).
pub fn aut2_out_class(f: &Aut2) -> OutClass2 {
    let parity_odd = f.a.is_odd();
    match f.family {
        Family2::Alpha | Family2::Delta => {
            if parity_odd {
                OutClass2::Alpha1
            } else {
                OutClass2::Alpha0
            }
        }
        Family2::Beta | Family2::Gamma => {
            if parity_odd {
                OutClass2::Beta1
            } else {
                OutClass2::Beta0
            }
        }
    }
}

/// Parses the text form `alpha(3)`, `beta(-1)`, ….
pub fn parse_aut2(text: &str) -> Result<Aut2, ParseError> {
    let s = text.trim();
    let base = text.len() - text.trim_start().len();
    let open = s.find('(').ok_or_else(|| ParseError {
        pos: base + s.len(),
        msg: "expected `family(parameter)`".to_string(),
    })?;
    let family = Family2::from_name(s[..open].trim()).ok_or_else(|| ParseError {
        pos: base,
        msg: format!("unknown family `{}` (expected alpha/beta/gamma/delta)", s[..open].trim()),
    })?;
    let rest = &s[open + 1..];
    let close = rest.rfind(')').ok_or_else(|| ParseError {
        pos: base + s.len(),
        msg: "missing `)`".to_string(),
    })?;
    if !rest[close + 1..].trim().is_empty() {
        return Err(ParseError {
            pos: base + open + 1 + close + 1,
            msg: "trailing input after `)`".to_string(),
        });
    }
    let inner = rest[..close].trim();
    let a: BigInt = inner.parse().map_err(|_| ParseError {
        pos: base + open + 1,
        msg: format!("`{inner}` is not an integer"),
    })?;
    Ok(Aut2 { family, a })
}
