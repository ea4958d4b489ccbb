//! Closed-form kernels and the automorphism calculus for the four
//! three-generator towers built over the Klein-bottle group.
//!
//! Each variant extends ⟨g1, g2 | g2·g1 = g1⁻¹·g2⟩ by a third generator
//! acting through one outer class of the base group:
//!
//! | variant | g3·g1·g3⁻¹ | g3·g2·g3⁻¹ | base-class action |
//! |---------|------------|------------|-------------------|
//! | `b1`    | g1⁻¹       | g1·g2      | beta(1)           |
//! | `a0`    | g1         | g2⁻¹       | alpha(0)          |
//! | `a1`    | g1         | g1·g2⁻¹    | alpha(1)          |
//! | `b0`    | g1⁻¹       | g2         | beta(0)           |
//!
//! Elements are length-3 normal words (a, b, c) = g1^a·g2^b·g3^c; products
//! and powers are closed forms validated against the generic engine.
//!
//! Every automorphism is an upper block-triangular matrix (columns are
//! generator images) falling into families tagged α/β/γ/δ. For `b1`/`b0`
//! the lower 2×2 block ranges over parity-patterned unimodular matrices
//! ([`Pattern2x2`]); for `a0`/`a1` the families are parameterized by
//! integers plus one mod-2 bit. The top-right entry is *not* free whenever
//! the defining relation g3·g2·g3⁻¹ twists by g1: for `b1` it is pinned to
//! the (1,2)-parameter plus a family offset, and for `a1` it equals
//! (s1 − (−1)^d)/2 where s1 is the (1,1)-sign and (−1)^d the (3,3)-entry.
//! Membership, inverses, the inner-automorphism test, and the outer-class
//! calculus all enforce these constraints and are cross-checked against
//! the engine's relation-preservation oracle.

use crate::engine::{AutMatrix, Tower};
use crate::g2::{self, mu, neg_one_pow, sign_of_unit};
use crate::presentation::{NormalWord, ParseError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The four three-generator towers, named by the outer class of the
/// Klein-bottle automorphism the third generator acts through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    B1,
    A0,
    A1,
    B0,
}

impl Variant {
    /// All four variants.
    pub const ALL: [Variant; 4] = [Variant::B1, Variant::A0, Variant::A1, Variant::B0];

    /// Lower-case variant name (`b1`, `a0`, `a1`, `b0`).
    pub fn name(self) -> &'static str {
        match self {
            Variant::B1 => "b1",
            Variant::A0 => "a0",
            Variant::A1 => "a1",
            Variant::B0 => "b0",
        }
    }

    /// Parses a variant name.
    pub fn from_name(name: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == name)
    }

    /// The generic-engine tower for this variant.
    pub fn tower(self) -> Tower {
        match self {
            Variant::B1 => Tower::b1(),
            Variant::A0 => Tower::a0(),
            Variant::A1 => Tower::a1(),
            Variant::B0 => Tower::b0(),
        }
    }

    /// The Klein-bottle automorphism g3 acts through.
    pub fn phi2(self) -> g2::Aut2 {
        match self {
            Variant::B1 => g2::Aut2::new(g2::Family2::Beta, 1),
            Variant::A0 => g2::Aut2::new(g2::Family2::Alpha, 0),
            Variant::A1 => g2::Aut2::new(g2::Family2::Alpha, 1),
            Variant::B0 => g2::Aut2::new(g2::Family2::Beta, 0),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn exps(x: &NormalWord) -> (&BigInt, &BigInt, &BigInt) {
    assert_eq!(x.len(), 3, "expected a 3-generator word");
    let e = x.exponents();
    (&e[0], &e[1], &e[2])
}

/// Product of two normal words by the variant's swap rules, in normal form.
pub fn g3_mul(variant: Variant, x: &NormalWord, y: &NormalWord) -> NormalWord {
    let (x1, x2, x3) = exps(x);
    let (y1, y2, y3) = exps(y);
    let z3 = x3 + y3;
    let (z1, z2) = match variant {
        // g2 and g3 both invert g1; pushing y's g1-block left past
        // g2^{x2} g3^{x3} picks up (−1)^{x2+x3}, and y's g2-block past
        // g3^{x3} deposits g1^{μ(x3)μ(y2)} behind g2^{x2}.
        Variant::B1 => (
            x1 + y1 * neg_one_pow(&(x2 + x3)) + mu(x3) * mu(y2) * neg_one_pow(x2),
            x2 + y2,
        ),
        // g3 fixes g1 and inverts g2.
        Variant::A0 => (x1 + y1 * neg_one_pow(x2), x2 + y2 * neg_one_pow(x3)),
        // g3 sends g2 to g1 g2⁻¹: the crossing g2-block of y leaves
        // g1^{μ(y2)·x3} behind g3^{x3}.
        Variant::A1 => (
            x1 + (y1 + mu(y2) * x3) * neg_one_pow(x2),
            x2 + y2 * neg_one_pow(x3),
        ),
        // g2 and g3 both invert g1 and commute with each other.
        Variant::B0 => (x1 + y1 * neg_one_pow(&(x2 + x3)), x2 + y2),
    };
    NormalWord::new(vec![z1, z2, z3])
}

/// m-th power of a normal word by the variant's closed form (exact for
/// every integer m; ⌊m/2⌋ is floor division).
pub fn g3_pow(variant: Variant, x: &NormalWord, m: &BigInt) -> NormalWord {
    let (a, b, c) = exps(x);
    let two = BigInt::from(2);
    let half = m.div_floor(&two);
    let (z1, z2, z3) = match variant {
        Variant::B1 => {
            let z1 = match (b.is_even(), c.is_even()) {
                (true, true) => a * m,
                (false, false) => a * m - half,
                _ => a * mu(m),
            };
            (z1, b * m, c * m)
        }
        Variant::A0 => (
            if b.is_even() { a * m } else { a * mu(m) },
            if c.is_even() { b * m } else { b * mu(m) },
            c * m,
        ),
        Variant::A1 => {
            let z1 = if b.is_even() {
                a * m
            } else {
                a * mu(m) + half * c * neg_one_pow(&(m + BigInt::one()))
            };
            let z2 = if c.is_even() { b * m } else { b * mu(m) };
            (z1, z2, c * m)
        }
        Variant::B0 => (
            if (b + c).is_even() { a * m } else { a * mu(m) },
            b * m,
            c * m,
        ),
    };
    NormalWord::new(vec![z1, z2, z3])
}

/// Parity pattern of an invertible 2×2 block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// Even diagonal, odd anti-diagonal (the α/β block pattern).
    EvenDiag,
    /// Odd diagonal, even anti-diagonal; contains the identity.
    OddDiag,
}

impl PatternKind {
    /// Block label used in the text form: `A` for even-diagonal blocks,
    /// `B` for odd-diagonal ones.
    pub fn letter(self) -> char {
        match self {
            PatternKind::EvenDiag => 'A',
            PatternKind::OddDiag => 'B',
        }
    }

    /// Kind of a product of blocks: even-diagonal acts like an odd bit
    /// (EvenDiag·EvenDiag = OddDiag, OddDiag is neutral).
    pub fn product(self, other: PatternKind) -> PatternKind {
        if (self == PatternKind::EvenDiag) ^ (other == PatternKind::EvenDiag) {
            PatternKind::EvenDiag
        } else {
            PatternKind::OddDiag
        }
    }
}

/// Rejection reasons for [`Pattern2x2::classify`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern block must be 2×2, got {0}×{0}")]
    Dimension(usize),
    #[error("entry parities fit neither pattern (need even diagonal + odd anti-diagonal or the reverse)")]
    Parity,
    #[error("determinant {0} is not ±1")]
    Determinant(BigInt),
}

/// A unimodular 2×2 integer matrix whose entry parities follow one of the
/// two patterns above. These are exactly the blocks the three-generator
/// automorphism families carry on the (g2, g3) coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AutMatrix", into = "AutMatrix")]
pub struct Pattern2x2 {
    kind: PatternKind,
    mat: AutMatrix,
}

impl Pattern2x2 {
    /// Validates parities and determinant; classifies the pattern kind.
    pub fn classify(mat: AutMatrix) -> Result<Pattern2x2, PatternError> {
        if mat.dim() != 2 {
            return Err(PatternError::Dimension(mat.dim()));
        }
        let diag_even = mat.entry(0, 0).is_even() && mat.entry(1, 1).is_even();
        let anti_even = mat.entry(0, 1).is_even() && mat.entry(1, 0).is_even();
        let diag_odd = mat.entry(0, 0).is_odd() && mat.entry(1, 1).is_odd();
        let anti_odd = mat.entry(0, 1).is_odd() && mat.entry(1, 0).is_odd();
        let kind = if diag_even && anti_odd {
            PatternKind::EvenDiag
        } else if diag_odd && anti_even {
            PatternKind::OddDiag
        } else {
            return Err(PatternError::Parity);
        };
        let det = Self::det_of(&mat);
        if !det.magnitude().is_one() {
            return Err(PatternError::Determinant(det));
        }
        Ok(Pattern2x2 { kind, mat })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64s(rows: &[&[i64]]) -> Result<Pattern2x2, PatternError> {
        Pattern2x2::classify(AutMatrix::from_i64s(rows))
    }

    /// The identity block (odd diagonal).
    pub fn identity() -> Pattern2x2 {
        Pattern2x2 {
            kind: PatternKind::OddDiag,
            mat: AutMatrix::identity(2),
        }
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn matrix(&self) -> &AutMatrix {
        &self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        self.mat.entry(r, c)
    }

    fn det_of(mat: &AutMatrix) -> BigInt {
        mat.entry(0, 0) * mat.entry(1, 1) - mat.entry(0, 1) * mat.entry(1, 0)
    }

    /// The determinant, always ±1.
    pub fn det(&self) -> BigInt {
        Self::det_of(&self.mat)
    }

    /// Inverse block: ±adjugate, still integral and pattern-valid.
    pub fn inverse(&self) -> Pattern2x2 {
        let s = self.det();
        let m = AutMatrix::new(vec![
            vec![&s * self.entry(1, 1), -(&s * self.entry(0, 1))],
            vec![-(&s * self.entry(1, 0)), &s * self.entry(0, 0)],
        ])
        .expect("adjugate of a 2×2 block is 2×2");
        Pattern2x2::classify(m).expect("inverting preserves parity pattern and unimodularity")
    }

    /// Ordinary 2×2 integer matrix product (the g2/g3 coordinates compose
    /// linearly, so automorphism blocks multiply like matrices).
    pub fn mul(&self, other: &Pattern2x2) -> Pattern2x2 {
        let mut rows = vec![vec![BigInt::zero(); 2], vec![BigInt::zero(); 2]];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = self.entry(r, 0) * other.entry(0, c) + self.entry(r, 1) * other.entry(1, c);
            }
        }
        let m = AutMatrix::new(rows).expect("2×2 product is 2×2");
        Pattern2x2::classify(m).expect("pattern blocks are closed under products")
    }
}

impl TryFrom<AutMatrix> for Pattern2x2 {
    type Error = PatternError;
    fn try_from(mat: AutMatrix) -> Result<Pattern2x2, PatternError> {
        Pattern2x2::classify(mat)
    }
}

impl From<Pattern2x2> for AutMatrix {
    fn from(p: Pattern2x2) -> AutMatrix {
        p.mat
    }
}

impl fmt::Display for Pattern2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.mat.fmt(f)
    }
}

/// Family tag for three-generator automorphisms. The meaning of the tag
/// (diagonal signs, block pattern) depends on the variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family3 {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Family3 {
    pub const ALL: [Family3; 4] = [Family3::Alpha, Family3::Beta, Family3::Gamma, Family3::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Family3::Alpha => "alpha",
            Family3::Beta => "beta",
            Family3::Gamma => "gamma",
            Family3::Delta => "delta",
        }
    }

    fn from_name(name: &str) -> Option<Family3> {
        Family3::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Family3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// b1 family ↦ ((1,1)-sign, required block pattern).
fn b1_signature(family: Family3) -> (i8, PatternKind) {
    match family {
        Family3::Alpha => (1, PatternKind::EvenDiag),
        Family3::Beta => (-1, PatternKind::EvenDiag),
        Family3::Gamma => (1, PatternKind::OddDiag),
        Family3::Delta => (-1, PatternKind::OddDiag),
    }
}

fn b1_family(s1: i8, kind: PatternKind) -> Family3 {
    match (s1 > 0, kind) {
        (true, PatternKind::EvenDiag) => Family3::Alpha,
        (false, PatternKind::EvenDiag) => Family3::Beta,
        (true, PatternKind::OddDiag) => Family3::Gamma,
        (false, PatternKind::OddDiag) => Family3::Delta,
    }
}

/// b1 top-row offset: the (1,3) entry is the (1,2) parameter plus this.
fn b1_offset(family: Family3) -> i8 {
    match family {
        Family3::Alpha => 1,
        Family3::Beta => 0,
        Family3::Gamma => 0,
        Family3::Delta => -1,
    }
}

/// a0/a1 family ↦ ((1,1)-sign, (2,2)-sign).
fn a_signs(family: Family3) -> (i8, i8) {
    match family {
        Family3::Alpha => (1, 1),
        Family3::Beta => (1, -1),
        Family3::Gamma => (-1, 1),
        Family3::Delta => (-1, -1),
    }
}

fn a_family(s1: i8, s2: i8) -> Family3 {
    match (s1 > 0, s2 > 0) {
        (true, true) => Family3::Alpha,
        (true, false) => Family3::Beta,
        (false, true) => Family3::Gamma,
        (false, false) => Family3::Delta,
    }
}

/// a1: the (1,3) entry forced by the (1,1)-sign and the (3,3)-sign
/// exponent d — preservation of g3·g2·g3⁻¹ = g1·g2⁻¹ demands
/// 2·entry = s1 − (−1)^d.
fn a1_forced_entry(s1: i8, d: u8) -> i8 {
    let eps: i8 = if d == 0 { 1 } else { -1 };
    (s1 - eps) / 2
}

/// Construction errors for [`Aut3`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Aut3Error {
    #[error("family {family} carries {expected:?} blocks, got a {got:?} block")]
    BlockFamilyMismatch {
        family: Family3,
        expected: PatternKind,
        got: PatternKind,
    },
    #[error("the b0 tower has only alpha and beta families")]
    B0Family,
    #[error("the (1,3) entry of an a1 {family} matrix with d={d} is forced to {expected}, got {got}")]
    ForcedEntry {
        family: Family3,
        d: u8,
        expected: i8,
        got: BigInt,
    },
}

/// A classified automorphism of one of the three-generator towers,
/// parameter-encoded; the 3×3 matrix is a derived view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Aut3 {
    /// [s1, a, a+offset; 0, block] with an even-diagonal block for α/β and
    /// an odd-diagonal block for γ/δ; offsets +1/0/0/−1 per family.
    B1 {
        family: Family3,
        a: BigInt,
        block: Pattern2x2,
    },
    /// [s1, a, 0; 0, s2, 2b; 0, 0, (−1)^c] with families by sign pair.
    A0 {
        family: Family3,
        a: BigInt,
        b: BigInt,
        c: u8,
    },
    /// [s1, a, (s1−(−1)^d)/2; 0, s2, 2c; 0, 0, (−1)^d]; the (1,3) entry
    /// carries no free parameter.
    A1 {
        family: Family3,
        a: BigInt,
        c: BigInt,
        d: u8,
    },
    /// [s1, a, a; 0, block] with either block pattern; families α (s1=+1)
    /// and β (s1=−1) only.
    B0 {
        family: Family3,
        a: BigInt,
        block: Pattern2x2,
    },
}

impl Aut3 {
    /// b1 constructor; the block pattern must match the family.
    pub fn b1(family: Family3, a: impl Into<BigInt>, block: Pattern2x2) -> Result<Aut3, Aut3Error> {
        let (_, expected) = b1_signature(family);
        if block.kind() != expected {
            return Err(Aut3Error::BlockFamilyMismatch {
                family,
                expected,
                got: block.kind(),
            });
        }
        Ok(Aut3::B1 {
            family,
            a: a.into(),
            block,
        })
    }

    /// a0 constructor (no constraints; c is reduced mod 2).
    pub fn a0(family: Family3, a: impl Into<BigInt>, b: impl Into<BigInt>, c: u8) -> Aut3 {
        Aut3::A0 {
            family,
            a: a.into(),
            b: b.into(),
            c: c % 2,
        }
    }

    /// a1 constructor on the free parameters; the (1,3) matrix entry is
    /// derived (d is reduced mod 2).
    pub fn a1(family: Family3, a: impl Into<BigInt>, c: impl Into<BigInt>, d: u8) -> Aut3 {
        Aut3::A1 {
            family,
            a: a.into(),
            c: c.into(),
            d: d % 2,
        }
    }

    /// a1 constructor that also takes the (1,3) entry and checks it
    /// against the forced value.
    pub fn a1_checked(
        family: Family3,
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: u8,
    ) -> Result<Aut3, Aut3Error> {
        let d = d % 2;
        let (s1, _) = a_signs(family);
        let expected = a1_forced_entry(s1, d);
        let b = b.into();
        if b != BigInt::from(expected) {
            return Err(Aut3Error::ForcedEntry {
                family,
                d,
                expected,
                got: b,
            });
        }
        Ok(Aut3::a1(family, a, c, d))
    }

    /// b0 constructor; only α and β exist.
    pub fn b0(family: Family3, a: impl Into<BigInt>, block: Pattern2x2) -> Result<Aut3, Aut3Error> {
        if !matches!(family, Family3::Alpha | Family3::Beta) {
            return Err(Aut3Error::B0Family);
        }
        Ok(Aut3::B0 {
            family,
            a: a.into(),
            block,
        })
    }

    /// The identity automorphism of the given variant.
    pub fn identity(variant: Variant) -> Aut3 {
        match variant {
            Variant::B1 => Aut3::b1(Family3::Gamma, 0, Pattern2x2::identity())
                .expect("identity block is odd-diagonal"),
            Variant::A0 => Aut3::a0(Family3::Alpha, 0, 0, 0),
            Variant::A1 => Aut3::a1(Family3::Alpha, 0, 0, 0),
            Variant::B0 => Aut3::b0(Family3::Alpha, 0, Pattern2x2::identity())
                .expect("alpha is a b0 family"),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Aut3::B1 { .. } => Variant::B1,
            Aut3::A0 { .. } => Variant::A0,
            Aut3::A1 { .. } => Variant::A1,
            Aut3::B0 { .. } => Variant::B0,
        }
    }

    pub fn family(&self) -> Family3 {
        match self {
            Aut3::B1 { family, .. }
            | Aut3::A0 { family, .. }
            | Aut3::A1 { family, .. }
            | Aut3::B0 { family, .. } => *family,
        }
    }

    /// a1 only: the derived (1,3) matrix entry.
    pub fn a1_entry(&self) -> Option<i8> {
        match self {
            Aut3::A1 { family, d, .. } => Some(a1_forced_entry(a_signs(*family).0, *d)),
            _ => None,
        }
    }

    /// The 3×3 matrix view (columns are generator images).
    pub fn matrix(&self) -> AutMatrix {
        let rows = match self {
            Aut3::B1 { family, a, block } => {
                let (s1, _) = b1_signature(*family);
                vec![
                    vec![BigInt::from(s1), a.clone(), a + BigInt::from(b1_offset(*family))],
                    vec![BigInt::zero(), block.entry(0, 0).clone(), block.entry(0, 1).clone()],
                    vec![BigInt::zero(), block.entry(1, 0).clone(), block.entry(1, 1).clone()],
                ]
            }
            Aut3::A0 { family, a, b, c } => {
                let (s1, s2) = a_signs(*family);
                vec![
                    vec![BigInt::from(s1), a.clone(), BigInt::zero()],
                    vec![BigInt::zero(), BigInt::from(s2), b * 2],
                    vec![BigInt::zero(), BigInt::zero(), BigInt::from(1 - 2 * (*c as i8))],
                ]
            }
            Aut3::A1 { family, a, c, d } => {
                let (s1, s2) = a_signs(*family);
                vec![
                    vec![
                        BigInt::from(s1),
                        a.clone(),
                        BigInt::from(a1_forced_entry(s1, *d)),
                    ],
                    vec![BigInt::zero(), BigInt::from(s2), c * 2],
                    vec![BigInt::zero(), BigInt::zero(), BigInt::from(1 - 2 * (*d as i8))],
                ]
            }
            Aut3::B0 { family, a, block } => {
                let s1: i8 = if *family == Family3::Alpha { 1 } else { -1 };
                vec![
                    vec![BigInt::from(s1), a.clone(), a.clone()],
                    vec![BigInt::zero(), block.entry(0, 0).clone(), block.entry(0, 1).clone()],
                    vec![BigInt::zero(), block.entry(1, 0).clone(), block.entry(1, 1).clone()],
                ]
            }
        };
        AutMatrix::new(rows).expect("family matrices are square")
    }
}

impl fmt::Display for Aut3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aut3::B1 { family, a, block } => write!(
                f,
                "b1:{}(a={}; {}={})",
                family,
                a,
                block.kind().letter(),
                block
            ),
            Aut3::A0 { family, a, b, c } => write!(f, "a0:{family}(a={a}; b={b}; c={c})"),
            Aut3::A1 { family, a, c, d } => write!(
                f,
                "a1:{}(a={}; b={}; c={}; d={})",
                family,
                a,
                self.a1_entry().expect("a1 value"),
                c,
                d
            ),
            Aut3::B0 { family, a, block } => write!(f, "b0:{family}(a={a}; M={block})"),
        }
    }
}

/// Classifies a 3×3 matrix into the variant's automorphism families.
/// Returns `None` when any shape constraint fails: first column not ±e1,
/// block not pattern-valid/unimodular, a pinned entry off its forced
/// value, or a diagonal sign not ±1.
pub fn aut3_membership(variant: Variant, m: &AutMatrix) -> Option<Aut3> {
    if m.dim() != 3 || !m.entry(1, 0).is_zero() || !m.entry(2, 0).is_zero() {
        return None;
    }
    let s1 = sign_of_unit(m.entry(0, 0))?;
    let block = || {
        AutMatrix::new(vec![
            vec![m.entry(1, 1).clone(), m.entry(1, 2).clone()],
            vec![m.entry(2, 1).clone(), m.entry(2, 2).clone()],
        ])
        .ok()
        .and_then(|b| Pattern2x2::classify(b).ok())
    };
    match variant {
        Variant::B1 => {
            let block = block()?;
            let family = b1_family(s1, block.kind());
            let a = m.entry(0, 1).clone();
            if m.entry(0, 2) != &(&a + BigInt::from(b1_offset(family))) {
                return None;
            }
            Some(Aut3::B1 { family, a, block })
        }
        Variant::B0 => {
            let block = block()?;
            if m.entry(0, 2) != m.entry(0, 1) {
                return None;
            }
            let family = if s1 > 0 { Family3::Alpha } else { Family3::Beta };
            Some(Aut3::B0 {
                family,
                a: m.entry(0, 1).clone(),
                block,
            })
        }
        Variant::A0 => {
            if !m.entry(0, 2).is_zero() || !m.entry(2, 1).is_zero() || m.entry(1, 2).is_odd() {
                return None;
            }
            let s2 = sign_of_unit(m.entry(1, 1))?;
            let eps = sign_of_unit(m.entry(2, 2))?;
            Some(Aut3::A0 {
                family: a_family(s1, s2),
                a: m.entry(0, 1).clone(),
                b: m.entry(1, 2) / 2,
                c: if eps > 0 { 0 } else { 1 },
            })
        }
        Variant::A1 => {
            if !m.entry(2, 1).is_zero() || m.entry(1, 2).is_odd() {
                return None;
            }
            let s2 = sign_of_unit(m.entry(1, 1))?;
            let eps = sign_of_unit(m.entry(2, 2))?;
            let d = if eps > 0 { 0 } else { 1 };
            if m.entry(0, 2) != &BigInt::from(a1_forced_entry(s1, d)) {
                return None;
            }
            Some(Aut3::A1 {
                family: a_family(s1, s2),
                a: m.entry(0, 1).clone(),
                c: m.entry(1, 2) / 2,
                d,
            })
        }
    }
}

/// Inverse automorphism, staying in the same family system:
/// b1: α⁻¹ = α_{−a−1, A⁻¹}, β⁻¹ = β_{a, A⁻¹}, γ⁻¹ = γ_{−a, B⁻¹},
/// δ⁻¹ = δ_{a, B⁻¹}; a0: parameter signs flip per family
/// (α: −a,−b; β: −a,b; γ: a,−b; δ: a,b); a1 likewise on (a, c);
/// b0: α⁻¹ = α_{−a, M⁻¹}, β⁻¹ = β_{a, M⁻¹}.
pub fn aut3_inverse(f: &Aut3) -> Aut3 {
    match f {
        Aut3::B1 { family, a, block } => {
            let a = match family {
                Family3::Alpha => -(a + BigInt::one()),
                Family3::Beta => a.clone(),
                Family3::Gamma => -a,
                Family3::Delta => a.clone(),
            };
            Aut3::B1 {
                family: *family,
                a,
                block: block.inverse(),
            }
        }
        Aut3::A0 { family, a, b, c } => {
            let (s1, s2) = a_signs(*family);
            Aut3::A0 {
                family: *family,
                a: -BigInt::from(s1) * a,
                b: -BigInt::from(s2) * b,
                c: *c,
            }
        }
        Aut3::A1 { family, a, c, d } => {
            let (s1, s2) = a_signs(*family);
            Aut3::A1 {
                family: *family,
                a: -BigInt::from(s1) * a,
                c: -BigInt::from(s2) * c,
                d: *d,
            }
        }
        Aut3::B0 { family, a, block } => {
            let a = if *family == Family3::Alpha { -a } else { a.clone() };
            Aut3::B0 {
                family: *family,
                a,
                block: block.inverse(),
            }
        }
    }
}

/// Conjugation by h = (a, b, c) as a classified automorphism.
pub fn inner_from_element(variant: Variant, h: &NormalWord) -> Aut3 {
    let (a, b, c) = exps(h);
    match variant {
        // ι_h(g1) = g1^{(−1)^{b+c}}, ι_h(g2) = g1^{2a+μ(c)(−1)^b}·g2,
        // ι_h(g3) = g1^{2a−μ(b)}·g3: identity block, γ when b+c is even,
        // δ when odd.
        Variant::B1 => {
            let family = if (b + c).is_even() { Family3::Gamma } else { Family3::Delta };
            Aut3::B1 {
                family,
                a: a * 2 + mu(c) * neg_one_pow(b),
                block: Pattern2x2::identity(),
            }
        }
        // ι_h(g1) = g1^{(−1)^b}, ι_h(g2) = g1^{2a}·g2^{(−1)^c},
        // ι_h(g3) = g2^{2b}·g3.
        Variant::A0 => Aut3::A0 {
            family: a_family(if b.is_even() { 1 } else { -1 }, if c.is_even() { 1 } else { -1 }),
            a: a * 2,
            b: b.clone(),
            c: 0,
        },
        // ι_h(g1) = g1^{(−1)^b}, ι_h(g2) = g1^{2a+c(−1)^b}·g2^{(−1)^c},
        // ι_h(g3) = g1^{−μ(b)}·g2^{2b}·g3.
        Variant::A1 => Aut3::A1 {
            family: a_family(if b.is_even() { 1 } else { -1 }, if c.is_even() { 1 } else { -1 }),
            a: a * 2 + c * neg_one_pow(b),
            c: b.clone(),
            d: 0,
        },
        // ι_h(g1) = g1^{(−1)^{b+c}}, ι_h(g2) = g1^{2a}·g2,
        // ι_h(g3) = g1^{2a}·g3.
        Variant::B0 => {
            let family = if (b + c).is_even() { Family3::Alpha } else { Family3::Beta };
            Aut3::B0 {
                family,
                a: a * 2,
                block: Pattern2x2::identity(),
            }
        }
    }
}

/// True iff f is conjugation by some element — membership in the exact
/// image of [`inner_from_element`]:
/// b1: γ/δ with identity block (any parameter);
/// a0: c = 0, a even, and b even exactly for α/β;
/// a1: d = 0, a even exactly for α/γ, c even exactly for α/β;
/// b0: identity block and even parameter.
pub fn aut3_is_inner(f: &Aut3) -> bool {
    match f {
        Aut3::B1 { family, block, .. } => {
            matches!(family, Family3::Gamma | Family3::Delta) && *block == Pattern2x2::identity()
        }
        Aut3::A0 { family, a, b, c } => {
            *c == 0
                && a.is_even()
                && (b.is_even() == matches!(family, Family3::Alpha | Family3::Beta))
        }
        Aut3::A1 { family, a, c, d } => {
            *d == 0
                && (a.is_even() == matches!(family, Family3::Alpha | Family3::Gamma))
                && (c.is_even() == matches!(family, Family3::Alpha | Family3::Beta))
        }
        Aut3::B0 { a, block, .. } => a.is_even() && *block == Pattern2x2::identity(),
    }
}

/// An outer-automorphism class, carried by its canonical representative:
/// b1: [α_{0,A}] or [γ_{0,B}] (the block is a complete invariant);
/// b0: [α_{p,M}] with p ∈ {0,1};
/// a0 and a1: [α] with all parameters in {0,1} — eight classes each,
/// composing by coordinate-wise XOR.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Aut3", from = "Aut3")]
pub struct OutClass3 {
    rep: Aut3,
}

impl OutClass3 {
    /// The canonical representative.
    pub fn representative(&self) -> &Aut3 {
        &self.rep
    }

    pub fn variant(&self) -> Variant {
        self.rep.variant()
    }

    /// The identity class of a variant.
    pub fn identity(variant: Variant) -> OutClass3 {
        out_class(&Aut3::identity(variant))
    }
}

impl From<Aut3> for OutClass3 {
    fn from(f: Aut3) -> OutClass3 {
        out_class(&f)
    }
}

impl From<OutClass3> for Aut3 {
    fn from(c: OutClass3) -> Aut3 {
        c.rep
    }
}

impl fmt::Display for OutClass3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

fn bit(x: &BigInt) -> u8 {
    if x.is_odd() {
        1
    } else {
        0
    }
}

/// The outer class of f. Composing with inner automorphisms can flip the
/// family to the α side (b1: also γ) and reduce free parameters mod 2,
/// but leaves invariant: the block (b1/b0), the parameter parity (b0),
/// and for a0/a1 three mod-2 bits mixing parameter parities with the
/// diagonal signs.
pub fn out_class(f: &Aut3) -> OutClass3 {
    let rep = match f {
        Aut3::B1 { block, .. } => {
            let family = match block.kind() {
                PatternKind::EvenDiag => Family3::Alpha,
                PatternKind::OddDiag => Family3::Gamma,
            };
            Aut3::b1(family, 0, block.clone()).expect("kind matches by construction")
        }
        Aut3::A0 { family, a, b, c } => {
            let (s1, _) = a_signs(*family);
            let i = bit(a);
            let j = bit(b) ^ u8::from(s1 < 0);
            Aut3::a0(Family3::Alpha, i, j, *c)
        }
        Aut3::A1 { family, a, c, d } => {
            let (s1, s2) = a_signs(*family);
            let i = bit(a) ^ u8::from(s2 < 0);
            let j = bit(c) ^ u8::from(s1 < 0);
            Aut3::a1(Family3::Alpha, i, j, *d)
        }
        Aut3::B0 { a, block, .. } => {
            Aut3::b0(Family3::Alpha, bit(a), block.clone()).expect("alpha is a b0 family")
        }
    };
    OutClass3 { rep }
}

/// The outer class together with an explicit inner witness i such that
/// i ∘ f equals the canonical representative exactly.
pub fn out_class_with_witness(f: &Aut3) -> (OutClass3, Aut3) {
    let class = out_class(f);
    let witness = aut3_compose(class.representative(), &aut3_inverse(f));
    debug_assert!(aut3_is_inner(&witness));
    (class, witness)
}

/// Class-level composition: b1/b0 multiply the blocks (and XOR the b0
/// parity bit); a0/a1 XOR all three bits. Agrees with out_class of the
/// composed automorphisms.
pub fn out_compose(c1: &OutClass3, c2: &OutClass3) -> OutClass3 {
    let rep = match (&c1.rep, &c2.rep) {
        (Aut3::B1 { block: p, .. }, Aut3::B1 { block: q, .. }) => {
            let prod = p.mul(q);
            let family = match prod.kind() {
                PatternKind::EvenDiag => Family3::Alpha,
                PatternKind::OddDiag => Family3::Gamma,
            };
            Aut3::b1(family, 0, prod).expect("kind matches by construction")
        }
        (Aut3::A0 { a: a1, b: b1, c: e1, .. }, Aut3::A0 { a: a2, b: b2, c: e2, .. }) => {
            Aut3::a0(Family3::Alpha, bit(a1) ^ bit(a2), bit(b1) ^ bit(b2), e1 ^ e2)
        }
        (Aut3::A1 { a: a1, c: c1, d: d1, .. }, Aut3::A1 { a: a2, c: c2, d: d2, .. }) => {
            Aut3::a1(Family3::Alpha, bit(a1) ^ bit(a2), bit(c1) ^ bit(c2), d1 ^ d2)
        }
        (Aut3::B0 { a: a1, block: p, .. }, Aut3::B0 { a: a2, block: q, .. }) => {
            Aut3::b0(Family3::Alpha, bit(a1) ^ bit(a2), p.mul(q)).expect("alpha is a b0 family")
        }
        (f, g) => panic!(
            "cannot compose outer classes of different variants ({} and {})",
            f.variant(),
            g.variant()
        ),
    };
    OutClass3 { rep }
}

/// Composition f ∘ g through the engine's matrix composition, classified
/// back into the families (which are closed under composition).
pub fn aut3_compose(f: &Aut3, g: &Aut3) -> Aut3 {
    assert_eq!(
        f.variant(),
        g.variant(),
        "cannot compose automorphisms of different variants"
    );
    let tower = f.variant().tower();
    let m = tower
        .compose_aut(&f.matrix(), &g.matrix())
        .expect("family matrices have the tower's dimension");
    aut3_membership(f.variant(), &m)
        .expect("the classified families are closed under composition")
}

/// Parses the text form `b1:alpha(a=0; A=[[0,1],[1,0]])`,
/// `a0:beta(a=1; b=-2; c=1)`, `a1:gamma(a=2; b=-1; c=0; d=0)`,
/// `b0:beta(a=2; M=[[1,0],[0,1]])`. The a1 `b=` field is optional and
/// validated against the forced value when present; block labels A/B/M
/// are interchangeable on input.
pub fn parse_aut3(text: &str) -> Result<Aut3, ParseError> {
    let s = text.trim();
    let base = text.len() - text.trim_start().len();
    let err = |pos: usize, msg: String| ParseError { pos: base + pos, msg };
    let colon = s
        .find(':')
        .ok_or_else(|| err(s.len(), "expected `variant:family(...)`".to_string()))?;
    let variant = Variant::from_name(s[..colon].trim())
        .ok_or_else(|| err(0, format!("unknown variant `{}` (expected b1/a0/a1/b0)", s[..colon].trim())))?;
    let rest = &s[colon + 1..];
    let open = rest
        .find('(')
        .ok_or_else(|| err(s.len(), "expected `family(key=value; ...)`".to_string()))?;
    let family = Family3::from_name(rest[..open].trim()).ok_or_else(|| {
        err(
            colon + 1,
            format!("unknown family `{}` (expected alpha/beta/gamma/delta)", rest[..open].trim()),
        )
    })?;
    let body_start = colon + 1 + open + 1;
    let body = &rest[open + 1..];
    let close = body
        .rfind(')')
        .ok_or_else(|| err(s.len(), "missing `)`".to_string()))?;
    if !body[close + 1..].trim().is_empty() {
        return Err(err(body_start + close + 1, "trailing input after `)`".to_string()));
    }
    let mut ints: Vec<(String, BigInt)> = Vec::new();
    let mut blocks: Vec<Pattern2x2> = Vec::new();
    for piece in body[..close].split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let eq = piece
            .find('=')
            .ok_or_else(|| err(body_start, format!("expected `key=value`, got `{piece}`")))?;
        let key = piece[..eq].trim();
        let value = piece[eq + 1..].trim();
        match key {
            "a" | "b" | "c" | "d" => {
                if ints.iter().any(|(k, _)| k == key) {
                    return Err(err(body_start, format!("duplicate key `{key}`")));
                }
                let v: BigInt = value
                    .parse()
                    .map_err(|_| err(body_start, format!("`{value}` is not an integer")))?;
                ints.push((key.to_string(), v));
            }
            "A" | "B" | "M" => {
                if !blocks.is_empty() {
                    return Err(err(body_start, "duplicate block".to_string()));
                }
                let mat: AutMatrix = serde_json::from_str(value)
                    .map_err(|e| err(body_start, format!("bad block matrix: {e}")))?;
                let p = Pattern2x2::classify(mat)
                    .map_err(|e| err(body_start, format!("bad block: {e}")))?;
                blocks.push(p);
            }
            _ => return Err(err(body_start, format!("unknown key `{key}`"))),
        }
    }
    let take = |key: &str| -> Option<BigInt> {
        ints.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
    };
    let need = |key: &str| -> Result<BigInt, ParseError> {
        take(key).ok_or_else(|| err(body_start, format!("missing key `{key}`")))
    };
    let need_bit = |key: &str| -> Result<u8, ParseError> {
        let v = need(key)?;
        Ok(bit(&v))
    };
    let allowed: &[&str] = match variant {
        Variant::B1 | Variant::B0 => &["a"],
        Variant::A0 => &["a", "b", "c"],
        Variant::A1 => &["a", "b", "c", "d"],
    };
    for (k, _) in &ints {
        if !allowed.contains(&k.as_str()) {
            return Err(err(body_start, format!("key `{k}` does not apply to {variant}")));
        }
    }
    match variant {
        Variant::B1 | Variant::B0 => {
            let a = need("a")?;
            let block = blocks
                .pop()
                .ok_or_else(|| err(body_start, "missing block matrix".to_string()))?;
            let made = if variant == Variant::B1 {
                Aut3::b1(family, a, block)
            } else {
                Aut3::b0(family, a, block)
            };
            made.map_err(|e| err(body_start, e.to_string()))
        }
        Variant::A0 => {
            if !blocks.is_empty() {
                return Err(err(body_start, "a0 takes no block matrix".to_string()));
            }
            Ok(Aut3::a0(family, need("a")?, need("b")?, need_bit("c")?))
        }
        Variant::A1 => {
            if !blocks.is_empty() {
                return Err(err(body_start, "a1 takes no block matrix".to_string()));
            }
            let (a, c, d) = (need("a")?, need("c")?, need_bit("d")?);
            match take("b") {
                Some(b) => {
                    Aut3::a1_checked(family, a, b, c, d).map_err(|e| err(body_start, e.to_string()))
                }
                None => Ok(Aut3::a1(family, a, c, d)),
            }
        }
    }
}
