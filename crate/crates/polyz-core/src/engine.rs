//! Generic arithmetic engine for towers of iterated semidirect products
//! Z ⋊ Z ⋊ … ⋊ Z (poly-Z groups).
//!
//! A tower with generators g_1, …, g_n is built one level at a time: level
//! i+1 adjoins a new generator g_{i+1} acting on the group below it by a
//! verified automorphism φ_i, so that g_{i+1} h g_{i+1}^{-1} = φ_i(h) for
//! every h in the sub-tower G_i = ⟨g_1, …, g_i⟩. Automorphisms are stored as
//! integer matrices in which column c lists the exponents of the normal word
//! φ(g_c) = g_1^{a_{1,c}} ⋯ g_i^{a_{i,c}}, always paired with the matrix of
//! the inverse automorphism so negative powers never require solving for
//! preimages.
//!
//! Every element is kept in collected normal form g_1^{e_1} ⋯ g_n^{e_n}
//! (a [`NormalWord`]). Multiplication works by recursive descent on the top
//! coordinate: writing x = (h_1, k_1) and y = (h_2, k_2) with h_i in the
//! sub-tower and k_i the top exponent,
//!
//! ```text
//! x · y = (h_1 · φ^{k_1}(h_2), k_1 + k_2)
//! ```
//!
//! where φ^{k_1} is computed by binary powering of the matrix pair, so the
//! cost of collection is logarithmic in the exponents. All arithmetic is
//! exact arbitrary precision; nothing is reduced modulo anything.
//!
//! The engine is deliberately generic and straightforward. The closed-form
//! kernels elsewhere in this crate are validated against it, so clarity wins
//! over speed here.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::presentation::{NormalWord, PolycyclicPresentation, RawWord};

/// Errors raised by tower construction and automorphism operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    /// A matrix, word, or image list has the wrong dimension for the tower.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The candidate matrix (with its claimed inverse images) fails either
    /// relation preservation or the inverse-image check.
    #[error("matrix and inverse images do not define an automorphism of the tower")]
    NotAnAutomorphism,
    /// The presentation declares a finite relative order; collection here
    /// supports infinite-order generators only.
    #[error("generator g{index} has finite relative order {order}; only infinite relative orders are supported")]
    FiniteRelativeOrder { index: usize, order: BigInt },
    /// Inverse conjugation relations were omitted and the level's matrix is
    /// not upper triangular with ±1 diagonal, so the preimages cannot be
    /// derived automatically.
    #[error("cannot derive inverse images at level {level}: matrix is not upper triangular with unit diagonal; supply explicit g{level}^-1 g_c g{level} relations")]
    InverseDerivationUnsupported { level: usize },
    /// A matrix literal was not square.
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },
}

/// Square integer matrix describing a generator map of a tower level.
///
/// Column c (0-based) encodes the image of g_{c+1}: the entries a_{1,c}, …,
/// a_{i,c} read down the column are the exponents of the normal word
/// φ(g_{c+1}) = g_1^{a_{1,c}} ⋯ g_i^{a_{i,c}}. The JSON form is an array of
/// rows; entries may be numbers or decimal strings on input and are written
/// back as numbers when they fit in 64 bits, decimal strings otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl AutMatrix {
    /// Builds a matrix from its rows, rejecting ragged or empty input.
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, EngineError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(EngineError::NotSquare {
                row: 0,
                got: 0,
                expected: 1,
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(EngineError::NotSquare {
                    row: r + 1,
                    got: row.len(),
                    expected: dim,
                });
            }
        }
        Ok(AutMatrix { rows })
    }

    /// Convenience constructor for literal matrices; panics on ragged input.
    pub fn from_i64s(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        AutMatrix::new(rows).expect("literal matrix must be square")
    }

    /// The identity map on a tower of `dim` generators.
    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| if r == c { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        AutMatrix { rows }
    }

    /// Builds the matrix whose column c is the exponent vector `cols[c]`.
    pub fn from_columns(cols: &[NormalWord]) -> Result<Self, EngineError> {
        let dim = cols.len();
        for col in cols {
            if col.len() != dim {
                return Err(EngineError::DimensionMismatch {
                    expected: dim,
                    got: col.len(),
                });
            }
        }
        let rows = (0..dim)
            .map(|r| (0..dim).map(|c| cols[c].exponents()[r].clone()).collect())
            .collect();
        Ok(AutMatrix { rows })
    }

    fn from_column_vecs(cols: Vec<Vec<BigInt>>) -> Self {
        let dim = cols.len();
        let rows = (0..dim)
            .map(|r| (0..dim).map(|c| cols[c][r].clone()).collect())
            .collect();
        AutMatrix { rows }
    }

    /// Number of generators the matrix acts on.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Entry in row `r`, column `c` (0-based).
    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.rows[r][c]
    }

    /// The rows of the matrix.
    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Image of g_{c+1} as a normal word (column `c`, 0-based).
    pub fn column(&self, c: usize) -> NormalWord {
        NormalWord::new(self.column_vec(c))
    }

    fn column_vec(&self, c: usize) -> Vec<BigInt> {
        self.rows.iter().map(|row| row[c].clone()).collect()
    }

    /// True iff this is the identity matrix.
    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, row)| {
            row.iter()
                .enumerate()
                .all(|(c, v)| if r == c { v.is_one() } else { v.is_zero() })
        })
    }

    /// Leading principal `d × d` submatrix.
    fn leading_submatrix(&self, d: usize) -> AutMatrix {
        let rows = self.rows[..d]
            .iter()
            .map(|row| row[..d].to_vec())
            .collect();
        AutMatrix { rows }
    }

    /// True iff the matrix is upper triangular with every diagonal entry ±1 —
    /// the shape for which generator preimages can be peeled off level by
    /// level without a search.
    pub fn is_unitriangular(&self) -> bool {
        let d = self.dim();
        for r in 0..d {
            for c in 0..r {
                if !self.rows[r][c].is_zero() {
                    return false;
                }
            }
            if !self.rows[r][r].magnitude().is_one() {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for AutMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (r, row) in self.rows.iter().enumerate() {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serializes one matrix entry as a JSON number when it fits in i64,
/// otherwise as a decimal string.
struct EntrySer<'a>(&'a BigInt);

impl Serialize for EntrySer<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl Serialize for AutMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            let row: Vec<EntrySer<'_>> = row.iter().map(EntrySer).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FlexInt {
    Int(i64),
    Big(String),
}

impl FlexInt {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            FlexInt::Int(v) => Ok(BigInt::from(v)),
            FlexInt::Big(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| E::custom(format!("invalid integer literal {s:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for AutMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<Vec<FlexInt>> = Deserialize::deserialize(d)?;
        let mut rows = Vec::with_capacity(raw.len());
        for row in raw {
            let row: Result<Vec<BigInt>, D::Error> =
                row.into_iter().map(|v| v.into_bigint()).collect();
            rows.push(row?);
        }
        AutMatrix::new(rows).map_err(D::Error::custom)
    }
}

/// A verified automorphism: the forward generator map together with the
/// matrix of its inverse, so powers with negative exponents are as cheap as
/// positive ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism {
    /// Column c is the normal form of φ(g_{c+1}).
    pub forward: AutMatrix,
    /// Column c is the normal form of φ^{-1}(g_{c+1}).
    pub inverse: AutMatrix,
}

impl Automorphism {
    /// The identity automorphism on `dim` generators.
    pub fn identity(dim: usize) -> Self {
        Automorphism {
            forward: AutMatrix::identity(dim),
            inverse: AutMatrix::identity(dim),
        }
    }

    /// The inverse automorphism (swap forward and inverse matrices).
    pub fn inverted(&self) -> Self {
        Automorphism {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// Number of generators the automorphism acts on.
    pub fn dim(&self) -> usize {
        self.forward.dim()
    }
}

/// An iterated semidirect product Z ⋊ Z ⋊ … ⋊ Z with `phis.len() + 1`
/// generators. `phis[i-1]` is the automorphism φ_i of the sub-tower on
/// g_1, …, g_i that defines conjugation by g_{i+1}.
///
/// Towers are immutable after construction and all operations are pure, so
/// values can be shared freely across threads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    phis: Vec<Automorphism>,
}

// ---------------------------------------------------------------------------
// Slice-level kernels. Dimension is carried by the exponent slices; `phis` is
// always the full list, indexed absolutely (a word of dimension d twists its
// top coordinate with phis[d-2]).
// ---------------------------------------------------------------------------

fn zeros(d: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); d]
}

fn unit(idx: usize, d: usize) -> Vec<BigInt> {
    let mut v = zeros(d);
    v[idx - 1] = BigInt::one();
    v
}

fn mul_s(phis: &[Automorphism], x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    let d = x.len();
    debug_assert_eq!(y.len(), d);
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![&x[0] + &y[0]];
    }
    let k1 = &x[d - 1];
    let h2 = &y[..d - 1];
    let twisted = if k1.is_zero() || h2.iter().all(Zero::is_zero) {
        h2.to_vec()
    } else {
        let phi_k1 = aut_pow_s(phis, &phis[d - 2], k1);
        apply_aut_s(phis, &phi_k1.forward, h2)
    };
    let mut out = mul_s(phis, &x[..d - 1], &twisted);
    out.push(k1 + &y[d - 1]);
    out
}

fn inv_s(phis: &[Automorphism], x: &[BigInt]) -> Vec<BigInt> {
    let d = x.len();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![-&x[0]];
    }
    let k = &x[d - 1];
    let h_inv = inv_s(phis, &x[..d - 1]);
    let mut out = if k.is_zero() || h_inv.iter().all(Zero::is_zero) {
        h_inv
    } else {
        let phi_mk = aut_pow_s(phis, &phis[d - 2], &-k);
        apply_aut_s(phis, &phi_mk.forward, &h_inv)
    };
    out.push(-k);
    out
}

fn pow_s(phis: &[Automorphism], x: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let d = x.len();
    if m.is_zero() || x.iter().all(Zero::is_zero) {
        return zeros(d);
    }
    if m.is_negative() {
        let p = pow_s(phis, x, &-m);
        return inv_s(phis, &p);
    }
    if m.is_one() {
        return x.to_vec();
    }
    let mag = m.magnitude();
    let mut acc = zeros(d);
    for i in (0..mag.bits()).rev() {
        acc = mul_s(phis, &acc, &acc);
        if mag.bit(i) {
            acc = mul_s(phis, &acc, x);
        }
    }
    acc
}

fn apply_aut_s(phis: &[Automorphism], m: &AutMatrix, x: &[BigInt]) -> Vec<BigInt> {
    let d = x.len();
    debug_assert_eq!(m.dim(), d);
    let mut acc = zeros(d);
    for (j, e) in x.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let image = pow_s(phis, &m.column_vec(j), e);
        acc = mul_s(phis, &acc, &image);
    }
    acc
}

fn compose_mats_s(phis: &[Automorphism], a: &AutMatrix, b: &AutMatrix) -> AutMatrix {
    let d = a.dim();
    debug_assert_eq!(b.dim(), d);
    let cols = (0..d)
        .map(|j| apply_aut_s(phis, a, &b.column_vec(j)))
        .collect();
    AutMatrix::from_column_vecs(cols)
}

fn compose_pair_s(phis: &[Automorphism], f: &Automorphism, g: &Automorphism) -> Automorphism {
    Automorphism {
        forward: compose_mats_s(phis, &f.forward, &g.forward),
        inverse: compose_mats_s(phis, &g.inverse, &f.inverse),
    }
}

fn aut_pow_s(phis: &[Automorphism], f: &Automorphism, k: &BigInt) -> Automorphism {
    let d = f.dim();
    if k.is_zero() {
        return Automorphism::identity(d);
    }
    if k.is_one() {
        return f.clone();
    }
    if (-k).is_one() {
        return f.inverted();
    }
    let base = if k.is_negative() {
        f.inverted()
    } else {
        f.clone()
    };
    let mag = k.magnitude();
    let mut acc = Automorphism::identity(d);
    for i in (0..mag.bits()).rev() {
        acc = compose_pair_s(phis, &acc, &acc);
        if mag.bit(i) {
            acc = compose_pair_s(phis, &acc, &base);
        }
    }
    acc
}

/// Solves apply_aut(m, x) = target for x when `m` is upper triangular with
/// ±1 diagonal, by peeling the top generator: its exponent in any product is
/// the sum over factors, so x_d is forced, and right-multiplying the target
/// by col_d^{-x_d} drops the problem into the sub-tower.
fn solve_triangular_s(phis: &[Automorphism], m: &AutMatrix, target: &[BigInt]) -> Vec<BigInt> {
    let d = target.len();
    if d == 0 {
        return Vec::new();
    }
    let diag = m.entry(d - 1, d - 1);
    let x_d = target[d - 1].clone() * diag; // diag = ±1, so this divides
    let neg = -&x_d;
    let peel = pow_s(phis, &m.column_vec(d - 1), &neg);
    let rest = mul_s(phis, target, &peel);
    debug_assert!(rest[d - 1].is_zero());
    let sub = m.leading_submatrix(d - 1);
    let mut x = solve_triangular_s(phis, &sub, &rest[..d - 1]);
    x.push(x_d);
    x
}

impl Tower {
    /// The one-generator tower: the infinite cyclic group.
    pub fn z() -> Tower {
        Tower { phis: Vec::new() }
    }

    /// Number of generators (Hirsch length).
    pub fn n(&self) -> usize {
        self.phis.len() + 1
    }

    /// The level automorphisms φ_1, …, φ_{n-1}.
    pub fn phis(&self) -> &[Automorphism] {
        &self.phis
    }

    /// The identity element.
    pub fn identity(&self) -> NormalWord {
        NormalWord::identity(self.n())
    }

    /// Generator g_idx (1-based) as a normal word.
    pub fn generator(&self, idx: usize) -> NormalWord {
        NormalWord::generator(idx, self.n())
    }

    fn check_word(&self, w: &NormalWord) {
        assert_eq!(
            w.len(),
            self.n(),
            "word has {} exponents but the tower has {} generators",
            w.len(),
            self.n()
        );
    }

    /// Checks whether `m` (with the claimed generator preimages) defines an
    /// automorphism of this tower: the column map must preserve every
    /// defining relation g_{i+1} g_c g_{i+1}^{-1} = φ_i(g_c), and applying
    /// `m` to each inverse image must return the corresponding generator.
    /// Relation preservation makes the column map an endomorphism; hitting
    /// every generator makes it onto, and a surjective endomorphism of a
    /// polycyclic group is injective, so together the checks are exact.
    pub fn is_automorphism(
        &self,
        m: &AutMatrix,
        inverse_images: &[NormalWord],
    ) -> Result<bool, EngineError> {
        let n = self.n();
        if m.dim() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
        if inverse_images.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: inverse_images.len(),
            });
        }
        for w in inverse_images {
            if w.len() != n {
                return Err(EngineError::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
        }
        // (a) relation preservation makes the column map an endomorphism.
        if !self.preserves_relations(m)? {
            return Ok(false);
        }
        // (b) surjectivity via the claimed preimages.
        for c in 1..=n {
            let image = apply_aut_s(&self.phis, m, inverse_images[c - 1].exponents());
            if image != unit(c, n) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The endomorphism half of [`Tower::is_automorphism`]: true iff the
    /// column map of `m` preserves every defining relation
    /// g_{i+1} g_c g_{i+1}^{-1} = φ_i(g_c), i.e. extends to a homomorphism.
    /// A relation-preserving map need not be onto, so this alone does not
    /// certify an automorphism.
    pub fn preserves_relations(&self, m: &AutMatrix) -> Result<bool, EngineError> {
        let n = self.n();
        if m.dim() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
        for l in 2..=n {
            let phi = &self.phis[l - 2].forward;
            let col_l = m.column_vec(l - 1);
            let col_l_inv = inv_s(&self.phis, &col_l);
            for c in 1..l {
                let mut u = phi.column_vec(c - 1);
                u.resize(n, BigInt::zero());
                let rhs = apply_aut_s(&self.phis, m, &u);
                let lhs = mul_s(
                    &self.phis,
                    &mul_s(&self.phis, &col_l, &m.column_vec(c - 1)),
                    &col_l_inv,
                );
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Adjoins one generator acting by `m`, after verifying that `m` with
    /// the given preimages is an automorphism. The preimage words become the
    /// columns of the stored inverse matrix.
    pub fn extend(
        &self,
        m: AutMatrix,
        inverse_images: &[NormalWord],
    ) -> Result<Tower, EngineError> {
        if !self.is_automorphism(&m, inverse_images)? {
            return Err(EngineError::NotAnAutomorphism);
        }
        let inverse = AutMatrix::from_columns(inverse_images)?;
        let mut phis = self.phis.clone();
        phis.push(Automorphism {
            forward: m,
            inverse,
        });
        Ok(Tower { phis })
    }

    /// Collects an arbitrary word over the generators into normal form by
    /// folding its factors through `mul`. Panics if a factor's generator
    /// index exceeds the tower.
    pub fn collect(&self, w: &RawWord) -> NormalWord {
        let n = self.n();
        let mut acc = zeros(n);
        for (idx, e) in w.factors() {
            assert!(
                (1..=n).contains(idx),
                "generator g{idx} is out of range for a tower of {n} generators"
            );
            let mut factor = zeros(n);
            factor[idx - 1] = e.clone();
            acc = mul_s(&self.phis, &acc, &factor);
        }
        NormalWord::new(acc)
    }

    /// Product of two normal words, in normal form.
    pub fn mul(&self, x: &NormalWord, y: &NormalWord) -> NormalWord {
        self.check_word(x);
        self.check_word(y);
        NormalWord::new(mul_s(&self.phis, x.exponents(), y.exponents()))
    }

    /// Inverse of a normal word: (h, k)^{-1} = (φ^{-k}(h^{-1}), -k).
    pub fn inv(&self, x: &NormalWord) -> NormalWord {
        self.check_word(x);
        NormalWord::new(inv_s(&self.phis, x.exponents()))
    }

    /// m-th power by binary powering; negative m inverts the positive power.
    pub fn pow(&self, x: &NormalWord, m: &BigInt) -> NormalWord {
        self.check_word(x);
        NormalWord::new(pow_s(&self.phis, x.exponents(), m))
    }

    /// Image of `x` under the homomorphism extending the column map of `m`:
    /// the product col_1^{x_1} ⋯ col_n^{x_n}, collected.
    pub fn apply_aut(&self, m: &AutMatrix, x: &NormalWord) -> Result<NormalWord, EngineError> {
        if m.dim() != self.n() {
            return Err(EngineError::DimensionMismatch {
                expected: self.n(),
                got: m.dim(),
            });
        }
        self.check_word(x);
        Ok(NormalWord::new(apply_aut_s(
            &self.phis,
            m,
            x.exponents(),
        )))
    }

    /// Composition m1 ∘ m2 as a matrix: column j of the result is m1 applied
    /// to column j of m2.
    pub fn compose_aut(&self, m1: &AutMatrix, m2: &AutMatrix) -> Result<AutMatrix, EngineError> {
        for m in [m1, m2] {
            if m.dim() != self.n() {
                return Err(EngineError::DimensionMismatch {
                    expected: self.n(),
                    got: m.dim(),
                });
            }
        }
        Ok(compose_mats_s(&self.phis, m1, m2))
    }

    /// Composition of verified automorphism pairs, tracking the inverse:
    /// (f ∘ g)^{-1} = g^{-1} ∘ f^{-1}.
    pub fn compose_automorphism(
        &self,
        f: &Automorphism,
        g: &Automorphism,
    ) -> Result<Automorphism, EngineError> {
        for a in [f, g] {
            if a.dim() != self.n() {
                return Err(EngineError::DimensionMismatch {
                    expected: self.n(),
                    got: a.dim(),
                });
            }
        }
        Ok(compose_pair_s(&self.phis, f, g))
    }

    /// k-th power of an automorphism by binary powering; negative k uses the
    /// stored inverse matrix.
    pub fn aut_pow(&self, f: &Automorphism, k: &BigInt) -> Result<Automorphism, EngineError> {
        if f.dim() != self.n() {
            return Err(EngineError::DimensionMismatch {
                expected: self.n(),
                got: f.dim(),
            });
        }
        Ok(aut_pow_s(&self.phis, f, k))
    }

    /// Conjugate x y x^{-1}.
    pub fn conjugate(&self, x: &NormalWord, y: &NormalWord) -> NormalWord {
        let xy = self.mul(x, y);
        self.mul(&xy, &self.inv(x))
    }

    /// True iff x y = y x.
    pub fn commutes(&self, x: &NormalWord, y: &NormalWord) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    /// True iff x commutes with every generator (hence with everything).
    pub fn is_central(&self, x: &NormalWord) -> bool {
        (1..=self.n()).all(|i| self.commutes(x, &self.generator(i)))
    }

    /// Wraps a normal word as an element carrying its tower.
    pub fn element(&self, word: NormalWord) -> GroupElement<'_> {
        self.check_word(&word);
        GroupElement { tower: self, word }
    }

    /// Builds a tower from a polycyclic presentation. Every relative order
    /// must be infinite. Conjugation relations g_j g_i g_j^{-1} = u give the
    /// matrix columns; inverse relations g_j^{-1} g_i g_j = v give the
    /// preimages, and are derived automatically when omitted if the level's
    /// matrix is upper triangular with ±1 diagonal.
    pub fn from_presentation(p: &PolycyclicPresentation) -> Result<Tower, EngineError> {
        for i in 1..=p.n() {
            if let Some(order) = p.relative_order(i) {
                return Err(EngineError::FiniteRelativeOrder {
                    index: i,
                    order: order.clone(),
                });
            }
        }
        let mut tower = Tower::z();
        for level in 2..=p.n() {
            let dim = level - 1;
            let mut cols = Vec::with_capacity(dim);
            for c in 1..level {
                cols.push(tower.collect(&p.u(c, level)));
            }
            let m = AutMatrix::from_columns(&cols)?;
            let mut images: Vec<Option<NormalWord>> = (1..level)
                .map(|c| p.v(c, level).map(|v| tower.collect(&v)))
                .collect();
            if images.iter().any(Option::is_none) {
                if !m.is_unitriangular() {
                    return Err(EngineError::InverseDerivationUnsupported { level });
                }
                for (c, slot) in images.iter_mut().enumerate() {
                    if slot.is_none() {
                        let x = solve_triangular_s(&tower.phis, &m, &unit(c + 1, dim));
                        *slot = Some(NormalWord::new(x));
                    }
                }
            }
            let images: Vec<NormalWord> = images.into_iter().map(Option::unwrap).collect();
            tower = tower.extend(m, &images)?;
        }
        Ok(tower)
    }

    /// The Klein-bottle group ⟨g1, g2 | g2 g1 g2^{-1} = g1^{-1}⟩.
    pub fn g2() -> Tower {
        Tower::z()
            .extend(
                AutMatrix::from_i64s(&[&[-1]]),
                &[NormalWord::from_i64s(&[-1])],
            )
            .expect("the inversion map is an automorphism of Z")
    }

    /// The free abelian group Z × Z as a trivial extension.
    pub fn zxz() -> Tower {
        Tower::z()
            .extend(
                AutMatrix::from_i64s(&[&[1]]),
                &[NormalWord::from_i64s(&[1])],
            )
            .expect("the identity map is an automorphism of Z")
    }

    fn extend_g2(m: &[&[i64]], images: &[&[i64]]) -> Tower {
        let images: Vec<NormalWord> = images.iter().map(|w| NormalWord::from_i64s(w)).collect();
        Tower::g2()
            .extend(AutMatrix::from_i64s(m), &images)
            .expect("preset matrix is an automorphism of the Klein-bottle group")
    }

    /// Extension of the Klein-bottle group by g3 g1 = g1^{-1} g3,
    /// g3 g2 = g1 g2 g3 (the outer class with block [[-1,1],[0,1]]).
    pub fn b1() -> Tower {
        Tower::extend_g2(&[&[-1, 1], &[0, 1]], &[&[-1, 0], &[1, 1]])
    }

    /// Extension of the Klein-bottle group by g3 g1 = g1 g3,
    /// g3 g2 = g2^{-1} g3 (the outer class with block [[1,0],[0,-1]]).
    pub fn a0() -> Tower {
        Tower::extend_g2(&[&[1, 0], &[0, -1]], &[&[1, 0], &[0, -1]])
    }

    /// Extension of the Klein-bottle group by g3 g1 = g1 g3,
    /// g3 g2 = g1 g2^{-1} g3 (the outer class with block [[1,1],[0,-1]]).
    pub fn a1() -> Tower {
        Tower::extend_g2(&[&[1, 1], &[0, -1]], &[&[1, 0], &[-1, -1]])
    }

    /// Extension of the Klein-bottle group by g3 g1 = g1^{-1} g3,
    /// g3 g2 = g2 g3 (the outer class with block [[-1,0],[0,1]]).
    pub fn b0() -> Tower {
        Tower::extend_g2(&[&[-1, 0], &[0, 1]], &[&[-1, 0], &[0, 1]])
    }

    /// Looks up a built-in tower by name.
    pub fn preset(name: &str) -> Option<Tower> {
        match name {
            "z" => Some(Tower::z()),
            "g2" => Some(Tower::g2()),
            "zxz" => Some(Tower::zxz()),
            "b1" => Some(Tower::b1()),
            "a0" => Some(Tower::a0()),
            "a1" => Some(Tower::a1()),
            "b0" => Some(Tower::b0()),
            _ => None,
        }
    }

    /// Names accepted by [`Tower::preset`].
    pub fn preset_names() -> &'static [&'static str] {
        &["z", "g2", "zxz", "b1", "a0", "a1", "b0"]
    }
}

/// A normal word bound to its tower, for fluent element arithmetic.
#[derive(Clone, Debug)]
pub struct GroupElement<'t> {
    tower: &'t Tower,
    word: NormalWord,
}

impl<'t> GroupElement<'t> {
    /// The underlying normal word.
    pub fn word(&self) -> &NormalWord {
        &self.word
    }

    /// The tower this element lives in.
    pub fn tower(&self) -> &'t Tower {
        self.tower
    }

    /// Product with another element of the same tower.
    pub fn mul(&self, other: &GroupElement<'t>) -> GroupElement<'t> {
        GroupElement {
            tower: self.tower,
            word: self.tower.mul(&self.word, &other.word),
        }
    }

    /// Inverse element.
    pub fn inv(&self) -> GroupElement<'t> {
        GroupElement {
            tower: self.tower,
            word: self.tower.inv(&self.word),
        }
    }

    /// m-th power.
    pub fn pow(&self, m: &BigInt) -> GroupElement<'t> {
        GroupElement {
            tower: self.tower,
            word: self.tower.pow(&self.word, m),
        }
    }

    /// self · other · self^{-1}.
    pub fn conjugate(&self, other: &GroupElement<'t>) -> GroupElement<'t> {
        GroupElement {
            tower: self.tower,
            word: self.tower.conjugate(&self.word, &other.word),
        }
    }

    /// True iff the two elements commute.
    pub fn commutes(&self, other: &GroupElement<'t>) -> bool {
        self.tower.commutes(&self.word, &other.word)
    }

    /// True iff the element is central.
    pub fn is_central(&self) -> bool {
        self.tower.is_central(&self.word)
    }
}

impl PartialEq for GroupElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for GroupElement<'_> {}

impl fmt::Display for GroupElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word)
    }
}
