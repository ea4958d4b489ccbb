//! Words, normal forms, and the text grammar for polycyclic presentations.
//!
//! A polycyclic presentation on generators `g1 .. gn` consists of conjugation
//! relations `gj * gi = u * gj` (and optionally `gj^-1 * gi = v * gj^-1`) for
//! `i < j`, where `u` and `v` are words in `g1 .. g(j-1)`, plus optional power
//! relations `gi^o = w` for generators of finite relative order.  Poly-Z
//! groups are the torsion-free case: every relative order is infinite, and an
//! element is uniquely written as the normal word `g1^e1 * g2^e2 * ... * gn^en`.
//!
//! Text forms:
//!
//! ```text
//! word         := "1" | factor ("*" factor)*
//! factor       := "g" INT ("^" SINT)?
//! presentation := "<" genlist ("|" rel ("," rel)*)? ">"
//! rel          := word "=" word
//! ```
//!
//! Whitespace is ignored everywhere; the empty string also parses as the
//! identity word. Exponents are arbitrary-precision integers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Error produced by the word / presentation parsers, with a byte position
/// into the input text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

/// An uncollected word: an ordered sequence of `(generator index, exponent)`
/// factors, indices 1-based.  Zero exponents are dropped and adjacent factors
/// on the same generator are merged when the word is built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RawWord {
    factors: Vec<(usize, BigInt)>,
}

impl RawWord {
    /// Builds a word from factors, dropping zero exponents and merging
    /// adjacent factors with equal generator index.
    pub fn new(factors: impl IntoIterator<Item = (usize, BigInt)>) -> Self {
        let mut out: Vec<(usize, BigInt)> = Vec::new();
        for (idx, exp) in factors {
            if exp.is_zero() {
                continue;
            }
            match out.last_mut() {
                Some((last_idx, last_exp)) if *last_idx == idx => {
                    *last_exp += exp;
                    if last_exp.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push((idx, exp)),
            }
        }
        RawWord { factors: out }
    }

    /// The identity word.
    pub fn identity() -> Self {
        RawWord::default()
    }

    pub fn factors(&self) -> &[(usize, BigInt)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest generator index used, or 0 for the identity.
    pub fn max_index(&self) -> usize {
        self.factors.iter().map(|(i, _)| *i).max().unwrap_or(0)
    }

    /// The formal inverse: factors reversed with negated exponents.
    pub fn inverse(&self) -> Self {
        RawWord::new(
            self.factors
                .iter()
                .rev()
                .map(|(i, e)| (*i, -e.clone())),
        )
    }
}

impl From<&NormalWord> for RawWord {
    fn from(w: &NormalWord) -> Self {
        RawWord::new(
            w.exponents()
                .iter()
                .enumerate()
                .map(|(i, e)| (i + 1, e.clone())),
        )
    }
}

/// A collected word `g1^e1 * ... * gn^en`, stored as its exponent vector.
///
/// The JSON form is an array of decimal strings (`["-1","2","0"]`), so
/// arbitrary-precision exponents survive consumers that only have doubles;
/// plain JSON numbers are also accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalWord {
    exponents: Vec<BigInt>,
}

impl NormalWord {
    pub fn new(exponents: Vec<BigInt>) -> Self {
        NormalWord { exponents }
    }

    /// The identity of a group with `n` generators.
    pub fn identity(n: usize) -> Self {
        NormalWord { exponents: vec![BigInt::zero(); n] }
    }

    /// The generator `g_idx` (1-based) of a group with `n` generators.
    pub fn generator(idx: usize, n: usize) -> Self {
        assert!(idx >= 1 && idx <= n, "generator index {idx} out of range 1..={n}");
        let mut exponents = vec![BigInt::zero(); n];
        exponents[idx - 1] = BigInt::one();
        NormalWord { exponents }
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64s(exponents: &[i64]) -> Self {
        NormalWord { exponents: exponents.iter().map(|&e| BigInt::from(e)).collect() }
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|e| e.is_zero())
    }

    /// The word truncated to its first `d` exponents (projection used when
    /// descending a tower).
    pub fn prefix(&self, d: usize) -> NormalWord {
        NormalWord { exponents: self.exponents[..d].to_vec() }
    }

    /// The word padded with zeros up to length `n` (embedding a subgroup word
    /// into a larger tower).
    pub fn pad(&self, n: usize) -> NormalWord {
        let mut exponents = self.exponents.clone();
        exponents.resize(n, BigInt::zero());
        NormalWord { exponents }
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self))
    }
}

impl Serialize for NormalWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.exponents.len()))?;
        for e in &self.exponents {
            seq.serialize_element(&e.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for NormalWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct WordVisitor;

        impl<'de> Visitor<'de> for WordVisitor {
            type Value = NormalWord;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of integers or decimal strings")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                #[derive(Deserialize)]
                #[serde(untagged)]
                enum Entry {
                    Int(i64),
                    Str(String),
                }
                let mut exponents = Vec::new();
                while let Some(entry) = seq.next_element::<Entry>()? {
                    let e = match entry {
                        Entry::Int(v) => BigInt::from(v),
                        Entry::Str(s) => BigInt::from_str(s.trim()).map_err(|_| {
                            serde::de::Error::custom(format!("invalid integer string {s:?}"))
                        })?,
                    };
                    exponents.push(e);
                }
                Ok(NormalWord { exponents })
            }
        }

        deserializer.deserialize_seq(WordVisitor)
    }
}

/// Renders a normal word in the text grammar: `(-1, 2, 0)` becomes
/// `g1^-1*g2^2`; the identity becomes `1`.
pub fn format_word(w: &NormalWord) -> String {
    let mut parts = Vec::new();
    for (i, e) in w.exponents.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            parts.push(format!("g{}", i + 1));
        } else {
            parts.push(format!("g{}^{}", i + 1, e));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Character-level cursor shared by the word and presentation parsers.
struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(ParseError::new(
                self.pos,
                format!("expected '{}', found '{}'", c as char, found as char),
            )),
            None => Err(ParseError::new(
                self.pos,
                format!("expected '{}', found end of input", c as char),
            )),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Unsigned decimal integer as usize (generator indices, counts).
    fn parse_usize(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let mut value: usize = 0;
        let mut any = false;
        while let Some(c) = self.text.get(self.pos).copied() {
            if !c.is_ascii_digit() {
                break;
            }
            any = true;
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as usize))
                .ok_or_else(|| ParseError::new(start, "integer too large"))?;
            self.pos += 1;
        }
        if !any {
            return Err(ParseError::new(self.pos, "expected a digit"));
        }
        Ok(value)
    }

    /// Signed arbitrary-precision integer (exponents).
    fn parse_bigint(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.text.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.text.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ParseError::new(self.pos, "expected an integer"));
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii slice");
        BigInt::from_str(s).map_err(|_| ParseError::new(start, "invalid integer"))
    }

    /// One `g<INT>(^<SINT>)?` factor.  The caller has already checked that
    /// the next character is `g`.
    fn parse_factor(&mut self, n: usize) -> Result<(usize, BigInt), ParseError> {
        self.expect(b'g')?;
        let idx_pos = self.pos;
        let idx = self.parse_usize()?;
        if idx == 0 || idx > n {
            return Err(ParseError::new(
                idx_pos,
                format!("generator index {idx} out of range 1..={n}"),
            ));
        }
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.parse_bigint()?
        } else {
            BigInt::one()
        };
        Ok((idx, exp))
    }

    /// A word over generators `g1..gn`.  Stops at the first character that
    /// cannot continue the word; the caller decides whether that is an error.
    fn parse_word(&mut self, n: usize) -> Result<RawWord, ParseError> {
        match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                Ok(RawWord::identity())
            }
            Some(b'g') => {
                let mut factors = vec![self.parse_factor(n)?];
                while self.peek() == Some(b'*') {
                    self.pos += 1;
                    factors.push(self.parse_factor(n)?);
                }
                Ok(RawWord::new(factors))
            }
            _ => Err(ParseError::new(self.pos, "expected a word ('1' or 'g<k>...')")),
        }
    }
}

/// Parses a word in the text grammar over generators `g1..gn`.  The empty
/// (or all-whitespace) string is accepted as the identity.
pub fn parse_word(text: &str, n: usize) -> Result<RawWord, ParseError> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Ok(RawWord::identity());
    }
    let w = cur.parse_word(n)?;
    if !cur.at_end() {
        return Err(ParseError::new(cur.pos, "unexpected trailing input"));
    }
    Ok(w)
}

/// A polycyclic presentation in standard form: for each pair `i < j` a
/// conjugation word `u_{i,j}` with `gj * gi * gj^-1 = u_{i,j}` (and optionally
/// `v_{i,j}` with `gj^-1 * gi * gj = v_{i,j}`), and for each generator an
/// optional relative order `o_i` with power word `w_i` (`gi^{o_i} = w_i`).
///
/// Poly-Z presentations have no finite relative orders; the fields exist so
/// the data model can represent general polycyclic input, but the engine only
/// builds towers from the torsion-free case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolycyclicPresentation {
    n: usize,
    conj_pos: BTreeMap<(usize, usize), RawWord>,
    conj_neg: BTreeMap<(usize, usize), RawWord>,
    relative_order: Vec<Option<BigInt>>,
    power_word: Vec<Option<RawWord>>,
}

impl PolycyclicPresentation {
    /// A presentation with `n` generators and no relations yet (free abelian
    /// defaults are *not* assumed; missing relations mean "commutes", see
    /// [`PolycyclicPresentation::u`]).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "presentation needs at least one generator");
        PolycyclicPresentation {
            n,
            conj_pos: BTreeMap::new(),
            conj_neg: BTreeMap::new(),
            relative_order: vec![None; n],
            power_word: vec![None; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_pair(&self, i: usize, j: usize) {
        assert!(
            1 <= i && i < j && j <= self.n,
            "relation indices must satisfy 1 <= i < j <= n, got ({i},{j})"
        );
    }

    /// Installs `u_{i,j}`: the value of `gj * gi * gj^-1` as a word in
    /// `g1..g(j-1)`.
    pub fn set_u(&mut self, i: usize, j: usize, u: RawWord) -> Result<(), ParseError> {
        self.check_pair(i, j);
        if u.max_index() >= j {
            return Err(ParseError::new(
                0,
                format!("u_{{{i},{j}}} may only use generators g1..g{}", j - 1),
            ));
        }
        self.conj_pos.insert((i, j), u);
        Ok(())
    }

    /// Installs `v_{i,j}`: the value of `gj^-1 * gi * gj` as a word in
    /// `g1..g(j-1)`.
    pub fn set_v(&mut self, i: usize, j: usize, v: RawWord) -> Result<(), ParseError> {
        self.check_pair(i, j);
        if v.max_index() >= j {
            return Err(ParseError::new(
                0,
                format!("v_{{{i},{j}}} may only use generators g1..g{}", j - 1),
            ));
        }
        self.conj_neg.insert((i, j), v);
        Ok(())
    }

    /// Installs the power relation `gi^o = w`.
    pub fn set_power(&mut self, i: usize, o: BigInt, w: RawWord) -> Result<(), ParseError> {
        assert!(1 <= i && i <= self.n);
        if o < BigInt::from(2) {
            return Err(ParseError::new(0, format!("relative order of g{i} must be >= 2")));
        }
        if w.max_index() >= i {
            return Err(ParseError::new(
                0,
                format!("w_{i} may only use generators g1..g{}", i - 1),
            ));
        }
        self.relative_order[i - 1] = Some(o);
        self.power_word[i - 1] = Some(w);
        Ok(())
    }

    /// The conjugation word `u_{i,j}` if it was given explicitly.  A missing
    /// entry means the presentation asserts `gj` and `gi` commute
    /// (`u_{i,j} = gi`).
    pub fn u(&self, i: usize, j: usize) -> RawWord {
        self.check_pair(i, j);
        self.conj_pos
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| RawWord::new([(i, BigInt::one())]))
    }

    /// The conjugation word `v_{i,j}` if given explicitly; `None` means it
    /// must be derived by inverting the automorphism encoded by the u's.
    pub fn v(&self, i: usize, j: usize) -> Option<RawWord> {
        self.check_pair(i, j);
        if let Some(v) = self.conj_neg.get(&(i, j)) {
            return Some(v.clone());
        }
        if self.conj_pos.contains_key(&(i, j)) {
            None
        } else {
            // No relation either way: the generators commute, so the inverse
            // conjugate is gi as well.
            Some(RawWord::new([(i, BigInt::one())]))
        }
    }

    pub fn relative_order(&self, i: usize) -> Option<&BigInt> {
        self.relative_order[i - 1].as_ref()
    }

    pub fn power_word(&self, i: usize) -> Option<&RawWord> {
        self.power_word[i - 1].as_ref()
    }

    /// True when every relative order is infinite (the poly-Z case).
    pub fn is_poly_z(&self) -> bool {
        self.relative_order.iter().all(|o| o.is_none())
    }
}

/// Parses a presentation in the text grammar, e.g.
/// `<g1,g2 | g2*g1 = g1^-1*g2>`.
///
/// Each relation must have one of the standard shapes:
/// `gj*gi = u*gj`, `gj^-1*gi = v*gj^-1` (both with `i < j` and `u`, `v` words
/// in `g1..g(j-1)`), or `gi^o = w` with `o >= 2` and `w` a word in
/// `g1..g(i-1)`.
pub fn parse_presentation(text: &str) -> Result<PolycyclicPresentation, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect(b'<')?;

    // Generator list: g1,g2,...,gn in ascending order.
    let mut n = 0usize;
    loop {
        cur.expect(b'g')?;
        let idx_pos = cur.pos;
        let idx = cur.parse_usize()?;
        if idx != n + 1 {
            return Err(ParseError::new(
                idx_pos,
                format!("generators must be listed as g1,g2,...; expected g{}", n + 1),
            ));
        }
        n = idx;
        match cur.peek() {
            Some(b',') => {
                cur.pos += 1;
            }
            _ => break,
        }
    }

    let mut pres = PolycyclicPresentation::new(n);

    match cur.peek() {
        Some(b'>') => {
            cur.pos += 1;
        }
        Some(b'|') => {
            cur.pos += 1;
            loop {
                let rel_pos = cur.pos;
                let lhs = cur.parse_word(n)?;
                cur.expect(b'=')?;
                let rhs = cur.parse_word(n)?;
                install_relation(&mut pres, lhs, rhs, rel_pos)?;
                match cur.bump() {
                    Some(b',') => continue,
                    Some(b'>') => break,
                    Some(c) => {
                        return Err(ParseError::new(
                            cur.pos - 1,
                            format!("expected ',' or '>', found '{}'", c as char),
                        ))
                    }
                    None => {
                        return Err(ParseError::new(cur.pos, "unterminated presentation"))
                    }
                }
            }
        }
        Some(c) => {
            return Err(ParseError::new(
                cur.pos,
                format!("expected '|' or '>', found '{}'", c as char),
            ))
        }
        None => return Err(ParseError::new(cur.pos, "unterminated presentation")),
    }

    if !cur.at_end() {
        return Err(ParseError::new(cur.pos, "unexpected trailing input"));
    }
    Ok(pres)
}

/// Pattern-matches a parsed relation against the standard shapes and stores
/// it in the presentation.
fn install_relation(
    pres: &mut PolycyclicPresentation,
    lhs: RawWord,
    rhs: RawWord,
    pos: usize,
) -> Result<(), ParseError> {
    let shape_err = |msg: &str| ParseError::new(pos, msg.to_string());

    let lf = lhs.factors();
    match lf {
        // gj^(+/-1) * gi  =  u * gj^(+/-1)
        [(j, je), (i, ie)] if *ie == BigInt::one() && (je.abs() == BigInt::one()) => {
            let (i, j) = (*i, *j);
            if i >= j {
                return Err(shape_err("conjugation relation requires gj*gi with i < j"));
            }
            let positive = je.is_positive();
            let rf = rhs.factors();
            let Some(((last_i, last_e), prefix)) = rf.split_last() else {
                return Err(shape_err("right side must end with the conjugating generator"));
            };
            if *last_i != j || *last_e != *je {
                return Err(shape_err(
                    "right side must end with the same gj^1 or gj^-1 as the left side",
                ));
            }
            let word = RawWord::new(prefix.iter().cloned());
            if word.max_index() >= j {
                return Err(shape_err("conjugate value may only use generators below gj"));
            }
            if positive {
                pres.set_u(i, j, word).map_err(|e| ParseError::new(pos, e.msg))?;
            } else {
                pres.set_v(i, j, word).map_err(|e| ParseError::new(pos, e.msg))?;
            }
            Ok(())
        }
        // gi^o = w with o >= 2
        [(i, oe)] if *oe >= BigInt::from(2) => {
            let i = *i;
            if rhs.max_index() >= i {
                return Err(shape_err("power relation value may only use generators below gi"));
            }
            pres.set_power(i, oe.clone(), rhs).map_err(|e| ParseError::new(pos, e.msg))
        }
        _ => Err(shape_err(
            "relation must look like gj*gi = u*gj, gj^-1*gi = v*gj^-1, or gi^o = w",
        )),
    }
}
