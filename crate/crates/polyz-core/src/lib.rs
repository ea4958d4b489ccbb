//! Exact arithmetic in poly-Z groups.
//!
//! A poly-Z group is built from the trivial group by repeatedly forming
//! semidirect products with the integers: `G_{i+1} = G_i ⋊ Z`, where the new
//! generator acts on `G_i` through a chosen automorphism.  Every element has a
//! unique normal form `g_1^{e_1} · g_2^{e_2} ⋯ g_n^{e_n}`, so the whole group
//! can be computed with exactly — no approximation, no bounds on exponents.
//!
//! The crate is organized in layers:
//!
//! - [`presentation`] — words, normal forms, and a text parser for polycyclic
//!   presentations.
//! - [`engine`] — generic towers of semidirect products: collection to normal
//!   form, multiplication, inversion, powers, and automorphism application /
//!   composition / powering.  This is the brute-force oracle everything else
//!   is tested against.
//! - [`g2`] — closed-form kernels and the full automorphism group of the
//!   2-step group `⟨g1, g2 | g2 g1 = g1^{-1} g2⟩` (the Klein-bottle group).
//! - [`g3`] — closed-form kernels, automorphism families, and inner/outer
//!   classification for the four 3-step groups obtained by extending the
//!   Klein-bottle group by one of its four outer-class representatives.
//! - [`iso`] — constructive isomorphism witnesses between semidirect products
//!   whose twists differ by an inner automorphism or by conjugation, plus
//!   sampled verification of those witnesses.

pub mod engine;
pub mod g2;
pub mod g3;
pub mod iso;
pub mod presentation;

pub use engine::{AutMatrix, Automorphism, GroupElement, Tower};
pub use presentation::{NormalWord, PolycyclicPresentation, RawWord};
