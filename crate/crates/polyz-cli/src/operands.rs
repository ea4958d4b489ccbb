//! Operand parsing and rendering: words in text or vector form,
//! automorphisms as family text forms or generator-image matrices.

use crate::context::{CliError, Context};
use num_traits::{One, Signed};
use polyz_core::engine::{AutMatrix, Automorphism};
use polyz_core::g2::{aut2_from_matrix, aut2_inverse, parse_aut2, Aut2};
use polyz_core::g3::{aut3_inverse, aut3_membership, parse_aut3, Aut3};
use polyz_core::presentation::{format_word, parse_word, NormalWord};

/// How a word operand was written; text output mirrors it.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum WordForm {
    Text,
    Vector,
}

/// Parses a word operand in either form and collects it into normal form.
pub fn parse_word_operand(ctx: &Context, s: &str) -> Result<(NormalWord, WordForm), CliError> {
    let t = s.trim();
    let n = ctx.tower.n();
    if t.starts_with('[') {
        let w: NormalWord = serde_json::from_str(t)
            .map_err(|e| CliError::Usage(format!("invalid word vector {t:?}: {e}")))?;
        if w.len() != n {
            return Err(CliError::Usage(format!(
                "word has {} exponents but the group has {n} generators",
                w.len()
            )));
        }
        Ok((w, WordForm::Vector))
    } else {
        let raw = parse_word(t, n)
            .map_err(|e| CliError::Usage(format!("invalid word {t:?}: {e}")))?;
        Ok((ctx.tower.collect(&raw), WordForm::Text))
    }
}

/// Renders a normal word back in the operand's form.
pub fn render_word(w: &NormalWord, form: WordForm) -> String {
    match form {
        WordForm::Text => format_word(w),
        WordForm::Vector => {
            let parts: Vec<String> = w.exponents().iter().map(|e| e.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

/// A classified automorphism of one of the family-bearing presets.
pub enum AutSpec {
    G2(Aut2),
    G3(Aut3),
}

impl AutSpec {
    pub fn text(&self) -> String {
        match self {
            AutSpec::G2(f) => f.to_string(),
            AutSpec::G3(f) => f.to_string(),
        }
    }

    pub fn matrix(&self) -> AutMatrix {
        match self {
            AutSpec::G2(f) => f.matrix(),
            AutSpec::G3(f) => f.matrix(),
        }
    }

    /// Forward/inverse matrix pair, with the inverse from the family
    /// inverse formulas.
    pub fn automorphism(&self) -> Automorphism {
        match self {
            AutSpec::G2(f) => Automorphism {
                forward: f.matrix(),
                inverse: aut2_inverse(f).matrix(),
            },
            AutSpec::G3(f) => Automorphism {
                forward: f.matrix(),
                inverse: aut3_inverse(f).matrix(),
            },
        }
    }
}

fn parse_matrix(t: &str) -> Result<AutMatrix, CliError> {
    serde_json::from_str(t).map_err(|e| CliError::Usage(format!("invalid matrix {t:?}: {e}")))
}

/// Parses an automorphism operand for a family-bearing group: either a
/// family text form or a matrix, which is classified (a matrix that fits
/// no family is a domain error: "not an automorphism").
pub fn parse_aut_operand(ctx: &Context, s: &str) -> Result<AutSpec, CliError> {
    let t = s.trim();
    if let Some(variant) = ctx.variant {
        if t.starts_with('[') {
            return aut3_membership(variant, &parse_matrix(t)?)
                .map(AutSpec::G3)
                .ok_or_else(|| CliError::Domain("not an automorphism".into()));
        }
        let f = parse_aut3(t)
            .map_err(|e| CliError::Usage(format!("invalid automorphism {t:?}: {e}")))?;
        if f.variant() != variant {
            return Err(CliError::Usage(format!(
                "automorphism is for preset {}, but the selected group is {}",
                f.variant().name(),
                ctx.label
            )));
        }
        Ok(AutSpec::G3(f))
    } else if ctx.is_g2 {
        if t.starts_with('[') {
            return aut2_from_matrix(&parse_matrix(t)?)
                .map(AutSpec::G2)
                .ok_or_else(|| CliError::Domain("not an automorphism".into()));
        }
        parse_aut2(t)
            .map(AutSpec::G2)
            .map_err(|e| CliError::Usage(format!("invalid automorphism {t:?}: {e}")))
    } else {
        Err(CliError::Usage(format!(
            "{} has no classified automorphism families; use --group g2, b1, a0, a1, or b0",
            ctx.label
        )))
    }
}

/// Parses an automorphism operand for any group. Family-bearing groups
/// accept both forms; other groups take a matrix whose inverse this tool
/// can derive (dimension 1, or an abelian group of dimension 2). The
/// result is engine-verified.
pub fn parse_any_automorphism(ctx: &Context, s: &str) -> Result<Automorphism, CliError> {
    if ctx.is_g2 || ctx.variant.is_some() {
        return Ok(parse_aut_operand(ctx, s)?.automorphism());
    }
    let t = s.trim();
    if !t.starts_with('[') {
        return Err(CliError::Usage(
            "this group takes automorphisms as generator-image matrices in JSON form".into(),
        ));
    }
    let m = parse_matrix(t)?;
    let n = ctx.tower.n();
    if m.dim() != n {
        return Err(CliError::Usage(format!(
            "matrix is {}×{} but the group has {n} generators",
            m.dim(),
            m.dim()
        )));
    }
    let inverse = derive_inverse(ctx, &m)
        .ok_or_else(|| CliError::Domain("not an automorphism".into()))?;
    let f = Automorphism {
        forward: m,
        inverse,
    };
    let preimages: Vec<NormalWord> = (0..n).map(|c| f.inverse.column(c)).collect();
    match ctx.tower.is_automorphism(&f.forward, &preimages) {
        Ok(true) => Ok(f),
        Ok(false) => Err(CliError::Domain("not an automorphism".into())),
        Err(e) => Err(CliError::Domain(e.to_string())),
    }
}

/// Inverse of a matrix over a group where that is mechanical: dimension 1
/// (±1 is self-inverse) or an abelian group of dimension 2 (adjugate,
/// when the determinant is ±1). `None` means no integer inverse exists or
/// the group shape is unsupported.
fn derive_inverse(ctx: &Context, m: &AutMatrix) -> Option<AutMatrix> {
    let abelian = ctx
        .tower
        .phis()
        .iter()
        .all(|p| p.forward.is_identity());
    match m.dim() {
        1 => {
            let e = m.entry(0, 0);
            (e.abs().is_one()).then(|| m.clone())
        }
        2 if abelian => {
            let (a, b) = (m.entry(0, 0), m.entry(0, 1));
            let (c, d) = (m.entry(1, 0), m.entry(1, 1));
            let det = a * d - b * c;
            if !det.abs().is_one() {
                return None;
            }
            AutMatrix::new(vec![
                vec![&det * d, -(&det * b)],
                vec![-(&det * c), &det * a],
            ])
            .ok()
        }
        _ => None,
    }
}
