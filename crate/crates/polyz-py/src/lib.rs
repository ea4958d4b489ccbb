//! Python extension module `polyz`.
//!
//! Exposes the tower engine (`Tower`), the classified automorphism families
//! of the Klein-bottle group and the four cocompact 3-step groups (`Aut`),
//! and the isomorphism-witness pipeline (`inner_twist_witness`,
//! `conjugation_witness`, `verify_witness`). Group elements cross the
//! boundary as lists of Python ints (the exponent vector of the normal form
//! g1^e1 * ... * gn^en); Python ints are arbitrary precision, so nothing is
//! ever truncated.

use num_bigint::BigInt;
use polyz_core::engine::{AutMatrix, Automorphism, Tower};
use polyz_core::g2::{
    aut2_compose, aut2_from_matrix, aut2_inverse, aut2_is_inner, aut2_out_class,
    inner_from_element_g2, parse_aut2, Aut2,
};
use polyz_core::g3::{
    aut3_compose, aut3_inverse, aut3_is_inner, aut3_membership, inner_from_element, out_class,
    parse_aut3, Aut3, Variant,
};
use polyz_core::iso;
use polyz_core::presentation::{format_word, parse_presentation, parse_word, NormalWord};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

fn to_word(tower: &Tower, exponents: Vec<BigInt>) -> PyResult<NormalWord> {
    if exponents.len() != tower.n() {
        return Err(value_err(format!(
            "word has {} exponents but the group has {} generators",
            exponents.len(),
            tower.n()
        )));
    }
    Ok(NormalWord::new(exponents))
}

fn from_word(w: &NormalWord) -> Vec<BigInt> {
    w.exponents().to_vec()
}

fn to_matrix(rows: Vec<Vec<BigInt>>) -> PyResult<AutMatrix> {
    AutMatrix::new(rows).map_err(value_err)
}

fn from_matrix(m: &AutMatrix) -> Vec<Vec<BigInt>> {
    m.rows().to_vec()
}

/// An iterated semidirect product Z ⋊ Z ⋊ … ⋊ Z with exact arithmetic on
/// normal forms.
#[pyclass(name = "Tower", frozen)]
struct PyTower {
    inner: Tower,
    label: String,
}

#[pymethods]
impl PyTower {
    /// Tower(preset): one of "z", "g2", "zxz", "b1", "a0", "a1", "b0".
    #[new]
    fn new(preset: &str) -> PyResult<Self> {
        let inner = Tower::preset(preset).ok_or_else(|| {
            value_err(format!(
                "unknown preset {preset:?}; available: {}",
                Tower::preset_names().join(", ")
            ))
        })?;
        Ok(PyTower {
            inner,
            label: preset.to_string(),
        })
    }

    /// Build a tower from a presentation like
    /// "<g1,g2 | g2*g1 = g1^-1*g2>". Relative orders must all be infinite
    /// and each conjugation relation g_j*g_i = w must define an
    /// automorphism of the sub-tower below g_j.
    #[staticmethod]
    fn from_presentation(text: &str) -> PyResult<Self> {
        let p = parse_presentation(text).map_err(value_err)?;
        let inner = Tower::from_presentation(&p).map_err(value_err)?;
        Ok(PyTower {
            inner,
            label: "presentation".to_string(),
        })
    }

    /// Number of generators.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Collect a free word like "g2*g1^-3*g2" into its exponent vector.
    fn collect(&self, word: &str) -> PyResult<Vec<BigInt>> {
        let raw = parse_word(word, self.inner.n()).map_err(value_err)?;
        Ok(from_word(&self.inner.collect(&raw)))
    }

    /// Render an exponent vector as text, e.g. [-1, 2] -> "g1^-1*g2^2".
    fn format(&self, word: Vec<BigInt>) -> PyResult<String> {
        Ok(format_word(&to_word(&self.inner, word)?))
    }

    fn mul(&self, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        let x = to_word(&self.inner, x)?;
        let y = to_word(&self.inner, y)?;
        Ok(from_word(&self.inner.mul(&x, &y)))
    }

    fn inv(&self, x: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        Ok(from_word(&self.inner.inv(&to_word(&self.inner, x)?)))
    }

    fn pow(&self, x: Vec<BigInt>, m: BigInt) -> PyResult<Vec<BigInt>> {
        Ok(from_word(&self.inner.pow(&to_word(&self.inner, x)?, &m)))
    }

    /// y^-1 * x * y.
    fn conjugate(&self, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        let x = to_word(&self.inner, x)?;
        let y = to_word(&self.inner, y)?;
        Ok(from_word(&self.inner.conjugate(&x, &y)))
    }

    fn commutes(&self, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<bool> {
        let x = to_word(&self.inner, x)?;
        let y = to_word(&self.inner, y)?;
        Ok(self.inner.commutes(&x, &y))
    }

    fn is_central(&self, x: Vec<BigInt>) -> PyResult<bool> {
        Ok(self.inner.is_central(&to_word(&self.inner, x)?))
    }

    /// Whether the column map of the square matrix (generator images in
    /// columns) preserves every defining relation, i.e. extends to an
    /// endomorphism. A relation-preserving map need not be onto.
    fn preserves_relations(&self, matrix: Vec<Vec<BigInt>>) -> PyResult<bool> {
        self.inner
            .preserves_relations(&to_matrix(matrix)?)
            .map_err(value_err)
    }

    /// Whether the matrix together with the claimed generator preimages
    /// (one exponent vector per generator) defines an automorphism: the
    /// relations must be preserved and applying the matrix to preimages[i]
    /// must give back g_{i+1}. A surjective endomorphism of these groups is
    /// injective, so the two checks together are exact.
    fn is_automorphism(
        &self,
        matrix: Vec<Vec<BigInt>>,
        preimages: Vec<Vec<BigInt>>,
    ) -> PyResult<bool> {
        let m = to_matrix(matrix)?;
        let preimages: Vec<NormalWord> = preimages
            .into_iter()
            .map(|w| to_word(&self.inner, w))
            .collect::<PyResult<_>>()?;
        self.inner.is_automorphism(&m, &preimages).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Tower({:?}, n={})", self.label, self.inner.n())
    }
}

#[derive(Clone)]
enum AutKind {
    G2(Aut2),
    G3(Aut3),
}

/// A classified automorphism of "g2", "b1", "a0", "a1", or "b0", carried in
/// family form so composition, inversion, and outer classification are
/// exact closed forms.
#[pyclass(name = "Aut", frozen)]
struct PyAut {
    kind: AutKind,
}

impl PyAut {
    fn group_name(&self) -> &'static str {
        match &self.kind {
            AutKind::G2(_) => "g2",
            AutKind::G3(f) => f.variant().name(),
        }
    }

    fn engine_automorphism(&self) -> Automorphism {
        match &self.kind {
            AutKind::G2(f) => Automorphism {
                forward: f.matrix(),
                inverse: aut2_inverse(f).matrix(),
            },
            AutKind::G3(f) => Automorphism {
                forward: f.matrix(),
                inverse: aut3_inverse(f).matrix(),
            },
        }
    }

    fn tower(&self) -> Tower {
        match &self.kind {
            AutKind::G2(_) => Tower::g2(),
            AutKind::G3(f) => f.variant().tower(),
        }
    }
}

#[pymethods]
impl PyAut {
    /// Aut(group, text): parse a family form, e.g. Aut("g2", "beta(3)") or
    /// Aut("b1", "b1:alpha(a=0; A=[[0,1],[1,0]])").
    #[new]
    fn new(group: &str, text: &str) -> PyResult<Self> {
        let kind = match group {
            "g2" => AutKind::G2(parse_aut2(text).map_err(value_err)?),
            name => {
                let variant = Variant::from_name(name).ok_or_else(|| {
                    value_err(format!(
                        "group {name:?} has no classified automorphism families; \
                         use g2, b1, a0, a1, or b0"
                    ))
                })?;
                let f = parse_aut3(text).map_err(value_err)?;
                if f.variant() != variant {
                    return Err(value_err(format!(
                        "automorphism is for {} but the group is {}",
                        f.variant().name(),
                        name
                    )));
                }
                AutKind::G3(f)
            }
        };
        Ok(PyAut { kind })
    }

    /// Classify a matrix (generator images in columns). Raises ValueError
    /// if it is not an automorphism of the group.
    #[staticmethod]
    fn from_matrix(group: &str, matrix: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let m = to_matrix(matrix)?;
        let kind = match group {
            "g2" => AutKind::G2(
                aut2_from_matrix(&m).ok_or_else(|| value_err("not an automorphism"))?,
            ),
            name => {
                let variant = Variant::from_name(name).ok_or_else(|| {
                    value_err(format!(
                        "group {name:?} has no classified automorphism families; \
                         use g2, b1, a0, a1, or b0"
                    ))
                })?;
                AutKind::G3(
                    aut3_membership(variant, &m)
                        .ok_or_else(|| value_err("not an automorphism"))?,
                )
            }
        };
        Ok(PyAut { kind })
    }

    /// The inner automorphism x -> h^-1 x h.
    #[staticmethod]
    fn inner(group: &str, element: Vec<BigInt>) -> PyResult<Self> {
        let kind = match group {
            "g2" => {
                let h = NormalWord::new(element);
                if h.exponents().len() != 2 {
                    return Err(value_err("g2 words have 2 exponents"));
                }
                AutKind::G2(inner_from_element_g2(&h))
            }
            name => {
                let variant = Variant::from_name(name).ok_or_else(|| {
                    value_err(format!(
                        "group {name:?} has no classified automorphism families; \
                         use g2, b1, a0, a1, or b0"
                    ))
                })?;
                let h = NormalWord::new(element);
                if h.exponents().len() != 3 {
                    return Err(value_err("3-step words have 3 exponents"));
                }
                AutKind::G3(inner_from_element(variant, &h))
            }
        };
        Ok(PyAut { kind })
    }

    #[getter]
    fn group(&self) -> &'static str {
        self.group_name()
    }

    /// Family form, e.g. "beta(3)" or "b1:alpha(a=0; A=[[0,1],[1,0]])".
    #[getter]
    fn text(&self) -> String {
        match &self.kind {
            AutKind::G2(f) => f.to_string(),
            AutKind::G3(f) => f.to_string(),
        }
    }

    /// Generator images in columns.
    #[getter]
    fn matrix(&self) -> Vec<Vec<BigInt>> {
        match &self.kind {
            AutKind::G2(f) => from_matrix(&f.matrix()),
            AutKind::G3(f) => from_matrix(&f.matrix()),
        }
    }

    /// self after other: (self.compose(g))(x) = self(g(x)).
    fn compose(&self, other: &PyAut) -> PyResult<PyAut> {
        let kind = match (&self.kind, &other.kind) {
            (AutKind::G2(f), AutKind::G2(g)) => AutKind::G2(aut2_compose(f, g)),
            (AutKind::G3(f), AutKind::G3(g)) if f.variant() == g.variant() => {
                AutKind::G3(aut3_compose(f, g))
            }
            _ => {
                return Err(value_err(format!(
                    "cannot compose automorphisms of {} and {}",
                    self.group_name(),
                    other.group_name()
                )))
            }
        };
        Ok(PyAut { kind })
    }

    fn inverse(&self) -> PyAut {
        let kind = match &self.kind {
            AutKind::G2(f) => AutKind::G2(aut2_inverse(f)),
            AutKind::G3(f) => AutKind::G3(aut3_inverse(f)),
        };
        PyAut { kind }
    }

    /// Apply to a word given as an exponent vector.
    fn apply(&self, word: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        let tower = self.tower();
        let w = to_word(&tower, word)?;
        let image = tower
            .apply_aut(&self.engine_automorphism().forward, &w)
            .map_err(value_err)?;
        Ok(from_word(&image))
    }

    fn is_inner(&self) -> bool {
        match &self.kind {
            AutKind::G2(f) => aut2_is_inner(f),
            AutKind::G3(f) => aut3_is_inner(f),
        }
    }

    /// Image in the outer automorphism group, as the bracketed class label
    /// of the frozen representative.
    fn out_class(&self) -> String {
        match &self.kind {
            AutKind::G2(f) => aut2_out_class(f).to_string(),
            AutKind::G3(f) => out_class(f).to_string(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Aut({:?}, {:?})", self.group_name(), self.text())
    }

    fn __eq__(&self, other: &PyAut) -> bool {
        match (&self.kind, &other.kind) {
            (AutKind::G2(f), AutKind::G2(g)) => f == g,
            (AutKind::G3(f), AutKind::G3(g)) => f == g,
            _ => false,
        }
    }
}

/// Outcome of a sampled witness verification.
#[pyclass(name = "VerifyReport", frozen)]
struct PyVerifyReport {
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    sample_count: usize,
    #[pyo3(get)]
    exponent_bound: i64,
    #[pyo3(get)]
    multiplicativity_failures: usize,
    #[pyo3(get)]
    round_trip_failures: usize,
    #[pyo3(get)]
    failures: Vec<String>,
}

#[pymethods]
impl PyVerifyReport {
    fn passed(&self) -> bool {
        self.multiplicativity_failures == 0 && self.round_trip_failures == 0
    }

    fn __repr__(&self) -> String {
        format!(
            "VerifyReport(samples={}, multiplicativity_failures={}, round_trip_failures={})",
            self.sample_count, self.multiplicativity_failures, self.round_trip_failures
        )
    }
}

/// Witness that G ⋊_β Z ≅ G ⋊_α Z where β = (inner by element) ∘ α.
/// Returns the witness as a self-contained JSON document.
#[pyfunction]
fn inner_twist_witness(alpha: &PyAut, element: Vec<BigInt>) -> PyResult<String> {
    let tower = alpha.tower();
    let a = to_word(&tower, element)?;
    let w = iso::inner_twist_witness(&tower, &alpha.engine_automorphism(), &a)
        .map_err(value_err)?;
    serde_json::to_string_pretty(&w).map_err(value_err)
}

/// Witness that G ⋊_α Z ≅ G ⋊_β Z where β = ψ ∘ α ∘ ψ^-1.
/// Returns the witness as a self-contained JSON document.
#[pyfunction]
fn conjugation_witness(alpha: &PyAut, psi: &PyAut) -> PyResult<String> {
    if alpha.group_name() != psi.group_name() {
        return Err(value_err(format!(
            "alpha is an automorphism of {} but psi is of {}",
            alpha.group_name(),
            psi.group_name()
        )));
    }
    let w = iso::conjugation_witness(
        &alpha.tower(),
        &alpha.engine_automorphism(),
        &psi.engine_automorphism(),
    )
    .map_err(value_err)?;
    serde_json::to_string_pretty(&w).map_err(value_err)
}

/// Replay seeded multiplicativity and round-trip checks against a witness
/// JSON document. Failures land in the report; raises ValueError only when
/// the document itself is unusable.
#[pyfunction]
#[pyo3(signature = (witness_json, samples = 1000, bound = 10, seed = 0))]
fn verify_witness(
    witness_json: &str,
    samples: usize,
    bound: i64,
    seed: u64,
) -> PyResult<PyVerifyReport> {
    let witness: iso::IsoWitness = serde_json::from_str(witness_json)
        .map_err(|e| value_err(format!("invalid witness JSON: {e}")))?;
    let r = iso::verify_witness(&witness, samples, bound, seed)
        .map_err(|e| value_err(format!("unusable witness: {e}")))?;
    Ok(PyVerifyReport {
        seed: r.seed,
        sample_count: r.sample_count,
        exponent_bound: r.exponent_bound,
        multiplicativity_failures: r.multiplicativity_failures,
        round_trip_failures: r.round_trip_failures,
        failures: r.failures,
    })
}

/// Names accepted by Tower(preset).
#[pyfunction]
fn presets() -> Vec<&'static str> {
    Tower::preset_names().to_vec()
}

#[pymodule]
fn polyz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTower>()?;
    m.add_class::<PyAut>()?;
    m.add_class::<PyVerifyReport>()?;
    m.add_function(wrap_pyfunction!(inner_twist_witness, m)?)?;
    m.add_function(wrap_pyfunction!(conjugation_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    Ok(())
}
