//! Machine-readable export.
//!
//! Polynomials serialize as `[{"q":..,"t":..,"z":..,"coeff":"n/d"}]`,
//! graded dimensions as `[{"t":..,"q":..,"z":..,"dim":..}]` and
//! decompositions as `{"W0":[..],"staircases":[{"k":..,"t":..,"q":..,"z":..,"dim":..}]}`.
//! Keys always appear in that order and entries are sorted, so equal values
//! produce byte-identical documents.

use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::Trigrading;
use crate::error::{Error, Result};
use crate::invariants::SpectralOutput;
use crate::poly::{LaurentPoly3, Monomial};
use crate::rational::Rational;
use crate::reduce::{Decomposition, GradedDims, Staircase};

pub fn export_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("export types always serialize")
}

pub fn export_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("export types always serialize")
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid document: {e}")))
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse()
            .map_err(|_| D::Error::custom(format!("bad rational {text:?}")))
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    q: i32,
    t: i32,
    z: i32,
    coeff: Rational,
}

impl Serialize for LaurentPoly3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<PolyTerm> = self
            .terms()
            .map(|(m, c)| PolyTerm {
                q: m.q,
                t: m.t,
                z: m.z,
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut p = LaurentPoly3::zero();
        for term in Vec::<PolyTerm>::deserialize(d)? {
            p.add_term(Monomial::new(term.q, term.t, term.z), term.coeff);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct DimTerm {
    t: i32,
    q: i32,
    z: i32,
    dim: usize,
}

impl Serialize for GradedDims {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<DimTerm> = self
            .iter()
            .map(|(g, &dim)| DimTerm {
                t: g.i,
                q: g.j,
                z: g.k,
                dim,
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedDims {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut out = GradedDims::new();
        for term in Vec::<DimTerm>::deserialize(d)? {
            out.add(Trigrading::new(term.t, term.q, term.z), term.dim);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct StairTerm {
    k: u32,
    t: i32,
    q: i32,
    z: i32,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    #[serde(rename = "W0")]
    w0: GradedDims,
    staircases: Vec<StairTerm>,
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut staircases: Vec<StairTerm> = Vec::new();
        // staircases are sorted, so equal summands are adjacent
        for st in &self.staircases {
            match staircases.last_mut() {
                Some(last) if (last.k, last.t, last.q, last.z) == (st.k, st.source.i, st.source.j, st.source.k) => {
                    last.dim += 1
                }
                _ => staircases.push(StairTerm {
                    k: st.k,
                    t: st.source.i,
                    q: st.source.j,
                    z: st.source.k,
                    dim: 1,
                }),
            }
        }
        DecompositionDoc {
            w0: self.w0_dims(),
            staircases,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DecompositionDoc::deserialize(d)?;
        let w0 = doc.w0.iter().flat_map(|(g, &n)| std::iter::repeat_n(*g, n)).collect();
        let mut staircases = Vec::new();
        for st in doc.staircases {
            if st.k == 0 {
                return Err(D::Error::custom("staircase with k = 0"));
            }
            let s = Staircase {
                k: st.k,
                source: Trigrading::new(st.t, st.q, st.z),
            };
            staircases.extend(std::iter::repeat_n(s, st.dim));
        }
        Ok(Decomposition::new(w0, staircases))
    }
}

/// The spectral invariant exports as its decomposition; `E` and `C[k]` are
/// recomputed on parse.
impl Serialize for SpectralOutput {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.decomposition.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralOutput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(SpectralOutput::from_decomposition(Decomposition::deserialize(d)?))
    }
}
