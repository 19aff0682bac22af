//! User-facing invariants: Poincare polynomials, the sl2 weight
//! decomposition, the spectral invariant `(W_0, W_k)`, chain-level
//! representatives and the graded Euler characteristic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::complex::{build_complex, specialize, FrobeniusSpec, Generator, Specialization, Trigrading};
use crate::cube::build_cube;
use crate::error::{Error, Result};
use crate::poly::{LaurentPoly3, Monomial, Style, Var};
use crate::rational::Rational;
use crate::reduce::{grading_basis, homology_over_field, staircase_decompose, Decomposition, GradedDims, PivotOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differential {
    /// The whole differential (`beta = 1`).
    Full,
    /// Only the part preserving the annular grading (`beta = 0`).
    Annular,
}

impl std::str::FromStr for Differential {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Differential::Full),
            "annular" => Ok(Differential::Annular),
            _ => Err(Error::Input(format!(
                "unknown differential {s:?} (expected full or annular)"
            ))),
        }
    }
}

fn specialization(d: Differential) -> Specialization {
    match d {
        Differential::Full => Specialization::BetaOne,
        Differential::Annular => Specialization::BetaZero,
    }
}

/// Poincare polynomial of the homology. With the annular differential the
/// result is trigraded (`z` tracks the annular degree); with the full
/// differential it lives in `q, t`. For Lee's Frobenius algebra only the
/// homological ranks are reported, as a polynomial in `t`.
pub fn kh_poincare(
    b: &BraidWord,
    frob: &FrobeniusSpec,
    differential: Differential,
    limit: usize,
) -> Result<LaurentPoly3> {
    let c = build_complex(b, frob, limit)?;
    let fc = specialize(&c, specialization(differential))?;
    Ok(homology_over_field(&fc, false)?.dims.to_poly())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sl2Term {
    pub highest_weight: u32,
    pub i: i32,
    /// `j - k`, shared by all weight vectors of one irreducible.
    pub jk: i32,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Decomposition {
    pub terms: Vec<Sl2Term>,
}

impl Sl2Decomposition {
    pub fn total_dimension(&self) -> usize {
        self.terms
            .iter()
            .map(|t| (t.highest_weight as usize + 1) * t.multiplicity)
            .sum()
    }

    /// `V[n]` terms times `q^(j-k) t^i`, e.g. `V[0]/(q^9 t^3)+V[2]/q^3`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| {
            let m = Monomial::new(t.jk, t.i, 0);
            (t.highest_weight, m.t != 0, m.t, m.q != 0, m.q)
        });
        terms
            .iter()
            .map(|t| {
                let sym = format!("V[{}]", t.highest_weight);
                Monomial::new(t.jk, t.i, 0).render_prefixed(&Rational::from_integer(t.multiplicity as i64), Some(&sym))
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Splits a trigraded `beta = 0` homology into sl2 irreducibles. Classes are
/// grouped by `(i, j - k)`; inside a group the multiplicity of `V[n]` is
/// `dim(weight n) - dim(weight n + 2)`.
pub fn sl2_from_dims(dims: &GradedDims) -> Result<Sl2Decomposition> {
    let mut groups: BTreeMap<(i32, i32), BTreeMap<i32, i64>> = BTreeMap::new();
    for (g, n) in dims.iter() {
        *groups.entry((g.i, g.j - g.k)).or_default().entry(g.k).or_insert(0) += *n as i64;
    }
    let mut terms = Vec::new();
    for ((i, jk), weights) in groups {
        for (&w, &dim) in &weights {
            let mirror = weights.get(&-w).copied().unwrap_or(0);
            if mirror != dim {
                return Err(Error::Invariant(format!(
                    "weights {w} and {} differ in dimension at (i={i}, j-k={jk})",
                    -w
                )));
            }
            if w < 0 {
                continue;
            }
            let mult = dim - weights.get(&(w + 2)).copied().unwrap_or(0);
            if mult < 0 {
                return Err(Error::Invariant(format!(
                    "negative multiplicity of V[{w}] at (i={i}, j-k={jk})"
                )));
            }
            if mult > 0 {
                terms.push(Sl2Term {
                    highest_weight: w as u32,
                    i,
                    jk,
                    multiplicity: mult as usize,
                });
            }
        }
    }
    terms.sort();
    Ok(Sl2Decomposition { terms })
}

pub fn sl2_decompose(b: &BraidWord, limit: usize) -> Result<Sl2Decomposition> {
    let c = build_complex(b, &FrobeniusSpec::khovanov(), limit)?;
    let h = homology_over_field(&specialize(&c, Specialization::BetaZero)?, false)?;
    sl2_from_dims(&h.dims)
}

/// `W_0` as the coefficient of `E`, and each `W_k` (source gradings) as the
/// coefficient of `C[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralOutput {
    pub e_poly: LaurentPoly3,
    pub c_polys: BTreeMap<u32, LaurentPoly3>,
    pub decomposition: Decomposition,
}

impl SpectralOutput {
    pub fn from_decomposition(d: Decomposition) -> Self {
        let e_poly = d.w0_dims().to_poly();
        let c_polys = (1..=d.max_k())
            .map(|k| (k, d.wk_dims(k).to_poly()))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        SpectralOutput {
            e_poly,
            c_polys,
            decomposition: d,
        }
    }

    /// `max z - min z` over the terms of `e_poly`.
    pub fn annular_spread(&self) -> i32 {
        annular_spread(&self.e_poly)
    }

    pub fn format(&self, style: Style) -> String {
        let mut parts = vec![format!("({}) E", self.e_poly.format(style))];
        for (k, p) in &self.c_polys {
            parts.push(format!("({}) C[{k}]", p.format(style)));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for SpectralOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(Style::Text))
    }
}

pub fn annular_spread(p: &LaurentPoly3) -> i32 {
    match (p.max_exponent(Var::Z), p.min_exponent(Var::Z)) {
        (Some(a), Some(b)) => a - b,
        _ => 0,
    }
}

pub fn spectral_annular_kh(b: &BraidWord, limit: usize) -> Result<SpectralOutput> {
    let c = build_complex(b, &FrobeniusSpec::khovanov(), limit)?;
    let d = staircase_decompose(&c, PivotOrder::MinFill)?;
    Ok(SpectralOutput::from_decomposition(d))
}

/// One chain-level basis element at a fixed `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisVector {
    pub generator: Generator,
    /// Cycle descriptions of the resolution, e.g. `N1{1}` or `T{}`.
    pub cycles: Vec<String>,
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.generator;
        let labeled: Vec<String> = self
            .cycles
            .iter()
            .enumerate()
            .map(|(c, desc)| {
                let l = match g.labeling.get(c) {
                    crate::complex::Label::Plus => "+",
                    crate::complex::Label::Minus => "-",
                };
                format!("{desc}->{l}")
            })
            .collect();
        write!(f, "{} [{}] k={}", g.vertex, labeled.join(", "), g.grading.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representatives {
    /// Chain basis in canonical order: vertex code ascending, then labeling
    /// ascending with `plus = 0`, the first cycle most significant.
    pub basis: Vec<BasisVector>,
    /// Coefficient vectors over `basis`, first nonzero entry 1.
    pub vectors: Vec<Vec<Rational>>,
}

pub fn representatives_in_grading(
    b: &BraidWord,
    i: i32,
    j: i32,
    differential: Differential,
    limit: usize,
) -> Result<Representatives> {
    let c = build_complex(b, &FrobeniusSpec::khovanov(), limit)?;
    let fc = specialize(&c, specialization(differential))?;
    let gb = grading_basis(&fc, |g| g.i == i && g.j == j);
    let basis = gb
        .generators
        .iter()
        .map(|&x| {
            let g = c.generators[x].clone();
            let cycles = c
                .cube()
                .diagram(g.vertex)
                .cycles
                .iter()
                .map(|cy| cy.to_string())
                .collect();
            BasisVector { generator: g, cycles }
        })
        .collect();
    Ok(Representatives {
        basis,
        vectors: gb.representatives,
    })
}

/// All chain generators in homological degree `i` and quantum degree `j`.
pub fn all_basis_vectors_in_grading(b: &BraidWord, i: i32, j: i32, limit: usize) -> Result<Vec<BasisVector>> {
    Ok(representatives_in_grading(b, i, j, Differential::Full, limit)?.basis)
}

/// State sum `sum_v (-1)^i q^(|v| + n+ - 2n-) (q + 1/q)^(#cycles)` over the
/// cube, which equals the Khovanov Poincare polynomial at `t = -1`.
pub fn graded_euler(b: &BraidWord, limit: usize) -> Result<LaurentPoly3> {
    let cube = build_cube(b, limit)?;
    let counts = b.crossing_counts();
    let (np, nm) = (counts.positive as i32, counts.negative as i32);
    let circle = LaurentPoly3::qtz(1, 0, 0) + LaurentPoly3::qtz(-1, 0, 0);
    let mut powers = vec![LaurentPoly3::one()];
    let mut out = LaurentPoly3::zero();
    for d in &cube.diagrams {
        let m = d.cycle_count();
        while powers.len() <= m {
            let next = powers.last().unwrap() * &circle;
            powers.push(next);
        }
        let w = d.vertex.weight() as i32;
        let sign = if (w - nm).rem_euclid(2) == 0 { 1 } else { -1 };
        let term = LaurentPoly3::monomial(Rational::from_integer(sign), Monomial::new(w + np - 2 * nm, 0, 0));
        out = &out + &(&term * &powers[m]);
    }
    Ok(out)
}

/// Trigrading of the monomial `q^j t^i z^k`.
pub fn grading_of(m: &Monomial) -> Trigrading {
    Trigrading::new(m.t, m.q, m.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::DEFAULT_LIMIT;

    fn br(s: usize, l: &[i64]) -> BraidWord {
        BraidWord::new(s, l.to_vec()).unwrap()
    }

    fn p(s: &str) -> LaurentPoly3 {
        LaurentPoly3::parse(s).unwrap()
    }

    #[test]
    fn trefoil_homologies() {
        let b = br(2, &[-1, -1, -1]);
        let kh = kh_poincare(&b, &FrobeniusSpec::khovanov(), Differential::Full, DEFAULT_LIMIT).unwrap();
        assert_eq!(kh.format(Style::Paper), "1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)");
        let ann = kh_poincare(&b, &FrobeniusSpec::khovanov(), Differential::Annular, DEFAULT_LIMIT).unwrap();
        assert_eq!(
            ann.forget_variable(Var::Z).format(Style::Paper),
            "1/q^5+1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)+1/(q^5 t)"
        );
        let lee = kh_poincare(&b, &FrobeniusSpec::lee(), Differential::Full, DEFAULT_LIMIT).unwrap();
        assert_eq!(lee.total(), Rational::from_integer(2));
        assert!(kh_poincare(&b, &FrobeniusSpec::lee(), Differential::Annular, DEFAULT_LIMIT).is_err());
    }

    #[test]
    fn unknot_homology() {
        let kh = kh_poincare(
            &br(1, &[]),
            &FrobeniusSpec::khovanov(),
            Differential::Full,
            DEFAULT_LIMIT,
        )
        .unwrap();
        assert_eq!(kh, p("q + 1/q"));
    }

    #[test]
    fn sl2_examples() {
        let s = sl2_decompose(&br(2, &[-1, -1, -1]), DEFAULT_LIMIT).unwrap();
        assert_eq!(s.format(), "V[0]/(q^9 t^3)+V[0]/(q^5 t^2)+V[0]/(q^5 t)+V[2]/q^3");
        assert_eq!(s.total_dimension(), 6);

        let u = sl2_decompose(&br(1, &[]), DEFAULT_LIMIT).unwrap();
        assert_eq!(
            u.terms,
            vec![Sl2Term {
                highest_weight: 1,
                i: 0,
                jk: 0,
                multiplicity: 1
            }]
        );

        let id2 = sl2_decompose(&br(2, &[]), DEFAULT_LIMIT).unwrap();
        let hw: Vec<(u32, i32)> = id2.terms.iter().map(|t| (t.highest_weight, t.i)).collect();
        assert_eq!(hw, vec![(0, 0), (2, 0)]);
    }

    #[test]
    fn sl2_rejects_asymmetric_weights() {
        let dims = GradedDims::from_gradings([Trigrading::new(0, 1, 1)]);
        assert!(matches!(sl2_from_dims(&dims), Err(Error::Invariant(_))));
    }

    #[test]
    fn spectral_examples() {
        let u = spectral_annular_kh(&br(1, &[]), DEFAULT_LIMIT).unwrap();
        assert_eq!(u.e_poly, p("q z + 1/(q z)"));
        assert!(u.c_polys.is_empty());
        assert_eq!(u.format(Style::Text), "(1/(q z) + q z) E");

        let t = spectral_annular_kh(&br(2, &[-1, -1, -1]), DEFAULT_LIMIT).unwrap();
        assert_eq!(t.e_poly, p("1/(q^9 t^3) + 1/(q^5 t^2) + 1/q^3 + z^2/q"));
        assert_eq!(t.c_polys.len(), 1);
        assert_eq!(t.c_polys[&1], p("1/(q^5 t)"));
    }

    #[test]
    fn representatives() {
        let b = br(2, &[-1, -1, -1]);
        let ann = representatives_in_grading(&b, -1, -5, Differential::Annular, DEFAULT_LIMIT).unwrap();
        assert_eq!(ann.basis.len(), 3);
        assert_eq!(ann.vectors.len(), 1);
        // equal entries up to the sign gauge of the edge-sign convention
        assert!(ann.vectors[0].iter().all(|x| x.abs() == Rational::one()));

        let full = representatives_in_grading(&b, -1, -5, Differential::Full, DEFAULT_LIMIT).unwrap();
        assert_eq!(full.basis.len(), 3);
        assert!(full.vectors.is_empty());

        let u = representatives_in_grading(&br(1, &[]), 0, 1, Differential::Full, DEFAULT_LIMIT).unwrap();
        assert_eq!(u.basis.len(), 1);
        assert_eq!(u.vectors, vec![vec![Rational::one()]]);

        let empty = representatives_in_grading(&b, 7, 7, Differential::Full, DEFAULT_LIMIT).unwrap();
        assert!(empty.basis.is_empty() && empty.vectors.is_empty());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(graded_euler(&br(1, &[]), DEFAULT_LIMIT).unwrap(), p("q + 1/q"));
        assert_eq!(
            graded_euler(&br(2, &[]), DEFAULT_LIMIT).unwrap(),
            &p("q + 1/q") * &p("q + 1/q")
        );
        let kh = p("1/q^3+1/q+1/(q^9 t^3)+1/(q^5 t^2)");
        assert_eq!(
            graded_euler(&br(2, &[-1, -1, -1]), DEFAULT_LIMIT).unwrap(),
            kh.eval_var(Var::T, &Rational::from_integer(-1))
        );
    }
}
