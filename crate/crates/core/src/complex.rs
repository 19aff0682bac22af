//! The trigraded Khovanov complex of a braid closure over `Q[beta]`.
//!
//! Generators are pairs (vertex, labeling) where a labeling assigns `plus` or
//! `minus` to each cycle of the resolution. The differential is stored as
//! scalar entries; the power of `beta` on an entry is never stored, it is
//! `(source.k - target.k) / 2` because `beta` carries annular degree 2 and the
//! differential has degree zero.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::{BraidWord, CrossingCounts};
use crate::cube::{build_cube, Cube, CycleKind, EdgeData, SmoothedDiagram, Surgery, Vertex};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Homological `i`, quantum `j` and annular `k` degree. Ordered by `(i, j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trigrading {
    pub i: i32,
    pub j: i32,
    pub k: i32,
}

impl Trigrading {
    pub const fn new(i: i32, j: i32, k: i32) -> Self {
        Trigrading { i, j, k }
    }
}

impl fmt::Display for Trigrading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Plus,
    Minus,
}

/// Structure constants of the rank-two algebra attached to each cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSpec {
    pub name: String,
    /// `merge[x][y]`: image of `x (x) y` as a formal sum.
    pub merge: [[Vec<(Label, i64)>; 2]; 2],
    /// `split[x]`: image of `x` as a formal sum of pairs.
    pub split: [Vec<(Label, Label, i64)>; 2],
}

fn ix(l: Label) -> usize {
    match l {
        Label::Plus => 0,
        Label::Minus => 1,
    }
}

impl FrobeniusSpec {
    pub fn khovanov() -> Self {
        use Label::*;
        FrobeniusSpec {
            name: "khovanov".into(),
            merge: [[vec![(Plus, 1)], vec![(Minus, 1)]], [vec![(Minus, 1)], vec![]]],
            split: [vec![(Plus, Minus, 1), (Minus, Plus, 1)], vec![(Minus, Minus, 1)]],
        }
    }

    /// Lee's deformation: `m(-,-) = +` and `Delta(-)` gains `+ (x) +`.
    pub fn lee() -> Self {
        use Label::*;
        FrobeniusSpec {
            name: "lee".into(),
            merge: [[vec![(Plus, 1)], vec![(Minus, 1)]], [vec![(Minus, 1)], vec![(Plus, 1)]]],
            split: [
                vec![(Plus, Minus, 1), (Minus, Plus, 1)],
                vec![(Minus, Minus, 1), (Plus, Plus, 1)],
            ],
        }
    }

    pub fn is_khovanov(&self) -> bool {
        *self == FrobeniusSpec::khovanov()
    }

    pub fn merge(&self, x: Label, y: Label) -> &[(Label, i64)] {
        &self.merge[ix(x)][ix(y)]
    }

    pub fn split(&self, x: Label) -> &[(Label, Label, i64)] {
        &self.split[ix(x)]
    }
}

/// Labeling of the `m` cycles of a diagram as a bit string: cycle 0 is the
/// most significant bit, `plus = 0`, `minus = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Labeling {
    pub bits: u64,
    pub cycles: usize,
}

impl Labeling {
    pub fn get(&self, cycle: usize) -> Label {
        if (self.bits >> (self.cycles - 1 - cycle)) & 1 == 1 {
            Label::Minus
        } else {
            Label::Plus
        }
    }

    fn set(&mut self, cycle: usize, l: Label) {
        let mask = 1u64 << (self.cycles - 1 - cycle);
        match l {
            Label::Plus => self.bits &= !mask,
            Label::Minus => self.bits |= mask,
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.cycles {
            f.write_str(match self.get(c) {
                Label::Plus => "+",
                Label::Minus => "-",
            })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub vertex: Vertex,
    pub labeling: Labeling,
    pub grading: Trigrading,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialEntry {
    pub source: usize,
    pub target: usize,
    pub coeff: Rational,
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub braid: BraidWord,
    pub frobenius: FrobeniusSpec,
    pub generators: Vec<Generator>,
    /// Sorted by source, then target.
    pub entries: Vec<DifferentialEntry>,
    pub counts: CrossingCounts,
    /// First generator index of each vertex, indexed by vertex code.
    offsets: Vec<usize>,
    cube: Cube,
}

impl ChainComplex {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn gradings(&self) -> Vec<Trigrading> {
        self.generators.iter().map(|g| g.grading).collect()
    }

    /// Power of `beta` carried by an entry.
    pub fn beta_exponent(&self, e: &DifferentialEntry) -> i32 {
        (self.generators[e.source].grading.k - self.generators[e.target].grading.k) / 2
    }

    pub fn generator_index(&self, v: Vertex, labeling: Labeling) -> usize {
        self.offsets[v.code() as usize] + labeling.bits as usize
    }

    pub fn has_beta_grading(&self) -> bool {
        self.frobenius.is_khovanov()
    }
}

/// Trigrading of a labeled resolution.
pub fn generator_grading(d: &SmoothedDiagram, labeling: Labeling, counts: CrossingCounts) -> Trigrading {
    let (np, nm) = (counts.positive as i32, counts.negative as i32);
    let w = d.vertex.weight() as i32;
    let mut balance = 0;
    let mut k = 0;
    for cyc in &d.cycles {
        let s = match labeling.get(cyc.id) {
            Label::Plus => 1,
            Label::Minus => -1,
        };
        balance += s;
        if matches!(cyc.kind, CycleKind::Nontrivial { .. }) {
            k += s;
        }
    }
    Trigrading {
        i: w - nm,
        j: balance + w + np - 2 * nm,
        k,
    }
}

fn edge_entries(
    edge: &EdgeData,
    from: &SmoothedDiagram,
    to: &SmoothedDiagram,
    frob: &FrobeniusSpec,
    from_offset: usize,
    to_offset: usize,
) -> Vec<DifferentialEntry> {
    let m_from = from.cycle_count();
    let m_to = to.cycle_count();
    let mut out = Vec::new();
    for bits in 0..1u64 << m_from {
        let src = Labeling { bits, cycles: m_from };
        let mut base = Labeling { bits: 0, cycles: m_to };
        for &(f, t) in &edge.passive {
            base.set(t, src.get(f));
        }
        let source = from_offset + bits as usize;
        match edge.surgery {
            Surgery::Merge { a, b, into } => {
                for &(l, c) in frob.merge(src.get(a), src.get(b)) {
                    let mut tgt = base;
                    tgt.set(into, l);
                    out.push(DifferentialEntry {
                        source,
                        target: to_offset + tgt.bits as usize,
                        coeff: Rational::from_integer(c * edge.sign),
                    });
                }
            }
            Surgery::Split { from: f, a, b } => {
                for &(la, lb, c) in frob.split(src.get(f)) {
                    let mut tgt = base;
                    tgt.set(a, la);
                    tgt.set(b, lb);
                    out.push(DifferentialEntry {
                        source,
                        target: to_offset + tgt.bits as usize,
                        coeff: Rational::from_integer(c * edge.sign),
                    });
                }
            }
        }
    }
    out
}

pub fn build_complex(b: &BraidWord, frob: &FrobeniusSpec, limit: usize) -> Result<ChainComplex> {
    let cube = build_cube(b, limit)?;
    let counts = b.crossing_counts();

    let mut offsets = Vec::with_capacity(cube.diagrams.len());
    let mut generators = Vec::new();
    for d in &cube.diagrams {
        offsets.push(generators.len());
        let m = d.cycle_count();
        for bits in 0..1u64 << m {
            let labeling = Labeling { bits, cycles: m };
            generators.push(Generator {
                vertex: d.vertex,
                labeling,
                grading: generator_grading(d, labeling, counts),
            });
        }
    }

    let mut entries: Vec<DifferentialEntry> = cube
        .edges
        .par_iter()
        .flat_map_iter(|e| {
            let from = cube.diagram(e.from);
            let to = cube.diagram(e.to);
            edge_entries(
                e,
                from,
                to,
                frob,
                offsets[e.from.code() as usize],
                offsets[e.to.code() as usize],
            )
        })
        .collect();
    entries.sort_by_key(|e| (e.source, e.target));

    let complex = ChainComplex {
        braid: b.clone(),
        frobenius: frob.clone(),
        generators,
        entries,
        counts,
        offsets,
        cube,
    };
    validate(&complex)?;
    Ok(complex)
}

fn validate(c: &ChainComplex) -> Result<()> {
    let graded = c.has_beta_grading();
    for e in &c.entries {
        let s = c.generators[e.source].grading;
        let t = c.generators[e.target].grading;
        if t.i != s.i + 1 {
            return Err(Error::Invariant(format!(
                "entry {s} -> {t} is not of homological degree 1"
            )));
        }
        if graded && (t.j != s.j || !(s.k - t.k == 0 || s.k - t.k == 2)) {
            return Err(Error::Invariant(format!(
                "entry {s} -> {t} violates the (j, k) grading constraints"
            )));
        }
    }
    check_square_zero(c.len(), c.entries.iter().map(|e| (e.source, e.target, &e.coeff)))
}

/// Verifies `d o d = 0` for a sparse scalar matrix given as (source, target,
/// coefficient) triples.
pub fn check_square_zero<'a>(n: usize, entries: impl Iterator<Item = (usize, usize, &'a Rational)>) -> Result<()> {
    let mut out: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for (s, t, c) in entries {
        out[s].push((t, c));
    }
    let bad = (0..n).into_par_iter().find_any(|&x| {
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        for &(y, c1) in &out[x] {
            for &(z, c2) in &out[y] {
                *acc.entry(z).or_insert_with(Rational::zero) += &(c1 * c2);
            }
        }
        acc.values().any(|v| !v.is_zero())
    });
    match bad {
        Some(x) => Err(Error::Invariant(format!("d^2 != 0 starting at generator {x}"))),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// `beta = 1`: the ordinary Khovanov differential; `k` is forgotten.
    BetaOne,
    /// `beta = 0`: only the annular-degree-preserving part survives.
    BetaZero,
    /// Coefficients in `Q[beta]/beta^n`.
    ModBeta(u32),
}

/// A complex of `Q`-vector spaces with homogeneous generators.
#[derive(Clone, Debug, Default)]
pub struct FieldComplex {
    pub gradings: Vec<Trigrading>,
    pub entries: Vec<(usize, usize, Rational)>,
}

impl FieldComplex {
    pub fn len(&self) -> usize {
        self.gradings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradings.is_empty()
    }
}

/// Field-coefficient specialization. For Lee complexes only `BetaOne` is
/// meaningful and both `j` and `k` are dropped.
pub fn specialize(c: &ChainComplex, mode: Specialization) -> Result<FieldComplex> {
    if !c.has_beta_grading() {
        if mode != Specialization::BetaOne {
            return Err(Error::Input(format!(
                "the {} differential has no annular splitting; only the full differential is available",
                c.frobenius.name
            )));
        }
        return Ok(FieldComplex {
            gradings: c
                .generators
                .iter()
                .map(|g| Trigrading::new(g.grading.i, 0, 0))
                .collect(),
            entries: c
                .entries
                .iter()
                .map(|e| (e.source, e.target, e.coeff.clone()))
                .collect(),
        });
    }
    match mode {
        Specialization::BetaOne => Ok(FieldComplex {
            gradings: c
                .generators
                .iter()
                .map(|g| Trigrading::new(g.grading.i, g.grading.j, 0))
                .collect(),
            entries: c
                .entries
                .iter()
                .map(|e| (e.source, e.target, e.coeff.clone()))
                .collect(),
        }),
        Specialization::BetaZero => Ok(FieldComplex {
            gradings: c.gradings(),
            entries: c
                .entries
                .iter()
                .filter(|e| c.beta_exponent(e) == 0)
                .map(|e| (e.source, e.target, e.coeff.clone()))
                .collect(),
        }),
        Specialization::ModBeta(n) => {
            if n < 1 {
                return Err(Error::Input("mod beta^n needs n >= 1".into()));
            }
            let n = n as usize;
            // generator g * n + p stands for beta^p g, of annular degree k + 2p
            let gradings = c
                .generators
                .iter()
                .flat_map(|g| {
                    (0..n).map(move |p| Trigrading::new(g.grading.i, g.grading.j, g.grading.k + 2 * p as i32))
                })
                .collect();
            let mut entries = Vec::new();
            for e in &c.entries {
                let ex = c.beta_exponent(e) as usize;
                for p in 0..n.saturating_sub(ex) {
                    entries.push((e.source * n + p, e.target * n + p + ex, e.coeff.clone()));
                }
            }
            Ok(FieldComplex { gradings, entries })
        }
    }
}
