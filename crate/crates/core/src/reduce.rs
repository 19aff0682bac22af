//! Exact elimination on sparse complexes.
//!
//! One engine serves two purposes. Over a field every nonzero entry is a
//! pivot and cancelling it removes a contractible pair, so the survivors
//! give the homology. Over `Q[beta]` a pivot `a beta^n` of minimal degree
//! splits off a two-term summand `Q[beta] --beta^n--> Q[beta]`; the rest of
//! the differential is updated by `omega - kappa a^-1 gamma'`. Summands with
//! `n = 0` are contractible and dropped, the others are the staircases
//! recorded in a [`Decomposition`].

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{check_square_zero, specialize, ChainComplex, FieldComplex, Specialization, Trigrading};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{LaurentPoly3, Monomial};
use crate::rational::Rational;

/// Finitely supported map from trigradings to dimensions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedDims(BTreeMap<Trigrading, usize>);

impl GradedDims {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gradings(gs: impl IntoIterator<Item = Trigrading>) -> Self {
        let mut d = GradedDims::new();
        for g in gs {
            d.add(g, 1);
        }
        d
    }

    pub fn add(&mut self, g: Trigrading, n: usize) {
        if n > 0 {
            *self.0.entry(g).or_insert(0) += n;
        }
    }

    pub fn get(&self, g: &Trigrading) -> usize {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Trigrading, &usize)> {
        self.0.iter()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &GradedDims) {
        for (g, n) in other.iter() {
            self.add(*g, *n);
        }
    }

    /// Drops the annular grading.
    pub fn forget_k(&self) -> GradedDims {
        let mut out = GradedDims::new();
        for (g, n) in self.iter() {
            out.add(Trigrading::new(g.i, g.j, 0), *n);
        }
        out
    }

    /// Poincare polynomial `sum dim * q^j t^i z^k`.
    pub fn to_poly(&self) -> LaurentPoly3 {
        let mut p = LaurentPoly3::zero();
        for (g, n) in self.iter() {
            p.add_term(Monomial::new(g.j, g.i, g.k), Rational::from_integer(*n as i64));
        }
        p
    }

    pub fn from_poly(p: &LaurentPoly3) -> Result<GradedDims> {
        let mut out = GradedDims::new();
        for (m, c) in p.terms() {
            let n = c
                .to_i64()
                .filter(|n| *n >= 0)
                .ok_or_else(|| Error::Invariant(format!("coefficient {c:?} is not a dimension")))?;
            out.add(Trigrading::new(m.t, m.q, m.z), n as usize);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    /// Smallest fill-in first, then lowest generator index.
    MinFill,
    /// Ties among pivots of equal degree broken by a seeded random order.
    Seeded(u64),
}

struct Eliminator<'a> {
    gradings: &'a [Trigrading],
    over_beta: bool,
    rows: Vec<BTreeMap<usize, Rational>>,
    cols: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    order: PivotOrder,
    rng: ChaCha8Rng,
}

type HeapKey = Reverse<(i32, i32, u64, usize, usize)>;

struct Outcome {
    survivors: Vec<usize>,
    /// (beta exponent, source, target) of every split-off pair.
    pairs: Vec<(i32, usize, usize)>,
}

impl<'a> Eliminator<'a> {
    fn new(
        gradings: &'a [Trigrading],
        entries: impl Iterator<Item = (usize, usize, Rational)>,
        over_beta: bool,
        order: PivotOrder,
    ) -> Self {
        let n = gradings.len();
        let mut rows = vec![BTreeMap::new(); n];
        let mut cols = vec![BTreeSet::new(); n];
        for (s, t, c) in entries {
            if c.is_zero() {
                continue;
            }
            rows[s].insert(t, c);
            cols[t].insert(s);
        }
        let seed = match order {
            PivotOrder::MinFill => 0,
            PivotOrder::Seeded(s) => s,
        };
        Eliminator {
            gradings,
            over_beta,
            rows,
            cols,
            alive: vec![true; n],
            order,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn exponent(&self, s: usize, t: usize) -> i32 {
        if self.over_beta {
            (self.gradings[s].k - self.gradings[t].k) / 2
        } else {
            0
        }
    }

    fn fill(&self, s: usize, t: usize) -> u64 {
        ((self.rows[s].len() - 1) * (self.cols[t].len() - 1)) as u64
    }

    fn key(&mut self, level: i32, s: usize, t: usize) -> HeapKey {
        let tie = match self.order {
            PivotOrder::MinFill => self.fill(s, t),
            PivotOrder::Seeded(_) => self.rng.gen(),
        };
        Reverse((level, self.gradings[s].i, tie, s, t))
    }

    fn run(mut self) -> Result<Outcome> {
        let mut pairs = Vec::new();
        let mut level = 0;
        loop {
            let mut heap = BinaryHeap::new();
            let mut remaining = false;
            for s in 0..self.rows.len() {
                let targets: Vec<usize> = self.rows[s].keys().copied().collect();
                for t in targets {
                    remaining = true;
                    let e = self.exponent(s, t);
                    if e < level {
                        return Err(Error::Invariant(format!(
                            "entry of beta-degree {e} survived elimination at degree {level}"
                        )));
                    }
                    if e == level {
                        let k = self.key(level, s, t);
                        heap.push(k);
                    }
                }
            }
            if !remaining {
                break;
            }
            while let Some(Reverse((_, _, tie, s, t))) = heap.pop() {
                if !self.alive[s] || !self.alive[t] || !self.rows[s].contains_key(&t) {
                    continue;
                }
                if self.order == PivotOrder::MinFill {
                    let cur = self.fill(s, t);
                    if cur > tie {
                        heap.push(Reverse((level, self.gradings[s].i, cur, s, t)));
                        continue;
                    }
                }
                self.cancel(s, t, level, &mut heap)?;
                pairs.push((level, s, t));
            }
            level += 1;
        }
        let survivors = (0..self.alive.len()).filter(|&x| self.alive[x]).collect();
        Ok(Outcome { survivors, pairs })
    }

    fn remove(&mut self, v: usize) {
        for t in std::mem::take(&mut self.rows[v]).into_keys() {
            self.cols[t].remove(&v);
        }
        for s in std::mem::take(&mut self.cols[v]) {
            self.rows[s].remove(&v);
        }
        self.alive[v] = false;
    }

    fn cancel(&mut self, s: usize, t: usize, level: i32, heap: &mut BinaryHeap<HeapKey>) -> Result<()> {
        let a = self.rows[s][&t].clone();
        let inv = a
            .recip()
            .ok_or_else(|| Error::Invariant("zero pivot selected".into()))?;
        let into_t: Vec<(usize, Rational)> = self.cols[t]
            .iter()
            .filter(|&&x| x != s)
            .map(|&x| (x, self.rows[x][&t].clone()))
            .collect();
        let out_of_s: Vec<(usize, Rational)> = self.rows[s]
            .iter()
            .filter(|(&y, _)| y != t)
            .map(|(&y, c)| (y, c.clone()))
            .collect();
        self.remove(s);
        self.remove(t);
        for (x, gamma) in &into_t {
            let f = -(gamma * &inv);
            for (y, kappa) in &out_of_s {
                self.add_entry(*x, *y, &f * kappa, level, heap)?;
            }
        }
        Ok(())
    }

    fn add_entry(
        &mut self,
        x: usize,
        y: usize,
        delta: Rational,
        level: i32,
        heap: &mut BinaryHeap<HeapKey>,
    ) -> Result<()> {
        let (gx, gy) = (self.gradings[x], self.gradings[y]);
        if gy.i != gx.i + 1 {
            return Err(Error::Invariant(format!(
                "update {gx} -> {gy} breaks homological degree"
            )));
        }
        let new_at_level = if self.over_beta {
            if gx.j != gy.j || (gx.k - gy.k) % 2 != 0 || (gx.k - gy.k) / 2 < level {
                return Err(Error::Invariant(format!(
                    "update {gx} -> {gy} is not a monomial of beta-degree >= {level}"
                )));
            }
            (gx.k - gy.k) / 2 == level
        } else {
            true
        };
        let entry = self.rows[x].entry(y).or_insert_with(Rational::zero);
        let fresh = entry.is_zero();
        *entry += &delta;
        if entry.is_zero() {
            self.rows[x].remove(&y);
            self.cols[y].remove(&x);
        } else {
            self.cols[y].insert(x);
            if fresh && new_at_level {
                let k = self.key(level, x, y);
                heap.push(k);
            }
        }
        Ok(())
    }
}

/// Homology basis data for one grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingBasis {
    /// Chain-level basis: generator indices in ascending order.
    pub generators: Vec<usize>,
    /// One representative per homology class, as coefficients over
    /// `generators`, normalized to leading coefficient 1.
    pub representatives: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct FieldHomology {
    pub dims: GradedDims,
    pub basis: Option<BTreeMap<Trigrading, GradingBasis>>,
}

pub fn homology_over_field(c: &FieldComplex, with_basis: bool) -> Result<FieldHomology> {
    check_square_zero(c.len(), c.entries.iter().map(|(s, t, x)| (*s, *t, x)))?;
    let out = Eliminator::new(&c.gradings, c.entries.iter().cloned(), false, PivotOrder::MinFill).run()?;
    let dims = GradedDims::from_gradings(out.survivors.iter().map(|&x| c.gradings[x]));
    let basis = if with_basis {
        let mut all = BTreeMap::new();
        for (g, n) in dims.iter() {
            let b = grading_basis(c, |x| x == *g);
            if b.representatives.len() != *n {
                return Err(Error::Invariant(format!(
                    "dense and sparse homology disagree at {g}: {} vs {n}",
                    b.representatives.len()
                )));
            }
            all.insert(*g, b);
        }
        Some(all)
    } else {
        None
    };
    Ok(FieldHomology { dims, basis })
}

/// Chain-level basis and homology representatives on the generators selected
/// by `in_grading`; the selection must be a union of gradings within one
/// homological degree.
pub fn grading_basis(c: &FieldComplex, in_grading: impl Fn(Trigrading) -> bool) -> GradingBasis {
    let gens: Vec<usize> = (0..c.len()).filter(|&x| in_grading(c.gradings[x])).collect();
    let pos: BTreeMap<usize, usize> = gens.iter().enumerate().map(|(p, &x)| (x, p)).collect();
    let dim = gens.len();

    let mut out_rows: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    let mut image: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    for (s, t, a) in &c.entries {
        if let Some(&p) = pos.get(s) {
            out_rows.entry(*t).or_insert_with(|| vec![Rational::zero(); dim])[p] += a;
        }
        if let Some(&p) = pos.get(t) {
            image.entry(*s).or_insert_with(|| vec![Rational::zero(); dim])[p] += a;
        }
    }
    let d_out: linalg::Matrix = out_rows.into_values().collect();
    let image: Vec<Vec<Rational>> = image.into_values().collect();
    GradingBasis {
        generators: gens,
        representatives: linalg::homology_representatives(&d_out, &image, dim),
    }
}

/// A summand `Q[beta] --beta^k--> Q[beta]` with its source trigrading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Staircase {
    pub k: u32,
    pub source: Trigrading,
}

impl Staircase {
    pub fn target(&self) -> Trigrading {
        Trigrading::new(self.source.i + 1, self.source.j, self.source.k - 2 * self.k as i32)
    }
}

/// The unique splitting of a `Q[beta]` complex into free summands (`W_0`)
/// and staircases (`W_k`, `k >= 1`). Both lists are kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub w0: Vec<Trigrading>,
    pub staircases: Vec<Staircase>,
}

impl Decomposition {
    pub fn new(mut w0: Vec<Trigrading>, mut staircases: Vec<Staircase>) -> Self {
        w0.sort();
        staircases.sort();
        Decomposition { w0, staircases }
    }

    pub fn w0_dims(&self) -> GradedDims {
        GradedDims::from_gradings(self.w0.iter().copied())
    }

    /// Graded dimensions of `W_k` at source gradings (`k = 0` gives `W_0`).
    pub fn wk_dims(&self, k: u32) -> GradedDims {
        if k == 0 {
            return self.w0_dims();
        }
        GradedDims::from_gradings(self.staircases.iter().filter(|s| s.k == k).map(|s| s.source))
    }

    pub fn max_k(&self) -> u32 {
        self.staircases.iter().map(|s| s.k).max().unwrap_or(0)
    }

    /// Trigraded homology at `beta = 0`: `W_0` plus both ends of every
    /// staircase.
    pub fn beta_zero_dims(&self) -> GradedDims {
        let mut d = self.w0_dims();
        for s in &self.staircases {
            d.add(s.source, 1);
            d.add(s.target(), 1);
        }
        d
    }

    /// Bigraded homology at `beta = 1`, where staircases are contractible.
    pub fn beta_one_dims(&self) -> GradedDims {
        self.w0_dims().forget_k()
    }
}

pub fn staircase_decompose(c: &ChainComplex, order: PivotOrder) -> Result<Decomposition> {
    if !c.has_beta_grading() {
        return Err(Error::Input(format!(
            "the {} differential has no Q[beta] structure",
            c.frobenius.name
        )));
    }
    let gradings = c.gradings();
    let out = Eliminator::new(
        &gradings,
        c.entries.iter().map(|e| (e.source, e.target, e.coeff.clone())),
        true,
        order,
    )
    .run()?;
    let w0 = out.survivors.iter().map(|&x| gradings[x]).collect();
    let staircases = out
        .pairs
        .into_iter()
        .filter(|(n, _, _)| *n > 0)
        .map(|(n, s, _)| Staircase {
            k: n as u32,
            source: gradings[s],
        })
        .collect();
    Ok(Decomposition::new(w0, staircases))
}

type Signed = BTreeMap<Trigrading, i64>;

fn signed(d: &GradedDims) -> Signed {
    d.iter().map(|(g, n)| (*g, *n as i64)).collect()
}

fn combine(a: &Signed, fa: i64, b: &Signed, fb: i64) -> Signed {
    let mut out = Signed::new();
    for (x, f) in [(a, fa), (b, fb)] {
        for (g, n) in x {
            *out.entry(*g).or_insert(0) += f * n;
        }
    }
    out.retain(|_, n| *n != 0);
    out
}

fn shift_k(a: &Signed, by: i32) -> Signed {
    a.iter()
        .map(|(g, n)| (Trigrading::new(g.i, g.j, g.k + by), *n))
        .collect()
}

/// Divides by `(1 + t)`, reading each `(j, k)` column from its lowest `i`.
fn divide_one_plus_t(p: &Signed) -> Result<GradedDims> {
    let mut columns: BTreeMap<(i32, i32), BTreeMap<i32, i64>> = BTreeMap::new();
    for (g, n) in p {
        columns.entry((g.j, g.k)).or_default().insert(g.i, *n);
    }
    let mut out = GradedDims::new();
    for ((j, k), col) in columns {
        let lo = *col.keys().next().unwrap();
        let hi = *col.keys().next_back().unwrap();
        let mut carry = 0i64;
        for i in lo..=hi {
            let w = col.get(&i).copied().unwrap_or(0) - carry;
            if w < 0 || (i == hi && w != 0) {
                return Err(Error::Invariant(format!(
                    "second difference at (j={j}, k={k}) is not (1+t) times a nonnegative series"
                )));
            }
            out.add(Trigrading::new(i, j, k), w as usize);
            carry = w;
        }
    }
    Ok(out)
}

fn field_dims(c: &ChainComplex, mode: Specialization) -> Result<GradedDims> {
    Ok(homology_over_field(&specialize(c, mode)?, false)?.dims)
}

/// Recovers `W_0, ..., W_{k_max}` from homology with `Q[beta]/beta^n`
/// coefficients, independently of [`staircase_decompose`].
///
/// With `H_n` the trigraded homology mod `beta^n` (`H_0 = 0`) and
/// `D_n = z^{-2n} (H_{n+1} - H_n)`, a staircase with parameter `k` and source
/// annular degree `a` contributes `(1 + t) z^{a - 2k}` to `D_{k-1} - D_k` and
/// nothing else does. `W_0` is what remains of `H_1` once every staircase is
/// accounted for, and must agree with the homology at `beta = 1`.
pub fn wk_from_oracle(c: &ChainComplex, k_max: u32) -> Result<Vec<GradedDims>> {
    if k_max < 1 {
        return Err(Error::Input("k_max must be at least 1".into()));
    }
    if !c.has_beta_grading() {
        return Err(Error::Input("the oracle needs a Q[beta] complex".into()));
    }
    let spread = match (
        c.generators.iter().map(|g| g.grading.k).max(),
        c.generators.iter().map(|g| g.grading.k).min(),
    ) {
        (Some(a), Some(b)) => ((a - b) / 2) as u32,
        _ => 0,
    };
    let top = k_max.max(spread);

    let mut h: Vec<Signed> = vec![Signed::new()];
    for n in 1..=top + 1 {
        h.push(signed(&field_dims(c, Specialization::ModBeta(n))?));
    }
    let d: Vec<Signed> = (0..=top as usize)
        .map(|m| shift_k(&combine(&h[m + 1], 1, &h[m], -1), -2 * m as i32))
        .collect();

    let mut wk = vec![GradedDims::new()];
    for n in 1..=top as usize {
        let x = combine(&d[n - 1], 1, &d[n], -1);
        let at_target = divide_one_plus_t(&x)?;
        let mut w = GradedDims::new();
        for (g, m) in at_target.iter() {
            w.add(Trigrading::new(g.i, g.j, g.k + 2 * n as i32), *m);
        }
        wk.push(w);
    }

    let mut w0 = h[1].clone();
    for (n, w) in wk.iter().enumerate().skip(1) {
        for (g, m) in w.iter() {
            let s = Staircase {
                k: n as u32,
                source: *g,
            };
            *w0.entry(s.source).or_insert(0) -= *m as i64;
            *w0.entry(s.target()).or_insert(0) -= *m as i64;
        }
    }
    w0.retain(|_, n| *n != 0);
    let mut w0_dims = GradedDims::new();
    for (g, n) in &w0 {
        if *n < 0 {
            return Err(Error::Invariant(format!("negative W_0 dimension at {g}")));
        }
        w0_dims.add(*g, *n as usize);
    }
    if w0_dims.forget_k() != field_dims(c, Specialization::BetaOne)? {
        return Err(Error::Invariant(
            "W_0 from the mod beta^n tower disagrees with the beta = 1 homology".into(),
        ));
    }
    wk[0] = w0_dims;
    wk.truncate(k_max as usize + 1);
    while wk.len() < k_max as usize + 1 {
        wk.push(GradedDims::new());
    }
    Ok(wk)
}

/// Page `E_j` of the spectral sequence from annular to ordinary Khovanov
/// homology: `W_0` plus both ends of every staircase with `2k > j`.
pub fn spectral_page(d: &Decomposition, j: u32) -> GradedDims {
    let mut out = d.w0_dims();
    for s in d.staircases.iter().filter(|s| 2 * s.k > j) {
        out.add(s.source, 1);
        out.add(s.target(), 1);
    }
    out
}
