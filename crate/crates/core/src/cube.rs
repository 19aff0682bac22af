//! Cube of resolutions of an annular braid closure.
//!
//! The closed braid is cut into levels `0..=L` (one per gap between
//! crossings); level `l` carries one node per strand position. Smoothing a
//! crossing joins nodes on adjacent levels, and the closure joins level `L`
//! back to level `0` around the axis. The arc joining `(L, p)` to `(0, p)` is
//! the closure arc at position `p`; a circle encloses the axis exactly when it
//! uses an odd number of closure arcs.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};

/// Hard ceiling on the crossing count; a vertex is stored in a `u64`.
pub const MAX_CROSSINGS: usize = 40;
pub const DEFAULT_LIMIT: usize = 20;

/// A vertex of the cube: one bit per crossing, in braid-letter order. The
/// first letter is the most significant bit of `code`, so ascending codes
/// list vertices in lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    code: u64,
    len: usize,
}

impl Vertex {
    pub fn new(code: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_CROSSINGS && (len == 64 || code >> len == 0));
        Vertex { code, len }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let code = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Vertex { code, len: bits.len() }
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, c: usize) -> bool {
        (self.code >> (self.len - 1 - c)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|c| self.bit(c)).collect()
    }

    pub fn with_bit(&self, c: usize) -> Vertex {
        Vertex {
            code: self.code | (1 << (self.len - 1 - c)),
            len: self.len,
        }
    }

    /// `|v|`, the number of 1-bits.
    pub fn weight(&self) -> usize {
        self.code.count_ones() as usize
    }

    /// Number of 1-bits strictly before crossing `c`.
    pub fn ones_before(&self, c: usize) -> usize {
        (0..c).filter(|&k| self.bit(k)).count()
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: Vec<&str> = self.bits().iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "{{{}}}", bits.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleKind {
    Trivial,
    /// Encloses the axis; depth 1 is the innermost essential circle.
    Nontrivial {
        depth: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub id: usize,
    /// Strand positions (1-based) whose closure arc lies on this cycle.
    pub closure_positions: Vec<usize>,
    pub kind: CycleKind,
}

impl Cycle {
    pub fn is_nontrivial(&self) -> bool {
        matches!(self.kind, CycleKind::Nontrivial { .. })
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.closure_positions.iter().map(|p| p.to_string()).collect();
        match self.kind {
            CycleKind::Trivial => write!(f, "T{{{}}}", pos.join(",")),
            CycleKind::Nontrivial { depth } => write!(f, "N{depth}{{{}}}", pos.join(",")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmoothedDiagram {
    pub vertex: Vertex,
    pub cycles: Vec<Cycle>,
    /// Cycle id of every node `level * strands + (position - 1)`.
    node_cycle: Vec<usize>,
    strands: usize,
}

impl SmoothedDiagram {
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Cycle through the node at `level`, `position` (1-based).
    pub fn cycle_at(&self, level: usize, position: usize) -> usize {
        self.node_cycle[level * self.strands + position - 1]
    }

    pub fn nontrivial_count(&self) -> usize {
        self.cycles.iter().filter(|c| c.is_nontrivial()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surgery {
    /// Cycles `a` and `b` of the source fuse into `into` of the target.
    Merge { a: usize, b: usize, into: usize },
    /// Cycle `from` of the source divides into `a` and `b` of the target.
    Split { from: usize, a: usize, b: usize },
}

#[derive(Clone, Debug)]
pub struct EdgeData {
    pub from: Vertex,
    pub to: Vertex,
    pub crossing: usize,
    pub sign: i64,
    pub surgery: Surgery,
    /// Source cycle id -> target cycle id for cycles away from the crossing.
    pub passive: Vec<(usize, usize)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Whether crossing `c` is replaced by the cup-cap smoothing at this vertex.
fn is_cup_cap(b: &BraidWord, c: usize, bit: bool) -> bool {
    b.is_positive(c) == bit
}

pub fn resolve_vertex(b: &BraidWord, v: Vertex) -> Result<SmoothedDiagram> {
    if v.len() != b.len() {
        return Err(Error::Input(format!(
            "vertex has {} bits but the braid has {} crossings",
            v.len(),
            b.len()
        )));
    }
    let n = b.strands();
    let levels = b.len() + 1;
    let node = |level: usize, pos: usize| level * n + pos - 1;
    let mut uf = UnionFind::new(levels * n);

    for c in 0..b.len() {
        let g = b.generator(c);
        for p in (1..=n).filter(|&p| p != g && p != g + 1) {
            uf.union(node(c, p), node(c + 1, p));
        }
        if is_cup_cap(b, c, v.bit(c)) {
            uf.union(node(c, g), node(c, g + 1));
            uf.union(node(c + 1, g), node(c + 1, g + 1));
        } else {
            uf.union(node(c, g), node(c + 1, g));
            uf.union(node(c, g + 1), node(c + 1, g + 1));
        }
    }
    for p in 1..=n {
        uf.union(node(b.len(), p), node(0, p));
    }

    // cycle ids in order of first (smallest) node
    let mut root_id = vec![usize::MAX; levels * n];
    let mut node_cycle = vec![0; levels * n];
    let mut count = 0;
    for x in 0..levels * n {
        let r = uf.find(x);
        if root_id[r] == usize::MAX {
            root_id[r] = count;
            count += 1;
        }
        node_cycle[x] = root_id[r];
    }

    let mut positions = vec![Vec::new(); count];
    for p in 1..=n {
        positions[node_cycle[node(0, p)]].push(p);
    }
    let mut essential: Vec<usize> = (0..count).filter(|&id| positions[id].len() % 2 == 1).collect();
    essential.sort_by_key(|&id| positions[id][0]);
    let mut kinds = vec![CycleKind::Trivial; count];
    for (d, &id) in essential.iter().enumerate() {
        kinds[id] = CycleKind::Nontrivial { depth: d + 1 };
    }

    let cycles = positions
        .into_iter()
        .zip(kinds)
        .enumerate()
        .map(|(id, (closure_positions, kind))| Cycle {
            id,
            closure_positions,
            kind,
        })
        .collect();

    Ok(SmoothedDiagram {
        vertex: v,
        cycles,
        node_cycle,
        strands: n,
    })
}

/// Edge data between two already resolved, adjacent diagrams.
pub fn edge_between(b: &BraidWord, from: &SmoothedDiagram, to: &SmoothedDiagram) -> Result<EdgeData> {
    let (fv, tv) = (from.vertex, to.vertex);
    let diff = fv.code() ^ tv.code();
    if fv.len() != tv.len() || diff.count_ones() != 1 || fv.code() & diff != 0 {
        return Err(Error::Input(format!(
            "vertices {fv} and {tv} are not joined by a cube edge"
        )));
    }
    let c = fv.len() - 1 - diff.trailing_zeros() as usize;
    // In either smoothing the two local arcs separate (c, g) from (c + 1, g + 1).
    let g = b.generator(c);

    let sign = if fv.ones_before(c) % 2 == 0 { 1 } else { -1 };
    let (fa, fb) = (from.cycle_at(c, g), from.cycle_at(c + 1, g + 1));
    let (ta, tb) = (to.cycle_at(c, g), to.cycle_at(c + 1, g + 1));
    let surgery = if fa != fb {
        if ta != tb {
            return Err(Error::Invariant(format!("edge {fv}->{tv} neither merges nor splits")));
        }
        Surgery::Merge { a: fa, b: fb, into: ta }
    } else {
        if ta == tb {
            return Err(Error::Invariant(format!("edge {fv}->{tv} neither merges nor splits")));
        }
        Surgery::Split { from: fa, a: ta, b: tb }
    };

    // Untouched cycles keep their node sets; match them by any node.
    let touched_from = [fa, fb];
    let mut passive = Vec::new();
    let mut seen = vec![false; from.cycle_count()];
    for (x, &cid) in from.node_cycle.iter().enumerate() {
        if seen[cid] || touched_from.contains(&cid) {
            continue;
        }
        seen[cid] = true;
        passive.push((cid, to.node_cycle[x]));
    }
    passive.sort_unstable();

    Ok(EdgeData {
        from: fv,
        to: tv,
        crossing: c,
        sign,
        surgery,
        passive,
    })
}

pub fn edge_map(b: &BraidWord, from: Vertex, to: Vertex) -> Result<EdgeData> {
    let f = resolve_vertex(b, from)?;
    let t = resolve_vertex(b, to)?;
    edge_between(b, &f, &t)
}

#[derive(Clone, Debug)]
pub struct Cube {
    pub braid: BraidWord,
    /// Indexed by vertex code.
    pub diagrams: Vec<SmoothedDiagram>,
    /// Ordered by source vertex code, then crossing index.
    pub edges: Vec<EdgeData>,
}

impl Cube {
    pub fn crossings(&self) -> usize {
        self.braid.len()
    }

    pub fn diagram(&self, v: Vertex) -> &SmoothedDiagram {
        &self.diagrams[v.code() as usize]
    }
}

pub fn check_size(b: &BraidWord, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_CROSSINGS);
    if b.len() > limit {
        return Err(Error::SizeLimit {
            crossings: b.len(),
            limit,
        });
    }
    Ok(())
}

pub fn build_cube(b: &BraidWord, limit: usize) -> Result<Cube> {
    check_size(b, limit)?;
    let c = b.len();
    let diagrams = (0..1u64 << c)
        .into_par_iter()
        .map(|code| resolve_vertex(b, Vertex::new(code, c)))
        .collect::<Result<Vec<_>>>()?;
    let edges = (0..1u64 << c)
        .into_par_iter()
        .map(|code| {
            let from = &diagrams[code as usize];
            (0..c)
                .filter(|&k| !from.vertex.bit(k))
                .map(|k| edge_between(b, from, &diagrams[from.vertex.with_bit(k).code() as usize]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(Cube {
        braid: b.clone(),
        diagrams,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn br(s: usize, l: &[i64]) -> BraidWord {
        BraidWord::new(s, l.to_vec()).unwrap()
    }

    #[test]
    fn trefoil_resolutions() {
        let cube = build_cube(&br(2, &[-1, -1, -1]), DEFAULT_LIMIT).unwrap();
        // k horizontal smoothings of a closed 2-braid give k circles, none
        // of them essential; zero horizontal smoothings give 2 essential ones
        for d in &cube.diagrams {
            let horizontal = 3 - d.vertex.weight();
            if horizontal == 0 {
                assert_eq!(d.cycle_count(), 2);
                let depths: Vec<CycleKind> = d.cycles.iter().map(|c| c.kind).collect();
                assert_eq!(
                    depths,
                    vec![CycleKind::Nontrivial { depth: 1 }, CycleKind::Nontrivial { depth: 2 }]
                );
            } else {
                assert_eq!(d.cycle_count(), horizontal);
                assert_eq!(d.nontrivial_count(), 0);
            }
        }
        let counts: Vec<usize> = cube.diagrams.iter().map(|d| d.cycle_count()).collect();
        assert_eq!(counts, vec![3, 2, 2, 1, 2, 1, 1, 2]);
    }

    #[test]
    fn positive_crossings_smooth_the_other_way() {
        let cube = build_cube(&br(2, &[1, 1]), DEFAULT_LIMIT).unwrap();
        assert_eq!(cube.diagram(Vertex::new(0, 2)).nontrivial_count(), 2);
        assert_eq!(cube.diagram(Vertex::new(3, 2)).cycle_count(), 2);
        assert_eq!(cube.diagram(Vertex::new(3, 2)).nontrivial_count(), 0);
    }

    #[test]
    fn vertex_bits() {
        let v = Vertex::new(0b011, 3);
        assert_eq!(v.bits(), vec![false, true, true]);
        assert_eq!(v.to_string(), "{0,1,1}");
        assert_eq!(v.weight(), 2);
        assert_eq!(v.ones_before(2), 1);
        assert_eq!(v.with_bit(0).code(), 0b111);
        assert_eq!(Vertex::from_bits(&[true, false]), Vertex::new(0b10, 2));
    }

    #[test]
    fn size_limit() {
        let b = br(2, &[1; 6]);
        assert!(matches!(
            build_cube(&b, 5),
            Err(Error::SizeLimit { crossings: 6, limit: 5 })
        ));
        assert!(check_size(&b, 6).is_ok());
        assert!(matches!(
            check_size(&br(2, &[1; 41]), 100),
            Err(Error::SizeLimit { limit: 40, .. })
        ));
    }

    fn arb_braid() -> impl Strategy<Value = BraidWord> {
        (1usize..=4).prop_flat_map(|s| {
            let letter = if s == 1 {
                Just(0i64).boxed()
            } else {
                (1..s as i64).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]).boxed()
            };
            let max = if s == 1 { 0 } else { 6 };
            proptest::collection::vec(letter, 0..=max).prop_map(move |l| BraidWord::new(s, l).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn edges_and_signs(b in arb_braid()) {
            let cube = build_cube(&b, DEFAULT_LIMIT).unwrap();
            let c = b.len();
            prop_assert_eq!(cube.edges.len(), if c == 0 { 0 } else { c << (c - 1) });
            let mut sign = HashMap::new();
            for e in &cube.edges {
                prop_assert_eq!(e.to, e.from.with_bit(e.crossing));
                let expected = if e.from.ones_before(e.crossing) % 2 == 0 { 1 } else { -1 };
                prop_assert_eq!(e.sign, expected);
                // a merge or split changes the cycle count by exactly one
                let (nf, nt) = (cube.diagram(e.from).cycle_count(), cube.diagram(e.to).cycle_count());
                prop_assert_eq!(nf.abs_diff(nt), 1);
                sign.insert((e.from.code(), e.crossing), e.sign);
            }
            // every square anticommutes
            for v in 0..1u64 << c {
                let v = Vertex::new(v, c);
                for a in (0..c).filter(|&a| !v.bit(a)) {
                    for b2 in (a + 1..c).filter(|&b2| !v.bit(b2)) {
                        let s1 = sign[&(v.code(), a)] * sign[&(v.with_bit(a).code(), b2)];
                        let s2 = sign[&(v.code(), b2)] * sign[&(v.with_bit(b2).code(), a)];
                        prop_assert_eq!(s1, -s2);
                    }
                }
            }
        }

        #[test]
        fn closure_arcs_and_parity(b in arb_braid()) {
            let cube = build_cube(&b, DEFAULT_LIMIT).unwrap();
            for d in &cube.diagrams {
                let mut seen: Vec<usize> = d.cycles.iter().flat_map(|c| c.closure_positions.clone()).collect();
                seen.sort_unstable();
                prop_assert_eq!(seen, (1..=b.strands()).collect::<Vec<_>>());
                for c in &d.cycles {
                    prop_assert_eq!(c.is_nontrivial(), c.closure_positions.len() % 2 == 1);
                }
                // trivial circles meet the closure region evenly often
                prop_assert_eq!(d.nontrivial_count() % 2, b.strands() % 2);
                let mut depths: Vec<usize> = d.cycles.iter().filter_map(|c| match c.kind {
                    CycleKind::Nontrivial { depth } => Some(depth),
                    CycleKind::Trivial => None,
                }).collect();
                depths.sort_unstable();
                prop_assert_eq!(depths, (1..=d.nontrivial_count()).collect::<Vec<_>>());
            }
        }
    }
}
