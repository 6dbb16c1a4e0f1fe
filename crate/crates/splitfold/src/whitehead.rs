//! Whitehead graphs, Whitehead automorphisms, and free factor support.
//!
//! The free factor support of a finitely generated `H <= F_n` is the
//! unique minimal free factor containing it. It is computed by Whitehead
//! descent: apply Whitehead automorphisms while the cyclic core of the
//! subgroup graph strictly shrinks, restrict to the sub-basis of letters
//! that still occur, and repeat. At a minimum using all remaining
//! letters, connectivity and cut-vertex-freeness of the Whitehead graph
//! certify that the subgroup fills the current factor (the transversality
//! certificate, which needs no minimality hypothesis). The automorphism
//! chain is returned as a witness and is unwound to express the support
//! as an explicit subgroup of the original basis.

use crate::error::{validation, Error, Result};
use crate::subgroup::{CoreGraph, StallingsGraph};
use crate::word::{Basis, Endomorphism, Letter, Word};
use crate::Envelope;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// The letter-incidence graph of a core graph or cyclic word: vertices
/// are the `2n` oriented letters, and every length-2 turn read from the
/// generating data contributes one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    basis: Basis,
    edges: Vec<(Letter, Letter)>,
}

/// Outcome of the cut vertex query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutReport {
    Disconnected,
    CutVertex(Letter),
    None,
}

impl WhiteheadGraph {
    /// Turns of a folded core graph: at each vertex, every unordered
    /// pair of distinct arriving letters.
    pub fn from_core(core: &CoreGraph) -> WhiteheadGraph {
        let mut edges = Vec::new();
        for m in core.transitions() {
            let arriving: Vec<Letter> = m.keys().map(|l| l.inverse()).collect();
            for i in 0..arriving.len() {
                for j in (i + 1)..arriving.len() {
                    let (x, y) = (arriving[i], arriving[j]);
                    edges.push(if x <= y { (x, y) } else { (y, x) });
                }
            }
        }
        edges.sort();
        WhiteheadGraph {
            basis: core.basis().clone(),
            edges,
        }
    }

    /// Turns of a cyclic word: one edge `{x_i, x_{i+1}^-1}` per cyclic
    /// position.
    pub fn from_cyclic_word(basis: &Basis, w: &Word) -> WhiteheadGraph {
        let core = w.cyclic_reduction();
        let mut edges = Vec::new();
        let ls = core.letters();
        for i in 0..ls.len() {
            let x = ls[i];
            let y = ls[(i + 1) % ls.len()].inverse();
            edges.push(if x <= y { (x, y) } else { (y, x) });
        }
        edges.sort();
        WhiteheadGraph {
            basis: basis.clone(),
            edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Letter, Letter)] {
        &self.edges
    }

    fn components(&self, vertices: &[Letter], removed: Option<Letter>) -> usize {
        let verts: Vec<Letter> = vertices.iter().copied().filter(|&v| Some(v) != removed).collect();
        if verts.is_empty() {
            return 0;
        }
        let index = |l: Letter| verts.iter().position(|&v| v == l);
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            r
        }
        for &(x, y) in &self.edges {
            if Some(x) == removed || Some(y) == removed {
                continue;
            }
            if let (Some(i), Some(j)) = (index(x), index(y)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..verts.len() {
            roots.insert(find(&mut parent, i));
        }
        roots.len()
    }

    /// Connectivity / cut vertex report over the given vertex set
    /// (lexicographically least cut vertex when several exist).
    pub fn cut_vertex_over(&self, vertices: &[Letter]) -> Result<CutReport> {
        if self.edges.is_empty() {
            return Err(validation("Whitehead graph has no edges (degenerate input)"));
        }
        if self.components(vertices, None) > 1 {
            return Ok(CutReport::Disconnected);
        }
        let mut candidates: Vec<Letter> = vertices.to_vec();
        candidates.sort_by_key(|l| l.code());
        for v in candidates {
            if vertices.len() >= 3 && self.components(vertices, Some(v)) > 1 {
                return Ok(CutReport::CutVertex(v));
            }
        }
        Ok(CutReport::None)
    }

    /// Report over the full `2n` oriented letters of the basis.
    pub fn cut_vertex(&self) -> Result<CutReport> {
        let all = self.basis.oriented_letters();
        self.cut_vertex_over(&all)
    }
}

/// A Whitehead automorphism of the second kind `(A, a)`: multiplier
/// `a`, with `a` in `A` and `a^-1` not in `A`. Letters outside `A` are
/// fixed; a letter `x` has `a` appended when `x` is in `A` and `a^-1`
/// prepended when `x^-1` is in `A`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WhiteheadAut {
    pub multiplier: Letter,
    pub set: BTreeSet<Letter>,
}

impl fmt::Debug for WhiteheadAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({:?}; {:?})", self.multiplier, self.set)
    }
}

impl WhiteheadAut {
    pub fn endomorphism(&self, rank: usize) -> Endomorphism {
        let a = self.multiplier;
        let mut images = Vec::with_capacity(rank);
        for i in 0..rank as u16 {
            let x = Letter::positive(i);
            if x.index() == a.index() {
                images.push(Word::letter(x));
                continue;
            }
            let mut letters = Vec::new();
            if self.set.contains(&x.inverse()) {
                letters.push(a.inverse());
            }
            letters.push(x);
            if self.set.contains(&x) {
                letters.push(a);
            }
            images.push(Word::from_letters(letters));
        }
        Endomorphism::new(images)
    }

    pub fn inverse(&self) -> WhiteheadAut {
        let mut set: BTreeSet<Letter> = self
            .set
            .iter()
            .copied()
            .filter(|&l| l != self.multiplier)
            .collect();
        set.insert(self.multiplier.inverse());
        WhiteheadAut {
            multiplier: self.multiplier.inverse(),
            set,
        }
    }

    pub fn display(&self, basis: &Basis) -> String {
        let parts: Vec<String> = self.set.iter().map(|&l| basis.display_letter(l)).collect();
        format_args!(
            "({{{}}}; {})",
            parts.join(" "),
            basis.display_letter(self.multiplier)
        )
        .to_string()
    }
}

/// All nontrivial Whitehead automorphisms supported on the given
/// oriented letters (both orientations of the active sub-basis).
fn whitehead_auts(active: &[Letter]) -> Vec<WhiteheadAut> {
    let mut out = Vec::new();
    for &a in active {
        let rest: Vec<Letter> = active
            .iter()
            .copied()
            .filter(|&l| l.index() != a.index())
            .collect();
        let m = rest.len();
        for mask in 1u64..(1u64 << m) {
            let mut set: BTreeSet<Letter> = BTreeSet::new();
            set.insert(a);
            for (bit, &l) in rest.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    set.insert(l);
                }
            }
            out.push(WhiteheadAut { multiplier: a, set });
        }
    }
    out.sort();
    out
}

/// The free factor support of a subgroup.
#[derive(Clone, Debug)]
pub struct Support {
    /// Folded graph of the minimal free factor containing the input
    /// subgroup (an actual overgroup, not just a conjugacy class).
    pub factor: StallingsGraph,
    /// Rank of the support; with an empty atom system this is its
    /// Kurosh rank.
    pub rank: usize,
    /// Whether the support is a proper free factor of `F_n`.
    pub is_proper: bool,
    /// The Whitehead automorphisms applied during the descent, in order.
    pub witness: Vec<WhiteheadAut>,
}

/// Computes the free factor support of `<generators>`.
pub fn free_factor_support(basis: &Basis, generators: &[Word], env: &Envelope) -> Result<Support> {
    let n = basis.rank();
    if n > 5 {
        return Err(Error::ResourceLimit(
            "free factor support is implemented for rank at most 5".into(),
        ));
    }
    let h = StallingsGraph::fold(basis, generators);
    if h.is_trivial() {
        return Ok(Support {
            factor: StallingsGraph::trivial(basis),
            rank: 0,
            is_proper: true,
            witness: Vec::new(),
        });
    }
    // Short basis of the same subgroup; keeps words small along the
    // descent.
    let mut gens = h.generators();
    let mut chain: Vec<WhiteheadAut> = Vec::new();
    let mut active: BTreeSet<u16> = (0..n as u16).collect();
    let mut level_moves = 0usize;
    let level_cap = 8 * (1usize << (2 * n));

    let core_size = |gens: &[Word]| -> (usize, CoreGraph) {
        let g = StallingsGraph::fold(basis, gens);
        let (core, _) = g.cyclic_core();
        (core.edge_count(), core)
    };

    loop {
        let (size, core) = core_size(&gens);
        if size > env.max_edges {
            return Err(Error::ResourceLimit(
                format_args!("subgroup core has {size} edges, envelope is {}", env.max_edges).to_string(),
            ));
        }
        // Restrict to the letters still occurring.
        let occurring: BTreeSet<u16> = core.occurring_letters().iter().map(|l| l.index()).collect();
        if occurring.len() < active.len() {
            active = occurring;
            continue;
        }
        let oriented: Vec<Letter> = active
            .iter()
            .flat_map(|&i| [Letter::positive(i), Letter::positive(i).inverse()])
            .collect();
        // Strict descent.
        let mut best: Option<(usize, WhiteheadAut)> = None;
        for aut in whitehead_auts(&oriented) {
            let endo = aut.endomorphism(n);
            let mapped: Vec<Word> = gens.iter().map(|g| endo.apply(g)).collect();
            let (s, _) = core_size(&mapped);
            if s < size && best.as_ref().map_or(true, |(bs, ba)| s < *bs || (s == *bs && aut < *ba)) {
                best = Some((s, aut));
            }
        }
        if let Some((_, aut)) = best {
            let endo = aut.endomorphism(n);
            gens = StallingsGraph::fold(basis, &gens.iter().map(|g| endo.apply(g)).collect::<Vec<_>>())
                .generators();
            chain.push(aut);
            continue;
        }
        // At a strict minimum with all active letters occurring: the
        // Whitehead graph certifies filling unless it has a cut vertex.
        let w = WhiteheadGraph::from_core(&core);
        match w.cut_vertex_over(&oriented)? {
            CutReport::None => break,
            CutReport::CutVertex(z) => {
                // Cut vertex move: one lobe plus the cut letter. Never
                // increases complexity; guarded against cycling.
                let aut = cut_vertex_move(&w, &oriented, z);
                let endo = aut.endomorphism(n);
                let mapped: Vec<Word> = gens.iter().map(|g| endo.apply(g)).collect();
                let (s, _) = core_size(&mapped);
                if s > size {
                    return Err(Error::PropertyViolation(
                        "cut vertex move increased core size".into(),
                    ));
                }
                level_moves += 1;
                if level_moves > level_cap {
                    return Err(Error::ResourceLimit(
                        "Whitehead descent cycled on level moves".into(),
                    ));
                }
                gens = StallingsGraph::fold(basis, &mapped).generators();
                chain.push(aut);
                continue;
            }
            CutReport::Disconnected => {
                // A connected core with all letters occurring cannot have
                // a disconnected Whitehead graph at a strict minimum.
                return Err(Error::ResourceLimit(
                    "Whitehead descent stalled on a disconnected turn graph".into(),
                ));
            }
        }
    }

    // Unwind: the current image subgroup is conjugate (by the hair word
    // of its based graph) into the sub-basis factor on the active
    // letters; pull the factor back through the chain.
    let folded = StallingsGraph::fold(basis, &gens);
    let (_, conj) = folded.cyclic_core();
    // chain applies as psi = psi_k ∘ ... ∘ psi_1, so the inverse
    // composes forward: psi^-1 = psi_1^-1 ∘ ... ∘ psi_k^-1.
    let mut inverse_chain = Endomorphism::identity(n);
    for aut in chain.iter() {
        inverse_chain = inverse_chain.compose_after(&aut.inverse().endomorphism(n));
    }
    let factor_gens: Vec<Word> = active
        .iter()
        .map(|&i| {
            let x = Word::letter(Letter::positive(i));
            inverse_chain.apply(&x.conjugate_by(&conj))
        })
        .collect();
    let factor = StallingsGraph::fold(basis, &factor_gens);
    let rank = active.len();
    debug_assert_eq!(factor.rank(), rank);
    Ok(Support {
        factor,
        rank,
        is_proper: rank < n,
        witness: chain,
    })
}

fn cut_vertex_move(w: &WhiteheadGraph, oriented: &[Letter], z: Letter) -> WhiteheadAut {
    // Components of W minus z; pick the lex-least component not
    // containing z^-1.
    let verts: Vec<Letter> = oriented.iter().copied().filter(|&v| v != z).collect();
    let mut comp_of: alloc::collections::BTreeMap<Letter, usize> = alloc::collections::BTreeMap::new();
    let mut comps: Vec<BTreeSet<Letter>> = Vec::new();
    for &v in &verts {
        if comp_of.contains_key(&v) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = alloc::vec![v];
        comp.insert(v);
        while let Some(x) = stack.pop() {
            for &(p, q) in w.edges() {
                if p == z || q == z {
                    continue;
                }
                for (s, t) in [(p, q), (q, p)] {
                    if s == x && !comp.contains(&t) {
                        comp.insert(t);
                        stack.push(t);
                    }
                }
            }
        }
        for &x in &comp {
            comp_of.insert(x, comps.len());
        }
        comps.push(comp);
    }
    let lobe = comps
        .iter()
        .find(|c| !c.contains(&z.inverse()))
        .expect("a cut vertex has a lobe avoiding the inverse multiplier");
    let mut set = lobe.clone();
    set.insert(z);
    WhiteheadAut { multiplier: z, set }
}

/// Idempotence helper: support of a support is itself.
pub fn is_support_of(support: &Support, basis: &Basis, env: &Envelope) -> Result<bool> {
    let again = free_factor_support(basis, &support.factor.generators(), env)?;
    Ok(again.rank == support.rank && again.factor.conjugate_eq(&support.factor))
}
