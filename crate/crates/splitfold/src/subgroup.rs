//! Stallings graphs for finitely generated subgroups of `F_n`.
//!
//! A subgroup is represented by its folded based core graph: vertices,
//! deterministic letter-labelled transitions, and a base vertex. Folding
//! is generator-order independent (confluence), so the graph is a
//! canonical object for the subgroup.

use crate::error::{validation, Result};
use crate::word::{Basis, Letter, Word};
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

/// Incrementally folds generator loops into a based labelled graph.
pub struct SubgroupBuilder {
    basis: Basis,
    parent: Vec<u32>,
    size: Vec<u32>,
    arcs: Vec<BTreeMap<Letter, u32>>,
}

impl SubgroupBuilder {
    pub fn new(basis: Basis) -> Self {
        SubgroupBuilder {
            basis,
            parent: alloc::vec![0],
            size: alloc::vec![1],
            arcs: alloc::vec![BTreeMap::new()],
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = x;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.size.push(1);
        self.arcs.push(BTreeMap::new());
        id
    }

    /// Adds both directions of an arc and folds away any conflicts.
    fn add_arc(&mut self, u: u32, l: Letter, v: u32) {
        let mut pending = alloc::vec![(u, l, v)];
        while let Some((u, l, v)) = pending.pop() {
            let (mut ru, mut rv) = (self.find(u), self.find(v));
            // Install u --l--> v.
            match self.arcs[ru as usize].get(&l) {
                Some(&w) => {
                    let rw = self.find(w);
                    if rw != rv {
                        // Fold: identify v and w.
                        let (a, b) = if self.size[rw as usize] >= self.size[rv as usize] {
                            (rw, rv)
                        } else {
                            (rv, rw)
                        };
                        self.parent[b as usize] = a;
                        self.size[a as usize] += self.size[b as usize];
                        let moved = core::mem::take(&mut self.arcs[b as usize]);
                        for (ml, mt) in moved {
                            pending.push((a, ml, mt));
                        }
                        ru = self.find(u);
                        rv = self.find(v);
                    }
                }
                None => {
                    self.arcs[ru as usize].insert(l, v);
                }
            }
            // Install v --l^-1--> u (may trigger further folds).
            let lr = l.inverse();
            match self.arcs[rv as usize].get(&lr) {
                Some(&w) => {
                    let rw = self.find(w);
                    if rw != ru {
                        let (a, b) = if self.size[rw as usize] >= self.size[ru as usize] {
                            (rw, ru)
                        } else {
                            (ru, rw)
                        };
                        self.parent[b as usize] = a;
                        self.size[a as usize] += self.size[b as usize];
                        let moved = core::mem::take(&mut self.arcs[b as usize]);
                        for (ml, mt) in moved {
                            pending.push((a, ml, mt));
                        }
                    }
                }
                None => {
                    self.arcs[rv as usize].insert(lr, u);
                }
            }
        }
    }

    /// Attaches the word as a loop at the base vertex.
    pub fn add_word(&mut self, w: &Word) {
        if w.is_empty() {
            return;
        }
        let mut cur = 0u32;
        let letters = w.letters();
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { 0 } else { self.fresh() };
            self.add_arc(cur, l, next);
            cur = next;
        }
    }

    /// True once the folded graph already carries every basis letter as a
    /// loop at the base class, i.e. the subgroup is all of `F_n`.
    pub fn is_whole_group(&mut self) -> bool {
        let base = self.find(0);
        (0..self.basis.rank() as u16).all(|i| {
            let l = Letter::positive(i);
            match self.arcs[base as usize].get(&l).copied() {
                Some(t) => self.find(t) == base,
                None => false,
            }
        }) && {
            // All classes folded into the base class.
            let n = self.parent.len() as u32;
            (0..n).all(|v| self.find(v) == base)
        }
    }

    pub fn finish(mut self) -> StallingsGraph {
        // Compact representatives into 0..k with base first.
        let n = self.parent.len() as u32;
        let mut index: BTreeMap<u32, u32> = BTreeMap::new();
        let base_rep = self.find(0);
        index.insert(base_rep, 0);
        for v in 0..n {
            let r = self.find(v);
            let next_id = index.len() as u32;
            index.entry(r).or_insert(next_id);
        }
        let mut next: Vec<BTreeMap<Letter, u32>> = alloc::vec![BTreeMap::new(); index.len()];
        for v in 0..n {
            let r = self.find(v);
            if r != v {
                continue;
            }
            let arcs = core::mem::take(&mut self.arcs[r as usize]);
            let ri = index[&r];
            for (l, t) in arcs {
                let ti = index[&self.find(t)];
                next[ri as usize].insert(l, ti);
            }
        }
        StallingsGraph {
            basis: self.basis,
            next,
            base: 0,
        }
        .trimmed()
    }
}

/// The folded based core graph of a finitely generated subgroup.
///
/// Folded: at each vertex, at most one transition per oriented letter.
/// Core: every vertex except possibly the base has valence at least two.
#[derive(Clone, PartialEq, Eq)]
pub struct StallingsGraph {
    basis: Basis,
    next: Vec<BTreeMap<Letter, u32>>,
    base: u32,
}

impl fmt::Debug for StallingsGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StallingsGraph({} vertices, rank {})", self.next.len(), self.rank())
    }
}

impl StallingsGraph {
    /// Folds the subgroup generated by the given words.
    pub fn fold(basis: &Basis, generators: &[Word]) -> StallingsGraph {
        let mut b = SubgroupBuilder::new(basis.clone());
        for g in generators {
            b.add_word(g);
        }
        b.finish()
    }

    pub fn trivial(basis: &Basis) -> StallingsGraph {
        StallingsGraph {
            basis: basis.clone(),
            next: alloc::vec![BTreeMap::new()],
            base: 0,
        }
    }

    /// The full group as a subgroup: the rose over the basis.
    pub fn whole_group(basis: &Basis) -> StallingsGraph {
        let gens: Vec<Word> = (0..basis.rank())
            .map(|i| Word::letter(Letter::positive(i as u16)))
            .collect();
        StallingsGraph::fold(basis, &gens)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.next.len()
    }

    /// Number of unoriented edges.
    pub fn edge_count(&self) -> usize {
        self.next.iter().map(|m| m.len()).sum::<usize>() / 2
    }

    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    fn valence(&self, v: u32) -> usize {
        self.next[v as usize].len()
    }

    /// Removes valence-1 vertices other than the base (hair left over
    /// from folding); the result is the based core.
    fn trimmed(mut self) -> StallingsGraph {
        loop {
            let mut removable = None;
            for v in 0..self.next.len() as u32 {
                if v != self.base && self.valence(v) <= 1 {
                    removable = Some(v);
                    break;
                }
            }
            let Some(v) = removable else { break };
            let arcs = core::mem::take(&mut self.next[v as usize]);
            for (l, t) in arcs {
                self.next[t as usize].remove(&l.inverse());
            }
            // Swap-remove v, fixing references to the moved vertex.
            let last = (self.next.len() - 1) as u32;
            self.next.swap(v as usize, last as usize);
            self.next.pop();
            if self.base == last {
                self.base = v;
            }
            for m in &mut self.next {
                for t in m.values_mut() {
                    if *t == last {
                        *t = v;
                    }
                }
            }
        }
        self
    }

    /// Rank of the subgroup: first Betti number of the based core.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Membership test: trace the reduced word from the base vertex.
    pub fn contains(&self, w: &Word) -> bool {
        let mut cur = self.base;
        for &l in w.letters() {
            match self.next[cur as usize].get(&l) {
                Some(&t) => cur = t,
                None => return false,
            }
        }
        cur == self.base
    }

    /// A free basis of the subgroup, read off a spanning tree.
    pub fn generators(&self) -> Vec<Word> {
        let n = self.next.len();
        let mut parent_word: Vec<Option<Word>> = alloc::vec![None; n];
        parent_word[self.base as usize] = Some(Word::identity());
        let mut queue = VecDeque::new();
        queue.push_back(self.base);
        let mut tree_arcs: BTreeSet<(u32, Letter)> = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            let word_v = parent_word[v as usize].clone().unwrap();
            for (&l, &t) in &self.next[v as usize] {
                if parent_word[t as usize].is_none() {
                    parent_word[t as usize] = Some(word_v.mul(&Word::letter(l)));
                    tree_arcs.insert((v, l));
                    tree_arcs.insert((t, l.inverse()));
                    queue.push_back(t);
                }
            }
        }
        let mut gens = Vec::new();
        for v in 0..n as u32 {
            for (&l, &t) in &self.next[v as usize] {
                if tree_arcs.contains(&(v, l)) {
                    continue;
                }
                // Count each unoriented non-tree edge once.
                if !l.is_positive() {
                    continue;
                }
                let wu = parent_word[v as usize].clone().unwrap();
                let wt = parent_word[t as usize].clone().unwrap();
                gens.push(wu.mul(&Word::letter(l)).mul(&wt.inverse()));
            }
        }
        gens
    }

    /// The cyclic core (all valence-1 vertices stripped, base included)
    /// plus the connecting word `c` from the base into the core: the
    /// subgroup equals `c * pi_1(core, entry) * c^-1`.
    pub fn cyclic_core(&self) -> (CoreGraph, Word) {
        let mut alive: Vec<bool> = alloc::vec![true; self.next.len()];
        let mut val: Vec<usize> = (0..self.next.len()).map(|v| self.valence(v as u32)).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..self.next.len() {
                if alive[v] && val[v] <= 1 {
                    alive[v] = false;
                    changed = true;
                    for (_, &t) in &self.next[v] {
                        if alive[t as usize] {
                            val[t as usize] -= 1;
                        }
                    }
                }
            }
        }
        if alive.iter().all(|a| !a) {
            // Trivial or cyclic-free subgroup (rank 0).
            return (
                CoreGraph {
                    basis: self.basis.clone(),
                    next: alloc::vec![],
                },
                Word::identity(),
            );
        }
        // Connector: walk from base until we hit the surviving core.
        let mut conj = Word::identity();
        let mut cur = self.base;
        let mut prev: Option<Letter> = None;
        while !alive[cur as usize] {
            // In the based core, a dead base vertex has exactly one way
            // forward (plus the way back).
            let mut step = None;
            for (&l, &t) in &self.next[cur as usize] {
                if Some(l.inverse()) == prev {
                    continue;
                }
                step = Some((l, t));
                break;
            }
            let (l, t) = step.expect("based core connects base to cyclic core");
            conj = conj.mul(&Word::letter(l));
            prev = Some(l);
            cur = t;
        }
        // Compact the surviving vertices.
        let mut index: BTreeMap<u32, u32> = BTreeMap::new();
        for v in 0..self.next.len() as u32 {
            if alive[v as usize] {
                let id = index.len() as u32;
                index.insert(v, id);
            }
        }
        let mut next: Vec<BTreeMap<Letter, u32>> = alloc::vec![BTreeMap::new(); index.len()];
        for (&old, &new) in &index {
            for (&l, &t) in &self.next[old as usize] {
                if alive[t as usize] {
                    next[new as usize].insert(l, index[&t]);
                }
            }
        }
        (
            CoreGraph {
                basis: self.basis.clone(),
                next,
            },
            conj,
        )
    }

    /// Whether some conjugate of this subgroup is contained in `other`.
    ///
    /// A label-preserving morphism between folded core graphs is an
    /// immersion, and a finite core graph immerses into another exactly
    /// when the corresponding conjugacy containment holds.
    pub fn conjugate_into(&self, other: &StallingsGraph) -> bool {
        if self.is_trivial() {
            return true;
        }
        if other.is_trivial() {
            return false;
        }
        let (core_h, _) = self.cyclic_core();
        let (core_k, _) = other.cyclic_core();
        core_h.immerses_into(&core_k)
    }

    /// Conjugacy of subgroups: mutual conjugate containment of folded
    /// cores of equal size.
    pub fn conjugate_eq(&self, other: &StallingsGraph) -> bool {
        let (ch, _) = self.cyclic_core();
        let (ck, _) = other.cyclic_core();
        ch.edge_count() == ck.edge_count()
            && ch.vertex_count() == ck.vertex_count()
            && self.conjugate_into(other)
            && other.conjugate_into(self)
    }
}

/// A folded core labelled graph without a base point: the conjugacy
/// class carrier of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreGraph {
    basis: Basis,
    next: Vec<BTreeMap<Letter, u32>>,
}

impl CoreGraph {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.next.len()
    }

    pub fn edge_count(&self) -> usize {
        self.next.iter().map(|m| m.len()).sum::<usize>() / 2
    }

    pub fn rank(&self) -> usize {
        if self.next.is_empty() {
            0
        } else {
            self.edge_count() + 1 - self.vertex_count()
        }
    }

    pub fn transitions(&self) -> &[BTreeMap<Letter, u32>] {
        &self.next
    }

    /// The set of oriented letters read into any vertex (`l` labels an
    /// arc arriving somewhere). A letter absent here does not occur in
    /// the subgroup's core at all.
    pub fn occurring_letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        for m in &self.next {
            for (&l, _) in m {
                out.insert(l);
                out.insert(l.inverse());
            }
        }
        out
    }

    /// Label-preserving morphism search (deterministic propagation from
    /// each candidate image of vertex 0).
    pub fn immerses_into(&self, other: &CoreGraph) -> bool {
        if self.next.is_empty() {
            return true;
        }
        if other.next.is_empty() {
            return false;
        }
        'candidates: for start in 0..other.next.len() as u32 {
            let mut image: Vec<Option<u32>> = alloc::vec![None; self.next.len()];
            image[0] = Some(start);
            let mut queue = VecDeque::new();
            queue.push_back(0u32);
            while let Some(v) = queue.pop_front() {
                let iv = image[v as usize].unwrap();
                for (&l, &t) in &self.next[v as usize] {
                    let Some(&it) = other.next[iv as usize].get(&l) else {
                        continue 'candidates;
                    };
                    match image[t as usize] {
                        None => {
                            image[t as usize] = Some(it);
                            queue.push_back(t);
                        }
                        Some(existing) if existing != it => continue 'candidates,
                        _ => {}
                    }
                }
            }
            return true;
        }
        false
    }
}

/// A free factor system: a list of pairwise non-conjugate factors plus
/// the corank of a complementary factorization.
#[derive(Clone, Debug)]
pub struct FreeFactorSystem {
    pub factors: Vec<StallingsGraph>,
    pub corank: usize,
}

impl FreeFactorSystem {
    /// Kurosh rank: one per factor plus the corank.
    pub fn kurosh_rank(&self) -> usize {
        self.factors.len() + self.corank
    }
}

/// Kurosh rank of a single free factor with empty atom system: its
/// ordinary rank.
pub fn kurosh_rank(factor: &StallingsGraph) -> usize {
    factor.rank()
}

/// Validates that generator words live over the expected basis rank.
pub fn check_words(basis: &Basis, words: &[Word]) -> Result<()> {
    for w in words {
        for &l in w.letters() {
            if l.index() as usize >= basis.rank() {
                return Err(validation(
                    format_args!("word uses letter index {} beyond basis rank", l.index()).to_string(),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(basis: &Basis, s: &str) -> Word {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let l = basis.letter_by_name(name).unwrap();
            letters.push(if inv { l.inverse() } else { l });
        }
        Word::from_letters(letters)
    }

    #[test]
    fn single_generator_loop() {
        let b = Basis::standard(2).unwrap();
        let h = StallingsGraph::fold(&b, &[w(&b, "a")]);
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.rank(), 1);
        assert!(h.contains(&w(&b, "a a")));
        assert!(!h.contains(&w(&b, "b")));
    }

    #[test]
    fn index_two_subgroup() {
        let b = Basis::standard(2).unwrap();
        // <a^2, b>: a 2-cycle of a-edges plus a b-loop at the base.
        let h = StallingsGraph::fold(&b, &[w(&b, "a a"), w(&b, "b")]);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 3);
        assert!(h.contains(&w(&b, "a a")));
        assert!(!h.contains(&w(&b, "a")));
        assert!(h.contains(&w(&b, "a a b a a")));
        assert!(!h.contains(&w(&b, "a b a")));
    }

    #[test]
    fn commutator_core_is_four_cycle() {
        let b = Basis::standard(2).unwrap();
        let h = StallingsGraph::fold(&b, &[w(&b, "a b a^-1 b^-1")]);
        assert_eq!(h.rank(), 1);
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
    }

    #[test]
    fn conjugate_containment_by_immersion() {
        let b = Basis::standard(2).unwrap();
        let h = StallingsGraph::fold(&b, &[w(&b, "b a a b^-1")]);
        let k = StallingsGraph::fold(&b, &[w(&b, "a")]);
        assert!(h.conjugate_into(&k));
        assert!(!k.conjugate_into(&h));
        let h2 = StallingsGraph::fold(&b, &[w(&b, "a a")]);
        assert!(h2.conjugate_into(&k));
        assert!(!h2.conjugate_eq(&k));
    }

    #[test]
    fn whole_group_detection() {
        let b = Basis::standard(3).unwrap();
        let mut builder = SubgroupBuilder::new(b.clone());
        builder.add_word(&w(&b, "a"));
        assert!(!builder.is_whole_group());
        builder.add_word(&w(&b, "b"));
        builder.add_word(&w(&b, "c"));
        assert!(builder.is_whole_group());
    }
}
