//! Stallings subgroup graphs.
//!
//! A finitely generated subgroup of a free group is represented by a folded,
//! labelled, basepointed graph whose closed paths at the base spell exactly
//! the subgroup's elements. Folding identifies equally labelled edges leaving
//! (or entering) a common vertex until the graph is an immersion.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::hom::Homomorphism;
use crate::word::{check_alphabet, Alphabet, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is not folded")]
    NotFolded,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Directed edge `from --gen--> to`; traversed backwards it reads `gen^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub gen: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    alphabet: Arc<Alphabet>,
    vertex_count: usize,
    base: usize,
    edges: Vec<Edge>,
    /// `transitions[v][slot(letter)]`, only populated when folded.
    transitions: Option<Vec<Vec<Option<usize>>>>,
}

fn slot(l: Letter) -> usize {
    2 * l.gen() + usize::from(!l.is_positive())
}

impl SubgroupGraph {
    /// Wedge of one loop per nonempty generator at the base, unfolded.
    pub fn wedge(generators: &[Word], alphabet: &Arc<Alphabet>) -> Result<Self, GraphError> {
        let mut vertex_count = 1;
        let mut edges = Vec::new();
        for w in generators {
            check_alphabet(w.alphabet(), alphabet)?;
            let n = w.len();
            let mut prev = 0;
            for (i, &l) in w.letters().iter().enumerate() {
                let next = if i + 1 == n {
                    0
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                edges.push(if l.is_positive() {
                    Edge { from: prev, gen: l.gen(), to: next }
                } else {
                    Edge { from: next, gen: l.gen(), to: prev }
                });
                prev = next;
            }
        }
        Ok(SubgroupGraph {
            alphabet: alphabet.clone(),
            vertex_count,
            base: 0,
            edges,
            transitions: None,
        })
    }

    /// Folded graph of the subgroup generated by `generators`.
    pub fn build(generators: &[Word], alphabet: &Arc<Alphabet>) -> Result<Self, GraphError> {
        Ok(Self::wedge(generators, alphabet)?.fold())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn is_folded(&self) -> bool {
        self.transitions.is_some()
    }

    pub fn fold(&self) -> SubgroupGraph {
        if self.is_folded() {
            return self.clone();
        }
        let order: Vec<usize> = (0..self.vertex_count).collect();
        self.fold_in_order(order)
    }

    /// Folds with the worklist visited in a seeded random order. The result
    /// is the same graph as [`SubgroupGraph::fold`].
    pub fn fold_shuffled(&self, seed: u64) -> SubgroupGraph {
        let mut order: Vec<usize> = (0..self.vertex_count).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let mut g = self.clone();
        g.edges.shuffle(&mut rng);
        g.fold_in_order(order)
    }

    fn fold_in_order(&self, order: Vec<usize>) -> SubgroupGraph {
        let mut folder = Folder::new(self.vertex_count, &self.edges);
        folder.run(order);
        folder.finish(self.alphabet.clone(), self.base)
    }

    /// `E - V + 1` of the core: non-base vertices of degree one are trimmed
    /// repeatedly first.
    pub fn rank(&self) -> Result<usize, GraphError> {
        if !self.is_folded() {
            return Err(GraphError::NotFolded);
        }
        let mut degree = vec![0usize; self.vertex_count];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            degree[e.from] += 1;
            degree[e.to] += 1;
            incident[e.from].push(i);
            incident[e.to].push(i);
        }
        let mut alive_edge = vec![true; self.edges.len()];
        let mut alive_vertex = vec![true; self.vertex_count];
        let mut stack: Vec<usize> =
            (0..self.vertex_count).filter(|&v| v != self.base && degree[v] == 1).collect();
        while let Some(v) = stack.pop() {
            if !alive_vertex[v] || degree[v] != 1 {
                continue;
            }
            alive_vertex[v] = false;
            degree[v] = 0;
            let e = *incident[v].iter().find(|&&e| alive_edge[e]).expect("degree-1 edge");
            alive_edge[e] = false;
            let other = if self.edges[e].from == v { self.edges[e].to } else { self.edges[e].from };
            degree[other] -= 1;
            if other != self.base && degree[other] == 1 {
                stack.push(other);
            }
        }
        let e = alive_edge.iter().filter(|&&a| a).count();
        let v = alive_vertex.iter().filter(|&&a| a).count();
        Ok(e + 1 - v)
    }

    /// Whether `w` reads a closed path at the base.
    pub fn contains(&self, w: &Word) -> Result<bool, GraphError> {
        check_alphabet(w.alphabet(), &self.alphabet)?;
        let trans = self.transitions.as_ref().ok_or(GraphError::NotFolded)?;
        let mut v = self.base;
        for &l in w.letters() {
            match trans[v][slot(l)] {
                Some(next) => v = next,
                None => return Ok(false),
            }
        }
        Ok(v == self.base)
    }

    /// Text dump: the base vertex on the first line, then one
    /// `<from> <label> <to>` line per edge.
    pub fn dump(&self) -> String {
        let mut out = format!("{}\n", self.base);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.from, self.alphabet.name(e.gen), e.to);
        }
        out
    }
}

struct Folder {
    parent: Vec<usize>,
    adj: Vec<Vec<(Letter, usize)>>,
    worklist: VecDeque<usize>,
}

impl Folder {
    fn new(vertex_count: usize, edges: &[Edge]) -> Self {
        let mut adj = vec![Vec::new(); vertex_count];
        for e in edges {
            adj[e.from].push((Letter::pos(e.gen), e.to));
            adj[e.to].push((Letter::neg(e.gen), e.from));
        }
        Folder { parent: (0..vertex_count).collect(), adj, worklist: VecDeque::new() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, drop) = if self.adj[a].len() >= self.adj[b].len() { (a, b) } else { (b, a) };
        self.parent[drop] = keep;
        let moved = std::mem::take(&mut self.adj[drop]);
        self.adj[keep].extend(moved);
        self.worklist.push_back(keep);
    }

    /// Renames targets to representatives, sorts and drops duplicate edges.
    fn normalize(&mut self, v: usize) {
        let mut list = std::mem::take(&mut self.adj[v]);
        for entry in list.iter_mut() {
            entry.1 = self.find(entry.1);
        }
        list.sort_unstable();
        list.dedup();
        self.adj[v] = list;
    }

    fn run(&mut self, order: Vec<usize>) {
        self.worklist.extend(order);
        while let Some(v) = self.worklist.pop_front() {
            let v = self.find(v);
            self.normalize(v);
            let collision = self.adj[v]
                .windows(2)
                .find(|p| p[0].0 == p[1].0)
                .map(|p| (p[0].1, p[1].1));
            if let Some((a, b)) = collision {
                self.union(a, b);
                // v may have been absorbed; its representative is now queued
                let rv = self.find(v);
                self.worklist.push_back(rv);
            }
        }
    }

    fn finish(mut self, alphabet: Arc<Alphabet>, base: usize) -> SubgroupGraph {
        let n = self.parent.len();
        for v in 0..n {
            if self.find(v) == v {
                self.normalize(v);
            }
        }
        // canonical numbering: breadth-first from the base, letters in order
        let root = self.find(base);
        let mut index = vec![usize::MAX; n];
        index[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut reps = vec![root];
        while let Some(v) = queue.pop_front() {
            for &(_, t) in &self.adj[v] {
                if index[t] == usize::MAX {
                    index[t] = reps.len();
                    reps.push(t);
                    queue.push_back(t);
                }
            }
        }
        let slots = 2 * alphabet.rank();
        let mut transitions = vec![vec![None; slots]; reps.len()];
        let mut edges = Vec::new();
        for (i, &v) in reps.iter().enumerate() {
            for &(l, t) in &self.adj[v] {
                let j = index[t];
                debug_assert!(transitions[i][slot(l)].is_none());
                transitions[i][slot(l)] = Some(j);
                if l.is_positive() {
                    edges.push(Edge { from: i, gen: l.gen(), to: j });
                }
            }
        }
        edges.sort_unstable();
        SubgroupGraph {
            alphabet,
            vertex_count: reps.len(),
            base: 0,
            edges,
            transitions: Some(transitions),
        }
    }
}

/// Image rank versus domain rank; equal ranks certify injectivity because
/// a surjection between free groups of the same finite rank is an
/// isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InjectivityCertificate {
    pub image_rank: usize,
    pub domain_rank: usize,
}

pub fn is_injective(h: &Homomorphism) -> (bool, InjectivityCertificate) {
    let graph = SubgroupGraph::build(h.images(), h.codomain())
        .expect("images share the codomain alphabet");
    let image_rank = graph.rank().expect("built graphs are folded");
    let cert = InjectivityCertificate { image_rank, domain_rank: h.domain().rank() };
    (image_rank == cert.domain_rank, cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn words(list: &[&str], alpha: &Arc<Alphabet>) -> Vec<Word> {
        list.iter().map(|s| Word::parse(s, alpha).unwrap()).collect()
    }

    #[test]
    fn single_loop() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a"], &ab), &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        assert_eq!(g.rank().unwrap(), 1);
    }

    #[test]
    fn a_squared_and_b() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a^2", "b"], &ab), &ab).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.rank().unwrap(), 2);
        assert!(g.contains(&Word::parse("a^2 b a^-2", &ab).unwrap()).unwrap());
        assert!(!g.contains(&Word::parse("a", &ab).unwrap()).unwrap());
    }

    #[test]
    fn a_and_ab_give_everything() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a", "a b"], &ab), &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 2));
        assert_eq!(g.rank().unwrap(), 2);
        assert!(g.contains(&Word::parse("b", &ab).unwrap()).unwrap());
    }

    #[test]
    fn empty_generators() {
        let ab = ab();
        let g = SubgroupGraph::build(&[], &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert_eq!(g.rank().unwrap(), 0);
        assert!(g.contains(&Word::identity(&ab)).unwrap());
        let g = SubgroupGraph::build(&[Word::identity(&ab)], &ab).unwrap();
        assert_eq!(g.rank().unwrap(), 0);
    }

    #[test]
    fn fold_examples() {
        let abc = Alphabet::new(["a", "b", "c"]).unwrap();
        let wedge = SubgroupGraph::wedge(&words(&["a b", "a c"], &abc), &abc).unwrap();
        assert!(!wedge.is_folded());
        assert_eq!(wedge.rank(), Err(GraphError::NotFolded));
        let g = wedge.fold();
        // both loops close at the base, so after the a-edges merge only the
        // middle vertex remains besides the base
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        let again = g.fold();
        assert_eq!(again.dump(), g.dump());

        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a", "a"], &ab), &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
    }

    #[test]
    fn squares_and_square_of_product() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a^2", "b^2", "a b a b"], &ab), &ab).unwrap();
        assert_eq!(g.rank().unwrap(), 3);
        // not a cover: infinite index, the core is not 4-regular
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 6));
    }

    #[test]
    fn finite_index_subgroups_follow_nielsen_schreier() {
        let ab = ab();
        // even-length words, index 2
        let g = SubgroupGraph::build(&words(&["a^2", "a b", "a b^-1"], &ab), &ab).unwrap();
        let schreier = |index: usize, rank: usize| index * (rank - 1) + 1;
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 4));
        assert_eq!(g.rank().unwrap(), schreier(2, 2));
        // kernel of a -> 1, b -> 0 mod 3, index 3
        let g = SubgroupGraph::build(&words(&["a^3", "b", "a b a^-1", "a^2 b a^-2"], &ab), &ab)
            .unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 6));
        assert_eq!(g.rank().unwrap(), schreier(3, 2));
        let abc = Alphabet::new(["a", "b", "c"]).unwrap();
        let g = SubgroupGraph::build(&words(&["a^2", "b", "c", "a b a^-1", "a c a^-1"], &abc), &abc)
            .unwrap();
        assert_eq!(g.rank().unwrap(), schreier(2, 3));
    }

    #[test]
    fn rank_trims_hanging_trees() {
        // a b a^-1: folds to a stem of length 1 with a b-loop at its end
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a b a^-1"], &ab), &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        assert_eq!(g.rank().unwrap(), 1);
    }

    #[test]
    fn contains_edge_cases() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a^2"], &ab), &ab).unwrap();
        assert!(g.contains(&Word::identity(&ab)).unwrap());
        assert!(!g.contains(&Word::parse("a", &ab).unwrap()).unwrap());
        let other = Alphabet::new(["c"]).unwrap();
        assert!(g.contains(&Word::identity(&other)).is_err());
        let unfolded = SubgroupGraph::wedge(&words(&["a^2"], &ab), &ab).unwrap();
        assert_eq!(unfolded.contains(&Word::identity(&ab)), Err(GraphError::NotFolded));
    }

    #[test]
    fn injectivity_examples() {
        let x = Alphabet::new(["x"]).unwrap();
        let a = Alphabet::new(["a"]).unwrap();
        let h = Homomorphism::new(x, a.clone(), words(&["a^2"], &a)).unwrap();
        assert_eq!(
            is_injective(&h),
            (true, InjectivityCertificate { image_rank: 1, domain_rank: 1 })
        );
        let xy = Alphabet::new(["x", "y"]).unwrap();
        let h = Homomorphism::new(xy, a.clone(), words(&["a", "a"], &a)).unwrap();
        assert_eq!(
            is_injective(&h),
            (false, InjectivityCertificate { image_rank: 1, domain_rank: 2 })
        );
    }

    #[test]
    fn dump_format() {
        let ab = ab();
        let g = SubgroupGraph::build(&words(&["a^2", "b"], &ab), &ab).unwrap();
        assert_eq!(g.dump(), "0\n0 a 1\n0 b 0\n1 a 0\n");
    }
}
