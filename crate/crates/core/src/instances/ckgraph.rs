//! Connected graphs under subgraph contraction.
//!
//! A generator is the class of a connected ghost graph. Its channels are indexed
//! by edge subsets: the left factor is the quotient, the right factor the word of
//! components of the spanning subgraph (isolated vertices give identity corollas).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;

use super::{not_generator, raw_key_atom, unknown_atom, usize_arg};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::canon::{canonical_key, decode_key};
use crate::error::{Error, Result};
use crate::graph::{FlagDeco, Graph, Momentum};
use crate::hopf::{Channel, Instance, OrbitChannel};
use crate::morphism::aggregate_automorphisms;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFilter {
    Core,
    OnePi,
    Motic,
}

impl GraphFilter {
    pub fn accepts(self, g: &Graph) -> bool {
        match self {
            GraphFilter::Core => true,
            GraphFilter::OnePi => one_pi_predicate(g),
            GraphFilter::Motic => motic_predicate(g),
        }
    }
}

/// Every component stays connected after severing any single edge.
pub fn one_pi_predicate(g: &Graph) -> bool {
    let edges = g.edges();
    let base = g.num_components();
    (0..edges.len()).all(|skip| {
        let keep: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, e)| e.0)
            .collect();
        g.spanning_subgraph(&keep).expect("edge flags").num_components() == base
    })
}

/// Every proper subgraph of a component has smaller first Betti number.
pub fn one_pi_by_betti(g: &Graph) -> bool {
    g.component_graphs().iter().all(|c| {
        let edges = c.edges();
        let full = c.betti1();
        (0..(1u64 << edges.len()) - 1).all(|mask| subgraph_betti(c, &edges, mask) < full)
    })
}

fn subset(edges: &[(usize, usize)], mask: u64) -> Vec<usize> {
    edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e.0)
        .collect()
}

fn subgraph_betti(g: &Graph, edges: &[(usize, usize)], mask: u64) -> usize {
    g.spanning_subgraph(&subset(edges, mask)).expect("edge flags").betti1()
}

fn has_mass(d: &FlagDeco) -> bool {
    d.mass.as_ref().is_some_and(|m| !m.is_zero())
}

fn has_momentum(d: &FlagDeco) -> bool {
    d.momentum.as_ref().is_some_and(Momentum::is_nonzero)
}

/// Mass-and-momentum spanning: contains every massive edge and joins all
/// tails with nonzero momentum in one component.
pub fn mass_momentum_spanning(g: &Graph, edges: &[(usize, usize)], mask: u64) -> bool {
    for (i, &(a, _)) in edges.iter().enumerate() {
        if mask >> i & 1 == 0 && has_mass(g.flag_deco(a)) {
            return false;
        }
    }
    let sub = g.spanning_subgraph(&subset(edges, mask)).expect("edge flags");
    let (lab, _) = sub.component_labels();
    let comps: BTreeSet<usize> = g
        .tails()
        .into_iter()
        .filter(|&t| has_momentum(g.flag_deco(t)))
        .map(|t| lab[g.boundary(t)])
        .collect();
    comps.len() <= 1
}

/// Each component: every proper mass-and-momentum spanning subgraph has smaller first Betti number.
pub fn motic_predicate(g: &Graph) -> bool {
    g.component_graphs().iter().all(|c| {
        let edges = c.edges();
        let full = c.betti1();
        (0..(1u64 << edges.len()) - 1)
            .all(|mask| !mass_momentum_spanning(c, &edges, mask) || subgraph_betti(c, &edges, mask) < full)
    })
}

fn word_of_components(g: &Graph) -> Word {
    let keys = g
        .component_graphs()
        .iter()
        .map(|c| ClassKey::new(canonical_key(c)))
        .collect();
    Word::new(keys, Symmetry::Symmetric)
}

/// One channel per edge subset whose components pass the filter: (quotient, components).
pub fn graph_channels(g: &Graph, filter: GraphFilter) -> Result<Vec<(Vec<usize>, Channel)>> {
    let edges = g.edges();
    if edges.len() > 24 {
        return Err(Error::Unsupported("too many edges for subset enumeration".into()));
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << edges.len() {
        let keep = subset(&edges, mask);
        let sub = g.spanning_subgraph(&keep)?;
        if filter != GraphFilter::Core && !sub.component_graphs().iter().all(|c| filter.accepts(c)) {
            continue;
        }
        let quotient = g.contract(&keep)?;
        out.push((
            keep,
            Channel {
                left: word_of_components(&quotient),
                right: word_of_components(&sub),
                mult: 1,
            },
        ));
    }
    Ok(out)
}

pub struct GraphInstance {
    filter: GraphFilter,
    decoded: DashMap<ClassKey, Arc<Graph>>,
}

impl GraphInstance {
    pub fn new(filter: GraphFilter) -> GraphInstance {
        GraphInstance {
            filter,
            decoded: DashMap::new(),
        }
    }

    pub fn filter(&self) -> GraphFilter {
        self.filter
    }

    pub fn graph(&self, key: &ClassKey) -> Result<Arc<Graph>> {
        if let Some(g) = self.decoded.get(key) {
            return Ok(g.clone());
        }
        let g = Arc::new(decode_key(key.as_str())?);
        self.decoded.insert(key.clone(), g.clone());
        Ok(g)
    }

    pub fn key(&self, g: &Graph) -> ClassKey {
        ClassKey::new(canonical_key(g))
    }

    /// Word of the components of a graph, each checked as a generator.
    pub fn word(&self, g: &Graph) -> Result<Word> {
        let w = word_of_components(g);
        for k in w.keys() {
            self.check_generator(k)?;
        }
        Ok(w)
    }

    fn motic_variants(&self, g: &Graph) -> Vec<Graph> {
        let mut out = vec![g.clone()];
        let tails = g.tails();
        if !tails.is_empty() {
            let mut decos = g.flag_decos().to_vec();
            for &t in &tails {
                decos[t].momentum = Some(Momentum::Nonzero("p".into()));
            }
            out.push(g.with_decos(decos).expect("momentum on tails"));
        }
        let base = out.clone();
        for h in base {
            for (a, b) in h.edges() {
                let mut decos = h.flag_decos().to_vec();
                decos[a].mass = Some(crate::algebra::Coeff::one());
                decos[b].mass = Some(crate::algebra::Coeff::one());
                out.push(h.with_decos(decos).expect("mass on edge"));
            }
        }
        out
    }
}

/// Connected plain graphs with exactly `e` edges, up to isomorphism, without tails.
fn connected_skeletons(max_edges: usize) -> Vec<Vec<Graph>> {
    let mut levels: Vec<Vec<(usize, Vec<(usize, usize)>)>> = vec![vec![(1, Vec::new())]];
    for _ in 0..max_edges {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for (nv, pairs) in levels.last().unwrap() {
            let mut cands = Vec::new();
            for i in 0..*nv {
                for j in i..*nv {
                    cands.push((*nv, (i, j)));
                }
                cands.push((nv + 1, (i, *nv)));
            }
            for (n2, p) in cands {
                let mut ps = pairs.clone();
                ps.push(p);
                let g = build_plain(n2, &ps, &vec![0; n2]);
                if seen.insert(canonical_key(&g)) {
                    next.push((n2, ps));
                }
            }
        }
        levels.push(next);
    }
    levels
        .into_iter()
        .map(|l| l.into_iter().map(|(n, ps)| build_plain(n, &ps, &vec![0; n])).collect())
        .collect()
}

fn build_plain(nv: usize, pairs: &[(usize, usize)], tails: &[usize]) -> Graph {
    let mut boundary = Vec::new();
    let mut edges = Vec::new();
    for &(a, b) in pairs {
        edges.push((boundary.len(), boundary.len() + 1));
        boundary.push(a);
        boundary.push(b);
    }
    for (v, &t) in tails.iter().enumerate() {
        boundary.extend(std::iter::repeat_n(v, t));
    }
    Graph::from_edges(nv, boundary, &edges).expect("plain graph")
}

fn with_tails(g: &Graph, extra: &[usize]) -> Graph {
    let nv = g.num_vertices();
    let edges = g.edges();
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (g.boundary(a), g.boundary(b))).collect();
    let mut tails = vec![0; nv];
    for &v in extra {
        tails[v] += 1;
    }
    build_plain(nv, &pairs, &tails)
}

/// Maximum number of tails on enumerated generators.
pub const MAX_GENERATOR_TAILS: usize = 2;

impl Instance for GraphInstance {
    fn name(&self) -> String {
        match self.filter {
            GraphFilter::Core => "ck-graph-core",
            GraphFilter::OnePi => "ck-graph-1pi",
            GraphFilter::Motic => "ck-graph-motic",
        }
        .into()
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::Symmetric
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        let g = self.graph(key).map_err(|e| not_generator(self, key, e.to_string()))?;
        if g.num_vertices() == 0 || !g.is_connected() {
            return Err(not_generator(self, key, "ghost graph must be connected and nonempty"));
        }
        if g.is_planar() || g.root().is_some() {
            return Err(not_generator(self, key, "graph instances use plain graphs"));
        }
        if canonical_key(&g) != key.as_str() {
            return Err(not_generator(self, key, "key is not canonical"));
        }
        if !self.filter.accepts(&g) {
            return Err(not_generator(self, key, format!("graph fails the {} filter", self.name())));
        }
        Ok(())
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        self.graph(key).is_ok_and(|g| g.num_vertices() == 1 && g.num_edges() == 0)
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.graph(key).map_or(0, |g| g.num_edges())
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        let mut graphs = Vec::with_capacity(keys.len());
        for k in keys {
            self.check_generator(k)?;
            graphs.push((*self.graph(k)?).clone());
        }
        let g = Graph::disjoint_union_all(&graphs)?;
        Ok(graph_channels(&g, self.filter)?.into_iter().map(|(_, c)| c).collect())
    }

    /// The middle-automorphism action is free, so each edge subset is one orbit
    /// whose size is the automorphism count of the middle aggregate.
    fn orbit_channels(&self, key: &ClassKey) -> Result<Vec<OrbitChannel>> {
        self.check_generator(key)?;
        let g = self.graph(key)?;
        let mut out = Vec::new();
        for (keep, c) in graph_channels(&g, self.filter)? {
            let middle = g.contract(&keep)?.spanning_subgraph(&[])?;
            let aut = aggregate_automorphisms(&middle)?;
            out.push(OrbitChannel {
                left: c.left,
                right: c.right,
                orbit: aut.clone(),
                aut_middle: aut,
            });
        }
        Ok(out)
    }

    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for level in connected_skeletons(max_degree) {
            for sk in level {
                let nv = sk.num_vertices();
                let mut tail_sets: Vec<Vec<usize>> = vec![Vec::new()];
                for t in 1..=MAX_GENERATOR_TAILS {
                    let mut sets = Vec::new();
                    multisets(nv, t, 0, &mut Vec::new(), &mut sets);
                    tail_sets.extend(sets);
                }
                for ts in tail_sets {
                    let g = with_tails(&sk, &ts);
                    let variants = match self.filter {
                        GraphFilter::Motic => self.motic_variants(&g),
                        _ => vec![g],
                    };
                    for v in variants {
                        if self.filter.accepts(&v) {
                            let k = self.key(&v);
                            if seen.insert(k.clone()) {
                                out.push(k);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn identity_objects(&self, max_size: usize) -> Vec<ClassKey> {
        (0..=max_size).map(|n| self.key(&Graph::corolla(n))).collect()
    }

    fn aut_order(&self, identity: &ClassKey) -> BigUint {
        self.graph(identity)
            .and_then(|g| aggregate_automorphisms(&g))
            .unwrap_or_else(|_| BigUint::from(1u32))
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        let g = match name {
            "graph" => Graph::from_json(&args.join(","))?,
            "corolla" => Graph::corolla(usize_arg(name, args)?),
            "key" => return raw_key_atom(self, args),
            _ => return Err(unknown_atom(self, name)),
        };
        Ok(Elem::basis(self.word(&g)?))
    }
}

fn multisets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        multisets(n, k, v, cur, out);
        cur.pop();
    }
}

/// Counts of channels per (left, right) pair, for inspection and tests.
pub fn channel_multiplicities(chans: &[Channel]) -> BTreeMap<(Word, Word), u64> {
    let mut m = BTreeMap::new();
    for c in chans {
        *m.entry((c.left.clone(), c.right.clone())).or_default() += c.mult;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn banana() -> Graph {
        build_plain(2, &[(0, 1), (0, 1)], &[1, 1])
    }

    fn dumbbell() -> Graph {
        build_plain(2, &[(0, 0), (0, 1), (1, 1)], &[0, 0])
    }

    #[test]
    fn banana_has_interior_coefficient_two() {
        let inst = GraphInstance::new(GraphFilter::Core);
        let k = inst.key(&banana());
        let m = channel_multiplicities(&inst.channels(&k).unwrap());
        assert_eq!(m.len(), 3);
        assert!(m.values().any(|&c| c == 2));
    }

    #[test]
    fn predicates_on_small_graphs() {
        let single_loop = build_plain(1, &[(0, 0)], &[0]);
        let edge = build_plain(2, &[(0, 1)], &[0, 0]);
        assert!(one_pi_predicate(&single_loop));
        assert!(!one_pi_predicate(&edge));
        assert!(one_pi_predicate(&banana()));
        assert!(!one_pi_predicate(&dumbbell()));
        for g in [single_loop, edge, banana(), dumbbell()] {
            assert_eq!(one_pi_predicate(&g), one_pi_by_betti(&g));
            assert_eq!(one_pi_predicate(&g), motic_predicate(&g));
        }
    }

    #[test]
    fn one_pi_filter_drops_the_bridge() {
        let chans = graph_channels(&dumbbell(), GraphFilter::OnePi).unwrap();
        assert_eq!(chans.len(), 4);
        assert!(chans.iter().all(|(keep, _)| !keep.contains(&2)));
    }

    #[test]
    fn residue_channel_is_present() {
        let inst = GraphInstance::new(GraphFilter::Core);
        let k = inst.key(&banana());
        let res = inst.key(&Graph::corolla(2));
        assert!(inst
            .channels(&k)
            .unwrap()
            .iter()
            .any(|c| c.left == Word::single(res.clone()) && c.right == Word::single(k.clone())));
    }

    #[test]
    fn massive_edge_must_be_in_spanning_subgraphs() {
        let g = build_plain(2, &[(0, 1), (0, 1)], &[0, 0]);
        let mut d = g.flag_decos().to_vec();
        d[0].mass = Some(crate::algebra::Coeff::one());
        d[1].mass = Some(crate::algebra::Coeff::one());
        let g = g.with_decos(d).unwrap();
        let edges = g.edges();
        assert!(!mass_momentum_spanning(&g, &edges, 0b10));
        assert!(mass_momentum_spanning(&g, &edges, 0b01));
    }

    #[test]
    fn generator_enumeration_is_canonical() {
        let inst = GraphInstance::new(GraphFilter::Core);
        let gens = inst.generators(2);
        for k in &gens {
            inst.check_generator(k).unwrap();
        }
        let one_pi = GraphInstance::new(GraphFilter::OnePi).generators(2);
        assert!(one_pi.len() < gens.len());
    }
}
