//! Morphisms between aggregates (edgeless graphs).
//!
//! A morphism X -> Y consists of an injection of flags F(Y) -> F(X), a
//! surjection of vertices V(X) -> V(Y) and a fixed-point-free involution on the
//! flags of X outside the image. The pairs of that involution are the ghost
//! edges; X together with them is the ghost graph of the morphism.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::factorial;
use crate::canon::canonical_key;
use crate::error::{Error, Result};
use crate::graph::{FlagDeco, Graph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    source: Graph,
    target: Graph,
    flag_map: Vec<usize>,
    vertex_map: Vec<usize>,
    ghost: Vec<usize>,
}

impl GraphMorphism {
    /// `flag_map[f]` is the source flag hit by target flag `f`, `vertex_map[v]` the
    /// image of source vertex `v`, and `ghost_edges` pairs up the remaining source flags.
    pub fn new(
        source: Graph,
        target: Graph,
        flag_map: Vec<usize>,
        vertex_map: Vec<usize>,
        ghost_edges: &[(usize, usize)],
    ) -> Result<GraphMorphism> {
        let n = source.num_flags();
        let mut ghost: Vec<usize> = (0..n).collect();
        for &(a, b) in ghost_edges {
            if a >= n || b >= n || a == b || ghost[a] != a || ghost[b] != b {
                return Err(Error::InvalidMorphism(format!("ghost edge ({a},{b}) is not valid")));
            }
            ghost[a] = b;
            ghost[b] = a;
        }
        let m = GraphMorphism {
            source,
            target,
            flag_map,
            vertex_map,
            ghost,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMorphism(m));
        if !self.source.is_aggregate() || !self.target.is_aggregate() {
            return bad("source and target must be aggregates".into());
        }
        let (s, t) = (&self.source, &self.target);
        if self.flag_map.len() != t.num_flags() || self.vertex_map.len() != s.num_vertices() {
            return bad("map lengths do not match source and target".into());
        }
        let mut hit = vec![false; s.num_flags()];
        for &f in &self.flag_map {
            if f >= s.num_flags() || hit[f] {
                return bad("flag map is not injective".into());
            }
            hit[f] = true;
        }
        let mut covered = vec![false; t.num_vertices()];
        for &v in &self.vertex_map {
            if v >= t.num_vertices() {
                return bad("vertex map out of range".into());
            }
            covered[v] = true;
        }
        if covered.iter().any(|c| !c) {
            return bad("vertex map is not surjective".into());
        }
        for f in 0..s.num_flags() {
            let g = self.ghost[f];
            if hit[f] != (g == f) {
                return bad("ghost involution must pair exactly the flags outside the image".into());
            }
            if g != f && self.vertex_map[s.boundary(f)] != self.vertex_map[s.boundary(g)] {
                return bad("ghost edge joins vertices with different images".into());
            }
        }
        for (tf, &sf) in self.flag_map.iter().enumerate() {
            if self.vertex_map[s.boundary(sf)] != t.boundary(tf) {
                return bad(format!("flag {} is not over its vertex", t.flag_id(tf)));
            }
            if s.flag_deco(sf) != t.flag_deco(tf) {
                return bad(format!("flag {} changes decoration", t.flag_id(tf)));
            }
        }
        if s.is_planar() != t.is_planar() {
            return bad("planarity of source and target differ".into());
        }
        self.ghost_graph_unchecked().map(|_| ())
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn flag_map(&self) -> &[usize] {
        &self.flag_map
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn ghost_edges(&self) -> Vec<(usize, usize)> {
        (0..self.ghost.len())
            .filter(|&f| self.ghost[f] > f)
            .map(|f| (f, self.ghost[f]))
            .collect()
    }

    /// True when the target has exactly one vertex.
    pub fn is_basic(&self) -> bool {
        self.target.num_vertices() == 1
    }

    pub fn identity(x: &Graph) -> Result<GraphMorphism> {
        GraphMorphism::new(
            x.clone(),
            x.clone(),
            (0..x.num_flags()).collect(),
            (0..x.num_vertices()).collect(),
            &[],
        )
    }

    /// The isomorphism `from -> to` sending vertex `v` to `vperm[v]` and flag `f` to `fperm[f]`.
    pub fn isomorphism(from: &Graph, to: &Graph, vperm: &[usize], fperm: &[usize]) -> Result<GraphMorphism> {
        if fperm.len() != from.num_flags() || from.num_flags() != to.num_flags() {
            return Err(Error::InvalidMorphism("isomorphism needs equal flag counts".into()));
        }
        let mut inv = vec![usize::MAX; to.num_flags()];
        for (f, &g) in fperm.iter().enumerate() {
            if g >= inv.len() || inv[g] != usize::MAX {
                return Err(Error::InvalidMorphism("flag relabeling is not a bijection".into()));
            }
            inv[g] = f;
        }
        if vperm.len() != to.num_vertices() {
            return Err(Error::InvalidMorphism("isomorphism needs equal vertex counts".into()));
        }
        GraphMorphism::new(from.clone(), to.clone(), inv, vperm.to_vec(), &[])
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &GraphMorphism) -> Result<GraphMorphism> {
        if inner.target != self.source {
            return Err(Error::NotComposable(
                "target of the first morphism differs from the source of the second".into(),
            ));
        }
        let flag_map = self.flag_map.iter().map(|&f| inner.flag_map[f]).collect();
        let vertex_map = inner.vertex_map.iter().map(|&v| self.vertex_map[v]).collect();
        let mut edges = inner.ghost_edges();
        edges.extend(
            self.ghost_edges()
                .into_iter()
                .map(|(a, b)| (inner.flag_map[a], inner.flag_map[b])),
        );
        GraphMorphism::new(inner.source.clone(), self.target.clone(), flag_map, vertex_map, &edges)
    }

    /// Monoidal product; the first factor comes first in the dense numbering.
    pub fn tensor(&self, other: &GraphMorphism) -> Result<GraphMorphism> {
        let source = self.source.disjoint_union(&other.source)?;
        let target = self.target.disjoint_union(&other.target)?;
        let (sf, tv) = (self.source.num_flags(), self.target.num_vertices());
        let mut flag_map = self.flag_map.clone();
        flag_map.extend(other.flag_map.iter().map(|&f| f + sf));
        let mut vertex_map = self.vertex_map.clone();
        vertex_map.extend(other.vertex_map.iter().map(|&v| v + tv));
        let mut edges = self.ghost_edges();
        edges.extend(other.ghost_edges().into_iter().map(|(a, b)| (a + sf, b + sf)));
        GraphMorphism::new(source, target, flag_map, vertex_map, &edges)
    }

    pub fn tensor_all(parts: &[GraphMorphism]) -> Result<GraphMorphism> {
        let mut acc = GraphMorphism::identity(&Graph::empty())?;
        for p in parts {
            acc = acc.tensor(p)?;
        }
        Ok(acc)
    }

    fn ghost_graph_unchecked(&self) -> Result<Graph> {
        let s = &self.source;
        Graph::from_parts(
            s.vertex_ids().to_vec(),
            s.flag_ids().to_vec(),
            (0..s.num_flags()).map(|f| s.boundary(f)).collect(),
            self.ghost.clone(),
            s.flag_decos().to_vec(),
            s.cyclic().cloned(),
            s.root(),
        )
        .map_err(|e| Error::InvalidMorphism(format!("ghost graph: {e}")))
    }

    /// Source vertices and flags with the ghost edges; its tails are the image flags.
    pub fn ghost_graph(&self) -> Graph {
        self.ghost_graph_unchecked().expect("validated morphism has a valid ghost graph")
    }

    pub fn ghost_key(&self) -> String {
        canonical_key(&self.ghost_graph())
    }

    /// Splits into one basic morphism per target vertex, together with the
    /// relabelings that identify their tensor product with `self`.
    pub fn one_comma_decompose(&self) -> Result<OneCommaDecomposition> {
        let (s, t) = (&self.source, &self.target);
        let mut parts = Vec::new();
        let mut src_vorder = Vec::new();
        let mut src_forder = Vec::new();
        let mut tgt_forder = Vec::new();
        for v in 0..t.num_vertices() {
            let pre: Vec<usize> = (0..s.num_vertices()).filter(|&w| self.vertex_map[w] == v).collect();
            let (xv, xflags) = s.induced(&pre);
            let (yv, yflags) = t.induced(&[v]);
            let pos: HashMap<usize, usize> = xflags.iter().enumerate().map(|(i, &f)| (f, i)).collect();
            let flag_map = yflags.iter().map(|&f| pos[&self.flag_map[f]]).collect();
            let ghost: Vec<(usize, usize)> = xflags
                .iter()
                .enumerate()
                .filter(|&(_, &f)| self.ghost[f] > f)
                .map(|(i, &f)| (i, pos[&self.ghost[f]]))
                .collect();
            parts.push(GraphMorphism::new(xv, yv, flag_map, vec![0; pre.len()], &ghost)?);
            src_vorder.extend(pre);
            src_forder.extend(xflags);
            tgt_forder.extend(yflags);
        }
        let product = GraphMorphism::tensor_all(&parts)?;
        let mut vperm = vec![0; s.num_vertices()];
        for (i, &v) in src_vorder.iter().enumerate() {
            vperm[v] = i;
        }
        let mut fperm = vec![0; s.num_flags()];
        for (i, &f) in src_forder.iter().enumerate() {
            fperm[f] = i;
        }
        let source_iso = GraphMorphism::isomorphism(s, product.source(), &vperm, &fperm)?;
        let mut tf = vec![0; t.num_flags()];
        for (i, &f) in tgt_forder.iter().enumerate() {
            tf[i] = f;
        }
        let target_iso =
            GraphMorphism::isomorphism(product.target(), t, &(0..t.num_vertices()).collect::<Vec<_>>(), &tf)?;
        Ok(OneCommaDecomposition {
            parts,
            product,
            source_iso,
            target_iso,
        })
    }

    /// Factors through the aggregate obtained by contracting the given ghost edges:
    /// returns `(outer, inner)` with `outer ∘ inner == self`.
    pub fn factor_through(&self, edges: &[usize]) -> Result<(GraphMorphism, GraphMorphism)> {
        let s = &self.source;
        let mut keep = vec![false; s.num_flags()];
        for &f in edges {
            if f >= s.num_flags() || self.ghost[f] == f {
                return Err(Error::InvalidMorphism(format!("flag {f} is not on a ghost edge")));
            }
            keep[f] = true;
            keep[self.ghost[f]] = true;
        }
        let inner_edges: Vec<(usize, usize)> =
            self.ghost_edges().into_iter().filter(|&(a, _)| keep[a]).collect();
        let outer_edges: Vec<(usize, usize)> =
            self.ghost_edges().into_iter().filter(|&(a, _)| !keep[a]).collect();
        let sub = Graph::from_edges(
            s.num_vertices(),
            (0..s.num_flags()).map(|f| s.boundary(f)).collect(),
            &inner_edges,
        )?;
        let (lab, k) = sub.component_labels();
        let kept: Vec<usize> = (0..s.num_flags()).filter(|&f| !keep[f]).collect();
        let mut zpos = vec![usize::MAX; s.num_flags()];
        for (i, &f) in kept.iter().enumerate() {
            zpos[f] = i;
        }
        let z = Graph::from_parts(
            (0..k).map(|i| format!("z{i}")).collect(),
            kept.iter().map(|&f| s.flag_id(f).to_string()).collect(),
            kept.iter().map(|&f| lab[s.boundary(f)]).collect(),
            (0..kept.len()).collect(),
            kept.iter().map(|&f| s.flag_deco(f).clone()).collect(),
            None,
            None,
        )?;
        let inner = GraphMorphism::new(s.clone(), z.clone(), kept.clone(), lab.clone(), &inner_edges)?;
        let mut zv = vec![0; k];
        for v in 0..s.num_vertices() {
            zv[lab[v]] = self.vertex_map[v];
        }
        let outer = GraphMorphism::new(
            z,
            self.target.clone(),
            self.flag_map.iter().map(|&f| zpos[f]).collect(),
            zv,
            &outer_edges.iter().map(|&(a, b)| (zpos[a], zpos[b])).collect::<Vec<_>>(),
        )?;
        Ok((outer, inner))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.doc()).expect("morphism serializes")
    }

    fn doc(&self) -> MorphismDoc {
        let (s, t) = (&self.source, &self.target);
        MorphismDoc {
            source: s.to_json_value(),
            target: t.to_json_value(),
            flag_map: self
                .flag_map
                .iter()
                .enumerate()
                .map(|(tf, &sf)| (t.flag_id(tf).to_string(), s.flag_id(sf).to_string()))
                .collect(),
            vertex_map: self
                .vertex_map
                .iter()
                .enumerate()
                .map(|(sv, &tv)| (s.vertex_id(sv).to_string(), t.vertex_id(tv).to_string()))
                .collect(),
            ghost: self
                .ghost_edges()
                .into_iter()
                .map(|(a, b)| [s.flag_id(a).to_string(), s.flag_id(b).to_string()])
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<GraphMorphism> {
        let doc: MorphismDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("morphism json: {e}")))?;
        let source = Graph::from_json_value(&doc.source)?;
        let target = Graph::from_json_value(&doc.target)?;
        let sf = |id: &str| {
            source
                .flag_index(id)
                .ok_or_else(|| Error::InvalidMorphism(format!("unknown source flag {id:?}")))
        };
        let mut flag_map = vec![usize::MAX; target.num_flags()];
        for (tf, s) in &doc.flag_map {
            let i = target
                .flag_index(tf)
                .ok_or_else(|| Error::InvalidMorphism(format!("unknown target flag {tf:?}")))?;
            flag_map[i] = sf(s)?;
        }
        let mut vertex_map = vec![usize::MAX; source.num_vertices()];
        for (sv, tv) in &doc.vertex_map {
            let i = source
                .vertex_index(sv)
                .ok_or_else(|| Error::InvalidMorphism(format!("unknown source vertex {sv:?}")))?;
            vertex_map[i] = target
                .vertex_index(tv)
                .ok_or_else(|| Error::InvalidMorphism(format!("unknown target vertex {tv:?}")))?;
        }
        if flag_map.contains(&usize::MAX) || vertex_map.contains(&usize::MAX) {
            return Err(Error::InvalidMorphism("maps are not total".into()));
        }
        let ghost = doc
            .ghost
            .iter()
            .map(|[a, b]| Ok((sf(a)?, sf(b)?)))
            .collect::<Result<Vec<_>>>()?;
        GraphMorphism::new(source, target, flag_map, vertex_map, &ghost)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismDoc {
    source: serde_json::Value,
    target: serde_json::Value,
    flag_map: BTreeMap<String, String>,
    vertex_map: BTreeMap<String, String>,
    ghost: Vec<[String; 2]>,
}

/// Basic parts of a morphism and the relabelings identifying their product with it.
#[derive(Clone, Debug)]
pub struct OneCommaDecomposition {
    pub parts: Vec<GraphMorphism>,
    pub product: GraphMorphism,
    pub source_iso: GraphMorphism,
    pub target_iso: GraphMorphism,
}

impl OneCommaDecomposition {
    /// `target_iso ∘ product ∘ source_iso`, which equals the decomposed morphism.
    pub fn reassemble(&self) -> Result<GraphMorphism> {
        self.target_iso.compose(&self.product.compose(&self.source_iso)?)
    }
}

/// Number of automorphisms of an aggregate: flag permutations at each corolla
/// preserving decorations (rotations for cyclic orders), times permutations of
/// isomorphic corollas.
pub fn aggregate_automorphisms(x: &Graph) -> Result<BigUint> {
    if !x.is_aggregate() {
        return Err(Error::InvalidGraph("automorphism count needs an aggregate".into()));
    }
    let mut total = BigUint::one();
    let mut types: BTreeMap<String, usize> = BTreeMap::new();
    for v in 0..x.num_vertices() {
        let (c, _) = x.induced(&[v]);
        *types.entry(canonical_key(&c)).or_default() += 1;
        total *= corolla_automorphisms(x, v);
    }
    for &m in types.values() {
        total *= factorial(m);
    }
    Ok(total)
}

fn corolla_automorphisms(x: &Graph, v: usize) -> BigUint {
    match x.cyclic() {
        Some(cyc) => {
            let toks: Vec<&FlagDeco> = cyc[v].iter().map(|&f| x.flag_deco(f)).collect();
            let n = toks.len();
            if n == 0 {
                return BigUint::one();
            }
            let rotations = (0..n).filter(|&r| (0..n).all(|i| toks[i] == toks[(i + r) % n])).count();
            BigUint::from(rotations)
        }
        None => {
            let mut counts: BTreeMap<&FlagDeco, usize> = BTreeMap::new();
            for f in x.flags_at(v) {
                *counts.entry(x.flag_deco(f)).or_default() += 1;
            }
            counts.values().fold(BigUint::one(), |acc, &m| acc * factorial(m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertex_edge() -> GraphMorphism {
        let x = Graph::corollas(&[2, 2]);
        let y = Graph::corolla(2);
        GraphMorphism::new(x, y, vec![0, 3], vec![0, 0], &[(1, 2)]).unwrap()
    }

    #[test]
    fn validation_catches_bad_maps() {
        let x = Graph::corollas(&[2, 2]);
        let y = Graph::corolla(2);
        assert!(GraphMorphism::new(x.clone(), y.clone(), vec![0, 0], vec![0, 0], &[(1, 2)]).is_err());
        assert!(GraphMorphism::new(x.clone(), y.clone(), vec![0, 3], vec![0, 0], &[]).is_err());
        let two = Graph::corollas(&[1, 1]);
        assert!(GraphMorphism::new(x, two, vec![0, 3], vec![0, 0], &[(1, 2)]).is_err());
    }

    #[test]
    fn ghost_graph_of_edge_contraction() {
        let m = two_vertex_edge();
        let g = m.ghost_graph();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.num_tails(), 2);
        assert!(m.is_basic());
    }

    #[test]
    fn identity_laws() {
        let m = two_vertex_edge();
        let l = GraphMorphism::identity(m.target()).unwrap();
        let r = GraphMorphism::identity(m.source()).unwrap();
        assert_eq!(l.compose(&m).unwrap(), m);
        assert_eq!(m.compose(&r).unwrap(), m);
        assert!(GraphMorphism::identity(&m.ghost_graph()).is_err());
    }

    #[test]
    fn composition_requires_matching_ids() {
        let m = two_vertex_edge();
        let other = GraphMorphism::identity(&Graph::corolla(2).with_ids(vec!["a".into()], vec!["p".into(), "q".into()]).unwrap()).unwrap();
        assert!(matches!(other.compose(&m), Err(Error::NotComposable(_))));
    }

    #[test]
    fn factoring_through_a_ghost_edge_recomposes() {
        let x = Graph::corollas(&[2, 3, 1]);
        let y = Graph::corolla(2);
        let m = GraphMorphism::new(x, y, vec![0, 3], vec![0, 0, 0], &[(1, 2), (4, 5)]).unwrap();
        for edges in [vec![], vec![1], vec![4], vec![1, 4]] {
            let (outer, inner) = m.factor_through(&edges).unwrap();
            assert_eq!(outer.compose(&inner).unwrap(), m);
        }
    }

    #[test]
    fn one_comma_reassembles() {
        let a = two_vertex_edge();
        let b = GraphMorphism::identity(&Graph::corolla(3)).unwrap();
        let m = a.tensor(&b).unwrap();
        let d = m.one_comma_decompose().unwrap();
        assert_eq!(d.parts.len(), 2);
        assert_eq!(d.reassemble().unwrap(), m);
    }

    #[test]
    fn json_round_trip() {
        let m = two_vertex_edge();
        let s = m.to_json();
        let back = GraphMorphism::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn automorphisms_of_aggregates() {
        assert_eq!(aggregate_automorphisms(&Graph::corolla(3)).unwrap(), BigUint::from(6u32));
        assert_eq!(aggregate_automorphisms(&Graph::corollas(&[2, 2])).unwrap(), BigUint::from(8u32));
        assert_eq!(aggregate_automorphisms(&Graph::corollas(&[0, 0, 1])).unwrap(), BigUint::from(2u32));
    }
}
