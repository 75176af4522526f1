//! Graphs as sets of vertices and flags with a boundary map and an involution.
//!
//! Fixed points of the involution are tails, two-element orbits are edges.
//! Vertices and flags are stored densely; the string ids are only carried along
//! for serialization and exact comparison of morphism endpoints.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
}

/// External momentum attached to a tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Momentum {
    Zero,
    Nonzero(String),
}

impl Momentum {
    pub fn is_nonzero(&self) -> bool {
        matches!(self, Momentum::Nonzero(_))
    }

    fn as_text(&self) -> &str {
        match self {
            Momentum::Zero => "0",
            Momentum::Nonzero(t) => t,
        }
    }

    fn from_text(s: &str) -> Momentum {
        if s == "0" {
            Momentum::Zero
        } else {
            Momentum::Nonzero(s.to_string())
        }
    }
}

/// Decoration carried by a single flag.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagDeco {
    pub direction: Option<Direction>,
    pub color: Option<String>,
    pub mass: Option<Coeff>,
    pub momentum: Option<Momentum>,
    pub label: Option<String>,
}

const RESERVED: &[char] = &['{', '}', ';', ',', '=', '[', ']', '(', ')', '|', '@', '"'];

fn check_atom(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
        return Err(Error::InvalidGraph(format!("{kind} {s:?} is empty or uses a reserved character")));
    }
    Ok(())
}

impl FlagDeco {
    pub fn is_plain(&self) -> bool {
        *self == FlagDeco::default()
    }

    /// Compact text form used inside canonical keys. Empty for plain flags.
    pub fn token(&self) -> String {
        if self.is_plain() {
            return String::new();
        }
        let mut parts = Vec::new();
        match self.direction {
            Some(Direction::In) => parts.push("i".to_string()),
            Some(Direction::Out) => parts.push("o".to_string()),
            None => {}
        }
        if let Some(c) = &self.color {
            parts.push(format!("c={c}"));
        }
        if let Some(m) = &self.mass {
            parts.push(format!("m={m}"));
        }
        if let Some(p) = &self.momentum {
            parts.push(format!("p={}", p.as_text()));
        }
        if let Some(l) = &self.label {
            parts.push(format!("l={l}"));
        }
        format!("{{{}}}", parts.join(";"))
    }

    pub fn from_token(tok: &str) -> Result<FlagDeco> {
        let mut d = FlagDeco::default();
        if tok.is_empty() {
            return Ok(d);
        }
        let inner = tok
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("bad decoration token {tok:?}")))?;
        for part in inner.split(';').filter(|p| !p.is_empty()) {
            match part {
                "i" => d.direction = Some(Direction::In),
                "o" => d.direction = Some(Direction::Out),
                _ => {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("bad decoration part {part:?}")))?;
                    match k {
                        "c" => d.color = Some(v.to_string()),
                        "m" => d.mass = Some(v.parse()?),
                        "p" => d.momentum = Some(Momentum::from_text(v)),
                        "l" => d.label = Some(v.to_string()),
                        _ => return Err(Error::Parse(format!("unknown decoration key {k:?}"))),
                    }
                }
            }
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_ids: Vec<String>,
    flag_ids: Vec<String>,
    boundary: Vec<usize>,
    involution: Vec<usize>,
    deco: Vec<FlagDeco>,
    cyclic: Option<Vec<Vec<usize>>>,
    root: Option<usize>,
}

/// Id-free view of a graph, used as a cache key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphShape {
    vertices: usize,
    boundary: Vec<usize>,
    involution: Vec<usize>,
    deco: Vec<FlagDeco>,
    cyclic: Option<Vec<Vec<usize>>>,
    root: Option<usize>,
}

fn fresh_ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Incremental construction of graphs with generated ids.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: usize,
    boundary: Vec<usize>,
    involution: Vec<usize>,
    deco: Vec<FlagDeco>,
    root: Option<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn vertices(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.vertex()).collect()
    }

    pub fn tail(&mut self, v: usize) -> usize {
        let f = self.boundary.len();
        self.boundary.push(v);
        self.involution.push(f);
        self.deco.push(FlagDeco::default());
        f
    }

    pub fn edge(&mut self, u: usize, v: usize) -> (usize, usize) {
        let f = self.tail(u);
        let g = self.tail(v);
        self.involution[f] = g;
        self.involution[g] = f;
        (f, g)
    }

    /// Turns two tails into an edge.
    pub fn join(&mut self, f: usize, g: usize) {
        assert!(f != g && self.involution[f] == f && self.involution[g] == g, "join needs two tails");
        self.involution[f] = g;
        self.involution[g] = f;
    }

    pub fn deco(&mut self, f: usize) -> &mut FlagDeco {
        &mut self.deco[f]
    }

    pub fn edge_mass(&mut self, f: usize, m: Coeff) {
        let g = self.involution[f];
        self.deco[f].mass = Some(m.clone());
        self.deco[g].mass = Some(m);
    }

    pub fn root(&mut self, v: usize) {
        self.root = Some(v);
    }

    pub fn build(self) -> Result<Graph> {
        Graph::from_parts(
            fresh_ids("v", self.vertices),
            fresh_ids("f", self.boundary.len()),
            self.boundary,
            self.involution,
            self.deco,
            None,
            self.root,
        )
    }
}

impl Graph {
    pub fn from_parts(
        vertex_ids: Vec<String>,
        flag_ids: Vec<String>,
        boundary: Vec<usize>,
        involution: Vec<usize>,
        deco: Vec<FlagDeco>,
        cyclic: Option<Vec<Vec<usize>>>,
        root: Option<usize>,
    ) -> Result<Graph> {
        let g = Graph {
            vertex_ids,
            flag_ids,
            boundary,
            involution,
            deco,
            cyclic,
            root,
        };
        g.validate()?;
        Ok(g)
    }

    /// Graph with fresh ids from boundary map and edge list.
    pub fn from_edges(vertices: usize, boundary: Vec<usize>, edges: &[(usize, usize)]) -> Result<Graph> {
        let n = boundary.len();
        let mut involution: Vec<usize> = (0..n).collect();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            if involution[a] != a || involution[b] != b || a == b {
                return Err(Error::InvalidGraph(format!("flag reused in edge ({a},{b})")));
            }
            involution[a] = b;
            involution[b] = a;
        }
        Graph::from_parts(
            fresh_ids("v", vertices),
            fresh_ids("f", n),
            boundary,
            involution,
            vec![FlagDeco::default(); n],
            None,
            None,
        )
    }

    pub fn empty() -> Graph {
        Graph::corollas(&[])
    }

    /// One vertex with `n` tails.
    pub fn corolla(n: usize) -> Graph {
        Graph::corollas(&[n])
    }

    /// Edgeless graph with one vertex per entry, carrying that many tails.
    pub fn corollas(arities: &[usize]) -> Graph {
        let boundary: Vec<usize> = arities
            .iter()
            .enumerate()
            .flat_map(|(v, &k)| std::iter::repeat_n(v, k))
            .collect();
        Graph::from_edges(arities.len(), boundary, &[]).expect("corollas are valid")
    }

    fn validate(&self) -> Result<()> {
        let nv = self.vertex_ids.len();
        let nf = self.flag_ids.len();
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self.boundary.len() != nf || self.involution.len() != nf || self.deco.len() != nf {
            return bad("flag arrays have inconsistent lengths".into());
        }
        let mut seen = HashSet::new();
        for id in &self.vertex_ids {
            if !seen.insert(("v", id.as_str())) {
                return bad(format!("duplicate vertex id {id:?}"));
            }
        }
        for id in &self.flag_ids {
            if !seen.insert(("f", id.as_str())) {
                return bad(format!("duplicate flag id {id:?}"));
            }
        }
        for f in 0..nf {
            if self.boundary[f] >= nv {
                return bad(format!("flag {} has no boundary vertex", self.flag_ids[f]));
            }
            let g = self.involution[f];
            if g >= nf || self.involution[g] != f {
                return bad(format!("involution is not an involution at {}", self.flag_ids[f]));
            }
            let d = &self.deco[f];
            for (kind, s) in [("color", &d.color), ("label", &d.label)] {
                if let Some(s) = s {
                    check_atom(kind, s)?;
                }
            }
            if let Some(Momentum::Nonzero(t)) = &d.momentum {
                check_atom("momentum", t)?;
            }
            if g != f {
                let e = &self.deco[g];
                if d.momentum.is_some() {
                    return bad(format!("momentum on edge flag {}", self.flag_ids[f]));
                }
                if d.label.is_some() {
                    return bad(format!("label on edge flag {}", self.flag_ids[f]));
                }
                if d.mass != e.mass {
                    return bad(format!("edge at {} has unequal masses", self.flag_ids[f]));
                }
                if d.color != e.color {
                    return bad(format!("edge at {} joins different colors", self.flag_ids[f]));
                }
                match (d.direction, e.direction) {
                    (None, None) => {}
                    (Some(a), Some(b)) if a == b.opposite() => {}
                    _ => return bad(format!("edge at {} is not directed in/out", self.flag_ids[f])),
                }
            }
        }
        if let Some(r) = self.root {
            if r >= nv {
                return bad("root vertex out of range".into());
            }
        }
        if let Some(cyc) = &self.cyclic {
            if cyc.len() != nv {
                return bad("cyclic order missing for some vertex".into());
            }
            for (v, order) in cyc.iter().enumerate() {
                let mut expect = self.flags_at(v);
                let mut got = order.clone();
                expect.sort_unstable();
                got.sort_unstable();
                if expect != got {
                    return bad(format!("cyclic order at {} is not a permutation of its flags", self.vertex_ids[v]));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn num_flags(&self) -> usize {
        self.flag_ids.len()
    }

    pub fn boundary(&self, f: usize) -> usize {
        self.boundary[f]
    }

    pub fn involution(&self, f: usize) -> usize {
        self.involution[f]
    }

    pub fn is_tail(&self, f: usize) -> bool {
        self.involution[f] == f
    }

    pub fn flag_deco(&self, f: usize) -> &FlagDeco {
        &self.deco[f]
    }

    pub fn flag_decos(&self) -> &[FlagDeco] {
        &self.deco
    }

    pub fn cyclic(&self) -> Option<&Vec<Vec<usize>>> {
        self.cyclic.as_ref()
    }

    pub fn is_planar(&self) -> bool {
        self.cyclic.is_some()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn flag_id(&self, f: usize) -> &str {
        &self.flag_ids[f]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn flag_ids(&self) -> &[String] {
        &self.flag_ids
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.iter().position(|x| x == id)
    }

    pub fn flag_index(&self, id: &str) -> Option<usize> {
        self.flag_ids.iter().position(|x| x == id)
    }

    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_flags()).filter(|&f| self.boundary[f] == v).collect()
    }

    pub fn tails(&self) -> Vec<usize> {
        (0..self.num_flags()).filter(|&f| self.is_tail(f)).collect()
    }

    pub fn num_tails(&self) -> usize {
        (0..self.num_flags()).filter(|&f| self.is_tail(f)).count()
    }

    /// Edges as flag pairs (f, g) with f < g, ordered by f.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_flags())
            .filter(|&f| self.involution[f] > f)
            .map(|f| (f, self.involution[f]))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        (0..self.num_flags()).filter(|&f| self.involution[f] > f).count()
    }

    pub fn is_aggregate(&self) -> bool {
        self.num_edges() == 0
    }

    pub fn shape(&self) -> GraphShape {
        GraphShape {
            vertices: self.num_vertices(),
            boundary: self.boundary.clone(),
            involution: self.involution.clone(),
            deco: self.deco.clone(),
            cyclic: self.cyclic.clone(),
            root: self.root,
        }
    }

    /// Equality ignoring ids.
    pub fn same_structure(&self, other: &Graph) -> bool {
        self.shape() == other.shape()
    }

    pub fn with_fresh_ids(&self) -> Graph {
        let mut g = self.clone();
        g.vertex_ids = fresh_ids("v", g.num_vertices());
        g.flag_ids = fresh_ids("f", g.num_flags());
        g
    }

    pub fn with_ids(&self, vertex_ids: Vec<String>, flag_ids: Vec<String>) -> Result<Graph> {
        let mut g = self.clone();
        g.vertex_ids = vertex_ids;
        g.flag_ids = flag_ids;
        g.validate()?;
        Ok(g)
    }

    pub fn with_flag_deco(&self, f: usize, d: FlagDeco) -> Result<Graph> {
        let mut g = self.clone();
        g.deco[f] = d;
        g.validate()?;
        Ok(g)
    }

    pub fn with_decos(&self, decos: Vec<FlagDeco>) -> Result<Graph> {
        let mut g = self.clone();
        g.deco = decos;
        g.validate()?;
        Ok(g)
    }

    pub fn with_cyclic(&self, cyclic: Option<Vec<Vec<usize>>>) -> Result<Graph> {
        let mut g = self.clone();
        g.cyclic = cyclic;
        g.validate()?;
        Ok(g)
    }

    pub fn with_root(&self, root: Option<usize>) -> Result<Graph> {
        let mut g = self.clone();
        g.root = root;
        g.validate()?;
        Ok(g)
    }

    /// Vertex component labels, numbered by smallest vertex, and the component count.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        self.component_labels_with(|_| true)
    }

    fn component_labels_with(&self, use_edge: impl Fn(usize) -> bool) -> (Vec<usize>, usize) {
        let n = self.num_vertices();
        let mut uf = UnionFind::new(n);
        for (f, g) in self.edges() {
            if use_edge(f) {
                uf.union(self.boundary[f], self.boundary[g]);
            }
        }
        uf.labels()
    }

    /// Vertex sets of connected components, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let (lab, k) = self.component_labels();
        let mut out = vec![Vec::new(); k];
        for (v, &c) in lab.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn num_components(&self) -> usize {
        self.component_labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// First Betti number |E| - |V| + #components.
    pub fn betti1(&self) -> usize {
        self.num_edges() + self.num_components() - self.num_vertices()
    }

    fn normalize_edge_set(&self, edges: &[usize]) -> Result<Vec<usize>> {
        let mut reps = Vec::with_capacity(edges.len());
        for &f in edges {
            if f >= self.num_flags() {
                return Err(Error::InvalidGraph(format!("flag {f} out of range")));
            }
            let g = self.involution[f];
            if g == f {
                return Err(Error::InvalidGraph(format!(
                    "flag {} is a tail, not an edge",
                    self.flag_ids[f]
                )));
            }
            reps.push(f.min(g));
        }
        reps.sort_unstable();
        reps.dedup();
        Ok(reps)
    }

    /// Keeps every vertex and flag; flags of edges outside `keep` become tails.
    /// `keep` lists edges by either of their flags.
    pub fn spanning_subgraph(&self, keep: &[usize]) -> Result<Graph> {
        let keep = self.normalize_edge_set(keep)?;
        let mut kept = vec![false; self.num_flags()];
        for &f in &keep {
            kept[f] = true;
            kept[self.involution[f]] = true;
        }
        let mut g = self.clone();
        for f in 0..self.num_flags() {
            if !kept[f] {
                g.involution[f] = f;
            }
        }
        Ok(g)
    }

    /// Collapses every component of the subgraph spanned by `edges` to a single vertex.
    pub fn contract(&self, edges: &[usize]) -> Result<Graph> {
        Ok(self.contract_with_maps(edges)?.graph)
    }

    pub fn contract_with_maps(&self, edges: &[usize]) -> Result<Contraction> {
        let reps = self.normalize_edge_set(edges)?;
        let mut gone = vec![false; self.num_flags()];
        for &f in &reps {
            gone[f] = true;
            gone[self.involution[f]] = true;
        }
        let (lab, k) = self.component_labels_with(|f| gone[f]);
        let mut flag_map = vec![None; self.num_flags()];
        let mut kept = Vec::new();
        for f in 0..self.num_flags() {
            if !gone[f] {
                flag_map[f] = Some(kept.len());
                kept.push(f);
            }
        }
        let boundary = kept.iter().map(|&f| lab[self.boundary[f]]).collect();
        let involution = kept
            .iter()
            .map(|&f| flag_map[self.involution[f]].expect("partner of kept flag is kept"))
            .collect();
        let deco = kept.iter().map(|&f| self.deco[f].clone()).collect();
        let cyclic = self.cyclic.as_ref().map(|cyc| {
            let mut uf = UnionFind::new(self.num_vertices());
            let mut order: Vec<Vec<usize>> = cyc.clone();
            for &f in &reps {
                let g = self.involution[f];
                let (ru, rw) = (uf.find(self.boundary[f]), uf.find(self.boundary[g]));
                if ru == rw {
                    order[ru].retain(|&x| x != f && x != g);
                } else {
                    let a = rotate_after(&order[ru], f);
                    let b = rotate_after(&order[rw], g);
                    let r = uf.union(ru, rw);
                    order[ru].clear();
                    order[rw].clear();
                    order[r] = a.into_iter().chain(b).collect();
                }
            }
            let mut out = vec![Vec::new(); k];
            for v in 0..self.num_vertices() {
                if uf.find(v) == v {
                    out[lab[v]] = order[v].iter().map(|&f| flag_map[f].unwrap()).collect();
                }
            }
            out
        });
        let root = self.root.map(|r| lab[r]);
        let graph = Graph::from_parts(
            fresh_ids("v", k),
            kept.iter().map(|&f| self.flag_ids[f].clone()).collect(),
            boundary,
            involution,
            deco,
            cyclic,
            root,
        )?;
        Ok(Contraction {
            graph,
            vertex_map: lab,
            flag_map,
        })
    }

    /// Subgraph on the given vertices with all flags at them. Flags whose partner
    /// lies outside become tails. Returns the graph and, per new flag, the old flag.
    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut vmap = HashMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            vmap.insert(v, i);
        }
        let flags: Vec<usize> = (0..self.num_flags())
            .filter(|&f| vmap.contains_key(&self.boundary[f]))
            .collect();
        let mut fmap = HashMap::new();
        for (i, &f) in flags.iter().enumerate() {
            fmap.insert(f, i);
        }
        let boundary = flags.iter().map(|&f| vmap[&self.boundary[f]]).collect();
        let involution = flags
            .iter()
            .enumerate()
            .map(|(i, &f)| fmap.get(&self.involution[f]).copied().unwrap_or(i))
            .collect();
        let deco = flags.iter().map(|&f| self.deco[f].clone()).collect();
        let cyclic = self.cyclic.as_ref().map(|cyc| {
            vertices
                .iter()
                .map(|&v| cyc[v].iter().map(|f| fmap[f]).collect())
                .collect()
        });
        let root = self.root.and_then(|r| vmap.get(&r).copied());
        let g = Graph {
            vertex_ids: vertices.iter().map(|&v| self.vertex_ids[v].clone()).collect(),
            flag_ids: flags.iter().map(|&f| self.flag_ids[f].clone()).collect(),
            boundary,
            involution,
            deco,
            cyclic,
            root,
        };
        (g, flags)
    }

    /// Connected components as standalone graphs, ordered by smallest vertex.
    pub fn component_graphs(&self) -> Vec<Graph> {
        self.components().iter().map(|c| self.induced(c).0).collect()
    }

    /// Disjoint union with fresh ids; `self` comes first in the dense numbering.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        if self.is_planar() != other.is_planar() {
            return Err(Error::InvalidGraph("union of planar and non-planar graphs".into()));
        }
        if self.root.is_some() && other.root.is_some() {
            return Err(Error::InvalidGraph("union of two rooted graphs".into()));
        }
        let (nv, nf) = (self.num_vertices(), self.num_flags());
        let mut boundary = self.boundary.clone();
        boundary.extend(other.boundary.iter().map(|&v| v + nv));
        let mut involution = self.involution.clone();
        involution.extend(other.involution.iter().map(|&f| f + nf));
        let mut deco = self.deco.clone();
        deco.extend(other.deco.iter().cloned());
        let cyclic = match (&self.cyclic, &other.cyclic) {
            (Some(a), Some(b)) => {
                let mut c = a.clone();
                c.extend(b.iter().map(|o| o.iter().map(|&f| f + nf).collect()));
                Some(c)
            }
            _ => None,
        };
        let root = self.root.or(other.root.map(|r| r + nv));
        Graph::from_parts(
            fresh_ids("v", nv + other.num_vertices()),
            fresh_ids("f", nf + other.num_flags()),
            boundary,
            involution,
            deco,
            cyclic,
            root,
        )
    }

    pub fn disjoint_union_all(graphs: &[Graph]) -> Result<Graph> {
        let mut acc = Graph::empty();
        for g in graphs {
            acc = acc.disjoint_union(g)?;
        }
        if graphs.len() == 1 {
            acc = graphs[0].with_fresh_ids();
        }
        Ok(acc)
    }

    /// Renumbers vertices and flags: old index `i` moves to `vperm[i]` / `fperm[i]`.
    pub fn relabel(&self, vperm: &[usize], fperm: &[usize]) -> Result<Graph> {
        let (nv, nf) = (self.num_vertices(), self.num_flags());
        if !is_permutation(vperm, nv) || !is_permutation(fperm, nf) {
            return Err(Error::InvalidGraph("relabeling is not a bijection".into()));
        }
        let mut vertex_ids = vec![String::new(); nv];
        for v in 0..nv {
            vertex_ids[vperm[v]] = self.vertex_ids[v].clone();
        }
        let mut flag_ids = vec![String::new(); nf];
        let mut boundary = vec![0; nf];
        let mut involution = vec![0; nf];
        let mut deco = vec![FlagDeco::default(); nf];
        for f in 0..nf {
            let nf_ = fperm[f];
            flag_ids[nf_] = self.flag_ids[f].clone();
            boundary[nf_] = vperm[self.boundary[f]];
            involution[nf_] = fperm[self.involution[f]];
            deco[nf_] = self.deco[f].clone();
        }
        let cyclic = self.cyclic.as_ref().map(|cyc| {
            let mut out = vec![Vec::new(); nv];
            for v in 0..nv {
                out[vperm[v]] = cyc[v].iter().map(|&f| fperm[f]).collect();
            }
            out
        });
        Graph::from_parts(
            vertex_ids,
            flag_ids,
            boundary,
            involution,
            deco,
            cyclic,
            self.root.map(|r| vperm[r]),
        )
    }

    /// Replaces vertex `v` by the graph `h`, gluing each flag at `v` to the tail of `h`
    /// it is matched with. `matching` pairs flags at `v` with tails of `h` bijectively.
    pub fn insert_at_vertex(&self, v: usize, h: &Graph, matching: &[(usize, usize)]) -> Result<Graph> {
        if v >= self.num_vertices() {
            return Err(Error::InvalidGraph(format!("no vertex {v}")));
        }
        if self.is_planar() != h.is_planar() {
            return Err(Error::InvalidGraph("insertion mixes planar and non-planar graphs".into()));
        }
        let at_v = self.flags_at(v);
        let tails = h.tails();
        let mut to_tail = HashMap::new();
        let mut used = HashSet::new();
        for &(f, t) in matching {
            if self.boundary.get(f) != Some(&v) {
                return Err(Error::InvalidGraph(format!("flag {f} is not at vertex {v}")));
            }
            if t >= h.num_flags() || !h.is_tail(t) {
                return Err(Error::InvalidGraph(format!("flag {t} is not a tail of the inserted graph")));
            }
            if to_tail.insert(f, t).is_some() || !used.insert(t) {
                return Err(Error::InvalidGraph("matching is not injective".into()));
            }
        }
        if to_tail.len() != at_v.len() || used.len() != tails.len() {
            return Err(Error::InvalidGraph(format!(
                "matching must pair the {} flags at the vertex with the {} tails",
                at_v.len(),
                tails.len()
            )));
        }
        let mut vmap = vec![usize::MAX; self.num_vertices()];
        let mut next = 0;
        for (u, slot) in vmap.iter_mut().enumerate() {
            if u != v {
                *slot = next;
                next += 1;
            }
        }
        let offset = next;
        let nv = offset + h.num_vertices();
        let h_inner: Vec<usize> = (0..h.num_flags()).filter(|&f| !h.is_tail(f)).collect();
        let mut hmap = vec![usize::MAX; h.num_flags()];
        for (i, &f) in h_inner.iter().enumerate() {
            hmap[f] = self.num_flags() + i;
        }
        for (&f, &t) in &to_tail {
            hmap[t] = f;
        }
        let mut boundary = Vec::new();
        let mut involution = Vec::new();
        let mut deco = Vec::new();
        for f in 0..self.num_flags() {
            boundary.push(match to_tail.get(&f) {
                Some(&t) => offset + h.boundary[t],
                None => vmap[self.boundary[f]],
            });
            involution.push(self.involution[f]);
            deco.push(self.deco[f].clone());
        }
        for &f in &h_inner {
            boundary.push(offset + h.boundary[f]);
            involution.push(hmap[h.involution[f]]);
            deco.push(h.deco[f].clone());
        }
        let cyclic = match (&self.cyclic, &h.cyclic) {
            (Some(a), Some(b)) => {
                let mut out = vec![Vec::new(); nv];
                for u in 0..self.num_vertices() {
                    if u != v {
                        out[vmap[u]] = a[u].clone();
                    }
                }
                for (w, order) in b.iter().enumerate() {
                    out[offset + w] = order.iter().map(|&f| hmap[f]).collect();
                }
                Some(out)
            }
            _ => None,
        };
        let root = match self.root {
            Some(r) if r == v => h.root.map(|x| offset + x),
            Some(r) => Some(vmap[r]),
            None => None,
        };
        let nf = boundary.len();
        Graph::from_parts(fresh_ids("v", nv), fresh_ids("f", nf), boundary, involution, deco, cyclic, root)
    }

    /// Removes all tails.
    pub fn trun(&self) -> Graph {
        let kept: Vec<usize> = (0..self.num_flags()).filter(|&f| !self.is_tail(f)).collect();
        let mut fmap = vec![usize::MAX; self.num_flags()];
        for (i, &f) in kept.iter().enumerate() {
            fmap[f] = i;
        }
        Graph {
            vertex_ids: self.vertex_ids.clone(),
            flag_ids: kept.iter().map(|&f| self.flag_ids[f].clone()).collect(),
            boundary: kept.iter().map(|&f| self.boundary[f]).collect(),
            involution: kept.iter().map(|&f| fmap[self.involution[f]]).collect(),
            deco: kept.iter().map(|&f| self.deco[f].clone()).collect(),
            cyclic: self.cyclic.as_ref().map(|cyc| {
                cyc.iter()
                    .map(|o| o.iter().filter(|&&f| fmap[f] != usize::MAX).map(|&f| fmap[f]).collect())
                    .collect()
            }),
            root: self.root,
        }
    }

    /// All ways of attaching the standard tails labeled 1..n to a tail-free graph:
    /// one graph per map {1..n} -> V, in lexicographic order of that map.
    pub fn foliage(&self, n: usize) -> Result<Vec<Graph>> {
        if self.num_tails() > 0 {
            return Err(Error::InvalidGraph("foliage needs a graph without tails".into()));
        }
        if self.is_planar() {
            return Err(Error::Unsupported("foliage of planar graphs".into()));
        }
        let nv = self.num_vertices();
        if nv == 0 {
            return Ok(if n == 0 { vec![self.clone()] } else { Vec::new() });
        }
        let mut out = Vec::new();
        let mut assign = vec![0usize; n];
        loop {
            let mut g = self.clone();
            for (i, &v) in assign.iter().enumerate() {
                let f = g.num_flags();
                g.flag_ids.push(format!("t{}", i + 1));
                g.boundary.push(v);
                g.involution.push(f);
                g.deco.push(FlagDeco {
                    label: Some((i + 1).to_string()),
                    ..FlagDeco::default()
                });
            }
            if g.validate().is_err() {
                g = g.with_fresh_ids();
            }
            out.push(g);
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                assign[i] += 1;
                if assign[i] < nv {
                    break;
                }
                assign[i] = 0;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphDoc::from_graph(self)).expect("graph serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GraphDoc::from_graph(self)).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(s).map_err(|e| Error::Parse(format!("graph json: {e}")))?;
        doc.into_graph()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Graph> {
        let doc: GraphDoc =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("graph json: {e}")))?;
        doc.into_graph()
    }
}

fn rotate_after(order: &[usize], f: usize) -> Vec<usize> {
    let i = order.iter().position(|&x| x == f).expect("flag in cyclic order");
    order[i + 1..].iter().chain(order[..i].iter()).copied().collect()
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Result of a contraction with the maps from old to new vertices and flags.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: Graph,
    pub vertex_map: Vec<usize>,
    pub flag_map: Vec<Option<usize>>,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges two classes; the smaller root survives.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        lo
    }

    pub(crate) fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut lab = vec![usize::MAX; n];
        let mut root_lab = vec![usize::MAX; n];
        let mut k = 0;
        for v in 0..n {
            let r = self.find(v);
            if root_lab[r] == usize::MAX {
                root_lab[r] = k;
                k += 1;
            }
            lab[v] = root_lab[r];
        }
        (lab, k)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<String>,
    flags: Vec<String>,
    involution: Vec<[String; 2]>,
    boundary: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "DecoDoc::is_empty")]
    decorations: DecoDoc,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecoDoc {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    direction: BTreeMap<String, Direction>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    color: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    mass: BTreeMap<String, Coeff>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    momentum: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    label: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cyclic: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
}

impl DecoDoc {
    fn is_empty(&self) -> bool {
        self.direction.is_empty()
            && self.color.is_empty()
            && self.mass.is_empty()
            && self.momentum.is_empty()
            && self.label.is_empty()
            && self.cyclic.is_none()
            && self.root.is_none()
    }
}

impl GraphDoc {
    fn from_graph(g: &Graph) -> GraphDoc {
        let fid = |f: usize| g.flag_ids[f].clone();
        let mut deco = DecoDoc::default();
        for f in 0..g.num_flags() {
            let d = &g.deco[f];
            if let Some(x) = d.direction {
                deco.direction.insert(fid(f), x);
            }
            if let Some(x) = &d.color {
                deco.color.insert(fid(f), x.clone());
            }
            if let Some(x) = &d.mass {
                deco.mass.insert(fid(f), x.clone());
            }
            if let Some(x) = &d.momentum {
                deco.momentum.insert(fid(f), x.as_text().to_string());
            }
            if let Some(x) = &d.label {
                deco.label.insert(fid(f), x.clone());
            }
        }
        deco.cyclic = g.cyclic.as_ref().map(|cyc| {
            cyc.iter()
                .enumerate()
                .map(|(v, o)| (g.vertex_ids[v].clone(), o.iter().map(|&f| fid(f)).collect()))
                .collect()
        });
        deco.root = g.root.map(|r| g.vertex_ids[r].clone());
        GraphDoc {
            vertices: g.vertex_ids.clone(),
            flags: g.flag_ids.clone(),
            involution: g.edges().into_iter().map(|(a, b)| [fid(a), fid(b)]).collect(),
            boundary: (0..g.num_flags())
                .map(|f| (fid(f), g.vertex_ids[g.boundary[f]].clone()))
                .collect(),
            decorations: deco,
        }
    }

    fn into_graph(self) -> Result<Graph> {
        let vidx: HashMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let fidx: HashMap<&str, usize> = self.flags.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let flag = |s: &str| {
            fidx.get(s)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("unknown flag {s:?}")))
        };
        let vertex = |s: &str| {
            vidx.get(s)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {s:?}")))
        };
        let nf = self.flags.len();
        let mut boundary = vec![usize::MAX; nf];
        for (f, v) in &self.boundary {
            boundary[flag(f)?] = vertex(v)?;
        }
        if let Some(f) = boundary.iter().position(|&v| v == usize::MAX) {
            return Err(Error::InvalidGraph(format!("flag {:?} has no boundary", self.flags[f])));
        }
        let mut involution: Vec<usize> = (0..nf).collect();
        for [a, b] in &self.involution {
            let (a, b) = (flag(a)?, flag(b)?);
            if a == b || involution[a] != a || involution[b] != b {
                return Err(Error::InvalidGraph("involution pairs overlap".into()));
            }
            involution[a] = b;
            involution[b] = a;
        }
        let mut deco = vec![FlagDeco::default(); nf];
        let d = self.decorations;
        for (f, x) in d.direction {
            deco[flag(&f)?].direction = Some(x);
        }
        for (f, x) in d.color {
            deco[flag(&f)?].color = Some(x);
        }
        for (f, x) in d.mass {
            deco[flag(&f)?].mass = Some(x);
        }
        for (f, x) in d.momentum {
            deco[flag(&f)?].momentum = Some(Momentum::from_text(&x));
        }
        for (f, x) in d.label {
            deco[flag(&f)?].label = Some(x);
        }
        let cyclic = match d.cyclic {
            None => None,
            Some(map) => {
                let mut out = vec![None; self.vertices.len()];
                for (v, order) in map {
                    let fs = order.iter().map(|f| flag(f)).collect::<Result<Vec<_>>>()?;
                    out[vertex(&v)?] = Some(fs);
                }
                Some(
                    out.into_iter()
                        .map(|o| o.ok_or_else(|| Error::InvalidGraph("cyclic order missing for a vertex".into())))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        let root = d.root.map(|r| vertex(&r)).transpose()?;
        Graph::from_parts(self.vertices, self.flags, boundary, involution, deco, cyclic, root)
    }
}
