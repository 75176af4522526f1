//! Canonical forms of decorated graphs.
//!
//! Ordinary graphs are canonicalized per connected component by colour
//! refinement on vertices followed by individualization, keeping the smallest
//! key over all leaves of the search tree. Graphs with cyclic orders at their
//! vertices use the smallest breadth-first traversal code over all start flags.
//! Keys are decodable: [`decode_key`] rebuilds the canonical representative.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::graph::{FlagDeco, Graph, GraphShape};

/// Canonical key together with the relabeling that realizes it:
/// original vertex `v` becomes `vertex_map[v]`, flag `f` becomes `flag_map[f]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalKey {
    pub key: String,
    pub vertex_map: Vec<usize>,
    pub flag_map: Vec<usize>,
}

const CACHE_LIMIT: usize = 400_000;

fn cache() -> &'static DashMap<GraphShape, Arc<CanonicalKey>> {
    static CACHE: OnceLock<DashMap<GraphShape, Arc<CanonicalKey>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

pub fn canonicalize(g: &Graph) -> Arc<CanonicalKey> {
    let shape = g.shape();
    if let Some(hit) = cache().get(&shape) {
        return hit.clone();
    }
    let ck = Arc::new(if g.is_planar() {
        planar_canonical(g)
    } else {
        plain_canonical(g)
    });
    if cache().len() > CACHE_LIMIT {
        cache().clear();
    }
    cache().insert(shape, ck.clone());
    ck
}

pub fn canonical_key(g: &Graph) -> String {
    canonicalize(g).key.clone()
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.num_vertices() == b.num_vertices()
        && a.num_flags() == b.num_flags()
        && canonical_key(a) == canonical_key(b)
}

/// The canonical representative, with generated ids.
pub fn canonical_graph(g: &Graph) -> Graph {
    let ck = canonicalize(g);
    g.relabel(&ck.vertex_map, &ck.flag_map)
        .expect("canonical relabeling is a bijection")
        .with_fresh_ids()
}

struct Prepared<'a> {
    g: &'a Graph,
    tokens: Vec<String>,
    self_sig: Vec<String>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl<'a> Prepared<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.num_vertices();
        let tokens: Vec<String> = g.flag_decos().iter().map(FlagDeco::token).collect();
        let mut tails: Vec<Vec<&str>> = vec![Vec::new(); n];
        let mut loops: Vec<Vec<(&str, &str)>> = vec![Vec::new(); n];
        let mut pairs: BTreeMap<(usize, usize), Vec<(&str, &str)>> = BTreeMap::new();
        for f in 0..g.num_flags() {
            let v = g.boundary(f);
            let h = g.involution(f);
            if h == f {
                tails[v].push(&tokens[f]);
            } else {
                let w = g.boundary(h);
                if v == w {
                    if f < h {
                        let (a, b) = (tokens[f].as_str(), tokens[h].as_str());
                        loops[v].push(if a <= b { (a, b) } else { (b, a) });
                    }
                } else {
                    pairs.entry((v, w)).or_default().push((&tokens[f], &tokens[h]));
                }
            }
        }
        let self_sig = (0..n)
            .map(|v| {
                tails[v].sort_unstable();
                loops[v].sort_unstable();
                let root = if g.root() == Some(v) { "r" } else { "" };
                format!("{root}|{}|{:?}", tails[v].join(","), loops[v])
            })
            .collect();
        let mut label_of: BTreeMap<Vec<(&str, &str)>, usize> = BTreeMap::new();
        for labels in pairs.values_mut() {
            labels.sort_unstable();
            label_of.insert(labels.clone(), 0);
        }
        for (i, v) in label_of.values_mut().enumerate() {
            *v = i;
        }
        let mut adj = vec![Vec::new(); n];
        for ((v, w), labels) in &pairs {
            adj[*v].push((*w, label_of[labels]));
        }
        Prepared {
            g,
            tokens,
            self_sig,
            adj,
        }
    }

    fn refine(&self, mut cells: Vec<Vec<usize>>, color: &mut [usize]) -> Vec<Vec<usize>> {
        loop {
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    color[v] = i;
                }
            }
            let mut changed = false;
            let mut next = Vec::with_capacity(cells.len());
            for cell in cells {
                if cell.len() == 1 {
                    next.push(cell);
                    continue;
                }
                let mut keyed: Vec<(Vec<(usize, usize)>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<(usize, usize)> =
                            self.adj[v].iter().map(|&(w, l)| (color[w], l)).collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                let mut groups = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|x| x.1).collect());
                        start = i;
                        groups += 1;
                    }
                }
                changed |= groups > 1;
            }
            cells = next;
            if !changed {
                return cells;
            }
        }
    }

    fn search(
        &self,
        cells: Vec<Vec<usize>>,
        color: &mut [usize],
        best: &mut Option<(String, Vec<usize>)>,
    ) {
        let cells = self.refine(cells, color);
        match cells.iter().position(|c| c.len() > 1) {
            None => {
                let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
                let key = self.key_for(&order).0;
                if best.as_ref().is_none_or(|(b, _)| key < *b) {
                    *best = Some((key, order));
                }
            }
            Some(i) => {
                for &v in &cells[i] {
                    let mut next = Vec::with_capacity(cells.len() + 1);
                    next.extend_from_slice(&cells[..i]);
                    next.push(vec![v]);
                    next.push(cells[i].iter().copied().filter(|&w| w != v).collect());
                    next.extend_from_slice(&cells[i + 1..]);
                    self.search(next, color, best);
                }
            }
        }
    }

    /// Canonical key for the vertices listed in `order`, and the flags in canonical order.
    fn key_for(&self, order: &[usize]) -> (String, Vec<usize>) {
        let g = self.g;
        let mut pos = HashMap::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            pos.insert(v, i);
        }
        let mut tails = Vec::new();
        let mut edges = Vec::new();
        for &v in order {
            for f in g.flags_at(v) {
                let h = g.involution(f);
                if h == f {
                    tails.push((pos[&v], self.tokens[f].as_str(), f));
                } else if f < h {
                    let (a, b) = (pos[&v], pos[&g.boundary(h)]);
                    let (ta, tb) = (self.tokens[f].as_str(), self.tokens[h].as_str());
                    if (a, ta) <= (b, tb) {
                        edges.push((a, b, ta, tb, f, h));
                    } else {
                        edges.push((b, a, tb, ta, h, f));
                    }
                }
            }
        }
        tails.sort_unstable();
        edges.sort_unstable();
        let root = g.root().and_then(|r| pos.get(&r).copied());
        let key = render_plain(
            order.len(),
            tails.iter().map(|t| (t.0, t.1)),
            edges.iter().map(|e| (e.0, e.1, e.2, e.3)),
            root,
        );
        let mut flags: Vec<usize> = tails.iter().map(|t| t.2).collect();
        for e in &edges {
            flags.push(e.4);
            flags.push(e.5);
        }
        (key, flags)
    }
}

fn render_plain<'a>(
    n: usize,
    tails: impl Iterator<Item = (usize, &'a str)>,
    edges: impl Iterator<Item = (usize, usize, &'a str, &'a str)>,
    root: Option<usize>,
) -> String {
    let mut s = format!("v{n}");
    let tails: Vec<String> = tails.map(|(v, t)| format!("{v}{t}")).collect();
    if !tails.is_empty() {
        s.push_str(";t");
        s.push_str(&tails.join(","));
    }
    let edges: Vec<String> = edges
        .map(|(a, b, ta, tb)| {
            if ta.is_empty() && tb.is_empty() {
                format!("{a}-{b}")
            } else {
                let ta = if ta.is_empty() { "{}" } else { ta };
                let tb = if tb.is_empty() { "{}" } else { tb };
                format!("{a}-{b}{ta}{tb}")
            }
        })
        .collect();
    if !edges.is_empty() {
        s.push_str(";e");
        s.push_str(&edges.join(","));
    }
    if let Some(r) = root {
        s.push_str(&format!(";r{r}"));
    }
    s
}

fn plain_canonical(g: &Graph) -> CanonicalKey {
    let prep = Prepared::new(g);
    let mut color = vec![0; g.num_vertices()];
    let mut parts: Vec<(String, Vec<usize>)> = Vec::new();
    for comp in g.components() {
        let mut by_sig: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for &v in &comp {
            by_sig.entry(prep.self_sig[v].as_str()).or_default().push(v);
        }
        let cells: Vec<Vec<usize>> = by_sig.into_values().collect();
        let mut best = None;
        prep.search(cells, &mut color, &mut best);
        parts.push(best.expect("search visits at least one leaf"));
    }
    parts.sort();
    let order: Vec<usize> = parts.into_iter().flat_map(|p| p.1).collect();
    let (key, flags) = prep.key_for(&order);
    let mut vertex_map = vec![0; g.num_vertices()];
    for (i, &v) in order.iter().enumerate() {
        vertex_map[v] = i;
    }
    let mut flag_map = vec![0; g.num_flags()];
    for (i, &f) in flags.iter().enumerate() {
        flag_map[f] = i;
    }
    CanonicalKey {
        key,
        vertex_map,
        flag_map,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum FlagCode {
    Tail(String),
    Edge(usize, usize, String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct VertexCode {
    flags: Vec<FlagCode>,
    root: bool,
}

fn render_planar(codes: &[VertexCode], offset: usize, out: &mut String) {
    for vc in codes {
        out.push('(');
        for (i, fc) in vc.flags.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match fc {
                FlagCode::Tail(t) => {
                    out.push('t');
                    out.push_str(t);
                }
                FlagCode::Edge(w, p, t) => {
                    out.push_str(&format!("e{}.{}", w + offset, p));
                    out.push_str(t);
                }
            }
        }
        out.push(')');
        if vc.root {
            out.push('r');
        }
    }
}

fn planar_traverse(g: &Graph, tokens: &[String], start: usize) -> (Vec<VertexCode>, Vec<usize>, Vec<usize>) {
    let cyc = g.cyclic().expect("planar graph");
    let mut idx: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![g.boundary(start)];
    let mut entry = vec![start];
    idx.insert(g.boundary(start), 0);
    let position = |v: usize, entry_flag: usize, f: usize| {
        let o = &cyc[v];
        let a = o.iter().position(|&x| x == entry_flag).unwrap();
        let b = o.iter().position(|&x| x == f).unwrap();
        (b + o.len() - a) % o.len()
    };
    let mut codes = Vec::new();
    let mut flags = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        let o = &cyc[v];
        let a = o.iter().position(|&x| x == entry[i]).unwrap();
        let mut fc = Vec::with_capacity(o.len());
        for k in 0..o.len() {
            let f = o[(a + k) % o.len()];
            flags.push(f);
            let h = g.involution(f);
            if h == f {
                fc.push(FlagCode::Tail(tokens[f].clone()));
            } else {
                let w = g.boundary(h);
                let wi = *idx.entry(w).or_insert_with(|| {
                    order.push(w);
                    entry.push(h);
                    order.len() - 1
                });
                fc.push(FlagCode::Edge(wi, position(w, entry[wi], h), tokens[f].clone()));
            }
        }
        codes.push(VertexCode {
            flags: fc,
            root: g.root() == Some(v),
        });
        i += 1;
    }
    (codes, order, flags)
}

fn planar_canonical(g: &Graph) -> CanonicalKey {
    let tokens: Vec<String> = g.flag_decos().iter().map(FlagDeco::token).collect();
    let mut parts: Vec<(String, Vec<VertexCode>, Vec<usize>, Vec<usize>)> = Vec::new();
    for comp in g.components() {
        let flags: Vec<usize> = comp.iter().flat_map(|&v| g.flags_at(v)).collect();
        if flags.is_empty() {
            let vc = vec![VertexCode {
                flags: Vec::new(),
                root: g.root() == Some(comp[0]),
            }];
            let mut s = String::new();
            render_planar(&vc, 0, &mut s);
            parts.push((s, vc, comp.clone(), Vec::new()));
            continue;
        }
        let mut best: Option<(String, Vec<VertexCode>, Vec<usize>, Vec<usize>)> = None;
        for &f in &flags {
            let (codes, order, fl) = planar_traverse(g, &tokens, f);
            let mut s = String::new();
            render_planar(&codes, 0, &mut s);
            if best.as_ref().is_none_or(|b| s < b.0) {
                best = Some((s, codes, order, fl));
            }
        }
        parts.push(best.unwrap());
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut key = String::from("P");
    let mut vorder = Vec::new();
    let mut forder = Vec::new();
    for (_, codes, order, fl) in &parts {
        render_planar(codes, vorder.len(), &mut key);
        vorder.extend_from_slice(order);
        forder.extend_from_slice(fl);
    }
    let mut vertex_map = vec![0; g.num_vertices()];
    for (i, &v) in vorder.iter().enumerate() {
        vertex_map[v] = i;
    }
    let mut flag_map = vec![0; g.num_flags()];
    for (i, &f) in forder.iter().enumerate() {
        flag_map[f] = i;
    }
    CanonicalKey {
        key,
        vertex_map,
        flag_map,
    }
}

/// Splits at `sep` outside braces.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("expected a number, got {s:?}")))
}

/// Splits "12{...}{...}" into the leading number and the brace groups.
fn number_and_tokens(s: &str) -> Result<(usize, Vec<&str>)> {
    let cut = s.find('{').unwrap_or(s.len());
    let n = parse_usize(&s[..cut])?;
    let mut toks = Vec::new();
    let mut rest = &s[cut..];
    while !rest.is_empty() {
        let close = rest
            .find('}')
            .ok_or_else(|| Error::Parse(format!("unclosed decoration in {s:?}")))?;
        let t = &rest[..=close];
        toks.push(if t == "{}" { "" } else { t });
        rest = &rest[close + 1..];
    }
    Ok((n, toks))
}

/// Rebuilds the canonical representative from a key.
pub fn decode_key(key: &str) -> Result<Graph> {
    if let Some(rest) = key.strip_prefix('P') {
        return decode_planar(rest);
    }
    let sections = split_top(key, ';');
    let n = parse_usize(
        sections[0]
            .strip_prefix('v')
            .ok_or_else(|| Error::Parse(format!("bad graph key {key:?}")))?,
    )?;
    let mut boundary = Vec::new();
    let mut decos = Vec::new();
    let mut pairs = Vec::new();
    let mut root = None;
    for sec in &sections[1..] {
        let (tag, body) = sec.split_at(1);
        match tag {
            "t" => {
                for item in split_top(body, ',') {
                    let (v, toks) = number_and_tokens(item)?;
                    boundary.push(v);
                    decos.push(FlagDeco::from_token(toks.first().copied().unwrap_or(""))?);
                }
            }
            "e" => {
                for item in split_top(body, ',') {
                    let (a, rest) = item
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad edge {item:?}")))?;
                    let a = parse_usize(a)?;
                    let (b, toks) = number_and_tokens(rest)?;
                    let f = boundary.len();
                    boundary.push(a);
                    boundary.push(b);
                    decos.push(FlagDeco::from_token(toks.first().copied().unwrap_or(""))?);
                    decos.push(FlagDeco::from_token(toks.get(1).copied().unwrap_or(""))?);
                    pairs.push((f, f + 1));
                }
            }
            "r" => root = Some(parse_usize(body)?),
            _ => return Err(Error::Parse(format!("unknown key section {sec:?}"))),
        }
    }
    let g = Graph::from_edges(n, boundary, &pairs)?;
    let g = g.with_decos(decos)?;
    g.with_root(root)
}

fn decode_planar(s: &str) -> Result<Graph> {
    let mut groups: Vec<(Vec<&str>, bool)> = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(Error::Parse(format!("bad planar key near {rest:?}")));
        }
        let mut depth = 0;
        let mut close = None;
        for (i, c) in rest.char_indices() {
            match c {
                '{' => depth += 1,
                '}' => depth -= 1,
                ')' if depth == 0 => {
                    close = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let close = close.ok_or_else(|| Error::Parse("unclosed vertex in planar key".into()))?;
        let body = &rest[1..close];
        rest = &rest[close + 1..];
        let root = rest.starts_with('r');
        if root {
            rest = &rest[1..];
        }
        let items = if body.is_empty() { Vec::new() } else { split_top(body, ',') };
        groups.push((items, root));
    }
    let mut start = Vec::new();
    let mut total = 0;
    for (items, _) in &groups {
        start.push(total);
        total += items.len();
    }
    let mut boundary = Vec::with_capacity(total);
    let mut decos = Vec::with_capacity(total);
    let mut partner: Vec<Option<usize>> = vec![None; total];
    let mut cyclic = Vec::new();
    let mut root = None;
    for (v, (items, is_root)) in groups.iter().enumerate() {
        if *is_root {
            root = Some(v);
        }
        let mut order = Vec::new();
        for item in items {
            let f = boundary.len();
            boundary.push(v);
            order.push(f);
            if let Some(t) = item.strip_prefix('t') {
                decos.push(FlagDeco::from_token(t)?);
            } else if let Some(e) = item.strip_prefix('e') {
                let (w, rest) = e
                    .split_once('.')
                    .ok_or_else(|| Error::Parse(format!("bad planar edge {item:?}")))?;
                let w = parse_usize(w)?;
                let (p, toks) = number_and_tokens(rest)?;
                decos.push(FlagDeco::from_token(toks.first().copied().unwrap_or(""))?);
                if w >= groups.len() || p >= groups[w].0.len() {
                    return Err(Error::Parse(format!("planar edge {item:?} points nowhere")));
                }
                partner[f] = Some(start[w] + p);
            } else {
                return Err(Error::Parse(format!("bad planar flag {item:?}")));
            }
        }
        cyclic.push(order);
    }
    let mut pairs = Vec::new();
    for f in 0..total {
        if let Some(h) = partner[f] {
            if partner[h] != Some(f) || h == f {
                return Err(Error::Parse("planar key has inconsistent edges".into()));
            }
            if f < h {
                pairs.push((f, h));
            }
        }
    }
    let g = Graph::from_edges(groups.len(), boundary, &pairs)?;
    g.with_decos(decos)?.with_cyclic(Some(cyclic))?.with_root(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Direction, GraphBuilder};

    fn path(n: usize) -> Graph {
        let mut b = GraphBuilder::new();
        let vs = b.vertices(n);
        for w in vs.windows(2) {
            b.edge(w[0], w[1]);
        }
        b.build().unwrap()
    }

    #[test]
    fn relabeled_graphs_share_key() {
        let g = path(4);
        let vperm = vec![2, 0, 3, 1];
        let fperm: Vec<usize> = (0..g.num_flags()).rev().collect();
        let h = g.relabel(&vperm, &fperm).unwrap();
        assert_eq!(canonical_key(&g), canonical_key(&h));
    }

    #[test]
    fn path_and_star_differ() {
        let mut b = GraphBuilder::new();
        let vs = b.vertices(4);
        for &v in &vs[1..] {
            b.edge(vs[0], v);
        }
        let star = b.build().unwrap();
        assert_ne!(canonical_key(&star), canonical_key(&path(4)));
    }

    #[test]
    fn witness_relabeling_reproduces_decoded_key() {
        let mut b = GraphBuilder::new();
        let vs = b.vertices(3);
        b.edge(vs[0], vs[1]);
        b.edge(vs[0], vs[1]);
        b.edge(vs[1], vs[1]);
        let t = b.tail(vs[2]);
        b.deco(t).color = Some("x".into());
        b.edge(vs[2], vs[0]);
        let g = b.build().unwrap();
        let ck = canonicalize(&g);
        let decoded = decode_key(&ck.key).unwrap();
        assert!(decoded.same_structure(&canonical_graph(&g)));
        assert_eq!(canonical_key(&decoded), ck.key);
    }

    #[test]
    fn directions_are_respected() {
        let mut b = GraphBuilder::new();
        let (u, v) = (b.vertex(), b.vertex());
        let (f, g) = b.edge(u, v);
        b.deco(f).direction = Some(Direction::Out);
        b.deco(g).direction = Some(Direction::In);
        let t = b.tail(u);
        b.deco(t).direction = Some(Direction::In);
        let a = b.build().unwrap();
        let mut b2 = GraphBuilder::new();
        let (u, v) = (b2.vertex(), b2.vertex());
        let (f, g) = b2.edge(u, v);
        b2.deco(f).direction = Some(Direction::In);
        b2.deco(g).direction = Some(Direction::Out);
        let t = b2.tail(u);
        b2.deco(t).direction = Some(Direction::In);
        let c = b2.build().unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&c));
    }

    #[test]
    fn planar_rotation_invariance_and_reflection_sensitivity() {
        let mut b = GraphBuilder::new();
        let v = b.vertex();
        let t: Vec<usize> = (0..3).map(|_| b.tail(v)).collect();
        for (i, &f) in t.iter().enumerate() {
            b.deco(f).color = Some(format!("c{i}"));
        }
        let g = b.build().unwrap();
        let a = g.with_cyclic(Some(vec![vec![0, 1, 2]])).unwrap();
        let rot = g.with_cyclic(Some(vec![vec![1, 2, 0]])).unwrap();
        let refl = g.with_cyclic(Some(vec![vec![0, 2, 1]])).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&rot));
        assert_ne!(canonical_key(&a), canonical_key(&refl));
        let d = decode_key(&canonical_key(&a)).unwrap();
        assert_eq!(canonical_key(&d), canonical_key(&a));
    }

    #[test]
    fn disconnected_graphs_sort_components() {
        let a = path(2).disjoint_union(&path(3)).unwrap();
        let b = path(3).disjoint_union(&path(2)).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn keys_of_small_graphs() {
        assert_eq!(canonical_key(&Graph::corolla(2)), "v1;t0,0");
        assert_eq!(canonical_key(&Graph::empty()), "v0");
        assert_eq!(canonical_key(&path(2)), "v2;e0-1");
    }
}
