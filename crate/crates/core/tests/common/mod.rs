//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use feyncat_core::graph::{Direction, FlagDeco, Graph, GraphBuilder};
use feyncat_core::{Coeff, Elem, HopfAlgebra, LinComb, Result, Tensor2, Word};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Isomorphism by trying every vertex bijection and backtracking over flags.
pub fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
    assert!(!a.is_planar() && !b.is_planar());
    if a.num_vertices() != b.num_vertices() || a.num_flags() != b.num_flags() {
        return false;
    }
    permutations(a.num_vertices()).iter().any(|p| {
        if a.root().map(|r| p[r]) != b.root() {
            return false;
        }
        let mut image = vec![usize::MAX; a.num_flags()];
        let mut used = vec![false; b.num_flags()];
        match_flags(a, b, p, 0, &mut image, &mut used)
    })
}

fn match_flags(a: &Graph, b: &Graph, p: &[usize], f: usize, image: &mut [usize], used: &mut [bool]) -> bool {
    if f == a.num_flags() {
        return true;
    }
    if image[f] != usize::MAX {
        return match_flags(a, b, p, f + 1, image, used);
    }
    let fp = a.involution(f);
    for g in 0..b.num_flags() {
        if used[g] || b.boundary(g) != p[a.boundary(f)] || b.flag_deco(g) != a.flag_deco(f) {
            continue;
        }
        let gp = b.involution(g);
        if (fp == f) != (gp == g) {
            continue;
        }
        if fp != f && (used[gp] || b.boundary(gp) != p[a.boundary(fp)] || b.flag_deco(gp) != a.flag_deco(fp)) {
            continue;
        }
        image[f] = g;
        used[g] = true;
        image[fp] = gp;
        used[gp] = true;
        if match_flags(a, b, p, f + 1, image, used) {
            return true;
        }
        image[f] = usize::MAX;
        used[g] = false;
        image[fp] = usize::MAX;
        used[gp] = false;
    }
    false
}

/// Number of isomorphisms from `a` to `b`, as pairs of vertex and flag bijections.
pub fn count_isomorphisms(a: &Graph, b: &Graph) -> u64 {
    if a.num_vertices() != b.num_vertices() || a.num_flags() != b.num_flags() {
        return 0;
    }
    permutations(a.num_vertices())
        .iter()
        .filter(|p| a.root().map(|r| p[r]) == b.root())
        .map(|p| {
            let mut image = vec![usize::MAX; a.num_flags()];
            let mut used = vec![false; b.num_flags()];
            count_flags(a, b, p, 0, &mut image, &mut used)
        })
        .sum()
}

fn count_flags(a: &Graph, b: &Graph, p: &[usize], f: usize, image: &mut [usize], used: &mut [bool]) -> u64 {
    if f == a.num_flags() {
        return 1;
    }
    if image[f] != usize::MAX {
        return count_flags(a, b, p, f + 1, image, used);
    }
    let fp = a.involution(f);
    let mut total = 0;
    for g in 0..b.num_flags() {
        if used[g] || b.boundary(g) != p[a.boundary(f)] || b.flag_deco(g) != a.flag_deco(f) {
            continue;
        }
        let gp = b.involution(g);
        if (fp == f) != (gp == g) {
            continue;
        }
        if fp != f && (used[gp] || b.boundary(gp) != p[a.boundary(fp)] || b.flag_deco(gp) != a.flag_deco(fp)) {
            continue;
        }
        image[f] = g;
        used[g] = true;
        image[fp] = gp;
        used[gp] = true;
        total += count_flags(a, b, p, f + 1, image, used);
        image[f] = usize::MAX;
        used[g] = false;
        image[fp] = usize::MAX;
        used[gp] = false;
    }
    total
}

/// Edge kinds for the labeled small-graph family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Plain,
    Colored,
    Directed,
    Massive,
}

/// Multigraph given by edge and tail lists on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Labeled {
    pub n: usize,
    pub edges: Vec<(usize, usize, Tag)>,
    pub tails: Vec<(usize, bool)>,
}

impl Labeled {
    fn normal(&self, p: &[usize]) -> Labeled {
        let mut edges: Vec<(usize, usize, Tag)> = self
            .edges
            .iter()
            .map(|&(u, v, t)| {
                let (u, v) = (p[u], p[v]);
                if t == Tag::Directed {
                    (u, v, t)
                } else {
                    (u.min(v), u.max(v), t)
                }
            })
            .collect();
        edges.sort();
        let mut tails: Vec<(usize, bool)> = self.tails.iter().map(|&(v, m)| (p[v], m)).collect();
        tails.sort();
        Labeled { n: self.n, edges, tails }
    }

    /// Smallest relabeling over all vertex permutations: equal exactly for isomorphic graphs.
    pub fn orbit_min(&self, perms: &[Vec<usize>]) -> Labeled {
        perms.iter().map(|p| self.normal(p)).min().expect("at least one permutation")
    }

    /// Builds the graph, listing flags in an order given by `shuffle`.
    pub fn to_graph(&self, shuffle: u64) -> Graph {
        let mut b = GraphBuilder::new();
        b.vertices(self.n);
        let mut items: Vec<(u64, usize)> = (0..self.edges.len() + self.tails.len())
            .map(|i| ((i as u64 + 1).wrapping_mul(shuffle | 1).rotate_left(17) ^ shuffle, i))
            .collect();
        items.sort();
        for (_, i) in items {
            if i < self.edges.len() {
                let (u, v, t) = self.edges[i];
                let (f, g) = if shuffle & (1 << (i % 61)) != 0 && t != Tag::Directed {
                    let (g, f) = b.edge(v, u);
                    (f, g)
                } else {
                    b.edge(u, v)
                };
                match t {
                    Tag::Plain => {}
                    Tag::Colored => {
                        b.deco(f).color = Some("r".into());
                        b.deco(g).color = Some("r".into());
                    }
                    Tag::Directed => {
                        b.deco(f).direction = Some(Direction::Out);
                        b.deco(g).direction = Some(Direction::In);
                    }
                    Tag::Massive => b.edge_mass(f, Coeff::one()),
                }
            } else {
                let (v, mom) = self.tails[i - self.edges.len()];
                let f = b.tail(v);
                if mom {
                    *b.deco(f) = FlagDeco {
                        momentum: Some(feyncat_core::graph::Momentum::Nonzero("p".into())),
                        ..FlagDeco::default()
                    };
                }
            }
        }
        b.build().expect("valid labeled graph")
    }
}

/// Multisets of size `k` from `0..n`, nondecreasing.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Graph builder for plain graphs from vertex count, edge list and tails per vertex.
pub fn plain_graph(n: usize, edges: &[(usize, usize)], tails: &[usize]) -> Graph {
    let mut b = GraphBuilder::new();
    b.vertices(n);
    for &(u, v) in edges {
        b.edge(u, v);
    }
    for (v, &t) in tails.iter().enumerate() {
        for _ in 0..t {
            b.tail(v);
        }
    }
    b.build().unwrap()
}

/// Channels of a connected graph by brute force over edge subsets, grouped by isomorphism of
/// the quotient and of the multiset of subgraph components.
pub fn edge_subset_classes(g: &Graph) -> Vec<(Graph, Vec<Graph>, u64)> {
    let edges = g.edges();
    let mut classes: Vec<(Graph, Vec<Graph>, u64)> = Vec::new();
    for mask in 0u64..1 << edges.len() {
        let keep: Vec<usize> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i].0).collect();
        let sub = g.spanning_subgraph(&keep).unwrap().component_graphs();
        let quot = g.contract(&keep).unwrap();
        match classes
            .iter_mut()
            .find(|(q, s, _)| brute_isomorphic(q, &quot) && same_multiset(s, &sub))
        {
            Some(c) => c.2 += 1,
            None => classes.push((quot, sub, 1)),
        }
    }
    classes
}

pub fn same_multiset(a: &[Graph], b: &[Graph]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&j| !used[j] && brute_isomorphic(x, &b[j])) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

/// Fiber-size lists of all monotone surjections from `n` points, by enumerating all maps.
pub fn monotone_surjections(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for code in 0..total {
        let mut f = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            f.push(c % n);
            c /= n;
        }
        if f[0] != 0 || f.windows(2).any(|w| w[1] != w[0] && w[1] != w[0] + 1) {
            continue;
        }
        let k = f[n - 1] + 1;
        let mut sizes = vec![0; k];
        for &x in &f {
            sizes[x] += 1;
        }
        out.push(sizes);
    }
    out
}

/// Number of surjections from `n` points, keyed by sorted fiber sizes.
pub fn surjection_counts(n: usize) -> BTreeMap<Vec<usize>, u64> {
    let mut out = BTreeMap::new();
    for k in 1..=n {
        for code in 0..k.pow(n as u32) {
            let mut sizes = vec![0; k];
            let mut c = code;
            for _ in 0..n {
                sizes[c % k] += 1;
                c /= k;
            }
            if sizes.contains(&0) {
                continue;
            }
            sizes.sort();
            *out.entry(sizes).or_default() += 1;
        }
    }
    out
}

/// Unordered rooted trees as child lists, vertex 0 the root.
#[derive(Clone, Debug)]
pub struct RTree {
    pub children: Vec<Vec<usize>>,
}

impl RTree {
    /// Reads `(..)` nesting, one pair of parentheses per vertex.
    pub fn parse(s: &str) -> RTree {
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for ch in s.chars() {
            match ch {
                '(' => {
                    let v = children.len();
                    children.push(Vec::new());
                    if let Some(&p) = stack.last() {
                        children[p].push(v);
                    }
                    stack.push(v);
                }
                ')' => {
                    stack.pop();
                }
                _ => panic!("unexpected {ch:?} in amputated tree {s:?}"),
            }
        }
        RTree { children }
    }

    pub fn encode_at(&self, v: usize) -> String {
        let mut parts: Vec<String> = self.children[v].iter().map(|&c| self.encode_at(c)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn encode_without(&self, v: usize, removed: &[usize]) -> String {
        let mut parts: Vec<String> = self.children[v]
            .iter()
            .filter(|c| !removed.contains(c))
            .map(|&c| self.encode_without(c, removed))
            .collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a == b || self.children[a].iter().any(|&c| self.is_ancestor(c, b))
    }

    /// Admissible-cut coproduct: (trunk, sorted pruned forest) with multiplicities; the unit is "".
    pub fn ck_coproduct(&self) -> BTreeMap<(String, Vec<String>), i64> {
        let n = self.children.len();
        let mut out = BTreeMap::new();
        *out.entry((String::new(), vec![self.encode_at(0)])).or_default() += 1;
        for mask in 0u64..1 << (n - 1) {
            let cut: Vec<usize> = (1..n).filter(|v| mask >> (v - 1) & 1 == 1).collect();
            let admissible = cut
                .iter()
                .all(|&a| cut.iter().all(|&b| a == b || !self.is_ancestor(a, b)));
            if !admissible {
                continue;
            }
            let mut forest: Vec<String> = cut.iter().map(|&v| self.encode_at(v)).collect();
            forest.sort();
            *out.entry((self.encode_without(0, &cut), forest)).or_default() += 1;
        }
        out
    }
}

/// Re-encodes an amputated-tree tensor in the oracle's normal form.
pub fn tree_tensor_as_map(t: &Tensor2) -> BTreeMap<(String, Vec<String>), i64> {
    let enc = |k: &str| RTree::parse(k).encode_at(0);
    t.iter()
        .map(|((a, b), c)| {
            assert!(a.len() <= 1);
            let trunk = a.keys().first().map_or(String::new(), |k| enc(k.as_str()));
            let mut forest: Vec<String> = b.keys().iter().map(|k| enc(k.as_str())).collect();
            forest.sort();
            ((trunk, forest), c.to_i64().unwrap())
        })
        .collect()
}

/// Antipode by the closed formula S = Σ_k (-1)^k μ^(k-1) Δ̃^(k-1) on the augmentation ideal.
pub fn takeuchi_antipode(h: &HopfAlgebra, x: &Elem) -> Result<Elem> {
    let sym = h.symmetry();
    let x = h.hopf_project(x);
    let scalar = x.scalar_part();
    let mut aug = x.clone();
    aug.add_term(Word::unit(), -scalar.clone());
    let mut out = Elem::scalar(scalar);
    let mut k = 1;
    loop {
        let it: LinComb<Vec<Word>> = h.iterated_reduced(&aug, k - 1)?;
        if it.is_zero() {
            return Ok(out);
        }
        let sign = if k % 2 == 1 { -Coeff::one() } else { Coeff::one() };
        for (ws, c) in it.iter() {
            let mut prod = Elem::one();
            for w in ws {
                prod = prod.mul(&Elem::basis(w.clone()), sym);
            }
            out.add_scaled(&prod, &(&sign * c));
        }
        k += 1;
    }
}

/// Total coefficient of a tensor, i.e. its number of terms counted with multiplicity.
pub fn total_weight(t: &Tensor2) -> Coeff {
    let mut s = Coeff::zero();
    for (_, c) in t.iter() {
        s += c;
    }
    s
}
