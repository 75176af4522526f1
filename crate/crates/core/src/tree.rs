//! Rooted trees with tails.
//!
//! A tree is either empty, the bare line `|` (a single flag and no vertex), or a
//! root vertex. Each vertex lists its inputs, which are tails or subtrees. The
//! text form writes a tail as `|` and a vertex as its inputs in parentheses, so
//! `(|)` is the vertex with one tail and `((|)|)` has two vertices and two tails.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Direction, Graph, GraphBuilder};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Tail,
    Vertex(Vec<Node>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree(pub Option<Node>);

impl Node {
    pub fn leaf() -> Node {
        Node::Vertex(Vec::new())
    }

    pub fn is_tail(&self) -> bool {
        matches!(self, Node::Tail)
    }

    pub fn vertices(&self) -> usize {
        match self {
            Node::Tail => 0,
            Node::Vertex(ch) => 1 + ch.iter().map(Node::vertices).sum::<usize>(),
        }
    }

    pub fn tails(&self) -> usize {
        match self {
            Node::Tail => 1,
            Node::Vertex(ch) => ch.iter().map(Node::tails).sum(),
        }
    }

    /// Children sorted recursively, giving the form invariant under reordering inputs.
    pub fn symmetric_form(&self) -> Node {
        match self {
            Node::Tail => Node::Tail,
            Node::Vertex(ch) => {
                let mut c: Vec<Node> = ch.iter().map(Node::symmetric_form).collect();
                c.sort();
                Node::Vertex(c)
            }
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Node::Tail => out.push('|'),
            Node::Vertex(ch) => {
                out.push('(');
                for c in ch {
                    c.write(out);
                }
                out.push(')');
            }
        }
    }

    fn has_tails(&self) -> bool {
        match self {
            Node::Tail => true,
            Node::Vertex(ch) => ch.iter().any(Node::has_tails),
        }
    }

    fn every_vertex_has_input(&self) -> bool {
        match self {
            Node::Tail => true,
            Node::Vertex(ch) => !ch.is_empty() && ch.iter().all(Node::every_vertex_has_input),
        }
    }

    fn sharp(&self, planar: bool) -> Node {
        match self {
            Node::Tail => Node::Tail,
            Node::Vertex(ch) => {
                let mut c = Vec::with_capacity(2 * ch.len() + 1);
                if planar {
                    c.push(Node::Tail);
                    for x in ch {
                        c.push(x.sharp(planar));
                        c.push(Node::Tail);
                    }
                } else {
                    c.extend(ch.iter().map(|x| x.sharp(planar)));
                    c.push(Node::Tail);
                }
                Node::Vertex(c)
            }
        }
    }

    fn flat(&self) -> Option<Node> {
        match self {
            Node::Tail => None,
            Node::Vertex(ch) => Some(Node::Vertex(ch.iter().filter_map(Node::flat).collect())),
        }
    }

    fn preorder<'a>(&'a self, out: &mut Vec<&'a Node>) {
        if let Node::Vertex(ch) = self {
            out.push(self);
            for c in ch {
                c.preorder(out);
            }
        }
    }

    fn modify_at(&mut self, target: &mut usize, f: &mut dyn FnMut(&mut Vec<Node>)) -> bool {
        if let Node::Vertex(ch) = self {
            if *target == 0 {
                f(ch);
                return true;
            }
            *target -= 1;
            for c in ch.iter_mut() {
                if c.modify_at(target, f) {
                    return true;
                }
            }
        }
        false
    }
}

impl Tree {
    pub fn empty() -> Tree {
        Tree(None)
    }

    pub fn line() -> Tree {
        Tree(Some(Node::Tail))
    }

    pub fn from_node(n: Node) -> Tree {
        Tree(Some(n))
    }

    /// Chain of `n` vertices; with `tail` the top vertex carries one tail.
    pub fn ladder(n: usize, tail: bool) -> Tree {
        if n == 0 {
            return if tail { Tree::line() } else { Tree::empty() };
        }
        let mut node = if tail { Node::Vertex(vec![Node::Tail]) } else { Node::leaf() };
        for _ in 1..n {
            node = Node::Vertex(vec![node]);
        }
        Tree(Some(node))
    }

    /// One vertex with `n` tails.
    pub fn corolla(n: usize) -> Tree {
        Tree(Some(Node::Vertex(vec![Node::Tail; n])))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn is_line(&self) -> bool {
        matches!(self.0, Some(Node::Tail))
    }

    pub fn root(&self) -> Option<&Node> {
        self.0.as_ref()
    }

    pub fn vertices(&self) -> usize {
        self.0.as_ref().map_or(0, Node::vertices)
    }

    pub fn tails(&self) -> usize {
        self.0.as_ref().map_or(0, Node::tails)
    }

    pub fn has_tails(&self) -> bool {
        self.0.as_ref().is_some_and(Node::has_tails)
    }

    /// True when every vertex has at least one input (tail or child).
    pub fn every_vertex_has_input(&self) -> bool {
        self.0.as_ref().is_none_or(Node::every_vertex_has_input)
    }

    pub fn symmetric_form(&self) -> Tree {
        Tree(self.0.as_ref().map(Node::symmetric_form))
    }

    /// Adds one tail to every vertex (to every angle in the planar case); the empty tree becomes `|`.
    pub fn sharp(&self, planar: bool) -> Result<Tree> {
        if self.has_tails() {
            return Err(Error::InvalidTree("sharp needs a tree without tails".into()));
        }
        Ok(match &self.0 {
            None => Tree::line(),
            Some(n) => Tree(Some(n.sharp(planar))),
        })
    }

    /// Removes all tails; `|` becomes the empty tree.
    pub fn flat(&self) -> Tree {
        Tree(self.0.as_ref().and_then(Node::flat))
    }

    /// New root vertex whose only input is the old tree.
    pub fn plant(&self) -> Result<Tree> {
        match &self.0 {
            None => Err(Error::InvalidTree("cannot plant the empty tree".into())),
            Some(n) => Ok(Tree(Some(Node::Vertex(vec![n.clone()])))),
        }
    }

    /// Removes a root vertex that has exactly one input, which must be a vertex.
    pub fn unplant(&self) -> Result<Tree> {
        match &self.0 {
            Some(Node::Vertex(ch)) if ch.len() == 1 && !ch[0].is_tail() => Ok(Tree(Some(ch[0].clone()))),
            Some(Node::Vertex(ch)) => Err(Error::InvalidTree(format!(
                "unplant needs a root of valence 1, found {}",
                ch.len()
            ))),
            _ => Err(Error::InvalidTree("unplant needs a root vertex".into())),
        }
    }

    /// Grafts a forest onto a new root.
    pub fn graft(forest: &[Tree]) -> Result<Tree> {
        let mut ch = Vec::with_capacity(forest.len());
        for t in forest {
            match &t.0 {
                Some(n) => ch.push(n.clone()),
                None => return Err(Error::InvalidTree("cannot graft the empty tree".into())),
            }
        }
        Ok(Tree(Some(Node::Vertex(ch))))
    }

    /// Vertices in preorder (root first, inputs left to right).
    pub fn preorder(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        if let Some(n) = &self.0 {
            n.preorder(&mut out);
        }
        out
    }

    fn modify_vertex(&self, i: usize, mut f: impl FnMut(&mut Vec<Node>)) -> Result<Tree> {
        let mut t = self.clone();
        let mut k = i;
        let found = match &mut t.0 {
            Some(n) => n.modify_at(&mut k, &mut f),
            None => false,
        };
        if !found {
            return Err(Error::InvalidTree(format!("no vertex {i}")));
        }
        Ok(t)
    }

    /// Identifies the root of `other` with the `i`-th vertex (preorder) of `self`.
    pub fn compose_at(&self, i: usize, other: &Tree) -> Result<Tree> {
        let ch = match &other.0 {
            Some(Node::Vertex(ch)) => ch.clone(),
            _ => return Err(Error::InvalidTree("composition needs a rooted tree".into())),
        };
        self.modify_vertex(i, |c| c.extend(ch.iter().cloned()))
    }

    /// Joins the root of `other` to the `i`-th vertex of `self` by a new edge.
    pub fn compose_edge_at(&self, i: usize, other: &Tree) -> Result<Tree> {
        let n = match &other.0 {
            Some(n @ Node::Vertex(_)) => n.clone(),
            _ => return Err(Error::InvalidTree("composition needs a rooted tree".into())),
        };
        self.modify_vertex(i, |c| c.push(n.clone()))
    }

    /// Glues the root flag of `other` to the `i`-th tail (left to right) of `self`.
    pub fn graft_at_tail(&self, i: usize, other: &Tree) -> Result<Tree> {
        fn go(n: &Node, i: &mut usize, other: &Node) -> Option<Node> {
            match n {
                Node::Tail => {
                    if *i == 0 {
                        *i = usize::MAX;
                        Some(other.clone())
                    } else {
                        *i -= 1;
                        None
                    }
                }
                Node::Vertex(ch) => {
                    let mut out = Vec::with_capacity(ch.len());
                    let mut hit = false;
                    for c in ch {
                        if !hit {
                            if let Some(r) = go(c, i, other) {
                                out.push(r);
                                hit = true;
                                continue;
                            }
                        }
                        out.push(c.clone());
                    }
                    hit.then_some(Node::Vertex(out))
                }
            }
        }
        let (me, o) = match (&self.0, &other.0) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidTree("grafting needs nonempty trees".into())),
        };
        let mut k = i;
        go(me, &mut k, o)
            .map(|n| Tree(Some(n)))
            .ok_or_else(|| Error::InvalidTree(format!("no tail {i}")))
    }

    /// Directed graph with every flag pointing towards the root. The root vertex
    /// carries an outgoing tail; planar trees get cyclic orders starting at the
    /// outgoing flag.
    pub fn to_graph(&self, planar: bool) -> Result<Graph> {
        let root = match &self.0 {
            Some(n @ Node::Vertex(_)) => n,
            _ => return Err(Error::InvalidTree("only trees with a root vertex become graphs".into())),
        };
        let mut b = GraphBuilder::new();
        let mut cyc: Vec<Vec<usize>> = Vec::new();
        fn build(n: &Node, b: &mut GraphBuilder, cyc: &mut Vec<Vec<usize>>) -> (usize, usize) {
            let v = b.vertex();
            let out = b.tail(v);
            b.deco(out).direction = Some(Direction::Out);
            cyc.push(vec![out]);
            if let Node::Vertex(ch) = n {
                for c in ch {
                    match c {
                        Node::Tail => {
                            let t = b.tail(v);
                            b.deco(t).direction = Some(Direction::In);
                            cyc[v].push(t);
                        }
                        Node::Vertex(_) => {
                            let (_, child_out) = build(c, b, cyc);
                            let f = b.tail(v);
                            b.deco(f).direction = Some(Direction::In);
                            cyc[v].push(f);
                            b.join(child_out, f);
                        }
                    }
                }
            }
            (v, out)
        }
        let (r, _) = build(root, &mut b, &mut cyc);
        b.root(r);
        let g = b.build()?;
        if planar {
            g.with_cyclic(Some(cyc))
        } else {
            Ok(g)
        }
    }

    /// Inverse of [`Tree::to_graph`].
    pub fn from_graph(g: &Graph) -> Result<Tree> {
        let bad = |m: &str| Error::InvalidTree(format!("graph is not a rooted tree: {m}"));
        let root = g.root().ok_or_else(|| bad("no root"))?;
        if !g.is_connected() || g.betti1() != 0 {
            return Err(bad("not a connected tree"));
        }
        let out_of = |v: usize| -> Result<usize> {
            let outs: Vec<usize> = g
                .flags_at(v)
                .into_iter()
                .filter(|&f| g.flag_deco(f).direction == Some(Direction::Out))
                .collect();
            if outs.len() != 1 {
                return Err(bad("each vertex needs one outgoing flag"));
            }
            Ok(outs[0])
        };
        fn build(g: &Graph, v: usize, out_of: &dyn Fn(usize) -> Result<usize>) -> Result<Node> {
            let out = out_of(v)?;
            let order: Vec<usize> = match g.cyclic() {
                Some(c) => {
                    let o = &c[v];
                    let i = o.iter().position(|&x| x == out).unwrap();
                    o[i + 1..].iter().chain(o[..i].iter()).copied().collect()
                }
                None => g.flags_at(v).into_iter().filter(|&f| f != out).collect(),
            };
            let mut ch = Vec::new();
            for f in order {
                if g.is_tail(f) {
                    ch.push(Node::Tail);
                } else {
                    ch.push(build(g, g.boundary(g.involution(f)), out_of)?);
                }
            }
            Ok(Node::Vertex(ch))
        }
        if !g.is_tail(out_of(root)?) {
            return Err(bad("root flag is glued"));
        }
        Ok(Tree(Some(build(g, root, &out_of)?)))
    }

    /// All trees without tails on exactly `n` vertices, each listed once
    /// (planar trees up to planar isomorphism, otherwise up to isomorphism).
    pub fn enumerate(n: usize, planar: bool) -> Vec<Tree> {
        fn forests(n: usize, planar: bool, memo: &mut Vec<Option<Vec<Vec<Node>>>>) -> Vec<Vec<Node>> {
            if let Some(Some(f)) = memo.get(n) {
                return f.clone();
            }
            let mut out = Vec::new();
            if n == 0 {
                out.push(Vec::new());
            } else {
                for first in 1..=n {
                    for t in trees(first, planar, memo) {
                        for mut rest in forests(n - first, planar, memo) {
                            if !planar && rest.first().is_some_and(|r| *r < t) {
                                continue;
                            }
                            rest.insert(0, t.clone());
                            out.push(rest);
                        }
                    }
                }
            }
            memo[n] = Some(out.clone());
            out
        }
        fn trees(n: usize, planar: bool, memo: &mut Vec<Option<Vec<Vec<Node>>>>) -> Vec<Node> {
            forests(n - 1, planar, memo).into_iter().map(Node::Vertex).collect()
        }
        if n == 0 {
            return vec![Tree::empty()];
        }
        let mut memo = vec![None; n + 1];
        let mut out: Vec<Tree> = trees(n, planar, &mut memo)
            .into_iter()
            .map(|t| Tree(Some(t)))
            .collect();
        if !planar {
            out = out.into_iter().map(|t| t.symmetric_form()).collect();
            out.sort();
            out.dedup();
        }
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("∅"),
            Some(n) => {
                let mut s = String::new();
                n.write(&mut s);
                f.write_str(&s)
            }
        }
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Tree::empty());
        }
        let bytes = s.as_bytes();
        fn node(b: &[u8], i: &mut usize) -> Result<Node> {
            match b.get(*i) {
                Some(b'|') => {
                    *i += 1;
                    Ok(Node::Tail)
                }
                Some(b'(') => {
                    *i += 1;
                    let mut ch = Vec::new();
                    loop {
                        match b.get(*i) {
                            Some(b')') => {
                                *i += 1;
                                return Ok(Node::Vertex(ch));
                            }
                            Some(_) => ch.push(node(b, i)?),
                            None => return Err(Error::Parse("unclosed vertex in tree".into())),
                        }
                    }
                }
                _ => Err(Error::Parse(format!("unexpected character at {} in tree", *i))),
            }
        }
        let mut i = 0;
        let n = node(bytes, &mut i)?;
        if i != bytes.len() {
            return Err(Error::Parse(format!("trailing input in tree {s:?}")));
        }
        Ok(Tree(Some(n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["|", "(|)", "((|)|)", "(()())", "∅"] {
            assert_eq!(t(s).to_string(), s);
        }
        assert!("(|".parse::<Tree>().is_err());
        assert!("(|))".parse::<Tree>().is_err());
    }

    #[test]
    fn sharp_flat_conventions() {
        assert_eq!(Tree::empty().sharp(false).unwrap(), Tree::line());
        assert_eq!(Tree::line().flat(), Tree::empty());
        let c = t("(()())");
        assert_eq!(c.sharp(false).unwrap().to_string(), "((|)(|)|)");
        assert_eq!(c.sharp(true).unwrap().to_string(), "(|(|)|(|)|)");
        assert_eq!(c.sharp(false).unwrap().flat(), c);
        assert_eq!(c.sharp(true).unwrap().flat(), c);
        assert!(t("(|)").sharp(false).is_err());
    }

    #[test]
    fn plant_unplant() {
        let c = t("(()())");
        assert_eq!(c.plant().unwrap().unplant().unwrap(), c);
        assert!(c.unplant().is_err());
        assert!(Tree::empty().plant().is_err());
    }

    #[test]
    fn ladders() {
        assert_eq!(Tree::ladder(3, true).to_string(), "(((|)))");
        assert_eq!(Tree::ladder(2, false).to_string(), "(())");
        assert_eq!(Tree::ladder(2, false).sharp(false).unwrap().to_string(), "((|)|)");
    }

    #[test]
    fn rooted_tree_counts() {
        let sym: Vec<usize> = (1..=6).map(|n| Tree::enumerate(n, false).len()).collect();
        assert_eq!(sym, vec![1, 1, 2, 4, 9, 20]);
        let planar: Vec<usize> = (1..=6).map(|n| Tree::enumerate(n, true).len()).collect();
        assert_eq!(planar, vec![1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn edge_composition_through_planting() {
        let a = t("(()())");
        let b = t("(())");
        for i in 0..a.vertices() {
            let lhs = a.compose_edge_at(i, &b).unwrap();
            let via_plant = a.compose_at(i, &b.plant().unwrap()).unwrap();
            assert_eq!(lhs, via_plant);
            let via_root = a.plant().unwrap().compose_at(i + 1, &b.plant().unwrap()).unwrap();
            assert_eq!(via_root.unplant().unwrap(), lhs);
        }
    }

    #[test]
    fn edge_composition_through_sharp() {
        let a = t("(()())");
        let b = t("(())");
        let (sa, sb) = (a.sharp(false).unwrap(), b.sharp(false).unwrap());
        let order = sa.preorder().len();
        assert_eq!(order, 3);
        // tails of a♯ in left-to-right order belong to vertices 1, 2, 0 in preorder
        let tail_vertex = [1, 2, 0];
        for (tail, &v) in tail_vertex.iter().enumerate() {
            let glued = sa.graft_at_tail(tail, &sb).unwrap().flat();
            assert_eq!(glued.symmetric_form(), a.compose_edge_at(v, &b).unwrap().symmetric_form());
        }
    }

    #[test]
    fn graph_round_trip_and_symmetry() {
        let a = t("((|)(||)|)");
        let g = a.to_graph(true).unwrap();
        assert_eq!(Tree::from_graph(&g).unwrap(), a);
        let left = t("((||)|)");
        let right = t("(|(||))");
        let (gl, gr) = (left.to_graph(true).unwrap(), right.to_graph(true).unwrap());
        assert_ne!(canonical_key(&gl), canonical_key(&gr));
        let (hl, hr) = (left.to_graph(false).unwrap(), right.to_graph(false).unwrap());
        assert_eq!(canonical_key(&hl), canonical_key(&hr));
        assert_eq!(left.symmetric_form(), right.symmetric_form());
    }
}
