//! Rooted trees as operations of the free operad.
//!
//! With labeled tails, a tree factors as a trunk whose tails receive the pieces
//! cut off above them; every tail of the tree lies in exactly one piece. The
//! amputated mode works with tail-free trees by adding tails (`sharp`), cutting,
//! and removing tails again (`flat`), which gives the admissible-cut coproduct.

use std::collections::BTreeSet;

use super::{not_generator, raw_key_atom, unknown_atom, usize_arg};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::error::{Error, Result};
use crate::hopf::{Channel, Instance};
use crate::tree::{Node, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMode {
    Planar,
    Symmetric,
}

pub struct TreeInstance {
    mode: TreeMode,
    amputated: bool,
}

/// Every way to split a vertex into a trunk and the pieces cut off above it.
fn trunk_options(n: &Node) -> Vec<(Node, Vec<Node>)> {
    let ch = match n {
        Node::Tail => return vec![(Node::Tail, vec![Node::Tail])],
        Node::Vertex(ch) => ch,
    };
    let mut acc: Vec<(Vec<Node>, Vec<Node>)> = vec![(Vec::new(), Vec::new())];
    for c in ch {
        let mut opts: Vec<(Node, Vec<Node>)> = vec![(Node::Tail, vec![c.clone()])];
        if !c.is_tail() {
            opts.extend(trunk_options(c));
        }
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for (t, p) in &acc {
            for (ct, cp) in &opts {
                let mut t = t.clone();
                t.push(ct.clone());
                let mut p = p.clone();
                p.extend(cp.iter().cloned());
                next.push((t, p));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(t, p)| (Node::Vertex(t), p)).collect()
}

/// All (trunk, pieces) splittings of a tree, including cutting below the root.
pub fn tree_cuts(t: &Tree) -> Vec<(Tree, Vec<Tree>)> {
    let root = match &t.0 {
        None => return vec![(Tree::empty(), Vec::new())],
        Some(r) => r,
    };
    let mut out = vec![(Tree::line(), vec![t.clone()])];
    if !root.is_tail() {
        out.extend(
            trunk_options(root)
                .into_iter()
                .map(|(tr, ps)| (Tree::from_node(tr), ps.into_iter().map(Tree::from_node).collect())),
        );
    }
    out
}

impl TreeInstance {
    pub fn new(mode: TreeMode, amputated: bool) -> TreeInstance {
        TreeInstance { mode, amputated }
    }

    pub fn mode(&self) -> TreeMode {
        self.mode
    }

    pub fn is_amputated(&self) -> bool {
        self.amputated
    }

    fn planar(&self) -> bool {
        self.mode == TreeMode::Planar
    }

    pub fn normalize(&self, t: &Tree) -> Tree {
        match self.mode {
            TreeMode::Planar => t.clone(),
            TreeMode::Symmetric => t.symmetric_form(),
        }
    }

    pub fn key(&self, t: &Tree) -> ClassKey {
        ClassKey::new(self.normalize(t).to_string())
    }

    pub fn tree(&self, key: &ClassKey) -> Result<Tree> {
        key.as_str().parse()
    }

    fn valid(&self, t: &Tree) -> std::result::Result<(), &'static str> {
        if t.is_empty() {
            return Err("the empty tree is the unit, not a generator");
        }
        if self.amputated {
            if t.has_tails() {
                return Err("amputated trees have no tails");
            }
        } else if !t.is_line() && !t.every_vertex_has_input() {
            return Err("every vertex needs an input");
        }
        Ok(())
    }

    fn word_of(&self, trees: Vec<Tree>) -> Word {
        let keys = trees
            .iter()
            .filter(|t| !t.is_empty())
            .map(|t| self.key(t))
            .collect();
        Word::new(keys, self.symmetry())
    }

    /// Channels of one tree as (trunk, pieces) before keying.
    fn split(&self, t: &Tree) -> Result<Vec<(Tree, Vec<Tree>)>> {
        if !self.amputated {
            return Ok(tree_cuts(t));
        }
        Ok(tree_cuts(&t.sharp(self.planar())?)
            .into_iter()
            .map(|(tr, ps)| (tr.flat(), ps.iter().map(Tree::flat).collect()))
            .collect())
    }

    /// Labeled generators on `n` vertices: tail-free shapes with one or two tails
    /// on each leaf and at most one on each inner vertex, in every angle when planar.
    fn labeled_generators(&self, n: usize) -> Vec<Tree> {
        fn decorate(node: &Node, planar: bool) -> Vec<Node> {
            let ch = match node {
                Node::Tail => return vec![Node::Tail],
                Node::Vertex(ch) => ch,
            };
            let mut kids: Vec<Vec<Node>> = vec![Vec::new()];
            for c in ch {
                let opts = decorate(c, planar);
                kids = kids
                    .into_iter()
                    .flat_map(|k| {
                        opts.iter().map(move |o| {
                            let mut k = k.clone();
                            k.push(o.clone());
                            k
                        })
                    })
                    .collect();
            }
            let tail_counts: Vec<usize> = if ch.is_empty() { vec![1, 2] } else { vec![0, 1] };
            let mut out = Vec::new();
            for k in kids {
                for &t in &tail_counts {
                    let slots = if planar { k.len() + 1 } else { 1 };
                    if t == 0 {
                        out.push(Node::Vertex(k.clone()));
                        continue;
                    }
                    for s in 0..slots {
                        let mut v = k.clone();
                        let at = if planar { s } else { v.len() };
                        for _ in 0..t {
                            v.insert(at, Node::Tail);
                        }
                        out.push(Node::Vertex(v));
                    }
                }
            }
            out
        }
        let mut out = BTreeSet::new();
        for shape in Tree::enumerate(n, self.planar()) {
            if let Some(r) = &shape.0 {
                for d in decorate(r, self.planar()) {
                    out.insert(self.normalize(&Tree::from_node(d)));
                }
            }
        }
        out.into_iter().collect()
    }
}

impl Instance for TreeInstance {
    fn name(&self) -> String {
        let base = match self.mode {
            TreeMode::Planar => "ck-tree-planar",
            TreeMode::Symmetric => "ck-tree-sym",
        };
        if self.amputated {
            format!("{base}-amputated")
        } else {
            base.to_string()
        }
    }

    fn symmetry(&self) -> Symmetry {
        match self.mode {
            TreeMode::Planar => Symmetry::NonSigma,
            TreeMode::Symmetric => Symmetry::Symmetric,
        }
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        let t = self.tree(key).map_err(|e| not_generator(self, key, e.to_string()))?;
        self.valid(&t).map_err(|r| not_generator(self, key, r))?;
        if self.normalize(&t).to_string() != key.as_str() {
            return Err(not_generator(self, key, "key is not in normal form"));
        }
        Ok(())
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        !self.amputated && key.as_str() == "|"
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.tree(key).map_or(0, |t| t.vertices())
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    /// Cuts are chosen independently in each tree of the forest.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        let mut per_tree = Vec::with_capacity(keys.len());
        for k in keys {
            self.check_generator(k)?;
            per_tree.push(self.split(&self.tree(k)?)?);
        }
        let mut acc: Vec<(Vec<Tree>, Vec<Tree>)> = vec![(Vec::new(), Vec::new())];
        for opts in &per_tree {
            let mut next = Vec::with_capacity(acc.len() * opts.len());
            for (l, r) in &acc {
                for (tr, ps) in opts {
                    let mut l = l.clone();
                    l.push(tr.clone());
                    let mut r = r.clone();
                    r.extend(ps.iter().cloned());
                    next.push((l, r));
                }
            }
            acc = next;
        }
        Ok(acc
            .into_iter()
            .map(|(l, r)| Channel {
                left: self.word_of(l),
                right: self.word_of(r),
                mult: 1,
            })
            .collect())
    }

    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        let mut out = Vec::new();
        if !self.amputated {
            out.push(ClassKey::new("|"));
        }
        for n in 1..=max_degree {
            let trees = if self.amputated {
                Tree::enumerate(n, self.planar())
            } else {
                self.labeled_generators(n)
            };
            out.extend(trees.iter().map(|t| self.key(t)));
        }
        out
    }

    fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
        if self.amputated {
            Vec::new()
        } else {
            vec![ClassKey::new("|")]
        }
    }

    /// Grafting onto a new root; only the amputated mode is closed under it.
    fn b_plus(&self, word: &Word) -> Result<Elem> {
        if !self.amputated {
            return Err(Error::Unsupported(format!("{} has no B+ operator", self.name())));
        }
        let forest = word.keys().iter().map(|k| self.tree(k)).collect::<Result<Vec<_>>>()?;
        Ok(Elem::generator(self.key(&Tree::graft(&forest)?)))
    }

    fn left_arity_ok(&self, left: &Word) -> bool {
        left.len() == 1 || (self.amputated && left.is_unit())
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        let t = match name {
            "ladder" => Tree::ladder(usize_arg(name, args)?, !self.amputated),
            "corolla" => {
                let n = usize_arg(name, args)?;
                if self.amputated {
                    Tree::graft(&vec![Tree::ladder(1, false); n])?
                } else {
                    Tree::corolla(n)
                }
            }
            "tree" => args.join(",").parse()?,
            "key" => return raw_key_atom(self, args),
            _ => return Err(unknown_atom(self, name)),
        };
        if t.is_empty() {
            return Ok(Elem::one());
        }
        let k = self.key(&t);
        self.check_generator(&k)?;
        Ok(Elem::generator(k))
    }
}

/// Removes all tails from every tree factor; `|` becomes the unit.
pub fn amputate(from: &TreeInstance, x: &Elem) -> Result<Elem> {
    if from.amputated {
        return Err(Error::Unsupported("the elements are already amputated".into()));
    }
    let to = TreeInstance::new(from.mode, true);
    x.try_map_basis(|w| {
        let trees = w.keys().iter().map(|k| Ok(from.tree(k)?.flat())).collect::<Result<Vec<_>>>()?;
        Ok(Elem::basis(to.word_of(trees)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn ladder_has_one_more_channel_than_vertices() {
        let inst = TreeInstance::new(TreeMode::Symmetric, false);
        for n in 0..6 {
            let k = inst.key(&Tree::ladder(n, true));
            assert_eq!(inst.channels(&k).unwrap().len(), n + 1);
        }
    }

    #[test]
    fn cuts_of_a_cherry() {
        let inst = TreeInstance::new(TreeMode::Planar, false);
        let ch = inst.channels(&inst.key(&t("(||)"))).unwrap();
        assert_eq!(ch.len(), 2);
        let ch = inst.channels(&inst.key(&t("((|)|)"))).unwrap();
        assert_eq!(ch.len(), 3);
        assert!(ch
            .iter()
            .any(|c| c.left.to_string() == "[(||)]" && c.right.to_string() == "[(|)] [|]"));
    }

    #[test]
    fn amputated_corolla_matches_admissible_cuts() {
        let inst = TreeInstance::new(TreeMode::Symmetric, true);
        let ch = inst.channels(&inst.key(&t("(()())"))).unwrap();
        assert_eq!(ch.len(), 5);
        let lefts: Vec<String> = ch.iter().map(|c| c.left.to_string()).collect();
        assert!(lefts.contains(&"1".to_string()));
    }

    #[test]
    fn planar_combs_are_distinct_only_in_planar_mode() {
        let a = t("((||)|)");
        let b = t("(|(||))");
        let p = TreeInstance::new(TreeMode::Planar, false);
        let s = TreeInstance::new(TreeMode::Symmetric, false);
        assert_ne!(p.key(&a), p.key(&b));
        assert_eq!(s.key(&a), s.key(&b));
    }

    #[test]
    fn amputation_drops_tails() {
        let inst = TreeInstance::new(TreeMode::Symmetric, false);
        let x = Elem::generator(inst.key(&t("((|)|)")));
        let y = amputate(&inst, &x).unwrap();
        assert_eq!(y, Elem::generator(ClassKey::new("(())")));
        assert_eq!(amputate(&inst, &Elem::generator(ClassKey::new("|"))).unwrap(), Elem::one());
    }

    #[test]
    fn b_plus_of_unit_is_a_vertex() {
        let inst = TreeInstance::new(TreeMode::Symmetric, true);
        assert_eq!(inst.b_plus(&Word::unit()).unwrap(), Elem::generator(ClassKey::new("()")));
        assert!(TreeInstance::new(TreeMode::Symmetric, false).b_plus(&Word::unit()).is_err());
    }
}
