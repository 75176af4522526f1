//! The colored operad of composable chains in a finite category.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{not_generator, unknown_atom};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::error::{Error, Result};
use crate::hopf::{Channel, Instance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionDecl {
    pub first: String,
    pub second: String,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryDoc {
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    identities: BTreeMap<String, String>,
    #[serde(default)]
    compose: Vec<CompositionDecl>,
}

/// A finite category. Composites with identities may be omitted from the table.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: BTreeMap<String, (String, String)>,
    identities: BTreeMap<String, String>,
    compose: BTreeMap<(String, String), String>,
}

impl FiniteCategory {
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<MorphismDecl>,
        identities: BTreeMap<String, String>,
        compose: Vec<CompositionDecl>,
    ) -> Result<FiniteCategory> {
        let bad = |m: String| Err(Error::InvalidCategory(m));
        let objset: BTreeSet<&String> = objects.iter().collect();
        if objset.len() != objects.len() {
            return bad("duplicate object".into());
        }
        let mut mors = BTreeMap::new();
        for m in &morphisms {
            if m.name.is_empty() || m.name.chars().any(|c| "[]|(),@ ".contains(c)) {
                return bad(format!("invalid morphism name {:?}", m.name));
            }
            if !objset.contains(&m.source) || !objset.contains(&m.target) {
                return bad(format!("morphism {} has an unknown end", m.name));
            }
            if mors.insert(m.name.clone(), (m.source.clone(), m.target.clone())).is_some() {
                return bad(format!("duplicate morphism {}", m.name));
            }
        }
        for o in &objects {
            match identities.get(o).and_then(|i| mors.get(i)) {
                Some((s, t)) if s == o && t == o => {}
                _ => return bad(format!("missing identity on {o}")),
            }
        }
        let mut table: BTreeMap<(String, String), String> = BTreeMap::new();
        for c in &compose {
            let (Some(f), Some(g), Some(h)) = (mors.get(&c.first), mors.get(&c.second), mors.get(&c.result))
            else {
                return bad(format!("composition {} then {} names unknown morphisms", c.first, c.second));
            };
            if f.1 != g.0 || h.0 != f.0 || h.1 != g.1 {
                return bad(format!("composition {} then {} has wrong ends", c.first, c.second));
            }
            if table.insert((c.first.clone(), c.second.clone()), c.result.clone()).is_some() {
                return bad(format!("composition {} then {} given twice", c.first, c.second));
            }
        }
        for (name, (s, t)) in &mors {
            for (pair, want) in [
                ((identities[s].clone(), name.clone()), name),
                ((name.clone(), identities[t].clone()), name),
            ] {
                match table.get(&pair) {
                    Some(h) if h != want => {
                        return bad(format!("identity law fails for {name}"));
                    }
                    Some(_) => {}
                    None => {
                        table.insert(pair, want.clone());
                    }
                }
            }
        }
        for (f, (_, y)) in &mors {
            for (g, (y2, _)) in &mors {
                if y == y2 && !table.contains_key(&(f.clone(), g.clone())) {
                    return bad(format!("composition {f} then {g} is missing"));
                }
            }
        }
        let cat = FiniteCategory {
            objects,
            morphisms: mors,
            identities,
            compose: table,
        };
        for ((f, g), fg) in &cat.compose {
            for h in cat.morphisms.keys() {
                if let Some(gh) = cat.compose.get(&(g.clone(), h.clone())) {
                    let a = &cat.compose[&(fg.clone(), h.clone())];
                    let b = &cat.compose[&(f.clone(), gh.clone())];
                    if a != b {
                        return bad(format!("composition is not associative on {f}, {g}, {h}"));
                    }
                }
            }
        }
        Ok(cat)
    }

    /// One morphism `x>y` for every ordered pair of objects.
    pub fn complete_groupoid(objects: &[&str]) -> Result<FiniteCategory> {
        let name = |a: &str, b: &str| format!("{a}>{b}");
        let mut morphisms = Vec::new();
        let mut compose = Vec::new();
        for a in objects {
            for b in objects {
                morphisms.push(MorphismDecl {
                    name: name(a, b),
                    source: a.to_string(),
                    target: b.to_string(),
                });
                for c in objects {
                    compose.push(CompositionDecl {
                        first: name(a, b),
                        second: name(b, c),
                        result: name(a, c),
                    });
                }
            }
        }
        let identities = objects.iter().map(|a| (a.to_string(), name(a, a))).collect();
        FiniteCategory::new(objects.iter().map(|s| s.to_string()).collect(), morphisms, identities, compose)
    }

    pub fn from_json(text: &str) -> Result<FiniteCategory> {
        let doc: CategoryDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidCategory(format!("json: {e}")))?;
        FiniteCategory::new(doc.objects, doc.morphisms, doc.identities, doc.compose)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn ends(&self, m: &str) -> Option<(&str, &str)> {
        self.morphisms.get(m).map(|(s, t)| (s.as_str(), t.as_str()))
    }

    /// `second ∘ first`, if composable.
    pub fn compose(&self, first: &str, second: &str) -> Option<&str> {
        self.compose.get(&(first.to_string(), second.to_string())).map(String::as_str)
    }

    pub fn composite(&self, chain: &[String]) -> Option<String> {
        let mut acc = chain.first()?.clone();
        for m in &chain[1..] {
            acc = self.compose(&acc, m)?.to_string();
        }
        Some(acc)
    }

    pub fn is_complete_groupoid(&self) -> bool {
        let mut seen = BTreeSet::new();
        for (s, t) in self.morphisms.values() {
            if !seen.insert((s, t)) {
                return false;
            }
        }
        seen.len() == self.objects.len() * self.objects.len()
    }

    pub fn is_identity(&self, m: &str) -> bool {
        self.identities.values().any(|i| i == m)
    }
}

pub struct NerveInstance {
    cat: FiniteCategory,
    goncharov: bool,
}

pub fn chain_key<S: AsRef<str>>(chain: &[S]) -> ClassKey {
    let parts: Vec<&str> = chain.iter().map(|s| s.as_ref()).collect();
    ClassKey::new(format!("[{}]", parts.join("|")))
}

fn parse_chain(key: &ClassKey) -> Option<Vec<String>> {
    let inner = key.as_str().strip_prefix('[')?.strip_suffix(']')?;
    Some(inner.split('|').map(String::from).collect())
}

impl NerveInstance {
    pub fn new(cat: FiniteCategory) -> NerveInstance {
        let goncharov = cat.is_complete_groupoid();
        NerveInstance { cat, goncharov }
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.cat
    }

    fn chain(&self, key: &ClassKey) -> Vec<String> {
        parse_chain(key).expect("checked chain key")
    }

    /// Objects visited by a chain.
    pub fn object_word(&self, key: &ClassKey) -> Option<Vec<String>> {
        let chain = parse_chain(key)?;
        let mut out = vec![self.cat.ends(&chain[0])?.0.to_string()];
        for m in &chain {
            out.push(self.cat.ends(m)?.1.to_string());
        }
        Some(out)
    }
}

impl Instance for NerveInstance {
    fn name(&self) -> String {
        "nerve".into()
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::NonSigma
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        let chain = parse_chain(key).ok_or_else(|| not_generator(self, key, "expected [f|g|...]"))?;
        for m in &chain {
            if self.cat.ends(m).is_none() {
                return Err(not_generator(self, key, format!("unknown morphism {m:?}")));
            }
        }
        for w in chain.windows(2) {
            if self.cat.ends(&w[0]).unwrap().1 != self.cat.ends(&w[1]).unwrap().0 {
                return Err(not_generator(self, key, format!("{} and {} do not compose", w[0], w[1])));
            }
        }
        Ok(())
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        parse_chain(key).is_some_and(|c| c.len() == 1)
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.chain(key).len() - 1
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    /// Cut points between consecutive morphisms; the left factor is the chain of composites.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        for k in keys {
            self.check_generator(k)?;
        }
        let chains: Vec<Vec<String>> = keys.iter().map(|k| self.chain(k)).collect();
        let interior: usize = chains.iter().map(|c| c.len() - 1).sum();
        let mut out = Vec::with_capacity(1 << interior);
        for mask in 0..1u64 << interior {
            let mut bit = 0;
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for c in &chains {
                let mut cuts = vec![0];
                for i in 1..c.len() {
                    if mask >> bit & 1 == 1 {
                        cuts.push(i);
                    }
                    bit += 1;
                }
                cuts.push(c.len());
                let mut composites = Vec::new();
                for w in cuts.windows(2) {
                    let seg = &c[w[0]..w[1]];
                    composites.push(self.cat.composite(seg).expect("composable chain"));
                    right.push(chain_key(seg));
                }
                left.push(chain_key(&composites));
            }
            out.push(Channel {
                left: Word::new(left, Symmetry::NonSigma),
                right: Word::new(right, Symmetry::NonSigma),
                mult: 1,
            });
        }
        Ok(out)
    }

    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<String>> = self.cat.morphisms.keys().map(|m| vec![m.clone()]).collect();
        for _ in 0..=max_degree {
            out.extend(layer.iter().map(|c| chain_key(c)));
            layer = layer
                .into_iter()
                .flat_map(|c| {
                    let end = self.cat.ends(c.last().unwrap()).unwrap().1.to_string();
                    self.cat
                        .morphisms
                        .iter()
                        .filter(move |(_, (s, _))| *s == end)
                        .map(move |(m, _)| {
                            let mut d = c.clone();
                            d.push(m.clone());
                            d
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }

    fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
        self.generators(0)
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        let k = match name {
            "chain" => chain_key(&args.iter().map(|a| a.trim()).collect::<Vec<_>>()),
            "key" => ClassKey::new(args.join(",").trim()),
            _ => return Err(unknown_atom(self, name)),
        };
        self.check_generator(&k)?;
        Ok(Elem::generator(k))
    }

    /// Chains in a complete groupoid are written as the word of objects they visit.
    fn render_key(&self, key: &ClassKey) -> String {
        match (self.goncharov, self.object_word(key)) {
            (true, Some(w)) => format!("({})", w.join(",")),
            _ => key.as_str().to_string(),
        }
    }
}
