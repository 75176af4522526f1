//! Decorated instances: generators are pairs of a base generator and a decoration
//! of its source, written `<base key>@<decoration>`.

use std::sync::Arc;

use super::{not_generator, raw_key_atom, surj};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::error::{Error, Result};
use crate::hopf::{Channel, Instance};

pub trait DecorationFunctor: Send + Sync {
    fn name(&self) -> String;

    /// Errors unless the functor is defined on the base instance.
    fn supports(&self, base: &dyn Instance) -> Result<()>;

    /// All decorations of the source of a base generator.
    fn decorations(&self, base: &dyn Instance, key: &ClassKey) -> Vec<String>;

    fn check(&self, base: &dyn Instance, key: &ClassKey, dec: &str) -> Result<()>;

    /// Decorations of the left and right factors of a base channel, aligned with their words.
    fn transport(&self, base: &dyn Instance, channel: &Channel, dec: &str) -> Result<(Vec<String>, Vec<String>)>;
}

/// The one-point decoration.
pub struct TrivialDecoration;

impl DecorationFunctor for TrivialDecoration {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn supports(&self, _base: &dyn Instance) -> Result<()> {
        Ok(())
    }

    fn decorations(&self, _base: &dyn Instance, _key: &ClassKey) -> Vec<String> {
        vec!["*".into()]
    }

    fn check(&self, _base: &dyn Instance, _key: &ClassKey, dec: &str) -> Result<()> {
        if dec == "*" {
            Ok(())
        } else {
            Err(Error::Parse(format!("trivial decoration is *, got {dec:?}")))
        }
    }

    fn transport(&self, _base: &dyn Instance, c: &Channel, _dec: &str) -> Result<(Vec<String>, Vec<String>)> {
        Ok((vec!["*".into(); c.left.len()], vec!["*".into(); c.right.len()]))
    }
}

/// Letters on the angles of ordered surjections: `pi(n)` gets `n+1` letters.
pub struct AngleDecoration {
    alphabet: Vec<String>,
}

impl AngleDecoration {
    pub fn new(mut alphabet: Vec<String>) -> Result<AngleDecoration> {
        if alphabet.is_empty() || alphabet.iter().any(|a| a.is_empty() || a.contains([',', '@', '(', ')'])) {
            return Err(Error::Parse("invalid angle alphabet".into()));
        }
        alphabet.sort();
        alphabet.dedup();
        Ok(AngleDecoration { alphabet })
    }

    fn letters(dec: &str) -> Vec<&str> {
        dec.split(',').collect()
    }
}

impl DecorationFunctor for AngleDecoration {
    fn name(&self) -> String {
        if self.alphabet.iter().all(|a| a.chars().count() == 1) {
            format!("angle:{}", self.alphabet.concat())
        } else {
            format!("angle:{}", self.alphabet.join(","))
        }
    }

    fn supports(&self, base: &dyn Instance) -> Result<()> {
        if base.name() == "surj-ord" {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("angle decoration needs surj-ord, not {}", base.name())))
        }
    }

    fn decorations(&self, _base: &dyn Instance, key: &ClassKey) -> Vec<String> {
        let n = surj::parse_pi(key).unwrap_or(0);
        let mut out: Vec<Vec<&str>> = vec![Vec::new()];
        for _ in 0..=n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.alphabet.iter().map(move |a| {
                        let mut w = w.clone();
                        w.push(a.as_str());
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(|w| w.join(",")).collect()
    }

    fn check(&self, _base: &dyn Instance, key: &ClassKey, dec: &str) -> Result<()> {
        let n = surj::parse_pi(key).ok_or_else(|| Error::Parse(format!("{key} is not a surjection")))?;
        let letters = AngleDecoration::letters(dec);
        if letters.len() != n + 1 || letters.iter().any(|l| !self.alphabet.iter().any(|a| a == l)) {
            return Err(Error::Parse(format!("{dec:?} is not an angle decoration of {key}")));
        }
        Ok(())
    }

    /// Angles of the outer factor are the letters at the cut points; each block keeps its own run.
    fn transport(&self, _base: &dyn Instance, c: &Channel, dec: &str) -> Result<(Vec<String>, Vec<String>)> {
        let letters = AngleDecoration::letters(dec);
        let mut cuts = vec![0];
        for k in c.right.keys() {
            let n = surj::parse_pi(k).ok_or_else(|| Error::Parse(format!("{k} is not a surjection")))?;
            cuts.push(cuts.last().unwrap() + n);
        }
        if *cuts.last().unwrap() + 1 != letters.len() {
            return Err(Error::Parse("decoration does not fit the channel".into()));
        }
        let left = cuts.iter().map(|&i| letters[i]).collect::<Vec<_>>().join(",");
        let right = cuts.windows(2).map(|w| letters[w[0]..=w[1]].join(",")).collect();
        Ok((vec![left], right))
    }
}

pub struct DecoratedInstance {
    base: Arc<dyn Instance>,
    functor: Arc<dyn DecorationFunctor>,
}

impl DecoratedInstance {
    pub fn new(base: Arc<dyn Instance>, functor: Arc<dyn DecorationFunctor>) -> Result<DecoratedInstance> {
        functor.supports(&*base)?;
        Ok(DecoratedInstance { base, functor })
    }

    pub fn base(&self) -> &Arc<dyn Instance> {
        &self.base
    }

    pub fn decorate(key: &ClassKey, dec: &str) -> ClassKey {
        ClassKey::new(format!("{key}@{dec}"))
    }

    /// Splits a decorated key into base key and decoration.
    pub fn split(key: &ClassKey) -> Option<(ClassKey, String)> {
        let (b, d) = key.as_str().rsplit_once('@')?;
        Some((ClassKey::new(b), d.to_string()))
    }

    fn parts(&self, key: &ClassKey) -> (ClassKey, String) {
        DecoratedInstance::split(key).expect("checked decorated key")
    }

    fn decorate_word(&self, w: &Word, decs: &[String]) -> Result<Word> {
        if w.len() != decs.len() {
            return Err(Error::Parse("transport returned the wrong number of decorations".into()));
        }
        let keys = w
            .keys()
            .iter()
            .zip(decs)
            .map(|(k, d)| DecoratedInstance::decorate(k, d))
            .collect();
        Ok(Word::new(keys, self.symmetry()))
    }
}

impl Instance for DecoratedInstance {
    fn name(&self) -> String {
        format!("{}@{}", self.base.name(), self.functor.name())
    }

    fn symmetry(&self) -> Symmetry {
        self.base.symmetry()
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        let (b, d) = DecoratedInstance::split(key).ok_or_else(|| not_generator(self, key, "expected <key>@<decoration>"))?;
        self.base.check_generator(&b)?;
        self.functor
            .check(&*self.base, &b, &d)
            .map_err(|e| not_generator(self, key, e.to_string()))
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        DecoratedInstance::split(key).is_some_and(|(b, _)| self.base.is_identity(&b))
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.base.degree(&self.parts(key).0)
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.check_generator(key)?;
        let (b, d) = self.parts(key);
        self.base
            .channels(&b)?
            .into_iter()
            .map(|c| {
                let (ld, rd) = self.functor.transport(&*self.base, &c, &d)?;
                Ok(Channel {
                    left: self.decorate_word(&c.left, &ld)?,
                    right: self.decorate_word(&c.right, &rd)?,
                    mult: c.mult,
                })
            })
            .collect()
    }

    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        self.base
            .generators(max_degree)
            .into_iter()
            .flat_map(|k| {
                self.functor
                    .decorations(&*self.base, &k)
                    .into_iter()
                    .map(move |d| DecoratedInstance::decorate(&k, &d))
            })
            .collect()
    }

    fn identity_objects(&self, max_size: usize) -> Vec<ClassKey> {
        self.base
            .identity_objects(max_size)
            .into_iter()
            .flat_map(|k| {
                self.functor
                    .decorations(&*self.base, &k)
                    .into_iter()
                    .map(move |d| DecoratedInstance::decorate(&k, &d))
            })
            .collect()
    }

    /// `key(..)` for any decorated key; base atoms when the decoration is unique.
    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        if name == "key" {
            return raw_key_atom(self, args);
        }
        let base = self.base.parse_atom(name, args)?;
        base.try_map_basis(|w| {
            let mut keys = Vec::new();
            for k in w.keys() {
                let decs = self.functor.decorations(&*self.base, k);
                match decs.as_slice() {
                    [d] => keys.push(DecoratedInstance::decorate(k, d)),
                    _ => return Err(Error::Parse(format!("{k} has several decorations; use key({k}@...)"))),
                }
            }
            Ok(Elem::basis(Word::new(keys, self.symmetry())))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::SurjectionInstance;

    #[test]
    fn trivial_decoration_mirrors_the_base() {
        let base: Arc<dyn Instance> = Arc::new(SurjectionInstance::ordered());
        let d = DecoratedInstance::new(base.clone(), Arc::new(TrivialDecoration)).unwrap();
        let k = DecoratedInstance::decorate(&surj::pi(3), "*");
        assert_eq!(d.channels(&k).unwrap().len(), base.channels(&surj::pi(3)).unwrap().len());
        assert_eq!(d.degree(&k), 2);
    }

    #[test]
    fn angle_decoration_transports_letters() {
        let base: Arc<dyn Instance> = Arc::new(SurjectionInstance::ordered());
        let d = DecoratedInstance::new(base, Arc::new(AngleDecoration::new(vec!["a".into(), "b".into()]).unwrap())).unwrap();
        let k = DecoratedInstance::decorate(&surj::pi(2), "a,b,a");
        let ch = d.channels(&k).unwrap();
        assert!(ch
            .iter()
            .any(|c| c.left.to_string() == "[pi(2)@a,b,a]" && c.right.to_string() == "[pi(1)@a,b] [pi(1)@b,a]"));
        assert!(d.check_generator(&DecoratedInstance::decorate(&surj::pi(2), "a,b")).is_err());
    }

    #[test]
    fn angle_decoration_needs_ordered_surjections() {
        let base: Arc<dyn Instance> = Arc::new(SurjectionInstance::symmetric());
        assert!(DecoratedInstance::new(base, Arc::new(AngleDecoration::new(vec!["a".into()]).unwrap())).is_err());
    }
}
