//! Sequences `(a0,...,an)` over a finite alphabet: angle-decorated corollas.

use super::{not_generator, unknown_atom};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::error::{Error, Result};
use crate::hopf::{Channel, Instance};

pub struct SequenceInstance {
    alphabet: Vec<String>,
}

/// `"ab"` is the alphabet {a, b}; a comma-separated list gives longer letters.
pub fn parse_alphabet(spec: &str) -> Result<Vec<String>> {
    let letters: Vec<String> = if spec.contains(',') {
        spec.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        spec.chars().map(String::from).collect()
    };
    Ok(letters)
}

pub fn seq_key<S: AsRef<str>>(letters: &[S]) -> ClassKey {
    let parts: Vec<&str> = letters.iter().map(|s| s.as_ref()).collect();
    ClassKey::new(format!("({})", parts.join(",")))
}

pub(crate) fn parse_seq(key: &ClassKey) -> Option<Vec<String>> {
    let inner = key.as_str().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(String::from).collect())
}

impl SequenceInstance {
    pub fn new(mut alphabet: Vec<String>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Parse("sequence alphabet is empty".into()));
        }
        for a in &alphabet {
            if a.is_empty() || a.chars().any(|c| "(),;@[]| ".contains(c)) {
                return Err(Error::Parse(format!("invalid letter {a:?}")));
            }
        }
        alphabet.sort();
        alphabet.dedup();
        Ok(SequenceInstance { alphabet })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn letters(&self, key: &ClassKey) -> Vec<String> {
        parse_seq(key).expect("checked sequence key")
    }
}

impl Instance for SequenceInstance {
    fn name(&self) -> String {
        if self.alphabet.iter().all(|a| a.chars().count() == 1) {
            format!("seq:{}", self.alphabet.concat())
        } else {
            format!("seq:{}", self.alphabet.join(","))
        }
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::NonSigma
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        let letters = parse_seq(key).ok_or_else(|| not_generator(self, key, "expected (a,b,...)"))?;
        if letters.len() < 2 {
            return Err(not_generator(self, key, "a sequence needs at least two entries"));
        }
        if let Some(bad) = letters.iter().find(|l| !self.alphabet.contains(l)) {
            return Err(not_generator(self, key, format!("entry {bad:?} is not in the alphabet")));
        }
        Ok(())
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        parse_seq(key).is_some_and(|l| l.len() == 2)
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.letters(key).len() - 2
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    /// Every subset of interior points across the whole word is a set of cut points.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        for k in keys {
            self.check_generator(k)?;
        }
        let seqs: Vec<Vec<String>> = keys.iter().map(|k| self.letters(k)).collect();
        let interior: usize = seqs.iter().map(|s| s.len() - 2).sum();
        let mut out = Vec::with_capacity(1 << interior);
        for mask in 0..1u64 << interior {
            let mut bit = 0;
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for s in &seqs {
                let n = s.len() - 1;
                let mut cuts = vec![0];
                for i in 1..n {
                    if mask >> bit & 1 == 1 {
                        cuts.push(i);
                    }
                    bit += 1;
                }
                cuts.push(n);
                left.push(seq_key(&cuts.iter().map(|&i| &s[i]).collect::<Vec<_>>()));
                right.extend(cuts.windows(2).map(|w| seq_key(&s[w[0]..=w[1]])));
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
        let mut layer: Vec<Vec<String>> = vec![Vec::new()];
        for len in 1..=max_degree + 2 {
            layer = layer
                .into_iter()
                .flat_map(|s| {
                    self.alphabet.iter().map(move |a| {
                        let mut t = s.clone();
                        t.push(a.clone());
                        t
                    })
                })
                .collect();
            if len >= 2 {
                out.extend(layer.iter().map(|s| seq_key(s)));
            }
        }
        out
    }

    fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
        self.generators(0)
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        match name {
            "seq" | "key" => {
                let k = if name == "seq" {
                    seq_key(&args.iter().map(|a| a.trim()).collect::<Vec<_>>())
                } else {
                    ClassKey::new(args.join(",").trim())
                };
                self.check_generator(&k)?;
                Ok(Elem::generator(k))
            }
            _ => Err(unknown_atom(self, name)),
        }
    }
}
