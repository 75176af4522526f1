//! Double-basepoint-preserving injections of intervals, written `(1;0^{n-1};1)`.
//!
//! A word of generators is the injection obtained by gluing basepoints, so the
//! word `(1;0;1) (1;;1)` is the symbol `(1;010;1)` read with the junction marked.

use super::{not_generator, raw_key_atom, unknown_atom, usize_arg};
use crate::algebra::{ClassKey, Elem, Symmetry, Word};
use crate::error::Result;
use crate::hopf::{Channel, Instance};

pub struct JoyalInstance;

pub fn joyal(n: usize) -> ClassKey {
    ClassKey::new(format!("(1;{};1)", "0".repeat(n.saturating_sub(1))))
}

/// The number of gaps `n` of a generator `(1;0^{n-1};1)`.
pub(crate) fn parse_joyal(key: &ClassKey) -> Option<usize> {
    let inner = key.as_str().strip_prefix("(1;")?.strip_suffix(";1)")?;
    inner.bytes().all(|b| b == b'0').then_some(inner.len() + 1)
}

impl JoyalInstance {
    /// Symbol of a word: 1 at both ends and at every junction.
    pub fn symbol(word: &Word) -> String {
        let gaps: Vec<usize> = word.keys().iter().map(|k| parse_joyal(k).expect("joyal key")).collect();
        if gaps.is_empty() {
            return "(1;;1)".into();
        }
        let inner: Vec<String> = gaps.iter().map(|&n| "0".repeat(n - 1)).collect();
        format!("(1;{};1)", inner.join("1"))
    }
}

impl Instance for JoyalInstance {
    fn name(&self) -> String {
        "joyal".into()
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::NonSigma
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        parse_joyal(key)
            .map(|_| ())
            .ok_or_else(|| not_generator(self, key, "expected (1;0...0;1)"))
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        parse_joyal(key) == Some(1)
    }

    fn degree(&self, key: &ClassKey) -> usize {
        parse_joyal(key).expect("checked joyal key") - 1
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    /// Intermediate point sets `S` with `I ⊆ S ⊆ {0..N}`, where `I` are the marked
    /// points of the word. The left factor is `I` inside `S`, the right factor is
    /// `S` inside the whole interval.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        for k in keys {
            self.check_generator(k)?;
        }
        let gaps: Vec<usize> = keys.iter().map(|k| parse_joyal(k).unwrap()).collect();
        let total: usize = gaps.iter().sum();
        let mut marked = vec![false; total + 1];
        let mut free = Vec::new();
        let mut pos = 0;
        marked[0] = true;
        for &g in &gaps {
            free.extend(pos + 1..pos + g);
            pos += g;
            marked[pos] = true;
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0..1u64 << free.len() {
            let mut in_s = marked.clone();
            for (i, &p) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    in_s[p] = true;
                }
            }
            let s: Vec<usize> = (0..=total).filter(|&p| in_s[p]).collect();
            let right: Vec<ClassKey> = s.windows(2).map(|w| joyal(w[1] - w[0])).collect();
            let mut left = Vec::new();
            let mut count = 0;
            for &p in &s[1..] {
                count += 1;
                if marked[p] {
                    left.push(joyal(count));
                    count = 0;
                }
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
        (1..=max_degree + 1).map(joyal).collect()
    }

    fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
        vec![joyal(1)]
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        match name {
            "joyal" => {
                let n = usize_arg(name, args)?;
                let k = joyal(n);
                if n == 0 {
                    return Err(not_generator(self, &k, "joyal(n) needs n >= 1"));
                }
                Ok(Elem::generator(k))
            }
            "key" => raw_key_atom(self, args),
            _ => Err(unknown_atom(self, name)),
        }
    }

    fn render_word(&self, word: &Word) -> String {
        if word.is_unit() {
            return "1".into();
        }
        JoyalInstance::symbol(word)
    }
}
