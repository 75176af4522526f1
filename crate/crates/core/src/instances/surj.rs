//! Surjections of finite sets: generators `pi(n)`, the surjection onto a point.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use super::{compositions, not_generator, raw_key_atom, set_partitions, unknown_atom, usize_arg};
use crate::algebra::{factorial, ClassKey, Elem, Symmetry, Word};
use crate::error::Result;
use crate::hopf::{Channel, Instance, OrbitChannel};

pub struct SurjectionInstance {
    sym: Symmetry,
}

pub fn pi(n: usize) -> ClassKey {
    ClassKey::new(format!("pi({n})"))
}

pub(crate) fn parse_pi(key: &ClassKey) -> Option<usize> {
    let n: usize = key.as_str().strip_prefix("pi(")?.strip_suffix(')')?.parse().ok()?;
    (n >= 1 && key.as_str() == format!("pi({n})")).then_some(n)
}

impl SurjectionInstance {
    pub fn ordered() -> Self {
        SurjectionInstance { sym: Symmetry::NonSigma }
    }

    pub fn symmetric() -> Self {
        SurjectionInstance { sym: Symmetry::Symmetric }
    }

    fn size(&self, key: &ClassKey) -> usize {
        parse_pi(key).expect("checked surjection key")
    }

    /// Factorizations of one fiber of size `n`: (blocks, block sizes, multiplicity).
    fn fiber_channels(&self, n: usize) -> Vec<(usize, Vec<usize>, u64)> {
        match self.sym {
            Symmetry::NonSigma => compositions(n).into_iter().map(|c| (c.len(), c, 1)).collect(),
            Symmetry::Symmetric => {
                let mut acc: BTreeMap<(usize, Vec<usize>), u64> = BTreeMap::new();
                for rgs in set_partitions(n) {
                    let k = rgs.iter().max().map_or(0, |m| m + 1);
                    let mut sizes = vec![0; k];
                    for b in rgs {
                        sizes[b] += 1;
                    }
                    sizes.sort();
                    *acc.entry((k, sizes)).or_default() += 1;
                }
                acc.into_iter().map(|((k, s), m)| (k, s, m)).collect()
            }
        }
    }
}

impl Instance for SurjectionInstance {
    fn name(&self) -> String {
        match self.sym {
            Symmetry::NonSigma => "surj-ord".into(),
            Symmetry::Symmetric => "surj-sym".into(),
        }
    }

    fn symmetry(&self) -> Symmetry {
        self.sym
    }

    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        parse_pi(key)
            .map(|_| ())
            .ok_or_else(|| not_generator(self, key, "expected pi(n) with n >= 1"))
    }

    fn is_identity(&self, key: &ClassKey) -> bool {
        parse_pi(key) == Some(1)
    }

    fn degree(&self, key: &ClassKey) -> usize {
        self.size(key) - 1
    }

    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        self.word_channels(std::slice::from_ref(key))
    }

    /// Ordered mode: compositions of the total refining the fiber boundaries.
    /// Symmetric mode: set partitions of the total refining the fibers.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        for k in keys {
            self.check_generator(k)?;
        }
        let mut acc: Vec<(Vec<ClassKey>, Vec<ClassKey>, u64)> = vec![(Vec::new(), Vec::new(), 1)];
        for k in keys {
            let fiber = self.fiber_channels(self.size(k));
            let mut next = Vec::with_capacity(acc.len() * fiber.len());
            for (l, r, m) in &acc {
                for (blocks, sizes, fm) in &fiber {
                    let mut l = l.clone();
                    l.push(pi(*blocks));
                    let mut r = r.clone();
                    r.extend(sizes.iter().map(|&s| pi(s)));
                    next.push((l, r, m * fm));
                }
            }
            acc = next;
        }
        Ok(acc
            .into_iter()
            .map(|(l, r, mult)| Channel {
                left: Word::new(l, self.sym),
                right: Word::new(r, self.sym),
                mult,
            })
            .collect())
    }

    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        (1..=max_degree + 1).map(pi).collect()
    }

    fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
        vec![pi(1)]
    }

    /// Symmetric mode: each set partition into k blocks is one orbit of k! concrete
    /// factorizations through an object with k! automorphisms.
    fn orbit_channels(&self, key: &ClassKey) -> Result<Vec<OrbitChannel>> {
        Ok(self
            .channels(key)?
            .into_iter()
            .map(|c| {
                let (orbit, aut) = match self.sym {
                    Symmetry::NonSigma => (BigUint::from(c.mult), BigUint::one()),
                    Symmetry::Symmetric => {
                        let k = factorial(c.right.len());
                        (BigUint::from(c.mult) * &k, k)
                    }
                };
                OrbitChannel {
                    left: c.left,
                    right: c.right,
                    orbit,
                    aut_middle: aut,
                }
            })
            .collect())
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        match name {
            "pi" => {
                let n = usize_arg(name, args)?;
                let k = pi(n);
                self.check_generator(&k)?;
                Ok(Elem::generator(k))
            }
            "key" => raw_key_atom(self, args),
            _ => Err(unknown_atom(self, name)),
        }
    }
}
