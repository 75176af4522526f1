//! The instance interface and the generic bialgebra / Hopf machinery on top of it.

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::One;

use crate::algebra::{factorial, ClassKey, Coeff, Elem, LinComb, Ring, Symmetry, Tensor2, Tensor3, Word};
use crate::error::{Error, Result};

/// One factorization channel: `left ⊗ right` with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Channel {
    pub left: Word,
    pub right: Word,
    pub mult: u64,
}

/// A channel seen at the level of concrete morphisms: `orbit` factorizations in
/// the class, each with a middle object of `aut_middle` automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitChannel {
    pub left: Word,
    pub right: Word,
    pub orbit: BigUint,
    pub aut_middle: BigUint,
}

pub trait Instance: Send + Sync {
    fn name(&self) -> String;

    fn symmetry(&self) -> Symmetry;

    /// Errors unless `key` names a generator (or identity class) of the instance.
    fn check_generator(&self, key: &ClassKey) -> Result<()>;

    fn is_identity(&self, key: &ClassKey) -> bool;

    fn degree(&self, key: &ClassKey) -> usize;

    /// Factorizations of a single generator.
    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>>;

    /// Factorizations of a whole word, enumerated directly on the underlying morphism.
    /// Instances override this so that the bialgebra check compares two independent computations.
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        let sym = self.symmetry();
        let mut acc = vec![Channel {
            left: Word::unit(),
            right: Word::unit(),
            mult: 1,
        }];
        for k in keys {
            let chans = self.channels(k)?;
            let mut next = Vec::with_capacity(acc.len() * chans.len());
            for a in &acc {
                for c in &chans {
                    next.push(Channel {
                        left: a.left.concat(&c.left, sym),
                        right: a.right.concat(&c.right, sym),
                        mult: a.mult * c.mult,
                    });
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// All non-identity generators of degree between 1 and `max_degree`, plus degree-0 ones.
    fn generators(&self, max_degree: usize) -> Vec<ClassKey>;

    /// Identity classes whose object has at most `max_size` vertices (or the analogous size).
    fn identity_objects(&self, max_size: usize) -> Vec<ClassKey>;

    fn aut_order(&self, _identity: &ClassKey) -> BigUint {
        BigUint::one()
    }

    fn iso_order(&self, _identity: &ClassKey) -> BigUint {
        BigUint::one()
    }

    /// Whether the quotient counit laws are expected to hold on all words.
    fn has_quotient_data(&self) -> bool {
        self.symmetry() == Symmetry::NonSigma
    }

    fn orbit_channels(&self, key: &ClassKey) -> Result<Vec<OrbitChannel>> {
        Ok(self
            .channels(key)?
            .into_iter()
            .map(|c| OrbitChannel {
                left: c.left,
                right: c.right,
                orbit: BigUint::from(c.mult),
                aut_middle: BigUint::one(),
            })
            .collect())
    }

    fn b_plus(&self, _word: &Word) -> Result<Elem> {
        Err(Error::Unsupported(format!("{} has no B+ operator", self.name())))
    }

    /// Whether a left cofactor of a one-comma generator is again one-comma.
    fn left_arity_ok(&self, left: &Word) -> bool {
        left.len() == 1
    }

    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem>;

    fn render_key(&self, key: &ClassKey) -> String {
        key.as_str().to_string()
    }

    fn render_word(&self, word: &Word) -> String {
        if word.is_unit() {
            return "1".into();
        }
        word.keys()
            .iter()
            .map(|k| self.render_key(k))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub struct HopfAlgebra {
    inst: Arc<dyn Instance>,
    ring: Ring,
    delta_memo: DashMap<ClassKey, Arc<Tensor2>>,
    antipode_memo: DashMap<ClassKey, Arc<Elem>>,
}

impl HopfAlgebra {
    pub fn new(inst: Arc<dyn Instance>, ring: Ring) -> HopfAlgebra {
        HopfAlgebra {
            inst,
            ring,
            delta_memo: DashMap::new(),
            antipode_memo: DashMap::new(),
        }
    }

    pub fn instance(&self) -> &Arc<dyn Instance> {
        &self.inst
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn symmetry(&self) -> Symmetry {
        self.inst.symmetry()
    }

    pub fn check(&self, x: &Elem) -> Result<()> {
        for (w, c) in x.iter() {
            if !self.ring.admits(c) {
                return Err(Error::Ring(format!("coefficient {c} is not an integer")));
            }
            for k in w.keys() {
                self.inst.check_generator(k)?;
            }
        }
        Ok(())
    }

    fn require_rational(&self, op: &str) -> Result<()> {
        match self.ring {
            Ring::Rational => Ok(()),
            Ring::Integer => Err(Error::Ring(format!("{op} needs rational coefficients"))),
        }
    }

    pub fn product(&self, a: &Elem, b: &Elem) -> Elem {
        a.mul(b, self.symmetry())
    }

    pub fn degree(&self, w: &Word) -> usize {
        w.keys().iter().map(|k| self.inst.degree(k)).sum()
    }

    pub fn generator_coproduct(&self, key: &ClassKey) -> Result<Arc<Tensor2>> {
        if let Some(d) = self.delta_memo.get(key) {
            return Ok(d.clone());
        }
        self.inst.check_generator(key)?;
        let mut out = Tensor2::zero();
        for c in self.inst.channels(key)? {
            out.add_term((c.left, c.right), Coeff::from_int(c.mult as i64));
        }
        let out = Arc::new(out);
        self.delta_memo.insert(key.clone(), out.clone());
        Ok(out)
    }

    pub fn word_coproduct(&self, w: &Word) -> Result<Tensor2> {
        let sym = self.symmetry();
        let mut acc = Tensor2::one();
        for k in w.keys() {
            acc = acc.mul(&*self.generator_coproduct(k)?, sym);
        }
        Ok(acc)
    }

    /// Coproduct extended multiplicatively from generators.
    pub fn coproduct(&self, x: &Elem) -> Result<Tensor2> {
        self.check(x)?;
        let mut out = Tensor2::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.word_coproduct(w)?, c);
        }
        Ok(out)
    }

    /// Coproduct of a word computed from the instance's direct enumeration on the whole morphism.
    pub fn direct_word_coproduct(&self, w: &Word) -> Result<Tensor2> {
        let mut out = Tensor2::zero();
        for c in self.inst.word_channels(w.keys())? {
            out.add_term((c.left, c.right), Coeff::from_int(c.mult as i64));
        }
        Ok(out)
    }

    pub fn counit(&self, x: &Elem) -> Coeff {
        let mut s = Coeff::zero();
        for (w, c) in x.iter() {
            if w.keys().iter().all(|k| self.inst.is_identity(k)) {
                s += c;
            }
        }
        s
    }

    /// Replaces every identity class by the unit.
    pub fn hopf_project(&self, x: &Elem) -> Elem {
        x.map_basis(|w| Elem::basis(self.project_word(w)))
    }

    fn project_word(&self, w: &Word) -> Word {
        w.filter(|k| !self.inst.is_identity(k))
    }

    pub fn project_tensor(&self, t: &Tensor2) -> Tensor2 {
        t.map_basis(|(a, b)| Tensor2::basis((self.project_word(a), self.project_word(b))))
    }

    /// Coproduct of the Hopf quotient.
    pub fn hopf_coproduct(&self, x: &Elem) -> Result<Tensor2> {
        Ok(self.project_tensor(&self.coproduct(&self.hopf_project(x))?))
    }

    pub fn reduced_coproduct(&self, x: &Elem) -> Result<Tensor2> {
        let x = self.hopf_project(x);
        let mut aug = x.clone();
        aug.add_term(Word::unit(), -x.scalar_part());
        let one = Elem::one();
        Ok(self
            .hopf_coproduct(&aug)?
            .minus(&Tensor2::tensor(&aug, &one))
            .minus(&Tensor2::tensor(&one, &aug)))
    }

    /// Applies the reduced coproduct `times` times, always to the last factor.
    pub fn iterated_reduced(&self, x: &Elem, times: usize) -> Result<LinComb<Vec<Word>>> {
        let mut acc: LinComb<Vec<Word>> = self
            .hopf_project(x)
            .iter()
            .map(|(w, c)| (vec![w.clone()], c.clone()))
            .collect();
        for _ in 0..times {
            let mut next = LinComb::zero();
            for (ws, c) in acc.iter() {
                let last = ws.last().expect("nonempty tensor");
                let red = self.reduced_coproduct(&Elem::basis(last.clone()))?;
                for ((a, b), d) in red.iter() {
                    let mut v = ws[..ws.len() - 1].to_vec();
                    v.push(a.clone());
                    v.push(b.clone());
                    next.add_term(v, c * d);
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn antipode(&self, x: &Elem) -> Result<Elem> {
        self.check(x)?;
        let x = self.hopf_project(x);
        let mut out = Elem::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.antipode_word(w)?, c);
        }
        Ok(out)
    }

    fn antipode_word(&self, w: &Word) -> Result<Elem> {
        let sym = self.symmetry();
        let mut acc = Elem::one();
        for k in w.keys().iter().rev() {
            acc = acc.mul(&*self.antipode_generator(k)?, sym);
        }
        Ok(acc)
    }

    fn antipode_generator(&self, key: &ClassKey) -> Result<Arc<Elem>> {
        if let Some(s) = self.antipode_memo.get(key) {
            return Ok(s.clone());
        }
        if self.inst.is_identity(key) {
            return Ok(Arc::new(Elem::one()));
        }
        if self.inst.degree(key) == 0 {
            return Err(Error::NotConnected(format!(
                "degree-0 class {key} survives the Hopf quotient"
            )));
        }
        let g = Elem::generator(key.clone());
        let mut s = g.neg();
        let deg = self.inst.degree(key);
        for ((a, b), c) in self.reduced_coproduct(&g)?.iter() {
            if self.degree(a) >= deg {
                return Err(Error::NotConnected(format!(
                    "reduced coproduct of {key} has a left factor of degree {}",
                    self.degree(a)
                )));
            }
            let sa = self.antipode_word(a)?;
            s.add_scaled(&sa.mul(&Elem::basis(b.clone()), self.symmetry()), &-c.clone());
        }
        let s = Arc::new(s);
        self.antipode_memo.insert(key.clone(), s.clone());
        Ok(s)
    }

    /// μ∘(S⊗id)∘Δ on the Hopf quotient.
    pub fn convolve_left(&self, x: &Elem) -> Result<Elem> {
        let mut out = Elem::zero();
        for ((a, b), c) in self.hopf_coproduct(x)?.iter() {
            out.add_scaled(&self.antipode_word(a)?.mul(&Elem::basis(b.clone()), self.symmetry()), c);
        }
        Ok(out)
    }

    /// μ∘(id⊗S)∘Δ on the Hopf quotient.
    pub fn convolve_right(&self, x: &Elem) -> Result<Elem> {
        let mut out = Elem::zero();
        for ((a, b), c) in self.hopf_coproduct(x)?.iter() {
            out.add_scaled(&Elem::basis(a.clone()).mul(&self.antipode_word(b)?, self.symmetry()), c);
        }
        Ok(out)
    }

    /// The counit of the Hopf quotient: the scalar part after projection.
    pub fn hopf_counit(&self, x: &Elem) -> Coeff {
        self.hopf_project(x).scalar_part()
    }

    /// Counit normalized by automorphisms and isomorphisms of identity objects.
    pub fn counit_quot(&self, x: &Elem) -> Result<Coeff> {
        self.require_rational("counit_quot")?;
        let mut s = Coeff::zero();
        for (w, c) in x.iter() {
            if !w.keys().iter().all(|k| self.inst.is_identity(k)) {
                continue;
            }
            let mut denom = BigUint::one();
            for k in w.keys() {
                denom *= self.inst.aut_order(k) * self.inst.iso_order(k);
            }
            if self.symmetry() == Symmetry::Symmetric {
                let mut mult: BTreeMap<&ClassKey, usize> = BTreeMap::new();
                for k in w.keys() {
                    *mult.entry(k).or_default() += 1;
                }
                for &m in mult.values() {
                    denom *= factorial(m);
                }
            }
            s += &(c * &Coeff::from_biguint(&denom).recip()?);
        }
        Ok(s)
    }

    fn orbit_coproduct(&self, x: &Elem, weigh: impl Fn(&OrbitChannel) -> Result<Coeff>) -> Result<Tensor2> {
        self.check(x)?;
        let sym = self.symmetry();
        let mut out = Tensor2::zero();
        for (w, c) in x.iter() {
            let mut acc = Tensor2::one();
            for k in w.keys() {
                let mut d = Tensor2::zero();
                for oc in self.inst.orbit_channels(k)? {
                    let wt = weigh(&oc)?;
                    d.add_term((oc.left, oc.right), wt);
                }
                acc = acc.mul(&d, sym);
            }
            out.add_scaled(&acc, c);
        }
        Ok(out)
    }

    /// Coproduct weighted by 1/|Aut(middle)|, one term per orbit of factorizations.
    pub fn coproduct_red(&self, x: &Elem) -> Result<Tensor2> {
        self.require_rational("coproduct_red")?;
        self.orbit_coproduct(x, |oc| {
            Ok(&Coeff::from_biguint(&oc.orbit) * &Coeff::from_biguint(&oc.aut_middle).recip()?)
        })
    }

    /// Coproduct counting every concrete factorization, the partner of `counit_quot`.
    pub fn coproduct_quot(&self, x: &Elem) -> Result<Tensor2> {
        self.require_rational("coproduct_quot")?;
        self.orbit_coproduct(x, |oc| Ok(Coeff::from_biguint(&oc.orbit)))
    }

    pub fn b_plus_apply(&self, x: &Elem) -> Result<Elem> {
        let mut out = Elem::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.inst.b_plus(w)?, c);
        }
        Ok(out)
    }

    /// (Δ⊗id)Δ
    pub fn delta_left(&self, t: &Tensor2) -> Result<Tensor3> {
        let mut out = Tensor3::zero();
        for ((a, b), c) in t.iter() {
            for ((a1, a2), d) in self.word_coproduct(a)?.iter() {
                out.add_term((a1.clone(), a2.clone(), b.clone()), c * d);
            }
        }
        Ok(out)
    }

    /// (id⊗Δ)Δ
    pub fn delta_right(&self, t: &Tensor2) -> Result<Tensor3> {
        let mut out = Tensor3::zero();
        for ((a, b), c) in t.iter() {
            for ((b1, b2), d) in self.word_coproduct(b)?.iter() {
                out.add_term((a.clone(), b1.clone(), b2.clone()), c * d);
            }
        }
        Ok(out)
    }

    /// (ε⊗id) and (id⊗ε) applied to a tensor.
    pub fn counit_sides(&self, t: &Tensor2, counit: impl Fn(&Elem) -> Result<Coeff>) -> Result<(Elem, Elem)> {
        let (mut l, mut r) = (Elem::zero(), Elem::zero());
        for ((a, b), c) in t.iter() {
            let ea = counit(&Elem::basis(a.clone()))?;
            if !ea.is_zero() {
                l.add_term(b.clone(), c * &ea);
            }
            let eb = counit(&Elem::basis(b.clone()))?;
            if !eb.is_zero() {
                r.add_term(a.clone(), c * &eb);
            }
        }
        Ok((l, r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Divided-power coalgebra on ladders `L0, L1, ...` with `L0` the identity.
    struct Ladders;

    fn l(n: usize) -> ClassKey {
        ClassKey::new(format!("L{n}"))
    }

    impl Instance for Ladders {
        fn name(&self) -> String {
            "ladders".into()
        }
        fn symmetry(&self) -> Symmetry {
            Symmetry::Symmetric
        }
        fn check_generator(&self, key: &ClassKey) -> Result<()> {
            key.as_str()[1..].parse::<usize>().map(|_| ()).map_err(|_| Error::Parse(key.to_string()))
        }
        fn is_identity(&self, key: &ClassKey) -> bool {
            key.as_str() == "L0"
        }
        fn degree(&self, key: &ClassKey) -> usize {
            key.as_str()[1..].parse().unwrap()
        }
        fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
            let n = self.degree(key);
            Ok((0..=n)
                .map(|k| Channel {
                    left: Word::single(l(k)),
                    right: Word::single(l(n - k)),
                    mult: 1,
                })
                .collect())
        }
        fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
            (0..=max_degree).map(l).collect()
        }
        fn identity_objects(&self, _max_size: usize) -> Vec<ClassKey> {
            vec![l(0)]
        }
        fn parse_atom(&self, _name: &str, _args: &[String]) -> Result<Elem> {
            Err(Error::Unsupported("no grammar".into()))
        }
    }

    fn alg(ring: Ring) -> HopfAlgebra {
        HopfAlgebra::new(Arc::new(Ladders), ring)
    }

    #[test]
    fn unit_and_identity_are_group_like() {
        let h = alg(Ring::Integer);
        assert_eq!(h.coproduct(&Elem::one()).unwrap(), Tensor2::one());
        let id = Elem::generator(l(0));
        assert_eq!(h.coproduct(&id).unwrap(), Tensor2::tensor(&id, &id));
    }

    #[test]
    fn reduced_coproduct_of_second_ladder() {
        let h = alg(Ring::Integer);
        let red = h.reduced_coproduct(&Elem::generator(l(2))).unwrap();
        let l1 = Elem::generator(l(1));
        assert_eq!(red, Tensor2::tensor(&l1, &l1));
        assert!(h.reduced_coproduct(&l1).unwrap().is_zero());
    }

    #[test]
    fn antipode_recursion() {
        let h = alg(Ring::Integer);
        let l1 = Elem::generator(l(1));
        let l2 = Elem::generator(l(2));
        assert_eq!(h.antipode(&Elem::one()).unwrap(), Elem::one());
        assert_eq!(h.antipode(&l1).unwrap(), l1.neg());
        let expected = l2.neg().plus(&h.product(&l1, &l1));
        assert_eq!(h.antipode(&l2).unwrap(), expected);
        for n in 1..6 {
            let g = Elem::generator(l(n));
            assert!(h.convolve_left(&g).unwrap().is_zero());
            assert!(h.convolve_right(&g).unwrap().is_zero());
        }
    }

    #[test]
    fn nilpotency_of_reduced_coproduct() {
        let h = alg(Ring::Integer);
        let g = Elem::generator(l(4));
        assert!(!h.iterated_reduced(&g, 3).unwrap().is_zero());
        assert!(h.iterated_reduced(&g, 4).unwrap().is_zero());
    }

    #[test]
    fn coassociativity_and_counit() {
        let h = alg(Ring::Integer);
        let g = Elem::generator(l(5));
        let d = h.coproduct(&g).unwrap();
        assert_eq!(h.delta_left(&d).unwrap(), h.delta_right(&d).unwrap());
        let (left, right) = h.counit_sides(&d, |e| Ok(h.counit(e))).unwrap();
        assert_eq!(left, g);
        assert_eq!(right, g);
    }

    #[test]
    fn quotient_operations_need_rationals() {
        let h = alg(Ring::Integer);
        assert!(matches!(h.counit_quot(&Elem::one()), Err(Error::Ring(_))));
        assert!(matches!(h.coproduct_red(&Elem::one()), Err(Error::Ring(_))));
        let q = alg(Ring::Rational);
        let id2 = Elem::basis(Word::new(vec![l(0), l(0)], Symmetry::Symmetric));
        assert_eq!(q.counit_quot(&id2).unwrap(), Coeff::ratio(1, 2));
        assert!(h.check(&Elem::scalar(Coeff::ratio(1, 2))).is_err());
    }

    #[test]
    fn missing_b_plus_is_reported() {
        let h = alg(Ring::Integer);
        assert!(matches!(h.b_plus_apply(&Elem::one()), Err(Error::Unsupported(_))));
    }
}
