//! Coefficients, class keys, words and sparse linear combinations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff(BigRational);

impl Coeff {
    pub fn zero() -> Self {
        Coeff(BigRational::zero())
    }

    pub fn one() -> Self {
        Coeff(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Coeff(BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coeff(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Coeff {
        Coeff(self.0.abs())
    }

    pub fn recip(&self) -> Result<Coeff> {
        if self.is_zero() {
            return Err(Error::Ring("division by zero".into()));
        }
        Ok(Coeff(self.0.recip()))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Coeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad coefficient {s:?}"));
        match s.split_once('/') {
            None => BigInt::from_str(s)
                .map(|n| Coeff(BigRational::from_integer(n)))
                .map_err(|_| bad()),
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Coeff(BigRational::new(n, d)))
            }
        }
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        Coeff(self.0 + o.0)
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff(&self.0 + &o.0)
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        self.0 += &o.0;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, o: Coeff) -> Coeff {
        Coeff(self.0 - o.0)
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        Coeff(self.0 * o.0)
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff(&self.0 * &o.0)
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(-self.0)
    }
}

/// Coefficient ring of an algebra. Integer mode rejects non-integral coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integer,
    Rational,
}

impl Ring {
    pub fn admits(self, c: &Coeff) -> bool {
        match self {
            Ring::Integer => c.is_integer(),
            Ring::Rational => true,
        }
    }
}

/// Isomorphism class of a basic morphism, stored as its canonical text form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey(Arc<str>);

impl ClassKey {
    pub fn new(s: impl AsRef<str>) -> Self {
        ClassKey(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassKey {
    fn from(s: &str) -> Self {
        ClassKey::new(s)
    }
}

impl From<String> for ClassKey {
    fn from(s: String) -> Self {
        ClassKey::new(s)
    }
}

impl Serialize for ClassKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ClassKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(ClassKey::new(String::deserialize(d)?))
    }
}

/// Whether the monoidal product is symmetric (words are multisets) or not (words are sequences).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    NonSigma,
    Symmetric,
}

/// A monomial: tensor product of generator classes. The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<ClassKey>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn single(k: ClassKey) -> Self {
        Word(vec![k])
    }

    pub fn new(mut keys: Vec<ClassKey>, sym: Symmetry) -> Self {
        if sym == Symmetry::Symmetric {
            keys.sort();
        }
        Word(keys)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> &[ClassKey] {
        &self.0
    }

    pub fn into_keys(self) -> Vec<ClassKey> {
        self.0
    }

    pub fn concat(&self, other: &Word, sym: Symmetry) -> Word {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        match sym {
            Symmetry::NonSigma => {
                let mut v = Vec::with_capacity(self.0.len() + other.0.len());
                v.extend_from_slice(&self.0);
                v.extend_from_slice(&other.0);
                Word(v)
            }
            Symmetry::Symmetric => {
                let mut v = Vec::with_capacity(self.0.len() + other.0.len());
                let (mut i, mut j) = (0, 0);
                while i < self.0.len() && j < other.0.len() {
                    if self.0[i] <= other.0[j] {
                        v.push(self.0[i].clone());
                        i += 1;
                    } else {
                        v.push(other.0[j].clone());
                        j += 1;
                    }
                }
                v.extend_from_slice(&self.0[i..]);
                v.extend_from_slice(&other.0[j..]);
                Word(v)
            }
        }
    }

    pub fn filter(&self, keep: impl Fn(&ClassKey) -> bool) -> Word {
        Word(self.0.iter().filter(|k| keep(k)).cloned().collect())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{k}]")?;
        }
        Ok(())
    }
}

/// Sparse finite linear combination over an ordered basis. Zero terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<B: Ord> {
    terms: BTreeMap<B, Coeff>,
}

impl<B: Ord> Default for LinComb<B> {
    fn default() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }
}

impl<B: Ord + Clone> LinComb<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(b: B, c: Coeff) -> Self {
        let mut x = Self::zero();
        x.add_term(b, c);
        x
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, Coeff::one())
    }

    pub fn add_term(&mut self, b: B, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Coeff) {
        if s.is_zero() {
            return;
        }
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c * s);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut x = self.clone();
        x.add_assign(other);
        x
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut x = self.clone();
        x.add_scaled(other, &Coeff::from_int(-1));
        x
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        let mut x = Self::zero();
        x.add_scaled(self, s);
        x
    }

    pub fn neg(&self) -> Self {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: &B) -> Coeff {
        self.terms.get(b).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&B, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<B, Coeff> {
        self.terms
    }

    /// Linear extension of a basis map.
    pub fn map_basis<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> LinComb<C>) -> LinComb<C> {
        let mut out = LinComb::zero();
        for (b, c) in &self.terms {
            out.add_scaled(&f(b), c);
        }
        out
    }

    pub fn try_map_basis<C: Ord + Clone>(
        &self,
        mut f: impl FnMut(&B) -> Result<LinComb<C>>,
    ) -> Result<LinComb<C>> {
        let mut out = LinComb::zero();
        for (b, c) in &self.terms {
            out.add_scaled(&f(b)?, c);
        }
        Ok(out)
    }

    pub fn all_coeffs(&self, p: impl Fn(&Coeff) -> bool) -> bool {
        self.terms.values().all(p)
    }

    /// First basis element where the two combinations differ, with both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(B, Coeff, Coeff)> {
        let diff = self.minus(other);
        diff.terms
            .into_iter()
            .next()
            .map(|(b, _)| (b.clone(), self.coeff(&b), other.coeff(&b)))
    }
}

impl<B: Ord + Clone> FromIterator<(B, Coeff)> for LinComb<B> {
    fn from_iter<I: IntoIterator<Item = (B, Coeff)>>(iter: I) -> Self {
        let mut x = Self::zero();
        for (b, c) in iter {
            x.add_term(b, c);
        }
        x
    }
}

/// Element of the free algebra on classes.
pub type Elem = LinComb<Word>;
/// Element of the tensor square.
pub type Tensor2 = LinComb<(Word, Word)>;
/// Element of the tensor cube.
pub type Tensor3 = LinComb<(Word, Word, Word)>;

impl Elem {
    pub fn one() -> Elem {
        Elem::basis(Word::unit())
    }

    pub fn scalar(c: Coeff) -> Elem {
        Elem::term(Word::unit(), c)
    }

    pub fn generator(k: ClassKey) -> Elem {
        Elem::basis(Word::single(k))
    }

    /// Product in the free (commutative when symmetric) algebra.
    pub fn mul(&self, other: &Elem, sym: Symmetry) -> Elem {
        let mut out = Elem::zero();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(a.concat(b, sym), ca * cb);
            }
        }
        out
    }

    pub fn scalar_part(&self) -> Coeff {
        self.coeff(&Word::unit())
    }
}

impl Tensor2 {
    pub fn one() -> Tensor2 {
        Tensor2::basis((Word::unit(), Word::unit()))
    }

    pub fn tensor(a: &Elem, b: &Elem) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                out.add_term((x.clone(), y.clone()), cx * cy);
            }
        }
        out
    }

    /// Componentwise product (a⊗b)(c⊗d) = ac⊗bd.
    pub fn mul(&self, other: &Tensor2, sym: Symmetry) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a, b), c1) in self.iter() {
            for ((c, d), c2) in other.iter() {
                out.add_term((a.concat(c, sym), b.concat(d, sym)), c1 * c2);
            }
        }
        out
    }

    pub fn swap(&self) -> Tensor2 {
        self.iter()
            .map(|((a, b), c)| ((b.clone(), a.clone()), c.clone()))
            .collect()
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}
