//! Exact axiom checks for an instance up to a degree bound.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{ClassKey, Elem, Ring, Symmetry, Tensor2, Word};
use crate::error::{Error, Result};
use crate::hopf::{Channel, HopfAlgebra, Instance};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub instance: String,
    pub max_degree: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {} up to degree {}", self.instance, self.max_degree)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "  {status} {} ({} cases)", c.name, c.cases)?;
            if let Some(ce) = &c.counterexample {
                writeln!(f, "       counterexample: {ce}")?;
            }
        }
        write!(f, "{}", if self.all_passed() { "all checks passed" } else { "some checks failed" })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub max_degree: usize,
    pub seed: u64,
    pub random_pairs: usize,
    pub identity_word_len: usize,
    /// Largest degree for which antipode and nilpotency are checked.
    pub antipode_degree: usize,
}

impl VerifyOptions {
    pub fn new(max_degree: usize) -> VerifyOptions {
        VerifyOptions {
            max_degree,
            seed: 0,
            random_pairs: 200,
            identity_word_len: 4,
            antipode_degree: max_degree.min(5),
        }
    }
}

/// Thread count from `FEYNCAT_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("FEYNCAT_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

pub fn verify_axioms(h: &HopfAlgebra, opts: &VerifyOptions) -> Result<VerifyReport> {
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(|| run_checks(h, opts)),
        None => run_checks(h, opts),
    }
}

/// Runs `f` on every item in parallel and reports the first failure in input order.
fn check_all<T: Sync>(name: &str, items: &[T], f: impl Fn(&T) -> Option<String> + Sync + Send) -> CheckResult {
    let failure = items
        .par_iter()
        .enumerate()
        .filter_map(|(i, x)| f(x).map(|msg| (i, msg)))
        .min_by_key(|(i, _)| *i)
        .map(|(_, m)| m);
    CheckResult {
        name: name.to_string(),
        passed: failure.is_none(),
        cases: items.len(),
        counterexample: failure,
    }
}

fn err_msg(e: Error) -> Option<String> {
    Some(format!("error: {e}"))
}

fn show_word(inst: &dyn Instance, w: &Word) -> String {
    inst.render_word(w)
}

fn run_checks(h: &HopfAlgebra, opts: &VerifyOptions) -> Result<VerifyReport> {
    let inst = h.instance().clone();
    let sym = h.symmetry();
    let mut gens: Vec<ClassKey> = inst
        .generators(opts.max_degree)
        .into_iter()
        .filter(|k| inst.degree(k) <= opts.max_degree)
        .collect();
    gens.sort_by_cached_key(|k| (inst.degree(k), k.clone()));
    for k in &gens {
        inst.check_generator(k)?;
    }
    let mut checks = Vec::new();

    let unit_ok = h.coproduct(&Elem::one())? == Tensor2::one();
    checks.push(CheckResult {
        name: "unit group-like".into(),
        passed: unit_ok,
        cases: 1,
        counterexample: (!unit_ok).then(|| "Δ(1) ≠ 1⊗1".to_string()),
    });

    let ids = inst.identity_objects(opts.identity_word_len);
    let mut id_words: Vec<Word> = Vec::new();
    let mut layer = vec![Word::unit()];
    for _ in 0..opts.identity_word_len {
        let mut next = Vec::new();
        for w in &layer {
            for k in &ids {
                let v = w.concat(&Word::single(k.clone()), sym);
                if !next.contains(&v) {
                    next.push(v);
                }
            }
        }
        id_words.extend(next.iter().cloned());
        layer = next;
    }
    checks.push(check_all("identities group-like", &id_words, |w| {
        match h.direct_word_coproduct(w) {
            Ok(d) if d == Tensor2::basis((w.clone(), w.clone())) => None,
            Ok(_) => Some(format!("Δ({}) is not {0}⊗{0}", show_word(&*inst, w))),
            Err(e) => err_msg(e),
        }
    }));

    checks.push(check_all("degree additivity", &gens, |k| {
        let chans = match inst.channels(k) {
            Ok(c) => c,
            Err(e) => return err_msg(e),
        };
        chans.iter().find(|c| h.degree(&c.left) + h.degree(&c.right) != inst.degree(k)).map(|c| {
            format!(
                "{}: channel {} ⊗ {} changes degree",
                inst.render_key(k),
                show_word(&*inst, &c.left),
                show_word(&*inst, &c.right)
            )
        })
    }));

    checks.push(check_all("coassociativity", &gens, |k| {
        let d = match h.generator_coproduct(k) {
            Ok(d) => d,
            Err(e) => return err_msg(e),
        };
        let (l, r) = match (h.delta_left(&d), h.delta_right(&d)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return err_msg(e),
        };
        l.first_difference(&r).map(|((a, b, c), x, y)| {
            format!(
                "{}: coefficient of {} ⊗ {} ⊗ {} is {x} vs {y}",
                inst.render_key(k),
                show_word(&*inst, &a),
                show_word(&*inst, &b),
                show_word(&*inst, &c)
            )
        })
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pairs: Vec<(Word, Word)> = gens.iter().map(|k| (Word::single(k.clone()), Word::unit())).collect();
    if !gens.is_empty() {
        for _ in 0..opts.random_pairs {
            let a = gens.choose(&mut rng).unwrap().clone();
            let b = gens.choose(&mut rng).unwrap().clone();
            pairs.push((Word::single(a), Word::single(b)));
        }
    }
    checks.push(check_all("bialgebra", &pairs, |(a, b)| {
        let ab = a.concat(b, sym);
        let direct = match h.direct_word_coproduct(&ab) {
            Ok(d) => d,
            Err(e) => return err_msg(e),
        };
        let prod = match (h.word_coproduct(a), h.word_coproduct(b)) {
            (Ok(x), Ok(y)) => x.mul(&y, sym),
            (Err(e), _) | (_, Err(e)) => return err_msg(e),
        };
        direct.first_difference(&prod).map(|((l, r), x, y)| {
            format!(
                "Δ({}): coefficient of {} ⊗ {} is {x} directly vs {y} from the factors",
                show_word(&*inst, &ab),
                show_word(&*inst, &l),
                show_word(&*inst, &r)
            )
        })
    }));

    let counit_words: Vec<Word> = pairs.iter().map(|(a, b)| a.concat(b, sym)).collect();
    checks.push(check_all("counit laws", &counit_words, |w| {
        let x = Elem::basis(w.clone());
        let d = match h.coproduct(&x) {
            Ok(d) => d,
            Err(e) => return err_msg(e),
        };
        match h.counit_sides(&d, |e| Ok(h.counit(e))) {
            Ok((l, r)) if l == x && r == x => None,
            Ok(_) => Some(format!("counit law fails on {}", show_word(&*inst, w))),
            Err(e) => err_msg(e),
        }
    }));

    if h.ring() == Ring::Rational && inst.has_quotient_data() {
        checks.push(check_all("quotient counit laws", &counit_words, |w| {
            let x = Elem::basis(w.clone());
            let d = match h.coproduct_quot(&x) {
                Ok(d) => d,
                Err(e) => return err_msg(e),
            };
            match h.counit_sides(&d, |e| h.counit_quot(e)) {
                Ok((l, r)) if l == x && r == x => None,
                Ok(_) => Some(format!("quotient counit law fails on {}", show_word(&*inst, w))),
                Err(e) => err_msg(e),
            }
        }));
    }

    checks.push(check_all("comodule left arity", &gens, |k| {
        if inst.is_identity(k) {
            return None;
        }
        match inst.channels(k) {
            Ok(chans) => chans.iter().find(|c| !inst.left_arity_ok(&c.left)).map(|c| {
                format!(
                    "{}: left cofactor {} is not one-comma",
                    inst.render_key(k),
                    show_word(&*inst, &c.left)
                )
            }),
            Err(e) => err_msg(e),
        }
    }));

    let small: Vec<ClassKey> = gens
        .iter()
        .filter(|k| inst.degree(k) <= opts.antipode_degree)
        .cloned()
        .collect();
    let mut words: Vec<Word> = small.iter().map(|k| Word::single(k.clone())).collect();
    words.push(Word::unit());
    for (a, b) in pairs.iter().skip(gens.len()) {
        let w = a.concat(b, sym);
        if h.degree(&w) <= opts.antipode_degree {
            words.push(w);
        }
    }
    checks.push(check_all("antipode", &words, |w| {
        let x = Elem::basis(w.clone());
        let target = Elem::scalar(h.hopf_counit(&x));
        match (h.convolve_left(&x), h.convolve_right(&x)) {
            (Ok(l), Ok(r)) if l == target && r == target => None,
            (Ok(_), Ok(_)) => Some(format!("S * id ≠ ηε on {}", show_word(&*inst, w))),
            (Err(e), _) | (_, Err(e)) => err_msg(e),
        }
    }));

    let nontrivial: Vec<ClassKey> = small.iter().filter(|k| !inst.is_identity(k)).cloned().collect();
    checks.push(check_all("nilpotency", &nontrivial, |k| {
        let d = inst.degree(k);
        match h.iterated_reduced(&Elem::generator(k.clone()), d) {
            Ok(t) if t.is_zero() => None,
            Ok(_) => Some(format!("{} survives {d} reduced coproducts", inst.render_key(k))),
            Err(e) => err_msg(e),
        }
    }));

    if inst.b_plus(&Word::unit()).is_ok() {
        let forests: Vec<Word> = words
            .iter()
            .filter(|w| h.degree(w) < opts.antipode_degree)
            .cloned()
            .collect();
        checks.push(check_all("B+ cocycle", &forests, |w| b_plus_cocycle(h, w)));
    }

    Ok(VerifyReport {
        instance: inst.name(),
        max_degree: opts.max_degree,
        checks,
    })
}

/// Δ B₊(w) = 1 ⊗ B₊(w) + (B₊ ⊗ id) Δ(w).
fn b_plus_cocycle(h: &HopfAlgebra, w: &Word) -> Option<String> {
    let inst = h.instance();
    let run = || -> Result<bool> {
        let x = Elem::basis(w.clone());
        let bx = h.b_plus_apply(&x)?;
        let lhs = h.coproduct(&bx)?;
        let mut rhs = Tensor2::tensor(&Elem::one(), &bx);
        for ((a, b), c) in h.coproduct(&x)?.iter() {
            rhs.add_scaled(&Tensor2::tensor(&h.b_plus_apply(&Elem::basis(a.clone()))?, &Elem::basis(b.clone())), c);
        }
        Ok(lhs == rhs)
    };
    match run() {
        Ok(true) => None,
        Ok(false) => Some(format!("B+ cocycle fails on {}", inst.render_word(w))),
        Err(e) => err_msg(e),
    }
}

/// An instance that forgets one channel of one generator while its direct word
/// enumeration stays intact.
pub struct DroppedChannel {
    inner: Arc<dyn Instance>,
    victim: ClassKey,
}

impl DroppedChannel {
    pub fn new(inner: Arc<dyn Instance>, victim: ClassKey) -> DroppedChannel {
        DroppedChannel { inner, victim }
    }
}

impl Instance for DroppedChannel {
    fn name(&self) -> String {
        format!("{} without one channel", self.inner.name())
    }
    fn symmetry(&self) -> Symmetry {
        self.inner.symmetry()
    }
    fn check_generator(&self, key: &ClassKey) -> Result<()> {
        self.inner.check_generator(key)
    }
    fn is_identity(&self, key: &ClassKey) -> bool {
        self.inner.is_identity(key)
    }
    fn degree(&self, key: &ClassKey) -> usize {
        self.inner.degree(key)
    }
    fn channels(&self, key: &ClassKey) -> Result<Vec<Channel>> {
        let mut c = self.inner.channels(key)?;
        if *key == self.victim {
            c.pop();
        }
        Ok(c)
    }
    fn word_channels(&self, keys: &[ClassKey]) -> Result<Vec<Channel>> {
        self.inner.word_channels(keys)
    }
    fn generators(&self, max_degree: usize) -> Vec<ClassKey> {
        self.inner.generators(max_degree)
    }
    fn identity_objects(&self, max_size: usize) -> Vec<ClassKey> {
        self.inner.identity_objects(max_size)
    }
    fn parse_atom(&self, name: &str, args: &[String]) -> Result<Elem> {
        self.inner.parse_atom(name, args)
    }
}
