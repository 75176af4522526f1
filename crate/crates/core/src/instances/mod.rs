//! Concrete instances and lookup by name.

use std::sync::Arc;

use crate::algebra::{ClassKey, Elem};
use crate::error::{Error, Result};
use crate::hopf::Instance;

pub mod ckgraph;
pub mod cktree;
pub mod decorate;
pub mod joyal;
pub mod nerve;
pub mod seq;
pub mod surj;

pub use ckgraph::{motic_predicate, one_pi_predicate, GraphFilter, GraphInstance};
pub use cktree::{amputate, TreeInstance, TreeMode};
pub use decorate::{AngleDecoration, DecoratedInstance, DecorationFunctor, TrivialDecoration};
pub use joyal::JoyalInstance;
pub use nerve::{FiniteCategory, NerveInstance};
pub use seq::SequenceInstance;
pub use surj::SurjectionInstance;

/// Names accepted by [`instance_by_name`] besides the parameterized `seq:` and `nerve:` forms.
pub const INSTANCE_NAMES: &[&str] = &[
    "surj-ord",
    "surj-sym",
    "joyal",
    "ck-tree-planar",
    "ck-tree-sym",
    "ck-tree-planar-amputated",
    "ck-tree-sym-amputated",
    "ck-graph-core",
    "ck-graph-1pi",
    "ck-graph-motic",
];

pub fn instance_by_name(name: &str) -> Result<Arc<dyn Instance>> {
    if let Some((base, deco)) = name.split_once('@') {
        let base = instance_by_name(base)?;
        let functor: Arc<dyn DecorationFunctor> = match deco {
            "trivial" => Arc::new(TrivialDecoration),
            d => match d.strip_prefix("angle:") {
                Some(alpha) => Arc::new(AngleDecoration::new(seq::parse_alphabet(alpha)?)?),
                None => return Err(Error::UnknownInstance(name.to_string())),
            },
        };
        return Ok(Arc::new(DecoratedInstance::new(base, functor)?));
    }
    if let Some(alpha) = name.strip_prefix("seq:") {
        return Ok(Arc::new(SequenceInstance::new(seq::parse_alphabet(alpha)?)?));
    }
    if let Some(path) = name.strip_prefix("nerve:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidCategory(format!("cannot read {path}: {e}")))?;
        return Ok(Arc::new(NerveInstance::new(FiniteCategory::from_json(&text)?)));
    }
    Ok(match name {
        "surj-ord" => Arc::new(SurjectionInstance::ordered()),
        "surj-sym" => Arc::new(SurjectionInstance::symmetric()),
        "joyal" => Arc::new(JoyalInstance),
        "ck-tree-planar" => Arc::new(TreeInstance::new(TreeMode::Planar, false)),
        "ck-tree-sym" => Arc::new(TreeInstance::new(TreeMode::Symmetric, false)),
        "ck-tree-planar-amputated" => Arc::new(TreeInstance::new(TreeMode::Planar, true)),
        "ck-tree-sym-amputated" => Arc::new(TreeInstance::new(TreeMode::Symmetric, true)),
        "ck-graph-core" => Arc::new(GraphInstance::new(GraphFilter::Core)),
        "ck-graph-1pi" => Arc::new(GraphInstance::new(GraphFilter::OnePi)),
        "ck-graph-motic" => Arc::new(GraphInstance::new(GraphFilter::Motic)),
        _ => return Err(Error::UnknownInstance(name.to_string())),
    })
}

pub(crate) fn not_generator(inst: &dyn Instance, key: &ClassKey, reason: impl Into<String>) -> Error {
    Error::NotAGenerator {
        instance: inst.name(),
        key: key.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn unknown_atom(inst: &dyn Instance, name: &str) -> Error {
    Error::Parse(format!("{} has no atom {name}(..)", inst.name()))
}

pub(crate) fn one_arg<'a>(name: &str, args: &'a [String]) -> Result<&'a str> {
    match args {
        [a] => Ok(a.trim()),
        _ => Err(Error::Parse(format!("{name}(..) takes one argument, got {}", args.len()))),
    }
}

pub(crate) fn usize_arg(name: &str, args: &[String]) -> Result<usize> {
    let a = one_arg(name, args)?;
    a.parse()
        .map_err(|_| Error::Parse(format!("{name}(..) needs a nonnegative integer, got {a:?}")))
}

/// Atom `key(<raw>)`, accepted by every instance after checking the key.
pub(crate) fn raw_key_atom(inst: &dyn Instance, args: &[String]) -> Result<Elem> {
    let raw = args.join(",");
    let k = ClassKey::new(raw.trim());
    inst.check_generator(&k)?;
    Ok(Elem::generator(k))
}

/// Compositions of `n` as lists of positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (0..1u64 << (n - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1;
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect()
}

/// Set partitions of `{0..n}` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            go(i + 1, n, cur, if b == max { max + 1 } else { max }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_partition_counts() {
        assert_eq!(compositions(4).len(), 8);
        assert_eq!(compositions(1), vec![vec![1]]);
        let bell: Vec<usize> = (0..7).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn registry_knows_all_names() {
        for name in INSTANCE_NAMES {
            assert_eq!(instance_by_name(name).unwrap().name(), *name);
        }
        assert_eq!(instance_by_name("seq:ab").unwrap().name(), "seq:ab");
        assert!(matches!(instance_by_name("nope"), Err(Error::UnknownInstance(_))));
        assert!(instance_by_name("surj-ord@trivial").is_ok());
    }
}
