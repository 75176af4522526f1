//! Acceptance suite: one line per criterion, exact arithmetic throughout.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use feyncat_core::canon::canonical_key;
use feyncat_core::instances::ckgraph::one_pi_by_betti;
use feyncat_core::instances::joyal::joyal;
use feyncat_core::instances::surj::pi;
use feyncat_core::instances::{
    compositions, instance_by_name, motic_predicate, one_pi_predicate, FiniteCategory, GraphFilter, GraphInstance,
    NerveInstance, INSTANCE_NAMES,
};
use feyncat_core::verify::{verify_axioms, DroppedChannel, VerifyOptions, VerifyReport};
use feyncat_core::{ClassKey, Coeff, Elem, HopfAlgebra, Instance, Ring, Symmetry, Tensor2};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn shipped() -> Vec<(String, Arc<dyn Instance>)> {
    let dir = std::env::temp_dir().join(format!("feyncat-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("two-objects.json");
    std::fs::write(
        &path,
        r#"{"objects":["a","b"],
            "morphisms":[{"name":"1a","source":"a","target":"a"},{"name":"1b","source":"b","target":"b"},
                         {"name":"f","source":"a","target":"b"}],
            "identities":{"a":"1a","b":"1b"}}"#,
    )
    .unwrap();
    let mut names: Vec<String> = INSTANCE_NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(
        ["seq:ab", "surj-ord@angle:ab", "ck-tree-sym@trivial", "ck-graph-core@trivial"]
            .iter()
            .map(|s| s.to_string()),
    );
    names.push(format!("nerve:{}", path.display()));
    let mut out: Vec<(String, Arc<dyn Instance>)> =
        names.into_iter().map(|n| (n.clone(), instance_by_name(&n).unwrap())).collect();
    out.push((
        "nerve(complete groupoid a,b,c)".into(),
        Arc::new(NerveInstance::new(FiniteCategory::complete_groupoid(&["a", "b", "c"]).unwrap())),
    ));
    std::fs::remove_dir_all(dir).unwrap();
    out
}

/// Degree bound used for the property checks of each instance.
fn check_degree(name: &str) -> usize {
    if name.starts_with("ck-graph") || (name.starts_with("ck-tree-planar") && !name.ends_with("amputated")) {
        4
    } else {
        5
    }
}

fn criterion1(all: &[(String, Arc<dyn Instance>)]) -> Outcome {
    for (name, inst) in all {
        let h = HopfAlgebra::new(inst.clone(), Ring::Integer);
        if h.coproduct(&Elem::one()).map_err(|e| e.to_string())? != Tensor2::one() {
            return Err(format!("Δ(1) ≠ 1⊗1 in {name}"));
        }
    }
    Ok(format!("Δ(1) = 1⊗1 in {} instances", all.len()))
}

fn coassociative(h: &HopfAlgebra, gens: &[ClassKey]) -> Result<(), String> {
    gens.par_iter().try_for_each(|k| {
        let d = h.coproduct(&Elem::generator(k.clone())).map_err(|e| e.to_string())?;
        if h.delta_left(&d).map_err(|e| e.to_string())? != h.delta_right(&d).map_err(|e| e.to_string())? {
            return Err(format!("{} in {}", k, h.instance().name()));
        }
        Ok(())
    })
}

fn criterion2() -> Outcome {
    let plan: &[(&str, usize)] = &[
        ("ck-graph-core", 5),
        ("ck-graph-1pi", 5),
        ("ck-graph-motic", 4),
        ("ck-tree-planar", 6),
        ("ck-tree-sym", 6),
        ("ck-tree-planar-amputated", 6),
        ("ck-tree-sym-amputated", 6),
        ("surj-ord", 6),
        ("surj-sym", 6),
        ("joyal", 6),
        ("seq:ab", 6),
        ("surj-ord@angle:ab", 5),
    ];
    let mut total = 0;
    for &(name, d) in plan {
        let h = HopfAlgebra::new(instance_by_name(name).unwrap(), Ring::Integer);
        let gens = h.instance().generators(d);
        total += gens.len();
        coassociative(&h, &gens)?;
    }
    Ok(format!(
        "(Δ⊗id)Δ = (id⊗Δ)Δ on {total} generators (graphs ≤5 edges, trees ≤6 vertices, n ≤ 7)"
    ))
}

fn reports(all: &[(String, Arc<dyn Instance>)]) -> Vec<(String, VerifyReport)> {
    all.iter()
        .map(|(name, inst)| {
            let h = HopfAlgebra::new(inst.clone(), Ring::Rational);
            let opts = VerifyOptions::new(check_degree(name));
            (name.clone(), verify_axioms(&h, &opts).unwrap())
        })
        .collect()
}

fn require(reports: &[(String, VerifyReport)], check: &str) -> Result<usize, String> {
    let mut cases = 0;
    for (name, r) in reports {
        let c = r.check(check).ok_or_else(|| format!("{name} has no {check} check"))?;
        if !c.passed {
            return Err(format!("{name}: {}", c.counterexample.clone().unwrap_or_default()));
        }
        cases += c.cases;
    }
    Ok(cases)
}

fn criterion3(reports: &[(String, VerifyReport)]) -> Outcome {
    let cases = require(reports, "bialgebra")?;
    Ok(format!(
        "Δ(ab) = Δ(a)Δ(b) on {cases} products (200 random pairs plus every (g,1) per instance)"
    ))
}

fn criterion4(reports: &[(String, VerifyReport)], all: &[(String, Arc<dyn Instance>)]) -> Outcome {
    let cases = require(reports, "counit laws")?;
    let skeletal: Vec<(String, VerifyReport)> = reports
        .iter()
        .zip(all)
        .filter(|(_, (_, inst))| inst.symmetry() == Symmetry::NonSigma)
        .map(|(r, _)| r.clone())
        .collect();
    let quot = require(&skeletal, "quotient counit laws")?;
    Ok(format!(
        "ε laws on {cases} words; ε^quot laws over ℚ on {quot} words in {} non-Σ instances",
        skeletal.len()
    ))
}

fn criterion5(reports: &[(String, VerifyReport)]) -> Outcome {
    let cases = require(reports, "antipode")?;
    let mut takeuchi = 0;
    for name in ["surj-ord", "surj-sym", "joyal", "seq:ab", "ck-tree-planar", "ck-tree-sym-amputated", "ck-graph-core", "ck-graph-motic"] {
        let h = HopfAlgebra::new(instance_by_name(name).unwrap(), Ring::Rational);
        for k in h.instance().generators(3) {
            let x = Elem::generator(k.clone());
            let (a, b) = (h.antipode(&x).map_err(|e| e.to_string())?, takeuchi_antipode(&h, &x).map_err(|e| e.to_string())?);
            if a != b {
                return Err(format!("Takeuchi formula differs on {k} in {name}"));
            }
            takeuchi += 1;
        }
    }
    Ok(format!(
        "μ(S⊗id)Δ = μ(id⊗S)Δ = ηε on {cases} words; Takeuchi formula agrees on {takeuchi} generators of degree ≤ 3"
    ))
}

fn criterion6() -> Outcome {
    for name in ["ck-tree-sym", "ck-tree-planar", "ck-tree-sym-amputated", "ck-tree-planar-amputated"] {
        let h = HopfAlgebra::new(instance_by_name(name).unwrap(), Ring::Integer);
        for n in 1..=8 {
            let x = h.instance().parse_atom("ladder", &[n.to_string()]).unwrap();
            let d = h.coproduct(&x).unwrap();
            if d.len() != n + 1 || !d.all_coeffs(Coeff::is_one) {
                return Err(format!("ladder({n}) has {} terms in {name}", d.len()));
            }
        }
    }
    Ok("Δ(ladder(n)) has exactly n+1 terms for n ≤ 8 in all four tree instances".into())
}

fn criterion7() -> Outcome {
    let banana = plain_graph(2, &[(0, 1), (0, 1)], &[1, 1]);
    let oracle = edge_subset_classes(&banana);
    let interior: Vec<_> = oracle
        .iter()
        .filter(|(_, s, _)| s.iter().map(|c| c.num_edges()).sum::<usize>() == 1)
        .collect();
    if interior.len() != 1 || interior[0].2 != 2 {
        return Err("oracle does not find a single interior class of weight 2".into());
    }
    let inst = GraphInstance::new(GraphFilter::Core);
    let h = HopfAlgebra::new(Arc::new(GraphInstance::new(GraphFilter::Core)), Ring::Integer);
    let d = h.coproduct(&Elem::generator(inst.key(&banana))).unwrap();
    let mut found = None;
    for ((l, r), c) in d.iter() {
        let rg: Vec<_> = r.keys().iter().map(|k| (*inst.graph(k).unwrap()).clone()).collect();
        let lg = inst.graph(&l.keys()[0]).unwrap();
        if brute_isomorphic(&lg, &interior[0].0) && same_multiset(&rg, &interior[0].1) {
            found = Some(c.clone());
        }
    }
    match found {
        Some(c) if c == Coeff::from_int(2) => Ok("2-banana interior term has coefficient 2 = edge-subset oracle count".into()),
        other => Err(format!("engine coefficient {other:?}")),
    }
}

fn criterion8() -> Outcome {
    let s = instance_by_name("surj-ord").unwrap();
    let j = instance_by_name("joyal").unwrap();
    for n in 1..=7 {
        let oracle = monotone_surjections(n).len();
        let comps = compositions(n).len();
        let (cs, cj) = (s.channels(&pi(n)).unwrap().len(), j.channels(&joyal(n)).unwrap().len());
        if !(oracle == 1 << (n - 1) && comps == oracle && cs == oracle && cj == oracle) {
            return Err(format!("n = {n}: surjections {cs}, Joyal {cj}, oracle {oracle}"));
        }
    }
    Ok("#channels Δ(π_n) = #channels Δ(1;0^(n-1);1) = 2^(n-1) for n ≤ 7, unit channels included".into())
}

fn criterion9() -> Outcome {
    let mut emitted = 0;
    for filter in [GraphFilter::OnePi, GraphFilter::Motic] {
        let inst = GraphInstance::new(filter);
        for k in inst.generators(5) {
            for c in inst.channels(&k).unwrap() {
                for key in c.left.keys().iter().chain(c.right.keys()) {
                    if !filter.accepts(&inst.graph(key).unwrap()) {
                        return Err(format!("{filter:?}: cofactor {key} of {k}"));
                    }
                }
                emitted += 1;
            }
        }
    }
    let core = GraphInstance::new(GraphFilter::Core);
    let mut compared = 0;
    for k in core.generators(5) {
        let g = core.graph(&k).unwrap();
        if g.flag_decos().iter().any(|d| !d.is_plain()) {
            continue;
        }
        let p = one_pi_by_betti(&g);
        if one_pi_predicate(&g) != p || motic_predicate(&g) != p {
            return Err(format!("predicates disagree on {k}"));
        }
        compared += 1;
    }
    Ok(format!(
        "{emitted} emitted 1-PI/motic channels all satisfy their predicate; motic = 1-PI on {compared} massless graphs ≤5 edges"
    ))
}

fn criterion10() -> Outcome {
    let mut graphs = 0;
    let mut by_key: HashMap<String, Labeled> = HashMap::new();
    let mut by_orbit: HashMap<Labeled, String> = HashMap::new();
    for n in 1..=4 {
        let perms = permutations(n);
        let mut kinds = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u <= v {
                    kinds.push((u, v, Tag::Plain));
                }
                kinds.push((u, v, Tag::Directed));
            }
        }
        let mut extra = Vec::new();
        if n <= 3 {
            for u in 0..n {
                for v in u..n {
                    extra.push((u, v, Tag::Colored));
                    extra.push((u, v, Tag::Massive));
                }
            }
        }
        let all_kinds: Vec<_> = kinds.iter().chain(&extra).copied().collect();
        let tails: Vec<Vec<(usize, bool)>> = vec![vec![], vec![(0, false)], vec![(0, true)], vec![(n - 1, true), (0, false)]];
        for e in 0..=5 {
            for ms in multisets(all_kinds.len(), e) {
                let edges: Vec<_> = ms.iter().map(|&i| all_kinds[i]).collect();
                let tail_options = if e <= 3 { &tails[..] } else { &tails[..1] };
                for t in tail_options {
                    let l = Labeled { n, edges: edges.clone(), tails: t.clone() };
                    let key = canonical_key(&l.to_graph((graphs as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                    let orbit = l.orbit_min(&perms);
                    graphs += 1;
                    if let Some(prev) = by_key.get(&key) {
                        if *prev != orbit {
                            return Err(format!("non-isomorphic graphs share key {key}"));
                        }
                    } else {
                        by_key.insert(key.clone(), orbit.clone());
                    }
                    if let Some(prev) = by_orbit.get(&orbit) {
                        if *prev != key {
                            return Err(format!("isomorphic graphs get keys {prev} and {key}"));
                        }
                    } else {
                        by_orbit.insert(orbit, key);
                    }
                }
            }
        }
    }
    Ok(format!(
        "canonical keys = brute-force isomorphism classes on {graphs} decorated graphs ({} classes, ≤4 vertices, ≤5 edges)",
        by_key.len()
    ))
}

fn criterion11() -> Outcome {
    let cases: &[(&str, ClassKey)] = &[
        ("surj-ord", pi(3)),
        ("joyal", joyal(3)),
        ("ck-tree-sym-amputated", ClassKey::new("(()())")),
        ("ck-graph-core", GraphInstance::new(GraphFilter::Core).key(&plain_graph(2, &[(0, 1), (0, 1)], &[1, 1]))),
    ];
    for (name, victim) in cases {
        let inner = instance_by_name(name).unwrap();
        let h = HopfAlgebra::new(Arc::new(DroppedChannel::new(inner, victim.clone())), Ring::Integer);
        let report = verify_axioms(&h, &VerifyOptions::new(3)).unwrap();
        if report.check("bialgebra").is_none_or(|c| c.passed) {
            return Err(format!("dropping a channel of {victim} in {name} went unnoticed"));
        }
    }
    Ok(format!("dropping one channel makes the bialgebra check fail in {} instances", cases.len()))
}

fn main() -> ExitCode {
    let all = shipped();
    let mut failed = 0;
    let mut report = |n: usize, start: Instant, r: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {n:>2}: PASS  {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {msg} [{secs:.1}s]");
            }
        }
    };
    let t = Instant::now();
    report(1, t, criterion1(&all));
    let t = Instant::now();
    report(2, t, criterion2());
    let t = Instant::now();
    let reps = reports(&all);
    report(3, t, criterion3(&reps));
    let t = Instant::now();
    report(4, t, criterion4(&reps, &all));
    let t = Instant::now();
    report(5, t, criterion5(&reps));
    let t = Instant::now();
    report(6, t, criterion6());
    let t = Instant::now();
    report(7, t, criterion7());
    let t = Instant::now();
    report(8, t, criterion8());
    let t = Instant::now();
    report(9, t, criterion9());
    let t = Instant::now();
    report(10, t, criterion10());
    let t = Instant::now();
    report(11, t, criterion11());
    if failed == 0 {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
