use std::fs;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use feyncat_core::canon::{canonical_graph, canonical_key};
use feyncat_core::expr::parse_input;
use feyncat_core::instances::{amputate, instance_by_name, TreeInstance, TreeMode};
use feyncat_core::render::{render_elem, render_tensor, Format};
use feyncat_core::verify::{verify_axioms, VerifyOptions};
use feyncat_core::{Elem, Error, Graph, HopfAlgebra, Instance, Ring};

const AFTER_HELP: &str = "\
Instances:
  surj-ord, surj-sym          surjections (ordered / symmetric)       pi(n)
  joyal                       Joyal-dual injections                   joyal(n), key((1;0^{2};1))
  seq:<alphabet>              decorated sequences, e.g. seq:ab        seq(a,b,a)
  nerve:<file.json>           nerve of a finite category              chain(f,g)
  ck-tree-planar, ck-tree-sym leaf-labeled rooted trees               ladder(n), corolla(n), tree(<tree>)
  ck-tree-*-amputated         tail-free rooted trees                  ladder(n), corolla(n), tree(<tree>)
  ck-graph-core, ck-graph-1pi, ck-graph-motic
                              Feynman graphs                          graph(<json>), corolla(n)
  <instance>@trivial, surj-ord@angle:<alphabet>
                              decorated instances                     key(<key>@<decoration>)
  Every instance also accepts key(<class key>).

Expressions are sums of products of atoms with rational coefficients,
e.g. '2 ladder(2) - 1/2 ladder(1)*ladder(1) + 1'. An input starting with
'[' is read as element JSON: [{\"word\":[...],\"coeff\":\"p/q\"}].

Exit status: 0 on success, 1 on invalid input, 2 when verify finds a failing check.
FEYNCAT_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "feyncat", version, about = "Hopf algebras of Feynman categories in exact arithmetic", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Instance name
    #[arg(long, short, global = true, default_value = "surj-ord")]
    instance: String,

    #[arg(long, short, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,

    /// Coefficient ring
    #[arg(long, global = true, value_enum, default_value_t = RingArg::Rational)]
    ring: RingArg,

    /// Write the result to a file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Coproduct of an element
    Coproduct { input: String },
    /// Reduced coproduct on the Hopf quotient
    Reduced { input: String },
    /// Antipode on the Hopf quotient
    Antipode { input: String },
    /// Product of one or more elements
    Product {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Checks the bialgebra and Hopf axioms up to a degree
    Verify {
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random generator pairs for the bialgebra check
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Removes the tails of every tree factor
    Amputate { input: String },
    /// Canonical form of a graph given as JSON, or normal form of an element
    Canonical { input: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Latex,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RingArg {
    Integer,
    Rational,
}

enum Outcome {
    Done(String),
    Failed(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (text, code) = match run(&cli) {
        Ok(Outcome::Done(s)) => (s, 0),
        Ok(Outcome::Failed(s)) => (s, 2),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, format!("{text}\n")) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let format = match cli.format {
        OutFormat::Text => Format::Text,
        OutFormat::Latex => Format::Latex,
        OutFormat::Json => Format::Json,
    };
    let ring = match cli.ring {
        RingArg::Integer => Ring::Integer,
        RingArg::Rational => Ring::Rational,
    };
    let inst = instance_by_name(&cli.instance)?;
    let h = HopfAlgebra::new(inst.clone(), ring);
    let parse = |s: &str| -> Result<Elem, Error> {
        let x = parse_input(&*inst, s)?;
        h.check(&x)?;
        Ok(x)
    };
    let elem = |x: &Elem| Outcome::Done(render_elem(&*inst, x, format));
    Ok(match &cli.verb {
        Verb::Coproduct { input } => Outcome::Done(render_tensor(&*inst, &h.coproduct(&parse(input)?)?, format)),
        Verb::Reduced { input } => Outcome::Done(render_tensor(&*inst, &h.reduced_coproduct(&parse(input)?)?, format)),
        Verb::Antipode { input } => elem(&h.antipode(&parse(input)?)?),
        Verb::Product { inputs } => {
            let mut acc = Elem::one();
            for s in inputs {
                acc = h.product(&acc, &parse(s)?);
            }
            elem(&acc)
        }
        Verb::Verify { max_degree, seed, pairs } => {
            let mut opts = VerifyOptions::new(*max_degree);
            opts.seed = *seed;
            opts.random_pairs = *pairs;
            let report = verify_axioms(&h, &opts)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable report"),
                _ => report.to_string(),
            };
            if report.all_passed() {
                Outcome::Done(text)
            } else {
                Outcome::Failed(text)
            }
        }
        Verb::Amputate { input } => {
            let from = tree_instance(&cli.instance)?;
            let to = TreeInstance::new(from.mode(), true);
            elem_with(&to, &amputate(&from, &parse(input)?)?, format)
        }
        Verb::Canonical { input } => {
            if input.trim_start().starts_with('{') {
                let g = Graph::from_json(input)?;
                let key = canonical_key(&g);
                Outcome::Done(match format {
                    Format::Json => serde_json::json!({ "key": key, "graph": canonical_graph(&g).to_json_value() }).to_string(),
                    _ => key,
                })
            } else {
                elem(&parse(input)?)
            }
        }
    })
}

fn elem_with(inst: &dyn Instance, x: &Elem, format: Format) -> Outcome {
    Outcome::Done(render_elem(inst, x, format))
}

fn tree_instance(name: &str) -> Result<Arc<TreeInstance>, Error> {
    match name {
        "ck-tree-planar" => Ok(Arc::new(TreeInstance::new(TreeMode::Planar, false))),
        "ck-tree-sym" => Ok(Arc::new(TreeInstance::new(TreeMode::Symmetric, false))),
        _ => Err(Error::Unsupported(format!(
            "amputate needs ck-tree-planar or ck-tree-sym, not {name}"
        ))),
    }
}
