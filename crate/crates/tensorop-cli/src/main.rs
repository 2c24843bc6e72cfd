//! Batch front end for the tensorop library.
//!
//! Exit codes: 0 when the command succeeds and every check passes, 1 when a
//! verification check fails, 2 on usage or computation errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tensorop::binodal::{intersect3, Binodal, Intersection};
use tensorop::interchange::{check_terminal_objects, coarse_cells, grothendieck_poset, l_images};
use tensorop::kcomplex;
use tensorop::monoidal_words::{enumerate_words, gens, word_poset};
use tensorop::operad_core::{ass, com, OperadJson, SetOperad};
use tensorop::tensor_calculus::bounded_tensor_classes;
use tensorop::topology::{homology, nerve, FinitePoset};
use tensorop::verify::{self, Bounds};

/// Environment variable capping tree-node bounds for verification runs.
const NODE_CEILING_VAR: &str = "TENSOROP_MAX_NODES";
const DEFAULT_NODE_CEILING: usize = 7;

#[derive(Parser)]
#[command(name = "tensorop", version, about = "Operad tensor products, monoidal word posets and their cell complexes")]
struct Cli {
    /// Worker threads; changes wall time only.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Poset,
    Kcomplex,
    Grothendieck,
    Complex,
}

#[derive(Args)]
struct Params {
    #[arg(long, default_value_t = 2)]
    k: u8,
    #[arg(long)]
    l: Option<u8>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// List the words of M_k(m).
    EnumerateMk(Params),
    /// The poset M_k(m).
    Poset(Params),
    /// The simplicial complex on the abelian words with m generators.
    Kcomplex(Params),
    /// Bounded equivalence classes of the tensor product in one arity.
    TensorClasses {
        /// `ass`, `com` or a path to an operad JSON file.
        #[arg(long, default_value = "ass")]
        a: String,
        #[arg(long, default_value = "ass")]
        b: String,
        /// Use pair `i` of the random corpus instead of `--a` and `--b`.
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Intersects the carriers of two binodal trees on three inputs.
    IntersectBinodal { t1: String, t2: String },
    /// The Grothendieck poset I(k,l)(m).
    Grothendieck(Params),
    /// Coarse cells of I(k,l)(m) with their terminal-object checks.
    CoarseCells(Params),
    /// Integer homology of the nerve of M_k(m), or of I(k,l)(m) when `--l` is given.
    Homology(Params),
    /// Runs a verification suite.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Node bound for the binary axial round trip; caps the other tree bounds.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Writes a structure as JSON or DOT.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        #[command(flatten)]
        params: Params,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    let (text, ok) = match cli.command {
        Command::EnumerateMk(p) => (enumerate_mk(&p)?, true),
        Command::Poset(p) => (export_poset(&p)?, true),
        Command::Kcomplex(p) => (export_kcomplex(&p)?, true),
        Command::TensorClasses { a, b, corpus, arity, nodes, seed, format } => {
            let (a, b) = match corpus {
                Some(i) => verify::corpus(seed, i + 1).pop().expect("nonempty corpus"),
                None => (load_operad(&a)?, load_operad(&b)?),
            };
            let classes = bounded_tensor_classes(&a, &b, arity, nodes)?;
            let text = match format {
                Format::Json => pretty(&serde_json::to_value(&classes)?)?,
                Format::Text => {
                    let mut s = format!(
                        "{} ⊗ {} arity {arity}: {} classes, {} stable\n",
                        a.name(),
                        b.name(),
                        classes.count(),
                        classes.stable_count()
                    );
                    for c in &classes.classes {
                        s.push_str(&format!(
                            "  {} ({} members{})\n",
                            c.representative,
                            c.members,
                            if c.stable { "" } else { ", unstable" }
                        ));
                    }
                    s
                }
                Format::Dot => bail!("tensor classes have no DOT form"),
            };
            (text, true)
        }
        Command::IntersectBinodal { t1, t2 } => {
            let (row, answer) = intersect3(&Binodal::parse(&t1)?, &Binodal::parse(&t2)?)?;
            let answer = match answer {
                Intersection::Tree(t) => t.to_string(),
                Intersection::Empty => "empty".into(),
                Intersection::NotRepresentable => "not representable".into(),
            };
            (format!("{row}: {answer}\n"), true)
        }
        Command::Grothendieck(p) => (export_grothendieck(&p)?, true),
        Command::CoarseCells(p) => (coarse(&p)?, true),
        Command::Homology(p) => (homology_report(&p)?, true),
        Command::Verify { suite, seed, nodes } => {
            let ceiling = node_ceiling()?;
            let mut bounds = Bounds::default();
            if let Some(n) = nodes {
                bounds.axial_nodes = n;
                bounds.law_nodes = n.min(bounds.law_nodes);
                bounds.ternary_axial_nodes = n.min(bounds.ternary_axial_nodes);
                bounds.tensor_nodes = n.min(bounds.tensor_nodes);
                bounds.table = bounds.table.map(|t| t.min(n));
            }
            bounds.check(ceiling)?;
            let report = verify::run_verify(&suite, &bounds, seed)?;
            let ok = report.all_passed();
            (pretty(&serde_json::to_value(&report)?)?, ok)
        }
        Command::Export { kind, params } => {
            let params =
                Params { format: if params.format == Format::Text { Format::Json } else { params.format }, ..params };
            let text = match kind {
                ExportKind::Poset => export_poset(&params)?,
                ExportKind::Kcomplex => export_kcomplex(&params)?,
                ExportKind::Grothendieck => export_grothendieck(&params)?,
                ExportKind::Complex => {
                    if params.format != Format::Json {
                        bail!("complexes are exported as JSON only");
                    }
                    homology_report(&params)?
                }
            };
            (text, true)
        }
    };
    match cli.out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn node_ceiling() -> Result<usize> {
    match std::env::var(NODE_CEILING_VAR) {
        Ok(v) => v.parse().with_context(|| format!("{NODE_CEILING_VAR}={v}")),
        Err(_) => Ok(DEFAULT_NODE_CEILING),
    }
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn load_operad(name: &str) -> Result<SetOperad> {
    match name {
        "ass" => Ok(ass(4)),
        "com" => Ok(com(4)),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let j: OperadJson = serde_json::from_str(&text)?;
            Ok(SetOperad::from_json(&j)?)
        }
    }
}

fn poset_text(p: &FinitePoset, name: &str, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => pretty(&serde_json::to_value(p.to_json())?)?,
        Format::Dot => p.to_dot(name),
        Format::Text => {
            let mut s = format!("{name}: {} objects, {} covers\n", p.len(), p.covers().len());
            for (a, b) in p.covers() {
                s.push_str(&format!("  {} < {}\n", p.names()[a], p.names()[b]));
            }
            s
        }
    })
}

fn enumerate_mk(p: &Params) -> Result<String> {
    let words = enumerate_words(p.k, &gens(p.m), false)?;
    Ok(match p.format {
        Format::Json => pretty(&json!(words.iter().map(|w| w.to_string()).collect::<Vec<_>>()))?,
        Format::Text => words.iter().map(|w| format!("{w}\n")).collect(),
        Format::Dot => bail!("word lists have no DOT form"),
    })
}

fn export_poset(p: &Params) -> Result<String> {
    let (_, poset) = word_poset(p.k, p.m, false)?;
    poset_text(&poset, &format!("M{}({})", p.k, p.m), p.format)
}

fn export_kcomplex(p: &Params) -> Result<String> {
    Ok(match p.format {
        Format::Json => pretty(&serde_json::to_value(kcomplex::report(p.m)?)?)?,
        Format::Dot => kcomplex::one_skeleton_dot(p.m)?,
        Format::Text => {
            let r = kcomplex::report(p.m)?;
            let orbits = kcomplex::top_simplex_orbits(p.m)?.len();
            format!("K({}): f-vector {:?}, {} orbits of maximal simplices\n", p.m, r.f_vector, orbits)
        }
    })
}

fn grothendieck_params(p: &Params) -> Result<(u8, u8, usize)> {
    let l = p.l.ok_or_else(|| anyhow!("--l is required"))?;
    Ok((p.k, l, p.m))
}

fn export_grothendieck(p: &Params) -> Result<String> {
    let (k, l, m) = grothendieck_params(p)?;
    let g = grothendieck_poset(k, l, m)?;
    poset_text(&g.poset, &format!("I({k},{l})({m})"), p.format)
}

fn coarse(p: &Params) -> Result<String> {
    let (k, l, m) = grothendieck_params(p)?;
    let g = grothendieck_poset(k, l, m)?;
    let images = l_images(&g)?;
    let checks = check_terminal_objects(&g, &images)?;
    let cells = coarse_cells(&g, &images)?;
    Ok(match p.format {
        Format::Json => pretty(&serde_json::to_value(&checks)?)?,
        Format::Text => {
            let mut s = String::new();
            for (c, (_, cell)) in checks.iter().zip(&cells) {
                s.push_str(&format!(
                    "{}: {} objects, candidate {} ({})\n",
                    c.gamma,
                    cell.len(),
                    c.candidate,
                    if c.terminal { "terminal" } else { "not terminal" }
                ));
            }
            s
        }
        Format::Dot => bail!("coarse cells have no DOT form"),
    })
}

fn homology_report(p: &Params) -> Result<String> {
    let (name, poset) = match p.l {
        Some(l) => (format!("I({},{l})({})", p.k, p.m), grothendieck_poset(p.k, l, p.m)?.poset),
        None => (format!("M{}({})", p.k, p.m), word_poset(p.k, p.m, false)?.1),
    };
    let chains = nerve(&poset)?;
    let groups = homology(&chains)?;
    Ok(match p.format {
        Format::Json => {
            pretty(&json!({ "name": name, "objects": poset.len(), "f_vector": chains.f_vector(), "homology": groups }))?
        }
        Format::Text => {
            let betti: Vec<usize> = groups.iter().map(|g| g.betti).collect();
            format!("{name}: {} objects, f-vector {:?}, Betti {:?}\n", poset.len(), chains.f_vector(), betti)
        }
        Format::Dot => bail!("homology has no DOT form"),
    })
}
