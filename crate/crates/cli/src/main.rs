//! Batch verification, transforms, nest mining and export for ZH and
//! scalable ZH diagrams.
//!
//! Exit codes: 0 when everything passes, 1 when any check fails, 2 on usage
//! or input errors.

mod checks;
mod config;
mod dot;

use clap::{Parser, Subcommand};
use config::{OutputFormat, RunConfig};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use szh_core::diagram::Diagram;
use szh_core::nests::{fourier_diagram, mobius_diagram};
use szh_core::nests::{mine_nests, verify_nest, MiningLattice, NestSpec};
use szh_core::scalable::ScalableDiagram;
use szh_core::semantics::semantics_with_limit;
use szh_core::transforms::{
    binomial_transform, fourier, fourier_from_mobius, invert_binomial, invert_fourier,
    invert_kravchuk, invert_mobius, kravchuk_transform, mobius, mobius_from_fourier, vacuum_scalar,
    PhaseFunction, SymmetricPhaseFunction,
};

#[derive(Parser)]
#[command(name = "szh", version, about = "ZH and scalable ZH diagram toolkit")]
struct Cli {
    /// absolute tolerance for oracle comparisons
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// contraction limit in wire indices
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// seed for randomized sweeps
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// emit machine-readable JSON reports
    #[arg(long, global = true)]
    json: bool,
    /// key=value config file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a diagram file and print its tensor
    Eval {
        file: PathBuf,
        /// the file holds a scalable diagram; strip before evaluating
        #[arg(long)]
        scalable: bool,
    },
    /// Verify a named rule, identity or law sweep
    Check {
        /// rule or target name; see `szh list`
        name: String,
        /// number of randomized instances where applicable
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        /// family size bound where applicable
        #[arg(long)]
        size: Option<usize>,
    },
    /// Apply a boolean-function transform to a phase function file
    Transform {
        /// fourier | mobius | invert-fourier | invert-mobius |
        /// mobius-from-fourier | fourier-from-mobius | vacuum |
        /// kravchuk | binomial | invert-kravchuk | invert-binomial
        which: String,
        file: PathBuf,
        /// emit the diagram realising diag(f) instead of the value table
        /// (fourier and mobius only)
        #[arg(long)]
        diagram: bool,
    },
    /// Mine symmetric spider-nest identities over a phase lattice
    Mine {
        /// wire count
        n: usize,
        /// phase denominator: exponents range over pi * j / den
        #[arg(long, default_value_t = 16)]
        den: u32,
        /// comma-separated phase-gadget support weights, e.g. 1,2,3,5
        #[arg(long)]
        weights: Option<String>,
        /// comma-separated hyper-edge support weights
        #[arg(long)]
        edge_weights: Option<String>,
        /// cap on enumerated assignments
        #[arg(long, default_value_t = 1 << 22)]
        cap: u64,
    },
    /// Spider-nest subcommands
    Nest {
        #[command(subcommand)]
        cmd: NestCommand,
    },
    /// Export a diagram file as DOT
    Export {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        scalable: bool,
    },
    /// List the registered rules, laws and checks
    List,
}

#[derive(Subcommand)]
enum NestCommand {
    /// Verify a nest specification file with the exact prover
    Verify { file: PathBuf },
    /// Alias of the top-level mine command
    Mine {
        n: usize,
        #[arg(long, default_value_t = 16)]
        den: u32,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        edge_weights: Option<String>,
        #[arg(long, default_value_t = 1 << 22)]
        cap: u64,
    },
}

enum Outcome {
    AllPass,
    SomeFail,
}

fn fail(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

#[derive(Serialize)]
struct CheckReport<'a> {
    command: &'a str,
    name: &'a str,
    seed: u64,
    tolerance: f64,
    pass: bool,
    results: &'a [checks::CaseResult],
}

fn run(cli: Cli) -> Result<Outcome, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    if let Some(t) = cli.tol {
        cfg.tolerance = t;
    }
    if let Some(l) = cli.limit {
        cfg.contraction_limit = l;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.json {
        cfg.format = OutputFormat::Json;
    }
    cfg.validate()?;

    match cli.command {
        Command::Eval { file, scalable } => {
            let text = std::fs::read_to_string(&file).map_err(fail)?;
            let diagram = if scalable {
                let s = ScalableDiagram::from_json(&text).map_err(fail)?;
                szh_core::scalable::strip(&s).map_err(fail)?
            } else {
                Diagram::from_json(&text).map_err(fail)?
            };
            let tensor = semantics_with_limit(&diagram, cfg.contraction_limit).map_err(fail)?;
            match cfg.format {
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct TensorRepr {
                        out_arity: usize,
                        in_arity: usize,
                        entries: Vec<[f64; 2]>,
                    }
                    let entries = tensor.entries().iter().map(|c| [c.re, c.im]).collect();
                    let repr = TensorRepr {
                        out_arity: tensor.out_arity(),
                        in_arity: tensor.in_arity(),
                        entries,
                    };
                    println!("{}", serde_json::to_string(&repr).map_err(fail)?);
                }
                OutputFormat::Text => {
                    println!("{} -> {} wires", tensor.in_arity(), tensor.out_arity());
                    for r in 0..tensor.rows() {
                        let row: Vec<String> = (0..tensor.cols())
                            .map(|c| {
                                let v = tensor.get(r, c);
                                format!("{:+.6}{:+.6}i", v.re, v.im)
                            })
                            .collect();
                        println!("  [{}]", row.join(", "));
                    }
                }
            }
            Ok(Outcome::AllPass)
        }
        Command::Check { name, seeds, size } => {
            let results = checks::run_check(&name, &cfg, seeds, size).map_err(fail)?;
            let pass = results.iter().all(|r| r.pass);
            match cfg.format {
                OutputFormat::Json => {
                    let report = CheckReport {
                        command: "check",
                        name: &name,
                        seed: cfg.seed,
                        tolerance: cfg.tolerance,
                        pass,
                        results: &results,
                    };
                    println!("{}", serde_json::to_string(&report).map_err(fail)?);
                }
                OutputFormat::Text => {
                    for r in &results {
                        let status = if r.pass { "pass" } else { "FAIL" };
                        match r.max_diff {
                            Some(d) => println!("{status}  {} (max diff {d:.3e})", r.case),
                            None => println!("{status}  {}", r.case),
                        }
                    }
                    println!(
                        "{}: {}/{} instances pass",
                        name,
                        results.iter().filter(|r| r.pass).count(),
                        results.len()
                    );
                }
            }
            Ok(if pass {
                Outcome::AllPass
            } else {
                Outcome::SomeFail
            })
        }
        Command::Transform {
            which,
            file,
            diagram,
        } => {
            let text = std::fs::read_to_string(&file).map_err(fail)?;
            transform_cmd(&which, &text, diagram, &cfg)
        }
        Command::Mine {
            n,
            den,
            weights,
            edge_weights,
            cap,
        }
        | Command::Nest {
            cmd:
                NestCommand::Mine {
                    n,
                    den,
                    weights,
                    edge_weights,
                    cap,
                },
        } => {
            let gadget_weights = parse_weights(weights.as_deref(), n)?;
            let edge_weights = match edge_weights.as_deref() {
                None => Vec::new(),
                some => parse_weights(some, n)?,
            };
            let lattice = MiningLattice {
                denominator: den,
                weights: gadget_weights,
                edge_weights,
                cap,
            };
            let found = mine_nests(n, &lattice).map_err(fail)?;
            match cfg.format {
                OutputFormat::Json => println!("{}", serde_json::to_string(&found).map_err(fail)?),
                OutputFormat::Text => {
                    println!("{} identities on {n} wires (pi/{den} lattice)", found.len());
                    for spec in &found {
                        let mut per_w: std::collections::BTreeMap<(u8, u32), String> =
                            Default::default();
                        for t in &spec.terms {
                            let tag = match t.kind {
                                szh_core::nests::GadgetKind::PhaseGadget => 0,
                                szh_core::nests::GadgetKind::HyperEdge => 1,
                            };
                            per_w
                                .entry((tag, t.support.count_ones()))
                                .or_insert_with(|| theta_str(&t.lambda));
                        }
                        let desc: Vec<String> = per_w
                            .iter()
                            .map(|((tag, w), th)| {
                                let kind = if *tag == 0 { "g" } else { "e" };
                                format!("{kind}{w}:{th}")
                            })
                            .collect();
                        println!("  {} terms  [{}]", spec.terms.len(), desc.join(" "));
                    }
                }
            }
            Ok(Outcome::AllPass)
        }
        Command::Nest {
            cmd: NestCommand::Verify { file },
        } => {
            let text = std::fs::read_to_string(&file).map_err(fail)?;
            let spec: NestSpec = serde_json::from_str(&text).map_err(fail)?;
            let report = verify_nest(&spec).map_err(fail)?;
            match cfg.format {
                OutputFormat::Json => println!("{}", serde_json::to_string(&report).map_err(fail)?),
                OutputFormat::Text => {
                    println!(
                        "identity: {}  scalar: {}  terms: {}",
                        report.identity,
                        theta_str(&report.scalar),
                        report.term_count
                    );
                    if let Some(w) = report.witness {
                        println!("witness: {w}");
                    }
                }
            }
            Ok(if report.identity {
                Outcome::AllPass
            } else {
                Outcome::SomeFail
            })
        }
        Command::Export {
            file,
            output,
            scalable,
        } => {
            let text = std::fs::read_to_string(&file).map_err(fail)?;
            let rendered = if scalable {
                dot::scalable_to_dot(&ScalableDiagram::from_json(&text).map_err(fail)?)
            } else {
                dot::diagram_to_dot(&Diagram::from_json(&text).map_err(fail)?)
            };
            match output {
                Some(path) => std::fs::write(&path, rendered).map_err(fail)?,
                None => print!("{rendered}"),
            }
            Ok(Outcome::AllPass)
        }
        Command::List => {
            println!("rules: {}", szh_core::rules::RULE_NAMES.join(", "));
            let laws: Vec<&str> = szh_core::scalable::ArrowLaw::ALL
                .iter()
                .map(|l| l.name())
                .collect();
            println!("arrow laws: {}", laws.join(", "));
            println!("checks: {}", checks::check_names().join(", "));
            println!(
                "transforms: fourier, mobius, invert-fourier, invert-mobius, \
                 mobius-from-fourier, fourier-from-mobius, vacuum, kravchuk, binomial, \
                 invert-kravchuk, invert-binomial"
            );
            Ok(Outcome::AllPass)
        }
    }
}

fn parse_weights(spec: Option<&str>, n: usize) -> Result<Vec<usize>, String> {
    match spec {
        None => Ok(vec![1, 2, 3.min(n), n]
            .into_iter()
            .filter(|w| *w >= 1)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()),
        Some(s) => s
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad weight `{w}`"))
            })
            .collect(),
    }
}

fn theta_str(p: &szh_core::PhaseElement) -> String {
    match p.canonical_theta() {
        Some(t) => format!("exp(i pi {t})"),
        None => format!("{:?}", p.value()),
    }
}

#[derive(Serialize)]
struct TransformReport {
    command: &'static str,
    which: String,
    exact: bool,
    /// true when every output came from exact rational arithmetic on the
    /// canonical branch; false marks principal-branch complex powers
    canonical_branch: bool,
    values: serde_json::Value,
}

fn transform_cmd(
    which: &str,
    text: &str,
    as_diagram: bool,
    cfg: &RunConfig,
) -> Result<Outcome, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(fail)?;
    let symmetric = value.is_array();

    if as_diagram {
        if symmetric {
            return Err("diagram output needs a general phase function".into());
        }
        let f: PhaseFunction = serde_json::from_value(value).map_err(fail)?;
        let d = match which {
            "fourier" => fourier_diagram(&f),
            "mobius" => mobius_diagram(&f),
            other => return Err(format!("no diagram form for `{other}`")),
        };
        println!("{}", d.to_json());
        return Ok(Outcome::AllPass);
    }

    let (exact, out_values): (bool, serde_json::Value) = if symmetric {
        let values: Vec<szh_core::PhaseElement> = serde_json::from_value(value).map_err(fail)?;
        let n = values.len().saturating_sub(1);
        let f = SymmetricPhaseFunction::new(n, values).map_err(fail)?;
        let g = match which {
            "kravchuk" => kravchuk_transform(&f),
            "binomial" => binomial_transform(&f),
            "invert-kravchuk" => invert_kravchuk(&f),
            "invert-binomial" => invert_binomial(&f),
            other => return Err(format!("`{other}` does not apply to symmetric input")),
        };
        (
            g.is_exact(),
            serde_json::to_value(g.values()).map_err(fail)?,
        )
    } else {
        let f: PhaseFunction = serde_json::from_value(value).map_err(fail)?;
        match which {
            "vacuum" => {
                let v = vacuum_scalar(&fourier(&f));
                let exact = v.is_exact();
                (exact, serde_json::to_value(vec![v]).map_err(fail)?)
            }
            _ => {
                let g = match which {
                    "fourier" => fourier(&f),
                    "mobius" => mobius(&f),
                    "invert-fourier" => invert_fourier(&f, f.value(0)),
                    "invert-mobius" => invert_mobius(&f),
                    "mobius-from-fourier" => mobius_from_fourier(&f),
                    "fourier-from-mobius" => fourier_from_mobius(&f),
                    other => return Err(format!("unknown transform `{other}`")),
                };
                (
                    g.is_exact(),
                    serde_json::to_value(g.values()).map_err(fail)?,
                )
            }
        }
    };

    match cfg.format {
        OutputFormat::Json => {
            let report = TransformReport {
                command: "transform",
                which: which.to_string(),
                exact,
                canonical_branch: exact,
                values: out_values,
            };
            println!("{}", serde_json::to_string(&report).map_err(fail)?);
        }
        OutputFormat::Text => {
            let values: Vec<szh_core::PhaseElement> =
                serde_json::from_value(out_values).map_err(fail)?;
            println!(
                "{} ({})",
                which,
                if exact {
                    "canonical branch"
                } else {
                    "principal branch"
                }
            );
            for (i, v) in values.iter().enumerate() {
                let c = v.value();
                println!("  {i:3}  {}  ({:+.6}{:+.6}i)", theta_str(v), c.re, c.im);
            }
        }
    }
    Ok(Outcome::AllPass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::AllPass) => ExitCode::SUCCESS,
        Ok(Outcome::SomeFail) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
