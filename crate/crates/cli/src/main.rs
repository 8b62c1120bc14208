//! `nrcs`: command-line front end for the coverability solvers, the ordinal
//! evaluators and the gadget and reduction builders.
//!
//! Exit codes: 0 positive answer, 1 negative answer, 2 inconclusive (cutoff
//! or budget), 64 usage error, 65 bad input data, 66 unreadable input,
//! 73 unwritable output.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nrcs_core::coverability::{
    backward_coverability, forward_explore, verify_certificate, CoverError, Decision,
    ForwardOutcome, Step,
};
use nrcs_core::encoding::{make_hardy_config, EncodingParams};
use nrcs_core::gadgets::{Gadget, GadgetKind};
use nrcs_core::nmwqo::{delta, max_bad_sequence, parse_expr, BadSequenceQuery};
use nrcs_core::nrcs::{parse_nrcs, parse_path, render_nrcs, render_path, Config, Nrcs};
use nrcs_core::ordinal::{cichon_eval, fast_growing_eval, hardy_eval, parse_ordinal, EvalError};
use nrcs_core::reductions::{build_bounded_reduction, parse_minsky};
use nrcs_core::{ControlFunction, Label, Nat, Ordinal};
use serde_json::json;

use report::{Report, WitnessStep};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_CANTCREAT: u8 = 73;

#[derive(Parser)]
#[command(
    name = "nrcs",
    version,
    about = "Nested reset counter systems: coverability, ordinals, gadgets"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the file's target is coverable from its init.
    Cover(CoverArgs),
    /// Evaluate a Hardy, Cichoń or fast-growing function.
    OrdinalEval(EvalArgs),
    /// The derivative set δ_n(α).
    Delta {
        n: u64,
        #[arg(value_name = "ORD")]
        alpha: String,
    },
    /// Longest (g,n)-controlled bad sequence of a nested-multiset nwqo.
    Badseq {
        expr: String,
        #[arg(long, default_value = "2x")]
        control: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        cap: usize,
    },
    /// Build a gadget machine and print or write it.
    Gadget {
        kind: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// The Hardy configuration C_{α,n}.
    Encode {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: u64,
    },
    /// Build a reduction instance.
    Reduce {
        #[command(subcommand)]
        source: ReduceSource,
    },
}

#[derive(Args)]
struct CoverArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Backward)]
    algorithm: Algorithm,
    /// Forward search: largest configuration kept.
    #[arg(long, default_value_t = 8)]
    max_nodes: usize,
    /// Forward search: distinct configurations visited before giving up.
    #[arg(long, default_value_t = 100_000)]
    max_frontier: usize,
    /// Backward search: iterations before giving up.
    #[arg(long, default_value_t = 10_000)]
    iteration_cap: usize,
    /// Include the covering run in the report.
    #[arg(long)]
    witness: bool,
    /// Check a given run instead of searching, e.g. "0@/0 1@/ 2@/".
    #[arg(long, value_name = "RUN", conflicts_with = "algorithm")]
    replay: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Backward,
    Forward,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("hierarchy").required(true).args(["hardy", "cichon", "fg"]))]
struct EvalArgs {
    #[arg(long)]
    hardy: bool,
    #[arg(long)]
    cichon: bool,
    #[arg(long)]
    fg: bool,
    #[arg(value_name = "ORD")]
    alpha: String,
    n: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Base function of the hierarchy.
    #[arg(long, default_value = "succ")]
    control: String,
}

#[derive(Subcommand)]
enum ReduceSource {
    /// Hardy-bounded reduction from a Minsky machine file.
    Minsky {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// A failed invocation: exit code and message for standard error.
struct Failure(u8, String);

fn data(e: impl std::fmt::Display) -> Failure {
    Failure(EX_DATAERR, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EX_NOINPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<String, Failure> {
    fs::write(path, text).map_err(|e| Failure(EX_CANTCREAT, format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

/// `FILE.<suffix>` next to `FILE`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn ordinal(s: &str) -> Result<Ordinal, Failure> {
    parse_ordinal(s).map_err(|e| data(format!("ordinal '{s}': {e}")))
}

fn control(s: &str) -> Result<ControlFunction, Failure> {
    ControlFunction::parse(s).map_err(data)
}

fn witness(n: &Nrcs, init: &Config, run: &[Step]) -> Result<Vec<WitnessStep>, Failure> {
    let trace = n
        .replay(init, run)
        .map_err(|e| data(format!("certificate does not replay: {e}")))?;
    Ok(run
        .iter()
        .enumerate()
        .map(|(i, (t, anchor))| WitnessStep {
            transition: *t,
            anchor: render_path(anchor),
            rule: n.transitions()[*t].to_string(),
            reached: trace[i + 1].to_string(),
        })
        .collect())
}

/// Parses `index@path` items separated by whitespace or commas.
fn parse_run(text: &str) -> Result<Vec<Step>, Failure> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|item| {
            let bad = || Failure(EX_USAGE, format!("run item '{item}' is not index@path"));
            let (t, p) = item.split_once('@').ok_or_else(bad)?;
            Ok((
                t.parse().map_err(|_| bad())?,
                parse_path(p).ok_or_else(bad)?,
            ))
        })
        .collect()
}

fn cover(a: &CoverArgs) -> Result<(Report, u8), Failure> {
    let f = parse_nrcs(&read(&a.file)?).map_err(data)?;
    let init = f.init.ok_or_else(|| data("the file has no init line"))?;
    let target = f
        .target
        .ok_or_else(|| data("the file has no target line"))?;
    let mut r = Report::new("cover");
    if let Some(text) = &a.replay {
        let run = parse_run(text)?;
        r.algorithm = Some("replay".into());
        r.witness = Some(witness(&f.nrcs, &init, &run)?);
        let ok = verify_certificate(&f.nrcs, &init, &target, &run);
        r.decision = Some(
            if ok {
                "coverable"
            } else {
                "not-covered-by-run"
            }
            .into(),
        );
        return Ok((r, if ok { 0 } else { 1 }));
    }
    match a.algorithm {
        Algorithm::Backward => {
            r.algorithm = Some("backward".into());
            match backward_coverability(&f.nrcs, &init, &target, a.iteration_cap) {
                Ok(v) => {
                    r.iterations = Some(v.iterations);
                    r.basis_sizes = Some(v.basis_sizes.clone());
                    r.final_basis =
                        Some(v.basis.elements().iter().map(Config::to_string).collect());
                    let code = match v.decision {
                        Decision::Coverable => {
                            r.decision = Some("coverable".into());
                            if a.witness {
                                let run = v.certificate.as_deref().unwrap_or_default();
                                r.witness = Some(witness(&f.nrcs, &init, run)?);
                            }
                            0
                        }
                        Decision::NotCoverable => {
                            r.decision = Some("not-coverable".into());
                            1
                        }
                    };
                    Ok((r, code))
                }
                Err(CoverError::IterationCap(c)) => {
                    r.decision = Some("unknown".into());
                    r.budget_exhausted = Some(true);
                    r.notes = Some(vec![format!("no fixpoint within {c} iterations")]);
                    Ok((r, 2))
                }
                Err(e) => Err(data(e)),
            }
        }
        Algorithm::Forward => {
            r.algorithm = Some("forward".into());
            match forward_explore(&f.nrcs, &init, a.max_nodes, a.max_frontier, &target) {
                ForwardOutcome::Found { run } => {
                    r.decision = Some("coverable".into());
                    if a.witness {
                        r.witness = Some(witness(&f.nrcs, &init, &run)?);
                    }
                    Ok((r, 0))
                }
                ForwardOutcome::Exhausted {
                    visited,
                    pruned: false,
                } => {
                    r.decision = Some("not-coverable".into());
                    r.visited = Some(visited);
                    Ok((r, 1))
                }
                ForwardOutcome::Exhausted {
                    visited,
                    pruned: true,
                } => {
                    r.decision = Some("unknown".into());
                    r.visited = Some(visited);
                    r.notes = Some(vec![format!(
                        "configurations above {} nodes were skipped",
                        a.max_nodes
                    )]);
                    Ok((r, 2))
                }
                ForwardOutcome::Cutoff { visited } => {
                    r.decision = Some("unknown".into());
                    r.visited = Some(visited);
                    r.notes = Some(vec![format!(
                        "stopped after {} configurations",
                        a.max_frontier
                    )]);
                    Ok((r, 2))
                }
            }
        }
    }
}

fn ordinal_eval(a: &EvalArgs) -> Result<(Report, u8), Failure> {
    let alpha = ordinal(&a.alpha)?;
    let h = control(&a.control)?;
    let x = Nat::from(a.n);
    let (name, res) = if a.hardy {
        ("hardy", hardy_eval(&h, &alpha, x, a.budget))
    } else if a.cichon {
        ("cichon", cichon_eval(&h, &alpha, x, a.budget))
    } else {
        ("fast-growing", fast_growing_eval(&h, &alpha, x, a.budget))
    };
    let mut r = Report::new("ordinal-eval");
    r.algorithm = Some(name.into());
    match res {
        Ok(v) => {
            r.value = Some(json!(v.to_string()));
            r.budget_exhausted = Some(false);
            Ok((r, 0))
        }
        Err(
            EvalError::BudgetExhausted { lower_bound, .. } | EvalError::Overflow { lower_bound },
        ) => {
            r.budget_exhausted = Some(true);
            r.lower_bound = Some(lower_bound.to_string());
            Ok((r, 2))
        }
    }
}

fn run(cli: &Cli) -> Result<(Report, u8), Failure> {
    match &cli.command {
        Command::Cover(a) => cover(a),
        Command::OrdinalEval(a) => ordinal_eval(a),
        Command::Delta { n, alpha } => {
            let set = delta(&ordinal(alpha)?, *n).map_err(data)?;
            let mut r = Report::new("delta");
            r.value = Some(json!(set
                .iter()
                .map(Ordinal::to_string)
                .collect::<Vec<_>>()));
            Ok((r, 0))
        }
        Command::Badseq {
            expr,
            control: g,
            n,
            cap,
        } => {
            if *cap == 0 {
                return Err(Failure(EX_USAGE, "--cap must be at least 1".into()));
            }
            let expr = parse_expr(expr).map_err(data)?;
            let res = max_bad_sequence(&BadSequenceQuery {
                expr,
                control: control(g)?,
                n: *n,
                cap: *cap,
            });
            let mut r = Report::new("badseq");
            r.length = Some(res.length);
            r.cap_hit = Some(res.cap_hit);
            r.value = Some(json!(res
                .witness
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()));
            Ok((r, if res.cap_hit { 2 } else { 0 }))
        }
        Command::Gadget {
            kind,
            k,
            ell,
            output,
        } => {
            let kind: GadgetKind = kind.parse().map_err(|e: String| Failure(EX_USAGE, e))?;
            let p = EncodingParams::new(*k, *ell).map_err(data)?;
            let g = Gadget::build(kind, p).map_err(data)?;
            let text = render_nrcs(g.nrcs(), None, None);
            let mut r = Report::new("gadget");
            r.notes = Some(vec![
                format!(
                    "{} states, {} transitions",
                    g.nrcs().states().len(),
                    g.nrcs().transitions().len()
                ),
                format!("roles: {}", kind.roles().join(" ")),
            ]);
            match output {
                Some(path) => {
                    let manifest = json!({
                        "schema": report::SCHEMA,
                        "kind": kind.name(),
                        "k": k,
                        "ell": ell,
                        "roles": kind.roles(),
                        "start": kind.start_end().0,
                        "end": kind.start_end().1,
                        "states": g.nrcs().states().len(),
                        "transitions": g.nrcs().transitions().len(),
                        "rules": g.rules().keys().collect::<Vec<_>>(),
                    });
                    let m = serde_json::to_string_pretty(&manifest).expect("plain data");
                    r.outputs = Some(vec![
                        write(path, &text)?,
                        write(&sibling(path, ".manifest.json"), &m)?,
                    ]);
                }
                None => r.value = Some(json!(text)),
            }
            Ok((r, 0))
        }
        Command::Encode { alpha, n, k, ell } => {
            let p = EncodingParams::new(*k, *ell).map_err(data)?;
            let c = make_hardy_config(&ordinal(alpha)?, *n, &p).map_err(data)?;
            let mut r = Report::new("encode");
            r.value = Some(json!(c.to_string()));
            Ok((r, 0))
        }
        Command::Reduce {
            source:
                ReduceSource::Minsky {
                    file,
                    k,
                    ell,
                    output,
                },
        } => {
            let m = parse_minsky(&read(file)?).map_err(data)?;
            let q_init: Label = m
                .init
                .ok_or_else(|| data("the Minsky file has no init state"))?;
            let q_f: Label = m
                .target
                .ok_or_else(|| data("the Minsky file has no target state"))?;
            let inst =
                build_bounded_reduction(&m.machine, *k, *ell, &q_init, &q_f).map_err(data)?;
            let text = render_nrcs(&inst.nrcs, Some(&inst.init), Some(&inst.target));
            let prov = serde_json::to_string_pretty(&inst.provenance).expect("plain data");
            let mut r = Report::new("reduce");
            r.notes = Some(vec![
                format!(
                    "{} states, {} transitions",
                    inst.nrcs.states().len(),
                    inst.nrcs.transitions().len()
                ),
                format!("init {}", inst.init),
                format!("target {}", inst.target),
            ]);
            r.outputs = Some(vec![
                write(output, &text)?,
                write(&sibling(output, ".provenance.json"), &prov)?,
            ]);
            Ok((r, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((r, code)) => {
            print!("{}", if cli.json { r.json() + "\n" } else { r.text() });
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("nrcs: {msg}");
            ExitCode::from(code)
        }
    }
}
