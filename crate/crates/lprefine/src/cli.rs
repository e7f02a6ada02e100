//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or derivation failure, 2 usage or
//! parse error, 3 executability rejection.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::derivation::{replay, DerivError};
use crate::emit::{check_executable, emit_prolog, render, EmitError};
use crate::laws::{verify_all, VerifyCfg};
use crate::semantics::{cexec, program_env};
use crate::syntax::{parse_derivation, parse_program, pretty_pcommand};
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "lprefine",
    about = "A refinement toolkit for wide-spectrum logic programs",
    version
)]
struct Cli {
    /// Output format: human-readable text or line-oriented machine output.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse a program and check its static invariants.
    Check { program: PathBuf },
    /// Evaluate a named goal and dump its execution binding by binding.
    Eval {
        program: PathBuf,
        #[arg(long)]
        goal: String,
    },
    /// Replay a derivation script against a program.
    Refine { program: PathBuf, script: PathBuf },
    /// Verify the law catalogue by finite enumeration.
    VerifyLaws(VerifyArgs),
    /// Check executability and translate a program to Prolog.
    EmitProlog {
        program: PathBuf,
        /// Write the Prolog unit here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Number of universe variables.
    #[arg(long, default_value_t = 3)]
    vars: usize,
    /// Number of values per variable.
    #[arg(long, default_value_t = 2)]
    vals: i64,
    /// Maximum command depth of the instantiation pool.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Sampling seed; the default keeps runs reproducible.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict verification to these law identifiers.
    #[arg(long = "law")]
    laws: Vec<String>,
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(diag) => {
            eprintln!("error: {}", diag);
            diag_code(&diag)
        }
    }
}

enum Diag {
    Parse(String),
    Io(String),
    Failure(String),
    Rejected(String),
}

impl std::fmt::Display for Diag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diag::Parse(m) | Diag::Io(m) | Diag::Failure(m) | Diag::Rejected(m) => {
                f.write_str(m)
            }
        }
    }
}

fn diag_code(d: &Diag) -> i32 {
    match d {
        Diag::Parse(_) | Diag::Io(_) => 2,
        Diag::Failure(_) => 1,
        Diag::Rejected(_) => 3,
    }
}

fn read(path: &PathBuf) -> Result<String, Diag> {
    fs::read_to_string(path).map_err(|e| Diag::Io(format!("{}: {}", path.display(), e)))
}

fn load_program(path: &PathBuf) -> Result<crate::syntax::ast::Program, Diag> {
    let src = read(path)?;
    parse_program(&src).map_err(|e| Diag::Parse(format!("{}: {}", path.display(), e)))
}

fn run(cli: Cli) -> Result<i32, Diag> {
    match cli.cmd {
        Cmd::Check { program } => {
            let p = load_program(&program)?;
            let u = Universe::from_items(&p.universe)
                .map_err(|e| Diag::Parse(format!("{}: {}", program.display(), e)))?;
            program_env(&u, &p.procs)
                .map_err(|e| Diag::Parse(format!("{}: {}", program.display(), e)))?;
            match cli.format {
                Format::Text => println!(
                    "ok: {} procedure(s), {} goal(s)",
                    p.procs.len(),
                    p.goals.len()
                ),
                Format::Machine => println!("check ok procs={} goals={}", p.procs.len(), p.goals.len()),
            }
            Ok(0)
        }
        Cmd::Eval { program, goal } => {
            let p = load_program(&program)?;
            let u = Universe::from_items(&p.universe)
                .map_err(|e| Diag::Parse(e.to_string()))?;
            let env = program_env(&u, &p.procs).map_err(|e| Diag::Failure(e.to_string()))?;
            let c = p
                .goal(&goal)
                .ok_or_else(|| Diag::Parse(format!("no goal named `{}`", goal)))?;
            let e = cexec(&u, &env, c).map_err(|e| Diag::Failure(e.to_string()))?;
            match cli.format {
                Format::Text => {
                    println!("goal {}:", goal);
                    print!("{}", e.dump(&u));
                }
                Format::Machine => {
                    let mut vals = Vec::new();
                    for idx in 0..e.space.size {
                        e.space.decode_vals(&u, idx, &mut vals);
                        let binding: Vec<String> = e
                            .space
                            .vars
                            .iter()
                            .zip(&vals)
                            .map(|(v, val)| {
                                format!("{}={}", u.var_name(*v), u.display_value(*val))
                            })
                            .collect();
                        println!(
                            "eval {} {} {:?}",
                            goal,
                            binding.join(","),
                            e.status[idx]
                        );
                    }
                }
            }
            Ok(0)
        }
        Cmd::Refine { program, script } => {
            let p = load_program(&program)?;
            let src = read(&script)?;
            let s = parse_derivation(&src)
                .map_err(|e| Diag::Parse(format!("{}: {}", script.display(), e)))?;
            match replay(&s, &p) {
                Ok(report) => {
                    for step in &report.steps {
                        match cli.format {
                            Format::Text => println!(
                                "step {:>2}  {:<22} ok ({} obligation(s))",
                                step.index, step.law, step.obligations
                            ),
                            Format::Machine => {
                                println!("step_{} {} ok", step.index, step.law)
                            }
                        }
                    }
                    if cli.format == Format::Text {
                        println!(
                            "{} verified step(s); result:\n{}",
                            report.steps.len(),
                            pretty_pcommand(&report.final_pcommand)
                        );
                    }
                    Ok(0)
                }
                Err(e) => {
                    if let DerivError::StepFailed { index, law, .. } = &e {
                        println!("step_{} {} failed", index, law);
                    }
                    Err(Diag::Failure(e.to_string()))
                }
            }
        }
        Cmd::VerifyLaws(args) => {
            let cfg = VerifyCfg {
                n_vars: args.vars,
                n_vals: args.vals,
                depth: args.depth,
                seed: args.seed,
                ..VerifyCfg::default()
            };
            let only = if args.laws.is_empty() {
                None
            } else {
                Some(args.laws.as_slice())
            };
            let reports =
                verify_all(&cfg, only).map_err(|e| Diag::Failure(e.to_string()))?;
            let mut failed = 0;
            for r in &reports {
                let status = if r.passed() { "pass" } else { "fail" };
                match cli.format {
                    Format::Text => {
                        println!("{:<28} {:>9} instance(s)  {}", r.id, r.instances, status)
                    }
                    Format::Machine => match &r.counterexample {
                        None => println!("{} {} {}", r.id, status, r.instances),
                        Some(cx) => println!(
                            "{} {} {} {}",
                            r.id,
                            status,
                            r.instances,
                            cx.assignment
                                .iter()
                                .map(|(k, v)| format!("{}={}", k, v))
                                .collect::<Vec<_>>()
                                .join(";")
                        ),
                    },
                }
                if !r.passed() {
                    failed += 1;
                    if cli.format == Format::Text {
                        if let Some(cx) = &r.counterexample {
                            for (k, v) in &cx.assignment {
                                println!("    {} := {}", k, v);
                            }
                            println!("    {}", cx.detail);
                        }
                    }
                }
            }
            if failed > 0 {
                Err(Diag::Failure(format!("{} law(s) failed", failed)))
            } else {
                Ok(0)
            }
        }
        Cmd::EmitProlog { program, out } => {
            let p = load_program(&program)?;
            let report = check_executable(&p);
            if !report.executable() {
                for v in &report.violations {
                    eprintln!(
                        "rejected: {} at {:?}: {}",
                        v.unit,
                        v.path,
                        v.reason.text()
                    );
                }
                return Err(Diag::Rejected("program is not executable".into()));
            }
            let unit = emit_prolog(&p).map_err(|e| match e {
                EmitError::NotExecutable(_) => Diag::Rejected(e.to_string()),
                EmitError::UnorderableDataflow { .. } => Diag::Rejected(e.to_string()),
            })?;
            let text = render(&unit);
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Diag::Io(format!("{}: {}", path.display(), e)))?,
                None => print!("{}", text),
            }
            for (pred, var) in &unit.singleton_warnings {
                eprintln!("warning: singleton variable {} in {}", var, pred);
            }
            Ok(0)
        }
    }
}
