//! Command-line front end: `flowbrace <command> ...`.
//!
//! Exit codes: 0 success, 2 violations found, 64 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use flowbrace::brace::{brace_to_prelie, flow_brace, Brace, CheckMode, CheckReport};
use flowbrace::classify::{self, RecordPolicy, SweepMode, SweepOptions};
use flowbrace::filtration::{chain, check_index_bounds, ChainKind};
use flowbrace::io::{self, RunReport};
use flowbrace::ybe::{build_solution, check_involutive, check_nondegenerate, verify_ybe};
use flowbrace::{fixtures, Error, PreLieAlgebra, PrimeField};

const EXIT_OK: u8 = 0;
const EXIT_VIOLATIONS: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "flowbrace",
    version,
    about = "Pre-Lie algebras, flow braces and Yang-Baxter solutions over F_p"
)]
struct Cli {
    /// Also write a JSON run report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Strong,
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Records {
    All,
    Representatives,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Ex31,
    Dim2,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Exhaustive over all triples, or seeded samples.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the pre-Lie identity on all basis triples.
    Check { file: PathBuf },
    /// Print a radical chain and its nilpotency index.
    Chains {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "strong")]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        max: usize,
    },
    /// Check the strong-chain bounds for dimension 5.
    Bounds { file: PathBuf },
    /// Build the flows brace of an algebra.
    ToBrace {
        file: PathBuf,
        #[arg(short = 'o', value_name = "OUT")]
        out: PathBuf,
    },
    /// Check the brace axioms and right-linearity.
    BraceCheck {
        file: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Recover the pre-Lie algebra of a brace file.
    ToPrelie {
        bracefile: PathBuf,
        #[arg(short = 'o', value_name = "OUT")]
        out: PathBuf,
    },
    /// Algebra to brace and back, then compare the tensors.
    Roundtrip { file: PathBuf },
    /// Check the braid relation, involutivity and nondegeneracy.
    Ybe {
        file: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Sweep the parameter space of a case family.
    Enumerate {
        #[arg(long = "case", value_name = "ID")]
        case_id: String,
        #[arg(long, value_name = "PRIME")]
        p: u64,
        /// Largest number of solution points visited exhaustively.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u128,
        #[arg(long, value_name = "CENSUS")]
        out: PathBuf,
        /// Sample instead of sweeping; over-budget sweeps fail unless set.
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample when an exhaustive sweep would exceed the budget.
        #[arg(long)]
        fallback: bool,
        /// Hold a parameter at a value, as NAME=VALUE.
        #[arg(long = "fix", value_name = "NAME=VALUE")]
        fix: Vec<String>,
        #[arg(long, value_enum, default_value = "representatives")]
        records: Records,
    },
    /// Write a bundled algebra.
    Example {
        #[arg(value_enum)]
        name: Fixture,
        #[arg(long, value_name = "PRIME")]
        p: u64,
        #[arg(short = 'o', value_name = "OUT")]
        out: PathBuf,
    },
}

struct Outcome {
    report: RunReport,
    violations: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = run(&cli.command);
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(outcome) => {
            if let Some(path) = &cli.report {
                if let Err(e) = io::write_atomic(path, outcome.report.to_json().as_bytes()) {
                    eprintln!("error: writing report: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(if outcome.violations { EXIT_VIOLATIONS } else { EXIT_OK })
        }
        Err(e) => {
            match &e {
                Error::Load(le) => eprintln!("error[{}]: {le}", le.code()),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(if e.is_usage() || matches!(e, Error::Io(_)) {
                EXIT_USAGE
            } else {
                EXIT_VIOLATIONS
            })
        }
    }
}

fn read(path: &Path, report: &mut RunReport) -> flowbrace::Result<String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    report.input(text.as_bytes());
    Ok(text)
}

fn algebra(path: &Path, report: &mut RunReport) -> flowbrace::Result<PreLieAlgebra> {
    Ok(io::parse_algebra(&read(path, report)?)?)
}

/// A brace file, or an algebra file turned into its flows brace.
fn brace(path: &Path, report: &mut RunReport) -> flowbrace::Result<Brace> {
    let text = read(path, report)?;
    let is_brace = toml::from_str::<toml::Table>(&text)
        .ok()
        .and_then(|t| t.get("format").and_then(|v| v.as_str().map(|s| s == "brace")))
        .unwrap_or(false);
    if is_brace {
        Ok(io::parse_brace(&text)?)
    } else {
        flow_brace(io::parse_algebra(&text)?)
    }
}

fn mode(args: &CheckArgs, b: &Brace) -> CheckMode {
    match args.mode {
        None => b.default_mode(),
        Some(Mode::Exhaustive) => CheckMode::Exhaustive,
        Some(Mode::Sample) => CheckMode::Sample {
            samples: args.samples,
            seed: args.seed,
        },
    }
}

fn print_check(r: &CheckReport, report: &mut RunReport) {
    println!(
        "{}: {} {} checked, {} violations",
        r.check, r.tested, r.mode, r.violation_count
    );
    report.count(&format!("{}.tested", r.check), r.tested);
    report.count(&format!("{}.violations", r.check), r.violation_count);
    for v in &r.violations {
        let line = format!("{} {:?}", v.law, v.inputs);
        println!("  {line}");
        report.violation(line);
    }
    if let Some(s) = r.seed {
        report.seed = Some(s);
    }
}

fn run(cmd: &Command) -> flowbrace::Result<Outcome> {
    match cmd {
        Command::Check { file } => {
            let mut report = RunReport::new("check");
            let a = algebra(file, &mut report)?;
            let violations = a.check_prelie_axiom();
            for v in &violations {
                println!("{v}");
                report.violation(v.to_string());
            }
            let n = a.dim();
            report.count("triples", (n * n * n) as u64);
            if violations.is_empty() {
                println!("pre-Lie identity holds on all {} basis triples", n * n * n);
            } else {
                println!("{} violating triples", violations.len());
            }
            Ok(Outcome {
                violations: !violations.is_empty(),
                report,
            })
        }
        Command::Chains { file, kind, max } => {
            let mut report = RunReport::new("chains");
            let a = algebra(file, &mut report)?;
            let kind = match kind {
                Kind::Strong => ChainKind::Strong,
                Kind::Left => ChainKind::Left,
                Kind::Right => ChainKind::Right,
            };
            let c = chain(&a, kind, *max);
            for (i, d) in c.dims().iter().enumerate() {
                println!("term {}: dim {d}", i + 1);
            }
            match c.nilpotency_index {
                Some(k) => println!("nilpotency index: {k}"),
                None => println!("not nilpotent within {} terms", c.terms.len()),
            }
            report.chain(&kind.to_string(), c.dims());
            Ok(Outcome {
                report,
                violations: false,
            })
        }
        Command::Bounds { file } => {
            let mut report = RunReport::new("bounds");
            let a = algebra(file, &mut report)?;
            let b = check_index_bounds(&a);
            println!("generators: {}", b.generator_count);
            println!("strong dims: {:?}", b.strong_dims);
            report.chain("strong", b.strong_dims.clone());
            report.count("generators", b.generator_count as u64);
            if let Some(s) = &b.skipped {
                println!("skipped: {s}");
            }
            for c in &b.checks {
                println!("{}: {}", c.bound, if c.holds { "holds" } else { "FAILS" });
                if !c.holds {
                    report.violation(c.bound.clone());
                }
            }
            Ok(Outcome {
                violations: !b.all_hold(),
                report,
            })
        }
        Command::ToBrace { file, out } => {
            let mut report = RunReport::new("to-brace");
            let b = flow_brace(algebra(file, &mut report)?)?;
            io::save_brace(&b, out)?;
            println!("wrote flows brace on {} elements to {}", b.size(), out.display());
            report.count("elements", b.size());
            Ok(Outcome {
                report,
                violations: false,
            })
        }
        Command::BraceCheck { file, check } => {
            let mut report = RunReport::new("brace-check");
            let b = brace(file, &mut report)?;
            let m = mode(check, &b);
            let axioms = b.check_brace_axioms(m)?;
            let fp = b.check_fp_brace(m)?;
            print_check(&axioms, &mut report);
            print_check(&fp, &mut report);
            Ok(Outcome {
                violations: !axioms.passed() || !fp.passed(),
                report,
            })
        }
        Command::ToPrelie { bracefile, out } => {
            let mut report = RunReport::new("to-prelie");
            let b = brace(bracefile, &mut report)?;
            let a = brace_to_prelie(&b)?;
            io::save_algebra(&a, out)?;
            println!("wrote pre-Lie algebra of dimension {} to {}", a.dim(), out.display());
            Ok(Outcome {
                report,
                violations: false,
            })
        }
        Command::Roundtrip { file } => {
            let mut report = RunReport::new("roundtrip");
            let a = algebra(file, &mut report)?;
            let back = brace_to_prelie(&flow_brace(a.clone())?)?;
            let n = a.dim();
            let mut diff = 0u64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if a.structure_constant(i, j, k) != back.structure_constant(i, j, k) {
                            diff += 1;
                            report.violation(format!("{i} {j} {k}"));
                        }
                    }
                }
            }
            println!("tensor diff: {diff} entries");
            report.count("tensor_diff", diff);
            Ok(Outcome {
                report,
                violations: diff > 0,
            })
        }
        Command::Ybe { file, check } => {
            let mut report = RunReport::new("ybe");
            let mut b = brace(file, &mut report)?;
            let m = mode(check, &b);
            let (axioms, fp) = b.verify(m)?;
            if !axioms.passed() || !fp.passed() {
                print_check(&axioms, &mut report);
                print_check(&fp, &mut report);
                return Ok(Outcome {
                    report,
                    violations: true,
                });
            }
            let r = build_solution(&b)?;
            let checks = [
                verify_ybe(&r, m)?,
                check_involutive(&r, m)?,
                check_nondegenerate(&r, m)?,
            ];
            for c in &checks {
                print_check(c, &mut report);
            }
            Ok(Outcome {
                violations: checks.iter().any(|c| !c.passed()),
                report,
            })
        }
        Command::Enumerate {
            case_id,
            p,
            budget,
            out,
            mode,
            samples,
            seed,
            fallback,
            fix,
            records,
        } => {
            let mut report = RunReport::new("enumerate");
            let field = PrimeField::new(*p)?;
            let fixed = fix
                .iter()
                .map(|s| {
                    let (name, v) = s
                        .split_once('=')
                        .ok_or_else(|| Error::Usage(format!("--fix expects NAME=VALUE, got {s}")))?;
                    let v: u32 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Usage(format!("--fix value {v} is not a number")))?;
                    Ok((name.trim().to_string(), v))
                })
                .collect::<flowbrace::Result<Vec<_>>>()?;
            let opts = SweepOptions {
                mode: match mode {
                    Mode::Exhaustive => SweepMode::Exhaustive,
                    Mode::Sample => SweepMode::Sample {
                        samples: *samples,
                        seed: *seed,
                    },
                },
                budget: *budget,
                fallback: fallback.then_some((*samples, *seed)),
                fixed,
                records: match records {
                    Records::All => RecordPolicy::All,
                    Records::Representatives => RecordPolicy::Representatives,
                },
                ..SweepOptions::default()
            };
            let census = classify::enumerate(case_id, field, &opts, None)?;
            io::write_census(&census, out)?;
            println!(
                "{}: visited {}, accepted {}, {} fingerprints",
                census.case,
                census.visited,
                census.accepted,
                census.fingerprints.len()
            );
            for (reason, n) in &census.rejected {
                println!("  rejected ({reason}): {n}");
            }
            report.seed = census.seed;
            report.count("visited", census.visited);
            report.count("accepted", census.accepted);
            report.count("fingerprints", census.fingerprints.len() as u64);
            Ok(Outcome {
                report,
                violations: false,
            })
        }
        Command::Example { name, p, out } => {
            let mut report = RunReport::new("example");
            let field = PrimeField::new(*p)?;
            let a = match name {
                Fixture::Ex31 => fixtures::ex31(field),
                Fixture::Dim2 => fixtures::dim2(field),
            };
            io::save_algebra(&a, out)?;
            println!(
                "wrote {} to {}",
                if matches!(name, Fixture::Ex31) { "ex31" } else { "dim2" },
                out.display()
            );
            report.input(io::algebra_to_toml(&a).as_bytes());
            Ok(Outcome {
                report,
                violations: false,
            })
        }
    }
}
