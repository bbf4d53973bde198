//! `hpack`: solve, validate and generate packing instances from the command line.
//!
//! Exit codes: 0 success, 1 invalid packing or failed bound, 2 input error, 3 budget
//! exhausted before any result.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use harmonic_pack::instance::{generate, Distribution, GenSpec, Instance};
use harmonic_pack::numeric::{format_decimal, format_rational, parse_rational};
use harmonic_pack::oracle::{opt_dbp_exact, opt_mcks_exact, opt_sp_exact};
use harmonic_pack::report::{
    assortment_from_json, check_against, packing_from_json, run, Report, RunOptions, Solver,
};
use harmonic_pack::{compute_t, validate_packing, Error, Rational, RotationPolicy};

#[derive(Parser, Debug)]
#[command(name = "hpack", version, about = "Harmonic-based packing solvers with exact arithmetic")]
struct Cli {
    /// Harmonic parameter k (at least 3).
    #[arg(long, global = true, env = "HPACK_K", default_value_t = 4)]
    k: u32,
    /// Accuracy parameter, a rational such as 1/2.
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Override the instance's rotation policy.
    #[arg(long, global = true, value_enum)]
    rotations: Option<Rotations>,
    /// Generator seed; echoed into reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Maximum number of shelf plans evaluated by pack-hgap.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Out::Json)]
    out: Out,
    /// Worker threads for pack-hgap.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// d-D bin packing of plain items with fullh_k (or HDH-NF).
    PackBp {
        /// Instance file, `-` for stdin.
        instance: String,
        /// Use the shelf-based Next-Fit variant.
        #[arg(long)]
        next_fit: bool,
    },
    /// Multiple-choice bin packing with fullh_k.
    PackMcbp { instance: String },
    /// Multiple-choice bin packing with HGaP_k; needs --epsilon in (0,1].
    PackHgap { instance: String },
    /// Strip packing of plain items.
    PackSp { instance: String },
    /// Multiple-choice strip packing.
    PackMcsp { instance: String },
    /// Multiple-choice knapsack; needs --epsilon and profits.
    PackKs { instance: String },
    /// Validate a report or packing file, optionally against its instance.
    Validate {
        file: String,
        #[arg(long)]
        instance: Option<String>,
    },
    /// Exact optimum for tiny instances.
    Oracle {
        instance: String,
        #[arg(long, value_enum, default_value_t = Problem::Bp)]
        problem: Problem,
    },
    /// Print T_k.
    Tk,
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Dist::Uniform)]
        distribution: Dist,
        /// Target type for the stratified distribution.
        #[arg(long, default_value_t = 1)]
        q: u32,
        /// Members per itemset.
        #[arg(long, default_value_t = 1)]
        members: usize,
        #[arg(long)]
        profits: bool,
        /// Grid denominator for the uniform distribution.
        #[arg(long, default_value_t = 20)]
        grid: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Out {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rotations {
    None,
    All,
    FixLastAxis,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Problem {
    Bp,
    Sp,
    Ks,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Dist {
    Uniform,
    Stratified,
    Rotation,
}

enum Failure {
    Invalid(String),
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            Error::Domain(_) | Error::Input(_) | Error::Parse { .. } | Error::TooLarge(_) => Failure::Input(e.to_string()),
            Error::Infeasible(_) | Error::Contract(_) => Failure::Invalid(e.to_string()),
        }
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn load_instance(path: &str, rotations: Option<Rotations>) -> Result<Instance, Failure> {
    let inst = Instance::parse(&read_source(path)?)?;
    let Some(r) = rotations else { return Ok(inst) };
    let policy = match r {
        Rotations::None => RotationPolicy::None,
        Rotations::All => RotationPolicy::All,
        Rotations::FixLastAxis => RotationPolicy::FixLastAxis,
    };
    // re-parse so the new policy is checked against the bin
    let mut v = inst.to_json();
    v["rotation"] = serde_json::to_value(&policy).expect("policy serializes");
    Ok(Instance::from_json(&v)?)
}

fn epsilon(cli: &Cli) -> Result<Option<Rational>, Failure> {
    cli.epsilon
        .as_deref()
        .map(|s| parse_rational(s).map_err(|e| Failure::Input(format!("--epsilon: {e}"))))
        .transpose()
}

fn emit_report(r: &Report, out: Out) -> Result<(), Failure> {
    match out {
        Out::Json => println!("{}", r.canonical()),
        Out::Csv => {
            println!("{}", Report::csv_header());
            println!("{}", r.csv_row());
        }
    }
    if !r.valid() {
        return Err(Failure::Invalid(format!("invalid packing: {}", r.violations.join("; "))));
    }
    if let Some(b) = r.ledger.iter().find(|b| !b.pass) {
        return Err(Failure::Invalid(format!("bound failed: {b}")));
    }
    Ok(())
}

fn emit_value(v: &Value, out: Out) {
    match out {
        Out::Json => println!("{}", serde_json::to_string(v).expect("values serialize")),
        Out::Csv => {
            let obj = v.as_object().expect("flat object");
            let keys: Vec<&String> = obj.keys().collect();
            println!("{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
            let cells: Vec<String> = obj
                .values()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            println!("{}", cells.join(","));
        }
    }
}

fn solve(cli: &Cli, path: &str, solver: Solver) -> Result<(), Failure> {
    let inst = load_instance(path, cli.rotations)?;
    let opts = RunOptions {
        k: cli.k,
        epsilon: epsilon(cli)?,
        budget: cli.budget,
        threads: cli.threads,
        seed: cli.seed,
    };
    let report = run(&inst, solver, &opts)?;
    emit_report(&report, cli.out)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::PackBp { instance, next_fit } => solve(cli, instance, Solver::Bp { next_fit: *next_fit }),
        Command::PackMcbp { instance } => solve(cli, instance, Solver::Mcbp),
        Command::PackHgap { instance } => solve(cli, instance, Solver::Hgap),
        Command::PackSp { instance } => solve(cli, instance, Solver::Sp),
        Command::PackMcsp { instance } => solve(cli, instance, Solver::Mcsp),
        Command::PackKs { instance } => solve(cli, instance, Solver::Ks),
        Command::Validate { file, instance } => {
            let text = read_source(file)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
            let packing = packing_from_json(&v)?;
            let report = match instance {
                Some(path) => {
                    let inst = load_instance(path, cli.rotations)?;
                    let assortment = assortment_from_json(&v)?;
                    check_against(&packing, &inst, assortment.as_deref())
                }
                None => validate_packing(&packing),
            };
            let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            emit_value(
                &json!({ "valid": report.is_valid(), "violations": violations.join("; ") }),
                cli.out,
            );
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Invalid(report.to_string()))
            }
        }
        Command::Oracle { instance, problem } => {
            let inst = load_instance(instance, cli.rotations)?;
            let (name, value) = match problem {
                Problem::Bp => {
                    let items = if inst.is_plain() {
                        inst.unit_items()?
                    } else if inst.is_unit_bin() && inst.itemsets.iter().all(|s| s.members.len() == 1) {
                        inst.itemsets.iter().map(|s| s.members[0].clone()).collect()
                    } else {
                        return Err(Failure::Input(
                            "the bin packing oracle takes single-member itemsets; rotations need a unit bin".into(),
                        ));
                    };
                    let opt = opt_dbp_exact(&items, &inst.rotation)?;
                    ("bins", Rational::from_integer(opt.into()))
                }
                Problem::Sp => {
                    let opt = opt_sp_exact(&inst.unit_items()?)?;
                    ("height", opt * inst.bin.last().expect("d >= 1"))
                }
                Problem::Ks => {
                    if !inst.is_unit_bin() && inst.rotation != RotationPolicy::None {
                        return Err(Failure::Input("the knapsack oracle with rotations needs a unit bin".into()));
                    }
                    let sets = if inst.is_unit_bin() {
                        inst.itemsets.clone()
                    } else {
                        inst.unit_itemsets()
                    };
                    ("profit", opt_mcks_exact(&sets, &inst.rotation)?)
                }
            };
            emit_value(
                &json!({
                    "objective": name,
                    "exact": format_rational(&value),
                    "decimal": format_decimal(&value, 6),
                }),
                cli.out,
            );
            Ok(())
        }
        Command::Tk => {
            let t = compute_t(cli.k)?;
            match cli.out {
                Out::Json => println!("{}", format_rational(&t)),
                Out::Csv => emit_value(
                    &json!({ "k": cli.k, "t_k": format_rational(&t), "decimal": format_decimal(&t, 6) }),
                    Out::Csv,
                ),
            }
            Ok(())
        }
        Command::Gen {
            n,
            d,
            distribution,
            q,
            members,
            profits,
            grid,
        } => {
            let distribution = match distribution {
                Dist::Uniform => Distribution::Uniform,
                Dist::Stratified => Distribution::TypeStratified { q: *q },
                Dist::Rotation => Distribution::RotationSensitive,
            };
            let spec = GenSpec {
                n: *n,
                d: *d,
                distribution,
                seed: cli.seed.unwrap_or(0),
                members: *members,
                profits: *profits,
                grid: *grid,
            };
            println!("{}", generate(&spec)?.canonical());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Invalid(m) => (1, m),
                Failure::Input(m) => (2, m),
                Failure::Budget(m) => (3, m),
            };
            eprintln!("hpack: {msg}");
            ExitCode::from(code)
        }
    }
}
