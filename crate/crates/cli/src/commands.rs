//! Argument definitions and the handler for each subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use splitpack_core::nextfit::{decreasing_order, next_fit_order};
use splitpack_core::{
    exact_opt, gen_a75_worst, gen_from_3partition, gen_nf_worst, gen_random, lower_bounds, next_fit,
    normal_form_violations, normalize, pack_75, validate_packing, Budget, ExactOptions, Instance, Packing,
    SizeDistribution,
};

use crate::budget::{resolve_budget, BUDGET_ENV};
use crate::error::CliError;
use crate::experiment::{run_experiment, ExperimentConfig, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "splitpack",
    version,
    about = "Bin packing with splittable items and cardinality constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pack an instance and report the bin count against the lower bound.
    Solve(SolveArgs),
    /// Check a packing against an instance; exits 5 if it is invalid.
    Verify(VerifyArgs),
    /// Print the lower bounds of an instance.
    Bounds(BoundsArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Rewrite a k = 2 packing into normal form.
    Normalize(NormalizeArgs),
    /// Run a batch of randomized trials and write a CSV report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// NEXT FIT in instance order.
    Nf,
    /// The 7/5-approximation for k = 2.
    A75,
    /// Exhaustive search; small instances only.
    Exact,
}

/// Oracle budget flags; they override `SPLITPACK_BUDGET`.
#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Largest instance the oracle accepts.
    #[arg(long)]
    pub max_items: Option<usize>,
    /// Largest bin count the oracle tries.
    #[arg(long)]
    pub max_bins: Option<usize>,
    /// Search node limit.
    #[arg(long)]
    pub budget_nodes: Option<u64>,
}

impl BudgetArgs {
    fn resolve(&self) -> Result<Budget, CliError> {
        let env = std::env::var(BUDGET_ENV).ok();
        resolve_budget(env.as_deref(), self.max_items, self.max_bins, self.budget_nodes)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Instance JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the packing JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Where to write the NEXT FIT trace (nf only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Where to write the step report (a75 only).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Feed NEXT FIT the items by decreasing size instead of instance order.
    #[arg(long)]
    pub presort: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance JSON.
    #[arg(long)]
    pub instance: PathBuf,
    /// Packing JSON.
    #[arg(long)]
    pub packing: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Instance JSON.
    #[arg(long)]
    pub input: PathBuf,
}

/// Where generated files go.
#[derive(Debug, Args)]
pub struct GenOutput {
    /// Instance JSON; printed to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifiedOutput {
    /// Where to write the certified optimal packing.
    #[arg(long)]
    pub certified: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// NEXT FIT worst case with its certified optimum.
    NfWorst {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: GenOutput,
        #[command(flatten)]
        cert: CertifiedOutput,
    },
    /// Bad example for the 7/5 algorithm with its certified optimum.
    A75Worst {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: GenOutput,
        #[command(flatten)]
        cert: CertifiedOutput,
    },
    /// Instance reduced from a 3-Partition input.
    Reduce3p {
        #[arg(long)]
        b: u64,
        /// Comma-separated positive integers, 3m of them.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        numbers: Vec<u64>,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// uniform:D, mixed:S,M,L:D or heavy:D (D is the largest denominator).
        #[arg(long, default_value = "mixed")]
        dist: SizeDistribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOutput,
    },
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Packing JSON to rewrite.
    #[arg(long)]
    pub input: PathBuf,
    /// Instance JSON the packing belongs to.
    #[arg(long)]
    pub instance: PathBuf,
    /// Where to write the normalized packing.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Re-check the result and exit 5 on any normal-form violation.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Largest number of items per random instance.
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
    #[arg(long, default_value = "mixed")]
    pub dist: SizeDistribution,
    /// Triples per 3-Partition input (reduction-check).
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// CSV destination; printed to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::from_json(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_packing(path: &Path) -> Result<Packing, CliError> {
    Packing::from_json(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Refuses to emit a packing that does not validate.
fn write_packing(path: &Path, inst: &Instance, packing: &Packing) -> Result<(), CliError> {
    let violations = validate_packing(inst, packing);
    if let Some(v) = violations.first() {
        return Err(CliError::Verify(format!("refusing to write an invalid packing: {v}")));
    }
    write(path, &packing.to_json())
}

fn emit(out: &GenOutput, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => write(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    if args.trace.is_some() && args.algo != Algo::Nf {
        return Err(CliError::Usage("--trace applies to --algo nf only".into()));
    }
    if args.presort && args.algo != Algo::Nf {
        return Err(CliError::Usage("--presort applies to --algo nf only".into()));
    }
    if args.report.is_some() && args.algo != Algo::A75 {
        return Err(CliError::Usage("--report applies to --algo a75 only".into()));
    }
    let budget = args.budget.resolve()?;
    let inst = read_instance(&args.input)?;
    if args.algo == Algo::A75 && inst.k() != 2 {
        return Err(CliError::Usage(format!(
            "--algo a75 requires k = 2, instance has k = {}",
            inst.k()
        )));
    }
    let bound = lower_bounds(&inst).best;
    let (packing, extra) = match args.algo {
        Algo::Nf => {
            let (p, trace) = if args.presort {
                next_fit_order(&inst, &decreasing_order(&inst))
            } else {
                next_fit(&inst)
            };
            (p, args.trace.as_ref().map(|path| (path, trace.to_json())))
        }
        Algo::A75 => {
            let rep = pack_75(&inst)?;
            let json = rep.to_json();
            (rep.packing, args.report.as_ref().map(|path| (path, json)))
        }
        Algo::Exact => (exact_opt(&inst, &ExactOptions::with_budget(budget))?.witness, None),
    };
    if let Some(path) = &args.output {
        write_packing(path, &inst, &packing)?;
    }
    if let Some((path, json)) = extra {
        write(path, &json)?;
    }
    let optimal = if args.algo == Algo::Exact { " optimal" } else { "" };
    println!("bins={} lower_bound={bound}{optimal}", packing.len());
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let packing = read_packing(&args.packing)?;
    let violations = validate_packing(&inst, &packing);
    if violations.is_empty() {
        println!("valid: {} bins", packing.len());
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(CliError::Verify(format!("{} violation(s)", violations.len())))
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let b = lower_bounds(&read_instance(&args.input)?);
    println!(
        "size_bound={} weight_bound={} count_bound={} lower_bound={}",
        b.size_bound, b.weight_bound, b.count_bound, b.best
    );
    Ok(())
}

pub fn cmd_gen(cmd: &GenCommand) -> Result<(), CliError> {
    match cmd {
        GenCommand::NfWorst { k, m, out, cert } => {
            let (inst, opt) = gen_nf_worst(*k, *m)?;
            if let Some(path) = &cert.certified {
                write_packing(path, &inst, &opt)?;
            }
            emit(out, &inst.to_json())
        }
        GenCommand::A75Worst { n, out, cert } => {
            let (inst, opt) = gen_a75_worst(*n)?;
            if let Some(path) = &cert.certified {
                write_packing(path, &inst, &opt)?;
            }
            emit(out, &inst.to_json())
        }
        GenCommand::Reduce3p { b, numbers, k, out } => emit(out, &gen_from_3partition(numbers, *b, *k)?.to_json()),
        GenCommand::Random { n, k, dist, seed, out } => emit(out, &gen_random(*n, *k, *dist, *seed)?.to_json()),
    }
}

pub fn cmd_normalize(args: &NormalizeArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let before = read_packing(&args.input)?;
    let after = normalize(&inst, &before)?;
    println!("bins_before={} bins_after={}", before.len(), after.len());
    if args.check {
        let mut problems: Vec<String> = validate_packing(&inst, &after).iter().map(|v| v.to_string()).collect();
        problems.extend(normal_form_violations(&inst, &after)?);
        if !problems.is_empty() {
            for p in &problems {
                println!("{p}");
            }
            return Err(CliError::Verify(format!("{} normal-form violation(s)", problems.len())));
        }
        println!("normal form: ok");
    }
    if let Some(path) = &args.output {
        write_packing(path, &inst, &after)?;
    }
    Ok(())
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig {
        suite: args.suite,
        trials: args.trials,
        seed: args.seed,
        k: args.k,
        max_n: args.max_n,
        dist: args.dist,
        m: args.m,
        budget: args.budget.resolve()?,
    };
    let (csv, summary) = run_experiment(&cfg)?;
    match &args.output {
        Some(path) => {
            write(path, &csv)?;
            println!("{}", summary.line(args.suite));
        }
        None => print!("{csv}"),
    }
    if summary.failures > 0 {
        return Err(CliError::Verify(format!(
            "{} trial(s) failed their check",
            summary.failures
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Gen(c) => cmd_gen(c),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}
