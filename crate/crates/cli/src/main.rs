//! `evensearch`: generate planted instances, run evenness-driven searches,
//! verify them against a linear scan, and inspect oracle statistics.
//!
//! Exit codes: 0 found / identical, 1 not found / differs, 2 usage error,
//! 3 input format error, 4 oracle contract violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use evensearch::qsim::ViolationProfile;
use evensearch::{
    gen_instance_with, linear_scan, search_multi, search_single, Error, EvennessOracle, ExhaustiveOracle, F2Kind,
    IndexedFunction, Instance, ItemList, QueryLedger, RegisterPattern, SampledOracle, SearchOptions, SearchOutcome,
    SearchSpec,
};

const EXIT_NOT_FOUND: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_CONTRACT: u8 = 4;

#[derive(Parser)]
#[command(name = "evensearch", version, about = "Unstructured search through function evenness queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a 2^n-item list with matches planted at given positions.
    Gen(GenArgs),
    /// Search an instance and print the matching positions.
    Search(SearchArgs),
    /// Search an instance and compare the result with a linear scan.
    Verify(SearchArgs),
    /// Print the measurement statistics of one evenness query.
    OracleStats(StatsArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Magnitude bits; the list has 2^n items.
    #[arg(long)]
    n: u32,
    /// Item width in bits.
    #[arg(long)]
    m: usize,
    /// Comma-separated positions to plant matches at.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    plant: Vec<u64>,
    #[arg(long, value_enum, default_value_t = F2Name::Identity)]
    f2: F2Name,
    /// Output width for truncate, xor_fold and affine_mod.
    #[arg(long, required_if_eq_any([("f2", "truncate"), ("f2", "xor_fold"), ("f2", "affine_mod")]))]
    l: Option<usize>,
    #[arg(long, default_value_t = 1)]
    multiplier: u64,
    #[arg(long, default_value_t = 0)]
    addend: u64,
    /// Where to write the items file.
    #[arg(long)]
    items: PathBuf,
    /// Where to write the spec file.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum F2Name {
    Identity,
    Truncate,
    Parity,
    XorFold,
    AffineMod,
}

#[derive(Args)]
struct InstanceArgs {
    /// Items file: the item width, then one item per line.
    #[arg(long)]
    items: PathBuf,
    /// Spec file: {"f2": name, "params": {...}, "z": bits}.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = AlgoName::Single)]
    algo: AlgoName,
    #[arg(long, value_enum, default_value_t = OracleName::Exhaustive)]
    oracle: OracleName,
    /// Measurements per query for the sampled oracle.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    /// Seed for the sampled oracle; drawn from system entropy when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the right probe in multi search when the left one is even.
    #[arg(long)]
    adaptive: bool,
    /// Write the search trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoName {
    Single,
    Multi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleName {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Register pattern, sign cell first: '+' fixed 0, '-' fixed 1, '0' free.
    #[arg(long, allow_hyphen_values = true)]
    pattern: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Pattern(_)) => EXIT_USAGE,
        Some(Error::Contract(_) | Error::Readout(_) | Error::CellRange { .. }) => EXIT_CONTRACT,
        _ => EXIT_FORMAT,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Search(args) => search(args),
        Command::Verify(args) => verify(args),
        Command::OracleStats(args) => oracle_stats(args),
    }
}

fn gen(args: GenArgs) -> Result<u8> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let l = || args.l.context("--l is required for this f2");
    let f2 = match args.f2 {
        F2Name::Identity => F2Kind::Identity,
        F2Name::Parity => F2Kind::Parity,
        F2Name::Truncate => F2Kind::Truncate { l: l()? },
        F2Name::XorFold => F2Kind::XorFold { l: l()? },
        F2Name::AffineMod => F2Kind::AffineMod { multiplier: args.multiplier, addend: args.addend, l: l()? },
    };
    let instance = gen_instance_with(seed, args.n, args.m, &args.plant, f2)?;
    write(&args.items, &instance.items().to_text())?;
    write(&args.spec, &(instance.spec().to_json() + "\n"))?;
    println!("seed={seed} n={} m={} planted={:?}", args.n, args.m, linear_scan(&instance));
    Ok(0)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load(args: &InstanceArgs) -> Result<Instance> {
    let items = ItemList::load(&args.items).with_context(|| format!("reading {}", args.items.display()))?;
    let spec = SearchSpec::load(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    Ok(Instance::new(items, spec)?)
}

fn run_search(args: &SearchArgs, instance: &Instance) -> Result<SearchOutcome> {
    let ledger = QueryLedger::new();
    let options = SearchOptions { adaptive: args.adaptive };
    let outcome = match args.oracle {
        OracleName::Exhaustive => dispatch(args.algo, instance, ExhaustiveOracle, &ledger, options)?,
        OracleName::Sampled => {
            let seed = args.seed.unwrap_or_else(rand::random);
            dispatch(args.algo, instance, SampledOracle::new(args.shots, seed)?, &ledger, options)?
        }
    };
    if let Some(path) = &args.trace {
        write(path, &(outcome.trace.to_json() + "\n"))?;
    }
    Ok(outcome)
}

fn dispatch<O: EvennessOracle>(
    algo: AlgoName,
    instance: &Instance,
    oracle: O,
    ledger: &QueryLedger,
    options: SearchOptions,
) -> evensearch::Result<SearchOutcome> {
    match algo {
        AlgoName::Single => search_single(instance, oracle, ledger),
        AlgoName::Multi => search_multi(instance, oracle, ledger, options),
    }
}

fn ledger_line(outcome: &SearchOutcome) -> String {
    let l = outcome.trace.ledger;
    let mut line =
        format!("oracle_calls={} point_evaluations={} shots={}", l.oracle_calls, l.point_evaluations, l.shots);
    if let Some(seed) = outcome.trace.seed {
        line.push_str(&format!(" seed={seed}"));
    }
    line
}

fn search(args: SearchArgs) -> Result<u8> {
    let instance = load(&args.instance)?;
    let outcome = run_search(&args, &instance)?;
    if outcome.positions.is_empty() {
        println!("not present");
    }
    for p in &outcome.positions {
        println!("{p}");
    }
    println!("{}", ledger_line(&outcome));
    Ok(if outcome.positions.is_empty() { EXIT_NOT_FOUND } else { 0 })
}

fn verify(args: SearchArgs) -> Result<u8> {
    let instance = load(&args.instance)?;
    let outcome = run_search(&args, &instance)?;
    let mut expected = linear_scan(&instance);
    if args.algo == AlgoName::Single {
        // Single search reports only the leftmost match.
        expected.truncate(1);
    }
    println!("{}", ledger_line(&outcome));
    if outcome.positions == expected {
        println!("identical: {expected:?}");
        return Ok(0);
    }
    println!("search: {:?}", outcome.positions);
    println!("scan:   {expected:?}");
    let missed: Vec<u64> = expected.iter().copied().filter(|p| !outcome.positions.contains(p)).collect();
    println!("omitted: {missed:?}");
    if args.oracle == OracleName::Sampled {
        let f = instance.as_indexed_function();
        let profile = ViolationProfile::compute(&f, &RegisterPattern::positive_half(instance.magnitude_bits())?)?;
        println!(
            "note: the sampled oracle can omit matches; over the whole positive half one shot detects with \
             p = t/D = {}/{} (1/2^n per match), missing with probability {:.3e} at {} shots",
            profile.violations,
            profile.domain_size,
            profile.miss_probability(args.shots),
            args.shots
        );
    }
    Ok(EXIT_NOT_FOUND)
}

fn oracle_stats(args: StatsArgs) -> Result<u8> {
    let pattern: RegisterPattern = args.pattern.parse()?;
    let instance = load(&args.instance)?;
    let f = instance.as_indexed_function();
    if pattern.width() != f.input_width() {
        return Err(Error::Pattern(format!(
            "{} (width {}, instance needs {})",
            args.pattern,
            pattern.width(),
            f.input_width()
        ))
        .into());
    }
    let profile = ViolationProfile::compute(&f, &pattern)?;
    println!(
        "D={} t={} p={} miss_probability={} shots={}",
        profile.domain_size,
        profile.violations,
        profile.probability,
        profile.miss_probability(args.shots),
        args.shots
    );
    Ok(0)
}
