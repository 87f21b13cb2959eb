use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use hdnet_core::capacity::{fd_capacity, hd_capacity_with, Arithmetic, SolveOptions};
use hdnet_core::model::generate::{gen_half_tight, gen_random, gen_worst_case};
use hdnet_core::model::json::{network_from_json, network_to_json, schedule_from_json, schedule_to_value};
use hdnet_core::selection::{drop_worst_with, select, select_k_iterative_with, Strategy};
use hdnet_core::{DiamondNetwork, LinkCapacity};
use serde_json::json;

mod output;
mod sweep;
mod verify;

use output::{num, report_json};

const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "hdnet", version, about = "Half-duplex diamond network capacities and relay selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate capacity of a network file.
    Capacity(CapacityArgs),
    /// Pick a relay subset with one of the selection strategies.
    Select(SelectArgs),
    /// Write a constructed or random network as JSON.
    Generate(GenerateArgs),
    /// Run a verification suite.
    Verify(verify::VerifyArgs),
    /// Tabulate best-subset fractions over a range of network sizes.
    Sweep(sweep::SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hd,
    Fd,
}

#[derive(clap::Args)]
struct CapacityArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum, default_value = "hd")]
    mode: Mode,
    /// Solve the LP in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    emit_schedule: bool,
    /// Replace unbounded links by this finite capacity.
    #[arg(long)]
    big_l: Option<f64>,
    /// Largest relay count for the HD LP (defaults to HDNET_LP_GUARD or 12).
    #[arg(long)]
    max_relays: Option<usize>,
}

#[derive(clap::Args)]
struct SelectArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(short)]
    k: usize,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Relays to remove for worst-drop instead of the smallest singles.
    #[arg(long, value_delimiter = ',')]
    force_remove: Option<Vec<usize>>,
    /// Starting schedule for the iterative strategy (default: optimal).
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    big_l: Option<f64>,
    #[arg(long)]
    max_relays: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    WorstCase,
    HalfTight,
    Random,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "inf", value_parser = parse_link)]
    big_l: LinkCapacity,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Range of the random link capacities.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: hdnet_core::Error| e.to_string())
}

pub(crate) fn parse_link(s: &str) -> Result<LinkCapacity, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(LinkCapacity::Unbounded),
        t => t
            .parse::<f64>()
            .map_err(|e| e.to_string())
            .and_then(|v| LinkCapacity::finite(v).map_err(|e| e.to_string())),
    }
}

fn load_network(path: &Path, big_l: Option<f64>) -> anyhow::Result<DiamondNetwork> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let net = network_from_json(&text)?;
    Ok(match big_l {
        Some(v) => net.with_finite_big_l(v)?,
        None => net,
    })
}

fn solve_options(exact: bool, max_relays: Option<usize>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if exact {
        opts.arithmetic = Arithmetic::Rational;
    }
    if let Some(m) = max_relays {
        opts.max_relays = m;
    }
    opts
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json renders"));
}

fn cmd_capacity(args: CapacityArgs) -> anyhow::Result<u8> {
    let net = load_network(&args.network, args.big_l)?;
    let (mode, res) = match args.mode {
        Mode::Hd => ("hd", hd_capacity_with(&net, solve_options(args.exact, args.max_relays))?),
        Mode::Fd => ("fd", fd_capacity(&net)?),
    };
    let mut out = json!({
        "value": num(res.value),
        "mode": mode,
        "arithmetic": match res.arithmetic {
            Arithmetic::Float => "float",
            Arithmetic::Rational => "rational",
        },
        "tight_cuts": res.tight_cuts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    if args.emit_schedule {
        if let Some(s) = &res.optimal_schedule {
            out["schedule"] = schedule_to_value(s);
        }
    }
    if let Some(exact) = &res.exact {
        out["exact"] = json!({
            "value": exact.value.to_string(),
            "schedule": exact
                .schedule
                .iter()
                .map(|(s, p)| json!({"state": s.to_string(), "prob": p.to_string()}))
                .collect::<Vec<_>>(),
        });
    }
    print_json(&out);
    Ok(0)
}

fn cmd_select(args: SelectArgs) -> anyhow::Result<u8> {
    let net = load_network(&args.network, args.big_l)?;
    let opts = solve_options(false, args.max_relays);
    if args.force_remove.is_some() && args.strategy != Strategy::WorstDrop {
        bail!(hdnet_core::Error::Parse("--force-remove applies to worst-drop only".into()));
    }
    if args.schedule.is_some() && args.strategy != Strategy::Iterative {
        bail!(hdnet_core::Error::Parse("--schedule applies to iterative only".into()));
    }
    let report = match (args.strategy, &args.force_remove, &args.schedule) {
        (Strategy::WorstDrop, Some(list), _) => drop_worst_with(&net, args.k, Some(list), opts)?,
        (Strategy::Iterative, _, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            select_k_iterative_with(&net, args.k, Some(&schedule_from_json(&text)?), opts)?
        }
        (strategy, _, _) => select(&net, args.k, strategy, opts)?,
    };
    print_json(&report_json(&report));
    Ok(if report.meets_bound() { 0 } else { EXIT_VIOLATION })
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<u8> {
    let net = match args.family {
        Family::WorstCase => gen_worst_case(args.n, args.big_l)?,
        Family::HalfTight => gen_half_tight(args.n, args.big_l)?,
        Family::Random => gen_random(args.n, args.seed, args.lo, args.hi)?,
    };
    let text = network_to_json(&net) + "\n";
    match args.output {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

/// Exit code for a failed command.
fn failure_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hdnet_core::Error>() {
        Some(hdnet_core::Error::GuardExceeded { .. }) => EXIT_GUARD,
        Some(hdnet_core::Error::GuaranteeViolated(_)) => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Select(a) => cmd_select(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => verify::run(a),
        Command::Sweep(a) => sweep::run(a),
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(failure_code(&err))
        }
    }
}
