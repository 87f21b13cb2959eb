use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::ValueEnum;
use hdnet_core::capacity::{fd_capacity, fixed_schedule_rate, hd_capacity_with, SolveOptions};
use hdnet_core::model::generate::{gen_half_tight, gen_random, gen_two_phase_schedule, gen_worst_case};
use hdnet_core::selection::{guarantee_bound, Strategy, GUARANTEE_TOL};
use hdnet_core::{DiamondNetwork, Error, LinkCapacity, RelaySet};
use rayon::prelude::*;
use serde::Serialize;

use crate::parse_link;

/// Most subnetworks a best-subset search will solve.
const SUBSET_LIMIT: usize = 200_000;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    WorstCase,
    HalfTight,
    Random,
    /// Worst-case networks with N = 4t - 2; the range is over t.
    Theorem3,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    family: SweepFamily,
    /// Inclusive range `A:B` of relay counts (of t for theorem3).
    #[arg(long, value_parser = parse_range)]
    n_range: (usize, usize),
    /// Subset size, or `best` for N-1 (1 and 2 for theorem3).
    #[arg(long, default_value = "best")]
    k: String,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "inf", value_parser = parse_link)]
    big_l: LinkCapacity,
    #[arg(long)]
    max_relays: Option<usize>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (a, b),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a == 0 || a > b {
        return Err(format!("empty or zero-based range {s:?}"));
    }
    Ok((a, b))
}

/// HD capacity from the LP when `n` is within the guard. Above it, the
/// value is certified only when a two-phase schedule already reaches the
/// full-duplex cut bound.
pub fn full_capacity(net: &DiamondNetwork, opts: SolveOptions) -> anyhow::Result<(f64, &'static str)> {
    let n = net.n();
    if n <= opts.max_relays {
        return Ok((hd_capacity_with(net, opts)?.value, "lp"));
    }
    if n >= 2 {
        let lower = fixed_schedule_rate(net, &gen_two_phase_schedule(n)?)?.value;
        let upper = fd_capacity(net)?.value;
        if upper - lower <= 1e-9 * upper.abs().max(1.0) {
            return Ok((lower, "sandwich"));
        }
    }
    Err(Error::GuardExceeded {
        what: "hd capacity LP (two-phase/full-duplex sandwich not tight)",
        n,
        guard: opts.max_relays,
    }
    .into())
}

/// Best `k`-relay subnetwork by HD capacity, lexicographically first among
/// ties.
pub fn best_subset(net: &DiamondNetwork, k: usize, opts: SolveOptions) -> anyhow::Result<(Vec<usize>, f64)> {
    let n = net.n();
    if k == 0 || k > n {
        bail!(Error::InvalidK { k, n });
    }
    let count = (1..=k).fold(1u128, |c, i| c * (n - k + i) as u128 / i as u128);
    if count > SUBSET_LIMIT as u128 {
        bail!(Error::GuardExceeded {
            what: "best-subset search (subset count)",
            n,
            guard: SUBSET_LIMIT,
        });
    }
    let subsets = RelaySet::subsets_of_size(n, k);
    let values = subsets
        .par_iter()
        .map(|&s| Ok(hd_capacity_with(&net.subnetwork(s)?, opts)?.value))
        .collect::<hdnet_core::Result<Vec<f64>>>()?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = if max.is_finite() { GUARANTEE_TOL * max.abs().max(1.0) } else { 0.0 };
    let i = values.iter().position(|&v| v >= max - tol).expect("at least one subset");
    Ok((subsets[i].relays().collect(), values[i]))
}

#[derive(Serialize)]
pub struct Row {
    pub family: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    #[serde(rename = "C_full")]
    pub c_full: String,
    pub best_value: String,
    pub fraction: String,
    pub bound: String,
    pub selected: String,
    pub full_method: &'static str,
}

fn fmt(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

pub fn sweep_row(
    family: &'static str,
    net: &DiamondNetwork,
    k: usize,
    opts: SolveOptions,
) -> anyhow::Result<Row> {
    let (c_full, method) = full_capacity(net, opts)?;
    let (selected, best) = best_subset(net, k, opts)?;
    Ok(Row {
        family,
        n: net.n(),
        k,
        c_full: fmt(c_full),
        best_value: fmt(best),
        fraction: fmt(hdnet_core::selection::fraction(best, c_full)),
        bound: fmt(guarantee_bound(net.n(), k, Strategy::Exhaustive)?),
        selected: selected.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        full_method: method,
    })
}

pub fn run(args: SweepArgs) -> anyhow::Result<u8> {
    let mut opts = SolveOptions::default();
    if let Some(m) = args.max_relays {
        opts.max_relays = m;
    }
    let fixed_k = match args.k.as_str() {
        "best" => None,
        s => Some(s.parse::<usize>().map_err(|_| Error::Parse(format!("--k expects best or an integer, got {s:?}")))?),
    };
    let mut rows = Vec::new();
    for x in args.n_range.0..=args.n_range.1 {
        let (name, net, ks): (&'static str, DiamondNetwork, Vec<usize>) = match args.family {
            SweepFamily::Theorem3 => {
                let n = 4 * x - 2;
                ("theorem3", gen_worst_case(n, args.big_l)?, fixed_k.map_or(vec![1, 2], |k| vec![k]))
            }
            SweepFamily::WorstCase if x >= 2 => ("worst-case", gen_worst_case(x, args.big_l)?, vec![fixed_k.unwrap_or(x - 1)]),
            SweepFamily::HalfTight if x >= 2 => ("half-tight", gen_half_tight(x, args.big_l)?, vec![fixed_k.unwrap_or(x - 1)]),
            SweepFamily::Random => {
                let k = fixed_k.unwrap_or(x.saturating_sub(1).max(1));
                ("random", gen_random(x, args.seed.wrapping_add(x as u64), 0.0, 1.0)?, vec![k])
            }
            _ => bail!(Error::TooFewRelays { min: 2, got: x }),
        };
        for k in ks.into_iter().filter(|&k| k <= net.n()) {
            rows.push(sweep_row(name, &net, k, opts)?);
        }
    }
    let mut sink: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match args.out {
        OutFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        OutFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            writeln!(sink)?;
        }
    }
    Ok(0)
}
