use anyhow::bail;
use clap::ValueEnum;
use hdnet_core::capacity::{fixed_schedule_rate, hd_capacity, sparsify_schedule, SolveOptions};
use hdnet_core::model::generate::{gen_half_tight, gen_random, gen_random_schedule, gen_worst_case};
use hdnet_core::selection::{drop_worst, select_drop_one_schedule_reuse, select_k_iterative};
use hdnet_core::submodular::{
    all_cut_families, check_lemma2, check_lemma3, check_property1, complement_duality_check, is_submodular,
    random_cut_family, random_family, SetFamily, SetFunction,
};
use hdnet_core::{DiamondNetwork, Error, LinkCapacity, RelaySet};
use rayon::prelude::*;
use serde::Serialize;

use crate::sweep::{best_subset, full_capacity};
use crate::EXIT_VIOLATION;

const TOL: f64 = 1e-8;
const EXACT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Partition,
    Submodular,
    Lemma3,
    Guarantees,
    Lemma5,
    Fig2,
    Theorem3,
    Sparsify,
    EdgeDelta,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::Submodular => "submodular",
            Suite::Lemma3 => "lemma3",
            Suite::Guarantees => "guarantees",
            Suite::Lemma5 => "lemma5",
            Suite::Fig2 => "fig2",
            Suite::Theorem3 => "theorem3",
            Suite::Sparsify => "sparsify",
            Suite::EdgeDelta => "edge-delta",
        }
    }
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest relay count (fig2: largest N; theorem3: largest N = 4t - 2).
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Serialize, Debug)]
pub struct Failure {
    pub instance: String,
    pub expected: String,
    pub got: String,
}

#[derive(Serialize, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
}

type Check = Result<(), (String, String)>;

fn at_least(got: f64, want: f64, what: &str) -> Check {
    if got >= want - TOL * want.abs().max(1.0) {
        Ok(())
    } else {
        Err((format!("{what} >= {want}"), format!("{got}")))
    }
}

fn near(got: f64, want: f64, what: &str) -> Check {
    if (got - want).abs() <= EXACT_TOL {
        Ok(())
    } else {
        Err((format!("{what} = {want}"), format!("{got}")))
    }
}

fn holds(ok: bool, what: &str) -> Check {
    if ok {
        Ok(())
    } else {
        Err((what.to_owned(), "violated".to_owned()))
    }
}

fn cap(net: &DiamondNetwork) -> hdnet_core::Result<f64> {
    Ok(hd_capacity(net)?.value)
}

/// Size and seed of random trial `i`, sizes cycling through `2..=n_max`.
fn trial(seed: u64, i: usize, n_max: usize) -> (usize, u64) {
    let s = seed.wrapping_add(i as u64);
    (2 + i % (n_max - 1), s)
}

fn run_trials<F>(trials: usize, f: F) -> anyhow::Result<Vec<(String, Check)>>
where
    F: Fn(usize) -> anyhow::Result<(String, Check)> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

fn partition(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let sched = gen_random_schedule(n, s)?;
        let c = cap(&net)?;
        let r = fixed_schedule_rate(&net, &sched)?.value;
        let rate = |k: RelaySet| -> hdnet_core::Result<f64> {
            Ok(fixed_schedule_rate(&net.subnetwork(k)?, &sched.derive_natural(k)?)?.value)
        };
        let mut check = Ok(());
        for bits in 1..(1u32 << n) - 1 {
            let k = RelaySet::new(bits, n)?;
            let rates = rate(k)? + rate(k.complement())?;
            let caps = cap(&net.subnetwork(k)?)? + cap(&net.subnetwork(k.complement())?)?;
            check = check
                .and_then(|_| at_least(rates, r, &format!("rate split at {k}")))
                .and_then(|_| at_least(caps, c, &format!("capacity split at {k}")));
        }
        Ok((format!("n={n} seed={s}"), check))
    })
}

fn submodular(args: &VerifyArgs) -> anyhow::Result<Vec<(String, Check)>> {
    let fam = SetFamily::from_elements(7, &[vec![1, 2, 5, 7], vec![4, 5], vec![2, 4, 5, 6]])?;
    let rep = check_lemma2(&SetFunction::index_max(7), &fam);
    let mut out = vec![(
        "worked example".to_owned(),
        near(rep.lhs, 18.0, "lhs").and_then(|_| near(rep.rhs, 17.0, "rhs")),
    )];
    out.extend(run_trials(args.trials, |i| {
        let s = args.seed.wrapping_add(i as u64);
        let m = 1 + i % 8;
        let count = 1 + i % 5;
        let fam = random_family(m, count, s)?;
        let weights = gen_random(m, s, 0.0, 10.0)?.uplinks().iter().map(|c| c.value()).collect();
        let f = SetFunction::weighted_max(weights);
        let extra = random_family(m, 1, !s)?.sets()[0];
        let mut check = holds(is_submodular(&f, m)?.holds, "weighted max is submodular")
            .and_then(|_| {
                let r = check_lemma2(&f, &fam);
                at_least(r.lhs, r.rhs, "threshold-set sum")
            });
        for k in 0..count {
            let r = check_property1(&f, &fam, extra, k)?;
            check = check.and_then(|_| at_least(r.lhs, r.rhs, &format!("inductive step k={k}")));
        }
        Ok((format!("m={m} sets={count} seed={s}"), check))
    })?);
    Ok(out)
}

fn cut_checks(net: &DiamondNetwork, cuts: &[hdnet_core::CutMask]) -> anyhow::Result<Check> {
    let rep = check_lemma3(net, cuts)?;
    let dual = complement_duality_check(net.n(), cuts)?;
    Ok(at_least(rep.lhs, rep.rhs, "cut sum").and_then(|_| holds(dual, "complement duality")))
}

fn lemma3(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    let net = gen_random(3, args.seed, 0.0, 1.0)?;
    let mut out = all_cut_families(3)
        .enumerate()
        .map(|(j, cuts)| Ok((format!("n=3 family #{j}"), cut_checks(&net, &cuts)?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    out.extend(run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let cuts = random_cut_family(n, s)?;
        Ok((format!("n={n} seed={s}"), cut_checks(&net, &cuts)?))
    })?);
    Ok(out)
}

fn guarantees(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    let mut out = run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let c = cap(&net)?;
        let nf = n as f64;
        let best_drop = (1..=n).map(|i| cap(&net.without(i)?)).collect::<hdnet_core::Result<Vec<_>>>()?;
        let best_drop = best_drop.into_iter().fold(0.0, f64::max);
        let reuse = select_drop_one_schedule_reuse(&net)?;
        let mut check = at_least(drop_worst(&net, n - 1, None)?.value, 0.5 * c, "worst-relay drop")
            .and_then(|_| at_least(best_drop, (nf - 1.0) / nf * c, "best drop-one capacity"))
            .and_then(|_| at_least(reuse.value, (nf - 1.0) / nf * c, "schedule-reuse rate"));
        for k in 1..=n {
            let w = drop_worst(&net, k, None)?.value;
            let it = select_k_iterative(&net, k, None)?.value;
            check = check
                .and_then(|_| at_least(w, 0.5f64.powi((n - k) as i32) * c, &format!("worst drop k={k}")))
                .and_then(|_| at_least(it, k as f64 / nf * c, &format!("iterative k={k}")));
        }
        Ok((format!("n={n} seed={s}"), check))
    })?;
    for n in 2..=n_max {
        let half = gen_half_tight(n, LinkCapacity::Unbounded)?;
        let f = drop_worst(&half, n - 1, Some(&[n]))?.fraction;
        out.push((format!("half-tight N={n}"), near(f, 0.5, "fraction after removing relay N")));
        let worst = gen_worst_case(n, LinkCapacity::Unbounded)?;
        let c = cap(&worst)?;
        let (_, best) = best_subset(&worst, n - 1, SolveOptions::default())?;
        let want = (n as f64 - 1.0) / n as f64;
        out.push((format!("worst-case N={n}"), near(best / c, want, "best drop-one fraction")));
    }
    Ok(out)
}

fn lemma5(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let sched = gen_random_schedule(n, s)?;
        let full = fixed_schedule_rate(&net, &sched)?.value;
        let mut sum = 0.0;
        for drop in 1..=n {
            let keep: Vec<usize> = (1..=n).filter(|&j| j != drop).collect();
            sum += fixed_schedule_rate(&net.subnetwork_of(&keep)?, &sched.derive_natural_of(&keep)?)?.value;
        }
        Ok((format!("n={n} seed={s}"), at_least(sum, (n as f64 - 1.0) * full, "drop-one rate sum")))
    })
}

fn fig2(n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    let opts = SolveOptions::default();
    (2..=n_max)
        .map(|n| {
            let net = gen_worst_case(n, LinkCapacity::Unbounded)?;
            let (c, _) = full_capacity(&net, opts)?;
            let (_, best) = best_subset(&net, n - 1, opts)?;
            let want = (n as f64 - 1.0) / n as f64;
            Ok((
                format!("N={n}"),
                near(c, 1.0, "full capacity").and_then(|_| near(best / c, want, "best (N-1) fraction")),
            ))
        })
        .collect()
}

fn theorem3(n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    let opts = SolveOptions::default();
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for t in (1..).take_while(|t| 4 * t - 2 <= n_max) {
        let n = 4 * t - 2;
        let tf = t as f64;
        let net = gen_worst_case(n, LinkCapacity::Unbounded)?;
        let (c, _) = full_capacity(&net, opts)?;
        let one = best_subset(&net, 1, opts)?.1 / c;
        let two = best_subset(&net, 2, opts)?.1 / c;
        let mut check = near(c, 1.0, "full capacity")
            .and_then(|_| near(one, tf / (4.0 * tf - 2.0), "best single fraction"))
            .and_then(|_| near(two, tf / (2.0 * tf - 1.0), "best pair fraction"));
        if let Some((p1, p2)) = prev {
            check = check.and_then(|_| holds(one < p1 && one > 0.25 && two < p2 && two > 0.5, "decreasing toward 1/4, 1/2"));
        }
        prev = Some((one, two));
        out.push((format!("t={t} N={n}"), check));
    }
    Ok(out)
}

fn sparsify(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    let n_max = n_max.min(4);
    run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let c = cap(&net)?;
        let check = match sparsify_schedule(&net, c) {
            Ok(sched) => {
                let rate = fixed_schedule_rate(&net, &sched)?.value;
                holds(sched.support_size() <= n + 1, "support <= n + 1")
                    .and_then(|_| at_least(rate, c, "sparse schedule rate"))
            }
            Err(Error::SparseScheduleNotFound { .. }) => Err((format!("support <= {}", n + 1), "none found".into())),
            Err(e) => return Err(e.into()),
        };
        Ok((format!("n={n} seed={s}"), check))
    })
}

fn edge_delta(args: &VerifyArgs, n_max: usize) -> anyhow::Result<Vec<(String, Check)>> {
    run_trials(args.trials, |i| {
        let (n, s) = trial(args.seed, i, n_max);
        let net = gen_random(n, s, 0.0, 1.0)?;
        let c = cap(&net)?;
        let mut check = Ok(());
        for j in 1..=n {
            let delta = net.uplink(j).value().min(net.downlink(j).value());
            let without = cap(&net.without(j)?)?;
            check = check.and_then(|_| at_least(without, c - delta, &format!("capacity without relay {j}")));
        }
        Ok((format!("n={n} seed={s}"), check))
    })
}

pub fn run_suite(args: &VerifyArgs) -> anyhow::Result<SuiteReport> {
    let n_max = args.n_max.unwrap_or(match args.suite {
        Suite::Fig2 => 10,
        Suite::Theorem3 => 18,
        _ => 5,
    });
    if n_max < 2 {
        bail!(Error::TooFewRelays { min: 2, got: n_max });
    }
    let results = match args.suite {
        Suite::Partition => partition(args, n_max)?,
        Suite::Submodular => submodular(args)?,
        Suite::Lemma3 => lemma3(args, n_max)?,
        Suite::Guarantees => guarantees(args, n_max)?,
        Suite::Lemma5 => lemma5(args, n_max)?,
        Suite::Fig2 => fig2(n_max)?,
        Suite::Theorem3 => theorem3(n_max)?,
        Suite::Sparsify => sparsify(args, n_max)?,
        Suite::EdgeDelta => edge_delta(args, n_max)?,
    };
    let instances = results.len();
    let failures: Vec<Failure> = results
        .into_iter()
        .filter_map(|(instance, check)| {
            check.err().map(|(expected, got)| Failure { instance, expected, got })
        })
        .collect();
    Ok(SuiteReport {
        suite: args.suite.name(),
        instances,
        passed: instances - failures.len(),
        failures,
    })
}

pub fn run(args: VerifyArgs) -> anyhow::Result<u8> {
    let report = run_suite(&args)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.failures.is_empty() { 0 } else { EXIT_VIOLATION })
}
