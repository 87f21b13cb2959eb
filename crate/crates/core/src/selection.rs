//! Relay-subset selection strategies and their worst-case guarantees.
//!
//! Relay indices in reports are 1-based positions in the network passed in.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;

use crate::capacity::{fixed_schedule_rate, hd_capacity_with, single_relay_capacities, SolveOptions};
use crate::error::{Error, Result};
use crate::model::{DiamondNetwork, Schedule};

/// Largest network searched by [`select_k_exhaustive`].
pub const EXHAUSTIVE_GUARD: usize = 10;
/// Slack allowed when comparing a fraction with its bound, and when
/// deciding that two candidate values tie.
pub const GUARANTEE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    WorstDrop,
    ScheduleReuse,
    Iterative,
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::WorstDrop,
        Strategy::ScheduleReuse,
        Strategy::Iterative,
        Strategy::Exhaustive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::WorstDrop => "worst-drop",
            Strategy::ScheduleReuse => "schedule-reuse",
            Strategy::Iterative => "iterative",
            Strategy::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueKind {
    /// HD approximate capacity of the selected subnetwork.
    Capacity,
    /// Rate of the selected subnetwork under the natural schedule.
    ScheduleRate,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Capacity => "capacity",
            ValueKind::ScheduleRate => "schedule-rate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionReport {
    pub strategy: Strategy,
    /// Kept relays, ascending.
    pub selected: Vec<usize>,
    pub k: usize,
    pub value_kind: ValueKind,
    pub value: f64,
    /// HD capacity of the full network.
    pub full_value: f64,
    pub fraction: f64,
    pub bound: f64,
    /// Rate of the full network under the schedule a rate-based strategy
    /// started from; the bound is relative to this.
    pub full_rate: Option<f64>,
    /// HD capacity of the selected subnetwork, for rate-based strategies.
    pub capacity: Option<f64>,
}

impl SelectionReport {
    /// The ratio the strategy's guarantee speaks about.
    pub fn certified_fraction(&self) -> f64 {
        match self.full_rate {
            Some(base) => fraction(self.value, base),
            None => self.fraction,
        }
    }

    pub fn meets_bound(&self) -> bool {
        self.certified_fraction() >= self.bound - GUARANTEE_TOL
    }
}

/// `value / full`, taken as 1 when nothing was there to lose and as 0 when a
/// finite value faces an infinite one.
pub fn fraction(value: f64, full: f64) -> f64 {
    if full == 0.0 || value == full {
        1.0
    } else if full.is_infinite() {
        0.0
    } else {
        value / full
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::InvalidK { k, n })
    } else {
        Ok(())
    }
}

/// Worst-case fraction a `k`-relay selection keeps out of `n` relays.
pub fn guarantee_bound(n: usize, k: usize, strategy: Strategy) -> Result<f64> {
    check_k(k, n)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok(match strategy {
        Strategy::WorstDrop => 0.5f64.powi((n - k) as i32),
        Strategy::Iterative => kf / nf,
        Strategy::ScheduleReuse | Strategy::Exhaustive => {
            if k == n {
                1.0
            } else if k == n - 1 {
                (nf - 1.0) / nf
            } else if k == 1 {
                (1.0 / nf).max(0.25)
            } else {
                (kf / nf).max(0.5)
            }
        }
    })
}

/// Relay with the smallest single-relay capacity, lowest index on ties.
pub fn worst_relay_index(net: &DiamondNetwork) -> usize {
    let caps = single_relay_capacities(net);
    let mut worst = 0;
    for (i, &c) in caps.iter().enumerate() {
        if c < caps[worst] {
            worst = i;
        }
    }
    worst + 1
}

fn capacity(net: &DiamondNetwork, opts: SolveOptions) -> Result<f64> {
    Ok(hd_capacity_with(net, opts)?.value)
}

fn complement(n: usize, removed: &[usize]) -> Vec<usize> {
    (1..=n).filter(|i| !removed.contains(i)).collect()
}

/// First index whose value is within tolerance of the largest one.
fn best_index(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = if max.is_finite() { GUARANTEE_TOL * max.abs().max(1.0) } else { 0.0 };
    values
        .iter()
        .position(|&v| v >= max - tol)
        .expect("non-empty candidate list")
}

pub fn drop_worst(net: &DiamondNetwork, k: usize, force_remove: Option<&[usize]>) -> Result<SelectionReport> {
    drop_worst_with(net, k, force_remove, SolveOptions::default())
}

/// Removes the `n - k` relays with the smallest single-relay capacities,
/// repeatedly taking the lowest index among ties, or exactly the relays in
/// `force_remove` when given.
pub fn drop_worst_with(
    net: &DiamondNetwork,
    k: usize,
    force_remove: Option<&[usize]>,
    opts: SolveOptions,
) -> Result<SelectionReport> {
    let n = net.n();
    check_k(k, n)?;
    let removed: Vec<usize> = match force_remove {
        Some(list) => {
            if let Some(&i) = list.iter().find(|&&i| i == 0 || i > n) {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            let distinct: Vec<usize> = list.iter().copied().sorted().dedup().collect();
            if n - k != distinct.len() {
                return Err(Error::InvalidK { k, n });
            }
            distinct
        }
        None => {
            let caps = single_relay_capacities(net);
            (1..=n)
                .sorted_by(|&a, &b| caps[a - 1].total_cmp(&caps[b - 1]).then(a.cmp(&b)))
                .take(n - k)
                .collect()
        }
    };
    let selected = complement(n, &removed);
    let full_value = capacity(net, opts)?;
    let value = capacity(&net.subnetwork_of(&selected)?, opts)?;
    Ok(SelectionReport {
        strategy: Strategy::WorstDrop,
        selected,
        k,
        value_kind: ValueKind::Capacity,
        value,
        full_value,
        fraction: fraction(value, full_value),
        bound: guarantee_bound(n, k, Strategy::WorstDrop)?,
        full_rate: None,
        capacity: None,
    })
}

/// Rates of the one-relay-removed subnetworks of `net[current]` under the
/// natural schedules derived from `sched` (defined on the full `net`).
fn drop_one_rates(net: &DiamondNetwork, sched: &Schedule, current: &[usize]) -> Result<Vec<f64>> {
    current
        .iter()
        .map(|&drop| {
            let keep: Vec<usize> = current.iter().copied().filter(|&i| i != drop).collect();
            let sub = net.subnetwork_of(&keep)?;
            let sub_sched = sched.derive_natural_of(&keep)?;
            Ok(fixed_schedule_rate(&sub, &sub_sched)?.value)
        })
        .collect()
}

pub fn select_drop_one_schedule_reuse(net: &DiamondNetwork) -> Result<SelectionReport> {
    select_drop_one_schedule_reuse_with(net, SolveOptions::default())
}

/// Drops the relay whose removal leaves the highest rate under the natural
/// schedule derived from an optimal full-network schedule.
pub fn select_drop_one_schedule_reuse_with(net: &DiamondNetwork, opts: SolveOptions) -> Result<SelectionReport> {
    let n = net.n();
    if n < 2 {
        return Err(Error::TooFewRelays { min: 2, got: n });
    }
    let full = hd_capacity_with(net, opts)?;
    let sched = full.optimal_schedule.expect("hd capacity carries a schedule");
    let full_rate = fixed_schedule_rate(net, &sched)?.value;
    let all: Vec<usize> = (1..=n).collect();
    let rates = drop_one_rates(net, &sched, &all)?;
    let drop = best_index(&rates) + 1;
    let selected = complement(n, &[drop]);
    let value = rates[drop - 1];
    Ok(SelectionReport {
        strategy: Strategy::ScheduleReuse,
        k: n - 1,
        value_kind: ValueKind::ScheduleRate,
        value,
        full_value: full.value,
        fraction: fraction(value, full.value),
        bound: guarantee_bound(n, n - 1, Strategy::ScheduleReuse)?,
        full_rate: Some(full_rate),
        capacity: Some(capacity(&net.subnetwork_of(&selected)?, opts)?),
        selected,
    })
}

pub fn select_k_iterative(net: &DiamondNetwork, k: usize, schedule: Option<&Schedule>) -> Result<SelectionReport> {
    select_k_iterative_with(net, k, schedule, SolveOptions::default())
}

/// `n - k` rounds of dropping the relay whose removal keeps the highest
/// natural-schedule rate. Each round must keep at least `(m-1)/m` of the
/// current rate; a shortfall is reported as [`Error::GuaranteeViolated`].
pub fn select_k_iterative_with(
    net: &DiamondNetwork,
    k: usize,
    schedule: Option<&Schedule>,
    opts: SolveOptions,
) -> Result<SelectionReport> {
    let n = net.n();
    check_k(k, n)?;
    let full = hd_capacity_with(net, opts)?;
    let sched = match schedule {
        Some(s) => {
            if s.n() != n {
                return Err(Error::MaskWidth { expected: n, got: s.n() });
            }
            s.clone()
        }
        None => full.optimal_schedule.clone().expect("hd capacity carries a schedule"),
    };
    let full_rate = fixed_schedule_rate(net, &sched)?.value;
    let mut current: Vec<usize> = (1..=n).collect();
    let mut rate = full_rate;
    while current.len() > k {
        let m = current.len() as f64;
        let rates = drop_one_rates(net, &sched, &current)?;
        let best = best_index(&rates);
        let need = (m - 1.0) / m * rate;
        let ok = rates[best] == rate || rates[best] >= need - GUARANTEE_TOL * need.abs().max(1.0);
        if !ok {
            return Err(Error::GuaranteeViolated(format!(
                "dropping one of {:?} keeps rate {} < {need}",
                current, rates[best]
            )));
        }
        current.remove(best);
        rate = rates[best];
    }
    let capacity_k = capacity(&net.subnetwork_of(&current)?, opts)?;
    Ok(SelectionReport {
        strategy: Strategy::Iterative,
        k,
        value_kind: ValueKind::ScheduleRate,
        value: rate,
        full_value: full.value,
        fraction: fraction(rate, full.value),
        bound: guarantee_bound(n, k, Strategy::Iterative)?,
        full_rate: Some(full_rate),
        capacity: Some(capacity_k),
        selected: current,
    })
}

pub fn select_k_exhaustive(net: &DiamondNetwork, k: usize) -> Result<SelectionReport> {
    select_k_exhaustive_with(net, k, EXHAUSTIVE_GUARD, SolveOptions::default())
}

/// Best `k`-relay subnetwork by HD capacity over all `C(n, k)` subsets;
/// lexicographically smallest among ties.
pub fn select_k_exhaustive_with(
    net: &DiamondNetwork,
    k: usize,
    max_relays: usize,
    opts: SolveOptions,
) -> Result<SelectionReport> {
    let n = net.n();
    if n > max_relays {
        return Err(Error::GuardExceeded {
            what: "exhaustive selection",
            n,
            guard: max_relays,
        });
    }
    check_k(k, n)?;
    let subsets: Vec<Vec<usize>> = (1..=n).combinations(k).collect();
    let values = subsets
        .par_iter()
        .map(|s| capacity(&net.subnetwork_of(s)?, opts))
        .collect::<Result<Vec<f64>>>()?;
    let best = best_index(&values);
    let full_value = capacity(net, opts)?;
    let value = values[best];
    Ok(SelectionReport {
        strategy: Strategy::Exhaustive,
        selected: subsets[best].clone(),
        k,
        value_kind: ValueKind::Capacity,
        value,
        full_value,
        fraction: fraction(value, full_value),
        bound: guarantee_bound(n, k, Strategy::Exhaustive)?,
        full_rate: None,
        capacity: None,
    })
}

/// Runs `strategy`; `k` must be `n - 1` for schedule reuse.
pub fn select(net: &DiamondNetwork, k: usize, strategy: Strategy, opts: SolveOptions) -> Result<SelectionReport> {
    match strategy {
        Strategy::WorstDrop => drop_worst_with(net, k, None, opts),
        Strategy::ScheduleReuse => {
            if k + 1 != net.n() {
                return Err(Error::InvalidK { k, n: net.n() });
            }
            select_drop_one_schedule_reuse_with(net, opts)
        }
        Strategy::Iterative => select_k_iterative_with(net, k, None, opts),
        Strategy::Exhaustive => select_k_exhaustive_with(net, k, EXHAUSTIVE_GUARD, opts),
    }
}
