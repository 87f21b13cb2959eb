//! Cut values, fixed-schedule rates, FD min-cut and the HD approximate
//! capacity as the value of a scheduler-versus-cut matrix game.
//!
//! Rows of the game are cuts `A` (relays on the destination side), columns
//! are states `s` (bit set = relay transmits), and the payoff is
//! `max_{i listening, i in A} l_i + max_{i transmitting, i not in A} r_i`.
//!
//! Unbounded links: a cut whose FD value `max_A l + max_{A^c} r` is
//! infinite is never a minimizer and is left out of every minimum. This is
//! the limit of the finite-link problem as the unbounded links grow: any
//! schedule can be perturbed to put a sliver of mass on a state where the
//! infinite link is active, which sends the row to infinity without
//! moving the others. Per-state entries of finite cuts are always finite.

mod sparsify;

use std::env;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Scalar};
use crate::model::mask::{full_bits, CutMask, StateMask};
use crate::model::{DiamondNetwork, LinkCapacity, Schedule};

pub use sparsify::{sparsify_schedule, sparsify_schedule_with};

/// Default largest relay count for which the 2^n x 2^n game is solved.
pub const DEFAULT_LP_GUARD: usize = 12;
/// Environment variable overriding [`DEFAULT_LP_GUARD`].
pub const LP_GUARD_ENV: &str = "HDNET_LP_GUARD";
/// Largest relay count for the brute-force cut enumerations.
pub const ENUM_GUARD: usize = 24;
/// Absolute tolerance (scaled by the value when above one) for tight cuts.
pub const TIGHT_TOL: f64 = 1e-9;

pub fn default_lp_guard() -> usize {
    env::var(LP_GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_LP_GUARD)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub arithmetic: Arithmetic,
    pub max_relays: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            arithmetic: Arithmetic::Float,
            max_relays: default_lp_guard(),
        }
    }
}

/// Exact solution carried alongside the float summary in rational mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub value: BigRational,
    pub schedule: Vec<(StateMask, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    /// Bits per channel use; `+inf` when every cut is infinite.
    pub value: f64,
    /// An optimal schedule (HD only).
    pub optimal_schedule: Option<Schedule>,
    /// Cuts attaining the minimum, in increasing bit order.
    pub tight_cuts: Vec<CutMask>,
    pub arithmetic: Arithmetic,
    pub exact: Option<ExactSolution>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateValue {
    pub value: f64,
    pub min_cut: CutMask,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualResult {
    pub value: f64,
    /// Mixed strategy of the cut player, positive entries only.
    pub cut_distribution: Vec<(CutMask, f64)>,
}

#[inline]
fn tolerance_for(v: f64) -> f64 {
    TIGHT_TOL * v.abs().max(1.0)
}

/// `max` of `vals[i]` over the set bits of `bits`, 0 when empty.
#[inline]
fn masked_max(vals: &[f64], bits: u32) -> f64 {
    crate::model::mask::relays_of(bits).fold(0.0, |m, i| m.max(vals[i - 1]))
}

/// Lookup tables of masked maxima for every subset.
fn max_tables(vals: &[f64]) -> Vec<f64> {
    let size = 1usize << vals.len();
    let mut t = vec![0.0f64; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        t[mask] = t[mask & (mask - 1)].max(vals[low]);
    }
    t
}

fn check_width(net: &DiamondNetwork, width: usize) -> Result<()> {
    if width != net.n() {
        Err(Error::MaskWidth {
            expected: net.n(),
            got: width,
        })
    } else {
        Ok(())
    }
}

fn guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::GuardExceeded { what, n, guard: limit })
    } else {
        Ok(())
    }
}

/// Payoff of `state` against `cut`; `+inf` when an unbounded link takes part.
pub fn cut_state_value(net: &DiamondNetwork, cut: CutMask, state: StateMask) -> Result<f64> {
    check_width(net, cut.width())?;
    check_width(net, state.width())?;
    let (a, s) = (cut.bits(), state.bits());
    let listen_in_a = a & !s & full_bits(net.n());
    let transmit_out_a = !a & s & full_bits(net.n());
    Ok(masked_max(&net.uplink_values(), listen_in_a) + masked_max(&net.downlink_values(), transmit_out_a))
}

/// FD value of a cut, `max_{i in A} l_i + max_{i not in A} r_i`.
pub fn fd_cut_value(net: &DiamondNetwork, cut: CutMask) -> Result<f64> {
    check_width(net, cut.width())?;
    let a = cut.bits();
    Ok(masked_max(&net.uplink_values(), a) + masked_max(&net.downlink_values(), !a & full_bits(net.n())))
}

/// Smallest `(value, bits)` pair under `total_cmp`, so ties go to the
/// lowest mask regardless of how the reduction was split.
fn min_pair(a: (f64, u32), b: (f64, u32)) -> (f64, u32) {
    match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}

/// Rate achieved by a fixed schedule: the minimum over cuts of the
/// schedule-averaged cut value.
pub fn fixed_schedule_rate(net: &DiamondNetwork, sched: &Schedule) -> Result<RateValue> {
    let n = net.n();
    check_width(net, sched.n())?;
    guard("fixed_schedule_rate cut enumeration", n, ENUM_GUARD)?;
    let l = net.uplink_values();
    let r = net.downlink_values();
    let full = full_bits(n);
    let entries: Vec<(u32, f64)> = sched.raw_entries().collect();
    let eval = |a: u32| -> (f64, u32) {
        let ac = !a & full;
        if masked_max(&l, a).is_infinite() || masked_max(&r, ac).is_infinite() {
            return (f64::INFINITY, a);
        }
        let v = entries
            .iter()
            .map(|&(s, p)| p * (masked_max(&l, a & !s) + masked_max(&r, ac & s)))
            .sum::<f64>();
        (v, a)
    };
    let (value, bits) = if n >= 12 {
        (0..=full).into_par_iter().map(eval).reduce(|| (f64::INFINITY, u32::MAX), min_pair)
    } else {
        (0..=full).map(eval).fold((f64::INFINITY, u32::MAX), min_pair)
    };
    let bits = if bits == u32::MAX { 0 } else { bits };
    Ok(RateValue {
        value,
        min_cut: CutMask::raw(bits, n),
    })
}

/// FD capacity by enumerating all cuts.
pub fn fd_capacity(net: &DiamondNetwork) -> Result<CapacityResult> {
    let n = net.n();
    guard("fd_capacity cut enumeration", n, ENUM_GUARD)?;
    let l = net.uplink_values();
    let r = net.downlink_values();
    let full = full_bits(n);
    let values: Vec<f64> = (0..=full)
        .into_par_iter()
        .map(|a| masked_max(&l, a) + masked_max(&r, !a & full))
        .collect();
    let value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tight_cuts = if value.is_finite() {
        let tol = tolerance_for(value);
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= value + tol)
            .map(|(a, _)| CutMask::raw(a as u32, n))
            .collect()
    } else {
        Vec::new()
    };
    Ok(CapacityResult {
        value,
        optimal_schedule: None,
        tight_cuts,
        arithmetic: Arithmetic::Float,
        exact: None,
    })
}

/// FD capacity in `O(n log n)`. Some optimal cut puts on the destination
/// side exactly the relays whose uplink is below a threshold, so only the
/// `n + 1` sorted prefixes need checking.
pub fn fd_capacity_fast(net: &DiamondNetwork) -> f64 {
    let mut links: Vec<(f64, f64)> = net
        .uplinks()
        .iter()
        .zip(net.downlinks())
        .map(|(l, r)| (l.value(), r.value()))
        .collect();
    links.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = links.len();
    let mut suffix_r = vec![0.0f64; n + 1];
    for k in (0..n).rev() {
        suffix_r[k] = suffix_r[k + 1].max(links[k].1);
    }
    (0..=n)
        .map(|k| {
            let lmax = if k == 0 { 0.0 } else { links[k - 1].0 };
            lmax + suffix_r[k]
        })
        .fold(f64::INFINITY, f64::min)
}

/// `l r / (l + r)`, the capacity of a lone half-duplex relay; 0 when both
/// links are 0.
pub fn single_relay_capacity(l: f64, r: f64) -> f64 {
    if l + r == 0.0 {
        0.0
    } else {
        l * r / (l + r)
    }
}

/// As [`single_relay_capacity`], letting either link be unbounded.
pub fn single_relay_capacity_links(l: LinkCapacity, r: LinkCapacity) -> f64 {
    match (l, r) {
        (LinkCapacity::Finite(l), LinkCapacity::Finite(r)) => single_relay_capacity(l, r),
        (LinkCapacity::Unbounded, LinkCapacity::Finite(r)) => r,
        (LinkCapacity::Finite(l), LinkCapacity::Unbounded) => l,
        (LinkCapacity::Unbounded, LinkCapacity::Unbounded) => f64::INFINITY,
    }
}

/// Single-relay capacities of every relay, in index order.
pub fn single_relay_capacities(net: &DiamondNetwork) -> Vec<f64> {
    net.uplinks()
        .iter()
        .zip(net.downlinks())
        .map(|(&l, &r)| single_relay_capacity_links(l, r))
        .collect()
}

/// The finite rows of the game.
pub(crate) struct Payoff {
    pub n: usize,
    pub cuts: Vec<u32>,
    /// `cuts.len()` rows of `2^n` entries.
    pub rows: Vec<Vec<f64>>,
}

impl Payoff {
    pub fn build(net: &DiamondNetwork) -> Self {
        let n = net.n();
        let full = full_bits(n);
        let ml = max_tables(&net.uplink_values());
        let mr = max_tables(&net.downlink_values());
        let cuts: Vec<u32> = (0..=full)
            .filter(|&a| ml[a as usize].is_finite() && mr[(!a & full) as usize].is_finite())
            .collect();
        let rows = cuts
            .par_iter()
            .map(|&a| {
                let ac = !a & full;
                (0..=full)
                    .map(|s| ml[(a & !s) as usize] + mr[(ac & s) as usize])
                    .collect()
            })
            .collect();
        Self { n, cuts, rows }
    }

    pub fn states(&self) -> usize {
        1 << self.n
    }

    /// Per-row exact payoffs.
    pub fn rational_rows(&self, net: &DiamondNetwork) -> Vec<Vec<BigRational>> {
        let conv = |c: &LinkCapacity| match c {
            LinkCapacity::Finite(v) => Some(<BigRational as Scalar>::from_f64(*v)),
            LinkCapacity::Unbounded => None,
        };
        let l: Vec<Option<BigRational>> = net.uplinks().iter().map(conv).collect();
        let r: Vec<Option<BigRational>> = net.downlinks().iter().map(conv).collect();
        let mx = |vals: &[Option<BigRational>], bits: u32| -> BigRational {
            crate::model::mask::relays_of(bits).fold(BigRational::zero(), |m, i| {
                let v = vals[i - 1].as_ref().expect("finite cut touches only finite links");
                if *v > m {
                    v.clone()
                } else {
                    m
                }
            })
        };
        let full = full_bits(self.n);
        self.cuts
            .iter()
            .map(|&a| {
                let ac = !a & full;
                (0..=full).map(|s| mx(&l, a & !s) + mx(&r, ac & s)).collect()
            })
            .collect()
    }
}

/// Scheduler LP: variables `(R, lambda_0, ..)`, maximize `R` subject to
/// `R - sum_s lambda_s M[A][s] <= 0` per finite cut and `sum lambda <= 1`.
/// Payoffs are non-negative so the rhs is too and no phase one is needed.
pub(crate) fn scheduler_lp<S: Scalar>(rows: &[Vec<S>], columns: &[usize]) -> LinearProgram<S> {
    let width = columns.len() + 1;
    let mut constraints: Vec<Vec<S>> = rows
        .iter()
        .map(|row| {
            // Rows have zero rhs, so rescaling them to unit size is free
            // and keeps pivots comparable when some links are huge.
            let big = columns.iter().map(|&s| &row[s]).fold(S::one(), |m, v| if *v > m { v.clone() } else { m });
            let mut c = Vec::with_capacity(width);
            c.push(S::one() / big.clone());
            c.extend(columns.iter().map(|&s| -(row[s].clone() / big.clone())));
            c
        })
        .collect();
    let mut sum = vec![S::one(); width];
    sum[0] = S::zero();
    constraints.push(sum);
    let mut rhs = vec![S::zero(); rows.len()];
    rhs.push(S::one());
    let mut objective = vec![S::zero(); width];
    objective[0] = S::one();
    LinearProgram {
        objective,
        constraints,
        rhs,
    }
}

/// Solves the scheduler LP restricted to `columns` and returns the
/// normalised schedule weights (one per column).
pub(crate) fn solve_schedule<S: Scalar>(rows: &[Vec<S>], columns: &[usize]) -> Result<Vec<S>> {
    let lp = scheduler_lp(rows, columns);
    let sol = match lp::solve(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Unbounded => unreachable!("R is bounded by the probability constraint"),
    };
    let mut weights: Vec<S> = sol.primal[1..].iter().map(|w| if w.is_neg() { S::zero() } else { w.clone() }).collect();
    let total = weights.iter().fold(S::zero(), |a, b| a + b.clone());
    if total.is_pos() {
        for w in &mut weights {
            *w = w.clone() / total.clone();
        }
    } else {
        // Every schedule is optimal (the value is zero); pick uniform.
        let k = S::from_f64(columns.len() as f64);
        weights = vec![S::one() / k; columns.len()];
    }
    Ok(weights)
}

fn row_value(row: &[f64], weights: &[(usize, f64)]) -> f64 {
    weights.iter().map(|&(s, p)| p * row[s]).sum()
}

pub fn hd_capacity(net: &DiamondNetwork) -> Result<CapacityResult> {
    hd_capacity_with(net, SolveOptions::default())
}

/// HD approximate capacity: `max_lambda min_A sum_s lambda_s M[A][s]`.
pub fn hd_capacity_with(net: &DiamondNetwork, opts: SolveOptions) -> Result<CapacityResult> {
    let n = net.n();
    guard("hd_capacity LP", n, opts.max_relays)?;
    let payoff = Payoff::build(net);
    let states = payoff.states();
    if payoff.cuts.is_empty() {
        return Ok(CapacityResult {
            value: f64::INFINITY,
            optimal_schedule: Some(Schedule::uniform(n)?),
            tight_cuts: Vec::new(),
            arithmetic: opts.arithmetic,
            exact: None,
        });
    }
    let columns: Vec<usize> = (0..states).collect();
    match opts.arithmetic {
        Arithmetic::Float => {
            let weights = solve_schedule(&payoff.rows, &columns)?;
            let schedule = Schedule::from_dense(n, &weights)?;
            let support: Vec<(usize, f64)> = schedule.raw_entries().map(|(s, p)| (s as usize, p)).collect();
            let values: Vec<f64> = payoff.rows.iter().map(|row| row_value(row, &support)).collect();
            let value = values.iter().copied().fold(f64::INFINITY, f64::min);
            let tol = tolerance_for(value);
            let tight_cuts = payoff
                .cuts
                .iter()
                .zip(&values)
                .filter(|(_, &v)| v <= value + tol)
                .map(|(&a, _)| CutMask::raw(a, n))
                .collect();
            Ok(CapacityResult {
                value,
                optimal_schedule: Some(schedule),
                tight_cuts,
                arithmetic: Arithmetic::Float,
                exact: None,
            })
        }
        Arithmetic::Rational => {
            let rows = payoff.rational_rows(net);
            let weights = solve_schedule(&rows, &columns)?;
            let values: Vec<BigRational> = rows
                .iter()
                .map(|row| {
                    weights
                        .iter()
                        .zip(row)
                        .filter(|(w, _)| !w.is_zero())
                        .fold(BigRational::zero(), |acc, (w, m)| acc + w * m)
                })
                .collect();
            let value = values.iter().min().expect("at least one finite cut").clone();
            let tight_cuts = payoff
                .cuts
                .iter()
                .zip(&values)
                .filter(|(_, v)| **v == value)
                .map(|(&a, _)| CutMask::raw(a, n))
                .collect();
            let exact_schedule: Vec<(StateMask, BigRational)> = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(s, w)| (StateMask::raw(s as u32, n), w.clone()))
                .collect();
            let dense: Vec<f64> = weights.iter().map(Scalar::to_f64).collect();
            Ok(CapacityResult {
                value: Scalar::to_f64(&value),
                optimal_schedule: Some(Schedule::from_dense(n, &dense)?),
                tight_cuts,
                arithmetic: Arithmetic::Rational,
                exact: Some(ExactSolution {
                    value,
                    schedule: exact_schedule,
                }),
            })
        }
    }
}

pub fn dual_capacity(net: &DiamondNetwork) -> Result<DualResult> {
    dual_capacity_with(net, default_lp_guard())
}

/// Value of the game from the cut player's side, solved as its own LP:
/// `maximize sum_A x_A` subject to `sum_A x_A M[A][s] <= 1` for every
/// state, giving value `1 / opt` and strategy `x / opt`.
pub fn dual_capacity_with(net: &DiamondNetwork, max_relays: usize) -> Result<DualResult> {
    let n = net.n();
    guard("dual_capacity LP", n, max_relays)?;
    let payoff = Payoff::build(net);
    if payoff.cuts.is_empty() {
        return Ok(DualResult {
            value: f64::INFINITY,
            cut_distribution: Vec::new(),
        });
    }
    if let Some(i) = payoff.rows.iter().position(|row| row.iter().all(|&v| v == 0.0)) {
        return Ok(DualResult {
            value: 0.0,
            cut_distribution: vec![(CutMask::raw(payoff.cuts[i], n), 1.0)],
        });
    }
    let states = payoff.states();
    let lp = LinearProgram {
        objective: vec![1.0; payoff.cuts.len()],
        constraints: (0..states)
            .map(|s| payoff.rows.iter().map(|row| row[s]).collect())
            .collect(),
        rhs: vec![1.0; states],
    };
    let sol = match lp::solve(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        // Only possible with an all-zero row, handled above.
        LpOutcome::Unbounded => unreachable!("no all-zero payoff row"),
    };
    let total: f64 = sol.primal.iter().map(|x| x.max(0.0)).sum();
    let mu: Vec<f64> = sol.primal.iter().map(|x| x.max(0.0) / total).collect();
    let value = (0..states)
        .map(|s| mu.iter().zip(&payoff.rows).map(|(m, row)| m * row[s]).sum::<f64>())
        .fold(0.0, f64::max);
    let cut_distribution = payoff
        .cuts
        .iter()
        .zip(&mu)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&a, &m)| (CutMask::raw(a, n), m))
        .collect();
    Ok(DualResult {
        value,
        cut_distribution,
    })
}
