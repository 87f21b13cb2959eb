use itertools::Itertools;

use super::{guard, solve_schedule, tolerance_for, Payoff};
use crate::error::{Error, Result};
use crate::model::{DiamondNetwork, Schedule, StateMask};

/// Default largest relay count for the exhaustive support search.
pub const SPARSIFY_GUARD: usize = 4;

pub fn sparsify_schedule(net: &DiamondNetwork, target: f64) -> Result<Schedule> {
    sparsify_schedule_with(net, target, SPARSIFY_GUARD)
}

/// Finds a schedule with at most `n + 1` active states whose rate reaches
/// `target` (normally the HD capacity), trying supports by increasing size
/// and then in lexicographic order. Returns the first one found.
pub fn sparsify_schedule_with(net: &DiamondNetwork, target: f64, max_relays: usize) -> Result<Schedule> {
    let n = net.n();
    guard("sparsify_schedule support search", n, max_relays)?;
    let payoff = Payoff::build(net);
    if payoff.cuts.is_empty() {
        return Ok(Schedule::point(StateMask::raw(0, n)));
    }
    let tol = tolerance_for(target);
    let max_support = n + 1;
    for size in 1..=max_support.min(payoff.states()) {
        for support in (0..payoff.states()).combinations(size) {
            let weights = solve_schedule(&payoff.rows, &support)?;
            let value = payoff
                .rows
                .iter()
                .map(|row| support.iter().zip(&weights).map(|(&s, &w)| w * row[s]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if value >= target - tol {
                let entries = support
                    .iter()
                    .zip(&weights)
                    .map(|(&s, &w)| (StateMask::raw(s as u32, n), w));
                let mut sched = Schedule::new(n, entries)?;
                sched.renormalize();
                return Ok(sched);
            }
        }
    }
    Err(Error::SparseScheduleNotFound { max_support, target })
}
