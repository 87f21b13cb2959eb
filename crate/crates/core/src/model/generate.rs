//! Constructed and random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{DiamondNetwork, LinkCapacity, Schedule, StateMask};

fn need_two(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewRelays { min: 2, got: n })
    } else {
        Ok(())
    }
}

/// The network on which every (N-1)-relay subnetwork keeps exactly
/// `(N-1)/N` of the full capacity (which is 1):
/// `l_i = l_{h+i} = 2i/N`, `r_i = r_{h+i} = (N-2i+2)/N` for `i` in `1..=h`,
/// `h = floor(N/2)`, plus `l_N = big_l`, `r_N = 1/N` when N is odd.
pub fn gen_worst_case(n: usize, big_l: LinkCapacity) -> Result<DiamondNetwork> {
    need_two(n)?;
    let half = n / 2;
    let nf = n as f64;
    let mut l = vec![LinkCapacity::Finite(0.0); n];
    let mut r = vec![LinkCapacity::Finite(0.0); n];
    for i in 1..=half {
        let li = LinkCapacity::finite(2.0 * i as f64 / nf)?;
        let ri = LinkCapacity::finite((nf - 2.0 * i as f64 + 2.0) / nf)?;
        l[i - 1] = li;
        l[half + i - 1] = li;
        r[i - 1] = ri;
        r[half + i - 1] = ri;
    }
    if n % 2 == 1 {
        l[n - 1] = big_l;
        r[n - 1] = LinkCapacity::finite(1.0 / nf)?;
    }
    Ok(DiamondNetwork::new(l, r)?.with_name(format!("worst-case-{n}")))
}

/// Every single-relay capacity is 1/2 and the full capacity is 1, but
/// dropping relay N leaves only 1/2:
/// `l_i = 1/2, r_i = big_l` for `i < N`, `l_N = big_l, r_N = 1/2`.
pub fn gen_half_tight(n: usize, big_l: LinkCapacity) -> Result<DiamondNetwork> {
    need_two(n)?;
    let mut l = vec![LinkCapacity::Finite(0.5); n];
    let mut r = vec![big_l; n];
    l[n - 1] = big_l;
    r[n - 1] = LinkCapacity::Finite(0.5);
    Ok(DiamondNetwork::new(l, r)?.with_name(format!("half-tight-{n}")))
}

/// Two equiprobable complementary states. For even N the first half of
/// the relays listens while the second half transmits, then they swap.
/// For odd N relay N transmits in both states and relays
/// `1..=(N-1)/2` and `(N+1)/2..=N-1` alternate.
pub fn gen_two_phase_schedule(n: usize) -> Result<Schedule> {
    need_two(n)?;
    let half = n / 2;
    let first_half: u32 = (1 << half) - 1;
    let second_half: u32 = ((1 << (2 * half)) - 1) & !first_half;
    let extra: u32 = if n % 2 == 1 { 1 << (n - 1) } else { 0 };
    // bit set = transmitting
    let a = StateMask::new(second_half | extra, n)?;
    let b = StateMask::new(first_half | extra, n)?;
    Schedule::new(n, [(a, 0.5), (b, 0.5)])
}

/// 2N link capacities drawn independently and uniformly from `[lo, hi]`.
pub fn gen_random(n: usize, seed: u64, lo: f64, hi: f64) -> Result<DiamondNetwork> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::InvalidRange { lo, hi });
    }
    if n == 0 {
        return Err(Error::TooFewRelays { min: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_| LinkCapacity::Finite(rng.gen_range(lo..=hi));
    let l: Vec<_> = (0..n).map(&mut draw).collect();
    let r: Vec<_> = (0..n).map(&mut draw).collect();
    Ok(DiamondNetwork::new(l, r)?.with_name(format!("random-{n}-{seed}")))
}

/// Random network whose links are small-denominator rationals
/// `p / q` with `q` in `1..=max_den` and value at most `max_value`.
pub fn gen_random_rational(n: usize, seed: u64, max_den: u32, max_value: u32) -> Result<DiamondNetwork> {
    if n == 0 {
        return Err(Error::TooFewRelays { min: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_| {
        let q = rng.gen_range(1..=max_den.max(1));
        let p = rng.gen_range(0..=max_value * q);
        LinkCapacity::Finite(p as f64 / q as f64)
    };
    let l: Vec<_> = (0..n).map(&mut draw).collect();
    let r: Vec<_> = (0..n).map(&mut draw).collect();
    Ok(DiamondNetwork::new(l, r)?.with_name(format!("rational-{n}-{seed}")))
}

/// A random schedule over `n` relays (Dirichlet-like weights with a
/// random sparse support).
pub fn gen_random_schedule(n: usize, seed: u64) -> Result<Schedule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5c4e_d01e);
    let count = 1usize << n;
    let density = rng.gen_range(0.1..=1.0);
    let mut w: Vec<f64> = (0..count)
        .map(|_| {
            if rng.gen_bool(density) {
                -rng.gen_range(f64::EPSILON..1.0f64).ln()
            } else {
                0.0
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..count)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Schedule::from_dense(n, &w)
}
