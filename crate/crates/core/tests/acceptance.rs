//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use hdnet_core::capacity::{
    dual_capacity, fd_capacity, fd_capacity_fast, fixed_schedule_rate, hd_capacity, hd_capacity_with,
    single_relay_capacities, single_relay_capacity, single_relay_capacity_links, sparsify_schedule, Arithmetic,
    SolveOptions,
};
use hdnet_core::model::generate::{
    gen_half_tight, gen_random, gen_random_rational, gen_random_schedule, gen_two_phase_schedule, gen_worst_case,
};
use hdnet_core::selection::{
    drop_worst, select_drop_one_schedule_reuse, select_k_exhaustive, select_k_iterative,
};
use hdnet_core::submodular::{
    all_cut_families, check_lemma2, check_lemma3, check_property1, complement_duality_check, random_cut_family,
    random_family, SetFamily, SetFunction,
};
use hdnet_core::{DiamondNetwork, LinkCapacity, RelaySet};
use itertools::Itertools;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn cap(net: &DiamondNetwork) -> f64 {
    hd_capacity(net).expect("hd capacity").value
}

fn sub_cap(net: &DiamondNetwork, keep: &[usize]) -> f64 {
    cap(&net.subnetwork_of(keep).expect("subnetwork"))
}

fn ac1() -> Outcome {
    for n in 2..=10 {
        let net = gen_worst_case(n, LinkCapacity::Unbounded).unwrap();
        let full = cap(&net);
        ensure(close(full, 1.0, 1e-9), || format!("N={n}: capacity {full}"))?;
        let best = (1..=n)
            .map(|drop| sub_cap(&net, &(1..=n).filter(|&i| i != drop).collect_vec()))
            .fold(0.0, f64::max);
        let want = (n as f64 - 1.0) / n as f64;
        ensure(close(best / full, want, 1e-9), || format!("N={n}: best ratio {} vs {want}", best / full))?;
    }
    Ok("N=2..10 capacity 1, best (N-1)-subset ratio (N-1)/N".into())
}

fn ac2() -> Outcome {
    for n in 2..=8 {
        for big_l in [LinkCapacity::Unbounded, LinkCapacity::Finite(1e6)] {
            let net = gen_half_tight(n, big_l).unwrap();
            let rep = drop_worst(&net, n - 1, Some(&[n])).unwrap();
            // with finite big L the full capacity sits a hair below 1
            let tol = if big_l.is_unbounded() { 1e-9 } else { 1e-6 };
            ensure(close(rep.fraction, 0.5, tol), || format!("N={n}, L={big_l}: fraction {}", rep.fraction))?;
            for i in 1..n {
                let v = sub_cap(&net, &[i, n]);
                ensure(v >= 1.0 - 1e-6, || format!("N={n}, L={big_l}: pair {{{i},{n}}} gives {v}"))?;
            }
        }
    }
    Ok("N=2..8 removing relay N keeps 1/2, pairs with relay N keep >= 1-1e-6".into())
}

fn certify_unit_capacity(net: &DiamondNetwork) -> Result<(), String> {
    let n = net.n();
    let lower = fixed_schedule_rate(net, &gen_two_phase_schedule(n).unwrap()).unwrap().value;
    let upper = fd_capacity(net).unwrap().value;
    ensure(close(lower, 1.0, 1e-9) && close(upper, 1.0, 1e-9), || {
        format!("N={n}: sandwich [{lower}, {upper}]")
    })
}

fn ac3() -> Outcome {
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for t in 1..=5usize {
        let n = 4 * t - 2;
        let tf = t as f64;
        let net = gen_worst_case(n, LinkCapacity::Unbounded).unwrap();
        let (one, two) = if t <= 3 {
            let full = cap(&net);
            ensure(close(full, 1.0, 1e-9), || format!("N={n}: capacity {full}"))?;
            (
                select_k_exhaustive(&net, 1).unwrap().fraction,
                select_k_exhaustive(&net, 2).unwrap().fraction,
            )
        } else {
            certify_unit_capacity(&net)?;
            let one = single_relay_capacities(&net).into_iter().fold(0.0, f64::max);
            let two = (1..=n)
                .tuple_combinations()
                .map(|(a, b)| sub_cap(&net, &[a, b]))
                .fold(0.0, f64::max);
            (one, two)
        };
        ensure(close(one, tf / (4.0 * tf - 2.0), 1e-9), || format!("t={t}: best single {one}"))?;
        ensure(close(two, tf / (2.0 * tf - 1.0), 1e-9), || format!("t={t}: best pair {two}"))?;
        singles.push(one);
        pairs.push(two);
    }
    let decreasing = |v: &[f64], limit: f64| v.windows(2).all(|w| w[1] < w[0]) && v.iter().all(|&x| x > limit);
    ensure(decreasing(&singles, 0.25) && decreasing(&pairs, 0.5), || {
        format!("not monotone toward 1/4, 1/2: {singles:?} {pairs:?}")
    })?;
    Ok("t=1..5 single t/(4t-2), pair t/(2t-1); N=14,18 certified by sandwich".into())
}

fn ac4() -> Outcome {
    const TOL: f64 = 1e-8;
    let mut nets = 0;
    let mut schedules = 0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 5) as usize;
        let net = gen_random(n, seed, 0.0, 1.0).unwrap();
        let full = hd_capacity(&net).unwrap();
        let c = full.value;
        let nf = n as f64;
        let tag = |what: &str| format!("seed {seed} (n={n}): {what}");

        let t1 = drop_worst(&net, n - 1, None).unwrap();
        ensure(t1.value >= 0.5 * c - TOL, || tag("worst-relay drop below 1/2"))?;

        let drops: Vec<f64> = (1..=n).map(|i| cap(&net.without(i).unwrap())).collect();
        let best_drop = drops.iter().copied().fold(0.0, f64::max);
        ensure(best_drop >= (nf - 1.0) / nf * c - TOL, || tag("best drop-one below (N-1)/N"))?;
        let reuse = select_drop_one_schedule_reuse(&net).unwrap();
        ensure(reuse.value >= (nf - 1.0) / nf * c - TOL, || tag("schedule reuse below (N-1)/N"))?;

        for k in 1..=n {
            let w = drop_worst(&net, k, None).unwrap();
            ensure(w.value >= 0.5f64.powi((n - k) as i32) * c - TOL, || tag(&format!("worst drop k={k}")))?;
            let it = select_k_iterative(&net, k, None).unwrap();
            ensure(it.value >= k as f64 / nf * c - TOL, || tag(&format!("iterative k={k}")))?;
        }

        let lambda_star = full.optimal_schedule.clone().unwrap();
        let mut scheds = vec![lambda_star];
        if seed < 200 {
            scheds.push(gen_random_schedule(n, seed).unwrap());
        }
        for sched in &scheds {
            schedules += 1;
            let r_full = fixed_schedule_rate(&net, sched).unwrap().value;
            let rate_of = |keep: &[usize]| {
                let sub = net.subnetwork_of(keep).unwrap();
                fixed_schedule_rate(&sub, &sched.derive_natural_of(keep).unwrap()).unwrap().value
            };
            let sum: f64 = (1..=n).map(|i| rate_of(&(1..=n).filter(|&j| j != i).collect_vec())).sum();
            ensure(sum >= (nf - 1.0) * r_full - TOL, || tag("drop-one rate sum"))?;
            if n <= 5 {
                for bits in 1..(1u32 << n) - 1 {
                    let k = RelaySet::new(bits, n).unwrap();
                    let keep: Vec<usize> = k.relays().collect();
                    let rest: Vec<usize> = k.complement().relays().collect();
                    ensure(r_full <= rate_of(&keep) + rate_of(&rest) + TOL, || tag("rate partition"))?;
                }
            }
        }
        if n <= 5 {
            for bits in 1..(1u32 << n) - 1 {
                let k = RelaySet::new(bits, n).unwrap();
                let sum = cap(&net.subnetwork(k).unwrap()) + cap(&net.subnetwork(k.complement()).unwrap());
                ensure(c <= sum + TOL, || tag("capacity partition"))?;
            }
        }
        for i in 1..=n {
            let delta = net.uplink(i).value().min(net.downlink(i).value());
            ensure(drops[i - 1] >= c - delta - TOL, || tag(&format!("edge removal at relay {i}")))?;
        }
        nets += 1;
    }
    Ok(format!("{nets} random networks, {schedules} schedules, zero violations"))
}

fn ac5() -> Outcome {
    for seed in 0..200u64 {
        let n = 1 + (seed % 6) as usize;
        let net = gen_random(n, 10_000 + seed, 0.0, 1.0).unwrap();
        let (p, d) = (cap(&net), dual_capacity(&net).unwrap().value);
        ensure(close(p, d, 1e-6), || format!("seed {seed}: primal {p} dual {d}"))?;
    }
    for seed in 0..1000u64 {
        let n = 1 + (seed % 12) as usize;
        let net = gen_random(n, 20_000 + seed, 0.0, 1.0).unwrap();
        let (fast, slow) = (fd_capacity_fast(&net), fd_capacity(&net).unwrap().value);
        ensure(fast == slow, || format!("seed {seed}: fd fast {fast} vs {slow}"))?;
    }
    let rational = SolveOptions {
        arithmetic: Arithmetic::Rational,
        ..SolveOptions::default()
    };
    for seed in 0..50u64 {
        let n = 1 + (seed % 5) as usize;
        let net = gen_random_rational(n, 30_000 + seed, 8, 3).unwrap();
        let (f, r) = (cap(&net), hd_capacity_with(&net, rational).unwrap().value);
        ensure(close(f, r, 1e-6), || format!("seed {seed}: float {f} rational {r}"))?;
    }
    for seed in 0..200u64 {
        let net = gen_random(1, 40_000 + seed, 0.0, 4.0).unwrap();
        let (l, r) = (net.uplink(1).value(), net.downlink(1).value());
        let c = cap(&net);
        ensure(close(c, single_relay_capacity(l, r), 1e-12), || format!("single relay {l},{r}: {c}"))?;
    }
    for (l, r) in [
        (LinkCapacity::Unbounded, LinkCapacity::Finite(0.7)),
        (LinkCapacity::Finite(0.3), LinkCapacity::Unbounded),
        (LinkCapacity::Finite(0.0), LinkCapacity::Finite(0.0)),
        (LinkCapacity::Unbounded, LinkCapacity::Unbounded),
    ] {
        let net = DiamondNetwork::new(vec![l], vec![r]).unwrap();
        let c = cap(&net);
        ensure(c == single_relay_capacity_links(l, r), || format!("single relay {l},{r}: {c}"))?;
    }
    Ok("dual=primal on 200, fd fast=enumeration on 1000, rational=float on 50, single-relay closed form".into())
}

fn ac6() -> Outcome {
    let fam = SetFamily::from_elements(7, &[vec![1, 2, 5, 7], vec![4, 5], vec![2, 4, 5, 6]]).unwrap();
    let rep = check_lemma2(&SetFunction::index_max(7), &fam);
    ensure(rep.lhs == 18.0 && rep.rhs == 17.0, || format!("worked example {} / {}", rep.lhs, rep.rhs))?;

    let f = SetFunction::index_max(3);
    let mut small = 0;
    for sets in (0..3).map(|_| 0u32..8).multi_cartesian_product() {
        let fam = SetFamily::new(3, sets).unwrap();
        ensure(check_lemma2(&f, &fam).holds, || format!("lemma 2 on {:?}", fam.sets()))?;
        for extra in 0..8 {
            for k in 0..3 {
                ensure(check_property1(&f, &fam, extra, k).unwrap().holds, || {
                    format!("property 1 on {:?}, extra {extra}, k={k}", fam.sets())
                })?;
            }
        }
        small += 1;
    }
    let net = gen_random(3, 77, 0.0, 1.0).unwrap();
    let mut cut_families = 0;
    for cuts in all_cut_families(3) {
        ensure(check_lemma3(&net, &cuts).unwrap().holds, || format!("lemma 3 on {cuts:?}"))?;
        ensure(complement_duality_check(3, &cuts).unwrap(), || format!("duality on {cuts:?}"))?;
        cut_families += 1;
    }
    ensure(cut_families == 64, || format!("{cut_families} cut families"))?;

    for seed in 0..500u64 {
        let m = 1 + (seed % 8) as usize;
        let count = 1 + (seed % 5) as usize;
        let fam = random_family(m, count, seed).unwrap();
        let weights = gen_random(m, seed, 0.0, 10.0).unwrap().uplinks().iter().map(|c| c.value()).collect();
        let f = SetFunction::weighted_max(weights);
        ensure(check_lemma2(&f, &fam).holds, || format!("lemma 2, seed {seed}"))?;
        let extra = random_family(m, 1, !seed).unwrap().sets()[0];
        for k in 0..count {
            ensure(check_property1(&f, &fam, extra, k).unwrap().holds, || format!("property 1, seed {seed}"))?;
        }
        let n = 2 + (seed % 5) as usize;
        let net = gen_random(n, seed, 0.0, 1.0).unwrap();
        let cuts = random_cut_family(n, seed).unwrap();
        ensure(check_lemma3(&net, &cuts).unwrap().holds, || format!("lemma 3, seed {seed}"))?;
        ensure(complement_duality_check(n, &cuts).unwrap(), || format!("duality, seed {seed}"))?;
    }
    Ok(format!("18/17 reproduced; {small} small families, 64 cut families, 500 random instances"))
}

fn ac7() -> Outcome {
    let mut total_support = 0;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let net = gen_random(n, 50_000 + seed, 0.0, 1.0).unwrap();
        let c = cap(&net);
        let sched = sparsify_schedule(&net, c).map_err(|e| format!("seed {seed}: {e}"))?;
        let rate = fixed_schedule_rate(&net, &sched).unwrap().value;
        ensure(sched.support_size() <= n + 1, || format!("seed {seed}: support {}", sched.support_size()))?;
        ensure(rate >= c - 1e-9, || format!("seed {seed}: rate {rate} < {c}"))?;
        total_support += sched.support_size();
    }
    Ok(format!("50 networks, mean support {:.2}", total_support as f64 / 50.0))
}

fn ac8() -> Outcome {
    let net = DiamondNetwork::from_values(&[1.0, 0.4], &[0.5, 2.8]).unwrap();
    let hd = select_k_exhaustive(&net, 1).unwrap();
    ensure(hd.selected == [2] && close(hd.value, 7.0 / 20.0, 1e-12), || format!("HD best {hd:?}"))?;
    let fd: Vec<f64> = (1..=2).map(|i| fd_capacity(&net.subnetwork_of(&[i]).unwrap()).unwrap().value).collect();
    let fd_best = if fd[0] >= fd[1] { 1 } else { 2 };
    ensure(fd_best == 1 && close(fd[0], 0.5, 1e-12), || format!("FD singles {fd:?}"))?;

    for c in [1.0, 0.3, 2.5] {
        let net = DiamondNetwork::new(
            vec![LinkCapacity::Finite(c); 3],
            vec![LinkCapacity::Finite(c), LinkCapacity::Finite(c), LinkCapacity::Unbounded],
        )
        .unwrap();
        let best = select_k_exhaustive(&net, 1).unwrap();
        ensure(best.selected == [3] && close(best.value, c, 1e-12), || format!("c={c}: {best:?}"))?;
        let others = sub_cap(&net, &[1]);
        ensure(close(others, c / 2.0, 1e-12), || format!("c={c}: relay 1 gives {others}"))?;
    }
    Ok("2-relay HD best 2 (7/20) vs FD best 1 (1/2); 3-relay HD best 3 with value c".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 worst-case network ratios", ac1),
        ("AC2 worst-relay drop tightness", ac2),
        ("AC3 best single and pair fractions", ac3),
        ("AC4 guarantee properties", ac4),
        ("AC5 oracle equivalences", ac5),
        ("AC6 submodular suite", ac6),
        ("AC7 sparse schedules", ac7),
        ("AC8 discussion examples", ac8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
