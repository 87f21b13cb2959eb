use hdnet_core::capacity::{fixed_schedule_rate, hd_capacity, single_relay_capacities};
use hdnet_core::model::generate::{gen_half_tight, gen_random, gen_random_schedule, gen_worst_case};
use hdnet_core::model::json::{network_from_json, network_to_json, schedule_from_json, schedule_to_json};
use hdnet_core::selection::{drop_worst, select_drop_one_schedule_reuse};
use hdnet_core::{DiamondNetwork, LinkCapacity, RelaySet};
use proptest::prelude::*;

fn rate(net: &DiamondNetwork, sched: &hdnet_core::Schedule, keep: RelaySet) -> f64 {
    let sub = net.subnetwork(keep).unwrap();
    fixed_schedule_rate(&sub, &sched.derive_natural(keep).unwrap()).unwrap().value
}

/// A random network with some links replaced by unbounded ones.
fn mixed_network(n: usize, seed: u64, unbounded: u32) -> DiamondNetwork {
    let base = gen_random(n, seed, 0.0, 1.0).unwrap();
    let pick = |links: &[LinkCapacity], shift: usize| -> Vec<LinkCapacity> {
        links
            .iter()
            .enumerate()
            .map(|(i, &c)| if unbounded >> (i + shift) & 1 == 1 { LinkCapacity::Unbounded } else { c })
            .collect()
    };
    DiamondNetwork::new(pick(base.uplinks(), 0), pick(base.downlinks(), n)).unwrap()
}

#[test]
fn worst_case_subnetwork_projection() {
    let net = gen_worst_case(4, LinkCapacity::Unbounded).unwrap();
    let sub = net.subnetwork_of(&[1, 3]).unwrap();
    assert_eq!(sub.uplinks(), &[LinkCapacity::Finite(0.5); 2]);
    assert_eq!(sub.downlinks(), &[LinkCapacity::Finite(1.0); 2]);
    assert_eq!(sub.labels(), Some(&[1usize, 3][..]));
}

#[test]
fn worst_case_single_capacities_repeat() {
    for n in (2..=10).step_by(2) {
        let caps = single_relay_capacities(&gen_worst_case(n, LinkCapacity::Unbounded).unwrap());
        let (a, b) = caps.split_at(n / 2);
        assert_eq!(a, b);
    }
}

#[test]
fn files_round_trip_into_the_same_answers() {
    for n in 2..=5 {
        let net = gen_half_tight(n, LinkCapacity::Unbounded).unwrap();
        let back = network_from_json(&network_to_json(&net)).unwrap();
        assert_eq!(back, net);
        let c = hd_capacity(&net).unwrap();
        assert_eq!(hd_capacity(&back).unwrap().value, c.value);
        let sched = c.optimal_schedule.unwrap();
        assert_eq!(schedule_from_json(&schedule_to_json(&sched)).unwrap(), sched);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_marginals_agree(n in 2usize..=6, seed in any::<u64>(), outer in 1u32..64, inner in 1u32..64) {
        let full = (1u32 << n) - 1;
        let k = outer & full;
        let k2 = k & inner;
        prop_assume!(k != 0 && k2 != 0);
        let sched = gen_random_schedule(n, seed).unwrap();
        let big = RelaySet::new(k, n).unwrap();
        let small = RelaySet::new(k2, n).unwrap();
        let direct = sched.derive_natural(small).unwrap();
        let inside = RelaySet::new(big.restrict(k2), big.len()).unwrap();
        let twice = sched.derive_natural(big).unwrap().derive_natural(inside).unwrap();
        prop_assert!(direct.max_abs_diff(&twice) < 1e-12);
    }

    #[test]
    fn partition_with_unbounded_links(n in 2usize..=5, seed in any::<u64>(), unbounded in any::<u32>()) {
        let net = mixed_network(n, seed, unbounded & 0x155);
        let sched = gen_random_schedule(n, seed).unwrap();
        let whole = fixed_schedule_rate(&net, &sched).unwrap().value;
        let c = hd_capacity(&net).unwrap().value;
        for bits in 1..(1u32 << n) - 1 {
            let k = RelaySet::new(bits, n).unwrap();
            let split = rate(&net, &sched, k) + rate(&net, &sched, k.complement());
            prop_assert!(whole <= split + 1e-9);
            let caps = hd_capacity(&net.subnetwork(k).unwrap()).unwrap().value
                + hd_capacity(&net.subnetwork(k.complement()).unwrap()).unwrap().value;
            prop_assert!(c <= caps + 1e-9);
        }
    }

    #[test]
    fn removing_a_relay_costs_at_most_its_weaker_link(n in 2usize..=6, seed in any::<u64>()) {
        let net = gen_random(n, seed, 0.0, 3.0).unwrap();
        let c = hd_capacity(&net).unwrap().value;
        for i in 1..=n {
            let delta = net.uplink(i).value().min(net.downlink(i).value());
            prop_assert!(hd_capacity(&net.without(i).unwrap()).unwrap().value >= c - delta - 1e-9);
        }
    }

    #[test]
    fn drop_one_sum_with_unbounded_links(n in 2usize..=5, seed in any::<u64>(), unbounded in any::<u32>()) {
        let net = mixed_network(n, seed, unbounded & 0x0f0);
        let sched = gen_random_schedule(n, seed ^ 3).unwrap();
        let whole = fixed_schedule_rate(&net, &sched).unwrap().value;
        prop_assume!(whole.is_finite());
        let full = RelaySet::full(n).unwrap();
        let sum: f64 = (1..=n)
            .map(|i| rate(&net, &sched, RelaySet::new(full.bits() & !(1 << (i - 1)), n).unwrap()))
            .sum();
        prop_assert!(sum >= (n as f64 - 1.0) * whole - 1e-9);
    }

    #[test]
    fn selection_guarantees_on_mixed_networks(n in 2usize..=5, seed in any::<u64>(), unbounded in any::<u32>()) {
        let net = mixed_network(n, seed, unbounded & 0x0ff);
        let full = hd_capacity(&net).unwrap().value;
        prop_assume!(full.is_finite());
        let worst = drop_worst(&net, n - 1, None).unwrap();
        prop_assert!(worst.value >= 0.5 * full - 1e-9);
        let reuse = select_drop_one_schedule_reuse(&net).unwrap();
        prop_assert!(reuse.meets_bound(), "{:?}", reuse);
    }
}
