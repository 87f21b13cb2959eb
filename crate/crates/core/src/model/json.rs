//! JSON interchange for networks and schedules.
//!
//! Network: `{"name": "...", "l": [0.5, "inf"], "r": ["inf", 0.5]}` with an
//! optional `"labels"` array of parent indices. Schedule:
//! `{"n": 2, "states": [{"state": "01", "prob": 0.5}, ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiamondNetwork, LinkCapacity, Schedule, StateMask};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LinkRepr {
    Num(f64),
    Text(String),
}

impl From<LinkCapacity> for LinkRepr {
    fn from(c: LinkCapacity) -> Self {
        match c {
            LinkCapacity::Finite(v) => LinkRepr::Num(v),
            LinkCapacity::Unbounded => LinkRepr::Text("inf".into()),
        }
    }
}

impl TryFrom<LinkRepr> for LinkCapacity {
    type Error = Error;

    fn try_from(r: LinkRepr) -> Result<Self> {
        match r {
            LinkRepr::Num(v) => LinkCapacity::finite(v),
            LinkRepr::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(LinkCapacity::Unbounded),
                _ => Err(Error::Parse(format!("unrecognised link capacity {s:?}"))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    l: Vec<LinkRepr>,
    r: Vec<LinkRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    state: String,
    prob: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleRepr {
    n: usize,
    states: Vec<StateRepr>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn network_to_value(net: &DiamondNetwork) -> serde_json::Value {
    let repr = NetworkRepr {
        name: net.name().map(str::to_owned),
        l: net.uplinks().iter().map(|&c| c.into()).collect(),
        r: net.downlinks().iter().map(|&c| c.into()).collect(),
        labels: net.labels().map(<[usize]>::to_vec),
    };
    serde_json::to_value(repr).expect("network serializes")
}

pub fn network_to_json(net: &DiamondNetwork) -> String {
    serde_json::to_string_pretty(&network_to_value(net)).expect("network serializes")
}

pub fn network_from_json(text: &str) -> Result<DiamondNetwork> {
    let repr: NetworkRepr = serde_json::from_str(text).map_err(parse_err)?;
    let conv = |v: Vec<LinkRepr>| v.into_iter().map(LinkCapacity::try_from).collect::<Result<Vec<_>>>();
    let mut net = DiamondNetwork::new(conv(repr.l)?, conv(repr.r)?)?;
    if let Some(name) = repr.name {
        net = net.with_name(name);
    }
    if let Some(labels) = repr.labels {
        net = net.with_labels(labels)?;
    }
    Ok(net)
}

pub fn schedule_to_value(sched: &Schedule) -> serde_json::Value {
    let repr = ScheduleRepr {
        n: sched.n(),
        states: sched
            .iter()
            .map(|(s, p)| StateRepr {
                state: s.to_string(),
                prob: p,
            })
            .collect(),
    };
    serde_json::to_value(repr).expect("schedule serializes")
}

pub fn schedule_to_json(sched: &Schedule) -> String {
    serde_json::to_string_pretty(&schedule_to_value(sched)).expect("schedule serializes")
}

pub fn schedule_from_json(text: &str) -> Result<Schedule> {
    let repr: ScheduleRepr = serde_json::from_str(text).map_err(parse_err)?;
    let entries = repr
        .states
        .into_iter()
        .map(|e| Ok((e.state.parse::<StateMask>()?, e.prob)))
        .collect::<Result<Vec<_>>>()?;
    Schedule::new(repr.n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate::{gen_half_tight, gen_random, gen_two_phase_schedule, gen_worst_case};
    use proptest::prelude::*;

    #[test]
    fn half_tight_renders_inf() {
        let net = gen_half_tight(2, LinkCapacity::Unbounded).unwrap();
        let v = network_to_value(&net);
        assert_eq!(v["l"], serde_json::json!([0.5, "inf"]));
        assert_eq!(v["r"], serde_json::json!(["inf", 0.5]));
        assert_eq!(network_from_json(&network_to_json(&net)).unwrap(), net);
    }

    #[test]
    fn worst_case_values() {
        let net = gen_worst_case(4, LinkCapacity::Unbounded).unwrap();
        let v = network_to_value(&net);
        assert_eq!(v["l"], serde_json::json!([0.5, 1.0, 0.5, 1.0]));
        assert_eq!(v["r"], serde_json::json!([1.0, 0.5, 1.0, 0.5]));
    }

    #[test]
    fn parse_errors() {
        assert!(network_from_json(r#"{"l": [1], "r": [1, 2]}"#).is_err());
        assert!(network_from_json(r#"{"l": ["big"], "r": [1]}"#).is_err());
        assert!(network_from_json(r#"{"l": [-1], "r": [1]}"#).is_err());
        assert!(network_from_json(r#"{"l": [1], "r": [1], "extra": 3}"#).is_err());
        assert!(network_from_json("not json").is_err());
        assert!(schedule_from_json(r#"{"n": 2, "states": [{"state": "0", "prob": 1}]}"#).is_err());
        assert!(schedule_from_json(r#"{"n": 1, "states": [{"state": "0", "prob": 0.4}]}"#).is_err());
    }

    #[test]
    fn schedule_round_trip() {
        let s = gen_two_phase_schedule(3).unwrap();
        let text = schedule_to_json(&s);
        assert!(text.contains("\"011\"") && text.contains("\"101\""));
        assert_eq!(schedule_from_json(&text).unwrap(), s);
    }

    proptest! {
        #[test]
        fn network_round_trip_is_bit_exact(n in 1usize..8, seed in any::<u64>(), hi in 1e-3f64..1e6) {
            let net = gen_random(n, seed, 0.0, hi).unwrap();
            let back = network_from_json(&network_to_json(&net)).unwrap();
            for (a, b) in net.uplinks().iter().chain(net.downlinks()).zip(back.uplinks().iter().chain(back.downlinks())) {
                prop_assert_eq!(a.value().to_bits(), b.value().to_bits());
            }
        }

        #[test]
        fn labelled_round_trip(seed in any::<u64>()) {
            let net = gen_random(4, seed, 0.0, 1.0).unwrap().subnetwork_of(&[1, 3]).unwrap();
            prop_assert_eq!(network_from_json(&network_to_json(&net)).unwrap(), net);
        }
    }
}
