use hdnet_core::SelectionReport;
use serde_json::{json, Value};

/// Finite numbers as JSON numbers, `+inf` as the string `"inf"`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v == f64::INFINITY {
        json!("inf")
    } else {
        Value::Null
    }
}

pub fn report_json(r: &SelectionReport) -> Value {
    let mut v = json!({
        "strategy": r.strategy.as_str(),
        "selected": r.selected,
        "k": r.k,
        "value_kind": r.value_kind.as_str(),
        "value": num(r.value),
        "full_value": num(r.full_value),
        "fraction": num(r.fraction),
        "bound": num(r.bound),
        "meets_bound": r.meets_bound(),
    });
    if let Some(rate) = r.full_rate {
        v["full_rate"] = num(rate);
        v["certified_fraction"] = num(r.certified_fraction());
    }
    if let Some(c) = r.capacity {
        v["capacity"] = num(c);
    }
    v
}
