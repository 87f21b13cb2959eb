//! Approximate capacity of half-duplex diamond relay networks, relay
//! selection with worst-case guarantees, and the set-function tools behind
//! them.

pub mod capacity;
pub mod error;
pub mod lp;
pub mod model;
pub mod selection;
pub mod submodular;

pub use capacity::{
    dual_capacity, fd_capacity, fd_capacity_fast, fixed_schedule_rate, hd_capacity, hd_capacity_with,
    single_relay_capacity, sparsify_schedule, Arithmetic, CapacityResult, DualResult, RateValue, SolveOptions,
};
pub use error::{Error, Result};
pub use model::{CutMask, DiamondNetwork, Gain, LinkCapacity, RelaySet, Schedule, StateMask};
pub use selection::{SelectionReport, Strategy, ValueKind};
pub use submodular::{SetFamily, SetFunction};
