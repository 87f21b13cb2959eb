//! Diamond networks, relay masks, schedules and the constructed instances.

pub mod generate;
pub mod json;
pub mod mask;
pub mod schedule;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub use mask::{CutMask, RelaySet, StateMask, MAX_WIDTH};
pub use schedule::Schedule;

/// Capacity of a single source-relay or relay-destination link, in
/// bits per channel use. `Unbounded` stands for a link whose capacity is
/// taken to infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkCapacity {
    Finite(f64),
    Unbounded,
}

impl LinkCapacity {
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            // normalise -0.0
            Ok(LinkCapacity::Finite(value + 0.0))
        } else {
            Err(Error::InvalidCapacity(value))
        }
    }

    /// `+inf` for `Unbounded`.
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            LinkCapacity::Finite(v) => v,
            LinkCapacity::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, LinkCapacity::Unbounded)
    }

    /// Replaces `Unbounded` with a finite stand-in.
    pub fn or_finite(self, big_l: f64) -> Self {
        match self {
            LinkCapacity::Unbounded => LinkCapacity::Finite(big_l),
            f => f,
        }
    }
}

impl Eq for LinkCapacity {}

impl PartialOrd for LinkCapacity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinkCapacity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value().total_cmp(&other.value())
    }
}

impl fmt::Display for LinkCapacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkCapacity::Finite(v) => write!(f, "{v}"),
            LinkCapacity::Unbounded => f.write_str("inf"),
        }
    }
}

impl From<f64> for LinkCapacity {
    /// Non-finite positive input maps to `Unbounded`. Panics on negative or NaN.
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            LinkCapacity::Unbounded
        } else {
            LinkCapacity::finite(v).expect("link capacity must be non-negative")
        }
    }
}

/// A channel coefficient, in whichever form it is at hand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gain {
    Complex { re: f64, im: f64 },
    /// `|h|`
    Magnitude(f64),
    /// `|h|^2`
    Power(f64),
}

impl Gain {
    pub fn power(self) -> f64 {
        match self {
            Gain::Complex { re, im } => re * re + im * im,
            Gain::Magnitude(m) => m * m,
            Gain::Power(p) => p,
        }
    }
}

/// An N-relay diamond: source -> relay i with capacity `uplinks[i]`,
/// relay i -> destination with capacity `downlinks[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiamondNetwork {
    name: Option<String>,
    uplinks: Vec<LinkCapacity>,
    downlinks: Vec<LinkCapacity>,
    labels: Option<Vec<usize>>,
}

impl DiamondNetwork {
    pub fn new(uplinks: Vec<LinkCapacity>, downlinks: Vec<LinkCapacity>) -> Result<Self> {
        if uplinks.len() != downlinks.len() {
            return Err(Error::LengthMismatch {
                what: "uplinks vs downlinks",
                left: uplinks.len(),
                right: downlinks.len(),
            });
        }
        if uplinks.is_empty() {
            return Err(Error::TooFewRelays { min: 1, got: 0 });
        }
        if uplinks.len() > MAX_WIDTH {
            return Err(Error::GuardExceeded {
                what: "relay count",
                n: uplinks.len(),
                guard: MAX_WIDTH,
            });
        }
        for c in uplinks.iter().chain(&downlinks) {
            if let LinkCapacity::Finite(v) = c {
                LinkCapacity::finite(*v)?;
            }
        }
        Ok(Self {
            name: None,
            uplinks,
            downlinks,
            labels: None,
        })
    }

    /// Convenience constructor from plain numbers; `f64::INFINITY` is unbounded.
    pub fn from_values(uplinks: &[f64], downlinks: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| -> Result<Vec<LinkCapacity>> {
            v.iter()
                .map(|&x| {
                    if x == f64::INFINITY {
                        Ok(LinkCapacity::Unbounded)
                    } else {
                        LinkCapacity::finite(x)
                    }
                })
                .collect()
        };
        Self::new(conv(uplinks)?, conv(downlinks)?)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attaches parent indices (1-based, distinct) to the relays.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "labels vs relays",
                left: labels.len(),
                right: self.n(),
            });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.first() == Some(&0) {
            return Err(Error::Parse("labels must be distinct and 1-based".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.uplinks.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn uplinks(&self) -> &[LinkCapacity] {
        &self.uplinks
    }

    pub fn downlinks(&self) -> &[LinkCapacity] {
        &self.downlinks
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Parent index of 1-based relay `i` (itself when unlabelled).
    pub fn label(&self, i: usize) -> usize {
        self.labels.as_ref().map_or(i, |l| l[i - 1])
    }

    /// Uplink of 1-based relay `i`.
    pub fn uplink(&self, i: usize) -> LinkCapacity {
        self.uplinks[i - 1]
    }

    pub fn downlink(&self, i: usize) -> LinkCapacity {
        self.downlinks[i - 1]
    }

    pub(crate) fn uplink_values(&self) -> Vec<f64> {
        self.uplinks.iter().map(|c| c.value()).collect()
    }

    pub(crate) fn downlink_values(&self) -> Vec<f64> {
        self.downlinks.iter().map(|c| c.value()).collect()
    }

    pub fn has_unbounded(&self) -> bool {
        self.uplinks
            .iter()
            .chain(&self.downlinks)
            .any(|c| c.is_unbounded())
    }

    /// Same network with every unbounded link replaced by `big_l`.
    pub fn with_finite_big_l(&self, big_l: f64) -> Result<Self> {
        LinkCapacity::finite(big_l)?;
        Ok(Self {
            name: self.name.clone(),
            uplinks: self.uplinks.iter().map(|c| c.or_finite(big_l)).collect(),
            downlinks: self.downlinks.iter().map(|c| c.or_finite(big_l)).collect(),
            labels: self.labels.clone(),
        })
    }

    /// The network restricted to the relays in `keep`, in ascending index
    /// order. The result is labelled with the original relay indices.
    pub fn subnetwork(&self, keep: RelaySet) -> Result<Self> {
        if keep.width() != self.n() {
            return Err(Error::MaskWidth {
                expected: self.n(),
                got: keep.width(),
            });
        }
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx: Vec<usize> = keep.relays().collect();
        Ok(Self {
            name: self.name.clone(),
            uplinks: idx.iter().map(|&i| self.uplink(i)).collect(),
            downlinks: idx.iter().map(|&i| self.downlink(i)).collect(),
            labels: Some(idx.iter().map(|&i| self.label(i)).collect()),
        })
    }

    /// `subnetwork` from a list of 1-based indices.
    pub fn subnetwork_of(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.subnetwork(RelaySet::from_relays(self.n(), keep.iter().copied())?)
    }

    /// The network with 1-based relay `i` removed.
    pub fn without(&self, i: usize) -> Result<Self> {
        let all = RelaySet::full(self.n())?;
        let drop = RelaySet::from_relays(self.n(), [i])?;
        self.subnetwork(RelaySet::new(all.bits() & !drop.bits(), self.n())?)
    }
}

/// Link capacities `log2(1 + |h|^2)` for the source-relay and
/// relay-destination channels.
pub fn links_from_gains(source_gains: &[Gain], dest_gains: &[Gain]) -> Result<DiamondNetwork> {
    if source_gains.len() != dest_gains.len() {
        return Err(Error::LengthMismatch {
            what: "source vs destination gains",
            left: source_gains.len(),
            right: dest_gains.len(),
        });
    }
    let cap = |g: &Gain| LinkCapacity::finite((1.0 + g.power()).log2());
    DiamondNetwork::new(
        source_gains.iter().map(cap).collect::<Result<_>>()?,
        dest_gains.iter().map(cap).collect::<Result<_>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gains_to_links() {
        let net = links_from_gains(
            &[Gain::Power(1.0), Gain::Power(0.0), Gain::Power(3.0)],
            &[Gain::Power(1.0), Gain::Power(1.0), Gain::Power(7.0)],
        )
        .unwrap();
        assert_eq!(net.uplink_values(), vec![1.0, 0.0, 2.0]);
        assert_eq!(net.downlink_values(), vec![1.0, 1.0, 3.0]);
        // inverse check: 2^l - 1 recovers |h|^2
        assert_eq!(2f64.powf(net.uplink(3).value()) - 1.0, 3.0);
    }

    #[test]
    fn complex_and_magnitude_gains() {
        let net = links_from_gains(
            &[Gain::Complex { re: 1.0, im: 1.0 }],
            &[Gain::Magnitude(3f64.sqrt())],
        )
        .unwrap();
        assert!((net.uplink(1).value() - 3f64.log2()).abs() < 1e-15);
        assert!((net.downlink(1).value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gain_length_mismatch() {
        let err = links_from_gains(&[Gain::Power(1.0)], &[]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn unbounded_is_absorbing() {
        let u = LinkCapacity::Unbounded;
        let f = LinkCapacity::Finite(1e300);
        assert!(u > f);
        assert_eq!(u.max(f), u);
        assert_eq!(f.max(u), u);
    }

    #[test]
    fn subnetwork_projection_and_labels() {
        let net = DiamondNetwork::from_values(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        let sub = net.subnetwork_of(&[2, 3]).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.labels(), Some(&[2, 3][..]));
        assert_eq!(sub.uplink_values(), vec![2.0, 3.0]);

        let same = net.subnetwork_of(&[1, 2, 3]).unwrap();
        assert_eq!(same.uplinks(), net.uplinks());
        assert_eq!(same.downlinks(), net.downlinks());

        // labels compose through nested extraction
        let subsub = sub.subnetwork_of(&[2]).unwrap();
        assert_eq!(subsub.labels(), Some(&[3][..]));
    }

    #[test]
    fn subnetwork_errors() {
        let net = DiamondNetwork::from_values(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(net.subnetwork_of(&[]).unwrap_err(), Error::EmptySubset);
        assert!(matches!(
            net.subnetwork_of(&[4]).unwrap_err(),
            Error::IndexOutOfRange { index: 4, n: 3 }
        ));
    }

    #[test]
    fn rejects_invalid_networks() {
        assert!(DiamondNetwork::from_values(&[1.0], &[1.0, 2.0]).is_err());
        assert!(DiamondNetwork::from_values(&[], &[]).is_err());
        assert!(DiamondNetwork::from_values(&[-1.0], &[1.0]).is_err());
        assert!(DiamondNetwork::from_values(&[f64::NAN], &[1.0]).is_err());
    }
}
