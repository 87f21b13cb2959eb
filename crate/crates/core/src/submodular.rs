//! Set families over `[1:m]`, submodularity checks, threshold sets and the
//! full-network cut construction built from them.
//!
//! Subsets are `u32` masks with bit `x - 1` standing for element `x`.

use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::mask::{full_bits, relays_of, MAX_WIDTH};
use crate::model::{CutMask, DiamondNetwork};

/// Largest ground set for the exhaustive pairwise submodularity check.
pub const SUBMODULAR_GUARD: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    ground_size: usize,
    sets: Vec<u32>,
}

impl SetFamily {
    pub fn new(ground_size: usize, sets: Vec<u32>) -> Result<Self> {
        if ground_size > MAX_WIDTH {
            return Err(Error::GuardExceeded {
                what: "ground set size",
                n: ground_size,
                guard: MAX_WIDTH,
            });
        }
        let omega = full_bits(ground_size);
        if let Some(i) = sets.iter().position(|s| s & !omega != 0) {
            return Err(Error::InvalidFamily(format!(
                "set {} has elements outside [1:{ground_size}]",
                i + 1
            )));
        }
        Ok(Self { ground_size, sets })
    }

    /// From lists of 1-based elements.
    pub fn from_elements<S: AsRef<[usize]>>(ground_size: usize, sets: &[S]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| {
                s.as_ref().iter().try_fold(0u32, |m, &x| {
                    if x == 0 || x > ground_size {
                        Err(Error::IndexOutOfRange { index: x, n: ground_size })
                    } else {
                        Ok(m | 1 << (x - 1))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground_size, masks)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn omega(&self) -> u32 {
        full_bits(self.ground_size)
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Elements of a mask, 1-based, ascending.
pub fn elements(mask: u32) -> Vec<usize> {
    relays_of(mask).collect()
}

type Evaluator = Box<dyn Fn(u32) -> f64 + Send + Sync>;

/// A deterministic set function with a declared-submodular flag.
pub struct SetFunction {
    name: String,
    eval: Evaluator,
    declared_submodular: bool,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFunction")
            .field("name", &self.name)
            .field("declared_submodular", &self.declared_submodular)
            .finish()
    }
}

impl SetFunction {
    pub fn new(name: impl Into<String>, declared_submodular: bool, eval: impl Fn(u32) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            declared_submodular,
        }
    }

    /// `f(A) = max_{x in A} w_x`, 0 on the empty set.
    pub fn weighted_max(weights: Vec<f64>) -> Self {
        Self::new("weighted-max", true, move |a| {
            relays_of(a).fold(0.0, |m, x| m.max(weights[x - 1]))
        })
    }

    /// `f(A) = max_{x in A} x` over `[1:m]`.
    pub fn index_max(m: usize) -> Self {
        let mut f = Self::weighted_max((1..=m).map(|x| x as f64).collect());
        f.name = "index-max".into();
        f
    }

    pub fn zero() -> Self {
        Self::new("zero", true, |_| 0.0)
    }

    /// `|A|^2`, supermodular.
    pub fn cardinality_squared() -> Self {
        Self::new("cardinality-squared", false, |a| (a.count_ones() as f64).powi(2))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn declared_submodular(&self) -> bool {
        self.declared_submodular
    }

    #[inline]
    pub fn eval(&self, set: u32) -> f64 {
        (self.eval)(set)
    }
}

/// `lhs >= rhs` up to a relative tolerance, with `+inf` handled exactly.
pub(crate) fn geq(lhs: f64, rhs: f64) -> bool {
    if lhs == f64::INFINITY || lhs >= rhs {
        return true;
    }
    rhs.is_finite() && lhs >= rhs - 1e-9 * rhs.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubmodularCheck {
    pub holds: bool,
    /// A pair violating `f(A) + f(B) >= f(A u B) + f(A n B)`.
    pub counterexample: Option<(u32, u32)>,
}

/// Checks the defining inequality on every pair of subsets of `[1:m]`.
pub fn is_submodular(f: &SetFunction, m: usize) -> Result<SubmodularCheck> {
    if m > SUBMODULAR_GUARD {
        return Err(Error::GuardExceeded {
            what: "is_submodular pair enumeration",
            n: m,
            guard: SUBMODULAR_GUARD,
        });
    }
    let size = 1u32 << m;
    let values: Vec<f64> = (0..size).map(|a| f.eval(a)).collect();
    for a in 0..size {
        for b in a + 1..size {
            let lhs = values[a as usize] + values[b as usize];
            let rhs = values[(a | b) as usize] + values[(a & b) as usize];
            if !geq(lhs, rhs) {
                return Ok(SubmodularCheck {
                    holds: false,
                    counterexample: Some((a, b)),
                });
            }
        }
    }
    Ok(SubmodularCheck {
        holds: true,
        counterexample: None,
    })
}

/// `E_j` = elements in at least `j` of the sets, for `j = 1..=n`.
pub fn threshold_sets(fam: &SetFamily) -> Vec<u32> {
    let n = fam.len();
    let mut out = vec![0u32; n];
    for x in 0..fam.ground_size() {
        let count = fam.sets().iter().filter(|s| *s & (1 << x) != 0).count();
        for e in out.iter_mut().take(count) {
            *e |= 1 << x;
        }
    }
    out
}

/// Union over `k`-subsets `I` of `base & (intersection of sets[i], i in I)`.
/// The intersection over the empty index set is `omega`.
pub fn k_wise_union(sets: &[u32], k: usize, base: u32, omega: u32) -> u32 {
    (0..sets.len())
        .combinations(k)
        .map(|idx| idx.iter().fold(base & omega, |acc, &i| acc & sets[i]))
        .fold(0, |u, s| u | s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: geq(lhs, rhs),
        }
    }
}

/// `sum_i f(A_i) >= sum_j f(E_j)`.
pub fn check_lemma2(f: &SetFunction, fam: &SetFamily) -> InequalityReport {
    let lhs = fam.sets().iter().map(|&a| f.eval(a)).sum();
    let rhs = threshold_sets(fam).into_iter().map(|e| f.eval(e)).sum();
    InequalityReport::new(lhs, rhs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Property1Report {
    /// `f` of: the `k`-wise union restricted to the extra set, the
    /// `(k+1)`-wise union over the family, the `(k+1)`-wise union over the
    /// family with the extra set appended, and the `(k+1)`-wise union
    /// restricted to the extra set.
    pub terms: [f64; 4],
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The inductive step behind the threshold-set inequality:
/// `f(U_k(extra)) + f(U_{k+1}) >= f(U'_{k+1}) + f(U_{k+1}(extra))`, where
/// `U_k(B)` is the union over `k`-subsets of the family of `B` intersected
/// with their common part and `U'` also ranges over `extra`.
pub fn check_property1(f: &SetFunction, fam: &SetFamily, extra: u32, k: usize) -> Result<Property1Report> {
    let n = fam.len();
    if k >= n {
        return Err(Error::InvalidK { k, n });
    }
    let omega = fam.omega();
    if extra & !omega != 0 {
        return Err(Error::InvalidFamily("extra set has elements outside the ground set".into()));
    }
    let sets = fam.sets();
    let mut with_extra = sets.to_vec();
    with_extra.push(extra);
    let terms = [
        f.eval(k_wise_union(sets, k, extra, omega)),
        f.eval(k_wise_union(sets, k + 1, omega, omega)),
        f.eval(k_wise_union(&with_extra, k + 1, omega, omega)),
        f.eval(k_wise_union(sets, k + 1, extra, omega)),
    ];
    let lhs = terms[0] + terms[1];
    let rhs = terms[2] + terms[3];
    Ok(Property1Report {
        terms,
        lhs,
        rhs,
        holds: geq(lhs, rhs),
    })
}

fn validate_cuts(n: usize, cuts: &[CutMask]) -> Result<()> {
    if cuts.len() != n {
        return Err(Error::LengthMismatch {
            what: "cuts vs relays",
            left: cuts.len(),
            right: n,
        });
    }
    for (i, c) in cuts.iter().enumerate() {
        if c.width() != n {
            return Err(Error::MaskWidth {
                expected: n,
                got: c.width(),
            });
        }
        if c.contains(i + 1) {
            return Err(Error::InvalidCuts(format!("cut {} contains its own relay", i + 1)));
        }
    }
    Ok(())
}

/// From cuts `A_i` of the `N - 1`-relay subnetworks without relay `i`,
/// the `N - 1` full-network cuts `E_1 ⊇ .. ⊇ E_{N-1}` (threshold sets of
/// the family; `E_N` is always empty and dropped).
pub fn construct_full_cuts(n: usize, cuts: &[CutMask]) -> Result<Vec<CutMask>> {
    validate_cuts(n, cuts)?;
    let fam = SetFamily::new(n, cuts.iter().map(|c| c.bits()).collect())?;
    let e = threshold_sets(&fam);
    Ok(e[..n.saturating_sub(1)].iter().map(|&b| CutMask::raw(b, n)).collect())
}

/// `sum_j (max_{A_j} l + max_{([1:N]\{j})\A_j} r) >= sum_j (max_{E_j} l + max_{[1:N]\E_j} r)`.
pub fn check_lemma3(net: &DiamondNetwork, cuts: &[CutMask]) -> Result<InequalityReport> {
    let n = net.n();
    let full_cuts = construct_full_cuts(n, cuts)?;
    let l = SetFunction::weighted_max(net.uplinks().iter().map(|c| c.value()).collect());
    let r = SetFunction::weighted_max(net.downlinks().iter().map(|c| c.value()).collect());
    let omega = full_bits(n);
    let lhs = cuts
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let rest = omega & !(1 << j) & !a.bits();
            l.eval(a.bits()) + r.eval(rest)
        })
        .sum();
    let rhs = full_cuts
        .iter()
        .map(|e| l.eval(e.bits()) + r.eval(omega & !e.bits()))
        .sum();
    Ok(InequalityReport::new(lhs, rhs))
}

/// With `B_i = ([1:n]\{i}) \ A_i`, checks `[1:n] \ E_j(A) = F_{n-j}(B)`
/// for every `j` in `[1:n-1]`.
pub fn complement_duality_check(n: usize, cuts: &[CutMask]) -> Result<bool> {
    validate_cuts(n, cuts)?;
    let omega = full_bits(n);
    let a: Vec<u32> = cuts.iter().map(|c| c.bits()).collect();
    let b: Vec<u32> = a
        .iter()
        .enumerate()
        .map(|(i, &ai)| omega & !(1 << i) & !ai)
        .collect();
    let e = threshold_sets(&SetFamily::new(n, a)?);
    let f = threshold_sets(&SetFamily::new(n, b)?);
    Ok((1..n).all(|j| omega & !e[j - 1] == f[n - j - 1]))
}

/// A family of `count` uniformly random subsets of `[1:m]`.
pub fn random_family(m: usize, count: usize, seed: u64) -> Result<SetFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = full_bits(m);
    let sets = (0..count).map(|_| rng.gen::<u32>() & omega).collect();
    SetFamily::new(m, sets)
}

/// Uniformly random cuts `A_i ⊆ [1:n]\{i}`.
pub fn random_cut_family(n: usize, seed: u64) -> Result<Vec<CutMask>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = full_bits(n);
    (0..n)
        .map(|i| CutMask::new(rng.gen::<u32>() & omega & !(1 << i), n))
        .collect()
}

/// Every family of cuts `A_i ⊆ [1:n]\{i}`, `2^{n(n-1)}` in all.
pub fn all_cut_families(n: usize) -> impl Iterator<Item = Vec<CutMask>> {
    let omega = full_bits(n);
    (0..n)
        .map(move |i| (0..=omega).filter(move |b| b & (1 << i) == 0))
        .multi_cartesian_product()
        .map(move |bits| bits.into_iter().map(|b| CutMask::raw(b, n)).collect())
}
