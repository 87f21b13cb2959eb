use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field the simplex runs over. `f64` compares against a small tolerance;
/// `BigRational` is exact.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync {
    /// Values whose magnitude is at most this are treated as zero in sign
    /// tests (pivot eligibility, reduced-cost signs).
    fn tolerance() -> Self;

    /// Exact conversion where the type allows it. Non-finite input is a
    /// caller bug.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Snaps round-off noise to zero after an update.
    #[inline]
    fn flush(self) -> Self {
        self
    }

    #[inline]
    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    #[inline]
    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    #[inline]
    fn near_zero(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

const F64_TOL: f64 = 1e-10;
const F64_FLUSH: f64 = 1e-13;

impl Scalar for f64 {
    #[inline]
    fn tolerance() -> Self {
        F64_TOL
    }

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }

    #[inline]
    fn flush(self) -> Self {
        if self.abs() < F64_FLUSH {
            0.0
        } else {
            self
        }
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    /// Prefers the simplest fraction that converts back to exactly `v`
    /// (so `0.1` becomes `1/10`), falling back to the binary expansion.
    fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "cannot convert {v} to a rational");
        if let Some(r) = Ratio::<i64>::approximate_float(v) {
            if (*r.numer() as f64 / *r.denom() as f64) == v {
                return BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
            }
        }
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_prefers_short_fractions() {
        let r = <BigRational as Scalar>::from_f64(0.1);
        assert_eq!(r, BigRational::new(1.into(), 10.into()));
        let r = <BigRational as Scalar>::from_f64(14.0 / 5.0);
        assert_eq!(r, BigRational::new(14.into(), 5.into()));
        assert_eq!(Scalar::to_f64(&r), 2.8);
    }

    #[test]
    fn rational_round_trips() {
        for v in [0.0, 1.0, 1e-300, 123456.789, 2f64.powi(-60), 1e6] {
            let r = <BigRational as Scalar>::from_f64(v);
            assert_eq!(Scalar::to_f64(&r), v);
        }
    }

    #[test]
    fn float_flush() {
        assert_eq!(1e-15f64.flush(), 0.0);
        assert_eq!(1e-9f64.flush(), 1e-9);
        assert!(1e-11f64.near_zero());
        assert!((-1e-9f64).is_neg());
    }
}
