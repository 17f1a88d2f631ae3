//! Fixed-point intervals `[lo, hi] / 2^prec` with big-integer endpoints,
//! used to follow bounded archimedean orbits well past the point where
//! double precision enclosures lose all information.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::Interval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_shift(x: BigInt, k: u32) -> BigInt {
    // arithmetic shift rounds toward -inf
    x >> k
}

fn ceil_shift(x: BigInt, k: u32) -> BigInt {
    -((-x) >> k)
}

impl Dyadic {
    pub fn from_rational(q: &BigRational, prec: u32) -> Dyadic {
        let scaled = q.numer() << prec;
        let (fl, r) = scaled.div_mod_floor(q.denom());
        let hi = if r.is_zero() { fl.clone() } else { &fl + 1 };
        Dyadic { lo: fl, hi, prec }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        Dyadic { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Dyadic { lo: floor_shift(lo, self.prec), hi: ceil_shift(hi, self.prec), prec: self.prec }
    }

    pub fn pow(&self, k: u32) -> Dyadic {
        if k.is_multiple_of(2) && self.lo.is_negative() && self.hi.is_positive() {
            // straddling zero: even powers are nonnegative
            let m = self.lo.abs().max(self.hi.abs());
            let a = Dyadic { lo: BigInt::zero(), hi: m, prec: self.prec };
            return a.pow(k);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Upper bound for `|x| * 2^prec` over the interval.
    fn mag_scaled(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    /// Whether every point has `|x| >= r`.
    pub fn abs_at_least(&self, r: &BigRational) -> bool {
        let bound = Dyadic::from_rational(r, self.prec).hi;
        if self.lo.is_positive() {
            self.lo >= bound
        } else if self.hi.is_negative() {
            -&self.hi >= bound
        } else {
            false
        }
    }

    /// Width relative to `max(1, |x|)`, as a float.
    pub fn relative_width(&self) -> f64 {
        let w = &self.hi - &self.lo;
        let scale = self.mag_scaled().max(BigInt::from(1) << self.prec);
        let bits = w.bits() as i64 - scale.bits() as i64;
        if bits < -1000 {
            0.0
        } else {
            2f64.powi(bits as i32 + 1)
        }
    }

    pub fn to_interval(&self) -> Interval {
        let den = BigInt::from(1) << self.prec;
        let lo = Interval::from_rational(&BigRational::new(self.lo.clone(), den.clone()));
        let hi = Interval::from_rational(&BigRational::new(self.hi.clone(), den));
        lo.hull(&hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn encloses_thirds() {
        let x = Dyadic::from_rational(&rat(1, 3), 64);
        let y = x.mul(&x).add(&Dyadic::from_rational(&rat(-2, 1), 64));
        let iv = y.to_interval();
        assert!(iv.contains(1.0 / 9.0 - 2.0));
        assert!(iv.width() < 1e-15);
    }

    #[test]
    fn even_power_straddling() {
        let x = Dyadic { lo: BigInt::from(-3), hi: BigInt::from(1), prec: 0 };
        let y = x.pow(2);
        assert_eq!((y.lo, y.hi), (BigInt::zero(), BigInt::from(9)));
    }
}
