//! Closed real intervals with outward rounding.
//!
//! Every arithmetic result is widened by one ulp in each direction, which
//! is conservative for the correctly rounded IEEE basic operations.
//! Transcendental results (`ln`, `exp`) are widened by a few ulps to
//! absorb libm error.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

const LIBM_ULPS: u32 = 4;

#[inline]
fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

fn down_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = down(x);
    }
    x
}

fn up_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = up(x);
    }
    x
}

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn ln2() -> Self {
        Interval::new(down(std::f64::consts::LN_2), up(std::f64::consts::LN_2))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            self.lo / 2.0 + self.hi / 2.0
        } else {
            f64::NAN
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Smallest |x| over the interval.
    pub fn mig(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    /// Largest |x| over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn abs(&self) -> Interval {
        Interval::new(self.mig(), self.mag())
    }

    pub fn max0(&self) -> Interval {
        Interval::new(self.lo.max(0.0), self.hi.max(0.0))
    }

    /// Multiplication by an exactly representable scalar.
    pub fn scale(&self, k: f64) -> Interval {
        *self * Interval::point(k)
    }

    pub fn powi(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(1.0);
        }
        // bounds on |x|^n for x >= 0
        let pow_lo = |x: f64| (1..n).fold(x, |acc, _| down(acc * x).max(0.0));
        let pow_hi = |x: f64| (1..n).fold(x, |acc, _| up(acc * x));
        let signed = |x: f64, lower: bool| -> f64 {
            let a = x.abs();
            if x >= 0.0 {
                if lower { pow_lo(a) } else { pow_hi(a) }
            } else if lower {
                -pow_hi(a)
            } else {
                -pow_lo(a)
            }
        };
        if n % 2 == 1 {
            Interval::new(signed(self.lo, true), signed(self.hi, false))
        } else {
            Interval::new(pow_lo(self.mig()), pow_hi(self.mag()))
        }
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0.0, "ln of non-positive interval {self:?}");
        let lo = down_n(self.lo.ln(), LIBM_ULPS);
        let hi = if self.hi.is_infinite() {
            f64::INFINITY
        } else {
            up_n(self.hi.ln(), LIBM_ULPS)
        };
        Interval::new(lo, hi)
    }

    pub fn exp(&self) -> Interval {
        let lo = down_n(self.lo.exp(), LIBM_ULPS).max(0.0);
        let hi = up_n(self.hi.exp(), LIBM_ULPS);
        Interval::new(lo, hi)
    }

    /// Enclosure of an arbitrary-precision integer.
    pub fn from_bigint(n: &BigInt) -> Interval {
        if n.is_zero() {
            return Interval::ZERO;
        }
        let (lo, hi) = magnitude_bounds(n);
        match n.sign() {
            Sign::Minus => Interval::new(-hi, -lo),
            _ => Interval::new(lo, hi),
        }
    }

    pub fn from_rational(q: &BigRational) -> Interval {
        let n = Interval::from_bigint(q.numer());
        if q.denom() == &BigInt::from(1) {
            return n;
        }
        n / Interval::from_bigint(q.denom())
    }

    /// Enclosure of `ln |n|` for a nonzero integer; never overflows.
    pub fn ln_bigint(n: &BigInt) -> Interval {
        assert!(!n.is_zero(), "ln of zero");
        let bits = n.bits();
        if bits <= 53 {
            return Interval::point(n.abs().to_f64().unwrap()).ln();
        }
        let shift = bits - 53;
        let top: BigInt = n.abs() >> shift;
        let m = top.to_f64().unwrap();
        let mantissa = Interval::new(m, m + 1.0).ln();
        mantissa + Interval::ln2().scale(shift as f64)
    }

    /// Enclosure of `ln |q|` for a nonzero rational.
    pub fn ln_rational(q: &BigRational) -> Interval {
        Interval::ln_bigint(q.numer()) - Interval::ln_bigint(q.denom())
    }
}

/// Bounds `lo <= |n| <= hi` with `lo`, `hi` representable.
fn magnitude_bounds(n: &BigInt) -> (f64, f64) {
    let a = n.abs();
    let bits = a.bits();
    if bits <= 53 {
        let x = a.to_f64().unwrap();
        return (x, x);
    }
    if bits > 1023 {
        return (f64::MAX, f64::INFINITY);
    }
    let shift = bits - 53;
    let top: BigInt = &a >> shift;
    let m = top.to_f64().unwrap();
    let scale = 2f64.powi(shift as i32);
    let exact = (&top << shift) == a;
    let lo = m * scale;
    let hi = if exact { lo } else { up((m + 1.0) * scale) };
    (lo, hi)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

fn mul_endpoint(a: f64, b: f64) -> f64 {
    // 0 * inf arises only for degenerate zero intervals; treat as 0
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if (self.lo == 0.0 && self.hi == 0.0) || (rhs.lo == 0.0 && rhs.hi == 0.0) {
            return Interval::ZERO;
        }
        let c = [
            mul_endpoint(self.lo, rhs.lo),
            mul_endpoint(self.lo, rhs.hi),
            mul_endpoint(self.hi, rhs.lo),
            mul_endpoint(self.hi, rhs.hi),
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        assert!(rhs.lo > 0.0 || rhs.hi < 0.0, "division by interval containing zero");
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_bigint_encloses_true_value() {
        let n: BigInt = BigInt::from(10).pow(40) + 7;
        let iv = Interval::ln_bigint(&n);
        let truth = 40.0 * 10f64.ln();
        assert!(iv.lo() <= truth && truth <= iv.hi() + 1e-12);
        assert!(iv.width() < 1e-12);
    }

    #[test]
    fn from_rational_encloses() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let iv = Interval::from_rational(&q);
        assert!(iv.lo() < 1.0 / 3.0 + 1e-17 && iv.hi() > 1.0 / 3.0 - 1e-17);
        assert!(iv.lo() * 3.0 <= 1.0 && iv.hi() * 3.0 >= 1.0);
    }

    #[test]
    fn even_power_of_straddling_interval_is_nonnegative() {
        let iv = Interval::new(-2.0, 1.0).powi(2);
        assert_eq!(iv.lo(), 0.0);
        assert!(iv.hi() >= 4.0);
    }

    #[test]
    fn huge_integer_bounds_are_outward() {
        let n: BigInt = (BigInt::from(1) << 200) + 1;
        let iv = Interval::from_bigint(&n);
        assert!(iv.lo() <= 2f64.powi(200));
        assert!(iv.hi() > 2f64.powi(200));
    }
}
