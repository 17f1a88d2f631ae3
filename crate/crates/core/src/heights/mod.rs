//! Naive and canonical heights, local Green's functions and pairings.

mod dyadic;
mod dynmap;
mod green;
mod local;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{valuation_or_inf, Interval, LocalValue, LogOf, Place, Rational};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::poly::Poly;

pub use dynmap::{ArchData, DynMap, PadicData};
pub use green::{default_budget, green_at, local_green, GreenMode, GreenResult};
pub use local::{conductor_count, l1_l2_split, lambda_local, PoleRef};

pub(crate) use green::find_cycle;

/// Upper bound for the archimedean perturbation `eta(w)` given a lower
/// bound for `ln |w|`, valid once `|w| >= r0`.
pub(crate) fn eta_bound(map: &DynMap, ln_w_lo: f64) -> f64 {
    dynmap::eta_upper(&map.arch().ratios, ln_w_lo).min(map.arch().eta_r0)
}

/// Default tolerance for archimedean enclosures.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A certified enclosure of a real height value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightInterval {
    pub lo: f64,
    pub hi: f64,
}

impl HeightInterval {
    pub fn zero() -> HeightInterval {
        HeightInterval { lo: 0.0, hi: 0.0 }
    }

    pub fn to_interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo / 2.0 + self.hi / 2.0
    }

    pub fn overlaps(&self, other: &HeightInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl From<Interval> for HeightInterval {
    fn from(iv: Interval) -> HeightInterval {
        HeightInterval { lo: iv.lo(), hi: iv.hi() }
    }
}

impl fmt::Display for HeightInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `h(x/y) = log max(|x|, |y|)`, returned as the log of that integer.
pub fn naive_height(t: &Rational) -> LogOf {
    let m = t.numer().abs().max(t.denom().clone());
    LogOf(Rational::from_integer(m.max(BigInt::one())))
}

/// A constant `C` with `|h(f(w)) - d h(w)| <= C` for every rational `w`,
/// returned exactly as the log of a rational.
pub fn height_defect_bound(fam: &Family, t: &Rational) -> LogOf {
    defect_bound_poly(&fam.specialize(t))
}

/// Writing `f(x/y) = F(x, y) / (D y^d)` with `F` integral:
/// `max(|F|, |D y^d|) <= U H^d`, `max(...) >= m H^d`, and the common factor
/// divides `D |D c_d|^d`.
pub fn defect_bound_poly(f: &Poly) -> LogOf {
    let c = f.coeffs();
    let d = c.len() - 1;
    let den = Rational::from_integer(f.denom_lcm());
    let lead = c[d].abs();
    let int_lead = &lead * &den;
    let s: Rational = c[..d].iter().map(|ck| ck.abs()).fold(Rational::zero(), |a, b| a + b) / &lead;
    let sum_all: Rational = c.iter().map(|ck| ck.abs() * &den).fold(Rational::zero(), |a, b| a + b);
    let upper = sum_all.max(den.clone());
    let (r, factor) = if s.is_zero() {
        (Rational::one(), int_lead.clone())
    } else {
        (
            (&s * Rational::from_integer(BigInt::from(2))).max(Rational::one()),
            &int_lead / Rational::from_integer(BigInt::from(2)),
        )
    };
    let m = (&den / r.pow(d as i32)).min(factor);
    let lower = &den * int_lead.pow(d as i32) / m;
    LogOf(upper.max(lower).max(Rational::one()))
}

fn den_coprime_part(den: &BigInt, primes: impl Iterator<Item = u64>) -> BigInt {
    let mut n = den.clone();
    for p in primes {
        let pb = BigInt::from(p);
        while n.is_multiple_of(&pb) {
            n /= &pb;
        }
    }
    n
}

/// Canonical height as a sum of local Green's functions.
pub fn canonical_height(fam: &Family, t: &Rational, z: &Rational, tol: f64) -> Result<HeightInterval> {
    let map = DynMap::new(fam, t)?;
    canonical_height_map(&map, z, tol)
}

pub fn canonical_height_map(map: &DynMap, z: &Rational, tol: f64) -> Result<HeightInterval> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if find_cycle(map, z, 64, 4096).is_some() {
        return Ok(HeightInterval::zero());
    }
    let budget = default_budget(map.d());
    let mut total = match green_at(map, Place::Archimedean, z, tol / 8.0, budget) {
        Ok(g) => g.interval(),
        Err(Error::Budget { best, .. }) => best,
        Err(e) => return Err(e),
    };
    for pd in map.bad_primes() {
        let g = match green_at(map, Place::Finite(pd.prime), z, tol, budget) {
            Ok(g) => g.interval(),
            Err(Error::Budget { best, .. }) => best,
            Err(e) => return Err(e),
        };
        total = total + g;
    }
    let rest = den_coprime_part(z.denom(), map.bad_primes().iter().map(|b| b.prime));
    if !rest.is_one() {
        total = total + Interval::ln_bigint(&rest);
    }
    let total = total.max0();
    if total.width() > tol {
        return Err(Error::Budget { steps: budget, best: total });
    }
    Ok(total.into())
}

/// Canonical height by telescoping: `d^{-N} h(f^N z) +- C / ((d-1) d^N)`.
/// Iterates until the enclosure is narrower than `tol` or the orbit point
/// exceeds `max_bits`; the latter returns `Budget` with the best enclosure.
pub fn canonical_height_global(
    fam: &Family,
    t: &Rational,
    z: &Rational,
    tol: f64,
    max_bits: u64,
) -> Result<HeightInterval> {
    let map = DynMap::new(fam, t)?;
    canonical_height_global_map(&map, z, tol, max_bits)
}

pub fn canonical_height_global_map(map: &DynMap, z: &Rational, tol: f64, max_bits: u64) -> Result<HeightInterval> {
    let d = map.d();
    let c = defect_bound_poly(map.poly()).to_interval().hi();
    let tail = Interval::new(-c, c) / Interval::point((d - 1) as f64);
    let mut seen = std::collections::HashSet::new();
    let mut w = z.clone();
    let mut scale = Interval::point(1.0);
    let mut n = 0;
    loop {
        if !seen.insert(crate::arith::hash_key(&w)) {
            return Ok(HeightInterval::zero());
        }
        let est = ((naive_height(&w).to_interval() + tail) / scale).max0();
        if est.width() <= tol {
            return Ok(est.into());
        }
        if w.numer().bits() + w.denom().bits() > max_bits {
            return Err(Error::Budget { steps: n, best: est });
        }
        w = map.apply(&w);
        scale = scale.scale(d as f64);
        n += 1;
    }
}

/// `g_v(x, y) = -log |x - y|_v + G_v(x) + G_v(y)`.
pub fn arakelov_green(fam: &Family, t: &Rational, v: Place, x: &Rational, y: &Rational, tol: f64) -> Result<LocalValue> {
    let map = DynMap::new(fam, t)?;
    arakelov_green_map(&map, v, x, y, tol)
}

pub fn arakelov_green_map(map: &DynMap, v: Place, x: &Rational, y: &Rational, tol: f64) -> Result<LocalValue> {
    if x == y {
        return Err(Error::domain("pairing diverges on the diagonal"));
    }
    let diff = x - y;
    let budget = default_budget(map.d());
    match v {
        Place::Finite(p) => {
            let gx = green_at(map, v, x, tol, budget)?;
            let gy = green_at(map, v, y, tol, budget)?;
            let vd = valuation_or_inf(&diff, p).expect("nonzero difference");
            match (gx.value.exact_coeff(), gy.value.exact_coeff()) {
                (Some(a), Some(b)) => Ok(LocalValue::Exact {
                    coeff: Rational::from_integer(BigInt::from(vd)) + a + b,
                    prime: p,
                }),
                _ => {
                    let dist = LocalValue::Exact { coeff: Rational::from_integer(BigInt::from(vd)), prime: p };
                    Ok(LocalValue::Approx(dist.to_interval() + gx.interval() + gy.interval()))
                }
            }
        }
        Place::Archimedean => {
            let gx = green_at(map, v, x, tol / 2.0, budget)?;
            let gy = green_at(map, v, y, tol / 2.0, budget)?;
            Ok(LocalValue::Approx(-Interval::ln_rational(&diff) + gx.interval() + gy.interval()))
        }
    }
}
