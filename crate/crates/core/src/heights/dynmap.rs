//! A specialized map `f_t` together with the escape data needed at each
//! place. Building it once per `(family, t)` lets scans reuse it for every
//! starting point.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{int_valuation, prime_divisors, valuation_or_inf, Interval, Rational};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::poly::Poly;

/// Escape data at a prime `p` for `f(z) = sum c_k z^k`.
///
/// Points with `-v(z) > rho` satisfy `v(f(z)) = v(c_d) + d v(z)` and stay
/// in that region; there `G(z) = (-v(z) - v(c_d)/(d-1)) log p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadicData {
    pub prime: u64,
    pub rho: Rational,
    pub rho_floor: i64,
    pub v_lead: i64,
    /// `v(c_d) / (d - 1)`.
    pub kappa: Rational,
    /// `sup G / log p` over the disk `-v(z) <= rho`.
    pub sup_green: Rational,
}

/// Archimedean escape data: for `|w| >= r0`, `|f(w)| >= 2 |w|` and the
/// relative perturbation `eta(w)` is at most 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchData {
    /// Upper bounds for `|c_k / c_d|`, `k < d`.
    pub ratios: Vec<f64>,
    /// Enclosures of `c_k / c_d`, `k < d`.
    pub signed_ratios: Vec<Interval>,
    pub lead_negative: bool,
    pub ln_lead: Interval,
    /// `ln |c_d| / (d - 1)`.
    pub kappa: Interval,
    /// A power of two.
    pub r0: Rational,
    pub ln_r0: Interval,
    pub eta_r0: f64,
}

#[derive(Debug, Clone)]
pub struct DynMap {
    d: u32,
    e: u32,
    poly: Poly,
    /// `f(z) = inner(z^e)`.
    inner: Poly,
    bad: Vec<PadicData>,
    arch: ArchData,
}

impl DynMap {
    pub fn new(fam: &Family, t: &Rational) -> Result<DynMap> {
        let poly = fam.specialize(t);
        let mut primes: BTreeSet<u64> = BTreeSet::new();
        for j in 0..=fam.n() {
            primes.extend(prime_divisors(fam.a(j).denom())?);
        }
        primes.extend(prime_divisors(fam.lead().numer())?);
        primes.extend(prime_divisors(t.denom())?);
        DynMap::with_primes(poly, fam.e(), primes)
    }

    /// Any polynomial of degree at least 2 of the form `g(z^e)`.
    pub fn from_poly(poly: Poly, e: u32) -> Result<DynMap> {
        let mut primes = BTreeSet::new();
        for c in poly.coeffs() {
            primes.extend(prime_divisors(c.denom())?);
        }
        primes.extend(prime_divisors(poly.lead().numer())?);
        DynMap::with_primes(poly, e, primes)
    }

    fn with_primes(poly: Poly, e: u32, primes: BTreeSet<u64>) -> Result<DynMap> {
        let d = poly.degree().unwrap_or(0) as u32;
        if d < 2 {
            return Err(Error::domain("map must have degree at least 2"));
        }
        let e = if e >= 1 && poly.coeffs().iter().enumerate().all(|(k, c)| c.is_zero() || k % e as usize == 0) {
            e
        } else {
            1
        };
        let inner = Poly::new(poly.coeffs().iter().step_by(e as usize).cloned().collect());
        let bad = primes.into_iter().map(|p| padic_data(&poly, p)).collect();
        let arch = arch_data(&poly)?;
        Ok(DynMap { d, e, poly, inner, bad, arch })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn arch(&self) -> &ArchData {
        &self.arch
    }

    /// Primes where the map may have bad reduction; at every other prime
    /// `G_p(z) = log+ |z|_p`.
    pub fn bad_primes(&self) -> &[PadicData] {
        &self.bad
    }

    pub fn padic(&self, p: u64) -> PadicData {
        self.bad
            .iter()
            .find(|b| b.prime == p)
            .cloned()
            .unwrap_or_else(|| padic_data(&self.poly, p))
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad.iter().any(|b| b.prime == p)
    }

    pub fn apply(&self, z: &Rational) -> Rational {
        let x = if self.e == 1 { z.clone() } else { z.pow(self.e as i32) };
        self.inner.eval(&x)
    }

    pub fn apply_interval(&self, z: Interval) -> Interval {
        let x = if self.e == 1 { z } else { z.powi(self.e) };
        self.inner.eval_interval(x)
    }

    pub(crate) fn inner(&self) -> &Poly {
        &self.inner
    }

    pub(crate) fn e(&self) -> u32 {
        self.e
    }

    /// Whether `w` lies in a certified escape region at some place, and which.
    pub fn escape_place(&self, w: &Rational) -> Option<crate::arith::Place> {
        use crate::arith::Place;
        if w.abs() >= self.arch.r0 {
            return Some(Place::Archimedean);
        }
        if w.is_zero() {
            return None;
        }
        // a denominator prime of good reduction escapes
        let mut den = w.denom().clone();
        for b in &self.bad {
            let pb = BigInt::from(b.prime);
            while den.is_multiple_of(&pb) {
                den /= &pb;
            }
        }
        if !den.is_one() {
            let p = crate::arith::factor::smallest_prime_factor(&den).ok()?;
            return Some(Place::Finite(p));
        }
        for b in &self.bad {
            if let Some(v) = valuation_or_inf(w, b.prime) {
                if Rational::from_integer(BigInt::from(-v)) > b.rho {
                    return Some(Place::Finite(b.prime));
                }
            }
        }
        None
    }
}

pub(crate) fn padic_data(poly: &Poly, p: u64) -> PadicData {
    let c = poly.coeffs();
    let d = (c.len() - 1) as i64;
    let v_lead = int_valuation(c[d as usize].numer(), p) - int_valuation(c[d as usize].denom(), p);
    let kappa = Rational::new(BigInt::from(v_lead), BigInt::from(d - 1));
    let mut rho = kappa.clone();
    let mut l1: Option<Rational> = None;
    for (k, ck) in c.iter().enumerate() {
        let Some(vk) = valuation_or_inf(ck, p) else { continue };
        let k = k as i64;
        if k < d {
            let r = Rational::new(BigInt::from(v_lead - vk), BigInt::from(d - k));
            if r > rho {
                rho = r;
            }
        }
    }
    for (k, ck) in c.iter().enumerate() {
        let Some(vk) = valuation_or_inf(ck, p) else { continue };
        let cand = Rational::from_integer(BigInt::from(-vk)) + &rho * Rational::from_integer(BigInt::from(k as i64));
        if l1.as_ref().is_none_or(|m| &cand > m) {
            l1 = Some(cand);
        }
    }
    let l1 = l1.unwrap();
    let sup = (&l1 - &kappa).max(Rational::zero()) / Rational::from_integer(BigInt::from(d));
    PadicData { prime: p, rho_floor: rho.floor().to_integer().try_into().expect("escape radius fits"), rho, v_lead, kappa, sup_green: sup }
}

fn arch_data(poly: &Poly) -> Result<ArchData> {
    let c = poly.coeffs();
    let d = c.len() - 1;
    let lead = &c[d];
    let ratios: Vec<f64> = c[..d]
        .iter()
        .map(|ck| Interval::from_rational(&(ck / lead).abs()).hi())
        .collect();
    let signed_ratios: Vec<Interval> = c[..d].iter().map(|ck| Interval::from_rational(&(ck / lead))).collect();
    let lead_negative = lead.is_negative();
    let ln_lead = Interval::ln_rational(lead);
    let kappa = ln_lead / Interval::point((d - 1) as f64);
    let ln2 = Interval::ln2();
    // R0 = 2^j: smallest j with eta <= 1/2 and ln|c_d| + (d-1) ln R0 + ln(1 - eta) >= ln 2
    let mut j: i64 = 0;
    loop {
        if j > 4000 {
            return Err(Error::domain("coefficients too large for archimedean escape data"));
        }
        let ln_r = ln2.scale(j as f64);
        let eta = eta_upper(&ratios, ln_r.lo());
        if eta <= 0.5 {
            let lower = ln_lead.lo() + ln_r.scale((d - 1) as f64).lo() - 2.0 * eta;
            if lower.next_down() >= ln2.hi() {
                let r0 = if j >= 0 {
                    Rational::from_integer(BigInt::one() << j as usize)
                } else {
                    Rational::new(BigInt::one(), BigInt::one() << (-j) as usize)
                };
                return Ok(ArchData { ratios, signed_ratios, lead_negative, ln_lead, kappa, r0, ln_r0: ln_r, eta_r0: eta });
            }
        }
        j += 1;
    }
}

/// Upper bound for `sum_k r_k e^{-(d-k) L}` given `L <= ln |w|`.
pub(crate) fn eta_upper(ratios: &[f64], ln_w_lo: f64) -> f64 {
    let d = ratios.len();
    let mut s = Interval::ZERO;
    for (k, &r) in ratios.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        let expo = Interval::point(ln_w_lo).scale(-((d - k) as f64)).exp();
        s = s + Interval::point(r) * expo;
    }
    s.hi()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, Place};
    use crate::family::unicritical;

    #[test]
    fn padic_radius() {
        // z^2 + 1/9 at p = 3: rho = 1, escape for v(z) <= -2
        let m = DynMap::new(&unicritical(2), &rat(1, 9)).unwrap();
        let b = m.padic(3);
        assert_eq!(b.rho, int(1));
        assert_eq!(b.kappa, int(0));
        assert_eq!(b.sup_green, int(1));
        // good reduction elsewhere
        assert_eq!(m.padic(5).rho, int(0));
    }

    #[test]
    fn arch_escape_radius() {
        let m = DynMap::new(&unicritical(2), &int(1)).unwrap();
        let r0 = m.arch().r0.clone();
        // |w|^2 (1 - 1/|w|^2) >= 2|w| needs |w| >= 1 + sqrt(2)
        assert!(r0 >= int(3));
        assert!(m.arch().eta_r0 <= 0.5);
    }

    #[test]
    fn escape_places() {
        let m = DynMap::new(&unicritical(2), &int(-1)).unwrap();
        assert_eq!(m.escape_place(&rat(1, 2)), Some(Place::Finite(2)));
        assert_eq!(m.escape_place(&int(1)), None);
        assert_eq!(m.escape_place(&int(100)), Some(Place::Archimedean));
    }
}
