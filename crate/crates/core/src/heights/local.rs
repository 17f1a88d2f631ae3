//! Local heights relative to a point `a` and the conductor-type sums built
//! from them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{factor::factorize, log_plus, LocalValue, LogSum, Place, Rational};
use crate::error::{Error, Result};
use crate::family::CoverAnalysis;

/// A point of `P^1(Q)`: `None` is infinity.
pub type PoleRef<'a> = Option<&'a Rational>;

/// `t - a`, or `1/t` when `a` is infinity.
fn local_parameter(a: PoleRef<'_>, t: &Rational) -> Result<Rational> {
    let x = match a {
        Some(a) => t - a,
        None => {
            if t.is_zero() {
                return Err(Error::domain("1/t is undefined at t = 0"));
            }
            t.recip()
        }
    };
    if x.is_zero() {
        return Err(Error::domain(format!("t coincides with a = {t}")));
    }
    Ok(x)
}

/// `lambda_{a,v}(t) = log+ |1 / (t - a)|_v`.
pub fn lambda_local(a: PoleRef<'_>, v: Place, t: &Rational) -> Result<LocalValue> {
    let x = local_parameter(a, t)?;
    Ok(log_plus(&x.recip(), v))
}

/// `sum log p` over primes `p` outside `s` with `v_p(t - a) > 0`.
pub fn conductor_count(a: PoleRef<'_>, s: &BTreeSet<Place>, t: &Rational) -> Result<LogSum> {
    let x = local_parameter(a, t)?;
    let mut out = LogSum::zero();
    for (p, _) in factorize(x.numer())? {
        if !s.contains(&Place::Finite(p)) {
            out.add_term(p, Rational::one());
        }
    }
    Ok(out)
}

/// Split the local heights at the affine poles of order prime to `e` into
/// the part where `e` does not divide the valuation (`L1`) and `1/e` times
/// the part where it does (`L2`). Conjugate poles are handled together
/// through the valuation of their minimal polynomial at `t`.
pub fn l1_l2_split(cov: &CoverAnalysis, e: u32, s: &BTreeSet<Place>, t: &Rational) -> Result<(LogSum, LogSum)> {
    if e == 0 {
        return Err(Error::domain("e must be positive"));
    }
    let mut l1 = LogSum::zero();
    let mut l2 = LogSum::zero();
    let e_big = BigInt::from(e);
    for (g, pole) in cov.affine_poles() {
        if num_integer::gcd(pole.order, e) != 1 {
            continue;
        }
        let x = g.eval(t);
        if x.is_zero() {
            return Err(Error::domain(format!("t = {t} is a pole of the cover")));
        }
        for (p, k) in factorize(x.numer())? {
            if s.contains(&Place::Finite(p)) {
                continue;
            }
            let k = BigInt::from(k);
            if (&k % &e_big).is_zero() {
                l2.add_term(p, Rational::new(k, e_big.clone()));
            } else {
                l1.add_term(p, Rational::from_integer(k));
            }
        }
    }
    Ok((l1, l2))
}
