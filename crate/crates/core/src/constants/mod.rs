//! Explicit place-by-place constants for a monic family, the resulting
//! lower bound `h^(x) >= eps h(t) - C`, and the integral model resultant.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{format_rational, int_valuation, prime_divisors, Interval, LogOf, LogSum, Place, Rational};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::heights::naive_height;
use crate::poly::{discriminant, sylvester_resultant};

/// A function on places vanishing at all but finitely many primes: an
/// enclosure at infinity and exact multiples of `log p` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MKConstants {
    pub archimedean: Interval,
    pub finite: LogSum,
}

impl MKConstants {
    pub fn at(&self, v: Place) -> Interval {
        match v {
            Place::Archimedean => self.archimedean,
            Place::Finite(p) => LogSum::single(p, self.finite.coeff(p)).to_interval(),
        }
    }

    /// Primes with a nonzero value.
    pub fn support(&self) -> BTreeSet<u64> {
        self.finite.terms().map(|(p, _)| p).collect()
    }
}

fn imax(a: Interval, b: Interval) -> Interval {
    Interval::new(a.lo().max(b.lo()), a.hi().max(b.hi()))
}

fn ratio(n: u32, d: u32) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn require_monic(fam: &Family) -> Result<()> {
    if fam.is_monic() {
        Ok(())
    } else {
        Err(Error::NotMonic)
    }
}

fn require_d_gt_e(fam: &Family) -> Result<()> {
    if fam.d() > fam.e() {
        Ok(())
    } else {
        Err(Error::domain(format!("requires d > e, got d = e = {}", fam.e())))
    }
}

/// `ln max(1, B) / e` for the stored root bound `B`.
fn log_plus_root_bound_over_e(fam: &Family) -> Interval {
    let b = &fam.factor_data().root_bound;
    let lb = if b > &Rational::one() { Interval::ln_rational(b) } else { Interval::ZERO };
    lb / Interval::point(fam.e() as f64)
}

/// `a_v`: at a prime, `(1/e) max |v(beta_i)| log p`; at infinity,
/// `(1/e)(log+ B + log 3)`.
pub fn mk_a(fam: &Family) -> Result<MKConstants> {
    require_monic(fam)?;
    let fd = fam.factor_data();
    let e = Rational::from_integer(BigInt::from(fam.e()));
    let mut finite = LogSum::zero();
    for &p in fd.newton.keys() {
        finite.add_term(p, fd.max_abs_root_valuation(p) / &e);
    }
    let ln3 = Interval::ln_bigint(&BigInt::from(3)) / Interval::point(fam.e() as f64);
    Ok(MKConstants { archimedean: log_plus_root_bound_over_e(fam) + ln3, finite })
}

/// `b_v`: zero at every prime; `(1/e)(d/(d-1)) log(3/2)` at infinity.
pub fn mk_b(fam: &Family) -> Result<MKConstants> {
    require_monic(fam)?;
    let (d, e) = (fam.d(), fam.e());
    let k = Interval::from_rational(&(ratio(d, d - 1) / Rational::from_integer(BigInt::from(e))));
    Ok(MKConstants { archimedean: k * Interval::ln_rational(&ratio(3, 2)), finite: LogSum::zero() })
}

/// `e_v` with `log |f_1(z)|_v >= min alpha(zeta) log |z - zeta|_v - e_v`,
/// `zeta` running over the roots of `P(z) = Q(z^e)`, `Q` the squarefree
/// part of `F(X, 1)`.
///
/// With `zeta_0` the nearest root to `z`, the other factors satisfy
/// `|z - zeta| >= |zeta - zeta_0| / 2_v`, and
/// `-sum log |zeta - zeta_0| = -log |P'(zeta_0)|` is bounded through
/// `disc P = +- prod P'(zeta)` and `|zeta - zeta'| <= (2 R)_v`.
pub fn mk_mvt(fam: &Family) -> Result<MKConstants> {
    require_monic(fam)?;
    require_d_gt_e(fam)?;
    let fd = fam.factor_data();
    let alpha = fd.max_multiplicity();
    let q = fam.form_poly().squarefree_part().monic();
    let p_poly = q.inflate(fam.e() as usize);
    let big_d = p_poly.degree().unwrap() as u32;
    let disc = discriminant(&p_poly);
    let spread = Rational::from_integer(BigInt::from(big_d * (big_d - 1)));
    let e = Rational::from_integer(BigInt::from(fam.e()));
    let alpha_q = Rational::from_integer(BigInt::from(alpha));

    let mut primes: BTreeSet<u64> = fd.newton.keys().copied().collect();
    primes.extend(prime_divisors(disc.numer())?);
    primes.extend(prime_divisors(disc.denom())?);
    let mut finite = LogSum::zero();
    for p in primes {
        let v_disc = int_valuation(disc.numer(), p) - int_valuation(disc.denom(), p);
        let a_p = fd.max_abs_root_valuation(p) / &e;
        let c = Rational::from_integer(BigInt::from(v_disc)) + &spread * a_p;
        if c.is_positive() {
            finite.add_term(p, c * &alpha_q);
        }
    }

    let ln_2r = Interval::ln2() + log_plus_root_bound_over_e(fam);
    let arch = (ln_2r.scale((big_d * (big_d - 1)) as f64) - Interval::ln_rational(&disc)).max0();
    Ok(MKConstants { archimedean: arch.scale(alpha as f64), finite })
}

/// `c_v = max{0, a_v + e_v, 2 b_v - a_v} + log 2_v`.
pub fn mk_c(a: &MKConstants, b: &MKConstants, mvt: &MKConstants) -> MKConstants {
    let arch = imax(
        imax(Interval::ZERO, a.archimedean + mvt.archimedean),
        b.archimedean.scale(2.0) - a.archimedean,
    ) + Interval::ln2();
    // at primes b = 0 and a, e >= 0
    let mut finite = a.finite.clone();
    finite.add(&mvt.finite);
    MKConstants { archimedean: arch, finite }
}

/// Infinity together with every prime where `a`, `b` or (for `d > e`) `e`
/// is nonzero.
pub fn exceptional_places(fam: &Family) -> Result<BTreeSet<Place>> {
    let mut out = BTreeSet::from([Place::Archimedean]);
    let mut add = |m: &MKConstants| out.extend(m.support().into_iter().map(Place::Finite));
    add(&mk_a(fam)?);
    add(&mk_b(fam)?);
    if fam.d() > fam.e() {
        add(&mk_mvt(fam)?);
    }
    Ok(out)
}

/// `delta = min{1/e, 1 - 1/e - 1/d}`.
pub fn pigeonhole_delta(fam: &Family) -> Result<Rational> {
    require_d_gt_e(fam)?;
    let (d, e) = (fam.d(), fam.e());
    let inv_e = ratio(1, e);
    let other = Rational::one() - &inv_e - ratio(1, d);
    Ok(inv_e.min(other))
}

/// `eps = delta / (2 d^N)`, kept symbolically since `d^N` is astronomically
/// large; `value` underflows to 0 for all but tiny `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Epsilon {
    #[serde(serialize_with = "ser_rational")]
    pub delta: Rational,
    pub d: u32,
    #[serde(serialize_with = "ser_bigint")]
    pub orbit_bound: BigInt,
    pub value: f64,
    pub log10: f64,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub family: String,
    pub d: u32,
    pub e: u32,
    pub a: MKConstants,
    pub b: MKConstants,
    pub mvt_e: MKConstants,
    pub c: MKConstants,
    #[serde(serialize_with = "ser_rational")]
    pub delta: Rational,
    pub exceptional: BTreeSet<Place>,
    /// Finite places of bad reduction of `t`, as supplied.
    pub s: usize,
    /// `#S = s + 1 + #{p : a_p != 0 or b_p != 0}`.
    pub s_size: usize,
    #[serde(serialize_with = "ser_bigint")]
    pub orbit_bound: BigInt,
    pub epsilon: Epsilon,
    /// `sum_v max{c_v, max(a_v, b_v) + log 2_v}` over the exceptional places.
    pub c_numerator: Interval,
    /// `c_numerator / (2 d^N)`; 0 after underflow.
    pub c_value: f64,
    pub c_log10: f64,
}

/// `(orbitBound, eps)` for a given `#S`.
pub fn orbit_bound_and_epsilon(d: u32, delta: &Rational, s_size: usize) -> (BigInt, Epsilon) {
    let n = BigInt::from(2) * BigInt::from(d + 2).pow(s_size as u32);
    let nf = n.to_f64().unwrap_or(f64::INFINITY);
    let dl = (d as f64).log10();
    let delta_f = delta.to_f64().unwrap_or(0.0);
    let log10 = delta_f.log10() - 2f64.log10() - nf * dl;
    let value = if log10 < -320.0 { 0.0 } else { delta_f / (2.0 * (d as f64).powf(nf)) };
    let eps = Epsilon { delta: delta.clone(), d, orbit_bound: n.clone(), value, log10 };
    (n, eps)
}

/// Constants for `h^_{f_t}(x) >= eps h(t) - C`, with `s` the number of
/// primes where `t` is not integral.
pub fn theorem1_constants(fam: &Family, s: usize) -> Result<ConstantsReport> {
    require_monic(fam)?;
    if fam.d() == fam.e() {
        return Err(Error::NotComputed(format!(
            "d = e = {}: the family is z^d + b t and the bound follows from the unicritical case",
            fam.d()
        )));
    }
    let a = mk_a(fam)?;
    let b = mk_b(fam)?;
    let mvt = mk_mvt(fam)?;
    let c = mk_c(&a, &b, &mvt);
    let delta = pigeonhole_delta(fam)?;
    let exceptional = exceptional_places(fam)?;
    let mut ab_support = a.support();
    ab_support.extend(b.support());
    let s_size = s + 1 + ab_support.len();
    let (orbit_bound, epsilon) = orbit_bound_and_epsilon(fam.d(), &delta, s_size);

    let mut num = Interval::ZERO;
    for &v in &exceptional {
        let ln2v = if v.is_archimedean() { Interval::ln2() } else { Interval::ZERO };
        num = num + imax(c.at(v), imax(a.at(v), b.at(v)) + ln2v);
    }
    let nf = orbit_bound.to_f64().unwrap_or(f64::INFINITY);
    let d = fam.d() as f64;
    let c_log10 = num.hi().log10() - 2f64.log10() - nf * d.log10();
    let c_value = if c_log10 < -320.0 { 0.0 } else { num.hi() / (2.0 * d.powf(nf)) };
    Ok(ConstantsReport {
        family: fam.describe(),
        d: fam.d(),
        e: fam.e(),
        a,
        b,
        mvt_e: mvt,
        c,
        delta,
        exceptional,
        s,
        s_size,
        orbit_bound,
        epsilon,
        c_numerator: num,
        c_value,
        c_log10,
    })
}

/// Resultant of the integral model `[F : G]` of `f_t`, where
/// `F(X, Y) = sum D c_k X^k Y^{d-k}`, `G = D Y^d` and `D` clears the
/// denominators of the coefficients `c_k` of `f_t`.
pub fn model_resultant(fam: &Family, t: &Rational) -> Rational {
    let f = fam.specialize(t);
    let d = fam.d() as usize;
    let den = Rational::from_integer(f.denom_lcm());
    let big_f: Vec<Rational> = (0..=d).map(|k| f.coeff(k) * &den).collect();
    sylvester_resultant(&big_f, d, &[den], d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultantBound {
    pub lhs: LogOf,
    pub rhs: LogOf,
    pub ok: bool,
}

/// `log |Res| <= (2 d^2 / e) h(t) + d log(A |A a_n|)`, where `A` is the
/// common denominator of the `a_j`. For an integral family this is at
/// most `(2 d^2 / e) h(t) + 2 d h(a_n)`. Compared exactly.
pub fn resultant_bound_check(fam: &Family, t: &Rational) -> ResultantBound {
    let res = model_resultant(fam, t).abs();
    let d = fam.d();
    let a_den = (0..=fam.n()).fold(BigInt::one(), |acc, j| num_integer::lcm(acc, fam.a(j).denom().clone()));
    let a_den = Rational::from_integer(a_den);
    let lead_term = (&a_den * (&a_den * fam.lead()).abs()).pow(d as i32);
    let h = naive_height(t).0;
    let exp = 2 * d * d / fam.e();
    let rhs = h.pow(exp as i32) * lead_term;
    let ok = res <= rhs;
    ResultantBound { lhs: LogOf(res), rhs: LogOf(rhs), ok }
}
