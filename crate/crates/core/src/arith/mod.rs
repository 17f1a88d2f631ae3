//! Exact rational arithmetic, places of Q, p-adic valuations and the
//! interval type used for archimedean quantities.

pub mod factor;
mod interval;
mod newton;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use interval::Interval;
pub use newton::{newton_polygon, NewtonSegment};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"n"`, `"-n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Always `"num/den"`, denominator positive.
/// Hash key for a rational. `Rational`'s own `Hash` recurses through the
/// continued fraction and overflows the stack on very large values.
pub(crate) fn hash_key(q: &Rational) -> (BigInt, BigInt) {
    (q.numer().clone(), q.denom().clone())
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// A place of Q: the archimedean absolute value or a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl Place {
    /// Checked constructor for finite places.
    pub fn prime(p: u64) -> Result<Place> {
        if factor::is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::domain(format!("{p} is not prime")))
        }
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Archimedean)
    }

    /// `deg(v) = log p` at a finite place; `None` at infinity.
    pub fn degree(&self) -> Option<Interval> {
        match self {
            Place::Archimedean => None,
            Place::Finite(p) => Some(Interval::ln_bigint(&BigInt::from(*p))),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Place::Archimedean),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::Parse(format!("malformed place {s:?}")))?;
                Place::prime(p).map_err(|_| Error::Parse(format!("place {p} is not prime")))
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Place, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `v_p(n)` for a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// `v_p(q) = v_p(num) - v_p(den)`.
pub fn padic_valuation(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::domain("valuation of zero is infinite"));
    }
    if p < 2 {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

/// Valuation with `None` standing for +infinity (the zero element).
pub fn valuation_or_inf(q: &Rational, p: u64) -> Option<i64> {
    (!q.is_zero()).then(|| int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

/// A local logarithmic quantity: an exact rational multiple of `log p` at a
/// finite place, or a certified real enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalValue {
    Exact { coeff: Rational, prime: u64 },
    Approx(Interval),
}

impl LocalValue {
    pub fn zero_at(prime: u64) -> LocalValue {
        LocalValue::Exact { coeff: Rational::zero(), prime }
    }

    pub fn to_interval(&self) -> Interval {
        match self {
            LocalValue::Exact { coeff, prime } => {
                if coeff.is_zero() {
                    Interval::ZERO
                } else {
                    Interval::from_rational(coeff) * Interval::ln_bigint(&BigInt::from(*prime))
                }
            }
            LocalValue::Approx(iv) => *iv,
        }
    }

    pub fn exact_coeff(&self) -> Option<&Rational> {
        match self {
            LocalValue::Exact { coeff, .. } => Some(coeff),
            LocalValue::Approx(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LocalValueRepr {
    Exact {
        #[serde(with = "rational_str")]
        coeff: Rational,
        prime: u64,
    },
    Approx {
        lo: f64,
        hi: f64,
    },
}

impl Serialize for LocalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LocalValue::Exact { coeff, prime } => LocalValueRepr::Exact { coeff: coeff.clone(), prime: *prime }.serialize(s),
            LocalValue::Approx(iv) => LocalValueRepr::Approx { lo: iv.lo(), hi: iv.hi() }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LocalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<LocalValue, D::Error> {
        Ok(match LocalValueRepr::deserialize(d)? {
            LocalValueRepr::Exact { coeff, prime } => LocalValue::Exact { coeff, prime },
            LocalValueRepr::Approx { lo, hi } => {
                if !(lo <= hi) {
                    return Err(serde::de::Error::custom("interval endpoints out of order"));
                }
                LocalValue::Approx(Interval::new(lo, hi))
            }
        })
    }
}

/// `log+ |q|_v`.
pub fn log_plus(q: &Rational, v: Place) -> LocalValue {
    match v {
        Place::Finite(p) => {
            let coeff = match valuation_or_inf(q, p) {
                Some(k) if k < 0 => Rational::from_integer(BigInt::from(-k)),
                _ => Rational::zero(),
            };
            LocalValue::Exact { coeff, prime: p }
        }
        Place::Archimedean => {
            if q.abs() <= Rational::one() {
                LocalValue::Approx(Interval::ZERO)
            } else {
                LocalValue::Approx(Interval::ln_rational(q).max0())
            }
        }
    }
}

/// `log |q|_v` for nonzero `q`.
pub fn log_abs(q: &Rational, v: Place) -> Result<LocalValue> {
    match v {
        Place::Finite(p) => Ok(LocalValue::Exact {
            coeff: Rational::from_integer(BigInt::from(-padic_valuation(q, p)?)),
            prime: p,
        }),
        Place::Archimedean => {
            if q.is_zero() {
                return Err(Error::domain("log of zero"));
            }
            Ok(LocalValue::Approx(Interval::ln_rational(q)))
        }
    }
}

/// Finite places where `|q|_p != 1`.
pub fn support(q: &Rational) -> Result<BTreeSet<Place>> {
    if q.is_zero() {
        return Err(Error::domain("support of zero is undefined"));
    }
    let mut out = BTreeSet::new();
    for n in [q.numer(), q.denom()] {
        for (p, _) in factor::factorize(n)? {
            out.insert(Place::Finite(p));
        }
    }
    Ok(out)
}

/// Primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    Ok(factor::factorize(n)?.into_iter().map(|(p, _)| p).collect())
}

/// A finite sum `sum_p c_p log p` with rational coefficients, kept exact.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogSum {
    terms: BTreeMap<u64, Rational>,
}

impl LogSum {
    pub fn zero() -> LogSum {
        LogSum::default()
    }

    pub fn single(prime: u64, coeff: Rational) -> LogSum {
        let mut s = LogSum::zero();
        s.add_term(prime, coeff);
        s
    }

    pub fn add_term(&mut self, prime: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let e = self.terms.entry(prime).or_insert_with(Rational::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&prime);
        }
    }

    pub fn add(&mut self, other: &LogSum) {
        for (p, c) in &other.terms {
            self.add_term(*p, c.clone());
        }
    }

    pub fn scaled(&self, k: &Rational) -> LogSum {
        let mut out = LogSum::zero();
        for (p, c) in &self.terms {
            out.add_term(*p, c * k);
        }
        out
    }

    pub fn coeff(&self, prime: u64) -> Rational {
        self.terms.get(&prime).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_interval(&self) -> Interval {
        self.terms.iter().fold(Interval::ZERO, |acc, (p, c)| {
            acc + LocalValue::Exact { coeff: c.clone(), prime: *p }.to_interval()
        })
    }

    /// Exact comparison of two sums of logarithms via integer powers.
    pub fn cmp_exact(&self, other: &LogSum) -> Ordering {
        let mut diff = self.clone();
        diff.add(&other.scaled(&-Rational::one()));
        if diff.is_zero() {
            return Ordering::Equal;
        }
        let lcm = diff.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let (mut pos, mut neg) = (BigInt::one(), BigInt::one());
        for (p, c) in &diff.terms {
            let e = (c * Rational::from_integer(lcm.clone())).to_integer();
            let k = e.abs().to_u32().expect("exponent too large for exact comparison");
            let pw = BigInt::from(*p).pow(k);
            if e.is_positive() {
                pos *= pw;
            } else {
                neg *= pw;
            }
        }
        pos.cmp(&neg)
    }
}

/// Serialized as `{"p": "coeff", ...}`.
impl Serialize for LogSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.terms.len()))?;
        for (p, c) in &self.terms {
            m.serialize_entry(&p.to_string(), &format_rational(c))?;
        }
        m.end()
    }
}

/// `ln q` for a positive rational `q`, kept symbolically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogOf(pub Rational);

impl LogOf {
    pub fn new(q: Rational) -> Result<LogOf> {
        if q.is_positive() {
            Ok(LogOf(q))
        } else {
            Err(Error::domain(format!("logarithm of non-positive {q}")))
        }
    }

    pub fn zero() -> LogOf {
        LogOf(Rational::one())
    }

    pub fn arg(&self) -> &Rational {
        &self.0
    }

    pub fn to_interval(&self) -> Interval {
        if self.0.is_one() {
            Interval::ZERO
        } else {
            Interval::ln_rational(&self.0)
        }
    }
}

impl PartialOrd for LogOf {
    fn partial_cmp(&self, other: &LogOf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogOf {
    fn cmp(&self, other: &LogOf) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Serialize for LogOf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let iv = self.to_interval();
        let mut st = s.serialize_struct("LogOf", 3)?;
        st.serialize_field("log_of", &format_rational(&self.0))?;
        st.serialize_field("lo", &iv.lo())?;
        st.serialize_field("hi", &iv.hi())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&int(18), 3).unwrap(), 2);
        assert_eq!(padic_valuation(&rat(5, 8), 2).unwrap(), -3);
        assert_eq!(padic_valuation(&rat(7, 9), 5).unwrap(), 0);
        assert!(padic_valuation(&int(0), 5).is_err());
    }

    #[test]
    fn log_plus_examples() {
        assert_eq!(log_plus(&rat(1, 2), Place::Archimedean), LocalValue::Approx(Interval::ZERO));
        assert_eq!(log_plus(&rat(1, 3), Place::Finite(3)), LocalValue::Exact { coeff: int(1), prime: 3 });
        assert_eq!(log_plus(&int(9), Place::Finite(3)), LocalValue::Exact { coeff: int(0), prime: 3 });
        assert_eq!(log_plus(&int(0), Place::Finite(3)), LocalValue::Exact { coeff: int(0), prime: 3 });
        let iv = log_plus(&int(10), Place::Archimedean).to_interval();
        assert!(iv.contains(10f64.ln()));
    }

    #[test]
    fn support_examples() {
        let s = |q: Rational| support(&q).unwrap().into_iter().collect::<Vec<_>>();
        assert_eq!(s(int(12)), vec![Place::Finite(2), Place::Finite(3)]);
        assert_eq!(s(int(1)), vec![]);
        assert_eq!(
            s(rat(10, 21)),
            vec![Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7)]
        );
        assert!(support(&int(0)).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&int(5)), "5/1");
    }

    #[test]
    fn places_parse() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Archimedean);
        assert_eq!("7".parse::<Place>().unwrap(), Place::Finite(7));
        assert!("9".parse::<Place>().is_err());
    }

    #[test]
    fn logsum_comparison() {
        // log 8 = 3 log 2 < 2 log 3 = log 9
        let a = LogSum::single(2, int(3));
        let b = LogSum::single(3, int(2));
        assert_eq!(a.cmp_exact(&b), Ordering::Less);
        let half = LogSum::single(4, rat(1, 2));
        assert_eq!(half.cmp_exact(&LogSum::single(2, int(1))), Ordering::Equal);
    }
}
