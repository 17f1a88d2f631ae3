//! Weighted homogeneous families `f_t(z) = F(z^e, t)` and base covers.

mod cover;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factor::exact_root;
use crate::arith::{
    format_rational, newton_polygon, prime_divisors, rational_vec_str, valuation_or_inf, NewtonSegment, Rational,
};
use crate::error::{Error, Result};
use crate::poly::{factor_over_q, Poly};

pub use cover::{analyze_cover, is_e_general, n_e, CoverAnalysis, CoverSpec, Generality, Pole, PoleLocation};

/// On-disk form of a family: `{"e": 2, "F": ["1/1", "1/1"]}` with the
/// coefficient of `X^{d/e}` first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub e: u32,
    #[serde(rename = "F", with = "rational_vec_str")]
    pub coeffs: Vec<Rational>,
}

/// Data attached to the roots `beta_i` of `F(X, 1) = a_n prod (X - beta_i)^{alpha_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorData {
    /// Newton polygon of `F(X, 1)` at each prime dividing some coefficient
    /// numerator or denominator; the root valuations at other primes are 0.
    pub newton: BTreeMap<u64, Vec<NewtonSegment>>,
    /// Upper bound for `max |beta_i|`.
    pub root_bound: Rational,
    /// Irreducible factors of `F(X, 1)` over Q (monic) with multiplicities.
    pub factors: Vec<(Poly, u32)>,
}

impl FactorData {
    /// Multiplicity of each distinct root, grouped by irreducible factor.
    pub fn multiplicities(&self) -> Vec<u32> {
        self.factors
            .iter()
            .flat_map(|(f, m)| std::iter::repeat_n(*m, f.degree().unwrap_or(0)))
            .collect()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, m)| *m).max().unwrap_or(1)
    }

    /// Largest `|v_p(beta_i)|` over the roots, zero off the recorded primes.
    pub fn max_abs_root_valuation(&self, p: u64) -> Rational {
        self.newton
            .get(&p)
            .map(|segs| segs.iter().map(|s| s.slope.abs()).max().unwrap_or_else(Rational::zero))
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct Family {
    e: u32,
    /// `a_0, ..., a_n` (ascending, unlike the JSON file order).
    form: Vec<Rational>,
    d: u32,
    monic: bool,
    factor: FactorData,
}

impl TryFrom<FamilySpec> for Family {
    type Error = Error;
    fn try_from(spec: FamilySpec) -> Result<Family> {
        build_family(&spec.coeffs, spec.e)
    }
}

impl From<Family> for FamilySpec {
    fn from(f: Family) -> FamilySpec {
        f.spec()
    }
}

/// Validates a form (highest coefficient first) and weight.
pub fn build_family(coeffs: &[Rational], e: u32) -> Result<Family> {
    if e < 2 {
        return Err(Error::InvalidFamily(format!("weight e = {e} must be at least 2")));
    }
    match coeffs.len() {
        0 => return Err(Error::InvalidFamily("empty coefficient list".into())),
        1 => return Err(Error::InvalidFamily("constant form gives a degenerate family".into())),
        _ => {}
    }
    if coeffs[0].is_zero() {
        return Err(Error::InvalidFamily("leading coefficient is zero, so the form is divisible by Y".into()));
    }
    if coeffs.last().unwrap().is_zero() {
        return Err(Error::InvalidFamily("constant coefficient is zero, so the form is divisible by X".into()));
    }
    let form: Vec<Rational> = coeffs.iter().rev().cloned().collect();
    let n = form.len() - 1;
    let d = e
        .checked_mul(n as u32)
        .ok_or_else(|| Error::InvalidFamily("degree overflow".into()))?;
    let monic = form[n].is_one();
    let factor = factor_data(&form)?;
    Ok(Family { e, form, d, monic, factor })
}

fn factor_data(form: &[Rational]) -> Result<FactorData> {
    let fx = Poly::new(form.to_vec());
    let mut primes = BTreeSet::new();
    for a in form.iter().filter(|a| !a.is_zero()) {
        for n in [a.numer(), a.denom()] {
            primes.extend(prime_divisors(n)?);
        }
    }
    let mut newton = BTreeMap::new();
    for p in primes {
        let vals: Vec<Option<i64>> = form.iter().map(|a| valuation_or_inf(a, p)).collect();
        let segs = newton_polygon(&vals)?;
        if segs.iter().any(|s| !s.slope.is_zero()) {
            newton.insert(p, segs);
        }
    }
    let factors = factor_over_q(&fx)?.factors;
    let root_bound = factors
        .iter()
        .map(|(f, _)| match f.degree() {
            Some(1) => f.coeff(0).abs(),
            _ => f.cauchy_bound(),
        })
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(FactorData { newton, root_bound, factors })
}

impl Family {
    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `deg F = d / e`.
    pub fn n(&self) -> usize {
        self.form.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    /// `a_j`, coefficient of `X^j Y^{n-j}`.
    pub fn a(&self, j: usize) -> &Rational {
        &self.form[j]
    }

    pub fn lead(&self) -> &Rational {
        &self.form[self.n()]
    }

    pub fn factor_data(&self) -> &FactorData {
        &self.factor
    }

    /// `F(X, 1)` as a polynomial in X.
    pub fn form_poly(&self) -> Poly {
        Poly::new(self.form.clone())
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec { e: self.e, coeffs: self.form.iter().rev().cloned().collect() }
    }

    /// Primes dividing a numerator or denominator of some `a_j`.
    pub fn coefficient_primes(&self) -> Result<BTreeSet<u64>> {
        let mut out = BTreeSet::new();
        for a in self.form.iter().filter(|a| !a.is_zero()) {
            out.extend(prime_divisors(a.numer())?);
            out.extend(prime_divisors(a.denom())?);
        }
        Ok(out)
    }

    /// Coefficients of `f_t(z) = sum_j a_j t^{n-j} z^{ej}`.
    pub fn specialize(&self, t: &Rational) -> Poly {
        let n = self.n();
        let e = self.e as usize;
        let mut c = vec![Rational::zero(); self.d as usize + 1];
        let mut tp = Rational::one();
        for j in (0..=n).rev() {
            c[e * j] = &self.form[j] * &tp;
            tp *= t;
        }
        Poly::new(c)
    }

    /// Human-readable `f_t(z)`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for j in (0..=self.n()).rev() {
            let a = &self.form[j];
            if a.is_zero() {
                continue;
            }
            let z = match self.e as usize * j {
                0 => String::new(),
                1 => "z".into(),
                k => format!("z^{k}"),
            };
            let t = match self.n() - j {
                0 => String::new(),
                1 => "t".into(),
                k => format!("t^{k}"),
            };
            let mono: Vec<String> = [z, t].into_iter().filter(|s| !s.is_empty()).collect();
            let coeff = if a.is_one() && !mono.is_empty() { String::new() } else { format!("({})", format_rational(a)) };
            let mut term = coeff;
            if !mono.is_empty() {
                if !term.is_empty() {
                    term.push('*');
                }
                term.push_str(&mono.join("*"));
            }
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Conjugates by `z -> alpha z` to make the family monic: returns `g` and
/// `alpha` with `g_t(z) = alpha f_t(z / alpha)` and `alpha^{d-1} = a_n`.
pub fn monic_normalize(fam: &Family) -> Result<(Family, Rational)> {
    if fam.is_monic() {
        return Ok((fam.clone(), Rational::one()));
    }
    let k = fam.d - 1;
    let lead = fam.lead();
    let unavailable = || Error::NormalizationUnavailable(format_rational(lead), k);
    let num = exact_root(lead.numer(), k).ok_or_else(unavailable)?;
    let den = exact_root(lead.denom(), k).ok_or_else(unavailable)?;
    let alpha = Rational::new(num, den);
    let e = fam.e as i32;
    let form: Vec<Rational> = fam
        .form
        .iter()
        .enumerate()
        .map(|(j, a)| a * alpha.pow(1 - e * j as i32))
        .collect();
    let coeffs: Vec<Rational> = form.into_iter().rev().collect();
    let g = build_family(&coeffs, fam.e)?;
    debug_assert!(g.is_monic());
    Ok((g, alpha))
}

/// Unicritical family `z^d + t` as a convenience.
pub fn unicritical(d: u32) -> Family {
    build_family(&[Rational::one(), Rational::one()], d).expect("valid family")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn fam(c: &[i64], e: u32) -> Result<Family> {
        build_family(&c.iter().map(|&a| int(a)).collect::<Vec<_>>(), e)
    }

    #[test]
    fn builds_examples() {
        let f = fam(&[1, 1], 3).unwrap();
        assert_eq!(f.d(), 3);
        assert!(f.is_monic());
        let g = fam(&[1, -3, 1], 3).unwrap();
        assert_eq!(g.d(), 6);
        assert_eq!(g.factor_data().root_bound, int(4));
        assert_eq!(g.factor_data().multiplicities(), vec![1, 1]);
    }

    #[test]
    fn rejects_degenerate_forms() {
        assert!(matches!(fam(&[0, 1], 2), Err(Error::InvalidFamily(_))));
        assert!(matches!(fam(&[1, 0], 2), Err(Error::InvalidFamily(_))));
        assert!(matches!(fam(&[1], 2), Err(Error::InvalidFamily(_))));
        assert!(matches!(fam(&[1, 1], 1), Err(Error::InvalidFamily(_))));
    }

    #[test]
    fn specialization() {
        let f = unicritical(2);
        assert_eq!(f.specialize(&int(-1)), Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(f.specialize(&int(0)), Poly::from_ints(&[0, 0, 1]));
        let g = fam(&[1, -3, 1], 3).unwrap();
        assert_eq!(g.specialize(&int(2)), Poly::from_ints(&[4, 0, 0, -6, 0, 0, 1]));
    }

    #[test]
    fn normalization() {
        let f = fam(&[4, 1], 3).unwrap();
        let (g, alpha) = monic_normalize(&f).unwrap();
        assert_eq!(alpha, int(2));
        assert_eq!(g.specialize(&int(1)), Poly::from_ints(&[2, 0, 0, 1]));
        assert!(matches!(monic_normalize(&fam(&[2, 1], 3).unwrap()), Err(Error::NormalizationUnavailable(..))));
        let m = unicritical(2);
        assert_eq!(monic_normalize(&m).unwrap(), (m, int(1)));
        // d - 1 odd: a negative leading coefficient has a real root
        let neg = build_family(&[rat(-8, 27), int(1)], 2).unwrap();
        let (h, beta) = monic_normalize(&build_family(&[int(-8), int(1)], 4).unwrap()).unwrap();
        assert_eq!(beta, int(-2));
        assert!(h.is_monic());
        assert!(monic_normalize(&neg).is_ok());
    }

    #[test]
    fn newton_data() {
        // F = X + 4Y: beta = -4
        let f = fam(&[1, 4], 2).unwrap();
        assert_eq!(f.factor_data().max_abs_root_valuation(2), int(2));
        assert_eq!(f.factor_data().max_abs_root_valuation(3), int(0));
    }

    #[test]
    fn serde_roundtrip() {
        let f = fam(&[1, -3, 1], 3).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"e":3,"F":["1/1","-3/1","1/1"]}"#);
        let g: Family = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<Family>(r#"{"e":2,"F":["0/1","1/1"]}"#).is_err());
    }
}
