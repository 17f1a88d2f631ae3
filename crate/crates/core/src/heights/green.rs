//! Local dynamical Green's functions `G_v(z) = lim d^{-n} log+ |f^n(z)|_v`.
//!
//! At a prime the value is certified exactly: either the orbit enters the
//! region where `v(f(w)) = v(c_d) + d v(w)` (then `G` is an explicit
//! rational multiple of `log p`), or a finite set of p-adic balls covering
//! the orbit is shown to be forward invariant inside the bounded disk
//! (then `G = 0`). At infinity the value is enclosed in an interval.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::dynmap::{eta_upper, DynMap, PadicData};
use crate::arith::{hash_key, int_valuation, valuation_or_inf, Interval, LocalValue, Place, Rational};
use crate::error::{Error, Result};
use crate::family::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenMode {
    /// The orbit entered the escape region; the value is exact.
    ExactEscape,
    /// The orbit is certified bounded; the value is exactly 0.
    ExactBounded,
    /// Archimedean enclosure.
    Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenResult {
    pub place: Place,
    pub value: LocalValue,
    pub mode: GreenMode,
    pub steps: usize,
}

impl GreenResult {
    pub fn interval(&self) -> Interval {
        self.value.to_interval()
    }
}

/// Default iteration budget for a map of degree `d`.
pub fn default_budget(d: u32) -> usize {
    64 * d as usize
}

/// `G_{f_t, v}(z)` with archimedean enclosures of width at most `tol`.
pub fn local_green(fam: &Family, t: &Rational, v: Place, z: &Rational, tol: f64) -> Result<GreenResult> {
    let map = DynMap::new(fam, t)?;
    green_at(&map, v, z, tol, default_budget(map.d()))
}

pub fn green_at(map: &DynMap, v: Place, z: &Rational, tol: f64, budget: usize) -> Result<GreenResult> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    match v {
        Place::Finite(p) => green_finite(map, p, z, budget),
        Place::Archimedean => green_arch(map, z, tol, budget),
    }
}

const EXACT_STEPS: usize = 16;
const EXACT_BITS: u64 = 4096;

fn bits(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

fn d_pow(d: u32, n: usize) -> Rational {
    Rational::from_integer(BigInt::from(d).pow(n as u32))
}

fn escape_value(pd: &PadicData, u: i64, d: u32, n: usize) -> Rational {
    (Rational::from_integer(BigInt::from(u)) - &pd.kappa) / d_pow(d, n)
}

fn exact_result(p: u64, coeff: Rational, mode: GreenMode, steps: usize) -> GreenResult {
    GreenResult { place: Place::Finite(p), value: LocalValue::Exact { coeff, prime: p }, mode, steps }
}

fn green_finite(map: &DynMap, p: u64, z: &Rational, budget: usize) -> Result<GreenResult> {
    let d = map.d();
    if !map.is_bad(p) {
        // good reduction: G = log+ |z|_p
        return Ok(match valuation_or_inf(z, p) {
            Some(v) if v < 0 => exact_result(p, Rational::from_integer(BigInt::from(-v)), GreenMode::ExactEscape, 0),
            _ => exact_result(p, Rational::zero(), GreenMode::ExactBounded, 0),
        });
    }
    let pd = map.padic(p);
    let escapes = |w: &Rational| -> Option<i64> {
        let v = valuation_or_inf(w, p)?;
        (Rational::from_integer(BigInt::from(-v)) > pd.rho).then_some(-v)
    };

    let mut seen = HashSet::new();
    let mut w = z.clone();
    let mut n = 0;
    loop {
        if let Some(u) = escapes(&w) {
            return Ok(exact_result(p, escape_value(&pd, u, d, n), GreenMode::ExactEscape, n));
        }
        if !seen.insert(hash_key(&w)) {
            return Ok(exact_result(p, Rational::zero(), GreenMode::ExactBounded, n));
        }
        if n >= EXACT_STEPS.min(budget) || bits(&w) > EXACT_BITS {
            break;
        }
        w = map.apply(&w);
        n += 1;
    }

    let n0 = n;
    let fr = pd.rho_floor;
    let mut deepest = n0;
    let mut extra: i64 = 1;
    for _attempt in 0..10 {
        let cap = -fr + extra;
        let mut ball = Ball::around(&w, cap, p);
        let mut labels = HashSet::new();
        let mut m = 0;
        loop {
            match ball.classify(fr, p) {
                BallClass::Escaping(u) => {
                    return Ok(exact_result(p, escape_value(&pd, u, d, n0 + m), GreenMode::ExactEscape, n0 + m));
                }
                BallClass::Straddle => break,
                BallClass::Inside => {
                    deepest = deepest.max(n0 + m);
                    if !labels.insert(ball.label()) {
                        return Ok(exact_result(p, Rational::zero(), GreenMode::ExactBounded, n0 + m));
                    }
                    if m >= budget {
                        break;
                    }
                    ball = ball.image(map, cap, p);
                    m += 1;
                }
            }
        }
        if m >= budget {
            break;
        }
        extra *= 2;
    }
    let hi = LocalValue::Exact { coeff: &pd.sup_green / d_pow(d, deepest), prime: p }.to_interval().hi();
    Err(Error::Budget { steps: deepest, best: Interval::new(0.0, hi) })
}

/// The p-adic ball `{x : v(x - c / p^s) >= k}` with a canonical center.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Ball {
    c: BigInt,
    s: i64,
    k: i64,
}

enum BallClass {
    Inside,
    Escaping(i64),
    Straddle,
}

impl Ball {
    fn around(a: &Rational, k: i64, p: u64) -> Ball {
        let Some(v) = valuation_or_inf(a, p) else { return Ball { c: BigInt::zero(), s: 0, k } };
        if v >= k {
            return Ball { c: BigInt::zero(), s: 0, k };
        }
        let s = (-v).max(0);
        let pb = BigInt::from(p);
        let big_a = a * Rational::from_integer(pb.pow(s as u32));
        let modulus = pb.pow((k + s) as u32);
        let inv = big_a.denom().extended_gcd(&modulus).x;
        let c = (big_a.numer() * inv).mod_floor(&modulus);
        Ball { c, s, k }
    }

    fn label(&self) -> (BigInt, i64, i64) {
        (self.c.clone(), self.s, self.k)
    }

    fn center(&self, p: u64) -> Rational {
        Rational::new(self.c.clone(), BigInt::from(p).pow(self.s as u32))
    }

    fn classify(&self, rho_floor: i64, p: u64) -> BallClass {
        if self.c.is_zero() {
            return if self.k >= -rho_floor { BallClass::Inside } else { BallClass::Straddle };
        }
        let u = if self.s > 0 { self.s } else { -int_valuation(&self.c, p) };
        if u <= rho_floor {
            BallClass::Inside
        } else {
            BallClass::Escaping(u)
        }
    }

    fn image(&self, map: &DynMap, cap: i64, p: u64) -> Ball {
        let a = self.center(p);
        let tay = map.poly().taylor(&a);
        let k_new = tay
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(j, fj)| valuation_or_inf(fj, p).map(|v| v + j as i64 * self.k))
            .min()
            .expect("nonconstant map");
        Ball::around(&tay[0], k_new.min(cap), p)
    }
}

fn arch_result(value: Interval, mode: GreenMode, steps: usize) -> GreenResult {
    GreenResult { place: Place::Archimedean, value: LocalValue::Approx(value), mode, steps }
}

fn scale_down(x: Interval, d: u32, n: usize) -> Interval {
    if n == 0 {
        return x;
    }
    x / Interval::point(d as f64).powi(n as u32)
}

fn green_arch(map: &DynMap, z: &Rational, tol: f64, budget: usize) -> Result<GreenResult> {
    let arch = map.arch();
    let mut seen = HashSet::new();
    let mut w = z.clone();
    let mut n = 0;
    loop {
        if w.abs() >= arch.r0 {
            return log_phase(map, w.is_negative(), Interval::ln_rational(&w), n, tol, budget);
        }
        if !seen.insert(hash_key(&w)) {
            return Ok(arch_result(Interval::ZERO, GreenMode::ExactBounded, n));
        }
        if n >= EXACT_STEPS.min(budget) || bits(&w) > EXACT_BITS {
            break;
        }
        w = map.apply(&w);
        n += 1;
    }

    let d = map.d();
    let n0 = n;
    let r0_f = Interval::from_rational(&arch.r0).hi();
    let tail = Interval::point(arch.eta_r0).scale(1.0 / (d - 1) as f64);
    let bound_at = |sup: f64, steps: usize| -> f64 {
        let core = Interval::point(sup.max(r0_f)).ln() + arch.kappa + tail;
        scale_down(core.max0(), d, steps).hi()
    };
    let mut best = f64::INFINITY;
    let mut deepest = n0;
    let mut prec = 128u32;
    while prec <= 8192 {
        let coeffs: Vec<Dyadic> = map.inner().coeffs().iter().map(|c| Dyadic::from_rational(c, prec)).collect();
        let mut iv = Dyadic::from_rational(&w, prec);
        let mut m = 0;
        loop {
            let steps = n0 + m;
            if iv.abs_at_least(&arch.r0) {
                let iv = iv.to_interval();
                return log_phase(map, iv.hi() < 0.0, iv.abs().ln(), steps, tol, budget);
            }
            let upper = bound_at(iv.to_interval().mag(), steps);
            if upper < best {
                best = upper;
                deepest = steps;
            }
            if upper <= tol {
                return Ok(arch_result(Interval::new(0.0, upper), GreenMode::Interval, steps));
            }
            if iv.relative_width() > 1.0 / 1024.0 || m >= budget {
                break;
            }
            let x = iv.pow(map.e());
            iv = coeffs.iter().rev().fold(Dyadic::from_rational(&Rational::zero(), prec), |acc, c| acc.mul(&x).add(c));
            m += 1;
        }
        if m >= budget {
            break;
        }
        prec *= 2;
    }
    Err(Error::Budget { steps: deepest, best: Interval::new(0.0, best) })
}

/// Continues in logarithmic coordinates once `|f^n(z)| >= r0`, tracking the
/// sign and `ln |w|`: `ln |f(w)| = ln |c_d| + d ln |w| + ln |1 + u(w)|` with
/// `u(w) = sum_k (c_k / c_d) w^{k-d}` and `|u| <= eta <= 1/2`.
fn log_phase(map: &DynMap, mut negative: bool, mut ln_w: Interval, mut n: usize, tol: f64, budget: usize) -> Result<GreenResult> {
    let arch = map.arch();
    let d = map.d() as usize;
    let dm1 = Interval::point((d - 1) as f64);
    let start = n;
    loop {
        let eta = eta_upper(&arch.ratios, ln_w.lo()).min(arch.eta_r0);
        let perturb = Interval::new(-2.0 * eta, eta);
        let g = scale_down(ln_w + arch.kappa + perturb / dm1, d as u32, n).max0();
        if g.width() <= tol || eta == 0.0 {
            return Ok(arch_result(g, GreenMode::Interval, n));
        }
        if n - start >= budget {
            return Err(Error::Budget { steps: n, best: g });
        }
        let mut u = Interval::ZERO;
        for (k, r) in arch.signed_ratios.iter().enumerate() {
            if r.lo() == 0.0 && r.hi() == 0.0 {
                continue;
            }
            let mut term = *r * ln_w.scale(-((d - k) as f64)).exp();
            if negative && (d - k) % 2 == 1 {
                term = -term;
            }
            u = u + term;
        }
        let one_plus = (Interval::point(1.0) + u).intersect(&Interval::new(0.5, 1.5)).expect("perturbation bounded by 1/2");
        ln_w = arch.ln_lead + ln_w.scale(d as f64) + one_plus.ln();
        negative = arch.lead_negative != (negative && d % 2 == 1);
        n += 1;
    }
}

/// Exact iteration looking for a repeated point.
pub(crate) fn find_cycle(map: &DynMap, z: &Rational, max_steps: usize, max_bits: u64) -> Option<(usize, usize)> {
    let mut seen = std::collections::HashMap::new();
    let mut w = z.clone();
    for n in 0..=max_steps {
        if let Some(&i) = seen.get(&hash_key(&w)) {
            return Some((i, n - i));
        }
        if map.escape_place(&w).is_some() || bits(&w) > max_bits {
            return None;
        }
        seen.insert(hash_key(&w), n);
        w = map.apply(&w);
    }
    None
}
