//! Orbits, preperiodicity certificates, valuation obstructions and scans.

mod scan;

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factor::{exact_root, factorize};
use crate::arith::{hash_key, valuation_or_inf, Interval, LocalValue, Place, Rational};
use crate::constants::exceptional_places;
use crate::error::{Error, Result};
use crate::family::{CoverAnalysis, Family};
use crate::heights::{canonical_height_map, naive_height, DynMap, HeightInterval, DEFAULT_TOL};

pub use scan::{cover_power_exponent, scan, CandidateMode, Finding, HeightBin, ScanConfig, ScanReport, SCAN_REPORT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitEvent {
    CycleFound { preperiod: usize, period: usize },
    EscapeCertified { place: Place, step: usize },
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "crate::arith::rational_vec_str")]
    pub points: Vec<Rational>,
    pub event: OrbitEvent,
    pub naive_heights: Vec<f64>,
}

/// Exact forward orbit of `z` under `f_t`. Stops at the first repeated
/// point, at the first point past `height_cutoff` lying in a certified
/// escape region, or after `max_steps` applications of the map.
pub fn iterate_orbit(fam: &Family, t: &Rational, z: &Rational, max_steps: usize, height_cutoff: f64) -> Result<OrbitRecord> {
    let map = DynMap::new(fam, t)?;
    Ok(iterate_orbit_map(&map, z, max_steps, height_cutoff))
}

pub fn iterate_orbit_map(map: &DynMap, z: &Rational, max_steps: usize, height_cutoff: f64) -> OrbitRecord {
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut points = Vec::new();
    let mut heights = Vec::new();
    let mut w = z.clone();
    let mut n = 0;
    let event = loop {
        if let Some(&i) = seen.get(&hash_key(&w)) {
            break OrbitEvent::CycleFound { preperiod: i, period: n - i };
        }
        let h = naive_height(&w).to_interval().mid();
        seen.insert(hash_key(&w), n);
        points.push(w.clone());
        heights.push(h);
        if h > height_cutoff {
            if let Some(place) = map.escape_place(&w) {
                break OrbitEvent::EscapeCertified { place, step: n };
            }
        }
        if n >= max_steps {
            break OrbitEvent::BudgetExceeded;
        }
        w = map.apply(&w);
        n += 1;
    };
    OrbitRecord { points, event, naive_heights: heights }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WanderingWitness {
    /// `f^step(z)` lies in the escape region at `place`, so `G_place(z)`
    /// is at least `lower_bound` (exact at a prime).
    Escape { place: Place, step: usize, lower_bound: LocalValue },
    /// A canonical height enclosure with positive lower end.
    Height { interval: HeightInterval },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Certificate {
    Preperiodic { preperiod: usize, period: usize },
    Wandering { hhat_lower_bound: f64, witness: WanderingWitness },
}

impl Certificate {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self, Certificate::Preperiodic { .. })
    }
}

const CERT_MAX_BITS: u64 = 1 << 16;

pub fn certify_point(fam: &Family, t: &Rational, z: &Rational) -> Result<Certificate> {
    let map = DynMap::new(fam, t)?;
    certify_point_map(&map, z)
}

/// Certifies `z` as preperiodic (exact cycle) or wandering (a positive
/// lower bound for the canonical height).
pub fn certify_point_map(map: &DynMap, z: &Rational) -> Result<Certificate> {
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut w = z.clone();
    let mut n = 0;
    while w.numer().bits() + w.denom().bits() <= CERT_MAX_BITS {
        if let Some(&i) = seen.get(&hash_key(&w)) {
            return Ok(Certificate::Preperiodic { preperiod: i, period: n - i });
        }
        if let Some(place) = map.escape_place(&w) {
            let value = escape_lower_bound(map, place, &w, n);
            let lo = value.to_interval().lo();
            if lo > 0.0 {
                return Ok(Certificate::Wandering {
                    hhat_lower_bound: lo,
                    witness: WanderingWitness::Escape { place, step: n, lower_bound: value },
                });
            }
            break;
        }
        seen.insert(hash_key(&w), n);
        w = map.apply(&w);
        n += 1;
    }
    // the orbit grew past the exact budget without a usable escape bound
    let mut tol = DEFAULT_TOL;
    while tol > 1e-300 {
        match canonical_height_map(map, z, tol) {
            Ok(h) if h.lo > 0.0 => {
                return Ok(Certificate::Wandering { hhat_lower_bound: h.lo, witness: WanderingWitness::Height { interval: h } })
            }
            Ok(_) | Err(Error::Budget { .. }) => tol /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Budget { steps: n, best: Interval::ZERO })
}

/// Lower bound for `G_v(z)` once `w = f^n(z)` is in the escape region at `v`.
fn escape_lower_bound(map: &DynMap, place: Place, w: &Rational, n: usize) -> LocalValue {
    let d = map.d();
    match place {
        Place::Finite(p) => {
            let data = map.padic(p);
            let u = -valuation_or_inf(w, p).expect("escaping point is nonzero");
            let coeff = (Rational::from_integer(BigInt::from(u)) - data.kappa)
                / Rational::from_integer(BigInt::from(d).pow(n as u32));
            LocalValue::Exact { coeff, prime: p }
        }
        Place::Archimedean => {
            // (d-1)(ln|w| + kappa) - 2 eta >= ln 2 on |w| >= r0
            let arch = map.arch();
            let eta = crate::heights::eta_bound(map, Interval::ln_rational(w).lo());
            let core = Interval::ln_rational(w) + arch.kappa - Interval::point(2.0 * eta) / Interval::point((d - 1) as f64);
            let scale = Interval::point(d as f64).powi(n as u32);
            let lo = (core / scale).lo().max(0.0);
            LocalValue::Approx(Interval::point(lo))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub place: Place,
    pub valuation: i64,
    pub obstructed: bool,
    /// `v_p(t) / e` when it is an integer.
    pub forced_valuation: Option<i64>,
    pub reason: String,
}

/// At each prime outside the exceptional set with `|t|_p > 1`, a
/// preperiodic point must satisfy `|z|_p^e = |t|_p`; when `e` does not
/// divide `v_p(t)` no rational point can.
pub fn bad_place_obstruction(fam: &Family, t: &Rational) -> Result<Vec<Obstruction>> {
    obstruction_with(&exceptional_places(fam)?, fam.e(), t)
}

pub(crate) fn obstruction_with(exceptional: &BTreeSet<Place>, e: u32, t: &Rational) -> Result<Vec<Obstruction>> {
    let e = e as i64;
    let mut out = Vec::new();
    for (p, k) in factorize(t.denom())? {
        let place = Place::Finite(p);
        if exceptional.contains(&place) {
            continue;
        }
        let v = -(k as i64);
        let (obstructed, forced, reason) = if v % e == 0 {
            (false, Some(v / e), format!("v_{p}(t) = {v} forces v_{p}(z) = {}", v / e))
        } else {
            (true, None, format!("e = {e} does not divide v_{p}(t) = {v}"))
        };
        out.push(Obstruction { place, valuation: v, obstructed, forced_valuation: forced, reason });
    }
    Ok(out)
}

pub fn is_obstructed(obs: &[Obstruction]) -> bool {
    obs.iter().any(|o| o.obstructed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    /// `x^m + y^m` for `t = x / y`.
    pub value: String,
    pub solvable: bool,
    pub witness: Option<String>,
}

/// Whether `x^m + y^m = +-w^d` has an integer solution `w`, for
/// `t = x / y` in lowest terms. For even `d` and `m` the minus sign is
/// impossible; otherwise it is absorbed into `w` or into `(x, y)`.
pub fn power_criterion(d: u32, m: u32, t: &Rational) -> Result<CriterionResult> {
    if d == 0 || m == 0 {
        return Err(Error::domain("d and m must be positive"));
    }
    if t.is_zero() {
        return Err(Error::domain("t = 0 is degenerate for the power criterion"));
    }
    let (x, y) = (t.numer(), t.denom());
    let value = x.pow(m) + y.pow(m);
    if value.is_zero() {
        return Err(Error::domain(format!("t = {t} is a pole: x^m + y^m = 0")));
    }
    let witness = if value.is_negative() && d % 2 == 1 {
        exact_root(&value, d)
    } else {
        exact_root(&value.abs(), d)
    };
    Ok(CriterionResult { value: value.to_string(), solvable: witness.is_some(), witness: witness.map(|w| w.to_string()) })
}

/// A prime `p` outside `s` with `v_p(phi(t)) < 0` and `e` not dividing it.
pub fn find_nonpower_place(cov: &CoverAnalysis, e: u32, s: &BTreeSet<Place>, t: &Rational) -> Result<Option<Place>> {
    let phi = cov.eval(t)?;
    if phi.is_zero() {
        return Err(Error::domain(format!("phi({t}) = 0")));
    }
    for (p, k) in factorize(phi.denom())? {
        if !s.contains(&Place::Finite(p)) && k % e != 0 {
            return Ok(Some(Place::Finite(p)));
        }
    }
    Ok(None)
}

/// `floor(exp(h))`, robust to rounding at integer boundaries.
pub fn height_box(h: f64) -> u64 {
    if h < 0.0 {
        return 0;
    }
    let x = h.exp();
    let r = x.round();
    if (x - r).abs() < 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}
