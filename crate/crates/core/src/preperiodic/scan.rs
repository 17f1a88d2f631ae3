//! Box scans over parameters `t` and starting points `z`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify_point_map, obstruction_with, power_criterion, Certificate};
use crate::arith::{format_rational, Place, Rational};
use crate::constants::exceptional_places;
use crate::error::{Error, Result};
use crate::family::{CoverAnalysis, Family};
use crate::heights::{naive_height, DynMap};
use crate::poly::Poly;

pub const SCAN_REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateMode {
    /// Only points whose denominator divides the product of `p^floor(rho_p)`
    /// over the bad primes and with `|z| < r0`; every preperiodic point in
    /// the height box is among them.
    Divisor,
    /// Every rational in the height box.
    Box,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub t_height: f64,
    pub z_height: f64,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Skip parameters ruled out by the valuation obstruction or the power
    /// criterion.
    pub use_filters: bool,
    pub candidates: CandidateMode,
    /// Scan these parameters instead of the height box.
    pub t_values: Option<Vec<Rational>>,
    /// Stop starting new parameters after this long; the report is then
    /// flagged incomplete.
    pub time_limit: Option<Duration>,
}

impl ScanConfig {
    pub fn new(t_height: f64, z_height: f64) -> ScanConfig {
        ScanConfig {
            t_height,
            z_height,
            jobs: 0,
            use_filters: true,
            candidates: CandidateMode::Divisor,
            t_values: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub t: String,
    /// The parameter handed to the family: `t` itself or `phi(t)`.
    pub param: String,
    pub z: String,
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HeightBin {
    /// `floor(h(t))`.
    pub height_floor: u32,
    pub t_count: usize,
    pub obstructed: usize,
    pub candidates: u64,
    pub findings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub d: u32,
    pub m: u32,
    pub solvable: usize,
    pub unsolvable: usize,
    /// Parameters where the criterion was unsolvable but the scan found a
    /// preperiodic point.
    pub contradictions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub version: u32,
    pub family: String,
    pub cover: Option<String>,
    pub t_height_bound: f64,
    pub z_height_bound: f64,
    pub candidate_mode: CandidateMode,
    pub filters: bool,
    pub t_count: usize,
    pub poles: Vec<String>,
    pub obstructed: usize,
    pub criterion: Option<CriterionSummary>,
    pub candidates_checked: u64,
    pub findings: Vec<Finding>,
    pub histogram: Vec<HeightBin>,
    /// Points (as `t:z`) whose certification failed within budget.
    pub unresolved: Vec<String>,
    pub elapsed_secs: f64,
    pub complete: bool,
}

impl ScanReport {
    pub fn findings_csv(&self) -> String {
        let mut out = String::from("t,param,z,preperiod,period\n");
        for f in &self.findings {
            out.push_str(&format!("{},{},{},{},{}\n", f.t, f.param, f.z, f.preperiod, f.period));
        }
        out
    }
}

/// `m` when the cover is `1 / (1 + t^m)`.
pub fn cover_power_exponent(cov: &CoverAnalysis) -> Option<u32> {
    if *cov.numer() != Poly::one() {
        return None;
    }
    let den = cov.denom();
    let m = den.degree()?;
    let expect = &Poly::one() + &Poly::monomial(Rational::one(), m);
    (m >= 1 && *den == expect).then_some(m as u32)
}

/// All `x / y` with `max(|x|, y) <= bound`, `y >= 1`, in lowest terms.
fn t_box(bound: u64) -> Vec<Rational> {
    let b = bound as i64;
    let mut out = Vec::new();
    for y in 1..=b {
        for x in -b..=b {
            if x.gcd(&y) == 1 {
                out.push(Rational::new(BigInt::from(x), BigInt::from(y)));
            }
        }
    }
    out
}

fn divisors_up_to(factors: &[(u64, i64)], cap: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, k) in factors {
        let mut next = Vec::new();
        for &q in &out {
            let mut x = q;
            next.push(x);
            for _ in 0..k {
                match x.checked_mul(p) {
                    Some(y) if y <= cap => {
                        x = y;
                        next.push(x);
                    }
                    _ => break,
                }
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

fn candidates(map: &DynMap, mode: CandidateMode, z_bound: u64) -> Vec<Rational> {
    let zb = z_bound as i64;
    let mut out = Vec::new();
    let mut push = |a: i64, q: i64| {
        if a.gcd(&q) == 1 || (a == 0 && q == 1) {
            out.push(Rational::new(BigInt::from(a), BigInt::from(q)));
        }
    };
    match mode {
        CandidateMode::Box => {
            for q in 1..=zb {
                for a in -zb..=zb {
                    push(a, q);
                }
            }
        }
        CandidateMode::Divisor => {
            let factors: Vec<(u64, i64)> = map
                .bad_primes()
                .iter()
                .filter(|b| b.rho_floor > 0)
                .map(|b| (b.prime, b.rho_floor))
                .collect();
            let r0 = map.arch().r0.clone();
            for q in divisors_up_to(&factors, z_bound) {
                let lim = (&r0 * Rational::from_integer(BigInt::from(q))).ceil().to_integer() - BigInt::one();
                let lim = lim.to_i64().unwrap_or(i64::MAX).min(zb);
                for a in -lim..=lim {
                    push(a, q as i64);
                }
            }
        }
    }
    out
}

struct TOutcome {
    t: Rational,
    pole: bool,
    obstructed: bool,
    criterion: Option<bool>,
    candidates: u64,
    findings: Vec<Finding>,
    unresolved: Vec<String>,
}

/// Scans the parameter box and reports every preperiodic point found among
/// the candidates of each parameter.
pub fn scan(fam: &Family, cover: Option<&CoverAnalysis>, cfg: &ScanConfig) -> Result<ScanReport> {
    if !(cfg.t_height >= 0.0 && cfg.z_height >= 0.0) {
        return Err(Error::domain("height bounds must be nonnegative"));
    }
    let start = Instant::now();
    let ts = match &cfg.t_values {
        Some(v) => v.clone(),
        None => t_box(super::height_box(cfg.t_height)),
    };
    let z_bound = super::height_box(cfg.z_height);
    let exceptional: Option<BTreeSet<Place>> = if fam.is_monic() { Some(exceptional_places(fam)?) } else { None };
    let unicritical = fam.n() == 1 && fam.a(0).is_one() && fam.a(1).is_one();
    let crit_m = cover.and_then(cover_power_exponent).filter(|_| unicritical);
    let stopped = AtomicBool::new(false);

    let work = |t: &Rational| -> Option<TOutcome> {
        if stopped.load(Ordering::Relaxed) {
            return None;
        }
        if let Some(limit) = cfg.time_limit {
            if start.elapsed() > limit {
                stopped.store(true, Ordering::Relaxed);
                return None;
            }
        }
        let mut out = TOutcome {
            t: t.clone(),
            pole: false,
            obstructed: false,
            criterion: None,
            candidates: 0,
            findings: Vec::new(),
            unresolved: Vec::new(),
        };
        let param = match cover {
            Some(c) => match c.eval(t) {
                Ok(p) => p,
                Err(_) => {
                    out.pole = true;
                    return Some(out);
                }
            },
            None => t.clone(),
        };
        if let Some(exc) = &exceptional {
            out.obstructed = obstruction_with(exc, fam.e(), &param).map(|o| super::is_obstructed(&o)).unwrap_or(false);
        }
        if let Some(m) = crit_m {
            if !t.is_zero() {
                out.criterion = power_criterion(fam.d(), m, t).ok().map(|r| r.solvable);
            }
        }
        if cfg.use_filters && (out.obstructed || out.criterion == Some(false)) {
            return Some(out);
        }
        let map = match DynMap::new(fam, &param) {
            Ok(m) => m,
            Err(e) => {
                out.unresolved.push(format!("{}: {e}", format_rational(t)));
                return Some(out);
            }
        };
        for z in candidates(&map, cfg.candidates, z_bound) {
            out.candidates += 1;
            match certify_point_map(&map, &z) {
                Ok(Certificate::Preperiodic { preperiod, period }) => out.findings.push(Finding {
                    t: format_rational(t),
                    param: format_rational(&param),
                    z: format_rational(&z),
                    preperiod,
                    period,
                }),
                Ok(Certificate::Wandering { .. }) => {}
                Err(_) => out.unresolved.push(format!("{}:{}", format_rational(t), format_rational(&z))),
            }
        }
        Some(out)
    };

    let run = || -> Vec<Option<TOutcome>> { ts.par_iter().map(work).collect() };
    let outcomes = if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(run)
    } else {
        run()
    };

    let mut complete = true;
    let mut poles = Vec::new();
    let mut obstructed = 0;
    let mut findings = Vec::new();
    let mut unresolved = Vec::new();
    let mut candidates_checked = 0;
    let mut bins: BTreeMap<u32, HeightBin> = BTreeMap::new();
    let mut crit = crit_m.map(|m| CriterionSummary { d: fam.d(), m, solvable: 0, unsolvable: 0, contradictions: Vec::new() });
    let mut t_count = 0;
    for o in outcomes {
        let Some(o) = o else {
            complete = false;
            continue;
        };
        t_count += 1;
        let hf = naive_height(&o.t).to_interval().mid().floor() as u32;
        let bin = bins.entry(hf).or_insert_with(|| HeightBin { height_floor: hf, ..HeightBin::default() });
        bin.t_count += 1;
        if o.pole {
            poles.push(format_rational(&o.t));
            continue;
        }
        if o.obstructed {
            obstructed += 1;
            bin.obstructed += 1;
        }
        if let (Some(c), Some(solvable)) = (crit.as_mut(), o.criterion) {
            if solvable {
                c.solvable += 1;
            } else {
                c.unsolvable += 1;
                if !o.findings.is_empty() {
                    c.contradictions.push(format_rational(&o.t));
                }
            }
        }
        bin.candidates += o.candidates;
        bin.findings += o.findings.len();
        candidates_checked += o.candidates;
        if !o.unresolved.is_empty() {
            complete = false;
        }
        findings.extend(o.findings);
        unresolved.extend(o.unresolved);
    }
    Ok(ScanReport {
        version: SCAN_REPORT_VERSION,
        family: fam.describe(),
        cover: cover.map(|c| format!("({}) / ({})", c.numer(), c.denom())),
        t_height_bound: cfg.t_height,
        z_height_bound: cfg.z_height,
        candidate_mode: cfg.candidates,
        filters: cfg.use_filters,
        t_count,
        poles,
        obstructed,
        criterion: crit,
        candidates_checked,
        findings,
        histogram: bins.into_values().collect(),
        unresolved,
        elapsed_secs: start.elapsed().as_secs_f64(),
        complete,
    })
}
