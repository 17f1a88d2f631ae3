use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use heightforge::arith::{format_rational, parse_rational, LocalValue, Place, Rational};
use heightforge::constants::{resultant_bound_check, model_resultant, theorem1_constants};
use heightforge::family::{analyze_cover, is_e_general, CoverAnalysis, CoverSpec, Family, FamilySpec};
use heightforge::heights::{
    arakelov_green, canonical_height, canonical_height_global, l1_l2_split, local_green, DEFAULT_TOL,
};
use heightforge::poly::Poly;
use heightforge::preperiodic::{
    bad_place_obstruction, find_nonpower_place, is_obstructed, power_criterion, scan, CandidateMode, ScanConfig,
};
use heightforge::Error;
use serde_json::{json, Value};

mod repro;

#[derive(Parser)]
#[command(name = "heightforge", version, about = "Canonical heights and preperiodic points of polynomial families over Q")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Local,
    Global,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Divisor,
    Box,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical height of z under f_t.
    Height {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "local")]
        method: Method,
        /// Bit budget for the global method.
        #[arg(long, default_value_t = 1 << 16)]
        max_bits: u64,
    },
    /// Local Green's function at one place.
    Green {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// `inf` or a prime.
        #[arg(long)]
        place: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Arakelov-Green pairing g_v(x, y).
    Pairing {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        place: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Place constants and the lower bound constants for a monic family.
    Constants {
        #[arg(long)]
        family: String,
        /// Number of primes where t is not integral.
        #[arg(long, default_value_t = 0)]
        bad_places: usize,
    },
    /// Model resultant of f_t and its height bound.
    Resultant {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Valuation obstruction to rational preperiodic points of f_t.
    Obstruct {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Whether x^m + y^m = +-w^d is solvable for t = x/y.
    Criterion {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Pole structure of a cover, and optionally its local data at t.
    Cover {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        e: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Comma-separated places excluded from the sums; `inf` is always included.
        #[arg(long, default_value = "inf")]
        places: String,
    },
    /// Scan a parameter box for rational preperiodic points.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long)]
        cover: Option<String>,
        #[arg(long)]
        t_height: f64,
        #[arg(long)]
        z_height: f64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "divisor")]
        mode: Mode,
        #[arg(long)]
        no_filters: bool,
        /// Comma-separated parameters replacing the height box.
        #[arg(long, allow_hyphen_values = true)]
        t_values: Option<String>,
        #[arg(long)]
        time_limit_secs: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the reproduction checks and print one line per check.
    Repro {
        /// Run the full-size scans instead of reduced ones.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Parse(m) => CliError::Parse(m),
            e => CliError::Lib(e),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn rational(s: &str) -> CliResult<Rational> {
    Ok(parse_rational(s)?)
}

fn place(s: &str) -> CliResult<Place> {
    Ok(s.parse()?)
}

fn read_spec(arg: &str) -> CliResult<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Parse(format!("cannot read {arg}: {e}")))
}

fn load_family(arg: &str) -> CliResult<Family> {
    let spec: FamilySpec = serde_json::from_str(&read_spec(arg)?).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(Family::try_from(spec)?)
}

fn load_cover(arg: &str) -> CliResult<CoverAnalysis> {
    let spec: CoverSpec = serde_json::from_str(&read_spec(arg)?).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(analyze_cover(&Poly::new(spec.numer), &Poly::new(spec.denom))?)
}

fn tolerance(flag: Option<f64>) -> CliResult<f64> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("HEIGHTFORGE_TOL") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Parse(format!("HEIGHTFORGE_TOL={s:?} is not a number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn local_value_json(v: &LocalValue) -> Value {
    let iv = v.to_interval();
    json!({ "value": v, "value_lo": iv.lo(), "value_hi": iv.hi() })
}

fn run(cmd: Cmd) -> CliResult<Value> {
    match cmd {
        Cmd::Height { family, t, z, tol, method, max_bits } => {
            let fam = load_family(&family)?;
            let (t, z, tol) = (rational(&t)?, rational(&z)?, tolerance(tol)?);
            let (h, name) = match method {
                Method::Local => (canonical_height(&fam, &t, &z, tol)?, "local"),
                Method::Global => (canonical_height_global(&fam, &t, &z, tol, max_bits)?, "global"),
            };
            Ok(json!({
                "family": fam.describe(), "t": format_rational(&t), "z": format_rational(&z),
                "lo": h.lo, "hi": h.hi, "method": name,
            }))
        }
        Cmd::Green { family, t, z, place: v, tol } => {
            let fam = load_family(&family)?;
            let g = local_green(&fam, &rational(&t)?, place(&v)?, &rational(&z)?, tolerance(tol)?)?;
            let mut out = local_value_json(&g.value);
            out["mode"] = json!(g.mode);
            out["place"] = json!(g.place);
            out["steps"] = json!(g.steps);
            Ok(out)
        }
        Cmd::Pairing { family, t, place: v, x, y, tol } => {
            let fam = load_family(&family)?;
            let v = place(&v)?;
            let g = arakelov_green(&fam, &rational(&t)?, v, &rational(&x)?, &rational(&y)?, tolerance(tol)?)?;
            let mut out = local_value_json(&g);
            out["place"] = json!(v);
            Ok(out)
        }
        Cmd::Constants { family, bad_places } => {
            let fam = load_family(&family)?;
            Ok(serde_json::to_value(theorem1_constants(&fam, bad_places)?).expect("report serializes"))
        }
        Cmd::Resultant { family, t } => {
            let fam = load_family(&family)?;
            let t = rational(&t)?;
            let res = model_resultant(&fam, &t);
            Ok(json!({ "resultant": format_rational(&res), "bound": resultant_bound_check(&fam, &t) }))
        }
        Cmd::Obstruct { family, t } => {
            let fam = load_family(&family)?;
            let obs = bad_place_obstruction(&fam, &rational(&t)?)?;
            Ok(json!({ "obstructed": is_obstructed(&obs), "places": obs }))
        }
        Cmd::Criterion { d, m, t } => Ok(serde_json::to_value(power_criterion(d, m, &rational(&t)?)?).expect("serializes")),
        Cmd::Cover { cover, e, t, places } => {
            let cov = load_cover(&cover)?;
            let mut out = json!({ "poles": cov.poles() });
            if let Some(e) = e {
                out["generality"] = json!(is_e_general(&cov, e));
            }
            if let Some(t) = t {
                let t = rational(&t)?;
                let mut s: BTreeSet<Place> = BTreeSet::from([Place::Archimedean]);
                for p in places.split(',').filter(|p| !p.trim().is_empty()) {
                    s.insert(place(p)?);
                }
                let phi = cov.eval(&t)?;
                out["phi"] = json!(format_rational(&phi));
                if let Some(e) = e {
                    out["nonpower_place"] = json!(find_nonpower_place(&cov, e, &s, &t)?);
                    let (l1, l2) = l1_l2_split(&cov, e, &s, &t)?;
                    out["l1"] = json!({ "terms": l1, "lo": l1.to_interval().lo(), "hi": l1.to_interval().hi() });
                    out["l2"] = json!({ "terms": l2, "lo": l2.to_interval().lo(), "hi": l2.to_interval().hi() });
                }
            }
            Ok(out)
        }
        Cmd::Scan { family, cover, t_height, z_height, jobs, mode, no_filters, t_values, time_limit_secs, out, csv } => {
            let fam = load_family(&family)?;
            let cov = cover.as_deref().map(load_cover).transpose()?;
            let mut cfg = ScanConfig::new(t_height, z_height);
            cfg.jobs = jobs;
            cfg.use_filters = !no_filters;
            cfg.candidates = match mode {
                Mode::Divisor => CandidateMode::Divisor,
                Mode::Box => CandidateMode::Box,
            };
            if let Some(list) = t_values {
                cfg.t_values = Some(list.split(',').map(rational).collect::<CliResult<Vec<_>>>()?);
            }
            cfg.time_limit = time_limit_secs.map(Duration::from_secs);
            let report = scan(&fam, cov.as_ref(), &cfg)?;
            let value = serde_json::to_value(&report).expect("report serializes");
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&value).expect("serializes");
                std::fs::write(&path, text).map_err(|e| CliError::Lib(Error::Domain(format!("cannot write {}: {e}", path.display()))))?;
            }
            if let Some(path) = csv {
                std::fs::write(&path, report.findings_csv())
                    .map_err(|e| CliError::Lib(Error::Domain(format!("cannot write {}: {e}", path.display()))))?;
            }
            Ok(value)
        }
        Cmd::Repro { full } => repro::run(full),
    }
}

fn error_json(kind: &str, message: String, extra: Option<Value>) -> Value {
    let mut err = json!({ "kind": kind, "message": message });
    if let Some(x) = extra {
        err["best"] = x;
    }
    json!({ "error": err })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are parse errors; help and version are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (value, code) = match run(cli.cmd) {
        Ok(v) => {
            let failed = v.get("all_passed").map(|p| p == &json!(false)).unwrap_or(false);
            (v, if failed { 4 } else { 0 })
        }
        Err(CliError::Parse(m)) => (error_json("parse", m, None), 1),
        Err(CliError::Lib(e)) => match &e {
            Error::Budget { best, .. } => {
                (error_json("budget", e.to_string(), Some(json!({ "lo": best.lo(), "hi": best.hi() }))), 3)
            }
            Error::InvalidFamily(_) | Error::InvalidCover(_) => (error_json("parse", e.to_string(), None), 1),
            _ => (error_json("domain", e.to_string(), None), 2),
        },
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"));
    ExitCode::from(code)
}
