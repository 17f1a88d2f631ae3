use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{rational_vec_str, Rational};
use crate::error::{Error, Result};
use crate::poly::{factor_over_q, Poly};

/// On-disk form of a cover `phi = numer / denom`, coefficient lists with
/// the constant term first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSpec {
    #[serde(with = "rational_vec_str")]
    pub numer: Vec<Rational>,
    #[serde(with = "rational_vec_str")]
    pub denom: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoleLocation {
    /// Roots of a monic irreducible polynomial over Q.
    Affine(Poly),
    Infinity,
}

impl Serialize for PoleLocation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PoleLocation::Affine(p) => p.serialize(s),
            PoleLocation::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PoleLocation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<PoleLocation, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Inf(String),
            Affine(Poly),
        }
        match Repr::deserialize(d)? {
            Repr::Inf(s) if s == "inf" => Ok(PoleLocation::Infinity),
            Repr::Inf(s) => Err(D::Error::custom(format!("unknown pole location {s:?}"))),
            Repr::Affine(p) => Ok(PoleLocation::Affine(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pole {
    pub location: PoleLocation,
    pub order: u32,
    /// Number of conjugate poles sharing this location factor.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoverSpec", into = "CoverSpec")]
pub struct CoverAnalysis {
    numer: Poly,
    denom: Poly,
    poles: Vec<Pole>,
}

impl TryFrom<CoverSpec> for CoverAnalysis {
    type Error = Error;
    fn try_from(spec: CoverSpec) -> Result<CoverAnalysis> {
        analyze_cover(&Poly::new(spec.numer), &Poly::new(spec.denom))
    }
}

impl From<CoverAnalysis> for CoverSpec {
    fn from(c: CoverAnalysis) -> CoverSpec {
        CoverSpec { numer: c.numer.coeffs().to_vec(), denom: c.denom.coeffs().to_vec() }
    }
}

impl CoverAnalysis {
    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn numer(&self) -> &Poly {
        &self.numer
    }

    pub fn denom(&self) -> &Poly {
        &self.denom
    }

    /// Affine poles only.
    pub fn affine_poles(&self) -> impl Iterator<Item = (&Poly, &Pole)> {
        self.poles.iter().filter_map(|p| match &p.location {
            PoleLocation::Affine(f) => Some((f, p)),
            PoleLocation::Infinity => None,
        })
    }

    /// `phi(t)`; errors at a pole.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let den = self.denom.eval(t);
        if num_traits::Zero::is_zero(&den) {
            return Err(Error::domain(format!("t = {t} is a pole of the cover")));
        }
        Ok(self.numer.eval(t) / den)
    }
}

/// Pole structure of `numer / denom` over Q-bar, grouped by irreducible
/// factors of the denominator.
pub fn analyze_cover(numer: &Poly, denom: &Poly) -> Result<CoverAnalysis> {
    let dd = denom
        .degree()
        .ok_or_else(|| Error::InvalidCover("denominator is zero".into()))?;
    let dn = numer.degree();
    if dd == 0 && dn.unwrap_or(0) == 0 {
        return Err(Error::InvalidCover("constant map".into()));
    }
    if numer.gcd(denom).degree().unwrap_or(0) > 0 {
        return Err(Error::InvalidCover("numerator and denominator share a factor".into()));
    }
    let mut poles: Vec<Pole> = factor_over_q(denom)?
        .factors
        .into_iter()
        .map(|(f, m)| Pole { count: f.degree().unwrap(), location: PoleLocation::Affine(f), order: m })
        .collect();
    if let Some(dn) = dn {
        if dn > dd {
            poles.push(Pole { location: PoleLocation::Infinity, order: (dn - dd) as u32, count: 1 });
        }
    }
    Ok(CoverAnalysis { numer: numer.clone(), denom: denom.clone(), poles })
}

/// Minimum number of affine poles of order prime to `e`.
pub fn n_e(e: u32) -> usize {
    match e {
        2 => 5,
        3 => 4,
        _ => 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generality {
    pub general: bool,
    /// Affine poles (conjugates counted separately) of order prime to `e`.
    pub qualifying: usize,
    pub required: usize,
}

pub fn is_e_general(cov: &CoverAnalysis, e: u32) -> Generality {
    let qualifying = cov
        .affine_poles()
        .filter(|(_, p)| num_integer::gcd(p.order, e) == 1)
        .map(|(_, p)| p.count)
        .sum();
    let required = n_e(e);
    Generality { general: qualifying >= required, qualifying, required }
}
